"""
Graphviz Export
===============

Plain-text DOT rendering for truncated trees, dendrite approximations and
replacement-system expansions. Run ``dot -Tpng -O graph.gv`` to plot.
"""

from typing import Dict, Iterable, List, Optional, Tuple

Attributes = Dict[str, str]


def _quote(text: str) -> str:
    return '"' + str(text).replace("\\", "\\\\").replace('"', '\\"') + '"'


def _attributes(attrs: Optional[Attributes]) -> str:
    if not attrs:
        return ""
    body = ", ".join(f"{key}={_quote(value)}" for key, value in sorted(attrs.items()))
    return f" [{body}]"


def dot_graph(
    name: str,
    nodes: Iterable[Tuple[str, Optional[Attributes]]],
    edges: Iterable[Tuple[str, str, Optional[Attributes]]],
    directed: bool = False,
) -> str:
    """Render nodes and edges as a DOT document.

    Args:
        name: Graph name
        nodes: (node id, attributes) pairs
        edges: (tail, head, attributes) triples
        directed: Emit a digraph with ``->`` arrows

    Returns:
        str: DOT source ending in a newline
    """
    arrow = "->" if directed else "--"
    lines: List[str] = [f"{'digraph' if directed else 'graph'} {_quote(name)} {{"]
    for node, attrs in nodes:
        lines.append(f"\t{_quote(node)}{_attributes(attrs)};")
    for tail, head, attrs in edges:
        lines.append(f"\t{_quote(tail)} {arrow} {_quote(head)}{_attributes(attrs)};")
    lines.append("}")
    return "\n".join(lines) + "\n"
