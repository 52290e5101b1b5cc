"""
Fractal Groups Command Line
===========================

Run the verification suites, expand and export replacement systems, generate
laminations and render Julia sets.

Exit codes: 0 success, 1 verification failure or internal error, 2 usage error,
3 I/O error.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from src.core.config import AppConfig, get_config
from src.core.errors import FractalGroupsError
from src.core.julia import DEFAULT_VIEWPORT, JuliaParams, parse_complex, preset, render, to_image
from src.core.laminations import classes, generate
from src.core.replacement import (
    ReplacementSystem,
    builtin_system,
    check_axioms,
    circles,
    dendrite_of_circles,
    full_expansion,
    tree_of_circles,
)
from src.core.verification import PLANTED_DEFECTS, quasi_isometry_distortion, run_suites
from src.utils.logging_config import setup_logging
from src.utils.storage import ArtifactStorage, read_json

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_IO = 3

SUITES = ["all", "cyclic", "trees", "dendrites", "replacement", "laminations"]


class UsageError(Exception):
    """Raised by the parser instead of exiting."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:
        raise UsageError(message)


def load_system(name: str) -> ReplacementSystem:
    """A builtin system or planted-defect fixture by name, or a JSON file when ``name`` is a path."""
    if name in PLANTED_DEFECTS:
        return PLANTED_DEFECTS[name][0]()
    path = Path(name)
    if path.suffix == ".json" or path.exists():
        return ReplacementSystem.from_json(read_json(path))
    return builtin_system(name)


class FractalGroupsCLI:
    """Dispatches parsed arguments to the subcommand handlers."""

    def __init__(self, config: AppConfig):
        self.config = config
        self.storage = ArtifactStorage(config.output_dir)

    # -------------------------------------------------------------------------
    # Output
    # -------------------------------------------------------------------------

    def _emit(self, text: str, output: Optional[str]) -> None:
        if output:
            self.storage.write_text(output, text)
        else:
            sys.stdout.write(text if text.endswith("\n") else text + "\n")

    def _emit_json(self, data: Any, output: Optional[str]) -> None:
        if output:
            self.storage.write_json(output, data)
        else:
            sys.stdout.write(json.dumps(data, indent=2) + "\n")

    # -------------------------------------------------------------------------
    # Replacement systems
    # -------------------------------------------------------------------------

    def expand(self, args: argparse.Namespace) -> int:
        g = full_expansion(load_system(args.system), args.depth)
        if args.format == "json":
            self._emit_json(g.to_json(), args.output)
        elif args.format == "svg":
            self._emit(g.to_svg(), args.output)
        else:
            self._emit(g.to_dot(), args.output)
        logger.info(f"Expanded {g.system.name} to depth {args.depth}: {len(g.edges)} edges")
        return EXIT_OK

    def circles(self, args: argparse.Namespace) -> int:
        g = full_expansion(load_system(args.system), args.depth)
        found = circles(g)
        if args.format == "json":
            self._emit_json({"system": g.system.name, "depth": args.depth, "circles": [c.to_json() for c in found]}, args.output)
        else:
            lines = [" ".join(c.labels()) for c in found]
            lines.append(f"{len(found)} circles")
            self._emit("\n".join(lines), args.output)
        return EXIT_OK

    def tree_of_circles(self, args: argparse.Namespace) -> int:
        tree = tree_of_circles(full_expansion(load_system(args.system), args.depth))
        if args.format == "json":
            self._emit_json(tree.to_json(), args.output)
        else:
            degrees = sorted(set(tree.cut_point_degrees().values()))
            self._emit(f"{len(tree.cycles)} circles, tree: {tree.is_tree()}, cut point degrees: {degrees}", args.output)
        return EXIT_OK

    def dendrite_of_circles(self, args: argparse.Namespace) -> int:
        dendrite = dendrite_of_circles(full_expansion(load_system(args.system), args.depth))
        if args.format == "json":
            self._emit_json(dendrite.to_json(), args.output)
        else:
            orders = sorted(set(dendrite.point_orders().values()))
            self._emit(f"{len(dendrite.cycles)} circles, tree: {dendrite.is_tree()}, point orders: {orders}", args.output)
        return EXIT_OK

    # -------------------------------------------------------------------------
    # Laminations and Julia sets
    # -------------------------------------------------------------------------

    def lamination(self, args: argparse.Namespace) -> int:
        lam = generate(args.seed, args.generations, self.config.lamination.max_generations)
        if args.out == "svg":
            self._emit(lam.to_svg(), args.output or f"lamination_{lam.seed.replace(':', '')}_{lam.generation}.svg")
        else:
            data = lam.to_json()
            data["classes"] = [c.to_json() for c in classes(lam)]
            self._emit_json(data, args.output)
        return EXIT_OK

    def julia(self, args: argparse.Namespace) -> int:
        if args.c is not None:
            c, name, provenance = parse_complex(*args.c), "custom", {"method": "given"}
            viewport = DEFAULT_VIEWPORT
        else:
            chosen = preset(args.preset)
            c, name, provenance = chosen.c, chosen.name, chosen.parameter.provenance()
            viewport = chosen.viewport
        render_config = self.config.render
        params = JuliaParams(
            c,
            args.max_iter or render_config.max_iter,
            render_config.escape_radius,
            args.width or render_config.width,
            args.height or render_config.height,
            viewport,
        )
        output = args.output or f"julia_{name.replace(':', '')}.png"
        path = self.storage.write_png(output, to_image(render(params)))
        self._emit_json({"image": str(path), "params": params.to_json(), "provenance": provenance}, None)
        return EXIT_OK

    # -------------------------------------------------------------------------
    # Verification
    # -------------------------------------------------------------------------

    def verify(self, args: argparse.Namespace) -> int:
        budget = self.config.budget.override(args.budget)
        if args.system:
            report = check_axioms(
                load_system(args.system), args.which, args.depth or budget.depth,
                samples=budget.samples, seed=args.seed,
            )
            data: Dict[str, Any] = report.to_json()
            ok = report.ok
            text = "\n".join(
                f"[{'PASS' if c.passed else 'FAIL'}] {c.condition}: {c.detail}" for c in report.checks
            )
        else:
            result = run_suites(args.suite, budget, args.seed)
            if args.csv:
                self.storage.write_text(args.csv, result.to_csv())
            data, ok, text = result.to_json(), result.ok, result.to_text()
        if args.format == "json":
            self._emit_json(data, args.output)
        else:
            self._emit(text, args.output)
        return EXIT_OK if ok else EXIT_FAILURE

    def qi_check(self, args: argparse.Namespace) -> int:
        passed, detail = quasi_isometry_distortion(args.k, args.radius, args.cap)
        self._emit_json({"k": args.k, "radius": args.radius, "cap": args.cap, "passed": passed, "detail": detail}, args.output)
        return EXIT_OK if passed else EXIT_FAILURE


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fractal-groups", description=__doc__.split("\n\n")[1].strip())
    parser.add_argument("--log-level", default=None, help="Logging level (default from FRACTAL_GROUPS_LOG_LEVEL)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def system_command(name: str, formats: List[str], help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--system", required=True, help="Builtin name (basilica, airplane, rabbitN, ...) or JSON path")
        p.add_argument("--depth", type=int, default=1)
        p.add_argument("--format", choices=formats, default=formats[0])
        p.add_argument("--output", help="File name under the output directory (default: stdout)")
        return p

    system_command("expand", ["dot", "json", "svg"], "Expand a replacement system")
    system_command("circles", ["text", "json"], "List the circles of an expansion")
    system_command("tree-of-circles", ["text", "json"], "Tree of circles of a rabbit expansion")
    system_command("dendrite-of-circles", ["text", "json"], "Dendrite of circles of an airplane expansion")

    p = sub.add_parser("lamination", help="Generate a lamination by pullback")
    p.add_argument("--seed", required=True, help="basilica, airplane or rabbit:n")
    p.add_argument("--generations", type=int, default=3)
    p.add_argument("--out", choices=["svg", "json"], default="svg")
    p.add_argument("--output")

    p = sub.add_parser("julia", help="Render an escape-time Julia image")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--preset", help="basilica, airplane or rabbit:n")
    group.add_argument("--c", nargs=2, metavar=("RE", "IM"), help="Parameter c as two decimals")
    p.add_argument("--width", type=int)
    p.add_argument("--height", type=int)
    p.add_argument("--max-iter", type=int)
    p.add_argument("--output", help="PNG name under the output directory")

    p = sub.add_parser("verify", help="Run verification suites")
    p.add_argument("--suite", choices=SUITES, default="all")
    p.add_argument("--budget", help="Overrides such as radius=5,cap=5")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--system", help="Check the rabbit or airplane conditions on this system instead")
    p.add_argument("--which", choices=["rabbit", "airplane"], default="airplane")
    p.add_argument("--depth", type=int)
    p.add_argument("--format", choices=["text", "json"], default="json")
    p.add_argument("--csv", help="Also write the report table as CSV")
    p.add_argument("--output")

    p = sub.add_parser("qi-check", help="Distortion of the quasi-isometry onto T_(k,inf)")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--radius", type=int, default=6)
    p.add_argument("--cap", type=int, default=4)
    p.add_argument("--output")
    return parser


HANDLERS = {
    "expand": FractalGroupsCLI.expand,
    "circles": FractalGroupsCLI.circles,
    "tree-of-circles": FractalGroupsCLI.tree_of_circles,
    "dendrite-of-circles": FractalGroupsCLI.dendrite_of_circles,
    "lamination": FractalGroupsCLI.lamination,
    "julia": FractalGroupsCLI.julia,
    "verify": FractalGroupsCLI.verify,
    "qi-check": FractalGroupsCLI.qi_check,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, run one subcommand and return its exit code."""
    try:
        args = build_parser().parse_args(argv)
        config = get_config()
        setup_logging(args.log_level or config.log_level)
        return HANDLERS[args.command](FractalGroupsCLI(config), args)
    except UsageError as e:
        sys.stderr.write(f"usage error: {e}\n")
        return EXIT_USAGE
    except (FractalGroupsError, ValueError) as e:
        logger.error(f"{type(e).__name__}: {e}")
        sys.stderr.write(f"error: {e}\n")
        return EXIT_USAGE
    except OSError as e:
        logger.error(f"I/O failure: {e}")
        sys.stderr.write(f"I/O error: {e}\n")
        return EXIT_IO
    except Exception as e:
        logger.exception(f"Internal error: {type(e).__name__}: {e}")
        sys.stderr.write(f"internal error: {type(e).__name__}: {e}\n")
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
