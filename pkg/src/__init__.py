"""
Fractal Groups
==============

Exact, finite computations with the homeomorphism groups of the Basilica,
rabbit and airplane Julia sets: cyclic orders on angles, colored biregular
trees and their universal groups, Wazewski dendrites, edge replacement
systems, quadratic laminations and escape-time renderings.
"""

__version__ = "0.1.0"
