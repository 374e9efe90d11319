"""Compile a small structured imperative language to pure CPS lambda terms."""

import sys

# term operations recurse over term depth
if sys.getrecursionlimit() < 10_000:
    sys.setrecursionlimit(10_000)

__version__ = "0.1.0"
