"""Repeated N-firm information-sharing games (C++ core)."""

from ._infoshare import *  # noqa: F401,F403
from ._infoshare import __doc__  # noqa: F401
