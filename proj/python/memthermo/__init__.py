"""Thermal memristor simulator: Python bindings to the C++ core."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
