"""Exact finite-alphabet information audits for site-invariant prediction."""

from invarlab._core import *  # noqa: F401,F403
from invarlab._core import __version__  # noqa: F401
