"""Probabilistic output label mapping for visual reprogramming."""

from reprolab._core import *  # noqa: F401,F403
from reprolab._core import __doc__  # noqa: F401
