"""Perturbation bounds, root tracking and multiple-root splitting for
polynomial systems."""

from rootshift._core import *  # noqa: F401,F403
from rootshift._core import __doc__  # noqa: F401
