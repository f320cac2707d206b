"""Hierarchical-symmetry toolkit for multiplicative cascades."""

from ._core import *  # noqa: F401,F403
from ._core import __version__, DomainError, NumericError, ParseError  # noqa: F401
