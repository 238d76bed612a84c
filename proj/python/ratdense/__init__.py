"""Densities of rational languages under Bernoulli, Markov and sequential measures."""

from ._ratdense import *  # noqa: F401,F403
from ._ratdense import __doc__  # noqa: F401
