"""Ring-based position publishing with greedy geographic routing."""

from ._georing import *  # noqa: F401,F403
from ._georing import __doc__  # noqa: F401
