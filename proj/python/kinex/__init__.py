"""Python front end to the kinex C++ core."""

from kinex._core import *  # noqa: F401,F403
from kinex._core import __doc__  # noqa: F401

__version__ = "0.1.0"
