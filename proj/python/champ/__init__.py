"""Pedestrian hotspot maps and vigilance advisories from drive logs."""

from ._core import *  # noqa: F401,F403
from ._core import __doc__  # noqa: F401
