"""Python bindings for the modeswitch exploration library."""

from ._modeswitch import *  # noqa: F401,F403
from ._modeswitch import __version__  # noqa: F401
