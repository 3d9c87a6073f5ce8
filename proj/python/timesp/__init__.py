"""Exact certificates for times-p invariant measures with large Fourier
coefficients along integer sequences.

Big integers cross the boundary as decimal strings; certificates and
measures as the same canonical JSON documents the CLI emits.
"""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
