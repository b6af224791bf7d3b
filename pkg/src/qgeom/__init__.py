"""Intrinsic volumes of the quantum state space S_d and the complementarity polytope P_d."""
from .mathkernel import Body, BodyDims, IntrinsicVolumeTable, LogReal

__version__ = "0.1.0"

__all__ = ["Body", "BodyDims", "IntrinsicVolumeTable", "LogReal", "__version__"]
