"""SAW-driven polar-molecule trapping and lattice simulation."""

__version__ = "0.1.0"

from ._accel import backend  # noqa: F401
