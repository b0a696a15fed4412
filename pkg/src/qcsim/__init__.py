"""Dense state-vector quantum simulation toolkit.

Covers state construction and measurement, gate application, a small
circuit text format, and the textbook algorithms built on top of them:
period finding and factoring, amplitude amplification, lattice search over
constraint assignments, key distribution, dense coding, teleportation and a
bit-flip error-correcting code.
"""

from qcsim.config import TOL
from qcsim.errors import CapacityError, DomainError
from qcsim.rng import RngStream
from qcsim.qstate import StateVector, basis_state, tensor

__all__ = [
    "TOL",
    "CapacityError",
    "DomainError",
    "RngStream",
    "StateVector",
    "basis_state",
    "tensor",
]

__version__ = "0.1.0"
