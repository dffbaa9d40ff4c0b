"""mrclab: monitored-random-circuit simulation and statistical-mechanics toolkit."""

__version__ = "0.1.0"

from .pauli import PauliString
from .clifford import CliffordGate, sample_two_qubit_clifford, named_gate
from .stabilizer import StabilizerState

__all__ = [
    "PauliString",
    "CliffordGate",
    "sample_two_qubit_clifford",
    "named_gate",
    "StabilizerState",
    "__version__",
]
