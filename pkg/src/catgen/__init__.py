"""Cat-state generation in a driven qubit-oscillator system.

Closed and open dynamics under the full time-dependent Hamiltonian, the
closed-form RWA solution, and phase-space tomography of the conditioned
oscillator states.
"""

from .analytic import RwaSolution, alpha_t, rwa_solution
from .errors import InvariantViolation
from .model import EffectiveParams, SystemParams, effective_for, rwa_validity

__version__ = "0.1.0"
