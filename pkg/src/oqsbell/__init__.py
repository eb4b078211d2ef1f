"""Non-locality and entanglement of permutation-invariant spin systems under Lindblad dynamics."""

__version__ = "0.1.0"

from .errors import (ConfigError, ConvergenceError, DegenerateSteadyStateError,
                     InvalidDimensionError, NumericalError, OQSBellError, PreconditionError)
from .symspin import (LMG, SquaredZ, build_hamiltonian, coherent_spin_state, collective_spin_ops,
                      dicke_state, dicke_superposition, energy_basis, gaussian_dicke_state,
                      gibbs_state, maximally_mixed, trace_distance)
from .liouville import (DaviesSpec, Liouvillian, MeasurementSpec, davies_generator, evolve,
                        jump_dissipator, measurement_dephasing, rotated_ladder_jump,
                        relaxation_rate, short_time_mixture, steady_state)
from .nonlocality import (BellReport, MeasurementSettings, bell_operator, bell_value,
                          measurement_observable, optimize_violation, reduce_two_qubit)
from .entanglement import WitnessReport, concurrence, spin_squeezing, witnesses
