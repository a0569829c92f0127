"""Linear and Kerr susceptibilities of a double-V emitter near a plasmonic nanostructure."""

__version__ = "0.1.0"

from .errors import (DarkStateError, DomainError, FitError, IntegrationError, NonUniqueSteadyStateError,
                     ParameterError, PlasmonKerrError, SingularityError)
from .model import DriveConfig, SystemParams, build_liouvillian, hamiltonian, rhs
from .plasmon_env import (DecayRateTable, PlasmonEnvironment, at_distance, environment_at, free_space,
                          from_rates, read_rate_table, synthetic_fixture)
from .susceptibility import (SusceptibilityPoint, abcd_coefficients, chi1, chi3, gain_threshold,
                             locate_gain_onset, resonant_closed_forms, susceptibility_point)
from .oracle import AmplitudeLadder, extract_susceptibilities, steady_state, time_evolve
from .vortex import (SpatialGrid, SpatialMap, VortexBeam, absorption_map, count_angular_extrema,
                     effective_drive, kerr_map, lg_amplitude)
