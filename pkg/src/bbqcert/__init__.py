"""bbqcert: simulation and certification toolkit for black-box quantum devices."""

from .types import (ChannelKraus, ChoiMatrix, DensityOperator, Experiment,
                    Observable, Povm, PureState, Statistics)
from .linalg import (bell_phi_plus, fidelity, partial_trace, schmidt, tensor,
                     trace_distance)
from .channels import apply_channel, choi, choi_of_unitary
from .statistics import statistics_of
from .simmap import (SimulationParams, conj_map_operator, conj_sim_state,
                     real_map_operator, real_map_density, real_pure_split)
from .chsh import (ChshValue, chsh_value, gisin_peres_s_max, optimize_s,
                   s_max_bell_diagonal, s_max_two_qubit)
from .selftest import (ext_my_check, gate_test, my_check, swap_isometry)
from .diqkd import (BellSpectrum, KeyRateInput, TailBoundInput,
                    decompose_strategy, eve_eigenvalues, hye_bound,
                    jordan_blocks, key_rate, tail_bound)
from .statecert import (bound_f_lo, bound_f_locc, bound_f_my_qubit, certify,
                        extract_lo_pure, f_my_pure, f_opt_local_unitaries)
from .quaternion import (Quaternion, QuatMatrix, box_chsh_value,
                         nonlocal_box_run, qmul)

__version__ = "0.1.0"
