from src.emitters.bound_state import (
    bs_exact_diagonalization,
    bs_momentum_amplitudes,
    bs_realspace_profile,
    momentum_resolvent,
    self_energy,
    solve_bound_state,
    solve_pole,
    zero_mode_ensemble,
)
from src.emitters.emitter import BoundStateSolution, CouplingPoint, EmitterConfig, parity_norms
from src.emitters.giant_atom import (
    branch_norm,
    giant_bs_profile,
    interference_factor,
    phase_profile,
    window_fraction,
)
