from src.spins.spin_model import (
    SpinArray,
    bipartite_bloch,
    bloch_f_S,
    cross_layer_table,
    effective_couplings,
    half_filled_array,
    load_spin_array,
    parity_violation,
    ssh_dimerized_array,
)
from src.spins.ssh import (
    FiniteSpectrum,
    ModeClassification,
    SSHParams,
    finite_spectrum,
    fit_ssh_params,
    ssh_bloch,
    ssh_finite_couplings,
    wilson_polarization,
)
