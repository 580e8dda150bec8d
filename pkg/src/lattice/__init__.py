from src.lattice.bilayer import BilayerLattice, Boundary, DisorderRealization, build_realspace_hamiltonian, chiral_operator
from src.lattice.bands import (
    BandStructure,
    KPoint,
    band_energies,
    band_structure,
    bloch_kernel,
    density_of_states,
    dispersion_f,
    gap_halfwidth,
    k_grid,
    polariton_angles,
    thermal_occupation,
)
