from src.dynamics.entangle import (
    EntangleSetup,
    LindbladResult,
    ProtocolTiming,
    build_star_hamiltonian,
    fidelity_at_optimal_time,
    gamma_sweep,
    lindblad_evolve,
    star_coupling,
)
