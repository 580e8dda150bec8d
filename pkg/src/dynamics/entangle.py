"""
W-state preparation through a star of emitters coupled to one auxiliary atom.

The auxiliary atom a exchanges its excitation with n spokes at the rate
J_eff; all emitters decay at Gamma. Starting from |e>_a |g...g> the state
stays in the vacuum + single-excitation sector, so by default the master
equation is integrated on the (n + 2)-dimensional basis
[vac, a, s_1, ..., s_n]. A full 2^(n+1) tensor-product mode is available
for n <= FULL_SPACE_LIMIT.
"""
import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as la
from joblib import Parallel, delayed
from scipy.integrate import solve_ivp
from scipy.optimize import brentq
from tqdm import tqdm

from src.data.run_state import RunState
from src.emitters.bound_state import DEFAULT_NK
from src.errors import ConfigError, IntegrationError, ProtocolFailureError
from src.spins.spin_model import _reference

logger = logging.getLogger(__name__)

FULL_SPACE_LIMIT = 4
RTOL = 1e-10
ATOL = 1e-12
TRACE_DRIFT = 1e-6
SEARCH_HORIZON = 10.0
SEARCH_POINTS = 4000

_SIGMA = np.array([[0.0, 1.0], [0.0, 0.0]])  # |g><e| with basis (g, e)


@dataclass(frozen=True, eq=False)
class EntangleSetup:
    n_spokes: int
    J_eff: float
    Gamma: float = 0.0
    t_grid: np.ndarray = None
    spoke_weights: tuple = None

    def __post_init__(self):
        if self.n_spokes < 1:
            raise ConfigError(f"n_spokes must be >= 1, got {self.n_spokes}")
        if self.Gamma < 0:
            raise ConfigError(f"Gamma must be >= 0, got {self.Gamma}")
        if self.J_eff == 0:
            raise ConfigError("J_eff must be non-zero")
        if self.t_grid is None:
            object.__setattr__(self, "t_grid", np.linspace(0.0, 2 * self.t_analytic, 401))
        t = np.asarray(self.t_grid, dtype=float)
        if t.size < 2 or t[0] != 0.0 or np.any(np.diff(t) <= 0):
            raise ConfigError("t_grid must start at 0 and be strictly increasing")
        object.__setattr__(self, "t_grid", t)
        if self.spoke_weights is not None and len(self.spoke_weights) != self.n_spokes:
            raise ConfigError("spoke_weights needs one entry per spoke")

    @property
    def weights(self):
        if self.spoke_weights is None:
            return np.ones(self.n_spokes)
        return np.asarray(self.spoke_weights, dtype=float)

    @property
    def t_analytic(self):
        """First maximum of the lossless two-level reduction, pi / (2 sqrt(n) |J_eff|)."""
        return np.pi / (2 * np.sqrt(self.n_spokes) * abs(self.J_eff))

    @property
    def tau_quarter(self):
        """pi / (4 |J_eff|), the quarter-period time quoted for the protocol."""
        return np.pi / (4 * abs(self.J_eff))

    def with_gamma(self, Gamma):
        return EntangleSetup(self.n_spokes, self.J_eff, Gamma, self.t_grid, self.spoke_weights)

    def to_dict(self):
        return {
            "n_spokes": self.n_spokes,
            "J_eff": self.J_eff,
            "Gamma": self.Gamma,
            "t_max": float(self.t_grid[-1]),
            "n_t": int(self.t_grid.size),
        }


@dataclass(frozen=True, eq=False)
class LindbladResult:
    times: np.ndarray
    fidelity: np.ndarray
    excitation: np.ndarray
    trace_deviation: np.ndarray
    purity: np.ndarray
    min_eigenvalue: np.ndarray
    params: dict = field(default_factory=dict)

    def rows(self):
        """(t, fidelity, excitation, trace_dev) per time."""
        for k in range(self.times.size):
            yield (
                float(self.times[k]),
                float(self.fidelity[k]),
                float(self.excitation[k]),
                float(self.trace_deviation[k]),
            )


@dataclass(frozen=True)
class ProtocolTiming:
    t_star: float
    F_max: float
    t_analytic: float
    F_analytic: float
    tau_quarter: float
    F_tau: float

    def to_dict(self):
        return dict(self.__dict__)


def star_coupling(lat, g, n=2, n_k=DEFAULT_NK):
    """
    J_eff for a layer-1 star: g^2 times the unit profile at offset (n, n + 1).

    The eight spokes (+-n, +-(n+1)) and (+-(n+1), +-n) are related by the
    lattice's C4 and mirror symmetries and share this value.
    """
    u1, _, half = _reference(lat, n_k, n + 1)
    return float(g**2 * u1[half + n + 1, half + n])


def _embed(op, site, n_sites):
    mats = [np.eye(2)] * n_sites
    mats[site] = op
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


def _sector_operators(setup):
    d = setup.n_spokes + 2
    H = np.zeros((d, d))
    H[1, 2:] = setup.J_eff * setup.weights
    H[2:, 1] = setup.J_eff * setup.weights
    jumps = []
    for k in range(1, d):
        L = np.zeros((d, d))
        L[0, k] = 1.0
        jumps.append(L)
    number = np.diag([0.0] + [1.0] * (d - 1))
    initial = np.zeros(d)
    initial[1] = 1.0
    goal = np.zeros(d)
    goal[2:] = 1.0 / np.sqrt(setup.n_spokes)
    return H, jumps, number, initial, goal


def _full_operators(setup):
    n = setup.n_spokes + 1
    sig = [_embed(_SIGMA, s, n) for s in range(n)]
    H = np.zeros((2**n, 2**n))
    for i, w in enumerate(setup.weights, start=1):
        H += setup.J_eff * w * (sig[0].T @ sig[i] + sig[i].T @ sig[0])
    number = sum(s.T @ s for s in sig)
    # qubit 0 is the most significant bit; |e> is bit value 1
    initial = np.zeros(2**n)
    initial[1 << (n - 1)] = 1.0
    goal = np.zeros(2**n)
    for i in range(1, n):
        goal[1 << (n - 1 - i)] = 1.0 / np.sqrt(setup.n_spokes)
    return H, sig, number, initial, goal


def build_star_hamiltonian(setup, full=False):
    """
    H = J_eff (sigma_a^+ sum_i w_i sigma_i + h.c.).

    Sector basis [vac, a, s_1..s_n] by default; full=True gives the operator
    on all (n_spokes + 1) two-level systems, qubit 0 being the auxiliary atom.
    """
    if full:
        if setup.n_spokes > FULL_SPACE_LIMIT:
            raise ConfigError(f"full space mode is limited to n_spokes <= {FULL_SPACE_LIMIT}")
        return _full_operators(setup)[0]
    return _sector_operators(setup)[0]


def _lindblad_rhs(H, jumps, gamma):
    rank = H.shape[0]
    if gamma > 0 and jumps:
        L = np.array(jumps, dtype=complex)
        L_dagger = L.conj().transpose(0, 2, 1)
        L_squared = np.sum(L_dagger @ L, axis=0)
    else:
        L = None

    def rhs(t, y):
        rho = y.reshape(rank, rank)
        rho_dot = -1j * (H @ rho - rho @ H)
        if L is not None:
            rho_dot += gamma * (np.sum(L @ rho @ L_dagger, axis=0) - 0.5 * (L_squared @ rho + rho @ L_squared))
        return rho_dot.ravel()

    return rhs


def _integrate(setup, full, initial, t_end, t_eval=None, dense=False):
    if full:
        if setup.n_spokes > FULL_SPACE_LIMIT:
            raise ConfigError(f"full space mode is limited to n_spokes <= {FULL_SPACE_LIMIT}")
        H, jumps, number, psi0, goal = _full_operators(setup)
    else:
        H, jumps, number, psi0, goal = _sector_operators(setup)
    if initial is not None:
        psi0 = np.asarray(initial, dtype=complex)
        if psi0.shape != (H.shape[0],):
            raise ConfigError(f"initial state has shape {psi0.shape}, expected ({H.shape[0]},)")
        if not np.isclose(np.vdot(psi0, psi0).real, 1.0, atol=1e-12):
            raise ConfigError("initial state is not normalized")

    rho0 = np.outer(psi0, np.conj(psi0)).astype(complex)
    rhs = _lindblad_rhs(H.astype(complex), jumps, setup.Gamma)
    soln = solve_ivp(
        rhs,
        t_span=(0.0, t_end),
        y0=rho0.ravel(),
        method="DOP853",
        t_eval=t_eval,
        dense_output=dense,
        rtol=RTOL,
        atol=ATOL,
    )
    if not soln.success:
        raise IntegrationError(f"master equation integration failed: {soln.message}", t_end=t_end)
    logger.debug("DOP853: %d rhs evaluations, dim %d", soln.nfev, H.shape[0])
    return soln, rhs, number, goal


def lindblad_evolve(setup, initial=None, full=False):
    """
    Integrate d rho/dt = -i[H, rho] + Gamma sum_j D[sigma_j] rho on setup.t_grid.

    initial defaults to |e>_a |g>^n; the fidelity is measured against
    |g>_a (1/sqrt(n)) sum_i sigma_i^+ |g>^n.
    """
    times = setup.t_grid
    soln, _, number, goal = _integrate(setup, full, initial, float(times[-1]), t_eval=times)
    rank = goal.size
    rhos = soln.y.T.reshape(-1, rank, rank)

    fidelity = np.real(np.einsum("i,tij,j->t", goal, rhos, goal))
    excitation = np.real(np.einsum("ij,tji->t", number, rhos))
    trace_dev = np.abs(np.real(np.trace(rhos, axis1=1, axis2=2)) - 1.0)
    purity = np.real(np.einsum("tij,tji->t", rhos, rhos))
    min_eig = np.array([la.eigvalsh(0.5 * (r + r.conj().T))[0] for r in rhos])

    worst = float(np.max(trace_dev))
    if worst > TRACE_DRIFT:
        raise IntegrationError(f"trace drifted by {worst:.2e}", trace_deviation=worst)
    logger.info(
        "Lindblad run n=%d Gamma=%.3g: max F=%.10f, max trace dev=%.2e",
        setup.n_spokes,
        setup.Gamma,
        float(np.max(fidelity)),
        worst,
    )
    return LindbladResult(
        times=times,
        fidelity=fidelity,
        excitation=excitation,
        trace_deviation=trace_dev,
        purity=purity,
        min_eigenvalue=min_eig,
        params={**setup.to_dict(), "full_space": full},
    )


def fidelity_at_optimal_time(setup, full=False):
    """
    First local maximum of F(t), refined with brentq on dF/dt.

    The derivative is <goal| L(rho(t)) |goal> evaluated on the integrator's
    dense output. Also reports F at the two-level time and at pi / (4 J_eff).
    """
    horizon = SEARCH_HORIZON / abs(setup.J_eff)
    soln, rhs, _, goal = _integrate(setup, full, None, horizon, dense=True)
    rank = goal.size

    def fid(t):
        return float(np.real(goal @ soln.sol(t).reshape(rank, rank) @ goal))

    def slope(t):
        return float(np.real(goal @ rhs(t, soln.sol(t)).reshape(rank, rank) @ goal))

    grid = np.linspace(0.0, horizon, SEARCH_POINTS)
    slopes = np.array([slope(t) for t in grid])
    turns = np.flatnonzero((slopes[:-1] > 0) & (slopes[1:] <= 0))
    if turns.size == 0:
        raise ProtocolFailureError(f"fidelity has no maximum before t = {horizon:.3g}", horizon=horizon)
    k = turns[0]
    t_star = float(brentq(slope, grid[k], grid[k + 1], xtol=1e-14))
    timing = ProtocolTiming(
        t_star=t_star,
        F_max=fid(t_star),
        t_analytic=float(setup.t_analytic),
        F_analytic=fid(setup.t_analytic),
        tau_quarter=float(setup.tau_quarter),
        F_tau=fid(setup.tau_quarter),
    )
    logger.info(
        "optimal time %.10g (two-level %.10g, quarter period %.10g), F_max=%.10f",
        timing.t_star,
        timing.t_analytic,
        timing.tau_quarter,
        timing.F_max,
    )
    return timing


def gamma_sweep(setup, gammas):
    """fidelity_at_optimal_time for each decay rate, one job per rate."""
    state = RunState.get_instance()
    return Parallel(n_jobs=state.threads)(
        delayed(fidelity_at_optimal_time)(setup.with_gamma(g))
        for g in tqdm(gammas, desc="decay rates", disable=not state.show_progress)
    )
