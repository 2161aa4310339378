"""Resonant Jaynes-Cummings dynamics and Lindblad open-system evolution.

Closed-system evolution uses the exact Fock-basis solution of the resonant
JC interaction (Rabi frequency g0 sqrt(n) between |g,n> and |e,n-1>), so
no integrator is involved.  Open-system evolution integrates the Lindblad
master equation with collapse channels sqrt(kappa) a, sqrt(gamma) sigma-,
and sqrt(gamma_phi/2) sigma_z.

Times are in microseconds, rates in 1/us, g0 in rad/us.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.integrate import solve_ivp

from . import io_utils
from .errors import IntegrationError, StateValidationError
from .hilbert import (
    HilbertSpace,
    JointState,
    OperatorSet,
    check_truncation,
    coherent_amplitudes,
    coherent_state,
    default_cutoff,
    partial_trace,
    purity,
    qubit_state,
    tensor,
)

_SIGMA = {
    "sx": np.array([[0, 1], [1, 0]], dtype=complex),
    "sy": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "sz": np.array([[-1, 0], [0, 1]], dtype=complex),  # |e> -> +1
}

OBSERVABLE_COLUMNS = ("P_e", "purity", "sx", "sy", "sz", "n_mean")


@dataclass(frozen=True)
class SystemParams:
    """Physical constants of one experimental configuration."""

    g0: float                      # rad/us
    alpha0: complex = 0.0          # initial coherent amplitude
    c_g: complex = 1.0             # initial qubit amplitude on |g>
    c_e: complex = 0.0             # initial qubit amplitude on |e>
    kappa_phonon: float = 0.0      # 1/us, = 1/T1_ph
    gamma_qubit: float = 0.0       # 1/us
    gamma_phi: float = 0.0         # 1/us, pure dephasing

    def __post_init__(self):
        if self.g0 <= 0:
            raise ValueError("g0 must be positive")
        for name in ("kappa_phonon", "gamma_qubit", "gamma_phi"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        norm_sq = abs(self.c_g) ** 2 + abs(self.c_e) ** 2
        if abs(norm_sq - 1.0) > 1e-6:
            raise StateValidationError(f"|c_g|^2 + |c_e|^2 = {norm_sq} deviates from 1")
        if abs(norm_sq - 1.0) > 0:
            s = math.sqrt(norm_sq)
            object.__setattr__(self, "c_g", self.c_g / s)
            object.__setattr__(self, "c_e", self.c_e / s)


@dataclass(frozen=True)
class CharacteristicTimes:
    t_collapse: float
    t_R: float
    t_C: float


@dataclass
class Trajectory:
    """Time series of states and/or named observables."""

    times: np.ndarray
    states: list | None
    observables: dict

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")
        for name, series in self.observables.items():
            if len(series) != len(self.times):
                raise ValueError(f"observable {name} length mismatch")

    def to_csv(self, path):
        cols = [self.observables.get(c) for c in OBSERVABLE_COLUMNS]
        rows = []
        for i, t in enumerate(self.times):
            row = [t]
            for col in cols:
                row.append(float(col[i]) if col is not None else float("nan"))
            rows.append(row)
        io_utils.write_csv(path, ("t",) + OBSERVABLE_COLUMNS, rows)

    def to_json(self, path):
        payload = {"times": list(self.times)}
        for c in OBSERVABLE_COLUMNS:
            if c in self.observables:
                payload[c] = list(self.observables[c])
        io_utils.write_json(path, payload)


def characteristic_times(params: SystemParams) -> CharacteristicTimes:
    """Collapse, revival, and cat times: sqrt(2)/g0, 2 pi |alpha|/g0, t_R/2."""
    t_collapse = math.sqrt(2.0) / params.g0
    if abs(params.alpha0) == 0:
        raise ValueError("revival time undefined for alpha0 = 0")
    t_r = 2.0 * math.pi * abs(params.alpha0) / params.g0
    return CharacteristicTimes(t_collapse=t_collapse, t_R=t_r, t_C=t_r / 2.0)


def _initial_joint(params: SystemParams, n_max: int) -> JointState:
    space = HilbertSpace(n_max, has_qubit=False)
    phonon = coherent_state(params.alpha0, space)
    return tensor(qubit_state(params.c_g, params.c_e), phonon)


def jc_evolve_exact(params: SystemParams, t: float, n_max: int | None = None) -> JointState:
    """Closed-system JC state at time t, from the exact Fock-basis solution."""
    if n_max is None:
        n_max = default_cutoff(params.alpha0)
    space = HilbertSpace(n_max, has_qubit=True)
    check_truncation(params.alpha0, space)
    c, _ = coherent_amplitudes(params.alpha0, n_max)
    n = np.arange(n_max + 1)
    sq_n = np.sqrt(n)
    sq_np1 = np.sqrt(n + 1.0)
    c_prev = np.concatenate(([0.0], c[:-1]))
    c_next = np.concatenate((c[1:], [0.0]))
    psi_g = c * params.c_g * np.cos(params.g0 * sq_n * t) \
        - 1j * c_prev * params.c_e * np.sin(params.g0 * sq_n * t)
    psi_e = c * params.c_e * np.cos(params.g0 * sq_np1 * t) \
        - 1j * c_next * params.c_g * np.sin(params.g0 * sq_np1 * t)
    vec = np.concatenate((psi_g, psi_e))
    norm = np.linalg.norm(vec)
    if abs(norm - 1.0) > 1e-6:
        raise IntegrationError(f"truncated JC state norm {norm}; increase n_max")
    return JointState(space, vec / norm, "pure")


def excited_population(params: SystemParams, times, n_max: int | None = None) -> np.ndarray:
    """P_e(t) from the exact JC series, evaluated on a time grid."""
    if n_max is None:
        n_max = default_cutoff(params.alpha0)
    check_truncation(params.alpha0, HilbertSpace(n_max, has_qubit=True))
    times = np.asarray(times, dtype=float)
    c, _ = coherent_amplitudes(params.alpha0, n_max)
    n = np.arange(n_max)
    omega = params.g0 * np.sqrt(n + 1.0)            # (n,)
    phase = np.outer(times, omega)                  # (t, n)
    cos2 = np.cos(phase) ** 2
    sin2 = np.sin(phase) ** 2
    cross = np.cos(phase) * np.sin(phase)
    w_e = np.abs(c[:-1]) ** 2 * abs(params.c_e) ** 2
    w_g = np.abs(c[1:]) ** 2 * abs(params.c_g) ** 2
    w_x = 2.0 * np.imag(c[1:] * np.conj(c[:-1]) * params.c_g * np.conj(params.c_e))
    pe = cos2 @ w_e + sin2 @ w_g + cross @ w_x
    # n = n_max term contributes |c_nmax|^2 |c_e|^2 cos^2 via the diagonal
    pe += np.abs(c[-1]) ** 2 * abs(params.c_e) ** 2 * np.cos(params.g0 * math.sqrt(n_max + 1.0) * times) ** 2
    return np.clip(pe, 0.0, 1.0)


def excited_population_envelope(params: SystemParams, times) -> np.ndarray:
    """Closed-form Gaussian-damped approximation to P_e(t); no revivals.

    Valid for |alpha| >> 1 and t << alpha/g0.
    """
    if abs(params.alpha0) < 3:
        warnings.warn("envelope approximation is inaccurate for |alpha| < 3", stacklevel=2)
    times = np.asarray(times, dtype=float)
    a = abs(params.alpha0)
    # oscillation at the mean Rabi frequency 2 g0 sqrt(n_mean + 1); the
    # Poisson spread of Fock frequencies gives the Gaussian damping with
    # rate g0 a / sqrt(a^2 + 1) -> g0 for large a
    mean_freq = 2.0 * params.g0 * math.sqrt(a * a + 1.0)
    damp_rate = params.g0 * a / math.sqrt(a * a + 1.0)
    damp = np.exp(-((damp_rate * times) ** 2) / 2.0)
    osc = (abs(params.c_e) ** 2 - abs(params.c_g) ** 2) * np.cos(mean_freq * times) \
        + 2.0 * np.imag(params.c_g * np.conj(params.c_e)) * np.sin(mean_freq * times)
    return 0.5 * (1.0 + damp * osc)


def phi_states(params: SystemParams, t: float, n_max: int | None = None):
    """The counter-rotating phonon states Phi+/-(t) = sum c_n e^{-/+ i g0 t sqrt(n)} |n>."""
    alpha = complex(params.alpha0)
    if alpha.imag != 0 or alpha.real <= 0:
        raise ValueError("phi_states uses the alpha real-positive phase convention")
    if n_max is None:
        n_max = default_cutoff(alpha)
    space = HilbertSpace(n_max, has_qubit=False)
    check_truncation(alpha, space)
    c, _ = coherent_amplitudes(alpha, n_max)
    phases = params.g0 * t * np.sqrt(np.arange(n_max + 1))
    plus = c * np.exp(-1j * phases)
    minus = c * np.exp(1j * phases)
    return (
        JointState(space, plus / np.linalg.norm(plus), "pure"),
        JointState(space, minus / np.linalg.norm(minus), "pure"),
    )


def _qubit_observables(joint: JointState) -> dict:
    rho_q = partial_trace(joint, "qubit")
    out = {"purity": purity(rho_q)}
    for name, sig in _SIGMA.items():
        out[name] = float(np.trace(rho_q.data @ sig).real)
    out["P_e"] = float(rho_q.data[1, 1].real)
    return out


def _observable_row(state: JointState) -> dict:
    ops = OperatorSet(state.space)
    if state.kind == "pure":
        n_mean = float(np.vdot(state.data, ops.number_op @ state.data).real)
    else:
        n_mean = float(np.trace(ops.number_op @ state.data).real)
    row = {"n_mean": n_mean}
    if state.space.has_qubit:
        row.update(_qubit_observables(state))
    else:
        row["purity"] = purity(state)
    return row


def _collect(times, states) -> Trajectory:
    rows = [_observable_row(s) for s in states]
    names = rows[0].keys()
    obs = {k: np.array([r[k] for r in rows]) for k in names}
    return Trajectory(times=np.asarray(times, float), states=list(states), observables=obs)


def jc_trajectory(params: SystemParams, times, n_max: int | None = None) -> Trajectory:
    """Closed-system trajectory with states and standard observables."""
    states = [jc_evolve_exact(params, t, n_max=n_max) for t in times]
    return _collect(times, states)


def pe_trajectory(params: SystemParams, times, n_max: int | None = None) -> Trajectory:
    """Observable-only trajectory carrying just the exact P_e series."""
    pe = excited_population(params, times, n_max=n_max)
    return Trajectory(times=np.asarray(times, float), states=None, observables={"P_e": pe})


def lindblad_evolve(
    initial: JointState,
    params: SystemParams,
    hamiltonian_on: bool,
    times,
    rtol: float = 1e-8,
    atol: float = 1e-10,
    max_step: float = np.inf,
) -> Trajectory:
    """Integrate the Lindblad master equation on a time grid.

    Collapse channels: sqrt(kappa_phonon) a, and on joint spaces also
    sqrt(gamma_qubit) sigma- and sqrt(gamma_phi/2) sigma_z.  The initial
    state may be joint or phonon-only; the Hamiltonian requires a qubit.
    """
    times = np.asarray(times, dtype=float)
    space = initial.space
    ops = OperatorSet(space)
    dim = space.dim
    if hamiltonian_on and not space.has_qubit:
        raise ValueError("hamiltonian_on requires a qubit (x) phonon state")

    collapse = [(params.kappa_phonon, ops.a)]
    if space.has_qubit:
        collapse.append((params.gamma_qubit, ops.sigma_minus))
        collapse.append((params.gamma_phi / 2.0, ops.sigma_z))
    collapse = [(g, L) for g, L in collapse if g > 0]

    h = params.g0 * (ops.sigma_plus @ ops.a + ops.sigma_minus @ ops.a_dagger) \
        if hamiltonian_on else np.zeros((dim, dim), dtype=complex)
    # drift A = -iH - 1/2 sum g L^dag L; rhs = A rho + rho A^dag + sum g L rho L^dag
    drift = -1j * h
    for g, L in collapse:
        drift = drift - 0.5 * g * (L.conj().T @ L)
    jumps = [(g, L, L.conj().T) for g, L in collapse]

    def rhs(_t, y):
        rho = y.reshape(dim, dim)
        out = drift @ rho + rho @ drift.conj().T
        for g, L, Ld in jumps:
            out += g * (L @ rho @ Ld)
        return out.ravel()

    rho0 = initial.density_matrix().astype(complex)
    t0, t1 = float(times[0]), float(times[-1])
    sol = solve_ivp(
        rhs, (t0, t1), rho0.ravel(), t_eval=times, method="RK45",
        rtol=rtol, atol=atol, max_step=max_step,
    )
    if not sol.success:
        raise IntegrationError(f"master equation integration failed: {sol.message}")

    states = []
    for k in range(sol.y.shape[1]):
        rho = sol.y[:, k].reshape(dim, dim)
        rho = 0.5 * (rho + rho.conj().T)
        tr = float(np.trace(rho).real)
        if abs(tr - 1.0) > 1e-8:
            raise IntegrationError(
                f"trace drift {tr - 1.0:.3e} at t = {times[k]:.4g}; tighten tolerances"
            )
        rho = rho / tr
        evals, evecs = np.linalg.eigh(rho)
        if evals.min() < -1e-7:
            raise IntegrationError(
                f"negative eigenvalue {evals.min():.3e} at t = {times[k]:.4g}"
            )
        if evals.min() < 0:
            evals = np.clip(evals, 0.0, None)
            rho = (evecs * evals) @ evecs.conj().T
            rho = rho / np.trace(rho).real
        states.append(JointState(space, rho, "mixed"))
    return _collect(times, states)


def revival_contrast(traj: Trajectory, t_r: float | None = None) -> float:
    """Peak-to-trough P_e amplitude in the revival window [0.8 t_R, 1.2 t_R].

    With t_r=None the full trajectory is used (vacuum Rabi case, where no
    revival window exists).
    """
    pe = np.asarray(traj.observables["P_e"], dtype=float)
    if t_r is None:
        window = np.ones_like(traj.times, dtype=bool)
    else:
        if traj.times[0] > 0.8 * t_r or traj.times[-1] < 1.2 * t_r:
            raise ValueError("trajectory does not cover the revival window")
        window = (traj.times >= 0.8 * t_r) & (traj.times <= 1.2 * t_r)
    seg = pe[window]
    return float(seg.max() - seg.min())
