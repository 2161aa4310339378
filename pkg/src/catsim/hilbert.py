"""Truncated qubit (x) phonon Fock space: states, operators, metrics.

Basis ordering convention: the joint basis is |q, n> with index
q * (n_max + 1) + n, where q = 0 is the qubit ground state |g> and
q = 1 is the excited state |e>.  Phonon-only spaces drop the qubit
factor.  All matrices are dense complex; dimensions stay small enough
(<= ~300) that sparsity buys nothing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import DimensionMismatchError, StateValidationError, TruncationError

_NORM_TOL = 1e-9
_HERM_TOL = 1e-12
_EIG_TOL = 1e-9


@dataclass(frozen=True)
class HilbertSpace:
    """Truncated Fock space, optionally tensored with a qubit.

    n_max is the highest retained Fock index (states 0..n_max).
    """

    n_max: int
    has_qubit: bool = False

    def __post_init__(self):
        if self.n_max < 1:
            raise ValueError("n_max must be >= 1")

    @property
    def phonon_dim(self) -> int:
        return self.n_max + 1

    @property
    def dim(self) -> int:
        return 2 * self.phonon_dim if self.has_qubit else self.phonon_dim

    def phonon_only(self) -> "HilbertSpace":
        return HilbertSpace(self.n_max, has_qubit=False)


def default_cutoff(alpha: complex) -> int:
    """Recommended Fock cutoff for a coherent amplitude alpha."""
    a = abs(alpha)
    return max(10, math.ceil(4.0 * a * a), math.ceil(a * a + 8.0 * a + 10.0))


def check_truncation(alpha: complex, space: HilbertSpace):
    """Guard |alpha|^2 <= n_max / 4; raises TruncationError otherwise."""
    if abs(alpha) ** 2 > space.n_max / 4.0:
        raise TruncationError(
            f"|alpha|^2 = {abs(alpha) ** 2:.3f} exceeds n_max/4 = {space.n_max / 4:.3f}; "
            f"increase n_max (recommended >= {default_cutoff(alpha)})"
        )


@dataclass(frozen=True)
class JointState:
    """A pure state vector or density matrix over a HilbertSpace."""

    space: HilbertSpace
    data: np.ndarray
    kind: str  # "pure" or "mixed"

    def __post_init__(self):
        data = np.asarray(self.data, dtype=complex)
        object.__setattr__(self, "data", data)
        if self.kind == "pure":
            if data.ndim != 1 or data.shape[0] != self.space.dim:
                raise DimensionMismatchError(
                    f"pure state has shape {data.shape}, space dim {self.space.dim}"
                )
            norm = float(np.linalg.norm(data))
            if abs(norm - 1.0) > _NORM_TOL:
                raise StateValidationError(f"pure state norm {norm} deviates from 1")
        elif self.kind == "mixed":
            if data.ndim != 2 or data.shape != (self.space.dim, self.space.dim):
                raise DimensionMismatchError(
                    f"density matrix has shape {data.shape}, space dim {self.space.dim}"
                )
            tr = float(np.trace(data).real)
            if abs(tr - 1.0) > _NORM_TOL:
                raise StateValidationError(f"density matrix trace {tr} deviates from 1")
            if np.max(np.abs(data - data.conj().T)) > max(_HERM_TOL, 1e-10 * np.max(np.abs(data))):
                raise StateValidationError("density matrix is not Hermitian")
            evals = np.linalg.eigvalsh(data)
            if evals.min() < -_EIG_TOL:
                raise StateValidationError(f"density matrix has eigenvalue {evals.min()}")
        else:
            raise ValueError(f"kind must be 'pure' or 'mixed', got {self.kind!r}")
        data.setflags(write=False)

    def density_matrix(self) -> np.ndarray:
        if self.kind == "pure":
            return np.outer(self.data, self.data.conj())
        return self.data


def _destroy(phonon_dim: int) -> np.ndarray:
    a = np.zeros((phonon_dim, phonon_dim), dtype=complex)
    for n in range(1, phonon_dim):
        a[n - 1, n] = math.sqrt(n)
    return a


@lru_cache(maxsize=32)
def _displacement_basis(phonon_dim: int):
    """Eigendecomposition of the Hermitian generator -i(a^dag - a)."""
    a = _destroy(phonon_dim)
    h0 = -1j * (a.conj().T - a)
    evals, evecs = np.linalg.eigh(h0)
    return evals, evecs


def displacement_operator(beta: complex, phonon_dim: int) -> np.ndarray:
    """D(beta) = exp(beta a^dag - beta* a) on the truncated phonon space.

    Built from the cached eigendecomposition of -i(a^dag - a) and a phase
    rotation, which is exactly expm of the truncated generator (hence
    unitary) but much faster per point than a fresh expm.
    """
    r = abs(beta)
    evals, evecs = _displacement_basis(phonon_dim)
    core = (evecs * np.exp(1j * r * evals)) @ evecs.conj().T
    if r == 0.0:
        return np.eye(phonon_dim, dtype=complex)
    phi = np.angle(beta)
    phases = np.exp(1j * phi * np.arange(phonon_dim))
    return (phases[:, None] * core) * phases.conj()[None, :]


class OperatorSet:
    """Ladder, qubit, and derived operators on a given space.

    On a joint space the phonon operators are identity-padded on the
    qubit factor and vice versa; on a phonon-only space the qubit
    operators are unavailable.
    """

    def __init__(self, space: HilbertSpace):
        self.space = space
        pd = space.phonon_dim
        a_ph = _destroy(pd)
        n_ph = np.diag(np.arange(pd, dtype=float)).astype(complex)
        parity_ph = np.diag((-1.0) ** np.arange(pd)).astype(complex)
        if space.has_qubit:
            i2 = np.eye(2, dtype=complex)
            self.a = np.kron(i2, a_ph)
            self.number_op = np.kron(i2, n_ph)
            self.parity_op = np.kron(i2, parity_ph)
            ip = np.eye(pd, dtype=complex)
            sp = np.zeros((2, 2), dtype=complex)
            sp[1, 0] = 1.0  # |e><g|
            self.sigma_plus = np.kron(sp, ip)
            self.sigma_minus = np.kron(sp.T, ip)
            self.sigma_x = np.kron(np.array([[0, 1], [1, 0]], dtype=complex), ip)
            self.sigma_y = np.kron(np.array([[0, -1j], [1j, 0]], dtype=complex), ip)
            self.sigma_z = np.kron(np.array([[-1, 0], [0, 1]], dtype=complex), ip)
        else:
            self.a = a_ph
            self.number_op = n_ph
            self.parity_op = parity_ph
            self.sigma_plus = None
            self.sigma_minus = None
            self.sigma_x = None
            self.sigma_y = None
            self.sigma_z = None
        self.a_dagger = self.a.conj().T

    def displacement(self, beta: complex) -> np.ndarray:
        d = displacement_operator(beta, self.space.phonon_dim)
        if self.space.has_qubit:
            return np.kron(np.eye(2, dtype=complex), d)
        return d


def fock_state(n: int, space: HilbertSpace) -> JointState:
    if space.has_qubit:
        raise DimensionMismatchError("fock_state builds phonon-only states")
    if not 0 <= n <= space.n_max:
        raise TruncationError(f"Fock index {n} outside 0..{space.n_max}")
    vec = np.zeros(space.dim, dtype=complex)
    vec[n] = 1.0
    return JointState(space, vec, "pure")


def coherent_amplitudes(alpha: complex, n_max: int):
    """Truncated coherent-state amplitudes and the norm deficit of the tail.

    Returns (amps, deficit) with amps renormalized on 0..n_max and
    deficit = 1 - sum |c_n|^2 before renormalization.
    """
    n = np.arange(n_max + 1)
    log_fact = np.cumsum(np.concatenate(([0.0], np.log(np.arange(1, n_max + 1)))))
    log_mag = -abs(alpha) ** 2 / 2.0 + n * np.log(abs(alpha) if alpha != 0 else 1.0) - 0.5 * log_fact
    if alpha == 0:
        amps = np.zeros(n_max + 1, dtype=complex)
        amps[0] = 1.0
        return amps, 0.0
    amps = np.exp(log_mag) * np.exp(1j * n * np.angle(alpha))
    norm_sq = float(np.sum(np.abs(amps) ** 2))
    deficit = 1.0 - norm_sq
    return amps / math.sqrt(norm_sq), deficit


def coherent_state(alpha: complex, space: HilbertSpace) -> JointState:
    """Truncated, renormalized coherent state |alpha> on a phonon-only space."""
    if space.has_qubit:
        raise DimensionMismatchError("coherent_state builds phonon-only states")
    check_truncation(alpha, space)
    amps, _ = coherent_amplitudes(alpha, space.n_max)
    return JointState(space, amps, "pure")


def qubit_state(c_g: complex, c_e: complex) -> np.ndarray:
    """Normalized qubit amplitude vector (|g>, |e>) ordering."""
    vec = np.array([c_g, c_e], dtype=complex)
    norm = np.linalg.norm(vec)
    if abs(norm - 1.0) > 1e-6:
        raise StateValidationError(f"qubit amplitudes have norm {norm}")
    return vec / norm


def tensor(qubit_amps: np.ndarray, phonon_state: JointState) -> JointState:
    """Product state (qubit amplitudes) (x) (phonon pure state)."""
    if phonon_state.space.has_qubit or phonon_state.kind != "pure":
        raise DimensionMismatchError("tensor expects a pure phonon-only state")
    space = HilbertSpace(phonon_state.space.n_max, has_qubit=True)
    vec = np.kron(np.asarray(qubit_amps, dtype=complex), phonon_state.data)
    return JointState(space, vec, "pure")


def partial_trace(state: JointState, keep: str) -> JointState:
    """Trace out one factor of a joint state; keep is 'qubit' or 'phonon'."""
    if not state.space.has_qubit:
        raise DimensionMismatchError("partial_trace needs a qubit (x) phonon state")
    if keep not in ("qubit", "phonon"):
        raise ValueError("keep must be 'qubit' or 'phonon'")
    pd = state.space.phonon_dim
    rho = state.density_matrix().reshape(2, pd, 2, pd)
    if keep == "qubit":
        red = np.einsum("injn->ij", rho)
        space = HilbertSpace(1, has_qubit=False)  # 2-level carrier
        # Represent the qubit as a bare 2x2 matrix on a phonon-only space of
        # dim 2 (n_max = 1); the qubit/phonon distinction is bookkeeping only.
    else:
        red = np.einsum("injm->nm", rho)
        space = HilbertSpace(state.space.n_max, has_qubit=False)
    red = 0.5 * (red + red.conj().T)
    red = red / np.trace(red).real
    return JointState(space, red, "mixed")


def purity(state: JointState) -> float:
    """Tr(rho^2); 1 for pure states."""
    if state.kind == "pure":
        return 1.0
    rho = state.data
    return float(np.sum(np.abs(rho) ** 2))


def _psd_sqrt(mat: np.ndarray) -> np.ndarray:
    evals, evecs = np.linalg.eigh(mat)
    if evals.min() < -1e-8:
        raise StateValidationError(f"matrix not PSD (min eigenvalue {evals.min()})")
    evals = np.clip(evals, 0.0, None)
    return (evecs * np.sqrt(evals)) @ evecs.conj().T


def fidelity(rho: JointState, sigma: JointState) -> float:
    """Uhlmann fidelity Tr sqrt(sqrt(rho) sigma sqrt(rho)), in [0, 1]."""
    if rho.space.dim != sigma.space.dim:
        raise DimensionMismatchError(
            f"fidelity between dims {rho.space.dim} and {sigma.space.dim}"
        )
    if rho.kind == "pure" and sigma.kind == "pure":
        return float(min(1.0, abs(np.vdot(rho.data, sigma.data))))
    if rho.kind == "pure":
        val = np.vdot(rho.data, sigma.density_matrix() @ rho.data).real
        return float(min(1.0, math.sqrt(max(val, 0.0))))
    if sigma.kind == "pure":
        return fidelity(sigma, rho)
    sr = _psd_sqrt(rho.data)
    inner = _psd_sqrt(sr @ sigma.data @ sr)
    return float(min(1.0, np.trace(inner).real))


def expectation(op: np.ndarray, state: JointState) -> complex:
    if op.shape[0] != state.space.dim:
        raise DimensionMismatchError("operator/state dimension mismatch")
    if state.kind == "pure":
        return complex(np.vdot(state.data, op @ state.data))
    return complex(np.trace(op @ state.data))
