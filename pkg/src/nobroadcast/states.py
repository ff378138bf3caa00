"""Density operators and quantum channels in unitary-dilation form.

A channel takes ``rho`` on A to ``tr_C(U (rho ⊗ sigma ⊗ upsilon) U^dagger)``
on A⊗B, where ``sigma`` and ``upsilon`` are fixed standard states on the
blank copy B and the ancilla C.
"""
from dataclasses import dataclass, field
from typing import List, NamedTuple

import numpy as np

from .errors import InvalidRank, NotHermitian, NotPositive, NotTracePreserving, ShapeMismatch, TraceNotOne
from .linalg import DEFAULT_TOL, as_matrix, dagger, hermitian_eig, partial_trace, tensor


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """A validated state. Build one with :func:`validate_density`.

    Behaves like its matrix under ``np.asarray``.
    """

    matrix: np.ndarray

    @property
    def dim(self):
        return self.matrix.shape[0]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.matrix
        return self.matrix.astype(dtype)


class SpectralDecomposition(NamedTuple):
    eigenvalues: np.ndarray
    basis: np.ndarray


def validate_density(m, tol=DEFAULT_TOL):
    """Check the state axioms and wrap ``m`` as a :class:`DensityOperator`.

    The input is copied, never modified.
    """
    m = np.array(as_matrix(m), dtype=complex)
    skew = np.linalg.norm(m - dagger(m))
    if skew > tol * max(1.0, np.linalg.norm(m)):
        raise NotHermitian(f"state is not Hermitian (||rho - rho^dagger||_F = {skew:.3e})")
    m = 0.5 * (m + dagger(m))
    w = np.linalg.eigvalsh(m)
    if w[0] < -tol:
        raise NotPositive(f"state is not positive (smallest eigenvalue {w[0]:.6g})")
    tr = np.trace(m).real
    if abs(tr - 1.0) > tol:
        raise TraceNotOne(f"state trace is {tr:.12g}, not 1")
    m.setflags(write=False)
    return DensityOperator(m)


def as_density(rho, tol=DEFAULT_TOL):
    if isinstance(rho, DensityOperator):
        return rho
    return validate_density(rho, tol)


def pure_state(psi):
    psi = np.asarray(psi, dtype=complex).ravel()
    psi = psi / np.linalg.norm(psi)
    return validate_density(np.outer(psi, psi.conj()))


def basis_state(dim, index=0):
    """``|index><index|`` in the computational basis."""
    e = np.zeros(dim, dtype=complex)
    e[index] = 1.0
    return pure_state(e)


def maximally_mixed(dim):
    return validate_density(np.eye(dim) / dim)


def bloch_qubit(r):
    """Qubit state ``(I + r . sigma) / 2`` for a Bloch vector ``r = (x, y, z)``."""
    x, y, z = r
    return validate_density(0.5 * np.array([[1 + z, x - 1j * y], [x + 1j * y, 1 - z]]))


def _rng(seed):
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def ginibre(rows, cols, seed=None):
    rng = _rng(seed)
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)


def random_density(dim, rank=None, seed=None):
    """Random state ``G G^dagger / tr(G G^dagger)`` with ``G`` a ``dim x rank`` Ginibre matrix.

    ``seed`` may be an int or a ``numpy.random.Generator``.
    """
    rank = dim if rank is None else rank
    if not 1 <= rank <= dim:
        raise InvalidRank(f"rank must satisfy 1 <= rank <= dim, got rank={rank}, dim={dim}")
    g = ginibre(dim, rank, seed)
    m = g @ dagger(g)
    return validate_density(m / np.trace(m).real)


def random_unitary(dim, seed=None):
    """Haar-random unitary from the QR of a Ginibre matrix.

    The columns are rephased so ``R`` has a positive real diagonal, which
    makes the factorization (and hence the output) unique for a given draw.
    """
    q, r = np.linalg.qr(ginibre(dim, dim, seed))
    d = np.diag(r)
    return q * (d / np.abs(d))[None, :]


def spectral(rho):
    """Eigenvalues (ascending) and eigenbasis of a state."""
    w, v = hermitian_eig(rho)
    return SpectralDecomposition(w, v)


@dataclass(frozen=True, eq=False)
class DilationChannel:
    """``rho -> tr_C(U (rho ⊗ sigma ⊗ upsilon) U^dagger)`` from A to A⊗B."""

    dim_a: int
    dim_b: int
    dim_c: int
    unitary: np.ndarray
    sigma: DensityOperator
    upsilon: DensityOperator

    def __post_init__(self):
        d = self.dim_a * self.dim_b * self.dim_c
        if min(self.dim_a, self.dim_b, self.dim_c) < 1:
            raise ShapeMismatch("channel dimensions must be positive")
        if np.shape(self.unitary) != (d, d):
            raise ShapeMismatch(f"U has shape {np.shape(self.unitary)}, expected {(d, d)}")
        if self.sigma.dim != self.dim_b or self.upsilon.dim != self.dim_c:
            raise ShapeMismatch("sigma/upsilon dimensions do not match dim_b/dim_c")
        u = np.asarray(self.unitary)
        defect = np.linalg.norm(dagger(u) @ u - np.eye(d))
        if defect > 1e-10:
            raise ShapeMismatch(f"U is not unitary (||U^dagger U - I||_F = {defect:.3e})")

    @property
    def dims(self):
        return (self.dim_a, self.dim_b, self.dim_c)


def dilation_channel(unitary, dim_a, dim_b=None, dim_c=1, sigma=None, upsilon=None):
    """Build a :class:`DilationChannel`; ``sigma`` and ``upsilon`` default to ``|1><1|``."""
    dim_b = dim_a if dim_b is None else dim_b
    sigma = basis_state(dim_b) if sigma is None else as_density(sigma)
    upsilon = basis_state(dim_c) if upsilon is None else as_density(upsilon)
    return DilationChannel(dim_a, dim_b, dim_c, np.array(unitary, dtype=complex), sigma, upsilon)


def apply_channel(ch: DilationChannel, rho):
    """Joint output state on A⊗B."""
    rho = as_matrix(rho)
    if rho.shape[0] != ch.dim_a:
        raise ShapeMismatch(f"state has dim {rho.shape[0]}, channel expects {ch.dim_a}")
    u = ch.unitary
    full = tensor(rho, ch.sigma, ch.upsilon)
    out = partial_trace(u @ full @ dagger(u), ch.dims, keep=(0, 1))
    return validate_density(0.5 * (out + dagger(out)), tol=1e-9)


def marginals(joint, dims=None):
    """``(tr_A joint, tr_B joint)``: the state of B, then the state of A.

    ``dims`` defaults to two equal factors.
    """
    joint = as_matrix(joint)
    if dims is None:
        n = int(round(np.sqrt(joint.shape[0])))
        if n * n != joint.shape[0]:
            raise ShapeMismatch(f"dimension {joint.shape[0]} is not a perfect square; pass dims")
        dims = (n, n)
    on_b = partial_trace(joint, dims, keep=1)
    on_a = partial_trace(joint, dims, keep=0)
    return validate_density(on_b, tol=1e-9), validate_density(on_a, tol=1e-9)


@dataclass(frozen=True)
class KrausSet:
    operators: List[np.ndarray] = field(default_factory=list)

    def completeness(self):
        return sum(dagger(k) @ k for k in self.operators)

    def apply(self, rho):
        rho = as_matrix(rho)
        return sum(k @ rho @ dagger(k) for k in self.operators)


def kraus_from_dilation(ch: DilationChannel, rank_tol=1e-12):
    """Operator-sum form of a dilation channel, as maps from A to A⊗B.

    With ``sigma = sum_j s_j |s_j><s_j|`` and ``upsilon = sum_k u_k |u_k><u_k|``
    the operators are ``(I_AB ⊗ <c|) U (I_A ⊗ sqrt(s_j)|s_j> ⊗ sqrt(u_k)|u_k>)``.
    Spectral components at or below ``rank_tol`` are dropped.
    """
    s_vals, s_vecs = hermitian_eig(ch.sigma)
    u_vals, u_vecs = hermitian_eig(ch.upsilon)
    eye_a = np.eye(ch.dim_a)
    eye_ab = np.eye(ch.dim_a * ch.dim_b)
    ops = []
    for sj, vj in zip(s_vals, s_vecs.T):
        if sj <= rank_tol:
            continue
        for uk, wk in zip(u_vals, u_vecs.T):
            if uk <= rank_tol:
                continue
            embed = np.sqrt(sj * uk) * tensor(eye_a, vj[:, None], wk[:, None])
            v = ch.unitary @ embed
            for c in range(ch.dim_c):
                bra = np.zeros((1, ch.dim_c))
                bra[0, c] = 1.0
                ops.append(tensor(eye_ab, bra) @ v)
    kraus = KrausSet(ops)
    defect = np.linalg.norm(kraus.completeness() - eye_a)
    if defect > 1e-9:
        raise NotTracePreserving(f"Kraus completeness defect {defect:.3e}")
    return kraus
