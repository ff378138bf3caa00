"""Broadcasting channels, clonability, and the fidelity inequality chain.

A pair ``{rho0, rho1}`` is broadcast by a channel when both marginals of
each joint output equal the input. Commuting pairs are broadcast by
copying their shared eigenbasis; :func:`verify_chain` computes the
fidelity relations any broadcasting candidate must satisfy and, when they
hold with equality, the structural consequences (``G = H = M`` and the
vanishing of ``rho~^{1/2}|b>|c>`` across distinct eigenvalues of ``M``).
"""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .distinguish import fidelity, optimal_povm, povm_overlap
from .errors import InvalidConfig, NotCommuting, ShapeMismatch
from .linalg import (
    as_matrix,
    commutator_norm,
    dagger,
    hermitian_eig,
    partial_trace,
    polar_unitary,
    positive_sqrt,
    support_projectors,
    tensor,
)
from .states import DilationChannel, apply_channel, as_density, dilation_channel

OBJECTIVES = ("min_marginal_fidelity", "mean_marginal_fidelity")


def simultaneous_eigenbasis(rho0, rho1, tol=1e-8, degeneracy_tol=1e-8):
    """Unitary whose columns diagonalize both (commuting) states.

    ``rho0`` is diagonalized first (ascending); within each of its
    eigenspaces, eigenvalues closer than ``degeneracy_tol`` being grouped
    together, ``rho1`` is diagonalized, so ties fall to ``rho1``'s own
    ascending order.
    """
    a, b = as_matrix(rho0), as_matrix(rho1)
    if a.shape != b.shape:
        raise ShapeMismatch(f"states have shapes {a.shape} and {b.shape}")
    cn = commutator_norm(a, b)
    if cn > tol:
        raise NotCommuting(f"states do not commute: ||[rho0, rho1]||_F = {cn:.6g}", cn)
    w, v = hermitian_eig(a)
    cols = []
    start = 0
    for k in range(1, len(w) + 1):
        if k == len(w) or w[k] - w[k - 1] > degeneracy_tol:
            block = v[:, start:k]
            _, rot = hermitian_eig(dagger(block) @ b @ block, tol=1e-8)
            cols.append(block @ rot)
            start = k
    return np.hstack(cols)


def controlled_shift(n):
    """Permutation ``|j>|k> -> |j>|(k + j) mod n>``, which sends ``|j>|0>`` to ``|j>|j>``."""
    u = np.zeros((n * n, n * n))
    for j in range(n):
        for k in range(n):
            u[j * n + (k + j) % n, j * n + k] = 1.0
    return u


def basis_cloner(basis):
    """Unitary on A⊗B taking ``|b>|1>`` to ``|b>|b>`` for the columns ``|b>`` of ``basis``.

    Here ``|1>`` is the first computational basis vector of B. The
    completion off that subspace is the controlled shift in ``basis``.
    """
    v = np.asarray(basis, dtype=complex)
    n = v.shape[0]
    return tensor(v, v) @ controlled_shift(n) @ tensor(dagger(v), np.eye(n))


def commuting_broadcaster(rho0, rho1, tol=1e-8):
    """Channel (no ancilla) broadcasting a commuting pair by cloning the shared eigenbasis.

    Raises
    ------
    NotCommuting
        If ``||[rho0, rho1]||_F > tol``; carries the commutator norm.
    """
    basis = simultaneous_eigenbasis(rho0, rho1, tol)
    n = basis.shape[0]
    return dilation_channel(basis_cloner(basis), n, n, 1)


def clonable(rho0, rho1, tol=1e-8):
    """True iff the pair is identical or orthogonal, judged by its fidelity."""
    f = fidelity(rho0, rho1)
    return bool(f >= 1 - tol or f <= tol)


@dataclass(frozen=True, eq=False)
class BroadcastCandidate:
    rho0: np.ndarray
    rho1: np.ndarray
    tilde0: np.ndarray
    tilde1: np.ndarray

    def __post_init__(self):
        n = np.shape(self.rho0)[0]
        for name in ("rho0", "rho1", "tilde0", "tilde1"):
            as_density(getattr(self, name), tol=1e-9)
        if np.shape(self.rho1)[0] != n:
            raise ShapeMismatch("input states differ in dimension")
        if np.shape(self.tilde0)[0] != n * n or np.shape(self.tilde1)[0] != n * n:
            raise ShapeMismatch(f"joint states must have dimension {n * n}")

    @property
    def dim(self):
        return np.shape(self.rho0)[0]


def candidate_from_channel(ch: DilationChannel, rho0, rho1):
    if ch.dim_b != ch.dim_a:
        raise ShapeMismatch("broadcasting needs dim_b == dim_a")
    return BroadcastCandidate(np.asarray(rho0), np.asarray(rho1),
                              np.asarray(apply_channel(ch, rho0)), np.asarray(apply_channel(ch, rho1)))


@dataclass
class StructuralDiagnostics:
    """Consequences of equality in the fidelity chain.

    ``g_error`` and ``h_error`` are ``||G - M||_F`` and ``||H - M||_F`` on the
    support of ``rho1``; ``g_residual``/``h_residual`` are the relative
    least-squares residuals of the two linear systems that define ``G`` and
    ``H``; ``nullity_residual`` is the largest ``||rho~_s^{1/2}|b>|c>||`` over
    eigenvector pairs of ``M`` with distinct eigenvalues.
    """

    g: np.ndarray
    h: np.ndarray
    m: np.ndarray
    g_error: float
    h_error: float
    g_residual: float
    h_residual: float
    nullity_residual: float
    m_rho0_commutator: float
    reduced_rank: bool
    passed: bool

    def to_dict(self):
        return {
            "g_error": self.g_error,
            "h_error": self.h_error,
            "g_residual": self.g_residual,
            "h_residual": self.h_residual,
            "nullity_residual": self.nullity_residual,
            "m_rho0_commutator": self.m_rho0_commutator,
            "reduced_rank": self.reduced_rank,
            "passed": self.passed,
        }


@dataclass
class ChainReport:
    f_in: float
    f_joint: float
    f_a: float
    f_b: float
    marginal_errors: tuple
    equality_gap: float
    commutator_norm: float
    tol: float
    structural: Optional[StructuralDiagnostics] = None
    structural_skipped: Optional[str] = None
    notes: list = field(default_factory=list)

    @property
    def partial_trace_ok(self):
        return self.f_a >= self.f_joint - 1e-8 and self.f_b >= self.f_joint - 1e-8

    @property
    def channel_consistent(self):
        """False when the joint fidelity is below the input fidelity, which no channel allows."""
        return self.f_joint >= self.f_in - 1e-8

    @property
    def broadcasts(self):
        return max(self.marginal_errors) <= 1e-8

    def to_dict(self):
        return {
            "f_in": self.f_in,
            "f_joint": self.f_joint,
            "f_a": self.f_a,
            "f_b": self.f_b,
            "marginal_errors": list(self.marginal_errors),
            "equality_gap": self.equality_gap,
            "commutator_norm": self.commutator_norm,
            "partial_trace_ok": self.partial_trace_ok,
            "channel_consistent": self.channel_consistent,
            "broadcasts": self.broadcasts,
            "tol": self.tol,
            "structural": None if self.structural is None else self.structural.to_dict(),
            "structural_skipped": self.structural_skipped,
            "notes": list(self.notes),
        }


def _fit_operator(target, root, n, side):
    """Least-squares ``X`` minimizing ``||target - root (I ⊗ X)||`` (side "b") or ``(X ⊗ I)`` (side "a")."""
    eye = np.eye(n)
    cols = []
    for j in range(n):
        for k in range(n):
            e = np.zeros((n, n))
            e[j, k] = 1.0
            op = tensor(eye, e) if side == "b" else tensor(e, eye)
            cols.append((root @ op).ravel())
    design = np.stack(cols, axis=1)
    x, *_ = np.linalg.lstsq(design, target.ravel(), rcond=None)
    fitted = x.reshape(n, n)
    scale = max(np.linalg.norm(target), 1e-300)
    return fitted, float(np.linalg.norm(target.ravel() - design @ x) / scale)


def _structural(cand, witness, tol, degeneracy_tol, rank_tol):
    n = cand.dim
    r0, r1 = positive_sqrt(cand.tilde0), positive_sqrt(cand.tilde1)
    u_t = polar_unitary(r0 @ r1)
    # both unitaries come from the same polar decomposition, so they coincide here
    v_t = u_t
    g, g_res = _fit_operator(u_t @ r0, r1, n, side="b")
    h, h_res = _fit_operator(v_t @ r0, r1, n, side="a")
    m = witness.m_operator
    support, _ = support_projectors(cand.rho1, rank_tol)
    reduced = support.shape[1] < n or support_projectors(cand.rho0, rank_tol)[0].shape[1] < n
    proj = support @ dagger(support)
    g_err = float(np.linalg.norm(proj @ (g - m) @ proj))
    h_err = float(np.linalg.norm(proj @ (h - m) @ proj))
    nullity = 0.0
    basis, mu = witness.basis, witness.mu
    spread = degeneracy_tol * max(1.0, float(np.max(np.abs(mu), initial=0.0)))
    for i in range(basis.shape[1]):
        for j in range(basis.shape[1]):
            if abs(mu[i] - mu[j]) <= spread:
                continue
            bc = np.kron(basis[:, i], basis[:, j])
            nullity = max(nullity, float(np.linalg.norm(r0 @ bc)), float(np.linalg.norm(r1 @ bc)))
    m_comm = commutator_norm(m, cand.rho0)
    passed = max(g_err, h_err, g_res, h_res, nullity) <= tol
    return StructuralDiagnostics(g, h, m, g_err, h_err, g_res, h_res, nullity, m_comm, reduced, passed)


def verify_chain(cand: BroadcastCandidate, tol=1e-8, structural_tol=1e-7, degeneracy_tol=1e-6,
                 rank_tol=1e-10):
    """Evaluate the fidelity relations for a broadcasting candidate.

    ``f_a``/``f_b`` are the overlaps of the marginals on A/B under the
    optimal POVM for the inputs; ``f_joint`` is the fidelity of the joint
    states. Structural diagnostics run only when the equality gap
    ``max(|f_a - f_joint|, |f_b - f_joint|, |f_joint - f_in|)`` is at most
    ``tol``; otherwise ``structural_skipped`` says why.

    The diagnostics are necessary conditions for broadcasting; passing
    them does not show that a candidate is realizable by a channel.
    """
    n = cand.dim
    dims = (n, n)
    witness = optimal_povm(cand.rho0, cand.rho1, rank_tol)
    povm = witness.optimal_povm
    on_a = [partial_trace(t, dims, keep=0) for t in (cand.tilde0, cand.tilde1)]
    on_b = [partial_trace(t, dims, keep=1) for t in (cand.tilde0, cand.tilde1)]
    f_a = povm_overlap(on_a[0], on_a[1], povm)
    f_b = povm_overlap(on_b[0], on_b[1], povm)
    f_joint = fidelity(cand.tilde0, cand.tilde1)
    f_in = witness.value
    errors = (
        float(np.linalg.norm(on_b[0] - cand.rho0)),
        float(np.linalg.norm(on_a[0] - cand.rho0)),
        float(np.linalg.norm(on_b[1] - cand.rho1)),
        float(np.linalg.norm(on_a[1] - cand.rho1)),
    )
    gap = max(abs(f_a - f_joint), abs(f_b - f_joint), abs(f_joint - f_in))
    report = ChainReport(f_in, f_joint, f_a, f_b, errors, gap, commutator_norm(cand.rho0, cand.rho1), tol)
    if f_joint < f_in - 1e-8:
        report.notes.append(
            f"joint fidelity {f_joint:.10g} is below input fidelity {f_in:.10g}: "
            "no channel can produce this candidate")
    if gap <= tol:
        report.structural = _structural(cand, witness, structural_tol, degeneracy_tol, rank_tol)
        if report.structural.reduced_rank:
            report.notes.append("inputs are rank deficient; G, H and M compared on the support of rho1")
    else:
        report.structural_skipped = f"equality gap {gap:.3e} exceeds tol {tol:.1e}"
    return report


def marginal_fidelities(unitary, dims, sigma, upsilon, rho0, rho1):
    """Fidelities ``[F(tr_B out0, rho0), F(tr_A out0, rho0), F(tr_B out1, rho1), F(tr_A out1, rho1)]``."""
    da, db, dc = dims
    env = tensor(sigma, upsilon)
    out = []
    for rho in (rho0, rho1):
        joint = unitary @ tensor(rho, env) @ dagger(unitary)
        for keep in (0, 1):
            marg = partial_trace(joint, dims, keep=keep)
            out.append(fidelity(0.5 * (marg + dagger(marg)), rho))
    return out


def _combine(fids, objective):
    if objective == "min_marginal_fidelity":
        return float(min(fids))
    if objective == "mean_marginal_fidelity":
        return float(np.mean(fids))
    raise InvalidConfig(f"unknown objective {objective!r}; expected one of {OBJECTIVES}")


def broadcast_quality(ch: DilationChannel, rho0, rho1, objective="min_marginal_fidelity"):
    """Worst (or mean) fidelity between a marginal of an output and its input.

    Equals 1 exactly when both marginals of both outputs reproduce the inputs.
    """
    a, b = as_matrix(rho0), as_matrix(rho1)
    if a.shape != (ch.dim_a, ch.dim_a) or b.shape != a.shape:
        raise ShapeMismatch(f"states must have dim {ch.dim_a}")
    if ch.dim_b != ch.dim_a:
        raise ShapeMismatch("broadcasting needs dim_b == dim_a")
    fids = marginal_fidelities(ch.unitary, ch.dims, np.asarray(ch.sigma), np.asarray(ch.upsilon), a, b)
    return _combine(fids, objective)


def product_candidate(rho0, rho1):
    """The cloning candidate ``rho_s ⊗ rho_s``."""
    a, b = np.asarray(rho0), np.asarray(rho1)
    return BroadcastCandidate(a, b, tensor(a, a), tensor(b, b))


def correlated_candidate(rho0, rho1, tol=1e-8):
    """``sum_b lambda_sb |bb><bb|`` in the shared eigenbasis of a commuting pair."""
    v = simultaneous_eigenbasis(rho0, rho1, tol)
    tildes = []
    for rho in (rho0, rho1):
        lam = np.real(np.diag(dagger(v) @ np.asarray(rho) @ v))
        t = sum(l * np.outer(np.kron(v[:, k], v[:, k]), np.kron(v[:, k], v[:, k]).conj())
                for k, l in enumerate(lam))
        tildes.append(t)
    return BroadcastCandidate(np.asarray(rho0), np.asarray(rho1), *tildes)


def entangled_candidate(rho0, rho1, tol=1e-8):
    """Pure joint states ``sum_b sqrt(lambda_sb) |b>|b>`` for a commuting pair."""
    v = simultaneous_eigenbasis(rho0, rho1, tol)
    tildes = []
    for rho in (rho0, rho1):
        lam = np.clip(np.real(np.diag(dagger(v) @ np.asarray(rho) @ v)), 0.0, None)
        psi = sum(np.sqrt(l) * np.kron(v[:, k], v[:, k]) for k, l in enumerate(lam))
        tildes.append(np.outer(psi, psi.conj()))
    return BroadcastCandidate(np.asarray(rho0), np.asarray(rho1), *tildes)

