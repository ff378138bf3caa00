"""Fidelity, its measurement characterization, and optimal POVMs.

``F(rho0, rho1) = tr sqrt(rho0^{1/2} rho1 rho0^{1/2})`` equals the minimum
over POVMs ``{E_b}`` of the classical overlap
``sum_b sqrt(tr(rho0 E_b)) sqrt(tr(rho1 E_b))``. The minimum is attained by
projectors onto the eigenbasis of

    M = rho1^{-1/2} sqrt(rho1^{1/2} rho0 rho1^{1/2}) rho1^{-1/2}

(restricted to the support of ``rho1``, plus the projector onto its null
space when ``rho1`` is singular).
"""
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .errors import InvalidPovm, ShapeMismatch
from .linalg import (
    DEFAULT_TOL,
    as_matrix,
    dagger,
    hermitian_eig,
    polar_unitary,
    positive_sqrt,
    pseudo_inverse_sqrt,
    rounding_floor,
    support_projectors,
)

@dataclass(frozen=True, eq=False)
class Povm:
    elements: List[np.ndarray]
    mu: Optional[np.ndarray] = None

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)


@dataclass(frozen=True, eq=False)
class FidelityWitness:
    """Fidelity together with the objects that certify it.

    ``basis`` holds the eigenvectors of ``m_operator`` on the support of
    ``rho1`` (as columns) and ``mu`` their eigenvalues.
    """

    value: float
    optimal_povm: Povm
    m_operator: np.ndarray
    unitary_u: np.ndarray
    support_rank: int
    basis: np.ndarray
    mu: np.ndarray


@dataclass
class OptimalityReport:
    optimal: bool
    mu: np.ndarray
    residuals: np.ndarray
    overlap: float
    fidelity: float
    tol: float
    notes: List[str] = field(default_factory=list)

    @property
    def overlap_gap(self):
        return self.overlap - self.fidelity

    def to_dict(self):
        return {
            "optimal": bool(self.optimal),
            "mu": [[float(z.real), float(z.imag)] for z in self.mu],
            "residuals": [float(r) for r in self.residuals],
            "overlap": float(self.overlap),
            "fidelity": float(self.fidelity),
            "overlap_gap": float(self.overlap_gap),
            "tol": float(self.tol),
            "notes": list(self.notes),
        }


def _pair(rho0, rho1):
    a, b = as_matrix(rho0), as_matrix(rho1)
    if a.shape != b.shape:
        raise ShapeMismatch(f"states have shapes {a.shape} and {b.shape}")
    return a, b


def fidelity(rho0, rho1):
    """Fidelity ``tr sqrt(rho0^{1/2} rho1 rho0^{1/2})``, in ``[0, 1]``.

    Eigenvalues of the inner operator below its rounding floor are
    treated as zero before rooting.
    """
    a, b = _pair(rho0, rho1)
    s = positive_sqrt(a)
    inner = s @ b @ s
    w = hermitian_eig(inner, tol=1e-8).eigenvalues
    w = np.where(w > rounding_floor(w), w, 0.0)
    return float(np.clip(np.sum(np.sqrt(w)), 0.0, 1.0))


def as_povm(povm, dim=None, tol=1e-9):
    """Validate a POVM (a :class:`Povm` or a sequence of matrices)."""
    if isinstance(povm, Povm):
        elements, mu = povm.elements, povm.mu
    else:
        elements, mu = list(povm), None
    if not elements:
        raise InvalidPovm("POVM has no elements")
    mats = [as_matrix(e) for e in elements]
    n = mats[0].shape[0] if dim is None else dim
    for k, e in enumerate(mats):
        if e.shape != (n, n):
            raise InvalidPovm(f"element {k} has shape {e.shape}, expected {(n, n)}")
        if np.linalg.norm(e - dagger(e)) > 1e-10 * max(1.0, np.linalg.norm(e)):
            raise InvalidPovm(f"element {k} is not Hermitian")
        lo = np.linalg.eigvalsh(0.5 * (e + dagger(e)))[0]
        if lo < -1e-10:
            raise InvalidPovm(f"element {k} is not positive (eigenvalue {lo:.3e})")
    defect = np.linalg.norm(sum(mats) - np.eye(n))
    if defect > tol:
        raise InvalidPovm(f"elements do not sum to identity (defect {defect:.3e})")
    return Povm(mats, None if mu is None else np.asarray(mu))


def _outcome_probs(rho, elements):
    p = np.array([np.trace(rho @ e).real for e in elements])
    # below the rounding error of the trace a probability is zero, whatever its sign
    floor = 8 * rho.shape[0] * np.finfo(float).eps
    return np.where((p >= -1e-12) & (p <= floor), 0.0, p)


def povm_overlap(rho0, rho1, povm):
    """Classical overlap ``sum_b sqrt(tr(rho0 E_b) tr(rho1 E_b))`` of the outcome statistics."""
    a, b = _pair(rho0, rho1)
    p = as_povm(povm, dim=a.shape[0])
    p0 = _outcome_probs(a, p.elements)
    p1 = _outcome_probs(b, p.elements)
    if np.any(p0 < 0) or np.any(p1 < 0):
        raise InvalidPovm("POVM produced a negative outcome probability")
    return float(np.sum(np.sqrt(p0) * np.sqrt(p1)))


def fidelity_unitary(rho0, rho1):
    """Unitary ``U`` with ``U rho0^{1/2} rho1^{1/2} = sqrt(rho1^{1/2} rho0 rho1^{1/2})``."""
    a, b = _pair(rho0, rho1)
    return polar_unitary(positive_sqrt(a) @ positive_sqrt(b))


def m_operator(rho0, rho1, rank_tol=DEFAULT_TOL):
    """``rho1^{-1/2} sqrt(rho1^{1/2} rho0 rho1^{1/2}) rho1^{-1/2}``, zero off the support of ``rho1``."""
    a, b = _pair(rho0, rho1)
    r = positive_sqrt(b)
    inner = positive_sqrt(r @ a @ r, tol=1e-8)
    pinv = pseudo_inverse_sqrt(b, rank_tol)
    m = pinv @ inner @ pinv
    return 0.5 * (m + dagger(m))


def optimal_povm(rho0, rho1, rank_tol=DEFAULT_TOL):
    """Construct a POVM attaining the fidelity.

    For invertible ``rho1`` the elements are rank-one projectors onto the
    eigenbasis of ``M`` with ``mu`` its eigenvalues (ascending). For
    singular ``rho1`` the first element projects onto the null space (its
    ``mu`` is ``nan``) and the rest come from ``M`` computed on the support.
    """
    a, b = _pair(rho0, rho1)
    support, null = support_projectors(b, rank_tol)
    a_s = dagger(support) @ a @ support
    b_s = dagger(support) @ b @ support
    r = positive_sqrt(b_s)
    r_inv = pseudo_inverse_sqrt(b_s, rank_tol)
    m_s = r_inv @ positive_sqrt(r @ a_s @ r, tol=1e-8) @ r_inv
    mu, vecs = hermitian_eig(0.5 * (m_s + dagger(m_s)), tol=1e-8)
    vecs = support @ vecs

    elements, labels = [], []
    if null.shape[1]:
        elements.append(null @ dagger(null))
        labels.append(np.nan)
    for k in range(vecs.shape[1]):
        elements.append(np.outer(vecs[:, k], vecs[:, k].conj()))
        labels.append(mu[k])
    povm = Povm(elements, np.array(labels))
    m_full = support @ m_s @ dagger(support)
    return FidelityWitness(
        value=fidelity(a, b),
        optimal_povm=povm,
        m_operator=0.5 * (m_full + dagger(m_full)),
        unitary_u=fidelity_unitary(a, b),
        support_rank=support.shape[1],
        basis=vecs,
        mu=mu,
    )


def check_povm_optimality(rho0, rho1, povm, tol=1e-8):
    """Test the equality conditions for an optimal POVM element by element.

    For each ``E_b`` the least-squares scalar ``mu_b`` minimizing
    ``||U rho0^{1/2} E_b^{1/2} - mu_b rho1^{1/2} E_b^{1/2}||_F`` is found
    (``U`` from :func:`fidelity_unitary`). The POVM is reported optimal when
    every residual is at most ``tol * scale`` and every ``mu_b`` is real with
    ``mu_b >= -tol``. Elements annihilated by ``rho1^{1/2}`` satisfy the
    condition trivially and get ``mu_b = 0``.

    These are conditions on the measurement alone; nothing is claimed
    about their sufficiency in any wider context.
    """
    a, b = _pair(rho0, rho1)
    p = as_povm(povm, dim=a.shape[0])
    u = fidelity_unitary(a, b)
    s0, s1 = positive_sqrt(a), positive_sqrt(b)
    scale = max(1.0, np.linalg.norm(s0), np.linalg.norm(s1))
    mus, residuals, notes = [], [], []
    for k, e in enumerate(p.elements):
        root = positive_sqrt(e)
        lhs = u @ s0 @ root
        rhs = s1 @ root
        denom = np.vdot(rhs, rhs).real
        if denom <= (tol * scale) ** 2:
            mus.append(0.0 + 0.0j)
            residuals.append(0.0)
            notes.append(f"element {k} lies in the null space of rho1; condition holds trivially")
            continue
        mu = np.vdot(rhs, lhs) / denom
        mus.append(mu)
        residuals.append(float(np.linalg.norm(lhs - mu * rhs)))
    mus = np.array(mus, dtype=complex)
    residuals = np.array(residuals)
    ok = bool(
        np.all(residuals <= tol * scale)
        and np.all(np.abs(mus.imag) <= tol * scale)
        and np.all(mus.real >= -tol)
    )
    return OptimalityReport(
        optimal=ok,
        mu=mus,
        residuals=residuals,
        overlap=povm_overlap(a, b, p),
        fidelity=fidelity(a, b),
        tol=tol,
        notes=notes,
    )


def _projective_overlaps(a, b, theta, phi):
    """Overlap of ``{P, I - P}`` for ``P`` the projector on Bloch direction ``(theta, phi)``."""
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    v0 = c.astype(complex)
    v1 = np.exp(1j * phi) * s
    def prob(rho):
        q = (rho[0, 0].real * np.abs(v0) ** 2 + rho[1, 1].real * np.abs(v1) ** 2
             + 2 * np.real(np.conj(v0) * rho[0, 1] * v1))
        return np.clip(q, 0.0, 1.0)
    p0, p1 = prob(a), prob(b)
    return np.sqrt(p0 * p1) + np.sqrt((1 - p0) * (1 - p1))


def brute_force_min_overlap(rho0, rho1, grid=200):
    """Minimum overlap over projective qubit measurements on a ``grid x grid`` mesh.

    Directions ``n`` and ``-n`` give the same measurement, so the polar
    angle runs over the closed upper hemisphere ``[0, pi/2]`` and the
    azimuth over ``[0, 2 pi)``.
    """
    a, b = _pair(rho0, rho1)
    if a.shape != (2, 2):
        raise ShapeMismatch(f"brute force oracle is for qubits, got shape {a.shape}")
    theta = np.linspace(0.0, np.pi / 2, grid)
    phi = np.linspace(0.0, 2 * np.pi, grid, endpoint=False)
    t, f = np.meshgrid(theta, phi, indexing="ij")
    return float(np.min(_projective_overlaps(a, b, t, f)))
