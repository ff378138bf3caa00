"""Dense complex linear algebra primitives.

Everything here works on plain ``numpy`` arrays (anything accepted by
``np.asarray`` is fine, including :class:`~nobroadcast.states.DensityOperator`).
Operator distances are Frobenius norms throughout.
"""
from typing import NamedTuple, Sequence

import numpy as np

from .errors import ConvergenceFailure, NotHermitian, NotPositive, ShapeMismatch

DEFAULT_TOL = 1e-10


class HermitianEigenSystem(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_matrix(a, square=True):
    """Return ``a`` as a 2-D complex array, checking shape and finiteness."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise ShapeMismatch(f"expected a matrix, got array of shape {m.shape}")
    if square and m.shape[0] != m.shape[1]:
        raise ShapeMismatch(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def dagger(a):
    return np.conj(np.transpose(a))


def fix_phases(vectors):
    """Rotate each column so its largest-magnitude entry is real and positive.

    Ties in magnitude go to the lowest index, which keeps the choice
    deterministic for a given input.
    """
    v = np.array(vectors, dtype=complex)
    if v.size == 0:
        return v
    idx = np.argmax(np.abs(v) - 1e-12 * np.arange(v.shape[0])[:, None], axis=0)
    pivots = v[idx, np.arange(v.shape[1])]
    mags = np.abs(pivots)
    phases = np.where(mags > 0, pivots / np.where(mags > 0, mags, 1.0), 1.0)
    return v / phases[None, :]


def is_hermitian(a, tol=DEFAULT_TOL):
    a = as_matrix(a)
    return np.linalg.norm(a - dagger(a)) <= tol * max(1.0, np.linalg.norm(a))


def hermitian_eig(a, tol=DEFAULT_TOL):
    """Eigendecomposition of a Hermitian matrix.

    Eigenvalues come back ascending; eigenvectors are the columns of a
    unitary matrix with the phase convention of :func:`fix_phases`.

    Raises
    ------
    NotHermitian
        If ``||A - A^dagger||_F > tol * max(1, ||A||_F)``.
    ConvergenceFailure
        If LAPACK fails to converge.
    """
    a = as_matrix(a)
    skew = np.linalg.norm(a - dagger(a))
    if skew > tol * max(1.0, np.linalg.norm(a)):
        raise NotHermitian(f"matrix is not Hermitian (||A - A^dagger||_F = {skew:.3e})")
    h = 0.5 * (a + dagger(a))
    try:
        w, v = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(f"Hermitian eigensolver failed: {exc}") from exc
    return HermitianEigenSystem(w, fix_phases(v))


def _from_spectrum(vals, vecs):
    return (vecs * vals[None, :]) @ dagger(vecs)


def rounding_floor(eigenvalues):
    """Magnitude below which a computed eigenvalue is indistinguishable from zero."""
    w = np.asarray(eigenvalues)
    if not w.size:
        return 0.0
    return 8 * w.size * np.finfo(float).eps * float(np.max(np.abs(w)))


def _clamped_spectrum(o, tol):
    w, v = hermitian_eig(o, tol)
    if w.size and w[0] < -tol:
        raise NotPositive(f"matrix is not positive (smallest eigenvalue {w[0]:.3e})")
    # rounding noise on null eigenvalues would otherwise survive as ~1e-8 after rooting
    w = np.where(w > rounding_floor(w), w, 0.0)
    return w, v


def positive_sqrt(o, tol=DEFAULT_TOL):
    """Unique positive square root of a positive operator.

    Eigenvalues in ``[-tol, 0]``, and positive ones below the rounding
    floor of the decomposition, are treated as exact zeros.
    """
    w, v = _clamped_spectrum(o, tol)
    return _from_spectrum(np.sqrt(w), v)


def pseudo_inverse_sqrt(o, rank_tol=DEFAULT_TOL):
    """``O^{-1/2}`` on the support of ``O`` (eigenvalues above ``rank_tol``), zero elsewhere."""
    w, v = _clamped_spectrum(o, rank_tol)
    inv = np.zeros_like(w)
    keep = w > rank_tol
    inv[keep] = 1.0 / np.sqrt(w[keep])
    return _from_spectrum(inv, v)


def support_projectors(o, rank_tol=DEFAULT_TOL):
    """Isometries onto the support and null space of a positive operator.

    Returns ``(support, null)``, each an ``n x k`` matrix with orthonormal
    columns.
    """
    w, v = _clamped_spectrum(o, rank_tol)
    keep = w > rank_tol
    return v[:, keep], v[:, ~keep]


def polar_unitary(o):
    """Unitary ``V`` with ``V @ O == sqrt(O^dagger O)``.

    Computed from the SVD ``O = W S Y^dagger`` as ``V = Y W^dagger``. When
    ``O`` is singular the action of ``V`` off the range of ``O`` is fixed by
    the phase convention of :func:`fix_phases` applied to the singular vectors.
    """
    o = as_matrix(o)
    try:
        w, s, yh = np.linalg.svd(o)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(f"SVD failed: {exc}") from exc
    y = dagger(yh)
    # Joint phase on (w_i, y_i) leaves V invariant for nonzero s_i; null pairs
    # are fixed independently.
    w_fixed = fix_phases(w)
    ratio = np.sum(np.conj(w) * w_fixed, axis=0)
    y = y * ratio[None, :]
    null = s <= 1e-14 * max(1.0, s[0] if s.size else 0.0)
    if np.any(null):
        y[:, null] = fix_phases(y[:, null])
    return y @ dagger(w_fixed)


def tensor(*ops):
    """Kronecker product, with ``(i_A, i_B) -> i_A * dim_B + i_B``."""
    if not ops:
        raise ValueError("tensor needs at least one operand")
    out = np.asarray(ops[0], dtype=complex)
    for op in ops[1:]:
        out = np.kron(out, np.asarray(op, dtype=complex))
    return out


def _check_dims(n, dims):
    dims = tuple(int(d) for d in dims)
    if not dims or any(d < 1 for d in dims):
        raise ShapeMismatch(f"invalid subsystem dimensions {dims}")
    if int(np.prod(dims)) != n:
        raise ShapeMismatch(f"subsystem dimensions {dims} do not multiply to {n}")
    return dims


def partial_trace(m, dims: Sequence[int], keep):
    """Trace out every factor of ``dims`` not listed in ``keep``.

    ``keep`` is an int or an iterable of factor indices; the kept factors
    stay in their original order.

    >>> partial_trace(np.kron(np.diag([1, 2]), np.eye(3)), [2, 3], keep=0).real
    array([[3., 0.],
           [0., 6.]])
    """
    m = as_matrix(m)
    dims = _check_dims(m.shape[0], dims)
    keep = [keep] if isinstance(keep, (int, np.integer)) else sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= len(dims) for k in keep):
        raise ShapeMismatch(f"keep={keep} out of range for {len(dims)} factors")
    n = len(dims)
    letters = "abcdefghijklmnopqrstuvwxyz"
    if 2 * n > len(letters):
        raise ShapeMismatch("too many subsystems")
    rows = list(letters[:n])
    cols = list(letters[n:2 * n])
    for k in range(n):
        if k not in keep:
            cols[k] = rows[k]
    out = "".join(rows[k] for k in keep) + "".join(cols[k] for k in keep)
    reduced = np.einsum("".join(rows) + "".join(cols) + "->" + out, m.reshape(dims + dims))
    d = int(np.prod([dims[k] for k in keep])) if keep else 1
    return reduced.reshape(d, d)


def commutator_norm(a, b):
    """Frobenius norm of ``AB - BA``."""
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape:
        raise ShapeMismatch(f"shapes {a.shape} and {b.shape} differ")
    return float(np.linalg.norm(a @ b - b @ a))
