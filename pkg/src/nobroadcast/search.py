"""Random-restart hill climbing over dilation unitaries.

The search maximizes :func:`~nobroadcast.broadcast.broadcast_quality` over
``U = U_start exp(iH)`` on A⊗B⊗C, with ``H`` Hermitian and built from an
unconstrained real parameter vector. It can only exhibit channels and
certify that the proven fidelity inequalities held along the way; a
quality below 1 is evidence, not proof, that no broadcaster exists.
"""
import csv
import io
from dataclasses import asdict, dataclass, field
from typing import List, Tuple

import numpy as np

from .broadcast import (
    OBJECTIVES,
    ChainReport,
    _combine,
    basis_cloner,
    candidate_from_channel,
    marginal_fidelities,
    simultaneous_eigenbasis,
    verify_chain,
)
from .distinguish import fidelity, optimal_povm, povm_overlap
from .errors import InvalidConfig, NotCommuting
from .linalg import commutator_norm, dagger, hermitian_eig, partial_trace, tensor
from .states import DilationChannel, as_density, basis_state, bloch_qubit, dilation_channel, random_unitary

CAVEAT = ("certified=true means no accepted iterate violated the partial-trace or channel "
          "monotonicity of fidelity; it is not a proof that broadcasting is impossible")
CHAIN_TOL = 1e-6


@dataclass
class SearchConfig:
    ancilla_dim: int = 1
    restarts: int = 4
    max_iters: int = 2000
    step_init: float = 0.5
    step_min: float = 1e-7
    seed: int = 0
    objective: str = "min_marginal_fidelity"

    def validate(self):
        for name in ("ancilla_dim", "restarts", "max_iters"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 1:
                raise InvalidConfig(f"{name} must be a positive integer, got {value!r}")
        if not (self.step_init > 0 and self.step_min > 0):
            raise InvalidConfig("step sizes must be positive")
        if not self.step_min < self.step_init:
            raise InvalidConfig(f"step_min ({self.step_min}) must be below step_init ({self.step_init})")
        if isinstance(self.seed, bool) or not isinstance(self.seed, (int, np.integer)) or self.seed < 0:
            raise InvalidConfig(f"seed must be a non-negative integer, got {self.seed!r}")
        if self.objective not in OBJECTIVES:
            raise InvalidConfig(f"objective must be one of {OBJECTIVES}, got {self.objective!r}")
        return self

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise InvalidConfig(f"unknown search config keys: {sorted(unknown)}")
        return cls(**data).validate()


@dataclass
class SearchResult:
    best_channel: DilationChannel
    quality: float
    per_restart_trace: List[List[Tuple[int, float]]]
    chain: ChainReport
    certified: bool
    restart_qualities: List[float]
    best_restart: int
    iterations: int
    config: SearchConfig
    caveat: str = CAVEAT
    commutator_norm: float = 0.0
    violations: list = field(default_factory=list)


def hermitian_from_params(x, dim):
    """Hermitian matrix from ``dim**2`` reals: diagonal first, then real and imaginary upper parts."""
    h = np.zeros((dim, dim), dtype=complex)
    iu = np.triu_indices(dim, 1)
    m = len(iu[0])
    h[np.diag_indices(dim)] = x[:dim]
    h[iu] = (x[dim:dim + m] + 1j * x[dim + m:]) / np.sqrt(2)
    h[(iu[1], iu[0])] = np.conj(h[iu])
    return h


def unitary_exp(h):
    """``exp(iH)`` for Hermitian ``H`` via its eigendecomposition."""
    w, v = np.linalg.eigh(h)
    return (v * np.exp(1j * w)[None, :]) @ dagger(v)


def seed_unitary(rho0, rho1, ancilla_dim, tol=1e-8):
    """Basis cloner for the nearest commuting pair, padded with identity on the ancilla.

    Commuting inputs use their shared eigenbasis; otherwise the eigenbasis of
    ``(rho0 + rho1) / 2`` stands in for it.
    """
    try:
        basis = simultaneous_eigenbasis(rho0, rho1, tol)
    except NotCommuting:
        basis = hermitian_eig(0.5 * (np.asarray(rho0) + np.asarray(rho1))).eigenvectors
    return tensor(basis_cloner(basis), np.eye(ancilla_dim))


class _Chain:
    """Checks the fidelity inequalities on iterates against fixed optimal-POVM data."""

    def __init__(self, rho0, rho1, n):
        self.povm = optimal_povm(rho0, rho1).optimal_povm
        self.f_in = fidelity(rho0, rho1)
        self.dims = (n, n)

    def violations(self, tilde0, tilde1):
        f_joint = fidelity(tilde0, tilde1)
        f_a = povm_overlap(partial_trace(tilde0, self.dims, 0), partial_trace(tilde1, self.dims, 0), self.povm)
        f_b = povm_overlap(partial_trace(tilde0, self.dims, 1), partial_trace(tilde1, self.dims, 1), self.povm)
        bad = []
        if f_a < f_joint - CHAIN_TOL:
            bad.append(("partial_trace_A", f_a, f_joint))
        if f_b < f_joint - CHAIN_TOL:
            bad.append(("partial_trace_B", f_b, f_joint))
        if f_joint < self.f_in - CHAIN_TOL:
            bad.append(("channel_monotonicity", f_joint, self.f_in))
        return bad


def _joint_outputs(u, dims, env, rho0, rho1):
    out = []
    for rho in (rho0, rho1):
        j = partial_trace(u @ tensor(rho, env) @ dagger(u), dims, keep=(0, 1))
        out.append(0.5 * (j + dagger(j)))
    return out


def _climb(start, rho0, rho1, dims, env, sigma, upsilon, cfg, rng, chain):
    d = start.shape[0]
    x = np.zeros(d * d)

    def quality(params):
        u = start @ unitary_exp(hermitian_from_params(params, d))
        return _combine(marginal_fidelities(u, dims, sigma, upsilon, rho0, rho1), cfg.objective), u

    q, u = quality(x)
    trace = [(0, q)]
    bad = chain.violations(*_joint_outputs(u, dims, env, rho0, rho1))
    step = cfg.step_init
    it = 0
    while it < cfg.max_iters and q < 1.0 - 1e-14:
        it += 1
        direction = rng.standard_normal(d * d)
        direction /= np.linalg.norm(direction)
        accepted = False
        # mirrored proposals: if +step fails, -step usually climbs when step is small
        for sign in (1.0, -1.0):
            trial = x + sign * step * direction
            qt, ut = quality(trial)
            if qt > q:
                x, q, u = trial, qt, ut
                accepted = True
                break
        if accepted:
            step *= 1.2
            trace.append((it, q))
            bad += chain.violations(*_joint_outputs(u, dims, env, rho0, rho1))
        else:
            step *= 0.5
            if step < cfg.step_min:
                break
    return q, u, trace, bad, it


def search_broadcast(rho0, rho1, cfg: SearchConfig = None):
    """Search for a broadcasting channel for ``{rho0, rho1}``.

    Restart 0 starts from :func:`seed_unitary`; the others start from Haar
    random unitaries. Restart ``r`` draws from its own generator seeded by
    ``(cfg.seed, r)``, so results do not depend on execution order.
    """
    cfg = (cfg or SearchConfig()).validate()
    rho0, rho1 = as_density(rho0), as_density(rho1)
    a, b = np.asarray(rho0), np.asarray(rho1)
    n = a.shape[0]
    dims = (n, n, cfg.ancilla_dim)
    sigma = np.asarray(basis_state(n))
    upsilon = np.asarray(basis_state(cfg.ancilla_dim))
    env = tensor(sigma, upsilon)
    chain = _Chain(a, b, n)

    results = []
    for r in range(cfg.restarts):
        rng = np.random.default_rng([cfg.seed, r])
        start = seed_unitary(a, b, cfg.ancilla_dim) if r == 0 else random_unitary(n * n * cfg.ancilla_dim, rng)
        results.append(_climb(start, a, b, dims, env, sigma, upsilon, cfg, rng, chain))

    qualities = [res[0] for res in results]
    best = int(np.argmax(qualities))
    _, u_best, _, _, _ = results[best]
    channel = dilation_channel(u_best, n, n, cfg.ancilla_dim)
    violations = [v for res in results for v in res[3]]
    report = verify_chain(candidate_from_channel(channel, a, b))
    return SearchResult(
        best_channel=channel,
        quality=float(qualities[best]),
        per_restart_trace=[res[2] for res in results],
        chain=report,
        certified=not violations,
        restart_qualities=[float(q) for q in qualities],
        best_restart=best,
        iterations=int(sum(res[4] for res in results)),
        config=cfg,
        commutator_norm=commutator_norm(a, b),
        violations=violations,
    )


@dataclass
class SweepRow:
    theta: float
    commutator_norm: float
    quality: float
    certified: bool
    iters: int


SWEEP_HEADER = ("theta", "commutator_norm", "quality", "certified", "iters")


def sweep_pair(theta, purity):
    """``(I + r sz)/2`` and ``(I + r (cos t sz + sin t sx))/2``."""
    return bloch_qubit((0.0, 0.0, purity)), bloch_qubit((purity * np.sin(theta), 0.0, purity * np.cos(theta)))


def sweep_noncommutativity(angles, purity, cfg: SearchConfig = None):
    """Run :func:`search_broadcast` along a family of qubit pairs of growing noncommutativity."""
    cfg = (cfg or SearchConfig()).validate()
    if not 0 < purity <= 1:
        raise InvalidConfig(f"purity must lie in (0, 1], got {purity}")
    rows = []
    for theta in angles:
        if not 0 <= theta <= np.pi / 2 + 1e-12:
            raise InvalidConfig(f"angle {theta} outside [0, pi/2]")
        rho0, rho1 = sweep_pair(theta, purity)
        res = search_broadcast(rho0, rho1, cfg)
        rows.append(SweepRow(float(theta), res.commutator_norm, res.quality, res.certified, res.iterations))
    return rows


def sweep_csv(rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_HEADER)
    for row in rows:
        writer.writerow([repr(row.theta), repr(row.commutator_norm), repr(row.quality),
                         "true" if row.certified else "false", row.iters])
    return buf.getvalue()
