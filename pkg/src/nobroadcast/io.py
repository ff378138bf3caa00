"""JSON and CSV file formats.

Matrices are ``{"dim": n, "entries": [[re, im], ...]}`` in row-major order.
A channel file is ``{"dims": [A, B, C], "U": matrix, "sigma": matrix,
"upsilon": matrix}``; a POVM file is ``{"elements": [matrix, ...], "mu": [...]}``
(a bare list of matrices is also accepted on input).
"""
import json
import math
import os
import tempfile

import numpy as np

from .distinguish import Povm
from .errors import ShapeMismatch
from .states import DilationChannel, validate_density


class MalformedFile(ValueError):
    """Raised when a file does not follow one of the formats above."""


def matrix_to_json(m):
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ShapeMismatch(f"only square matrices serialize, got shape {m.shape}")
    return {"dim": int(m.shape[0]), "entries": [[float(z.real), float(z.imag)] for z in m.ravel()]}


def matrix_from_json(obj):
    try:
        n = obj["dim"]
        entries = obj["entries"]
    except (TypeError, KeyError) as exc:
        raise MalformedFile(f"matrix object needs 'dim' and 'entries' keys ({exc})") from None
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise MalformedFile(f"'dim' must be a positive integer, got {n!r}")
    if not isinstance(entries, list) or len(entries) != n * n:
        raise MalformedFile(f"'entries' must hold dim*dim = {n * n} [re, im] pairs")
    vals = []
    for e in entries:
        if (not isinstance(e, (list, tuple)) or len(e) != 2
                or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in e)):
            raise MalformedFile(f"bad matrix entry {e!r}; expected [re, im]")
        if not all(math.isfinite(x) for x in e):
            raise MalformedFile("matrix entries must be finite")
        vals.append(complex(e[0], e[1]))
    return np.array(vals, dtype=complex).reshape(n, n)


def channel_to_json(ch: DilationChannel):
    return {
        "dims": list(ch.dims),
        "U": matrix_to_json(ch.unitary),
        "sigma": matrix_to_json(ch.sigma),
        "upsilon": matrix_to_json(ch.upsilon),
    }


def channel_from_json(obj):
    try:
        dims = obj["dims"]
        parts = obj["U"], obj["sigma"], obj["upsilon"]
    except (TypeError, KeyError) as exc:
        raise MalformedFile(f"channel object needs dims, U, sigma, upsilon ({exc})") from None
    if not (isinstance(dims, list) and len(dims) == 3 and all(isinstance(d, int) for d in dims)):
        raise MalformedFile("'dims' must be a list of three integers")
    u, sigma, upsilon = (matrix_from_json(p) for p in parts)
    return DilationChannel(*dims, u, validate_density(sigma), validate_density(upsilon))


def povm_to_json(povm: Povm):
    out = {"elements": [matrix_to_json(e) for e in povm.elements]}
    if povm.mu is not None:
        out["mu"] = [None if not np.isfinite(m) else float(m) for m in np.real(povm.mu)]
    return out


def povm_from_json(obj):
    if isinstance(obj, list):
        return Povm([matrix_from_json(e) for e in obj])
    try:
        elements = [matrix_from_json(e) for e in obj["elements"]]
    except (TypeError, KeyError) as exc:
        raise MalformedFile(f"POVM object needs an 'elements' list ({exc})") from None
    mu = obj.get("mu")
    if mu is not None:
        mu = np.array([np.nan if m is None else m for m in mu], dtype=float)
    return Povm(elements, mu)


def read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise MalformedFile(f"{path}: invalid JSON ({exc})") from None


def load_state(path):
    return validate_density(matrix_from_json(read_json(path)))


def dumps(obj):
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def atomic_write(path, text):
    """Write ``text`` to ``path`` through a temporary file renamed into place."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_json(path, obj):
    atomic_write(path, dumps(obj))


def chain_report_to_json(report):
    return report.to_dict()


def search_result_to_json(res):
    return {
        "best_channel": channel_to_json(res.best_channel),
        "quality": res.quality,
        "certified": res.certified,
        "caveat": res.caveat,
        "commutator_norm": res.commutator_norm,
        "best_restart": res.best_restart,
        "restart_qualities": list(res.restart_qualities),
        "iterations": res.iterations,
        "per_restart_trace": [[[int(i), float(q)] for i, q in trace] for trace in res.per_restart_trace],
        "chain": chain_report_to_json(res.chain),
        "config": res.config.to_dict(),
        "violations": [[name, float(x), float(y)] for name, x, y in res.violations],
    }
