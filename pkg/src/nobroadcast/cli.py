"""Command-line front end.

Exit codes: 0 success, 1 numerical failure (or a bad optimizer
configuration), 2 malformed input, 3 the inputs do not commute.
"""
import argparse
import json
import sys
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional

import numpy as np

from . import __version__
from .broadcast import broadcast_quality, candidate_from_channel, commuting_broadcaster, verify_chain
from .distinguish import check_povm_optimality, optimal_povm, povm_overlap
from .errors import ConvergenceFailure, InvalidConfig, NotCommuting, NotTracePreserving
from .io import (
    MalformedFile,
    atomic_write,
    channel_to_json,
    dumps,
    matrix_from_json,
    povm_to_json,
    read_json,
    save_json,
    search_result_to_json,
)
from .search import SearchConfig, search_broadcast, sweep_csv, sweep_noncommutativity
from .states import validate_density

DEFAULT_SEED = 0
DEFAULT_SWEEP_GRID = 5
DEFAULT_SWEEP_PURITY = 0.8


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


@dataclass
class RunManifest:
    command: str
    inputs: List[str]
    seed: int
    tolerances: Dict[str, float]
    output: Optional[str]
    format: str
    extra: dict = field(default_factory=dict)


def _tolerances(args):
    return {"tol_psd": args.tol_psd, "tol_chain": args.tol_chain, "rank_tol": args.rank_tol}


def _manifest(args, inputs, output):
    return RunManifest(args.command, list(inputs), args.seed if args.seed is not None else DEFAULT_SEED,
                       _tolerances(args), output, args.format)


def _load_state(path, tol):
    try:
        return validate_density(matrix_from_json(read_json(path)), tol=tol)
    except OSError as exc:
        raise CliError(f"cannot read state file {path}: {exc.strerror}", 2) from None
    except ValueError as exc:
        raise CliError(f"{path}: {exc}", 2) from None


def _load_config(path):
    try:
        data = read_json(path)
    except OSError as exc:
        raise CliError(f"cannot read config file {path}: {exc.strerror}", 2) from None
    except MalformedFile as exc:
        raise CliError(str(exc), 2) from None
    if not isinstance(data, dict):
        raise CliError(f"{path}: config must be a JSON object", 2)
    return data


def _search_config(data, seed_flag):
    try:
        cfg = SearchConfig.from_dict(dict(data))
    except TypeError as exc:
        raise CliError(f"invalid search config: {exc}", 1) from None
    if seed_flag is not None:
        cfg.seed = seed_flag
        cfg.validate()
    return cfg


def _emit(args, payload, lines):
    for line in lines:
        print(line)
    if args.out:
        save_json(args.out, payload)


def cmd_fidelity(args):
    rho0 = _load_state(args.state0, args.tol_psd)
    rho1 = _load_state(args.state1, args.tol_psd)
    witness = optimal_povm(rho0, rho1, rank_tol=args.rank_tol)
    overlap = povm_overlap(rho0, rho1, witness.optimal_povm)
    report = check_povm_optimality(rho0, rho1, witness.optimal_povm, tol=args.tol_chain)
    payload = {
        "manifest": asdict(_manifest(args, [args.state0, args.state1], args.out)),
        "fidelity": witness.value,
        "optimal_overlap": overlap,
        "difference": overlap - witness.value,
        "povm": povm_to_json(witness.optimal_povm),
        "optimality": report.to_dict(),
    }
    _emit(args, payload, [
        f"F = {witness.value!r}",
        f"optimal POVM overlap = {overlap!r}",
        f"difference = {overlap - witness.value!r}",
        f"POVM optimal: {str(report.optimal).lower()}",
    ])


def cmd_broadcast_build(args):
    rho0 = _load_state(args.state0, args.tol_psd)
    rho1 = _load_state(args.state1, args.tol_psd)
    try:
        ch = commuting_broadcaster(rho0, rho1, tol=args.tol_chain)
    except NotCommuting as exc:
        raise CliError(f"NotCommuting: {exc}; no broadcasting channel exists for noncommuting states", 3) from None
    errors = verify_chain(candidate_from_channel(ch, rho0, rho1), tol=args.tol_chain,
                          rank_tol=args.rank_tol).marginal_errors
    atomic_write(args.channel, dumps(channel_to_json(ch)))
    print(f"marginal error (state 0) = {max(errors[0], errors[1])!r}")
    print(f"marginal error (state 1) = {max(errors[2], errors[3])!r}")
    print(f"broadcast quality = {broadcast_quality(ch, rho0, rho1)!r}")


def cmd_search(args):
    rho0 = _load_state(args.state0, args.tol_psd)
    rho1 = _load_state(args.state1, args.tol_psd)
    data = _load_config(args.config)
    cfg = _search_config(data, args.seed)
    res = search_broadcast(rho0, rho1, cfg)
    payload = search_result_to_json(res)
    payload["manifest"] = asdict(_manifest(args, [args.state0, args.state1, args.config], args.out))
    chain = res.chain
    lines = [
        f"quality = {res.quality!r}",
        f"certified = {str(res.certified).lower()}",
        f"commutator norm = {res.commutator_norm!r}",
        f"chain: F_in = {chain.f_in!r}, F_joint = {chain.f_joint!r}, F_A = {chain.f_a!r}, F_B = {chain.f_b!r}",
        f"chain: equality gap = {chain.equality_gap!r}, max marginal error = {max(chain.marginal_errors)!r}",
        f"note: {res.caveat}",
    ]
    if not args.out:
        lines.append(dumps(payload).rstrip("\n"))
    _emit(args, payload, lines)


def _sweep_angles(data):
    if "angles" in data:
        angles = data["angles"]
        if not isinstance(angles, list) or not angles:
            raise CliError("'angles' must be a non-empty list of numbers", 2)
        return [float(a) for a in angles]
    grid = data.get("grid", DEFAULT_SWEEP_GRID)
    if isinstance(grid, bool) or not isinstance(grid, int) or grid < 1:
        raise CliError("'grid' must be a positive integer", 2)
    return [float(a) for a in np.linspace(0.0, np.pi / 2, grid)]


def cmd_sweep(args):
    data = _load_config(args.config)
    unknown = set(data) - {"angles", "grid", "purity", "search"}
    if unknown:
        raise CliError(f"unknown sweep config keys: {sorted(unknown)}", 2)
    angles = _sweep_angles(data)
    purity = data.get("purity", DEFAULT_SWEEP_PURITY)
    cfg = _search_config(data.get("search", {}), args.seed)
    try:
        rows = sweep_noncommutativity(angles, float(purity), cfg)
    except InvalidConfig as exc:
        raise CliError(f"invalid sweep config: {exc}", 1) from None
    if args.format == "csv":
        text = sweep_csv(rows)
    else:
        text = dumps({
            "manifest": asdict(_manifest(args, [args.config], args.csv)),
            "rows": [asdict(r) for r in rows],
        })
    atomic_write(args.csv, text)
    for r in rows:
        print(f"theta={r.theta:.6f} commutator={r.commutator_norm:.3e} quality={r.quality:.10f} "
              f"certified={str(r.certified).lower()}")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help=f"random seed (default {DEFAULT_SEED}; overrides any seed in a config file)")
    common.add_argument("--format", choices=("json", "csv"), default=None)
    common.add_argument("--out", default=None, help="write the JSON report here")
    common.add_argument("--tol-psd", type=float, default=1e-10, help="state validation tolerance")
    common.add_argument("--tol-chain", type=float, default=1e-8,
                        help="commutation and fidelity-chain tolerance")
    common.add_argument("--rank-tol", type=float, default=1e-10, help="support/null-space threshold")

    parser = argparse.ArgumentParser(prog="nobroadcast", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fidelity", parents=[common], help="fidelity and optimal POVM of two states")
    p.add_argument("state0")
    p.add_argument("state1")
    p.set_defaults(func=cmd_fidelity, default_format="json")

    p = sub.add_parser("broadcast-build", parents=[common], help="broadcasting channel for a commuting pair")
    p.add_argument("state0")
    p.add_argument("state1")
    p.add_argument("channel", help="output channel file")
    p.set_defaults(func=cmd_broadcast_build, default_format="json")

    p = sub.add_parser("search", parents=[common], help="search for a broadcasting channel")
    p.add_argument("state0")
    p.add_argument("state1")
    p.add_argument("config", help="JSON search configuration")
    p.set_defaults(func=cmd_search, default_format="json")

    p = sub.add_parser("sweep", parents=[common], help="search along a family of increasingly noncommuting pairs")
    p.add_argument("config", help="JSON sweep configuration")
    p.add_argument("csv", help="output table")
    p.set_defaults(func=cmd_sweep, default_format="csv")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format is None:
        args.format = args.default_format
    try:
        args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except NotCommuting as exc:
        print(f"error: NotCommuting: {exc}", file=sys.stderr)
        return 3
    except (InvalidConfig, ConvergenceFailure, NotTracePreserving, ArithmeticError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
