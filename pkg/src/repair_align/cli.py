"""Command-line driver.

All artifacts are JSON files in the formats of the library's ``to_json``
methods.  Exit codes: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import re
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from . import _search
from .bridge import (
    MappingRecord,
    channel_to_code,
    code_to_channel,
    lemma3_bounds,
    lemma5_bounds,
    transport_strategy,
    verify_theorem1,
    verify_theorem2,
)
from .constructions import (
    eq13_guarantee,
    inverse_alignment_beamforming,
    inverse_alignment_repair,
    symbol_extension_beamforming,
    symbol_extension_repair,
)
from .errors import RepairAlignError
from .exact_linalg import ScalarDomain
from .mds_code import MdsCode, generate_diagonal_code, generate_random_code, is_mds
from .repair import RepairStrategy, evaluate_repair, search_optimal_repair
from .wiretap import (
    BeamformingSet,
    ChannelInstance,
    empirical_dof,
    generate_random_channel,
    sdof,
    search_optimal_beamforming,
    secrecy_rate,
)

log = logging.getLogger("repair_align")

DEFAULT_SEED = 20100
SEED_ENV = "REPAIR_ALIGN_SEED"

_RATIONAL = re.compile(r"^-?\d+/\d+$")


# -- rendering -------------------------------------------------------------


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def _fmt_value(v: Any) -> str:
    if isinstance(v, Fraction) or (isinstance(v, str) and _RATIONAL.match(v)):
        f = Fraction(v)
        return f"{f.numerator}/{f.denominator} (≈{float(f):.3f})"
    if isinstance(v, bool) or v is None:
        return str(v).lower() if isinstance(v, bool) else "n/a"
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, dict):
        return " ".join(f"{k}={_fmt_value(x)}" for k, x in v.items()) if v else "n/a"
    if isinstance(v, (list, tuple)):
        return ", ".join(_fmt_value(x) for x in v) if v else "n/a"
    return str(v)


def _flatten(report: dict, prefix: str = "") -> list[tuple[str, Any]]:
    rows = []
    for key, val in report.items():
        name = f"{prefix}{key}"
        if isinstance(val, dict) and val:
            rows.extend(_flatten(val, name + "."))
        elif isinstance(val, dict):
            rows.append((name, None))
        else:
            rows.append((name, val))
    return rows


def report_render(report: dict, fmt: str = "json") -> str:
    """Render a report dict; ``json`` output is byte-stable, ``table`` is aligned key/value text."""
    if fmt == "json":
        return json.dumps(_jsonable(report), sort_keys=True, indent=2) + "\n"
    if "rows" in report and isinstance(report["rows"], list) and report["rows"]:
        return _render_rows(report["rows"], fmt)
    rows = _flatten(report)
    if fmt == "csv":
        return "".join(f"{k},{_fmt_value(v)}\n" for k, v in rows)
    width = max((len(k) for k, _ in rows), default=0)
    return "".join(f"{k.ljust(width)}  {_fmt_value(v)}\n" for k, v in rows)


def _render_rows(rows: list[dict], fmt: str) -> str:
    keys = list(rows[0])
    cells = [[_fmt_value(r[k]) if not isinstance(r[k], float) else f"{r[k]:.6g}" for k in keys] for r in rows]
    if fmt == "csv":
        return ",".join(keys) + "\n" + "".join(",".join(c) + "\n" for c in cells)
    widths = [max(len(k), *(len(c[i]) for c in cells)) for i, k in enumerate(keys)]
    line = lambda vals: "  ".join(v.rjust(w) for v, w in zip(vals, widths)).rstrip() + "\n"  # noqa: E731
    return line(keys) + "".join(line(c) for c in cells)


# -- io helpers ------------------------------------------------------------


def _load(path: str) -> dict:
    return json.loads(Path(path).read_text())


def _write_artifact(obj: dict, path: str | None) -> None:
    text = json.dumps(_jsonable(obj), sort_keys=True, indent=2) + "\n"
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _emit(report: dict, args) -> None:
    sys.stdout.write(report_render(report, args.format))


def _default_seed() -> int:
    env = os.environ.get(SEED_ENV)
    return int(env) if env else DEFAULT_SEED


# -- commands --------------------------------------------------------------


def cmd_gen_code(args) -> int:
    maker = generate_diagonal_code if args.diagonal else generate_random_code
    code = maker(args.n, args.k, args.beta, ScalarDomain.parse(args.field), seed=args.seed)
    _write_artifact(code.to_json(), args.output)
    if args.output:
        _emit({"written": args.output, "n": code.n, "k": code.k, "beta": code.beta, "mds": True}, args)
    return 0


def cmd_gen_channel(args) -> int:
    chan = generate_random_channel(
        args.L, args.N, args.K, ScalarDomain.parse(args.field), seed=args.seed, structure=args.structure
    )
    _write_artifact(chan.to_json(), args.output)
    if args.output:
        _emit({"written": args.output, "L": chan.L, "N": chan.N, "K": chan.K, "structure": chan.structure}, args)
    return 0


def cmd_check_mds(args) -> int:
    code = MdsCode.from_json(_load(args.code))
    ok = is_mds(code)
    _emit({"n": code.n, "k": code.k, "beta": code.beta, "mds": ok}, args)
    return 1 if args.fatal and not ok else 0


def cmd_repair_eval(args) -> int:
    code = MdsCode.from_json(_load(args.code))
    strategy = RepairStrategy.from_json(_load(args.strategy))
    _emit(evaluate_repair(code, strategy).to_json(), args)
    return 0


def cmd_repair_search(args) -> int:
    code = MdsCode.from_json(_load(args.code))
    mode = "randomized" if args.randomized else "exhaustive"
    strategy, report = search_optimal_repair(
        code, args.node, mode=mode, trials=args.trials, budget=args.budget, jobs=args.jobs, seed=args.seed
    )
    if args.output:
        _write_artifact(strategy.to_json(), args.output)
    _emit(report.to_json(), args)
    return 0


def cmd_repair_construct(args) -> int:
    code = MdsCode.from_json(_load(args.code))
    if args.method == "inverse":
        strategy = inverse_alignment_repair(code, args.node, seed=args.seed)
    else:
        strategy = symbol_extension_repair(code, args.delta, i=args.node, seed=args.seed)
    _write_artifact(strategy.to_json(), args.output)
    if args.output:
        _emit(evaluate_repair(code, strategy).to_json(), args)
    return 0


def cmd_sdof_eval(args) -> int:
    chan = ChannelInstance.from_json(_load(args.channel))
    V = BeamformingSet.from_json(_load(args.beamforming))
    _emit(sdof(chan, V).to_json(), args)
    return 0


def cmd_sdof_search(args) -> int:
    chan = ChannelInstance.from_json(_load(args.channel))
    V, report = search_optimal_beamforming(chan, budget=args.budget, jobs=args.jobs)
    if args.output:
        _write_artifact(V.to_json(), args.output)
    _emit(report.to_json(), args)
    return 0


def cmd_sdof_construct(args) -> int:
    chan = ChannelInstance.from_json(_load(args.channel))
    if args.method == "inverse":
        V = inverse_alignment_beamforming(chan, seed=args.seed)
    else:
        V = symbol_extension_beamforming(chan, args.delta, seed=args.seed)
    _write_artifact(V.to_json(), args.output)
    if args.output:
        report = sdof(chan, V).to_json()
        if args.method == "symbol-extension":
            report["guarantee"] = eq13_guarantee(chan.L, chan.K, args.delta)
        _emit(report, args)
    return 0


def cmd_map_c2c(args) -> int:
    code = MdsCode.from_json(_load(args.code))
    chan, record = code_to_channel(code, args.node)
    _write_artifact(chan.to_json(), args.output)
    if args.output:
        _emit(record.to_json(), args)
    return 0


def cmd_map_ch2c(args) -> int:
    chan = ChannelInstance.from_json(_load(args.channel))
    code, record = channel_to_code(chan)
    _write_artifact(code.to_json(), args.output)
    if args.output:
        _emit(record.to_json(), args)
    return 1 if args.fatal and not record.mds else 0


def cmd_map_transport(args) -> int:
    record = MappingRecord.from_json(_load(args.record))
    obj = _load(args.strategy)
    src = BeamformingSet.from_json(obj) if "mats" in obj else RepairStrategy.from_json(obj)
    _write_artifact(transport_strategy(src, record).to_json(), args.output)
    return 0


def cmd_bounds_lemma3(args) -> int:
    low, high = lemma3_bounds(args.k, Fraction(args.overhead))
    _emit({"k": args.k, "overhead": Fraction(args.overhead), "eta_low": low, "eta_high": high}, args)
    return 0


def cmd_bounds_lemma5(args) -> int:
    low, high = lemma5_bounds(args.K, Fraction(args.eta))
    _emit({"K": args.K, "eta": Fraction(args.eta), "overhead_low": low, "overhead_high": high}, args)
    return 0


def cmd_bounds_eq13(args) -> int:
    g = eq13_guarantee(args.L, args.K, args.delta)
    _emit({"L": args.L, "K": args.K, "delta": args.delta, "guarantee": g, "outer_bound": Fraction(args.L - 1, args.L)}, args)
    return 0


def cmd_verify_t1(args) -> int:
    code = MdsCode.from_json(_load(args.code))
    _emit(verify_theorem1(code, args.node, budget=args.budget, jobs=args.jobs).to_json(), args)
    return 0


def cmd_verify_t2(args) -> int:
    chan = ChannelInstance.from_json(_load(args.channel))
    _emit(verify_theorem2(chan, budget=args.budget, jobs=args.jobs).to_json(), args)
    return 0


def _float_channel(path: str) -> ChannelInstance:
    chan = ChannelInstance.from_json(_load(path))
    return chan if chan.domain.kind == "float" else chan.to_domain(ScalarDomain.floating())


def cmd_rate_eval(args) -> int:
    chan = _float_channel(args.channel)
    V = BeamformingSet.from_json(_load(args.beamforming))
    rate = secrecy_rate(chan, V, args.power, args.noise)
    report: dict[str, Any] = {"power": args.power, "noise": args.noise, "rate_bits": rate}
    if args.power / args.noise > 1:
        report["empirical_dof"] = empirical_dof(chan, V, args.power, args.noise)
    _emit(report, args)
    return 0


def cmd_rate_sweep(args) -> int:
    chan = _float_channel(args.channel)
    V = BeamformingSet.from_json(_load(args.beamforming))
    powers = [float(p) for p in args.powers.split(",")] if args.powers else [
        10.0**e for e in range(args.start_exp, args.stop_exp + 1, args.step_exp)
    ]
    rows = []
    for P in powers:
        rows.append({
            "power": P,
            "snr_db": 10 * math.log10(P / args.noise),
            "rate_bits": secrecy_rate(chan, V, P, args.noise),
            "empirical_dof": empirical_dof(chan, V, P, args.noise),
        })
    _emit({"rows": rows}, args)
    return 0


# -- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=_default_seed(),
                        help=f"RNG seed (default {DEFAULT_SEED}, overridden by ${SEED_ENV})")
    common.add_argument("--budget", type=int, default=_search.DEFAULT_BUDGET, help="candidate cap for exhaustive searches")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for searches")
    common.add_argument("--format", choices=("json", "table", "csv"), default="json")
    common.add_argument("-o", "--output", help="artifact output path (stdout when omitted)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="repair-align", description=__doc__.splitlines()[0])
    groups = parser.add_subparsers(dest="group", required=True)

    def leaf(group, name, func, help_text):
        p = group.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(func=func)
        return p

    def field_arg(p, default="rational"):
        p.add_argument("--field", default=default, help="gf:<p> | rational | float:<tau>")

    gen = groups.add_parser("gen", help="generate random instances").add_subparsers(dest="what", required=True)
    p = leaf(gen, "code", cmd_gen_code, "random systematic MDS code")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--beta", type=int, default=1)
    p.add_argument("--diagonal", action="store_true", help="diagonal coding blocks")
    field_arg(p)
    p = leaf(gen, "channel", cmd_gen_channel, "random compound wiretap channel")
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--N", type=int, default=1)
    p.add_argument("--K", type=int, default=2)
    p.add_argument("--structure", choices=("generic", "diagonal"), default="generic")
    field_arg(p)

    check = groups.add_parser("check", help="property checks").add_subparsers(dest="what", required=True)
    p = leaf(check, "mds", cmd_check_mds, "exhaustive MDS check")
    p.add_argument("code")
    p.add_argument("--fatal", action="store_true", help="exit 1 when the code is not MDS")

    rep = groups.add_parser("repair", help="single-node repair").add_subparsers(dest="what", required=True)
    p = leaf(rep, "eval", cmd_repair_eval, "evaluate a repair strategy")
    p.add_argument("code")
    p.add_argument("strategy")
    p = leaf(rep, "search", cmd_repair_search, "minimize repair overhead")
    p.add_argument("code")
    p.add_argument("--node", type=int, default=1)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exhaustive", action="store_true", help="exact search (default; prime fields)")
    mode.add_argument("--randomized", action="store_true", help="best of --trials random strategies")
    p.add_argument("--trials", type=int, default=200)
    p = leaf(rep, "construct", cmd_repair_construct, "explicit alignment construction")
    p.add_argument("code")
    p.add_argument("--node", type=int, default=1)
    p.add_argument("--method", choices=("inverse", "symbol-extension"), default="inverse")
    p.add_argument("--delta", type=int, default=1, help="symbol-extension parameter")

    sd = groups.add_parser("sdof", help="secure degrees of freedom").add_subparsers(dest="what", required=True)
    p = leaf(sd, "eval", cmd_sdof_eval, "evaluate beamformers")
    p.add_argument("channel")
    p.add_argument("beamforming")
    p = leaf(sd, "search", cmd_sdof_search, "exhaustive beamformer search (prime fields)")
    p.add_argument("channel")
    p = leaf(sd, "construct", cmd_sdof_construct, "explicit beamforming construction")
    p.add_argument("channel")
    p.add_argument("--method", choices=("inverse", "symbol-extension"), default="inverse")
    p.add_argument("--delta", type=int, default=1, help="symbol-extension parameter")

    mp = groups.add_parser("map", help="code/channel mappings").add_subparsers(dest="what", required=True)
    p = leaf(mp, "code-to-channel", cmd_map_c2c, "H = P_i A")
    p.add_argument("code")
    p.add_argument("--node", type=int, default=1)
    p = leaf(mp, "channel-to-code", cmd_map_ch2c, "A = H")
    p.add_argument("channel")
    p.add_argument("--fatal", action="store_true", help="exit 1 when the mapped code is not MDS")
    p = leaf(mp, "transport", cmd_map_transport, "move a strategy across a mapping record")
    p.add_argument("record")
    p.add_argument("strategy")

    bd = groups.add_parser("bounds", help="bound calculators").add_subparsers(dest="what", required=True)
    p = leaf(bd, "lemma3", cmd_bounds_lemma3, "S-DoF bounds from a repair overhead")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--overhead", required=True, help="measured repair overhead, e.g. 3/2")
    p = leaf(bd, "lemma5", cmd_bounds_lemma5, "repair-overhead bounds from an S-DoF")
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--eta", required=True, help="achieved S-DoF, e.g. 2/3")
    p = leaf(bd, "eq13", cmd_bounds_eq13, "symbol-extension S-DoF guarantee")
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--K", type=int, default=2)
    p.add_argument("--delta", type=int, required=True)

    vf = groups.add_parser("verify", help="equivalence checks").add_subparsers(dest="what", required=True)
    p = leaf(vf, "theorem1", cmd_verify_t1, "repair vs beamforming optima on P_i A")
    p.add_argument("code")
    p.add_argument("--node", type=int, default=1)
    p = leaf(vf, "theorem2", cmd_verify_t2, "beamforming vs repair optima on A = H")
    p.add_argument("channel")

    rt = groups.add_parser("rate", help="finite-SNR secrecy rates").add_subparsers(dest="what", required=True)
    for name, func in (("eval", cmd_rate_eval), ("sweep", cmd_rate_sweep)):
        p = leaf(rt, name, func, f"secrecy rate {name}")
        p.add_argument("channel")
        p.add_argument("beamforming")
        p.add_argument("--noise", type=float, default=1.0)
    rt.choices["eval"].add_argument("--power", type=float, required=True)
    sw = rt.choices["sweep"]
    sw.add_argument("--powers", help="comma-separated power list")
    sw.add_argument("--start-exp", type=int, default=3)
    sw.add_argument("--stop-exp", type=int, default=12)
    sw.add_argument("--step-exp", type=int, default=3)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (RepairAlignError, ValueError, IndexError, KeyError, OSError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
