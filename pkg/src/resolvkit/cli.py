"""Command-line surface: single evaluations and convergence sweeps.

Subcommands::

    smooth    ball-minimum entropy of an explicit, i.i.d., or mixed source
    rates     closed-form first- and second-order rates of a mixed source
    code      build a uniform-random-number encoder and check its guarantees
    fv        budget-constrained fixed-to-variable code metrics
    converge  sweep blocklengths: exact entropy vs the closed-form limits

Sources are given by flags (``--probs``, ``--iid``, ``--components``) or a
JSON config file (``--config``); flags win over file values.  Results go to
stdout as text, as JSON with ``--json``, or to a CSV file with ``--out``.
CSV output is deterministic: fixed schema per command, 12 significant
digits, no timing columns.  Exit codes: 0 success, 2 invalid spec, 3
internal invariant violation.  RESOLV_THREADS caps sweep fan-out.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from ._backend import thread_cap
from .code import build_fv_code, build_mixed_vlcode, build_vlcode, fv_rate_iid
from .dist import (
    FiniteDist,
    IIDSpec,
    InvariantError,
    MixedSourceSpec,
    bernoulli,
    entropy,
    mixed_iid,
)
from .rates import first_order_rate, second_order_rate
from .smooth import smooth_entropy_iid, smooth_entropy_mixed_iid, smooth_min_entropy_dist

SCHEMAS = {
    "smooth": ["command", "source", "n", "delta", "h_delta_bits", "h_delta_per_n",
               "j_star", "epsilon"],
    "rates": ["command", "source", "delta", "i_star", "a_istar", "delta_istar",
              "rate_first", "rate_second"],
    "code": ["command", "source", "K", "n", "gamma", "e_len", "e_len_per_n",
             "distance", "distance_bound", "length_bound"],
    "fv": ["command", "source", "K", "n", "delta", "kept_size", "error_probability",
           "e_len", "rate", "reference_rate"],
    "converge": ["command", "source", "n", "delta", "h_delta_per_n", "rate_first",
                 "rate_second", "residual_over_sqrt_n"],
}


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise ValueError(f"expected comma-separated numbers, got {text!r}") from None


def _parse_ints(text: str) -> list[int]:
    values = _parse_floats(text)
    out = [int(v) for v in values]
    if any(o != v for o, v in zip(out, values)):
        raise ValueError(f"expected comma-separated integers, got {text!r}")
    return out


def _parse_components(text: str) -> list[tuple[float, float]]:
    pairs = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        try:
            p, alpha = tok.split(":")
            pairs.append((float(p), float(alpha)))
        except ValueError:
            raise ValueError(f"expected p:alpha pairs, got {text!r}") from None
    if not pairs:
        raise ValueError(f"no components in {text!r}")
    return pairs


def _load_config(args: argparse.Namespace):
    if not getattr(args, "config", None):
        return
    with open(args.config, "r", encoding="utf-8") as handle:
        cfg = json.load(handle)
    scalar = {"iid": float, "n": int, "delta": str, "gamma": float, "K": int,
              "out": str, "grid_step": float}
    for key, caster in scalar.items():
        if key in cfg and getattr(args, key, None) is None and hasattr(args, key):
            setattr(args, key, caster(cfg[key]))
    if "probs" in cfg and getattr(args, "probs", None) is None and hasattr(args, "probs"):
        args.probs = [float(v) for v in cfg["probs"]]
    if "sweep" in cfg and getattr(args, "sweep", None) is None and hasattr(args, "sweep"):
        args.sweep = [int(v) for v in cfg["sweep"]]
    if "components" in cfg and getattr(args, "components", None) is None \
            and hasattr(args, "components"):
        args.components = [(float(c["p"]), float(c["alpha"])) for c in cfg["components"]]
    if "targets" in cfg and getattr(args, "targets", None) is None and hasattr(args, "targets"):
        args.targets = [([float(v) for v in t["probs"]], float(t["alpha"]))
                        for t in cfg["targets"]]


def _source_label(args: argparse.Namespace) -> str:
    if getattr(args, "probs", None) is not None:
        return "probs=" + ",".join(_fmt(float(v)) for v in args.probs)
    if getattr(args, "iid", None) is not None:
        return "iid=" + _fmt(float(args.iid))
    if getattr(args, "components", None) is not None:
        return "mix=" + ",".join(f"{_fmt(float(p))}:{_fmt(float(a))}"
                                 for p, a in args.components)
    if getattr(args, "targets", None) is not None:
        return "targets=" + ";".join(
            ",".join(_fmt(float(v)) for v in probs) + ":" + _fmt(float(a))
            for probs, a in args.targets)
    raise ValueError("no source given: use --probs, --iid, --components, or --config")


def _deltas(args: argparse.Namespace) -> list[float]:
    if args.delta is None:
        raise ValueError("--delta is required")
    return _parse_floats(args.delta) if isinstance(args.delta, str) else [float(args.delta)]


def _single_delta(args: argparse.Namespace) -> float:
    values = _deltas(args)
    if len(values) != 1:
        raise ValueError("this command takes a single --delta value")
    return values[0]


def _mixed_spec(args: argparse.Namespace, n: int) -> MixedSourceSpec:
    return mixed_iid(args.components, n)


# ---------------------------------------------------------------------------
# command implementations: each returns (rows, human lines)
# ---------------------------------------------------------------------------

def cmd_smooth(args):
    source = _source_label(args)
    deltas = _deltas(args)
    rows, lines = [], []
    if args.probs is not None:
        n = args.n or 1
        for delta in deltas:
            res = smooth_min_entropy_dist(FiniteDist(np.array(args.probs)), delta)
            rows.append({"command": "smooth", "source": source, "n": n, "delta": delta,
                         "h_delta_bits": res.h_bits, "h_delta_per_n": res.h_bits / n,
                         "j_star": res.j_star, "epsilon": res.epsilon})
            lines.append(f"delta={_fmt(delta)}: H_delta = {_fmt(res.h_bits)} bits "
                         f"(j* = {res.j_star}, epsilon = {_fmt(res.epsilon)})")
        return rows, lines

    sweep = args.sweep or ([args.n] if args.n else None)
    if sweep is None:
        raise ValueError("i.i.d. and mixed sources need --n or --sweep")

    def per_n(n: int):
        if args.iid is not None:
            return [smooth_entropy_iid(IIDSpec(bernoulli(args.iid), n), d) for d in deltas]
        if args.components is not None:
            return [smooth_entropy_mixed_iid(_mixed_spec(args, n), d) for d in deltas]
        raise ValueError("smooth needs --probs, --iid, or --components")

    with ThreadPoolExecutor(max_workers=thread_cap()) as pool:
        all_values = list(pool.map(per_n, sweep))
    for n, values in zip(sweep, all_values):
        for delta, h_per_n in zip(deltas, values):
            rows.append({"command": "smooth", "source": source, "n": n, "delta": delta,
                         "h_delta_bits": h_per_n * n, "h_delta_per_n": h_per_n,
                         "j_star": None, "epsilon": None})
            lines.append(f"n={n} delta={_fmt(delta)}: H_delta/n = {_fmt(h_per_n)} bits/symbol")
    return rows, lines


def cmd_rates(args):
    source = _source_label(args)
    if args.components is None:
        raise ValueError("rates needs --components (mixed i.i.d. source)")
    delta = _single_delta(args)
    spec = _mixed_spec(args, args.n or 1)
    report = second_order_rate(spec, delta)
    rows = [{"command": "rates", "source": source, "delta": delta,
             "i_star": report.i_star, "a_istar": report.a_istar,
             "delta_istar": report.delta_istar, "rate_first": report.first_order,
             "rate_second": report.second_order}]
    lines = [f"first order = {_fmt(report.first_order)} bits/symbol",
             f"second order = {_fmt(report.second_order)} bits/sqrt(symbol)",
             f"i* = {report.i_star}, A_i* = {_fmt(report.a_istar)}, "
             f"delta_i* = {_fmt(report.delta_istar)}"]
    return rows, lines


def cmd_code(args):
    source = _source_label(args)
    if args.K is None or args.gamma is None:
        raise ValueError("code needs --K and --gamma")
    n = args.n or 1
    if args.targets is not None:
        targets = [FiniteDist(np.array(probs)) for probs, _ in args.targets]
        weights = np.array([a for _, a in args.targets])
        mixed = build_mixed_vlcode(targets, weights, args.K, n, args.gamma)
        worst = max(c.distance_bound for c in mixed.codes)
        len_bound = float(np.dot(weights, [c.length_bound for c in mixed.codes]))
        rows = [{"command": "code", "source": source, "K": args.K, "n": n,
                 "gamma": args.gamma, "e_len": mixed.expected_length,
                 "e_len_per_n": mixed.expected_length / n,
                 "distance": mixed.aggregate_distance, "distance_bound": worst,
                 "length_bound": len_bound}]
        lines = [f"E[L] = {_fmt(mixed.expected_length)} (<= {_fmt(len_bound)})",
                 f"aggregate distance = {_fmt(mixed.aggregate_distance)} (<= {_fmt(worst)})",
                 f"mixture distance = {_fmt(mixed.mixture_distance)}"]
        return rows, lines
    if args.probs is None:
        raise ValueError("code needs --probs or --config targets")
    code = build_vlcode(FiniteDist(np.array(args.probs)), args.K, n, args.gamma)
    rows = [{"command": "code", "source": source, "K": args.K, "n": n,
             "gamma": args.gamma, "e_len": code.expected_length,
             "e_len_per_n": code.expected_length / n, "distance": code.distance,
             "distance_bound": code.distance_bound, "length_bound": code.length_bound}]
    lines = [f"E[L] = {_fmt(code.expected_length)} (<= {_fmt(code.length_bound)})",
             f"distance = {_fmt(code.distance)} (<= {_fmt(code.distance_bound)})"]
    return rows, lines


def cmd_fv(args):
    source = _source_label(args)
    delta = _single_delta(args)
    K = args.K or 2
    if args.iid is not None:
        n = args.n
        if n is None:
            raise ValueError("fv with --iid needs --n")
        report = fv_rate_iid(bernoulli(args.iid), n, delta, K)
        reference = (1.0 - delta) * entropy(bernoulli(args.iid), 2.0)
        row = {"command": "fv", "source": source, "K": K, "n": n, "delta": delta,
               "kept_size": report.kept_classes, "error_probability": report.error_probability,
               "e_len": report.expected_length, "rate": report.rate,
               "reference_rate": reference}
        lines = [f"kept {report.kept_classes} classes, error = {_fmt(report.error_probability)}",
                 f"rate = {_fmt(report.rate)} bits/symbol (reference {_fmt(reference)})"]
        return [row], lines
    if args.probs is None:
        raise ValueError("fv needs --probs or --iid")
    n = args.n or 1
    p = FiniteDist(np.array(args.probs))
    code = build_fv_code(p, K, n, delta)
    reference = (1.0 - delta) * entropy(p, 2.0) / n
    row = {"command": "fv", "source": source, "K": K, "n": n, "delta": delta,
           "kept_size": int(code.kept.size), "error_probability": code.error_probability,
           "e_len": code.expected_length, "rate": code.rate, "reference_rate": reference}
    lines = [f"kept {code.kept.size} sequences, error = {_fmt(code.error_probability)}",
             f"E[len] = {_fmt(code.expected_length)} coin symbols, "
             f"rate = {_fmt(code.rate)} (reference {_fmt(reference)})"]
    return [row], lines


def cmd_converge(args):
    source = _source_label(args)
    delta = _single_delta(args)
    if not args.sweep:
        raise ValueError("converge needs --sweep n1,n2,...")
    if args.iid is None and args.components is None:
        raise ValueError("converge needs --iid or --components")

    def spec_for(n: int) -> MixedSourceSpec:
        if args.iid is not None:
            return MixedSourceSpec((IIDSpec(bernoulli(args.iid), n),), np.array([1.0]))
        return _mixed_spec(args, n)

    ref = spec_for(args.sweep[0])
    rate_first = first_order_rate(ref, delta).first_order
    try:
        rate_second = second_order_rate(ref, delta).second_order
    except ValueError:
        rate_second = None

    def per_n(n: int) -> float:
        return smooth_entropy_mixed_iid(spec_for(n), delta)

    with ThreadPoolExecutor(max_workers=thread_cap()) as pool:
        values = list(pool.map(per_n, args.sweep))
    rows, lines = [], []
    for n, h_per_n in zip(args.sweep, values):
        residual = None
        if rate_second is not None:
            residual = (h_per_n * n - rate_first * n - rate_second * np.sqrt(n)) / np.sqrt(n)
        rows.append({"command": "converge", "source": source, "n": n, "delta": delta,
                     "h_delta_per_n": h_per_n, "rate_first": rate_first,
                     "rate_second": rate_second, "residual_over_sqrt_n": residual})
        lines.append(f"n={n}: H_delta/n = {_fmt(h_per_n)} "
                     f"(limit {_fmt(rate_first)}, residual/sqrt(n) = {_fmt(residual)})")
    return rows, lines


COMMANDS = {
    "smooth": cmd_smooth,
    "rates": cmd_rates,
    "code": cmd_code,
    "fv": cmd_fv,
    "converge": cmd_converge,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="resolv",
        description="Variable-length resolvability toolkit for finite mixed sources.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    specs = {
        "smooth": "ball-minimum entropy of a source",
        "rates": "closed-form first/second-order rates of a mixed i.i.d. source",
        "code": "build a uniform-random-number encoder and verify its guarantees",
        "fv": "fixed-to-variable code under an error budget",
        "converge": "blocklength sweep against the closed-form limits",
    }
    for name, help_text in specs.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--probs", type=_parse_floats, default=None,
                       help="explicit distribution, comma-separated")
        p.add_argument("--iid", type=float, default=None,
                       help="binary i.i.d. source parameter q (symbol 0 probability)")
        p.add_argument("--components", type=_parse_components, default=None,
                       help="mixed binary i.i.d. source as p:alpha pairs")
        p.add_argument("--config", default=None, help="JSON config file; flags win")
        p.add_argument("--n", type=int, default=None, help="blocklength")
        p.add_argument("--delta", default=None,
                       help="distance budget(s); smooth accepts a comma list")
        p.add_argument("--K", type=int, default=None, help="coin alphabet size")
        p.add_argument("--gamma", type=float, default=None, help="length slack parameter")
        p.add_argument("--sweep", type=_parse_ints, default=None,
                       help="comma-separated blocklengths")
        p.add_argument("--out", default=None, help="write rows as CSV to this path")
        p.add_argument("--json", action="store_true", help="machine-readable output")
        if name == "code":
            p.add_argument("--targets", default=None, help=argparse.SUPPRESS)
    return parser


def _write_csv(path: str, command: str, rows) -> None:
    schema = SCHEMAS[command]
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(schema)
        for row in rows:
            writer.writerow([_fmt(row.get(col)) for col in schema])


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "targets"):
        args.targets = None
    started = time.monotonic()
    try:
        _load_config(args)
        rows, lines = COMMANDS[args.command](args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InvariantError as exc:
        print(f"internal invariant violated: {exc}", file=sys.stderr)
        return 3
    wall_ms = (time.monotonic() - started) * 1000.0
    if args.out:
        _write_csv(args.out, args.command, rows)
    if args.json:
        payload = [dict(row, wall_time_ms=wall_ms) for row in rows]
        print(json.dumps(payload[0] if len(payload) == 1 else payload))
    elif not args.out:
        for line in lines:
            print(line)
    return 0


if __name__ == "__main__":
    sys.exit(main())
