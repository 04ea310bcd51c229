"""Command-line front end: campaigns in, report files out.

Report rows share one fixed schema (COLUMNS) across every subcommand;
fields a check does not compute stay empty ("" in csv, null in
json-lines) and +inf Fisher information is written as the literal "inf".
Row production is deterministic for a given (config, seed): per-trial
seeds are (campaign_seed, trial_index), chunk boundaries are fixed, and
chunks are merged in submission order, so the report bytes do not depend
on the worker count.  Wall-clock runtime goes to stderr only, keeping the
report files byte-stable.

Exit codes: 0 all verdicts clean, 1 at least one FAIL, 2 configuration
or output error (diagnostics on stderr).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields

import numpy as np

from .bessel import BesselEvaluator, check_amos_bound, check_ratio_bound, log_bessel_i
from .dynamics import simulate_hypercube_coupling, simulate_torus_lift
from .harness import DistributionFamily, InequalityReport, run_trials, sample
from .state_spaces import StateSpace, hypercube, torus
from .transport import w1, w2, wc

__all__ = ["COLUMNS", "CampaignConfig", "main", "parse_float_list", "parse_int_list", "run"]

COLUMNS = [
    "trial_id", "space", "n", "family", "H", "I", "W1", "W2", "Wc",
    "applicable", "vacuous", "lhs", "rhs", "margin", "verdict",
]

ENV_OUTPUT_DIR = "HWICHECK_OUTPUT_DIR"

_CAMPAIGN_COMMANDS = ("check-hypercube", "check-torus", "check-flow")
_ALL_COMMANDS = _CAMPAIGN_COMMANDS + ("check-bessel", "transport", "simulate")

# trials per parallel work unit; fixed so output is worker-count independent
_CHUNK = 128

# margin tolerance for the log-space Bessel pipeline
_BESSEL_TOL = 1e-12


def parse_int_list(text: str) -> tuple[int, ...]:
    """Parse "5", "2,4,8", "3..20", or mixtures like "2,4..6,9"."""
    out = []
    if not text.strip():
        raise ValueError("empty size list")
    for token in text.split(","):
        token = token.strip()
        if ".." in token:
            lo_s, hi_s = token.split("..", 1)
            lo, hi = int(lo_s), int(hi_s)
            if lo > hi:
                raise ValueError(f"descending range {token!r}")
            out.extend(range(lo, hi + 1))
        else:
            out.append(int(token))
    return tuple(out)


def parse_float_list(text: str) -> tuple[float, ...]:
    if not text.strip():
        raise ValueError("empty value list")
    return tuple(float(token) for token in text.split(","))


def parse_family(text: str) -> DistributionFamily:
    """Parse "dirichlet:1.0", "sparse-support:2", "product-bernoulli:0.3,0.3",
    "point-mass", "semigroup-pushforward:0.5"."""
    kind, _, params = text.partition(":")
    kind = kind.strip()
    if kind == "pushforward":
        kind = "semigroup-pushforward"
    if kind == "dirichlet":
        return DistributionFamily(kind=kind, seed=0, alpha=float(params or 1.0))
    if kind == "product-bernoulli":
        p = tuple(float(v) for v in params.split(",")) if params else None
        return DistributionFamily(kind=kind, seed=0, p=p)
    if kind == "sparse-support":
        if not params:
            raise ValueError("sparse-support needs a support size, e.g. sparse-support:2")
        return DistributionFamily(kind=kind, seed=0, k=int(params))
    if kind == "point-mass":
        return DistributionFamily(kind=kind, seed=0)
    if kind == "semigroup-pushforward":
        return DistributionFamily(kind=kind, seed=0, t=float(params or 0.5))
    raise ValueError(f"unknown family kind {kind!r}")


@dataclass(frozen=True)
class CampaignConfig:
    """Everything a run needs; round-trips through to_dict/from_dict."""

    command: str = ""
    n: tuple = ()
    family: tuple = ("dirichlet:1.0",)
    trials: int = 100
    seed: int = 0
    t: tuple = ()
    output: str | None = None
    format: str = "csv"
    tolerance: float = 1e-9
    workers: int = 1
    n_max: int = 50
    space: str = "hypercube"
    samples: int = 100000
    kind: str = "coupling"
    x0: int | None = None
    y0: int | None = None

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            out[f.name] = list(v) if isinstance(v, tuple) else v
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "CampaignConfig":
        known = {f.name for f in fields(cls)}
        kwargs = {}
        for key, value in data.items():
            if key not in known:
                raise ValueError(f"config: unknown field {key!r}")
            if isinstance(value, list):
                value = tuple(value)
            kwargs[key] = value
        return cls(**kwargs)


def _space_kind_for(cfg: CampaignConfig) -> str:
    if cfg.command == "check-hypercube":
        return "hypercube"
    if cfg.command == "check-torus":
        return "torus"
    if cfg.command == "simulate":
        return "hypercube"
    return cfg.space


def _make_space(kind: str, n: int) -> StateSpace:
    return hypercube(n) if kind == "hypercube" else torus(n)


_SIZE_RANGES = {"hypercube": (1, 20), "torus": (2, 4096)}


def validate(cfg: CampaignConfig) -> list[str]:
    """Collect configuration errors; each message names the offending field."""
    errors = []
    if cfg.command not in _ALL_COMMANDS:
        errors.append(f"command must be one of {_ALL_COMMANDS}, got {cfg.command!r}")
        return errors
    needs_n = cfg.command in _CAMPAIGN_COMMANDS or cfg.command == "transport" or (
        cfg.command == "simulate" and cfg.kind == "coupling"
    )
    kind = _space_kind_for(cfg)
    if kind not in _SIZE_RANGES:
        errors.append(f"--space must be hypercube or torus, got {cfg.space!r}")
        kind = "hypercube"
    if needs_n:
        if not cfg.n:
            errors.append(f"--n is required for {cfg.command}")
        lo, hi = _SIZE_RANGES[kind]
        for v in cfg.n:
            if not lo <= int(v) <= hi:
                errors.append(f"--n value {v} outside {kind} range [{lo}, {hi}]")
    if cfg.command in _CAMPAIGN_COMMANDS or cfg.command == "transport":
        if int(cfg.trials) < 1:
            errors.append(f"--trials must be >= 1, got {cfg.trials}")
    for text in cfg.family:
        try:
            parse_family(text)
        except (ValueError, TypeError) as exc:
            errors.append(f"--family {text!r}: {exc}")
    if cfg.format not in ("csv", "jsonl"):
        errors.append(f"--format must be csv or jsonl, got {cfg.format!r}")
    if not float(cfg.tolerance) > 0.0:
        errors.append(f"--tolerance must be > 0, got {cfg.tolerance}")
    if int(cfg.workers) < 1:
        errors.append(f"--workers must be >= 1, got {cfg.workers}")
    if cfg.command in ("check-flow", "check-bessel", "simulate"):
        if not cfg.t:
            errors.append(f"--t is required for {cfg.command}")
        if any(not float(v) > 0.0 for v in cfg.t):
            errors.append(f"--t values must be positive, got {list(cfg.t)}")
    if cfg.command == "check-bessel" and int(cfg.n_max) < 0:
        errors.append(f"--n-max must be >= 0, got {cfg.n_max}")
    if cfg.command == "simulate":
        if cfg.kind not in ("coupling", "zwalk"):
            errors.append(f"--kind must be coupling or zwalk, got {cfg.kind!r}")
        if int(cfg.samples) < 1:
            errors.append(f"--samples must be >= 1, got {cfg.samples}")
        if cfg.kind == "coupling" and cfg.n:
            size = 2 ** int(cfg.n[0])
            for name, v in (("--x0", cfg.x0), ("--y0", cfg.y0)):
                if v is not None and not 0 <= int(v) < size:
                    errors.append(f"{name} value {v} outside [0, {size})")
    return errors


def _report_row(rep: InequalityReport) -> dict:
    return {
        "trial_id": rep.trial_id, "space": rep.space, "n": rep.n,
        "family": rep.family, "H": rep.H, "I": rep.I, "W1": rep.W1,
        "W2": rep.W2, "Wc": rep.Wc, "applicable": rep.applicable,
        "vacuous": rep.vacuous, "lhs": rep.lhs, "rhs": rep.rhs,
        "margin": rep.margin, "verdict": rep.verdict,
    }


def _row(trial_id, space, n, family, *, lhs, rhs, margin, verdict,
         H=None, I=None, W1=None, W2=None, Wc=None,
         applicable=True, vacuous=False) -> dict:
    return {
        "trial_id": trial_id, "space": space, "n": n, "family": family,
        "H": H, "I": I, "W1": W1, "W2": W2, "Wc": Wc,
        "applicable": applicable, "vacuous": vacuous,
        "lhs": lhs, "rhs": rhs, "margin": margin, "verdict": verdict,
    }


def _run_chunk(payload) -> list[dict]:
    check, space_kind, n, family_text, t_grid, seed, start, count, tol = payload
    space = _make_space(space_kind, n)
    family = parse_family(family_text)
    reports = run_trials(
        check, space, family, count, campaign_seed=seed,
        t_grid=list(t_grid) or None, start_trial_id=start, fail_fast=False,
    )
    return [_report_row(r) for r in reports]


def _campaign_rows(cfg: CampaignConfig) -> list[dict]:
    check = {
        "check-hypercube": "hypercube-hwi",
        "check-torus": "torus-hwi",
        "check-flow": "flow",
    }[cfg.command]
    kind = _space_kind_for(cfg)
    t_grid = tuple(float(v) for v in cfg.t) if check == "flow" else ()
    payloads = []
    tid = 0
    for n in cfg.n:
        for family_text in cfg.family:
            for chunk_start in range(0, int(cfg.trials), _CHUNK):
                count = min(_CHUNK, int(cfg.trials) - chunk_start)
                payloads.append((
                    check, kind, int(n), family_text, t_grid,
                    int(cfg.seed), tid + chunk_start, count, float(cfg.tolerance),
                ))
            tid += int(cfg.trials)
    if int(cfg.workers) == 1:
        chunks = map(_run_chunk, payloads)
    else:
        with ProcessPoolExecutor(max_workers=int(cfg.workers)) as pool:
            chunks = list(pool.map(_run_chunk, payloads))
    return [row for chunk in chunks for row in chunk]


def _bessel_rows(cfg: CampaignConfig) -> list[dict]:
    rows = []
    tid = 0
    n_max = int(cfg.n_max)
    for t in cfg.t:
        t = float(t)
        ev = BesselEvaluator(max_order=n_max + 1, t=t)
        for n in range(n_max + 1):
            for d in range(2 * n + 1):
                margin = check_ratio_bound(n, d, t, evaluator=ev)
                lhs = (1 + d) * (d - 2 * n) / (2.0 * t)
                verdict = "pass" if margin >= -_BESSEL_TOL else "FAIL"
                rows.append(_row(
                    tid, "bessel", n, f"ratio(d={d};t={t:g})",
                    lhs=lhs, rhs=lhs + margin, margin=margin, verdict=verdict,
                ))
                tid += 1
        for n in range(n_max + 1):
            margin = check_amos_bound(n, t, evaluator=ev)
            lhs = -math.asinh((n + 1) / t)
            verdict = "pass" if margin >= -_BESSEL_TOL else "FAIL"
            rows.append(_row(
                tid, "bessel", n, f"amos(t={t:g})",
                lhs=lhs, rhs=lhs + margin, margin=margin, verdict=verdict,
            ))
            tid += 1
    return rows


def _transport_rows(cfg: CampaignConfig) -> list[dict]:
    rows = []
    tid = 0
    kind = _space_kind_for(cfg)
    for n in cfg.n:
        space = _make_space(kind, int(n))
        diam = space.diameter
        for _ in range(int(cfg.trials)):
            fam = DistributionFamily(kind="dirichlet", seed=(int(cfg.seed), tid, 0))
            nu = sample(fam, space)
            nv = sample(
                DistributionFamily(kind="dirichlet", seed=(int(cfg.seed), tid, 1)),
                space,
            )
            w1v = float(w1(nu, nv))
            w2v = float(w2(nu, nv))
            wcv = float(wc(nu, nv))
            lower = max(w1v, w2v * w2v)
            upper = min(2.0 * w2v * w2v, (diam + 1) * w1v)
            wc2 = wcv * wcv
            margin = min(wc2 - lower, upper - wc2)
            verdict = "pass" if margin >= -float(cfg.tolerance) else "FAIL"
            rows.append(_row(
                tid, space.kind, space.n, "dirichlet(1)xdirichlet(1)",
                W1=w1v, W2=w2v, Wc=wcv,
                lhs=lower, rhs=upper, margin=margin, verdict=verdict,
            ))
            tid += 1
    return rows


def _simulate_rows(cfg: CampaignConfig) -> list[dict]:
    rows = []
    tid = 0
    if cfg.kind == "coupling":
        space = hypercube(int(cfg.n[0]))
        x0 = int(cfg.x0) if cfg.x0 is not None else 0
        y0 = int(cfg.y0) if cfg.y0 is not None else space.size - 1
        for t in cfg.t:
            t = float(t)
            stats = simulate_hypercube_coupling(
                space, x0, y0, t, int(cfg.samples), int(cfg.seed)
            )
            p = 1.0 - math.exp(-2.0 * t)
            sigma = math.sqrt(max(p * (1.0 - p), 0.0) / int(cfg.samples))
            for i in range(space.n):
                if ((x0 >> i) & 1) == ((y0 >> i) & 1):
                    continue
                freq = float(stats.agree_frequency[i])
                margin = 4.0 * sigma - abs(freq - p)
                rows.append(_row(
                    tid, "hypercube", space.n,
                    f"coupling(x0={x0};y0={y0};coord={i};t={t:g};samples={cfg.samples})",
                    lhs=freq, rhs=p, margin=margin,
                    verdict="pass" if margin >= 0.0 else "FAIL",
                ))
                tid += 1
        return rows
    for t in cfg.t:
        t = float(t)
        stats = simulate_torus_lift(0, t, int(cfg.samples), int(cfg.seed))
        n_samp = int(cfg.samples)
        max_z = 0.0
        for value, count in zip(stats.values.tolist(), stats.counts.tolist()):
            p = math.exp(-t + log_bessel_i(abs(value), t))
            if n_samp * p < 25.0:
                continue
            z = (count - n_samp * p) / math.sqrt(n_samp * p * (1.0 - p))
            max_z = max(max_z, abs(z))
        margin = 4.0 - max_z
        rows.append(_row(
            tid, "z-walk", 0, f"zwalk(t={t:g};samples={cfg.samples})",
            lhs=max_z, rhs=4.0, margin=margin,
            verdict="pass" if margin >= 0.0 else "FAIL",
        ))
        tid += 1
    return rows


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    return str(value)


def _json_cell(value):
    if isinstance(value, float) and math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return value


def _summarize(rows: list[dict]) -> dict:
    counts = {"pass": 0, "vacuous-pass": 0, "not-applicable": 0, "FAIL": 0}
    finite = []
    for row in rows:
        counts[row["verdict"]] += 1
        if isinstance(row["margin"], float) and math.isfinite(row["margin"]):
            finite.append(row["margin"])
    counts["min_margin"] = min(finite) if finite else math.inf
    return counts


def _write_report(path: str, fmt: str, rows: list[dict], summary: dict) -> None:
    counts_text = (
        f"pass={summary['pass']};vacuous-pass={summary['vacuous-pass']};"
        f"not-applicable={summary['not-applicable']};FAIL={summary['FAIL']}"
    )
    with open(path, "w", newline="") as handle:
        if fmt == "csv":
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(COLUMNS)
            for row in rows:
                writer.writerow([_csv_cell(row[c]) for c in COLUMNS])
            writer.writerow([
                "summary", "", "", counts_text, "", "", "", "", "", "", "", "", "",
                _csv_cell(summary["min_margin"]),
                "FAIL" if summary["FAIL"] else "ok",
            ])
        else:
            for row in rows:
                handle.write(json.dumps(
                    {c: _json_cell(row[c]) for c in COLUMNS}, allow_nan=False
                ))
                handle.write("\n")
            handle.write(json.dumps({
                "record": "summary",
                "pass": summary["pass"],
                "vacuous-pass": summary["vacuous-pass"],
                "not-applicable": summary["not-applicable"],
                "FAIL": summary["FAIL"],
                "min_margin": _json_cell(summary["min_margin"]),
            }, allow_nan=False))
            handle.write("\n")


def run(cfg: CampaignConfig) -> int:
    errors = validate(cfg)
    if errors:
        for message in errors:
            print(f"error: {message}", file=sys.stderr)
        return 2
    started = time.perf_counter()
    try:
        if cfg.command in _CAMPAIGN_COMMANDS:
            rows = _campaign_rows(cfg)
        elif cfg.command == "check-bessel":
            rows = _bessel_rows(cfg)
        elif cfg.command == "transport":
            rows = _transport_rows(cfg)
        else:
            rows = _simulate_rows(cfg)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    summary = _summarize(rows)
    ext = "csv" if cfg.format == "csv" else "jsonl"
    path = cfg.output or os.path.join(
        os.environ.get(ENV_OUTPUT_DIR, "."), f"{cfg.command}.{ext}"
    )
    try:
        _write_report(path, cfg.format, rows, summary)
    except OSError as exc:
        print(f"error: output: cannot write {path}: {exc}", file=sys.stderr)
        return 2
    elapsed = time.perf_counter() - started
    print(
        f"{cfg.command}: {len(rows)} records, pass={summary['pass']}, "
        f"vacuous-pass={summary['vacuous-pass']}, "
        f"not-applicable={summary['not-applicable']}, FAIL={summary['FAIL']}, "
        f"min margin={_csv_cell(summary['min_margin'])}, "
        f"runtime={elapsed:.2f}s, wrote {path}",
        file=sys.stderr,
    )
    return 1 if summary["FAIL"] else 0


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", default=None, help="JSON file with the same fields as the flags")
    sub.add_argument("--output", default=None, help="report file path")
    sub.add_argument("--format", default=None, choices=["csv", "jsonl"])
    sub.add_argument("--seed", type=int, default=None)
    sub.add_argument("--tolerance", type=float, default=None)
    sub.add_argument("--workers", type=int, default=None)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hwicheck",
        description="Certify entropy/transport/Fisher inequalities numerically.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    for name in ("check-hypercube", "check-torus"):
        sub = subs.add_parser(name)
        _add_common(sub)
        sub.add_argument("--n", default=None, help='sizes, e.g. "3..20" or "2,4,8"')
        sub.add_argument("--family", action="append", default=None)
        sub.add_argument("--trials", type=int, default=None)

    sub = subs.add_parser("check-flow")
    _add_common(sub)
    sub.add_argument("--space", default=None, choices=["hypercube", "torus"])
    sub.add_argument("--n", default=None)
    sub.add_argument("--family", action="append", default=None)
    sub.add_argument("--trials", type=int, default=None)
    sub.add_argument("--t", default=None, help='time grid, e.g. "0.25,0.5,1,2"')

    sub = subs.add_parser("check-bessel")
    _add_common(sub)
    sub.add_argument("--n-max", dest="n_max", type=int, default=None)
    sub.add_argument("--t", default=None)

    sub = subs.add_parser("transport")
    _add_common(sub)
    sub.add_argument("--space", default=None, choices=["hypercube", "torus"])
    sub.add_argument("--n", default=None)
    sub.add_argument("--trials", type=int, default=None)

    sub = subs.add_parser("simulate")
    _add_common(sub)
    sub.add_argument("--kind", default=None, choices=["coupling", "zwalk"])
    sub.add_argument("--n", default=None)
    sub.add_argument("--t", default=None)
    sub.add_argument("--samples", type=int, default=None)
    sub.add_argument("--x0", type=int, default=None)
    sub.add_argument("--y0", type=int, default=None)

    return parser


_DEFAULT_T = {
    "check-flow": (0.25, 0.5, 1.0, 2.0),
    "check-bessel": (0.1, 1.0, 10.0, 100.0),
    "simulate": (1.0,),
}


def _build_config(args: argparse.Namespace) -> CampaignConfig:
    data = CampaignConfig(command=args.command).to_dict()
    if args.config is not None:
        with open(args.config) as handle:
            loaded = json.load(handle)
        if not isinstance(loaded, dict):
            raise ValueError("config: expected a JSON object")
        for key, value in loaded.items():
            if key == "command":
                if value != args.command:
                    raise ValueError(
                        f"config: command {value!r} does not match {args.command!r}"
                    )
                continue
            if key not in data:
                raise ValueError(f"config: unknown field {key!r}")
            data[key] = value
    for key, value in vars(args).items():
        if key == "config" or value is None:
            continue
        data[key] = value
    data["command"] = args.command

    if isinstance(data["n"], str):
        try:
            data["n"] = parse_int_list(data["n"])
        except ValueError as exc:
            raise ValueError(f"--n: cannot parse {data['n']!r}: {exc}")
    if isinstance(data["t"], str):
        try:
            data["t"] = parse_float_list(data["t"])
        except ValueError as exc:
            raise ValueError(f"--t: cannot parse {data['t']!r}: {exc}")
    if isinstance(data["family"], str):
        data["family"] = (data["family"],)
    if not data["t"]:
        data["t"] = _DEFAULT_T.get(args.command, ())
    return CampaignConfig.from_dict(data)


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        cfg = _build_config(args)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
