"""Command-line front end: parameter ingestion, unit conversion, boundary
sweeps, solver-vs-oracle verification, and CSV/JSON emission of
plot-ready region data.

Subcommands
-----------
region  sweep a scheme's boundary over a linear grid of near-user rates
        and write one record per target rate (infeasible targets are
        flagged, never dropped)
verify  cross-check the scheme's solver against the independent grid
        oracle on a coarse rate grid (for the rate-dependent power model,
        the suboptimal search against the exhaustive one)
hull    upper concave envelope (time-sharing hull) of a region file

Configuration comes from a JSON file and/or flags; flags override the
file. Rates are bits/s/Hz internally; the Mbps columns apply the
configured bandwidth. Exit codes: 0 ok, 1 verification mismatch,
2 usage/parse error, 3 scheme globally infeasible.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, fields, replace
from typing import Optional

import numpy as np

from .model import (
    Allocation,
    ConstantPower,
    DynamicPower,
    InfeasibleTargetRate,
    PowerModel,
    Scheme,
    SystemParams,
    shannon_rate,
)
from . import solver_constant as sc
from .solver_constant import BoundaryResult, SolveStatus
from .solver_dynamic import GridSpec, exhaustive_search, suboptimal_search
from .oracle import brute_force_p0, tdma_baseline, upper_hull_indices

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_USAGE = 2
EXIT_SCHEME_INFEASIBLE = 3

CSV_COLUMNS = (
    "r1_bps_hz",
    "r2_bps_hz",
    "r1_mbps",
    "r2_mbps",
    "t",
    "rho",
    "p2_1_w",
    "p1_2_w",
    "p2_2_w",
    "feasible",
    "binding_r2_constraint",
)

JSON_POINT_KEYS = ("r1", "r2", "t", "rho", "p2_1", "p1_2", "p2_2", "feasible", "binding")


class ConfigError(ValueError):
    """Bad or inconsistent run configuration (maps to exit code 2)."""


def dbm_to_watts(x_dbm: float) -> float:
    """10^((x - 30) / 10); exact in 64-bit arithmetic."""
    return 10.0 ** ((x_dbm - 30.0) / 10.0)


@dataclass
class RunConfig:
    """Raw run parameters in user-facing units (mW, dBm, meters).

    Channel gains come either from distances (d1_m, d2_m) through the
    line-of-sight path loss, or explicitly (h1_sq, h2_sq); explicit gains
    override distances when both are given.
    """

    scheme: str = "gen"
    power_model: str = "const"
    pmax_w: float = 40.0
    sigma2_dbm: float = -104.0
    xi: float = 0.5
    psic_mw: float = 80.0
    omega: float = 0.044
    pr_mw: float = 30.0
    d1_m: Optional[float] = None
    d2_m: Optional[float] = None
    h1_sq: Optional[float] = None
    h2_sq: Optional[float] = None
    bandwidth_hz: float = 1e7
    points: int = 200
    dt: float = 1e-3
    drho: float = 1e-3
    dp_db: float = 0.1
    eps: float = 1e-9
    algo: str = "exhaustive"  # region solver under the dynamic model


@dataclass(frozen=True)
class ResolvedRun:
    """RunConfig converted to SI units and solver objects."""

    scheme: Scheme
    params: SystemParams
    model: PowerModel
    grid: GridSpec
    bandwidth_hz: float
    points: int
    eps: float
    algo: str


def load_config(path: Optional[str], overrides: dict) -> RunConfig:
    """Merge the JSON config file (if any) with CLI overrides."""
    cfg = RunConfig()
    known = {f.name for f in fields(RunConfig)}
    if path is not None:
        try:
            with open(path) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"config file {path} must hold a JSON object")
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg = replace(cfg, **data)
    cleaned = {k: v for k, v in overrides.items() if v is not None}
    unknown = set(cleaned) - known
    if unknown:
        raise ConfigError(f"unknown config overrides: {sorted(unknown)}")
    return replace(cfg, **cleaned)


def resolve(cfg: RunConfig) -> ResolvedRun:
    """Validate a RunConfig and convert it to SI-unit solver objects."""
    try:
        scheme = Scheme(cfg.scheme)
    except ValueError as exc:
        raise ConfigError(f"unknown scheme {cfg.scheme!r}") from exc
    if cfg.power_model not in ("const", "dyn"):
        raise ConfigError(f"power_model must be 'const' or 'dyn', got {cfg.power_model!r}")
    if cfg.algo not in ("exhaustive", "subopt"):
        raise ConfigError(f"algo must be 'exhaustive' or 'subopt', got {cfg.algo!r}")
    if cfg.points < 2:
        raise ConfigError(f"points must be at least 2, got {cfg.points}")
    for name in ("pmax_w", "xi", "bandwidth_hz", "dt", "drho", "dp_db", "eps"):
        if getattr(cfg, name) <= 0.0:
            raise ConfigError(f"{name} must be positive, got {getattr(cfg, name)}")

    if cfg.h1_sq is not None and cfg.h2_sq is not None:
        gains = (cfg.h1_sq, cfg.h2_sq)
    elif cfg.d1_m is not None and cfg.d2_m is not None:
        from .model import pathloss_gain

        if cfg.d1_m <= 0 or cfg.d2_m <= 0:
            raise ConfigError("distances must be positive")
        gains = (pathloss_gain(cfg.d1_m), pathloss_gain(cfg.d2_m))
    else:
        raise ConfigError("provide d1_m and d2_m, or h1_sq and h2_sq")

    try:
        params = SystemParams(
            h1_sq=gains[0],
            h2_sq=gains[1],
            sigma2=dbm_to_watts(cfg.sigma2_dbm),
            p_max=cfg.pmax_w,
            xi=cfg.xi,
        )
        if cfg.power_model == "const":
            model: PowerModel = ConstantPower(cfg.psic_mw * 1e-3)
        else:
            model = DynamicPower(omega=cfg.omega, p_r=cfg.pr_mw * 1e-3)
        grid = GridSpec(cfg.dt, cfg.drho, cfg.dp_db)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return ResolvedRun(
        scheme, params, model, grid, cfg.bandwidth_hz, cfg.points, cfg.eps, cfg.algo
    )


# ---------------------------------------------------------------------------
# boundary sweep
# ---------------------------------------------------------------------------

def scheme_globally_infeasible(run: ResolvedRun) -> bool:
    """True when the scheme admits no rate pair with r1 > 0 at all: power
    splitting with a near-user channel too weak to fund the decoder."""
    if run.scheme is not Scheme.PS:
        return False
    params = run.params
    if isinstance(run.model, ConstantPower):
        return not sc.ps_feasible(params, run.model.p_sic)
    return params.xi * params.h1_sq * params.p_max <= run.model.p_r


def scheme_r1_max(run: ResolvedRun) -> float:
    """Right edge of the sweep for the configured scheme and model."""
    params = run.params
    if isinstance(run.model, ConstantPower):
        p_sic = run.model.p_sic
        if run.scheme is Scheme.TS:
            return sc.ts_r1_max(params, p_sic)
        if run.scheme is Scheme.PS:
            return sc.ps_r1_max(params, p_sic)
        # the TDMA phase-2 rate cap has the same shape as the generalized one
        return sc.generalized_r1_max(params, p_sic, run.eps)
    # rate-dependent model: sweep up to the channel cap, flag what fails
    return params.ue1_capacity()


def solve_boundary_point(r: float, run: ResolvedRun) -> BoundaryResult:
    """Dispatch one target rate to the configured scheme's solver."""
    params = run.params
    if run.scheme is Scheme.TDMA:
        return tdma_baseline(r, params, run.model, run.grid)
    if isinstance(run.model, ConstantPower):
        p_sic = run.model.p_sic
        if run.scheme is Scheme.TS:
            return sc.ts_boundary(r, params, p_sic)
        if run.scheme is Scheme.PS:
            return sc.ps_boundary(r, params, p_sic)
        return sc.generalized_boundary(r, params, p_sic, run.eps)
    search = exhaustive_search if run.algo == "exhaustive" else suboptimal_search
    return search(r, params, run.model, run.grid, run.scheme)


def classify_binding(params: SystemParams, model: PowerModel, alloc: Allocation) -> str:
    """Which cap pins the far user's sub-slot-2 rate: its own decoder
    ('ue2'), the near user's SIC stage ('sic'), the energy budget
    ('power'), or 'none' when the rate sits strictly below all caps."""
    h1, h2, s2 = params.h1_sq, params.h2_sq, params.sigma2
    one_rho = 1.0 - alloc.rho
    candidates = [
        ("ue2", float(shannon_rate(h2, alloc.p2_2, alloc.p1_2, s2))),
        ("sic", float(shannon_rate(h1 * one_rho, alloc.p2_2, alloc.p1_2, s2))),
    ]
    if isinstance(model, DynamicPower):
        from .model import decode_denominator

        gamma1 = h1 * one_rho * alloc.p1_2 / s2
        gamma2 = h1 * one_rho * alloc.p2_2 / (h1 * one_rho * alloc.p1_2 + s2)
        budget = (
            params.xi * h1 * params.p_max * (alloc.t / (1.0 - alloc.t) + alloc.rho)
            - model.p_r
        )
        if alloc.r1_2 > 0.0:
            den1 = decode_denominator(gamma1)
            budget = -math.inf if den1 == 0.0 else budget - model.omega * alloc.r1_2 / den1
        if model.omega > 0.0:
            den2 = decode_denominator(gamma2)
            if den2 > 0.0:
                candidates.append(("power", den2 * budget / model.omega))
            elif budget >= 0.0:
                candidates.append(("power", 0.0))
    tol = 1e-9 * (1.0 + abs(alloc.r2_2))
    for name, cap in candidates:
        if abs(alloc.r2_2 - cap) <= tol:
            return name
    return "none"


def _record(r: float, res: BoundaryResult, run: ResolvedRun) -> dict:
    if not res.is_optimal or res.alloc is None:
        return {
            "r1": r, "r2": None, "t": None, "rho": None,
            "p2_1": None, "p1_2": None, "p2_2": None,
            "feasible": False, "binding": "none",
        }
    a = res.alloc
    return {
        "r1": r, "r2": res.r2_star, "t": a.t, "rho": a.rho,
        "p2_1": a.p2_1, "p1_2": a.p1_2, "p2_2": a.p2_2,
        "feasible": True, "binding": classify_binding(run.params, run.model, a),
    }


def degenerate_records(run: ResolvedRun) -> list[dict]:
    """The r1 = 0 segment written when a scheme is globally infeasible:
    its only boundary point is pure far-user transmission (the near user
    receives nothing and the decoder is off)."""
    params = run.params
    return [{
        "r1": 0.0, "r2": params.ue2_capacity(), "t": 0.0, "rho": 0.0,
        "p2_1": params.p_max, "p1_2": 0.0, "p2_2": params.p_max,
        "feasible": True, "binding": "ue2",
    }]


def region_records(run: ResolvedRun) -> list[dict]:
    r1_max = scheme_r1_max(run)
    targets = np.linspace(0.0, r1_max, run.points)
    return [_record(float(r), solve_boundary_point(float(r), run), run) for r in targets]


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    return repr(float(value))


def records_to_csv(records: list[dict], bandwidth_hz: float) -> str:
    mbps = bandwidth_hz / 1e6
    lines = [",".join(CSV_COLUMNS)]
    for rec in records:
        r2 = rec["r2"]
        row = (
            _fmt(rec["r1"]),
            _fmt(r2),
            _fmt(rec["r1"] * mbps),
            _fmt(None if r2 is None else r2 * mbps),
            _fmt(rec["t"]),
            _fmt(rec["rho"]),
            _fmt(rec["p2_1"]),
            _fmt(rec["p1_2"]),
            _fmt(rec["p2_2"]),
            _fmt(rec["feasible"]),
            rec["binding"],
        )
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def _params_echo(run: ResolvedRun) -> dict:
    if isinstance(run.model, ConstantPower):
        model = {"kind": "const", "p_sic_w": run.model.p_sic}
    else:
        model = {"kind": "dyn", "omega": run.model.omega, "p_r_w": run.model.p_r}
    return {
        "h1_sq": run.params.h1_sq,
        "h2_sq": run.params.h2_sq,
        "sigma2_w": run.params.sigma2,
        "p_max_w": run.params.p_max,
        "xi": run.params.xi,
        "power_model": model,
        "bandwidth_hz": run.bandwidth_hz,
        "grid": {"dt": run.grid.dt, "drho": run.grid.drho, "dp_db": run.grid.dp_db},
        "eps": run.eps,
    }


def records_to_json(records: list[dict], run: ResolvedRun) -> str:
    doc = {
        "scheme": run.scheme.value,
        "params": _params_echo(run),
        "points": [{k: rec[k] for k in JSON_POINT_KEYS} for rec in records],
    }
    return json.dumps(doc, indent=2) + "\n"


def _write(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------

def grid_rate_allowance(params: SystemParams, grid: GridSpec) -> float:
    """Worst-case objective loss of a grid optimum against the continuum:
    rate-scale sensitivity times the t and rho steps plus the dB-step
    rate quantum."""
    c1 = params.ue1_capacity()
    return c1 * (grid.dt + grid.drho) + grid.dp_db * math.log2(10.0) / 10.0


def verify_report(
    run: ResolvedRun,
    tol: float,
    n_points: int = 10,
    oracle_run: Optional[ResolvedRun] = None,
) -> tuple[bool, list[str]]:
    """Compare the scheme's solver with the independent oracle on a
    coarse rate grid; returns (all_ok, per-point report lines).

    ``oracle_run`` substitutes a different configuration on the oracle
    side (fault-injection hook for tests); it defaults to ``run``.
    """
    if oracle_run is None:
        oracle_run = run
    dynamic = isinstance(run.model, DynamicPower)
    allowance = grid_rate_allowance(run.params, run.grid)
    if not dynamic:
        # the closed-form/convex solver is exact; only the oracle sits on a grid
        r1_hi = 0.9 * scheme_r1_max(run)
    else:
        r1_hi = 0.9 * run.params.ue1_capacity()
    lines = []
    all_ok = True
    for r in np.linspace(0.0, r1_hi, n_points):
        r = float(r)
        res = solve_boundary_point(r, run)
        if dynamic:
            oracle_val, oracle_feasible = _dyn_oracle_value(r, oracle_run)
        else:
            oracle_val, oracle_feasible = _const_oracle_value(r, oracle_run)
        if res.is_optimal != oracle_feasible:
            all_ok = False
            lines.append(
                f"r1={r:.6f} MISMATCH solver_feasible={res.is_optimal} "
                f"oracle_feasible={oracle_feasible}"
            )
            continue
        if not res.is_optimal:
            lines.append(f"r1={r:.6f} both infeasible ok")
            continue
        diff = abs(res.r2_star - oracle_val)
        ok = diff <= tol + allowance
        all_ok &= ok
        lines.append(
            f"r1={r:.6f} solver={res.r2_star:.9f} oracle={oracle_val:.9f} "
            f"diff={diff:.3e} {'ok' if ok else 'MISMATCH'}"
        )
    return all_ok, lines


def _const_oracle_value(r: float, run: ResolvedRun) -> tuple[float, bool]:
    try:
        result = brute_force_p0(r, run.params, run.model, run.grid, run.scheme)
    except InfeasibleTargetRate:
        return math.nan, False
    return result.r2_best, True


def _dyn_oracle_value(r: float, run: ResolvedRun) -> tuple[float, bool]:
    # the exhaustive search plays the oracle to the suboptimal algorithm
    res = exhaustive_search(r, run.params, run.model, run.grid, run.scheme)
    return res.r2_star, res.is_optimal


# ---------------------------------------------------------------------------
# hull I/O
# ---------------------------------------------------------------------------

def _parse_region_text(text: str):
    """Parse a region file produced by cmd_region; returns
    (records, format, doc) with doc the JSON envelope when applicable."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        doc = json.loads(text)
        if "points" not in doc or not isinstance(doc["points"], list):
            raise ConfigError("JSON region file lacks a 'points' array")
        records = []
        for pt in doc["points"]:
            missing = [k for k in JSON_POINT_KEYS if k not in pt]
            if missing:
                raise ConfigError(f"region point missing keys: {missing}")
            records.append({k: pt[k] for k in JSON_POINT_KEYS})
        return records, "json", doc
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].split(",") != list(CSV_COLUMNS):
        raise ConfigError("CSV region file must start with the region header row")
    records = []
    for ln in lines[1:]:
        cells = ln.split(",")
        if len(cells) != len(CSV_COLUMNS):
            raise ConfigError(f"malformed CSV row: {ln!r}")
        row = dict(zip(CSV_COLUMNS, cells))
        feas = row["feasible"] == "true"
        rec = {
            "r1": float(row["r1_bps_hz"]),
            "r2": float(row["r2_bps_hz"]) if row["r2_bps_hz"] else None,
            "feasible": feas,
            "binding": row["binding_r2_constraint"],
        }
        for key, col in (
            ("t", "t"), ("rho", "rho"),
            ("p2_1", "p2_1_w"), ("p1_2", "p1_2_w"), ("p2_2", "p2_2_w"),
        ):
            rec[key] = float(row[col]) if row[col] else None
        records.append(rec)
    return records, "csv", None


def hull_records(records: list[dict]) -> list[dict]:
    """Upper concave envelope over the feasible records, anchored at the
    axes; preserves every field of the surviving records."""
    feas = sorted(
        (r for r in records if r["feasible"] and r["r2"] is not None),
        key=lambda r: r["r1"],
    )
    if not feas:
        return []
    if feas[0]["r1"] > 0.0:
        feas.insert(0, {**feas[0], "r1": 0.0})
    keep = upper_hull_indices([r["r1"] for r in feas], [r["r2"] for r in feas])
    hull = [feas[i] for i in keep]
    if hull[-1]["r2"] > 0.0:
        hull.append({**hull[-1], "r2": 0.0})
    return hull


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

_OVERRIDE_FLAGS = (
    ("scheme", str), ("power_model", str), ("pmax_w", float), ("sigma2_dbm", float),
    ("xi", float), ("psic_mw", float), ("omega", float), ("pr_mw", float),
    ("d1_m", float), ("d2_m", float), ("h1_sq", float), ("h2_sq", float),
    ("bandwidth_hz", float), ("points", int), ("dt", float), ("drho", float),
    ("dp_db", float), ("eps", float), ("algo", str),
)


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="FILE", help="JSON config file")
    parser.add_argument("--scheme", choices=[s.value for s in Scheme])
    parser.add_argument("--model", dest="power_model", choices=["const", "dyn"])
    for name, typ in _OVERRIDE_FLAGS:
        if name in ("scheme", "power_model"):
            continue
        parser.add_argument(f"--{name.replace('_', '-')}", type=typ, dest=name)


def _config_from_args(args) -> RunConfig:
    overrides = {name: getattr(args, name, None) for name, _ in _OVERRIDE_FLAGS}
    return load_config(args.config, overrides)


def cmd_region(args) -> int:
    run = resolve(_config_from_args(args))
    if scheme_globally_infeasible(run):
        records = degenerate_records(run)
        exit_code = EXIT_SCHEME_INFEASIBLE
    else:
        records = region_records(run)
        exit_code = EXIT_OK
    if args.format == "json":
        text = records_to_json(records, run)
    else:
        text = records_to_csv(records, run.bandwidth_hz)
    _write(text, args.out)
    return exit_code


def cmd_verify(args) -> int:
    run = resolve(_config_from_args(args))
    if scheme_globally_infeasible(run):
        sys.stderr.write("scheme is globally infeasible; nothing to verify\n")
        return EXIT_SCHEME_INFEASIBLE
    ok, lines = verify_report(run, args.tol)
    for line in lines:
        print(line)
    print("verify: PASS" if ok else "verify: FAIL")
    return EXIT_OK if ok else EXIT_MISMATCH


def cmd_hull(args) -> int:
    try:
        with open(args.infile) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {args.infile}: {exc}") from exc
    try:
        records, fmt, doc = _parse_region_text(text)
    except (ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"malformed region file: {exc}") from exc
    hull = hull_records(records)
    if fmt == "json":
        doc["points"] = [{k: rec[k] for k in JSON_POINT_KEYS} for rec in hull]
        text_out = json.dumps(doc, indent=2) + "\n"
    else:
        bw = args.bandwidth_hz if args.bandwidth_hz is not None else 1e7
        text_out = records_to_csv(hull, bw)
    _write(text_out, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wpnoma",
        description="Achievable rate regions of a wirelessly powered two-user NOMA link",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_region = sub.add_parser("region", help="sweep one scheme's rate-region boundary")
    _add_config_flags(p_region)
    p_region.add_argument("--out", metavar="FILE", help="output path (default stdout)")
    p_region.add_argument("--format", choices=["csv", "json"], default="csv")
    p_region.set_defaults(func=cmd_region)

    p_verify = sub.add_parser("verify", help="check the solver against the grid oracle")
    _add_config_flags(p_verify)
    p_verify.add_argument("--tol", type=float, default=1e-6,
                          help="extra tolerance on top of the grid allowance")
    p_verify.set_defaults(func=cmd_verify)

    p_hull = sub.add_parser("hull", help="time-sharing hull of a region file")
    p_hull.add_argument("--in", dest="infile", required=True, metavar="FILE")
    p_hull.add_argument("--out", metavar="FILE", help="output path (default stdout)")
    p_hull.add_argument("--bandwidth-hz", type=float, dest="bandwidth_hz",
                        help="bandwidth for the Mbps columns of CSV output")
    p_hull.set_defaults(func=cmd_hull)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
