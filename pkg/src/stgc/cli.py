"""Command-line surface: simulation corpora, causality reports, ROI
aggregation, and test-retest scoring.

CSV formats: pair files carry a ``t,x,y`` header; ROI files carry
``t,<ROI>:<voxel>,...`` with the ROI encoded in each column name.  Reports
are JSON with floats rendered at 17 significant digits so they round-trip
bit-faithfully.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .core import (
    Direction,
    GcKind,
    InsufficientData,
    InvalidConfig,
    NumericalDivergence,
    StgcError,
    TimeSeriesPair,
    validate_changepoints,
)
from . import causality, dkf, simulate, spatial, stats
from .changepoint import SearchConfig, search_optimal_partition, uniform_partition


class ParseError(StgcError):
    """Malformed input file; the message names the offending line."""


class IncompatibleFlags(StgcError):
    """Mutually exclusive flags supplied together."""


class IoError(StgcError):
    """Filesystem failure while reading or writing artifacts."""


# --------------------------------------------------------------------------
# serialization


def _render(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if not np.isfinite(value):
            return '"%s"' % value
        return format(value, ".17g")
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if value is None:
        return "null"
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, dict):
        items = ", ".join(
            f"{json.dumps(str(k))}: {_render(v)}" for k, v in value.items()
        )
        return "{" + items + "}"
    if isinstance(value, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_render(v) for v in value) + "]"
    raise TypeError(f"cannot serialize {type(value)}")


def dump_report(report: dict, path: str | None) -> None:
    text = _render(report)
    if path is None or path == "-":
        print(text)
    else:
        Path(path).write_text(text + "\n")


def estimate_record(est) -> dict:
    return {
        "value": est.value,
        "kind": est.kind.value,
        "direction": est.direction.value,
        "df": list(est.df),
        "p_value": est.p_value,
    }


# --------------------------------------------------------------------------
# file formats


def read_pair_csv(path: str) -> TimeSeriesPair:
    t, x, y = [], [], []
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise IoError(str(exc)) from exc
    if not lines:
        raise ParseError(f"{path}: empty file")
    header = [c.strip() for c in lines[0].split(",")]
    if header[:3] != ["t", "x", "y"]:
        raise ParseError(f"{path}:1: expected header 't,x,y'")
    for ln, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 3:
            raise ParseError(f"{path}:{ln}: expected 3 fields")
        try:
            t.append(float(parts[0]))
            x.append(float(parts[1]))
            y.append(float(parts[2]))
        except ValueError as exc:
            raise ParseError(f"{path}:{ln}: {exc}") from exc
    if len(t) < 5:
        raise ParseError(f"{path}: fewer than 5 data rows")
    dt = t[1] - t[0] if len(t) > 1 and t[1] > t[0] else 1.0
    return TimeSeriesPair(np.array(x), np.array(y), dt=dt)


def write_pair_csv(path: Path, pair: TimeSeriesPair) -> None:
    rows = ["t,x,y"]
    for i in range(pair.n_samples):
        rows.append(
            f"{format(i * pair.dt, '.17g')},"
            f"{format(pair.x[i], '.17g')},{format(pair.y[i], '.17g')}"
        )
    path.write_text("\n".join(rows) + "\n")


def read_roi_csv(path: str) -> spatial.RoiMatrix:
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise IoError(str(exc)) from exc
    if not lines:
        raise ParseError(f"{path}: empty file")
    header = [c.strip() for c in lines[0].split(",")]
    if header[0] != "t" or len(header) < 2:
        raise ParseError(f"{path}:1: expected header 't,<ROI>:<voxel>,...'")
    rois = []
    for col in header[1:]:
        if ":" not in col:
            raise ParseError(f"{path}:1: column {col!r} lacks 'ROI:voxel'")
        rois.append(col.split(":", 1)[0])
    t_values = []
    data = []
    for ln, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != len(header):
            raise ParseError(f"{path}:{ln}: expected {len(header)} fields")
        try:
            t_values.append(float(parts[0]))
            data.append([float(v) for v in parts[1:]])
        except ValueError as exc:
            raise ParseError(f"{path}:{ln}: {exc}") from exc
    dt = (
        t_values[1] - t_values[0]
        if len(t_values) > 1 and t_values[1] > t_values[0]
        else 1.0
    )
    return spatial.RoiMatrix(np.array(data), tuple(rois), dt=dt)


def load_config(path: str) -> dict[str, str]:
    """Flat key = value config; keys mirror the CLI flag names."""
    out: dict[str, str] = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise IoError(str(exc)) from exc
    for ln, line in enumerate(lines, start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ParseError(f"{path}:{ln}: expected 'key = value'")
        key, value = body.split("=", 1)
        out[key.strip().replace("-", "_")] = value.strip()
    return out


# --------------------------------------------------------------------------
# subcommands


def _bold_config(seed: int, overrides: dict[str, str]) -> simulate.BoldSimConfig:
    kwargs: dict = {"seed": seed}
    numeric = {
        "lfp_steps": int,
        "flip_step": int,
        "neuronal_shift_steps": int,
        "lfp_dt": float,
        "a11": float,
        "a22": float,
        "a21_magnitude": float,
        "noise_fraction_total": float,
    }
    for key, cast in numeric.items():
        if key in overrides:
            kwargs[key] = cast(overrides[key])
    if "opposite_hrf_delay" in overrides:
        base = simulate.BoldSimConfig(**kwargs)
        return simulate.bold_config_with_opposite_delay(
            base, float(overrides["opposite_hrf_delay"])
        )
    return simulate.BoldSimConfig(**kwargs)


def _simulate_replicate(
    subtype: str, rep: int, seed: int, overrides: dict[str, str], out: str
) -> dict:
    out_dir = Path(out)
    rng = stats.seeded_rng(seed, stream=9)
    record: dict = {"seed": seed}
    if subtype == "continuous":
        u1 = float(overrides.get("u1", rng.uniform(0.0, 1.0)))
        u2 = float(overrides.get("u2", rng.uniform(0.0, 1.0)))
        pair = simulate.simulate_continuous(seed, u1, u2)
        record.update(u1=u1, u2=u2, file=f"rep_{rep:03d}.csv")
        write_pair_csv(out_dir / record["file"], pair)
    elif subtype == "stepwise":
        u1 = float(overrides.get("u1", rng.uniform(0.5, 1.5)))
        pair, true_cps = simulate.simulate_stepwise(seed, u1)
        record.update(
            u1=u1,
            file=f"rep_{rep:03d}.csv",
            true_changepoints=list(true_cps.points),
            true_direction=Direction.X_TO_Y.value,
        )
        write_pair_csv(out_dir / record["file"], pair)
    else:  # bold
        cfg = _bold_config(seed, overrides)
        pairs, truth = simulate.simulate_bold(cfg)
        files = {}
        for rate, pair in pairs.items():
            name = f"rep_{rep:03d}_rate{format(rate, 'g')}hz.csv"
            write_pair_csv(out_dir / name, pair)
            files[format(rate, "g")] = name
        record.update(files=files, true_direction=truth.value)
    return record


def _simulate_star(job: tuple) -> dict:
    return _simulate_replicate(*job)


def cmd_simulate(args) -> int:
    overrides = load_config(args.config) if args.config else {}
    out_dir = Path(args.out)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoError(str(exc)) from exc

    jobs = [
        (args.subtype, rep, args.seed + rep, overrides, args.out)
        for rep in range(args.reps)
    ]
    if args.jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            records = list(pool.map(_simulate_star, jobs))
    else:
        records = [_simulate_replicate(*j) for j in jobs]

    manifest: dict = {
        "subtype": args.subtype,
        "seed": args.seed,
        "reps": args.reps,
        "config": dict(overrides),
        "replicates": records,
    }
    dump_report(manifest, str(out_dir / "manifest.json"))
    return 0


def _partition_for(args, T: int):
    chosen = [
        args.windows is not None,
        args.changepoints is not None,
        bool(args.optimal),
    ]
    if sum(chosen) > 1:
        raise IncompatibleFlags(
            "--windows, --changepoints and --optimal are mutually exclusive"
        )
    if args.windows is not None:
        return uniform_partition(T, T // args.windows, l0=4), None
    if args.changepoints is not None:
        points = [int(p) for p in args.changepoints.split(",")]
        return validate_changepoints(points, T, l0=4), None
    if args.optimal:
        return None, SearchConfig()
    return validate_changepoints([1, T + 1], T, l0=min(T, 4)), None


def cmd_gc(args) -> int:
    pair = read_pair_csv(args.input)
    direction = Direction(args.direction)
    report: dict = {
        "input": args.input,
        "method": args.method,
        "direction": direction.value,
        "alpha": args.alpha,
    }
    if args.method == "dkf":
        cfg = dkf.DkfConfig(seed=args.seed)
        est = dkf.dkf_gc(pair, cfg, direction)
        report["partition"] = None
    else:
        s, search_cfg = _partition_for(args, pair.n_steps)
        if s is None:
            best, table = search_optimal_partition(pair, search_cfg)
            s = best.changepoints
            report["search"] = {
                "winner": {
                    "changepoints": list(s.points),
                    "bic": best.bic,
                    "lambda": best.lam,
                    "err": best.err,
                    "agc": best.agc,
                    "cost": best.cost,
                },
                "table": [
                    {
                        "m": row.m,
                        "lambda": row.lam,
                        "bic": row.bic,
                        "cost": row.cost,
                        "changepoints": list(row.changepoints.points),
                    }
                    for row in table
                ],
            }
        kind = {
            "classic": GcKind.CLASSIC,
            "average": GcKind.AVERAGE,
            "cumulative": GcKind.CUMULATIVE,
        }[args.method]
        if kind is GcKind.CLASSIC:
            s = validate_changepoints([1, pair.n_steps + 1], pair.n_steps, l0=4)
        est = causality.gc_for_partition(
            pair, s, direction, kind, seed=args.seed
        )
        report["partition"] = list(s.points)
    report["estimate"] = estimate_record(est)
    report["significant"] = (
        est.p_value is not None and est.p_value < args.alpha
    )
    report["estimates"] = [
        {"label": direction.value, "value": est.value}
    ]
    dump_report(report, args.out)
    return 0


def cmd_stgc(args) -> int:
    data = read_roi_csv(args.input)
    flavor = {
        "classic": GcKind.CLASSIC,
        "average": GcKind.AVERAGE,
        "cumulative": GcKind.CUMULATIVE,
    }[args.flavor]
    T = data.series.shape[0] - 1
    if flavor is GcKind.CLASSIC:
        result = spatial.voxel_level_gc(data, args.roi_a, args.roi_b)
    else:
        changepoints = None
        if args.changepoints:
            points = [int(p) for p in args.changepoints.split(",")]
            changepoints = validate_changepoints(points, T, l0=4)
        elif args.windows:
            changepoints = uniform_partition(T, T // args.windows, l0=4)
        result = spatial.stgc(
            data, args.roi_a, args.roi_b, flavor,
            changepoints=changepoints, seed=args.seed,
        )
    label = f"{args.roi_a}->{args.roi_b}"
    report = {
        "input": args.input,
        "roi_a": args.roi_a,
        "roi_b": args.roi_b,
        "flavor": args.flavor,
        "estimate": estimate_record(result.estimate),
        "n_failed_pairs": result.n_failed,
        "pairs": [
            {
                "voxel_a": p.voxel_a,
                "voxel_b": p.voxel_b,
                "value": p.value,
                "error": p.error,
            }
            for p in result.pairs
        ],
        "estimates": [{"label": label, "value": result.estimate.value}],
    }
    dump_report(report, args.out)
    return 0


def _labeled_values(path: str) -> dict[str, float]:
    try:
        report = json.loads(Path(path).read_text())
    except OSError as exc:
        raise IoError(str(exc)) from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    if "estimates" not in report:
        raise ParseError(f"{path}: report lacks an 'estimates' list")
    return {e["label"]: float(e["value"]) for e in report["estimates"]}


def cmd_reliability(args) -> int:
    v1 = _labeled_values(args.report1)
    v2 = _labeled_values(args.report2)
    r = spatial.reliability(v1, v2)
    report = {
        "report1": args.report1,
        "report2": args.report2,
        "pearson_r": r,
        "n": len(v1),
    }
    dump_report(report, args.out)
    if args.scatter_out:
        rows = ["label,value1,value2"]
        for label in sorted(v1):
            rows.append(
                f"{label},{format(v1[label], '.17g')},"
                f"{format(v2[label], '.17g')}"
            )
        Path(args.scatter_out).write_text("\n".join(rows) + "\n")
    return 0


# --------------------------------------------------------------------------
# entry point


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 on usage errors, not argparse's 2
        self.print_usage(sys.stderr)
        raise SystemExit(1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="stgc", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="generate a synthetic corpus")
    p_sim.add_argument("subtype", choices=["continuous", "stepwise", "bold"])
    p_sim.add_argument("--config", help="flat key=value config file")
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--reps", type=int, default=1)
    p_sim.add_argument("--jobs", type=int, default=1)
    p_sim.add_argument("--out", required=True, help="output directory")
    p_sim.set_defaults(func=cmd_simulate)

    p_gc = sub.add_parser("gc", help="causality report for one pair CSV")
    p_gc.add_argument("input")
    p_gc.add_argument(
        "--method", required=True,
        choices=["classic", "average", "cumulative", "dkf"],
    )
    p_gc.add_argument("--windows", type=int)
    p_gc.add_argument("--changepoints", help="comma-separated points")
    p_gc.add_argument("--optimal", action="store_true")
    p_gc.add_argument(
        "--direction", default=Direction.X_TO_Y.value,
        choices=[d.value for d in Direction],
    )
    p_gc.add_argument("--alpha", type=float, default=0.05)
    p_gc.add_argument("--seed", type=int, default=0)
    p_gc.add_argument("--out", help="report path (default stdout)")
    p_gc.set_defaults(func=cmd_gc)

    p_st = sub.add_parser("stgc", help="ROI-to-ROI causality report")
    p_st.add_argument("input")
    p_st.add_argument("--roi-a", required=True)
    p_st.add_argument("--roi-b", required=True)
    p_st.add_argument(
        "--flavor", default="average",
        choices=["classic", "average", "cumulative"],
    )
    p_st.add_argument("--windows", type=int)
    p_st.add_argument("--changepoints")
    p_st.add_argument("--seed", type=int, default=0)
    p_st.add_argument("--out")
    p_st.set_defaults(func=cmd_stgc)

    p_rel = sub.add_parser("reliability", help="compare two labeled reports")
    p_rel.add_argument("report1")
    p_rel.add_argument("report2")
    p_rel.add_argument("--scatter-out")
    p_rel.add_argument("--out")
    p_rel.set_defaults(func=cmd_reliability)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (NumericalDivergence, InsufficientData) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except IncompatibleFlags as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except StgcError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
