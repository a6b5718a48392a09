"""Command line interface.

Subcommands:

* analyze        criticality report, spectral split, limit coefficients
* find-critical  construct the coupling j12 that closes the critical window
* curves         tabulate the inverted self-consistency curves
* exact-dist     exact magnetization pmf, raw or rescaled into split coordinates
* simulate       Glauber chains, with exact cross-check at small sizes
* converge       finite-size trend table against the limit law
* limit-law      limit-law moments and marginal density/CDF tables

Exit codes: 0 success, 1 usage or input parse failure, 2 model hypothesis
violated, 3 resource or resolution budget exceeded, 4 internal assertion
failure. Table outputs are CSV (or JSON with --format json) with floats
printed at 17 significant digits; every emitted file gets a sidecar
<name>.meta.json recording the full command configuration and the
package version, and reruns of the same command are byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import DomainError, HypothesisViolation, ResourceBudget
from .exact import (SystemSize, exact_pmf, pressure, rescaled_transformed_pmf,
                    summarize)
from .limitlaw import (LimitLaw, density, gaussian_half_width, marginal_cdf_x1,
                       marginal_cdf_x2, marginal_density_x1, marginal_density_x2,
                       moments, quartic_half_width)
from .model import (ModelParams, check_critical_conditions, count_mean_field_solutions,
                    inverted_curves, solve_critical_j12)
from .sampler import ChainConfig, empirical_pmf, run_chains, sample_direct
from .spectral import (hessian_at_origin, limit_coefficients, spectral_data,
                       tilde_coefficients)

DEFAULT_GRID_N = 2001


@dataclass
class RunConfig:
    """Everything a subcommand run depends on, for sidecars and dispatch."""

    command: str
    arguments: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"command": self.command, "arguments": self.arguments,
                "version": __version__}


def _fmt(x) -> str:
    return format(float(x), ".17g")


def _write_sidecar(path: Path, cfg: RunConfig) -> None:
    side = path.with_name(path.name + ".meta.json")
    side.write_text(json.dumps(cfg.to_dict(), indent=2, sort_keys=True) + "\n")


def _write_table(path: Path, header: list[str], columns: list[np.ndarray],
                 cfg: RunConfig, fmt: str) -> None:
    if fmt == "json":
        payload = {name: [float(v) for v in col] for name, col in zip(header, columns)}
        path = path.with_suffix(".json")
        path.write_text(json.dumps(payload, indent=2) + "\n")
    else:
        path = path.with_suffix(".csv")
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for row in zip(*columns):
                writer.writerow([_fmt(v) for v in row])
    _write_sidecar(path, cfg)
    print(f"wrote {path}", file=sys.stderr)


def _write_json(path: Path, obj: dict, cfg: RunConfig) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")
    _write_sidecar(path, cfg)
    print(f"wrote {path}", file=sys.stderr)


def _load_params(path: str) -> ModelParams:
    try:
        with open(path) as fh:
            payload = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ValueError(f"cannot read parameter file {path}: {exc}") from exc
    if not isinstance(payload, dict):
        raise ValueError(f"parameter file {path} must hold a JSON object")
    return ModelParams.from_dict(payload)


def _parse_sizes(raw: str) -> list[SystemSize]:
    """Sizes list: '200,800' (even totals, split equally) or '100:60,50:50'."""
    sizes = []
    for item in raw.split(","):
        item = item.strip()
        if not item:
            continue
        if ":" in item:
            left, right = item.split(":", 1)
            sizes.append(SystemSize(int(left), int(right)))
        else:
            total = int(item)
            if total % 2:
                raise ValueError(
                    f"size {total} is odd; give an explicit split as n1:n2")
            sizes.append(SystemSize(total // 2, total // 2))
    if not sizes:
        raise ValueError("empty size list")
    return sizes


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _config_from(args, command: str, skip=("func",)) -> RunConfig:
    arguments = {k: v for k, v in vars(args).items() if k not in skip}
    return RunConfig(command=command, arguments=arguments)


def _summary_dict(pmf, summ, sz: SystemSize) -> dict:
    out = {"n1": sz.n1, "n2": sz.n2, "n": sz.n, "pressure": pressure(pmf)}
    out.update({k: (None if isinstance(v, float) and math.isnan(v) else v)
                for k, v in summ.to_dict().items()})
    return out


def cmd_analyze(args) -> int:
    p = _load_params(args.params)
    report = check_critical_conditions(p, tol=args.tol)
    payload: dict = {"params": p.to_dict(), "criticality": report.to_dict()}
    if report.j12_nonzero:
        s = spectral_data(p)
        h11, h12, h22 = hessian_at_origin(p)
        co = tilde_coefficients(p, s)
        payload["hessian"] = {"h11": h11, "h12": h12, "h22": h22}
        payload["spectral"] = {
            "lambda_max": s.lambda_max, "lambda_min": s.lambda_min,
            "v_max": list(s.v_max), "v_min": list(s.v_min),
        }
        payload["rotated_coefficients"] = co._asdict()
        payload["solution_count"] = count_mean_field_solutions(p, grid_n=args.grid_n)
        if report.all_pass:
            payload["transformed"] = limit_coefficients(p, s, tol=args.tol).to_dict()
    print(json.dumps(payload, indent=2, sort_keys=True))
    if args.out is not None:
        cfg = _config_from(args, "analyze")
        _write_json(_out_dir(args) / "analyze.json", payload, cfg)
    return 0 if report.all_pass else 2


def cmd_find_critical(args) -> int:
    j12 = solve_critical_j12(args.alpha, args.j11, args.j22, sign=args.sign)
    p = ModelParams(alpha=args.alpha, j11=args.j11, j22=args.j22, j12=j12)
    report = check_critical_conditions(p)
    payload = {"params": p.to_dict(), "criticality": report.to_dict()}
    print(json.dumps(payload, indent=2, sort_keys=True))
    if args.out is not None:
        cfg = _config_from(args, "find-critical")
        _write_json(_out_dir(args) / "params.json", p.to_dict(), cfg)
    return 0 if report.all_pass else 2


def cmd_curves(args) -> int:
    p = _load_params(args.params)
    cfg = _config_from(args, "curves")
    xs = np.linspace(-1.0 + 1e-6, 1.0 - 1e-6, args.grid_n)
    pts = [inverted_curves(p, float(x)) for x in xs]
    out = _out_dir(args)
    _write_table(out / "curves", ["x", "f1", "f2"],
                 [xs, np.array([c.f1 for c in pts]), np.array([c.f2 for c in pts])],
                 cfg, args.format)
    return 0


def _maybe_transformed(p: ModelParams):
    """Limit coefficients when critical, else None (soft failure)."""
    try:
        s = spectral_data(p)
        return s, limit_coefficients(p, s)
    except HypothesisViolation:
        return None, None


def cmd_exact_dist(args) -> int:
    p = _load_params(args.params)
    cfg = _config_from(args, "exact-dist")
    out = _out_dir(args)
    s = spectral_data(p) if args.rescaled else None
    _, tm = _maybe_transformed(p)
    for sz in _parse_sizes(args.sizes):
        pmf = exact_pmf(p, sz, budget=args.budget)
        if args.rescaled:
            points = rescaled_transformed_pmf(pmf, s)
            stem = f"rescaled_{sz.n1}_{sz.n2}"
        else:
            kk1, kk2 = np.meshgrid(pmf.k1, pmf.k2, indexing="ij")
            points = None
            stem = f"pmf_{sz.n1}_{sz.n2}"
        if points is None:
            cols = [kk1.ravel(), kk2.ravel(), pmf.probabilities.ravel()]
        else:
            cols = [points.x1, points.x2, points.prob]
        _write_table(out / stem, ["x1", "x2", "probability"], cols, cfg, args.format)

        if args.rescaled:
            summ = summarize(points, tm)
        else:
            summ = summarize(rescaled_transformed_pmf(pmf, spectral_data(p)), tm) \
                if p.j12 != 0.0 else None
        payload = {"params": p.to_dict(), "pressure": pressure(pmf),
                   "n1": sz.n1, "n2": sz.n2}
        if summ is not None:
            payload["rescaled_summary"] = {
                k: (None if isinstance(v, float) and math.isnan(v) else v)
                for k, v in summ.to_dict().items()}
        _write_json(out / f"summary_{sz.n1}_{sz.n2}.json", payload, cfg)
    return 0


def cmd_simulate(args) -> int:
    p = _load_params(args.params)
    cfg_run = _config_from(args, "simulate")
    out = _out_dir(args)
    for sz in _parse_sizes(args.sizes):
        burn = args.burn_in if args.burn_in is not None else 10 * sz.n
        chain_cfg = ChainConfig(seed=args.seed, sweeps=args.sweeps, burn_in=burn,
                                thinning=args.thinning, n_chains=args.chains)
        if args.direct:
            pmf = exact_pmf(p, sz, budget=args.budget)
            batch = sample_direct(pmf, args.sweeps, args.seed)
        else:
            batch = run_chains(p, sz, chain_cfg)
        stem = f"samples_{sz.n1}_{sz.n2}"
        _write_table(out / stem, ["chain", "sweep", "S1", "S2"],
                     [batch.chain_index, batch.sweep_index,
                      batch.draws[:, 0], batch.draws[:, 1]],
                     cfg_run, args.format)

        draws = batch.draws.astype(float)
        payload = {
            "params": p.to_dict(), "n1": sz.n1, "n2": sz.n2,
            "sampler": "direct" if args.direct else "glauber",
            "config": chain_cfg.to_dict(),
            "records": int(batch.draws.shape[0]),
            "mean_s1": float(draws[:, 0].mean()) if draws.size else None,
            "mean_s2": float(draws[:, 1].mean()) if draws.size else None,
            "var_s1": float(draws[:, 0].var()) if draws.size else None,
            "var_s2": float(draws[:, 1].var()) if draws.size else None,
        }
        lattice_points = (sz.n1 + 1) * (sz.n2 + 1)
        if lattice_points <= args.crosscheck_budget and batch.draws.size:
            pmf = exact_pmf(p, sz, budget=args.budget)
            emp = empirical_pmf(batch.draws, sz)
            payload["tv_vs_exact"] = float(0.5 * np.abs(emp - pmf.probabilities).sum())
        _write_json(out / f"summary_{sz.n1}_{sz.n2}.json", payload, cfg_run)
    return 0


def cmd_converge(args) -> int:
    p = _load_params(args.params)
    cfg = _config_from(args, "converge")
    out = _out_dir(args)
    sizes = _parse_sizes(args.sizes)
    s, tm = (None, None) if p.j12 == 0.0 else _maybe_transformed(p)
    if s is None and p.j12 != 0.0:
        s = spectral_data(p)

    rows = []
    for sz in sizes:
        pmf = exact_pmf(p, sz, budget=args.budget)
        if s is None:
            rows.append((sz.n, pressure(pmf), math.nan, math.nan,
                         math.nan, math.nan, math.nan))
            continue
        summ = summarize(rescaled_transformed_pmf(pmf, s), tm)
        rows.append((sz.n, pressure(pmf), summ.var_x1, summ.var_x2,
                     summ.kurtosis_x2, summ.ks_x1, summ.ks_x2))

    header = ["n", "pressure", "var_x1", "var_x2", "kurtosis_x2", "ks_x1", "ks_x2"]
    cols = [np.array([r[i] for r in rows]) for i in range(len(header))]
    _write_table(out / "converge", header, cols, cfg, args.format)

    verdict: dict = {"params": p.to_dict(), "critical": tm is not None,
                     "sizes": [r[0] for r in rows]}
    if len(rows) < 2:
        verdict["trend"] = "insufficient points"
        verdict["pass"] = tm is not None
    elif tm is None:
        verdict["trend"] = "no limit law at these parameters"
        verdict["pass"] = False
    else:
        law_m = moments(LimitLaw.from_exponents(tm.xi1, tm.xi2))
        ks1 = [r[5] for r in rows]
        ks2 = [r[6] for r in rows]
        pres = [r[1] for r in rows]
        largest = rows[-1]
        verdict.update({
            "ks_x1_decreasing": all(b < a for a, b in zip(ks1, ks1[1:])),
            "ks_x2_decreasing": all(b < a for a, b in zip(ks2, ks2[1:])),
            "pressure_decreasing": all(b < a for a, b in zip(pres, pres[1:])),
            "var_x1_target": law_m.var_x1,
            "var_x1_rel_err": abs(largest[2] - law_m.var_x1) / law_m.var_x1,
            "kurtosis_x2_target": law_m.kurtosis_x2,
            "kurtosis_x2_rel_err": abs(largest[4] - law_m.kurtosis_x2) / law_m.kurtosis_x2,
        })
        verdict["pass"] = bool(verdict["ks_x1_decreasing"]
                               and verdict["ks_x2_decreasing"]
                               and verdict["pressure_decreasing"])
    _write_json(out / "verdict.json", verdict, cfg)
    print(json.dumps(verdict, indent=2, sort_keys=True))
    return 0 if verdict["pass"] else 2


def cmd_limit_law(args) -> int:
    if args.params is not None:
        p = _load_params(args.params)
        s = spectral_data(p)
        tm = limit_coefficients(p, s)
        law = LimitLaw.from_exponents(tm.xi1, tm.xi2)
    elif args.xi1 is not None and args.xi2 is not None:
        law = LimitLaw.from_exponents(args.xi1, args.xi2)
    else:
        raise ValueError("give either --params or both --xi1 and --xi2")
    cfg = _config_from(args, "limit-law")
    out = _out_dir(args)

    mom = moments(law)
    payload = {"xi1": law.xi1, "xi2": law.xi2, "log_norm": law.log_norm,
               **mom._asdict()}
    _write_json(out / "moments.json", payload, cfg)
    print(json.dumps(payload, indent=2, sort_keys=True))

    x1 = np.linspace(-gaussian_half_width(law), gaussian_half_width(law), args.table_n)
    x2 = np.linspace(-quartic_half_width(law), quartic_half_width(law), args.table_n)
    _write_table(out / "marginal_x1", ["x", "density", "cdf"],
                 [x1, marginal_density_x1(law, x1), marginal_cdf_x1(law, x1)],
                 cfg, args.format)
    _write_table(out / "marginal_x2", ["x", "density", "cdf"],
                 [x2, marginal_density_x2(law, x2), marginal_cdf_x2(law, x2)],
                 cfg, args.format)
    _write_table(out / "density_diagonal", ["x", "density"],
                 [x2, density(law, x2, x2)], cfg, args.format)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cblab",
        description="Exact and Monte Carlo analysis of the two-group "
                    "mean-field spin model at the uniqueness boundary.")
    parser.add_argument("--version", action="version", version=f"cblab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(sp, out_required=True):
        sp.add_argument("--out", required=out_required, default=None,
                        help="output directory")
        sp.add_argument("--format", choices=("csv", "json"), default="csv",
                        help="table format (default csv)")

    sp = sub.add_parser("analyze", help="criticality and spectral report")
    sp.add_argument("--params", required=True)
    sp.add_argument("--tol", type=float, default=1e-12)
    sp.add_argument("--grid-n", type=int, default=100_000)
    sp.add_argument("--out", default=None, help="output directory")
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("find-critical", help="solve for the critical coupling")
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--j11", type=float, required=True)
    sp.add_argument("--j22", type=float, required=True)
    sp.add_argument("--sign", type=int, choices=(1, -1), default=1)
    sp.add_argument("--out", default=None, help="output directory")
    sp.set_defaults(func=cmd_find_critical)

    sp = sub.add_parser("curves", help="tabulate the inverted curves")
    sp.add_argument("--params", required=True)
    sp.add_argument("--grid-n", type=int, default=DEFAULT_GRID_N)
    add_common(sp)
    sp.set_defaults(func=cmd_curves)

    sp = sub.add_parser("exact-dist", help="exact magnetization distribution")
    sp.add_argument("--params", required=True)
    sp.add_argument("--sizes", required=True,
                    help="comma list of totals (even) or n1:n2 splits")
    sp.add_argument("--rescaled", action="store_true",
                    help="emit the rescaled split-coordinate pushforward")
    sp.add_argument("--budget", type=int, default=100_000_000)
    add_common(sp)
    sp.set_defaults(func=cmd_exact_dist)

    sp = sub.add_parser("simulate", help="Glauber chains or direct sampling")
    sp.add_argument("--params", required=True)
    sp.add_argument("--sizes", required=True)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--sweeps", type=int, required=True)
    sp.add_argument("--burn-in", type=int, default=None,
                    help="burn-in sweeps (default 10 N)")
    sp.add_argument("--thinning", type=int, default=1)
    sp.add_argument("--chains", type=int, default=1)
    sp.add_argument("--direct", action="store_true",
                    help="draw independently from the exact pmf instead")
    sp.add_argument("--budget", type=int, default=100_000_000)
    sp.add_argument("--crosscheck-budget", type=int, default=250_000,
                    help="max lattice size for the exact TV cross-check")
    add_common(sp)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("converge", help="finite-size trends against the limit law")
    sp.add_argument("--params", required=True)
    sp.add_argument("--sizes", required=True)
    sp.add_argument("--budget", type=int, default=100_000_000)
    add_common(sp)
    sp.set_defaults(func=cmd_converge)

    sp = sub.add_parser("limit-law", help="limit-law moments and tables")
    sp.add_argument("--params", default=None)
    sp.add_argument("--xi1", type=float, default=None)
    sp.add_argument("--xi2", type=float, default=None)
    sp.add_argument("--table-n", type=int, default=513)
    add_common(sp)
    sp.set_defaults(func=cmd_limit_law)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    try:
        return args.func(args)
    except (ValueError, OSError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except HypothesisViolation as exc:
        print(f"hypothesis violation: {exc}", file=sys.stderr)
        return 2
    except ResourceBudget as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 3
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
