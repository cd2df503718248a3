"""Command-line surface: distribution queries, SOP evaluation, parameter
sweeps, figure reproduction, and Monte-Carlo validation runs.

All tabular output is CSV with one header line, '\n' line endings, and
probabilities in scientific notation with 12 significant digits, so
files are byte-stable for a fixed seed. Sweeps also write a JSON
manifest that fully determines the run; `sweep --from-manifest` replays
one bit-exactly. FTR_SECRECY_THREADS bounds worker threads (grid points
and Monte-Carlo batches); results do not depend on it.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

from . import __version__
from .ftr_model import (
    FtrParams,
    LinkBudget,
    Truncation,
    TruncationError,
    ftr_ccdf,
    ftr_cdf,
    ftr_pdf,
    sigma2_from_avg_snr,
)
from .monte_carlo import (
    InsufficientConditioningSamples,
    McConfig,
    mc_conventional_sop,
    mc_modified_sop,
)
from .secrecy import (
    QuadratureError,
    SecrecyConfig,
    SecrecyScenario,
    asop,
    conventional_sop,
    diversity_order,
    modified_sop,
)
from .special_functions import ConvergenceError

__all__ = ["main", "run_sweep", "SweepSpec", "FIG1_CURVES", "FIG2_MUS"]

METHODS = ("exact", "asymptotic", "conventional", "mc")
FIG1_CURVES = ((0.5, 5.0), (3.5, 15.0), (10.0, 15.0))
FIG2_MUS = (0.5, 2.0)
_GRID_DB = tuple(float(v) for v in range(0, 46, 5))

CSV_FIELDS = (
    "gamma_bar_d_db",
    "sop_exact",
    "sop_asymptotic",
    "sop_conventional",
    "sop_mc",
    "mc_std_error",
    "effective_samples",
)


class CliError(Exception):
    """Usage or validation failure; exits with status 2."""


@dataclass(frozen=True)
class SweepSpec:
    """One sweep over the destination average SNR grid."""

    gamma_bar_d_db: tuple
    gamma_bar_e_db: float
    m_d: float
    k_d: float
    delta_d: float
    m_e: float
    k_e: float
    delta_e: float
    rs: float
    mu: float
    pt_over_n0_db: float
    methods: tuple
    mc: McConfig | None
    trunc: Truncation

    def __post_init__(self):
        if not self.gamma_bar_d_db:
            raise CliError("sweep grid is empty (need at least one --gamma-d-db value)")
        if not self.methods:
            raise CliError("no methods selected")
        bad = [m for m in self.methods if m not in METHODS]
        if bad:
            raise CliError(f"unknown methods {bad}; choose from {METHODS}")
        if "mc" in self.methods and self.mc is None:
            raise CliError("method 'mc' requires Monte-Carlo settings")


def _threads() -> int:
    raw = os.environ.get("FTR_SECRECY_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise CliError(f"FTR_SECRECY_THREADS must be an integer, got {raw!r}") from None
    if n < 1:
        raise CliError(f"FTR_SECRECY_THREADS must be >= 1, got {n}")
    return n


def _fmt(v: float) -> str:
    return f"{v:.11e}"


def _fmt_g(v: float) -> str:
    return f"{v:.6g}"


def _snr_sigma2(db: float, k_ratio: float) -> float:
    """sigma^2 on the SNR scale for a link with average SNR db."""
    probe = FtrParams(1.0, k_ratio, 0.0, 1.0)
    budget = LinkBudget(1.0)
    return sigma2_from_avg_snr(db, budget, probe)


def _link(args, which: str) -> tuple[float, float, float]:
    """(m, K, delta) for the requested link; e-side falls back to d-side."""
    m = getattr(args, "m_e", None) if which == "e" else args.m
    k = getattr(args, "k_e", None) if which == "e" else args.k
    d = getattr(args, "delta_e", None) if which == "e" else args.delta
    if which == "e":
        m = args.m if m is None else m
        k = args.k if k is None else k
        d = args.delta if d is None else d
    return m, k, d


def _check_link_flags(m, k, delta, suffix: str = "") -> None:
    tag = f"-{suffix}" if suffix else ""
    if not (math.isfinite(m) and m > 0.0):
        raise CliError(f"--m{tag} must be positive, got {m}")
    if not (math.isfinite(k) and k >= 0.0):
        raise CliError(f"--k{tag} must be >= 0, got {k}")
    if not (0.0 <= delta <= 1.0):
        raise CliError(f"--delta{tag} must be in [0, 1], got {delta}")


def _trunc_from(args) -> Truncation:
    if args.max_terms < 1:
        raise CliError(f"--max-terms must be >= 1, got {args.max_terms}")
    if args.rel_tol <= 0:
        raise CliError(f"--rel-tol must be positive, got {args.rel_tol}")
    return Truncation(max_terms=args.max_terms, rel_tol=args.rel_tol, tail_run=3)


def _d_sigma2(args) -> float:
    if args.sigma2 is not None and args.avg_snr_db is not None:
        raise CliError("give either --sigma2 or --avg-snr-db, not both")
    if args.sigma2 is not None:
        if args.sigma2 <= 0:
            raise CliError(f"--sigma2 must be positive, got {args.sigma2}")
        return args.sigma2
    if args.avg_snr_db is None:
        raise CliError("one of --sigma2 or --avg-snr-db is required")
    return _snr_sigma2(args.avg_snr_db, args.k)


def _scenario_from(args) -> SecrecyScenario:
    m_d, k_d, delta_d = _link(args, "d")
    m_e, k_e, delta_e = _link(args, "e")
    _check_link_flags(m_d, k_d, delta_d)
    _check_link_flags(m_e, k_e, delta_e, suffix="e")
    if args.rs < 0:
        raise CliError(f"--rs must be >= 0, got {args.rs}")
    if args.mu < 0:
        raise CliError(f"--mu must be >= 0, got {args.mu}")
    d_link = FtrParams(m_d, k_d, delta_d, _d_sigma2(args))
    e_link = FtrParams(m_e, k_e, delta_e, _snr_sigma2(args.gamma_e_db, k_e))
    return SecrecyScenario(
        d_link, e_link, SecrecyConfig(rs=args.rs, mu=args.mu), _trunc_from(args)
    )


# ---------------------------------------------------------------------------
# sweep engine
# ---------------------------------------------------------------------------


def _scenario_at(spec: SweepSpec, db: float) -> SecrecyScenario:
    d_link = FtrParams(spec.m_d, spec.k_d, spec.delta_d, _snr_sigma2(db, spec.k_d))
    e_link = FtrParams(
        spec.m_e, spec.k_e, spec.delta_e, _snr_sigma2(spec.gamma_bar_e_db, spec.k_e)
    )
    return SecrecyScenario(
        d_link, e_link, SecrecyConfig(rs=spec.rs, mu=spec.mu), spec.trunc
    )


def _eval_point(spec: SweepSpec, db: float, threads: int) -> dict:
    s = _scenario_at(spec, db)
    row = {"gamma_bar_d_db": db}
    if "exact" in spec.methods:
        row["sop_exact"] = modified_sop(s)
    if "asymptotic" in spec.methods:
        row["sop_asymptotic"] = asop(s)
    if "conventional" in spec.methods:
        row["sop_conventional"] = conventional_sop(s)
    if "mc" in spec.methods:
        est = mc_modified_sop(s, cfg=spec.mc, threads=threads)
        row["sop_mc"] = est.value
        row["mc_std_error"] = est.std_error
        row["effective_samples"] = est.effective_samples
    return row


def run_sweep(spec: SweepSpec, threads: int = 1) -> list[dict]:
    """Evaluate every requested method at every grid point, in grid order."""
    return list(_iter_sweep(spec, threads))


def _iter_sweep(spec: SweepSpec, threads: int):
    """Yield completed rows in grid order; a numerical failure surfaces
    after every earlier row has been yielded."""
    if threads > 1 and len(spec.gamma_bar_d_db) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            yield from pool.map(lambda db: _eval_point(spec, db, 1), spec.gamma_bar_d_db)
    else:
        for db in spec.gamma_bar_d_db:
            yield _eval_point(spec, db, threads)


def _csv_row(row: dict, lead: tuple = ()) -> str:
    cells = [_fmt_g(v) for v in lead]
    cells.append(_fmt_g(row["gamma_bar_d_db"]))
    for field in CSV_FIELDS[1:]:
        if field not in row:
            cells.append("")
        elif field == "effective_samples":
            cells.append(str(row[field]))
        else:
            cells.append(_fmt(row[field]))
    return ",".join(cells)


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _spec_manifest(spec: SweepSpec) -> dict:
    return {
        "gamma_bar_d_db": list(spec.gamma_bar_d_db),
        "gamma_bar_e_db": spec.gamma_bar_e_db,
        "links": {
            "m_d": spec.m_d,
            "k_d": spec.k_d,
            "delta_d": spec.delta_d,
            "m_e": spec.m_e,
            "k_e": spec.k_e,
            "delta_e": spec.delta_e,
        },
        "rs": spec.rs,
        "mu": spec.mu,
        "pt_over_n0_db": spec.pt_over_n0_db,
        "methods": list(spec.methods),
        "mc": None
        if spec.mc is None
        else {
            "samples": spec.mc.samples,
            "seed": spec.mc.seed,
            "batch_size": spec.mc.batch_size,
        },
        "truncation": {
            "max_terms": spec.trunc.max_terms,
            "rel_tol": spec.trunc.rel_tol,
            "tail_run": spec.trunc.tail_run,
        },
    }


def _spec_from_manifest(data: dict) -> SweepSpec:
    mc = data.get("mc")
    tr = data["truncation"]
    links = data["links"]
    return SweepSpec(
        gamma_bar_d_db=tuple(data["gamma_bar_d_db"]),
        gamma_bar_e_db=data["gamma_bar_e_db"],
        m_d=links["m_d"],
        k_d=links["k_d"],
        delta_d=links["delta_d"],
        m_e=links["m_e"],
        k_e=links["k_e"],
        delta_e=links["delta_e"],
        rs=data["rs"],
        mu=data["mu"],
        pt_over_n0_db=data.get("pt_over_n0_db", 0.0),
        methods=tuple(data["methods"]),
        mc=None if mc is None else McConfig(**mc),
        trunc=Truncation(max_terms=tr["max_terms"], rel_tol=tr["rel_tol"], tail_run=tr["tail_run"]),
    )


# ---------------------------------------------------------------------------
# subcommand handlers
# ---------------------------------------------------------------------------


def _cmd_dist(args) -> int:
    _check_link_flags(args.m, args.k, args.delta)
    p = FtrParams(args.m, args.k, args.delta, _d_sigma2(args))
    trunc = _trunc_from(args)
    lines = ["x,pdf,cdf,ccdf"]
    for x in args.x:
        if x < 0:
            raise CliError(f"--x values must be >= 0, got {x}")
        lines.append(
            ",".join(
                (
                    _fmt_g(x),
                    _fmt(ftr_pdf(p, x, trunc)),
                    _fmt(ftr_cdf(p, x, trunc)),
                    _fmt(ftr_ccdf(p, x, trunc)),
                )
            )
        )
    _write_text(args.out, "\n".join(lines) + "\n")
    return 0


def _cmd_scalar(args) -> int:
    s = _scenario_from(args)
    fn = {"sop": modified_sop, "asop": asop, "conventional": conventional_sop}[args.command]
    sys.stdout.write(_fmt(fn(s)) + "\n")
    return 0


def _cmd_mc(args) -> int:
    s = _scenario_from(args)
    cfg = _mc_config(args)
    est = (mc_conventional_sop if args.conventional else mc_modified_sop)(
        s, cfg=cfg, threads=_threads()
    )
    sys.stdout.write("value,std_error,effective_samples\n")
    sys.stdout.write(
        f"{_fmt(est.value)},{_fmt(est.std_error)},{est.effective_samples}\n"
    )
    return 0


def _mc_config(args) -> McConfig:
    if args.samples < 1:
        raise CliError(f"--samples must be >= 1, got {args.samples}")
    if args.seed < 0:
        raise CliError(f"--seed must be >= 0, got {args.seed}")
    batch = min(args.batch_size, args.samples)
    return McConfig(samples=args.samples, seed=args.seed, batch_size=batch)


def _cmd_sweep(args) -> int:
    if args.from_manifest:
        with open(args.from_manifest) as fh:
            data = json.load(fh)
        if data.get("command") == "reproduce":
            tr = data["truncation"]
            return _reproduce(
                data["figure"],
                seed=data["mc"]["seed"],
                samples=data["mc"]["samples"],
                batch_size=data["mc"]["batch_size"],
                trunc=Truncation(
                    max_terms=tr["max_terms"],
                    rel_tol=tr["rel_tol"],
                    tail_run=tr["tail_run"],
                ),
                out_dir=args.out_dir,
            )
        spec = _spec_from_manifest(data)
    else:
        if not args.gamma_d_db:
            raise CliError("sweep grid is empty (need at least one --gamma-d-db value)")
        m_d, k_d, delta_d = _link(args, "d")
        m_e, k_e, delta_e = _link(args, "e")
        _check_link_flags(m_d, k_d, delta_d)
        _check_link_flags(m_e, k_e, delta_e, suffix="e")
        spec = SweepSpec(
            gamma_bar_d_db=tuple(args.gamma_d_db),
            gamma_bar_e_db=args.gamma_e_db,
            m_d=m_d,
            k_d=k_d,
            delta_d=delta_d,
            m_e=m_e,
            k_e=k_e,
            delta_e=delta_e,
            rs=args.rs,
            mu=args.mu,
            pt_over_n0_db=args.pt_over_n0_db,
            methods=tuple(args.methods),
            mc=_mc_config(args) if "mc" in args.methods else None,
            trunc=_trunc_from(args),
        )
    rows = []
    failure = None
    try:
        for row in _iter_sweep(spec, _threads()):
            rows.append(row)
    except (
        TruncationError,
        ConvergenceError,
        QuadratureError,
        InsufficientConditioningSamples,
        ArithmeticError,
    ) as exc:
        failure = exc
    lines = [",".join(CSV_FIELDS)] + [_csv_row(r) for r in rows]
    _write_text(args.out, "\n".join(lines) + "\n")
    if failure is not None:
        raise failure  # completed rows are flushed; main() maps this to exit 3
    if args.out and args.out != "-":
        manifest = {"command": "sweep", "version": __version__, "csv": os.path.basename(args.out)}
        manifest.update(_spec_manifest(spec))
        with open(args.out + ".manifest.json", "w", newline="") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return 0


def _cmd_diversity(args) -> int:
    s = _scenario_from(args)
    if args.db_lo == args.db_hi:
        raise CliError("--db-lo and --db-hi must differ")
    slope = diversity_order(s, args.db_lo, args.db_hi, method="exact")
    exact = diversity_order(s, args.db_lo, args.db_hi, method="asymptotic")
    sys.stdout.write(f"diversity_slope_exact,{_fmt(slope)}\n")
    sys.stdout.write(f"diversity_slope_asymptotic,{_fmt(exact)}\n")
    return 0


def _reproduce(
    figure: str,
    seed: int,
    samples: int,
    batch_size: int,
    trunc: Truncation,
    out_dir: str,
) -> int:
    threads = _threads()
    mc = McConfig(samples=samples, seed=seed, batch_size=min(batch_size, samples))
    base = SweepSpec(
        gamma_bar_d_db=_GRID_DB,
        gamma_bar_e_db=5.0,
        m_d=3.5,
        k_d=15.0,
        delta_d=0.5,
        m_e=3.5,
        k_e=15.0,
        delta_e=0.5,
        rs=1.0,
        mu=2.0,
        pt_over_n0_db=0.0,
        methods=("exact",),
        mc=mc,
        trunc=trunc,
    )
    if figure == "fig1":
        lead_fields, curves = ("m", "k"), FIG1_CURVES
        specs = [
            replace(
                base,
                m_d=m,
                k_d=k,
                m_e=m,
                k_e=k,
                methods=("exact", "asymptotic", "mc"),
            )
            for m, k in curves
        ]
    else:
        lead_fields, curves = ("mu",), tuple((mu,) for mu in FIG2_MUS)
        specs = [
            replace(base, mu=mu, methods=("exact", "conventional")) for (mu,) in curves
        ]
    lines = [",".join(lead_fields + CSV_FIELDS)]
    for curve, spec in zip(curves, specs):
        for row in run_sweep(spec, threads=threads):
            lines.append(_csv_row(row, lead=curve))
    os.makedirs(out_dir, exist_ok=True)
    csv_name = f"{figure}.csv"
    _write_text(os.path.join(out_dir, csv_name), "\n".join(lines) + "\n")
    manifest = {
        "command": "reproduce",
        "figure": figure,
        "version": __version__,
        "csv": csv_name,
        "curves": [list(c) for c in curves],
    }
    manifest.update(_spec_manifest(specs[0]))
    with open(os.path.join(out_dir, f"{figure}.manifest.json"), "w", newline="") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return 0


def _cmd_reproduce(args) -> int:
    return _reproduce(
        args.figure,
        seed=args.seed,
        samples=args.samples,
        batch_size=args.batch_size,
        trunc=_trunc_from(args),
        out_dir=args.out_dir,
    )


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_link_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--m", type=float, default=3.5, help="Gamma shape of both links")
    p.add_argument("--k", type=float, default=15.0, help="specular-to-diffuse ratio K")
    p.add_argument("--delta", type=float, default=0.5, help="specular similarity in [0,1]")
    p.add_argument("--m-e", type=float, default=None, help="eavesdropper m (default: --m)")
    p.add_argument("--k-e", type=float, default=None, help="eavesdropper K (default: --k)")
    p.add_argument("--delta-e", type=float, default=None, help="eavesdropper delta (default: --delta)")


def _add_trunc_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--rel-tol", type=float, default=1e-12, help="series tail tolerance")
    p.add_argument(
        "--max-terms",
        type=int,
        default=4000,
        help="series cap; deep-tail probes on the reference grids can need ~2000 terms",
    )


def _add_scenario_flags(p: argparse.ArgumentParser) -> None:
    _add_link_flags(p)
    p.add_argument("--sigma2", type=float, default=None, help="destination sigma^2 (SNR scale)")
    p.add_argument("--avg-snr-db", type=float, default=None, help="destination average SNR in dB")
    p.add_argument("--pt-over-n0-db", type=float, default=0.0, help="transmit-to-noise ratio in dB")
    p.add_argument("--gamma-e-db", type=float, default=5.0, help="eavesdropper average SNR in dB")
    p.add_argument("--rs", type=float, default=1.0, help="confidential rate, bits/channel use")
    p.add_argument("--mu", type=float, default=2.0, help="reliability threshold on gamma_d")
    _add_trunc_flags(p)


def _add_mc_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--samples", type=int, default=1_000_000, help="Monte-Carlo sample count")
    p.add_argument("--seed", type=int, default=12345, help="64-bit RNG seed")
    p.add_argument("--batch-size", type=int, default=1_000_000, help="samples per batch")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ftr-secrecy",
        description="Secrecy outage probabilities over fluctuating two-ray fading channels",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dist", help="tabulate pdf/cdf/ccdf of one link")
    p.add_argument("--m", type=float, default=3.5)
    p.add_argument("--k", type=float, default=15.0)
    p.add_argument("--delta", type=float, default=0.5)
    p.add_argument("--sigma2", type=float, default=None)
    p.add_argument("--avg-snr-db", type=float, default=None)
    p.add_argument("--pt-over-n0-db", type=float, default=0.0)
    p.add_argument("--x", type=float, nargs="+", required=True, help="SNR evaluation points")
    _add_trunc_flags(p)
    p.add_argument("--out", default=None, help="CSV path (default: stdout)")
    p.set_defaults(func=_cmd_dist, k_e=None, m_e=None, delta_e=None)

    for name, help_text in (
        ("sop", "closed-form modified SOP at one grid point"),
        ("asop", "asymptotic modified SOP at one grid point"),
        ("conventional", "conventional SOP by quadrature at one grid point"),
    ):
        p = sub.add_parser(name, help=help_text)
        _add_scenario_flags(p)
        p.set_defaults(func=_cmd_scalar)

    p = sub.add_parser("mc", help="Monte-Carlo SOP estimate")
    _add_scenario_flags(p)
    _add_mc_flags(p)
    p.add_argument(
        "--conventional",
        action="store_true",
        help="estimate the conventional SOP instead of the modified one",
    )
    p.set_defaults(func=_cmd_mc)

    p = sub.add_parser("sweep", help="evaluate methods over a gamma_bar_d grid")
    _add_scenario_flags(p)
    _add_mc_flags(p)
    p.add_argument("--gamma-d-db", type=float, nargs="*", default=[], help="grid of destination average SNRs (dB)")
    p.add_argument("--methods", nargs="+", default=["exact"], choices=METHODS)
    p.add_argument("--out", default=None, help="CSV path (default: stdout); manifest written alongside")
    p.add_argument("--out-dir", default=".", help="output directory for manifest replays")
    p.add_argument("--from-manifest", default=None, help="replay a recorded manifest")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("diversity", help="slope-based secrecy diversity estimate")
    _add_scenario_flags(p)
    p.add_argument("--db-lo", type=float, required=True)
    p.add_argument("--db-hi", type=float, required=True)
    p.set_defaults(func=_cmd_diversity)

    p = sub.add_parser("reproduce", help="reproduce a reference figure dataset")
    p.add_argument("figure", choices=("fig1", "fig2"))
    _add_mc_flags(p)
    _add_trunc_flags(p)
    p.add_argument("--out-dir", default=".", help="directory for CSV + manifest")
    p.set_defaults(func=_cmd_reproduce)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CliError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (
        TruncationError,
        ConvergenceError,
        QuadratureError,
        InsufficientConditioningSamples,
        ArithmeticError,
    ) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
