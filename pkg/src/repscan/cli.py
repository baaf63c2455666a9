"""Command-line interface.

Every subcommand is a thin composition of library calls; no numerics live
here.  File outputs are deterministic for identical configs: floats are
printed with 17 significant digits, CSVs use '.' decimals and ',' separators
with a header row, and figures are rendered through the Agg backend with
empty metadata.

Exit codes: 0 success, 1 computation error (error class name on stderr),
2 configuration error.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import cumulants as cm
from . import entropy as en
from . import estimation as es
from . import grid as gr
from . import infodist as od
from . import reconstruct as rc
from . import states as st
from .errors import RepscanError


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _thread_count() -> int:
    raw = os.environ.get("REPSCAN_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n <= 0:
        n = min(4, os.cpu_count() or 1)
    return n


def _pmap(fn, items):
    """Map preserving order; threads capped by REPSCAN_THREADS (0 = auto)."""
    items = list(items)
    n = _thread_count()
    if n <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))


def _write_csv(path: str, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) if isinstance(v, float) else str(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def _parse_grid(text: str) -> gr.GridSpec:
    try:
        lo, hi, count = text.split(",")
        return gr.grid_1d(float(lo), float(hi), int(count))
    except (ValueError, TypeError) as exc:
        print(f"repscan: bad --grid {text!r}: expected min,max,count", file=sys.stderr)
        raise SystemExit(2) from exc


def _load_density(path: str) -> gr.GriddedDensity:
    obj = gr.load_grid(path)
    if isinstance(obj, gr.WaveFunction):
        return obj.density()
    return obj


def _report_json(reports) -> str:
    parts = []
    for r in reports:
        parts.append(
            '{"name": "%s", "lhs": %s, "rhs": %s, "satisfied": %s, "slack": %s, "saturated": %s}'
            % (
                r.name,
                _fmt(r.lhs),
                _fmt(r.rhs),
                "true" if r.satisfied else "false",
                _fmt(r.slack),
                "true" if r.saturated else "false",
            )
        )
    return "[" + ", ".join(parts) + "]\n"


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cmd_state(args) -> int:
    spec = _parse_grid(args.grid)
    if args.which == "cat":
        params = st.CatStateParams(args.nu, args.alpha, args.theta)
        if args.wavefunction:
            obj = st.cat_wavefunction(params, spec, args.hbar)
        else:
            obj = st.cat_quadrature_density(params, spec)
    elif args.which == "gaussian":
        if args.wavefunction:
            x = spec.points(0)
            amp = (2.0 * math.pi * args.var) ** -0.25 * np.exp(
                -((x - args.mean) ** 2) / (4.0 * args.var)
            )
            w = gr.quadrature_weights(spec)
            amp = amp / math.sqrt(float(np.sum(w * amp**2)))
            obj = gr.WaveFunction(spec, amp, args.hbar)
        else:
            obj = st.gaussian_density(spec, args.mean, args.var)
    else:
        lo, hi = (float(v) for v in args.box.split(","))
        obj = st.uniform_density(spec, [(lo, hi)])
    gr.save_grid(obj, args.out)
    return 0


def _cmd_entropy(args) -> int:
    d = _load_density(args.infile)
    value = en.renyi_entropy(d, args.q, args.base)
    print(_fmt(value.value))
    return 0


def _cmd_power_curve(args) -> int:
    d = _load_density(args.infile)
    orders = [1.0 + k * args.delta for k in range(args.m)]
    powers = _pmap(lambda p: en.renyi_entropy_power(d, p), orders)
    rows = [(k, float(orders[k]), float(powers[k])) for k in range(args.m)]
    _write_csv(args.out, ["k", "order", "N"], rows)
    return 0


def _cmd_cumulants(args) -> int:
    d = _load_density(args.infile)
    if args.method == "gldf":
        curve = en.entropy_power_curve(d, args.delta, args.m)
        vec = cm.cumulants_from_powers(curve, args.m)
    else:
        vec = cm.cumulants_direct(d, args.m)
    doc = '{"m": %d, "dim": %d, "source": "%s", "delta": %s, "kappa": [%s]}\n' % (
        len(vec),
        vec.dim,
        vec.source,
        "null" if vec.delta is None else _fmt(vec.delta),
        ", ".join(_fmt(v) for v in vec.values),
    )
    Path(args.json).write_text(doc)
    return 0


def _cmd_infodist(args) -> int:
    d = _load_density(args.infile)
    hist = od.info_pdf_histogram(d, args.bins)
    rows = zip(hist.centers.tolist(), hist.densities().tolist())
    _write_csv(args.out, ["center_bits", "density"], rows)
    return 0


def _cmd_check_moment(args) -> int:
    d = _load_density(args.infile)
    rep = od.moment_identity_check(d, args.p)
    print(
        "moment_identity p=%s lhs=%s rhs=%s satisfied=%s"
        % (_fmt(args.p), _fmt(rep.lhs), _fmt(rep.rhs), rep.satisfied)
    )
    return 0 if rep.satisfied else 1


_DENSITY_SUITES = ("debruijn", "iso", "cr", "epi")
_WAVE_SUITES = ("stam", "repur")


def _cmd_verify(args) -> int:
    obj = gr.load_grid(args.infile)
    is_wave = isinstance(obj, gr.WaveFunction) or args.wavefunction
    if args.suite in _WAVE_SUITES and not isinstance(obj, gr.WaveFunction):
        print("repscan: suite %r needs a wavefunction input" % args.suite, file=sys.stderr)
        return 2
    wave = obj if isinstance(obj, gr.WaveFunction) else None
    dens = obj.density() if wave is not None else obj

    def run(name):
        if name == "debruijn":
            return es.de_bruijn_check(dens, [[args.sigma]], args.q)
        if name == "iso":
            return es.isoperimetric_check(dens, args.q)
        if name == "cr":
            return es.cramer_rao_check(dens, args.q)
        if name == "epi":
            return es.epi_check(dens, dens, args.lam, args.epi_r)
        if name == "stam":
            return es.stam_check(wave, args.r)
        return es.repur_check(wave, args.p)

    if args.suite == "all":
        names = list(_DENSITY_SUITES) + (list(_WAVE_SUITES) if is_wave and wave else [])
    else:
        names = [args.suite]
    reports = _pmap(run, names)
    if args.json:
        Path(args.json).write_text(_report_json(reports))
    for rep in reports:
        print(
            "%s lhs=%s rhs=%s satisfied=%s saturated=%s"
            % (rep.name, _fmt(rep.lhs), _fmt(rep.rhs), rep.satisfied, rep.saturated)
        )
    return 0


def _scan_rows(result: rc.ScanResult):
    """Per-bin (center, truth density, reconstruction density) over the window."""
    truth = result.truth
    recon = rc.series_bin_masses(result.series, truth)
    width = truth.bin_width
    lo_w = result.series.reference.a
    hi_w = lo_w + rc.WINDOW_WIDTHS * result.series.reference.beta
    edges = truth.edges
    rows = []
    for i, center in enumerate(truth.centers.tolist()):
        if edges[i + 1] <= lo_w or edges[i] >= hi_w:
            continue
        rows.append((float(center), float(truth.masses[i] / width), float(recon[i] / width)))
    return rows


def _cmd_scan(args) -> int:
    d = _load_density(args.infile)
    result = rc.scan(d, args.delta, args.m, args.method, n_bins=args.bins)
    if args.out:
        x = result.series.window()
        vals = result.series.evaluate(x)
        _write_csv(args.out, ["x_bits", "value"], zip(x.tolist(), vals.tolist()))
    if args.truth:
        hist = result.truth
        _write_csv(
            args.truth,
            ["center_bits", "density"],
            zip(hist.centers.tolist(), hist.densities().tolist()),
        )
    if args.report:
        ref = result.series.reference
        doc = (
            '{"kappa": [%s], "reference": {"a": %s, "alpha": %s, "beta": %s}, '
            '"l1": %s, "l1_reference_only": %s}\n'
            % (
                ", ".join(_fmt(v) for v in result.series.kappa.values),
                _fmt(ref.a),
                _fmt(ref.alpha),
                _fmt(ref.beta),
                _fmt(result.l1),
                _fmt(result.l1_reference_only),
            )
        )
        Path(args.report).write_text(doc)
    if args.plot:
        _plot_scan(result, args.plot)
    print("l1=%s l1_reference_only=%s" % (_fmt(result.l1), _fmt(result.l1_reference_only)))
    return 0


def _plot_scan(result: rc.ScanResult, path: str, title: str = "information scan") -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    rows = _scan_rows(result)
    centers = [r[0] for r in rows]
    truth = [r[1] for r in rows]
    recon = [r[2] for r in rows]
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.step(centers, truth, where="mid", label="target histogram", color="0.35")
    ax.plot(centers, recon, label="reconstruction", color="crimson")
    ax.set_xlabel("information (bits)")
    ax.set_ylabel("density (1/bits)")
    ax.set_title(title)
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=150, metadata={})
    plt.close(fig)


def _cmd_figures(args) -> int:
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    spec = gr.grid_1d(-12.0, 12.0, 2048)
    bcs = st.cat_quadrature_density(st.CatStateParams(1.0, 5.0, 0.0), spec)
    y = spec.points(0)
    _write_csv(
        outdir / "fig1_bcs_density.csv",
        ["y", "density"],
        zip(y.tolist(), bcs.values.tolist()),
    )

    ucs_spec = gr.grid_1d(-8.0, 22.0, 2048)
    ucs = st.cat_quadrature_density(st.CatStateParams(0.97, 10.0, 0.0), ucs_spec)
    result = rc.scan(ucs, 0.01, 5, "edgeworth")
    _write_csv(
        outdir / "fig2_ucs_scan.csv",
        ["center_bits", "target_density", "reconstruction_density"],
        _scan_rows(result),
    )

    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(y, bcs.values, color="navy")
    ax.set_xlabel("quadrature y")
    ax.set_ylabel("density")
    ax.set_title("balanced cat state density")
    fig.tight_layout()
    fig.savefig(outdir / "fig1_bcs_density.png", dpi=150, metadata={})
    plt.close(fig)

    _plot_scan(result, outdir / "fig2_ucs_scan.png", title="unbalanced cat state scan")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="repscan", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_state = sub.add_parser("state", help="generate benchmark states")
    state_sub = p_state.add_subparsers(dest="which", required=True)
    for which in ("cat", "gaussian", "uniform"):
        sp = state_sub.add_parser(which)
        sp.add_argument("--grid", required=True, help="min,max,count")
        sp.add_argument("--out", required=True)
        if which == "cat":
            sp.add_argument("--nu", type=float, required=True)
            sp.add_argument("--alpha", type=float, required=True)
            sp.add_argument("--theta", type=float, default=0.0)
        if which == "gaussian":
            sp.add_argument("--mean", type=float, default=0.0)
            sp.add_argument("--var", type=float, default=1.0)
        if which in ("cat", "gaussian"):
            sp.add_argument("--wavefunction", action="store_true")
            sp.add_argument("--hbar", type=float, default=1.0)
        if which == "uniform":
            sp.add_argument("--box", required=True, help="lo,hi")
        sp.set_defaults(func=_cmd_state)

    p = sub.add_parser("entropy", help="Renyi/Shannon entropy of a density")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--q", type=float, default=1.0)
    p.add_argument("--base", choices=("nats", "bits"), default="nats")
    p.set_defaults(func=_cmd_entropy)

    p = sub.add_parser("power-curve", help="entropy-power ladder to CSV")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--delta", type=float, default=0.01)
    p.add_argument("--m", type=int, default=6)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_power_curve)

    p = sub.add_parser("cumulants", help="information cumulants to JSON")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--delta", type=float, default=0.01)
    p.add_argument("--m", type=int, default=5)
    p.add_argument("--method", choices=("gldf", "direct"), default="gldf")
    p.add_argument("--json", required=True)
    p.set_defaults(func=_cmd_cumulants)

    p = sub.add_parser("infodist", help="information histogram to CSV")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--bins", type=int, default=256)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_infodist)

    p = sub.add_parser("check-moment", help="moment identity check")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--p", type=float, required=True)
    p.set_defaults(func=_cmd_check_moment)

    p = sub.add_parser("verify", help="inequality suite")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--wavefunction", action="store_true")
    p.add_argument(
        "--suite", choices=("all",) + _DENSITY_SUITES + _WAVE_SUITES, default="all"
    )
    p.add_argument("--q", type=float, default=2.0)
    p.add_argument("--r", type=float, default=1.0, help="order for stam")
    p.add_argument("--epi-r", type=float, default=2.0, help="order for epi (> 1)")
    p.add_argument("--p", type=float, default=2.0, help="order for repur")
    p.add_argument("--lam", type=float, default=0.5, help="EPI weighting")
    p.add_argument("--sigma", type=float, default=1.0, help="noise variance for debruijn")
    p.add_argument("--json", default=None)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("scan", help="information scan")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--delta", type=float, default=0.01)
    p.add_argument("--m", type=int, default=5)
    p.add_argument("--method", choices=("gram_charlier_a", "edgeworth"), default="edgeworth")
    p.add_argument("--bins", type=int, default=256)
    p.add_argument("--out", default=None, help="pointwise reconstruction CSV")
    p.add_argument("--truth", default=None, help="ground-truth histogram CSV")
    p.add_argument("--report", default=None, help="scan summary JSON")
    p.add_argument("--plot", default=None, help="rendered comparison figure (PNG)")
    p.set_defaults(func=_cmd_scan)

    p = sub.add_parser("figures", help="figure data (CSV) and rendered PNGs")
    p.add_argument("--outdir", default=".")
    p.set_defaults(func=_cmd_figures)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except RepscanError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"repscan: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
