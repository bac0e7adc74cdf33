"""Command-line experiment harness.

Every subcommand resolves an :class:`ExperimentConfig` from defaults, an
optional ``--config`` file and command-line flags (flags win), then writes
CSV grids and/or a JSON report into ``--out``.  Outputs carry no timestamps,
so equal configs give byte-identical files.

Exit status: 0 on success, 2 for configuration errors, 3 for numerical
failures (truncation, quadrature, unfolding).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from . import __version__
from . import experiments as ex
from .config import OUT_ENV, ConfigError, build_config, read_config_file
from .exceptions import NumericalError

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _write_csv(path: Path, header, rows):
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _write_json(path: Path, command, cfg, payload):
    doc = {"command": command, "version": __version__, "config": cfg.as_dict(), **payload}
    path.write_text(json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n")


def _db(v):
    return "" if v is None else f"{v:.3f}"


def _num(v):
    return repr(float(v))


def cmd_table2(cfg, args, out):
    rows, meta = ex.table2(cfg)
    _write_csv(out / "table2.csv",
               ["family", "parameters", "nmse_db_qn", "reference_db_qn", "delta_db_qn",
                "nmse_db_qu", "reference_db_qu", "delta_db_qu"],
               [[r["family"], r["parameters"], _db(r["nmse_db_qn"]), _db(r["reference_db_qn"]),
                 _db(r["delta_db_qn"]), _db(r["nmse_db_qu"]), _db(r["reference_db_qu"]),
                 _db(r["delta_db_qu"])] for r in rows])
    _write_json(out / "table2.json", "table2", cfg, {"rows": rows, "lloyd": meta})
    for r in rows:
        print(f"{r['family']:<12}{r['parameters']:<16}Q_N {r['nmse_db_qn']:8.2f} "
              f"({r['reference_db_qn']:7.2f})   Q_U {r['nmse_db_qu']:8.2f} ({r['reference_db_qu']:7.2f})")


def cmd_fold_pdf(cfg, args, out):
    rows = ex.fold_pdf(cfg)
    _write_csv(out / "fold_pdf.csv", ["a", "theta", "density"],
               [[_num(a), _num(t), _num(f)] for a, t, f in rows])
    print(f"wrote {len(rows)} rows to {out / 'fold_pdf.csv'}")


def cmd_w1_heatmap(cfg, args, out):
    by_sigma, by_mu = ex.w1_heatmaps(cfg)
    header = [f"a={a:g}" for a in cfg.a_grid]
    _write_csv(out / "w1_sigma.csv", ["sigma", *header],
               [[_num(s), *map(_num, vals)] for s, vals in by_sigma])
    _write_csv(out / "w1_mu.csv", ["mu", *header],
               [[_num(m), *map(_num, vals)] for m, vals in by_mu])
    print(f"wrote {out / 'w1_sigma.csv'} and {out / 'w1_mu.csv'}")


def cmd_pipeline(cfg, args, out):
    runs, summary = ex.pipeline_runs(cfg)
    _write_json(out / "pipeline.json", "pipeline", cfg, {"runs": runs, "summary": summary})
    for r in runs:
        if not r["unfolded"]:
            print(f"signal {r['index']}: unfolding failed: {r['error']}", file=sys.stderr)
    print(json.dumps(summary, indent=2, sort_keys=True))


def cmd_wasserstein(cfg, args, out):
    x, y = ex.parse_dist(args.x), ex.parse_dist(args.y)
    rep = ex.wasserstein(x, y, args.order)
    print(f"W{rep['order']}({rep['x']}, {rep['y']})")
    print(f"  numeric      {rep['numeric']:.12g}")
    if rep["closed_form"] is not None:
        print(f"  closed form  {rep['closed_form']:.12g}")
        print(f"  |difference| {rep['abs_difference']:.3g}")
    else:
        print("  closed form  n/a")
    if rep["note"]:
        print(f"  note: {rep['note']}")


def cmd_lloyd(cfg, args, out):
    d = ex.parse_dist(args.dist)
    rows, meta = ex.lloyd(cfg, d)
    _write_csv(out / "lloyd.csv", ["cell", "lower", "upper", "level"],
               [[i, _num(a), _num(b), _num(c)] for i, a, b, c in rows])
    _write_json(out / "lloyd.json", "lloyd", cfg, {"distribution": d.spec(), **meta})
    print(f"{meta['iterations']} iterations, converged={meta['converged']}, "
          f"distortion={meta['distortion']:.6g}")


COMMANDS = {
    "table2": (cmd_table2, "Monte Carlo NMSE table for the Gaussian-optimal and uniform quantizers"),
    "fold-pdf": (cmd_fold_pdf, "folded density over theta for each gain"),
    "w1-heatmap": (cmd_w1_heatmap, "W1 distance of folded Gaussians to the uniform law"),
    "pipeline": (cmd_pipeline, "fold/quantize/unfold versus direct quantization on random signals"),
    "wasserstein": (cmd_wasserstein, "numeric and closed-form Wasserstein distance of two laws"),
    "lloyd": (cmd_lloyd, "design a Lloyd-Max quantizer and dump its cells"),
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int)
    common.add_argument("--n", dest="n_samples", type=int, help="Monte Carlo sample count")
    common.add_argument("--levels", type=int, help="number of quantizer levels")
    common.add_argument("--range", nargs=2, type=float, metavar=("LO", "HI"))
    common.add_argument("--lambda", dest="lam", type=float, help="folding half-range")
    common.add_argument("--a-grid", dest="a_grid", help="comma separated gains")
    common.add_argument("--out", help=f"output directory (default ${OUT_ENV} or ./results)")
    common.add_argument("--config", help="flat key = value config file")

    parser = argparse.ArgumentParser(prog="blindquant", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    parsers = {}
    for name, (_, help_text) in COMMANDS.items():
        parsers[name] = sub.add_parser(name, parents=[common], help=help_text, description=help_text)
    parsers["fold-pdf"].add_argument("--base", help='base law, e.g. "normal 0 1"')
    p = parsers["pipeline"]
    p.add_argument("--gain", type=float)
    p.add_argument("--oversampling", type=float)
    p.add_argument("--order", type=int, help="difference order used for unfolding")
    p.add_argument("--seeds", dest="n_seeds", type=int, help="number of random signals")
    p.add_argument("--coef-sigma", dest="coef_sigma", type=float)
    p = parsers["wasserstein"]
    p.add_argument("x", help='first law, e.g. "normal 0 1"')
    p.add_argument("y", help='second law, e.g. "exp 2"')
    p.add_argument("--order", type=int, default=2, choices=(1, 2))
    parsers["lloyd"].add_argument("--dist", default="normal 0 1", help="source law")
    return parser


_CONFIG_FLAGS = ("seed", "n_samples", "levels", "range", "lam", "a_grid", "out", "base", "gain",
                 "oversampling", "n_seeds", "coef_sigma")


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    func = COMMANDS[args.command][0]
    try:
        overrides = {k: getattr(args, k, None) for k in _CONFIG_FLAGS}
        if args.command == "pipeline":
            overrides["order"] = args.order
        file_values = read_config_file(args.config) if args.config else {}
        cfg = build_config(file_values, overrides)
        out = Path(cfg.out)
        if args.command != "wasserstein":
            out.mkdir(parents=True, exist_ok=True)
        func(cfg, args, out)
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ConfigError, ValueError, OSError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return 0


if __name__ == "__main__":
    sys.exit(main())
