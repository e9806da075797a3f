"""Command-line entry point: ``semiclassical-ee <verb> ...``."""
import argparse
import json
import sys

from . import __version__
from . import experiment as ex
from .errors import SemiclassicalError

EXIT_CODES = """exit codes:
  0  success
  1  unexpected library error
  2  usage or configuration error
  3  numerical or domain error
  4  resource cap exceeded
  5  output (I/O) error
  6  reproduced reference numbers outside tolerance
"""


def _out_path(args, cfg=None):
    if args.out:
        return args.out
    if cfg is not None and cfg.output_path:
        return cfg.output_path
    return None


def _emit(result, args, cfg):
    path = _out_path(args, cfg)
    if path is None:
        if args.format == "plot":
            for p in sorted(result.points, key=lambda p: p.sweep_value):
                vals = [p.sweep_value, p.entropy_exact, p.entropy_classical]
                print(" ".join("nan" if v is None else "%.12g" % v for v in vals))
        else:
            sys.stdout.write(ex.csv_text(result))
        return
    if args.format == "plot":
        ex.emit_plot_data(result, path)
    else:
        ex.emit_csv(result, path)
    print(f"wrote {path}", file=sys.stderr)


def cmd_solve(args):
    cfg = ex.load_config(args.config)
    _emit(ex.run_single(cfg), args, cfg)


def cmd_sweep(args):
    cfg = ex.load_config(args.config)
    _emit(ex.run_convergence_sweep(cfg), args, cfg)


def cmd_efp(args):
    cfg = ex.load_config(args.config)
    rows, meta = ex.run_efp(cfg)
    path = _out_path(args, cfg)
    if path is None:
        print(ex.EFP_HEADER)
        for row in rows:
            print(",".join("%.12g" % x for x in row))
    else:
        ex.emit_efp_csv(rows, meta, path)
        print(f"wrote {path}", file=sys.stderr)


def cmd_repro(args):
    report = ex.run_appendix_b_repro(hbar=args.hbar, lattice_spacing=args.lattice_spacing)
    print(report.format_text())
    if args.out:
        ex.write_text(args.out, json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n")
    ex.check_repro(report)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="semiclassical-ee",
        description="Entanglement spectra of non-interacting particles and their classical limit.",
        epilog=EXIT_CODES, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="verb", required=True)

    def with_config(name, help_text, func):
        p = sub.add_parser(name, help=help_text, epilog=EXIT_CODES,
                           formatter_class=argparse.RawDescriptionHelpFormatter)
        p.add_argument("--config", required=True, help="JSON experiment configuration")
        p.add_argument("--out", help="output file (default: config output_path, else stdout)")
        p.set_defaults(func=func)
        return p

    for name, text, func in (("solve", "spectra at the first sweep value", cmd_solve),
                             ("sweep", "spectra and entropies over the sweep", cmd_sweep)):
        p = with_config(name, text, func)
        p.add_argument("--format", choices=("csv", "plot"), default="csv")
    with_config("efp", "emptiness probability of the complement region, both routes", cmd_efp)

    p = sub.add_parser("repro-appendix-b", help="fast-term overlap and boundary asymptotics",
                       epilog=EXIT_CODES, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--hbar", type=float, default=1.0)
    p.add_argument("--lattice-spacing", type=float, default=None,
                   help="use lattice eigenvalues at this spacing instead of exact energies")
    p.add_argument("--out", help="also write the report as JSON")
    p.set_defaults(func=cmd_repro)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except SemiclassicalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
