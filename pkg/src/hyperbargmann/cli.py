"""Command-line entry point: ``hyperbargmann <subcommand> [options]``.

Exit status is 0 when every criterion evaluated by the subcommand passes,
1 when any fails and 2 on usage or configuration errors.
"""

import argparse
import logging
import sys

import numpy as np

from . import experiments as ex
from .grids import CotangentPointP
from .microlocal import kappa_B, kappa_B_inv

SUBCOMMANDS = {
    "transform": "tabulate T_h u and B_h of the matching sinogram data; Radon closed-form check",
    "verify-identity": "T_h u against B_h R u (odd n) / B_h H R u (even n)",
    "plancherel": "Plancherel identity of the Radon transform",
    "invert": "filtered backprojection and the moment condition",
    "heisenberg": "coherent-state statistics and the Heisenberg equality",
    "wf-scan": "decay-based wave-front scan of the unit disk (n = 2)",
    "kappa": "canonical transform round trips and phase analysis; optional point mapping",
    "cutoff-experiment": "decay of B_h(chi U) near the degenerate critical set",
    "all": "every suite above for the configured n",
}


def _hlist(text):
    vals = [float(v) for v in text.replace(",", " ").split()]
    if not vals:
        raise argparse.ArgumentTypeError("empty h list")
    return tuple(vals)


def _vector(text):
    return np.array([float(v) for v in text.replace(",", " ").split()])


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="INI file with overrides of the defaults")
    common.add_argument("--n", type=int, choices=(2, 3), help="dimension")
    common.add_argument("--h", type=_hlist, metavar="LIST", help="comma-separated decreasing h values")
    common.add_argument("--out", metavar="DIR", help="output directory (default: out)")
    common.add_argument("--filter", choices=("derivative", "multiplier"), help="|D_t|^(n-1) route")
    common.add_argument("--threads", type=int, metavar="K", help="worker threads")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="hyperbargmann", description="Radon / Bargmann transform verification suites")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in SUBCOMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=help_text, description=help_text)
        if name == "kappa":
            p.add_argument("--x", type=_vector, help="object point x (maps (x, xi) to hyperplane space)")
            p.add_argument("--xi", type=_vector, help="object covector xi")
            p.add_argument("--point", type=_vector, metavar="W,T,ETA,TAU",
                           help="fiber parameters omega..., t, eta..., tau (maps to Lambda_Phi)")
    return parser


def _kappa_text(args):
    lines = []
    if args.x is not None and args.xi is not None:
        for p in kappa_B_inv(args.x, args.xi):
            lines.append(f"kappa_B^-1(x - i xi): omega={p.omega.tolist()} t={p.t!r} eta={p.eta.tolist()} tau={p.tau!r}")
    if args.point is not None:
        v = args.point
        n = (len(v) - 2) // 2
        if len(v) % 2 or n < 2:
            raise ValueError("--point needs 2n+2 values: omega (n), t, eta (n), tau")
        p = CotangentPointP.from_fiber(v[:n], v[n], v[n + 1:2 * n + 1], v[2 * n + 1])
        q = kappa_B(p)
        lines.append(f"kappa_B: z={q.z.tolist()} zeta={q.zeta_dual.real.tolist()}")
    return lines


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = ex.load_config(args.config, n=args.n, h_list=args.h, out=args.out, filter=args.filter,
                             threads=args.threads)
    except (ValueError, FileNotFoundError) as exc:
        print(f"hyperbargmann: {exc}", file=sys.stderr)
        return 2

    try:
        if args.command == "kappa":
            for line in _kappa_text(args):
                print(line)
        if args.command == "all":
            report = ex.Report("all")
            for name, fn in ex.SUITES.items():
                if name == "wf-scan" and cfg.n != 2:
                    continue
                report.merge(fn(cfg))
        else:
            report = ex.SUITES[args.command](cfg)
        ex.emit_outputs(report, cfg.out, cfg)
    except (ValueError, OSError) as exc:
        print(f"hyperbargmann: {exc}", file=sys.stderr)
        return 2

    for c in sorted(report.criteria, key=lambda c: c.id):
        print(c.line())
    print(f"{'PASS' if report.passed else 'FAIL'}: {len(report.criteria)} criteria, outputs in {cfg.out}")
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
