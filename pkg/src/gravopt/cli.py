"""Command-line front end: response curves, training runs, optimizer
comparisons, gradient checks, and IDX file inspection.

Every report path writes delimited CSV output and, unless --no-figures
is given, renders matplotlib PNGs into the same directory.

Exit codes: 0 success, 2 configuration or argument errors, 3 data-format
or I/O errors, 4 numeric failures.
"""

import argparse
import os
import sys

import numpy as np

from . import harness, nn
from .data import IMAGE_MAGIC, idx_header
from .errors import ConfigError, FormatError, NumericError
from .optim import response_curve
from .seeding import STREAM_MODEL, STREAM_SHUFFLE, derive_subseed, rng_from

CURVE_HEADER = "g,gravity_dw,gd_dw"


def build_parser():
    parser = argparse.ArgumentParser(
        prog="gravopt",
        description="Bounded-step gradient optimization: train, compare, inspect.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("curve", help="tabulate the single-step response curve")
    p.add_argument("--learning-rate", type=float, default=0.1)
    p.add_argument("--max-step-grad", type=float, default=1.0,
                   help="gradient magnitude at which the step peaks")
    p.add_argument("--g-min", type=float, default=-6.0)
    p.add_argument("--g-max", type=float, default=6.0)
    p.add_argument("--points", type=int, default=241)
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--no-figures", action="store_true",
                   help="write only the CSV, no PNG")
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("train", help="run one training job from a JSON config")
    p.add_argument("config", help="path to a run config JSON file")
    p.add_argument("--out", help="override the config's out_dir")
    p.add_argument("--seed", type=int, help="override the config's master seed")
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("compare", help="train several configs on shared data")
    p.add_argument("configs", nargs="+", help="two or more run config JSON files")
    p.add_argument("--out", help="directory for per-run and comparison artifacts")
    p.add_argument("--seed", type=int, help="override every config's master seed")
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("gradcheck",
                       help="compare analytic and numeric gradients on a small net")
    p.add_argument("--dims", default="8,8,4",
                   help="comma-separated layer widths, input first (default 8,8,4)")
    p.add_argument("--batch", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--step", type=float, default=1e-6,
                   help="central-difference step size")
    p.add_argument("--tolerance", type=float, default=1e-5)
    p.set_defaults(func=cmd_gradcheck)

    p = sub.add_parser("idx-info", help="print header info of IDX data files")
    p.add_argument("paths", nargs="+")
    p.set_defaults(func=cmd_idx_info)
    return parser


def cmd_curve(args):
    if args.points < 2:
        raise ConfigError(f"--points must be at least 2, got {args.points}")
    if not args.g_max > args.g_min:
        raise ConfigError(f"--g-max ({args.g_max}) must exceed --g-min ({args.g_min})")
    grid = np.linspace(args.g_min, args.g_max, args.points)
    rows = [(g, dw, -args.learning_rate * g)
            for g, dw in response_curve(args.learning_rate, args.max_step_grad, grid)]
    os.makedirs(args.out, exist_ok=True)
    csv_path = os.path.join(args.out, "curve.csv")
    lines = [CURVE_HEADER] + [f"{g:.9g},{dw:.9g},{gd:.9g}" for g, dw, gd in rows]
    with open(csv_path, "w", encoding="utf-8", newline="") as f:
        f.write("\n".join(lines) + "\n")
    print(f"wrote {csv_path}")
    if not args.no_figures:
        from .figures import render_curve_png
        png_path = os.path.join(args.out, "curve.png")
        render_curve_png(rows, png_path)
        print(f"wrote {png_path}")
    return 0


def cmd_train(args):
    config = harness.load_run_config(args.config)
    if args.seed is not None:
        config.seed = args.seed
    if args.out is not None:
        config.out_dir = args.out
    log = harness.train(config)
    for r in log.records:
        print(f"epoch {r.epoch}: train_loss={r.train_loss:.6f} "
              f"train_acc={r.train_acc:.4f} val_loss={r.val_loss:.6f} "
              f"val_acc={r.val_acc:.4f}")
    if config.out_dir:
        print(f"wrote {os.path.join(config.out_dir, 'metrics.csv')}")
        if not args.no_figures:
            from .figures import render_training_png
            png_path = os.path.join(config.out_dir, "training.png")
            render_training_png(log, png_path, title=log.metadata["optimizer"])
            print(f"wrote {png_path}")
    return 0


def cmd_compare(args):
    configs = [harness.load_run_config(path) for path in args.configs]
    if args.seed is not None:
        for config in configs:
            config.seed = args.seed
    labels, logs, summary = harness.compare(configs, out_dir=args.out)
    print("optimizer,best_val_acc,final_val_loss")
    for row in summary:
        print(f"{row['optimizer']},{row['best_val_acc']:.4f},{row['final_val_loss']:.6f}")
    if args.out:
        print(f"wrote {os.path.join(args.out, 'comparison.csv')}")
        if not args.no_figures:
            from .figures import render_comparison_png
            png_path = os.path.join(args.out, "comparison.png")
            render_comparison_png(labels, logs, png_path)
            print(f"wrote {png_path}")
    return 0


def cmd_gradcheck(args):
    try:
        dims = [int(part) for part in args.dims.split(",")]
    except ValueError:
        raise ConfigError(f"--dims must be comma-separated integers, got {args.dims!r}")
    if len(dims) < 2:
        raise ConfigError(f"--dims needs at least two widths, got {args.dims!r}")
    if args.batch < 1:
        raise ConfigError(f"--batch must be positive, got {args.batch}")
    final = len(dims) - 2
    specs = [nn.LayerSpec(a, b, "identity" if i == final else "relu")
             for i, (a, b) in enumerate(zip(dims, dims[1:]))]
    model = nn.model_init(specs, derive_subseed(args.seed, STREAM_MODEL))
    rng = rng_from(derive_subseed(args.seed, STREAM_SHUFFLE))
    X = rng.uniform(0.0, 1.0, size=(args.batch, dims[0]))
    labels = rng.integers(0, dims[-1], size=args.batch)
    worst, per_tensor = nn.gradient_check(model, X, labels, step=args.step)
    for i, rel in enumerate(per_tensor):
        print(f"tensor {i}: max relative error {rel:.3e}")
    print(f"max relative error {worst:.3e} (tolerance {args.tolerance:g})")
    if worst < args.tolerance:
        print("gradcheck PASS")
        return 0
    print("gradcheck FAIL", file=sys.stderr)
    return 4


def cmd_idx_info(args):
    for path in args.paths:
        magic, dims = idx_header(path)
        kind = "images" if magic == IMAGE_MAGIC else "labels"
        shape = "x".join(str(d) for d in dims)
        print(f"{path}: {kind} magic=0x{magic:08x} dims={shape}")
    return 0


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FormatError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except NumericError as e:
        print(f"error: {e}", file=sys.stderr)
        return 4
    except (ConfigError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


def entrypoint():
    sys.exit(main())
