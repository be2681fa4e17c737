"""Training entry point.

    obit-train --data DATASET_DIR --out params.json [--epochs N] [--lr F]
               [--layers K]

Reads a dataset directory exported by the detector CLI, trains the
per-layer scalars, and writes the parameter file the detector loads.
"""

import argparse
import sys

from .data import load_training_set
from .training import DEFAULT_LAYERS, default_init, save_params, train


def build_parser():
    parser = argparse.ArgumentParser(prog="obit-train", description=__doc__)
    parser.add_argument("--data", required=True, help="dataset directory")
    parser.add_argument("--out", required=True, help="output parameter file (JSON)")
    parser.add_argument("--epochs", type=int, default=50)
    parser.add_argument("--lr", type=float, default=1e-3)
    parser.add_argument("--layers", type=int, default=DEFAULT_LAYERS)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--quiet", action="store_true")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        manifest, instances = load_training_set(args.data)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: cannot load dataset: {exc}", file=sys.stderr)
        return 2
    D = manifest["cfg"]["D"]
    init = default_init(instances, layers=args.layers, D=D)

    def progress(epoch, total, loss):
        if not args.quiet:
            print(f"epoch {epoch}/{total}: loss {loss:.4f}", file=sys.stderr)

    result = train(
        instances, init, epochs=args.epochs, lr=args.lr, seed=args.seed, progress=progress
    )
    meta = {
        "trained_on": args.data,
        "count": manifest["count"],
        "snr_range_with_margin_db": manifest.get("snr_range_with_margin_db"),
        "epochs": args.epochs,
        "lr": args.lr,
        "seed": args.seed,
        "initial_loss": result.initial_loss,
        "final_loss": result.final_loss,
        "diverged": result.diverged,
        "conventions": "epochs/batching unspecified upstream: pure SGD, one instance per step",
    }
    save_params(result.params, args.out, meta=meta)
    status = "diverged (wrote last finite checkpoint)" if result.diverged else "done"
    print(
        f"{status}: loss {result.initial_loss:.4f} -> {result.final_loss:.4f}, "
        f"params -> {args.out}"
    )
    return 1 if result.diverged else 0


if __name__ == "__main__":
    sys.exit(main())
