"""Trainer command line.

`train` fits an autoencoder on an engine dataset (optionally restricted
to a sample file) and exports embeddings + reconstructions in the
engine's binary formats, plus a checkpoint.  Flags mirror the engine's
style; logs are line-oriented key=value.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .data import load_dataset, load_sample
from .export import export_dea
from .models import SeanetConfig, build_seanet, build_seatrans
from .train import Divergence, load_checkpoint, seasame_train, train


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="seatrain", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="fit a model and export embeddings")
    p.add_argument("--dataset", required=True, help="engine .bin/.meta dataset")
    p.add_argument("--arch", choices=["seanet", "seatrans"], default="seanet")
    p.add_argument("--l", type=int, default=16)
    p.add_argument("--k", type=int, help="residual block count (default by length)")
    p.add_argument("--k2", type=int, default=2, help="attention blocks (seatrans)")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--epochs", type=int, default=30)
    p.add_argument("--lr", type=float, default=1e-2)
    p.add_argument("--batch-series", type=int, default=256)
    p.add_argument("--batch-pairs", type=int, default=256)
    p.add_argument("--sampler", choices=["seasam", "seasame", "uniform"],
                   default="uniform")
    p.add_argument("--sample", help=".idx file of training candidates")
    p.add_argument("--n-prime", type=int,
                   help="training-set size for the composite sampler")
    p.add_argument("--val-fraction", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-sos", action="store_true",
                   help="ablation: disable the SoS scaling framework")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("embed", help="apply a checkpoint to another dataset")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--arch", choices=["seanet", "seatrans"], default="seanet")
    p.add_argument("--stem", default="dea")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_embed)
    return parser


def _split(data: np.ndarray, val_fraction: float, seed: int):
    rng = np.random.Generator(np.random.Philox(key=seed))
    order = rng.permutation(data.shape[0])
    n_val = max(1, int(data.shape[0] * val_fraction))
    return data[order[n_val:]], data[order[:n_val]]


def _cmd_train(args) -> int:
    data, meta = load_dataset(args.dataset)
    cfg = SeanetConfig(m=data.shape[1], l=args.l, k=args.k,
                       k2=args.k2 if args.arch == "seatrans" else 0,
                       alpha=args.alpha, lr=args.lr, epochs=args.epochs,
                       batch_series=args.batch_series, batch_pairs=args.batch_pairs,
                       sos_scaling=not args.no_sos)
    builder = build_seatrans if args.arch == "seatrans" else build_seanet
    model = builder(cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    print(f"train arch={args.arch} n={data.shape[0]} m={cfg.m} l={cfg.l} "
          f"k={cfg.k} k2={cfg.k2} alpha={cfg.alpha} epochs={cfg.epochs} "
          f"sampler={args.sampler} sos={int(cfg.sos_scaling)} seed={args.seed}")

    if args.sampler == "seasame":
        candidates = (load_sample(args.sample) if args.sample
                      else np.arange(data.shape[0]))
        n_prime = args.n_prime or max(2, candidates.size // 2)
        train_pool, val = _split(data, args.val_fraction, args.seed)
        # candidate indices address the full dataset; validation is a held-out
        # slice of it, so candidates are trained on as-is
        history = seasame_train(model, data, candidates, cfg, n_prime, val,
                                seed=args.seed,
                                checkpoint_path=out / "checkpoint.pt", log=print)
    else:
        if args.sample:
            pool = data[load_sample(args.sample)]
        else:
            pool = data
        train_set, val = _split(pool, args.val_fraction, args.seed)
        history = train(model, train_set, val, cfg, seed=args.seed,
                        checkpoint_path=out / "checkpoint.pt", log=print)

    dea_path, recon_path = export_dea(model, data, out, stem="dea", kind=args.arch)
    print(f"export dea={dea_path} recon={recon_path} "
          f"val_lc_first={history.val_lc[0]:.6f} val_lc_last={history.val_lc[-1]:.6f}")
    return 0


def _cmd_embed(args) -> int:
    data, _ = load_dataset(args.dataset)
    builder = build_seatrans if args.arch == "seatrans" else build_seanet
    model = load_checkpoint(args.checkpoint, builder)
    if data.shape[1] != model.cfg.m:
        raise ValueError(f"dataset length {data.shape[1]} but model expects {model.cfg.m}")
    dea_path, recon_path = export_dea(model, data, args.out, stem=args.stem,
                                      kind=args.arch)
    print(f"embed n={data.shape[0]} m={model.cfg.m} l={model.cfg.l} "
          f"dea={dea_path} recon={recon_path}")
    return 0


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Divergence as exc:
        print(f"error=Divergence {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error={type(exc).__name__} {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
