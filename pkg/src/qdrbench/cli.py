"""Command-line entry points: `run`, `gen-dataset`, `reduce`."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import datasets, dimred, harness
from .errors import QdrBenchError


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qdrbench",
        description="Benchmark quantum and classical classifiers under "
                    "dimensionality reduction.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute an experiment suite")
    run.add_argument("--suite", required=True, help="suite JSON file")
    run.add_argument("--out", required=True, help="output directory")
    run.add_argument("--seed", required=True, type=int, help="master seed")
    run.add_argument("--repeats", type=int, default=None,
                     help="override per-experiment repeat count")
    run.add_argument("--parallel", type=int, default=1,
                     help="number of worker processes")

    gen = sub.add_parser("gen-dataset", help="generate a dataset CSV")
    gen.add_argument("--kind", required=True,
                     choices=["linear", "nonlinear", "image4x4"])
    gen.add_argument("--out", required=True, help="output CSV path")
    gen.add_argument("--seed", required=True, type=int)
    gen.add_argument("--samples", type=int, default=None,
                     help="override the default sample count")

    red = sub.add_parser("reduce", help="reduce a dataset CSV to fewer features")
    red.add_argument("--method", required=True,
                     choices=["pca", "tsvd", "tsne", "autoencoder"])
    red.add_argument("--dim", required=True, type=int, help="target dimension")
    red.add_argument("--in", dest="infile", required=True, help="input CSV")
    red.add_argument("--out", required=True, help="output CSV")
    red.add_argument("--seed", type=int, default=0)
    red.add_argument("--perplexity", type=float, default=30.0,
                     help="t-SNE perplexity (ignored by other methods)")
    return parser


_METHOD_NAMES = {
    "pca": "PCA",
    "tsvd": "TruncatedSVD",
    "tsne": "TSNE",
    "autoencoder": "Autoencoder",
}


def _cmd_run(args) -> int:
    payload = harness.run_suite(args.suite, args.out, args.seed,
                                repeats_override=args.repeats,
                                parallel=args.parallel)
    print(f"wrote {len(payload['results'])} result rows to {args.out}")
    return 0


def _cmd_gen_dataset(args) -> int:
    cfg_cls = {
        "linear": datasets.LinearGenConfig,
        "nonlinear": datasets.NonlinearGenConfig,
        "image4x4": datasets.ImageGenConfig,
    }[args.kind]
    kwargs = {"seed": args.seed}
    if args.samples is not None:
        kwargs["n_samples"] = args.samples
    gen = {
        "linear": datasets.gen_linear,
        "nonlinear": datasets.gen_nonlinear,
        "image4x4": datasets.gen_image4x4,
    }[args.kind]
    ds = gen(cfg_cls(**kwargs))
    datasets.to_csv(ds, args.out)
    print(f"wrote {len(ds.y)} samples x {ds.X.shape[1]} features to {args.out}")
    return 0


def _cmd_reduce(args) -> int:
    ds = datasets.from_csv(args.infile)
    spec = dimred.ReductionSpec(method=_METHOD_NAMES[args.method],
                                target_dim=args.dim, seed=args.seed,
                                tsne_perplexity=args.perplexity)
    reduced = dimred.fit_transform(spec, ds.X, np.empty((0, ds.X.shape[1])))
    out = datasets.Dataset(
        X=reduced.train, y=ds.y,
        provenance=ds.provenance | {"reduction": args.method, "dim": args.dim},
    )
    datasets.to_csv(out, args.out)
    print(f"wrote {len(out.y)} samples x {args.dim} features to {args.out}")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return {
            "run": _cmd_run,
            "gen-dataset": _cmd_gen_dataset,
            "reduce": _cmd_reduce,
        }[args.command](args)
    except QdrBenchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
