"""model-server entry point.

Toy-mirror mode rebuilds the client's toy world from the same corpus, lexicon,
dimension, and seed; custom mode mounts a user model from a Python file that
defines `create_model() -> model` with the adapter signature documented in
`protocol.py`.
"""

from __future__ import annotations

import argparse
import importlib.util
import sys

from .protocol import serve
from .toy import ToyMirrorModel, load_corpus, load_lexicon


def _load_custom(path: str):
    spec = importlib.util.spec_from_file_location("model_server_custom", path)
    if spec is None or spec.loader is None:
        raise SystemExit(f"cannot load custom model module: {path}")
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    if not hasattr(module, "create_model"):
        raise SystemExit(f"{path} does not define create_model()")
    return module.create_model()


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="model-server")
    ap.add_argument("--mode", choices=["toy-mirror", "custom"], default="toy-mirror")
    ap.add_argument("--corpus", help="corpus file (toy-mirror mode)")
    ap.add_argument("--lexicon", default=None, help="lexicon file (token<TAB>weight)")
    ap.add_argument("--dim", type=int, default=64)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--decoder", choices=["corpus", "greedy"], default="corpus")
    ap.add_argument("--module", default=None, help="Python file defining create_model()")
    args = ap.parse_args(argv)

    if args.mode == "toy-mirror":
        if not args.corpus:
            ap.error("--corpus is required in toy-mirror mode")
        if not args.lexicon:
            ap.error("--lexicon is required in toy-mirror mode")
        model = ToyMirrorModel(load_corpus(args.corpus), load_lexicon(args.lexicon),
                               dim=args.dim, seed=args.seed, decoder=args.decoder)
    else:
        if not args.module:
            ap.error("--module is required in custom mode")
        model = _load_custom(args.module)

    serve(model, sys.stdin, sys.stdout)
    return 0


if __name__ == "__main__":
    sys.exit(main())
