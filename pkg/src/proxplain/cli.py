"""Command-line front end: explain texts and run the evaluation harness.

Output records are newline-delimited JSON with a fixed schema (RECORD_SCHEMA);
given the same seed and the toy backend, repeated runs are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import os
import secrets
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass


from .bridge import BridgeBackend
from .errors import ProxplainError
from .evaluation import EvaluationConfig, derive_instance_seeds, evaluate, report_to_dict
from .exemplars import ExemplarConfig
from .explainer import DEFAULT_EDITION_CAP, ExplainerConfig, Explanation, explain
from .models import build_corpus, load_corpus_file, load_lexicon_file
from .neighborhood import NeighborhoodConfig
from .surrogate import DEFAULT_RIDGE, DEFAULT_SIGMA
from .toydata import DEFAULT_LEXICON, build_toy_backend

SEED_ENV_VAR = "PROXPLAIN_SEED"

RECORD_SCHEMA = {
    "type": "object",
    "required": ["query", "prediction", "intrinsic", "extrinsic",
                 "factuals", "counterfactuals", "editions", "provenance"],
    "properties": {
        "query": {"type": "string"},
        "prediction": {
            "type": "object",
            "required": ["p_pos", "p_neg", "label"],
            "properties": {
                "p_pos": {"type": "number"},
                "p_neg": {"type": "number"},
                "label": {"enum": ["positive", "negative"]},
            },
        },
        "intrinsic": {"type": "array", "items": {
            "type": "object",
            "required": ["token", "weight"],
            "properties": {"token": {"type": "string"}, "weight": {"type": "number"}},
        }},
        "extrinsic": {"type": "array", "items": {
            "type": "object",
            "required": ["token", "weight"],
            "properties": {"token": {"type": "string"}, "weight": {"type": "number"}},
        }},
        "factuals": {"type": "array", "items": {
            "type": "object",
            "required": ["text", "p_pos"],
            "properties": {"text": {"type": "string"}, "p_pos": {"type": "number"}},
        }},
        "counterfactuals": {"type": "array", "items": {
            "type": "object",
            "required": ["text", "p_pos"],
            "properties": {"text": {"type": "string"}, "p_pos": {"type": "number"}},
        }},
        "editions": {"type": "array", "items": {
            "type": "object",
            "required": ["text", "op", "word", "flipped"],
            "properties": {
                "text": {"type": "string"},
                "op": {"enum": ["insert", "replace"]},
                "word": {"type": "string"},
                "flipped": {"type": "boolean"},
            },
        }},
        "provenance": {"type": "object"},
    },
}


@dataclass
class RunConfig:
    backend: str = "toy"
    bridge_cmd: str | None = None
    corpus: str = ""
    lexicon: str | None = None
    decoder: str = "corpus"
    dim: int = 64
    seed: int = 0
    k: int = 25
    s: int = 10
    n: int = 100
    max_iterations: int = 8
    patience: int = 2
    sigma: float = DEFAULT_SIGMA
    ridge: float = DEFAULT_RIDGE
    lam: float = 0.5
    set_size: int = 5
    window: int = 2
    eps: float = 1e-6
    eta: float = 0.1
    eta_high: float = 0.3
    edition_cap: int = DEFAULT_EDITION_CAP
    jobs: int = 1

    def explainer_config(self) -> ExplainerConfig:
        return ExplainerConfig(
            neighborhood=NeighborhoodConfig(k=self.k, s=self.s, n=self.n,
                                            max_iterations=self.max_iterations,
                                            patience=self.patience),
            exemplars=ExemplarConfig(lam=self.lam, set_size=self.set_size),
            sigma=self.sigma, ridge=self.ridge, window=self.window, eps=self.eps,
            eta=self.eta, edition_cap=self.edition_cap,
        )

    def evaluation_config(self) -> EvaluationConfig:
        return EvaluationConfig(eta=self.eta, eta_high=self.eta_high)


def build_backend(config: RunConfig):
    """Construct the model backend and encoded corpus described by the config."""
    if not os.path.exists(config.corpus):
        raise FileNotFoundError(f"corpus file not found: {config.corpus}")
    corpus_texts = load_corpus_file(config.corpus)
    if config.backend == "toy":
        lexicon = DEFAULT_LEXICON
        if config.lexicon:
            if not os.path.exists(config.lexicon):
                raise FileNotFoundError(f"lexicon file not found: {config.lexicon}")
            lexicon = load_lexicon_file(config.lexicon)
        return build_toy_backend(corpus_texts, lexicon, dim=config.dim,
                                 seed=config.seed, decoder=config.decoder)
    if config.backend == "bridge":
        if not config.bridge_cmd:
            raise ProxplainError("--bridge-cmd is required with --backend bridge")
        backend = BridgeBackend(config.bridge_cmd)
        return backend, build_corpus(corpus_texts, backend)
    raise ProxplainError(f"unknown backend {config.backend!r}")


def explanation_record(expl: Explanation) -> dict:
    return {
        "query": " ".join(expl.query),
        "prediction": {"p_pos": expl.prediction.p_pos, "p_neg": expl.prediction.p_neg,
                       "label": expl.prediction.label},
        "intrinsic": [{"token": wi.token, "weight": wi.weight} for wi in expl.intrinsic],
        "extrinsic": [{"token": wi.token, "weight": wi.weight} for wi in expl.extrinsic],
        "factuals": [{"text": " ".join(nb.tokens), "p_pos": nb.p_pos} for nb in expl.factuals],
        "counterfactuals": [{"text": " ".join(nb.tokens), "p_pos": nb.p_pos}
                            for nb in expl.counterfactuals],
        "editions": [{"text": " ".join(ed.tokens), "op": ed.op, "word": ed.word,
                      "flipped": ed.flipped} for ed in expl.editions],
        "provenance": expl.provenance,
    }


def render_pretty(record: dict, eta: float) -> str:
    lines = [
        f"query: {record['query']}",
        f"prediction: {record['prediction']['label']} (p_pos={record['prediction']['p_pos']:.4f})",
        "saliency:",
    ]
    for wi in record["intrinsic"]:
        marker = "*" if abs(wi["weight"]) >= eta else " "
        lines.append(f"  {marker} {wi['token']:<16s} {wi['weight']:+.4f}")
    lines.append("extrinsic words:")
    for wi in record["extrinsic"][:10]:
        marker = "*" if abs(wi["weight"]) >= eta else " "
        lines.append(f"  {marker} {wi['token']:<16s} {wi['weight']:+.4f}")
    lines.append("factuals:")
    for nb in record["factuals"]:
        lines.append(f"  ({nb['p_pos']:.3f}) {nb['text']}")
    lines.append("counterfactuals:")
    for nb in record["counterfactuals"]:
        lines.append(f"  ({nb['p_pos']:.3f}) {nb['text']}")
    if record["editions"]:
        lines.append("editions:")
        for ed in record["editions"]:
            flag = "flips the decision" if ed["flipped"] else "keeps the decision"
            lines.append(f"  [{ed['op']} {ed['word']!r}] {ed['text']}  ({flag})")
    return "\n".join(lines)


# Worker-side state for --jobs: each process builds its own backend. The pid
# check stops forked workers from reusing the parent's world, which with the
# bridge backend would mean several processes sharing one server pipe.
_worker_state: dict = {}


def _get_worker_world(config: RunConfig):
    if _worker_state.get("config") != config or _worker_state.get("pid") != os.getpid():
        _worker_state["world"] = build_backend(config)
        _worker_state["config"] = config
        _worker_state["pid"] = os.getpid()
    return _worker_state["world"]


def _explain_task(config: RunConfig, tokens: list[str], seed: int) -> dict:
    backend, corpus = _get_worker_world(config)
    try:
        expl = explain(tokens, corpus, backend, config.explainer_config(), seed=seed)
        record = explanation_record(expl)
        record["provenance"]["master_seed"] = config.seed
        return {"ok": True, "record": record}
    except ProxplainError as exc:
        return {"ok": False, "record": {"query": " ".join(tokens), "error": str(exc)}}


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV_VAR)
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ProxplainError(f"{SEED_ENV_VAR} must be an integer, got {env!r}")
    seed = secrets.randbelow(2**31)
    print(f"seed not given; drew seed {seed}", file=sys.stderr)
    return seed


def _read_lines(path: str) -> list[list[str]]:
    if not os.path.exists(path):
        raise FileNotFoundError(f"input file not found: {path}")
    return load_corpus_file(path)


def _emit(text: str, out_path: str | None):
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_explain(args) -> int:
    config = _config_from_args(args)
    texts = [t.split(" ") for t in args.text]
    if args.file:
        texts.extend(_read_lines(args.file))
    if not texts:
        raise ProxplainError("nothing to explain: pass texts or --file")

    instance_seeds, _ = derive_instance_seeds(config.seed, len(texts))
    tasks = list(zip(texts, (int(s) for s in instance_seeds)))
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(_explain_task, [config] * len(tasks),
                                    [t for t, _ in tasks], [s for _, s in tasks]))
    else:
        results = [_explain_task(config, t, s) for t, s in tasks]

    failures = sum(1 for r in results if not r["ok"])
    if args.pretty:
        chunks = []
        for r in results:
            if r["ok"]:
                chunks.append(render_pretty(r["record"], config.eta))
            else:
                chunks.append(f"query: {r['record']['query']}\nerror: {r['record']['error']}")
        _emit("\n\n".join(chunks) + "\n", args.out)
    else:
        lines = [json.dumps(r["record"], ensure_ascii=False) for r in results]
        _emit("\n".join(lines) + "\n", args.out)
    return 1 if failures else 0


def _precompute_task(config: RunConfig, tokens: list[str], seed: int):
    backend, corpus = _get_worker_world(config)
    try:
        return ("ok", explain(tokens, corpus, backend, config.explainer_config(), seed=seed))
    except ProxplainError as exc:
        return ("err", str(exc))


def cmd_evaluate(args) -> int:
    config = _config_from_args(args)
    test_texts = _read_lines(args.test_file)
    backend, corpus = build_backend(config)
    vocabulary = sorted({t for text in corpus.texts for t in text})

    if config.jobs > 1:
        # run the expensive per-instance explanations in parallel up front;
        # seeds are pre-derived, so the report matches a sequential run
        explain_seeds, _ = derive_instance_seeds(config.seed, len(test_texts))
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(_precompute_task, [config] * len(test_texts),
                                    test_texts, (int(s) for s in explain_seeds)))
        cache = {(tuple(t), int(s)): r
                 for t, s, r in zip(test_texts, explain_seeds, results)}

        def explain_fn(tokens, seed):
            status, payload = cache[(tuple(tokens), seed)]
            if status == "err":
                raise ProxplainError(payload)
            return payload
    else:
        def explain_fn(tokens, seed):
            return explain(tokens, corpus, backend, config.explainer_config(), seed=seed)

    report = evaluate(test_texts, explain_fn, backend, vocabulary,
                      config.evaluation_config(), master_seed=config.seed)
    payload = report_to_dict(report)
    payload["config"]["backend"] = config.backend
    _emit(json.dumps(payload, ensure_ascii=False, indent=2) + "\n", args.out)
    return 1 if report.failures else 0


def _add_common_flags(p: argparse.ArgumentParser):
    p.add_argument("--backend", choices=["toy", "bridge"], default="toy")
    p.add_argument("--bridge-cmd", default=None, help="command line of a bridge model server")
    p.add_argument("--corpus", required=True, help="pre-tokenized corpus, one sentence per line")
    p.add_argument("--lexicon", default=None, help="toy black-box lexicon (token<TAB>weight)")
    p.add_argument("--decoder", choices=["corpus", "greedy"], default="corpus")
    p.add_argument("--dim", type=int, default=64, help="toy latent dimension")
    p.add_argument("--seed", type=int, default=None,
                   help=f"RNG seed (falls back to ${SEED_ENV_VAR}, then a fresh draw)")
    p.add_argument("--s", type=int, default=10, help="interpolation steps")
    p.add_argument("--k", type=int, default=25, help="landmark set size")
    p.add_argument("--n", type=int, default=100, help="neighbors kept per class")
    p.add_argument("--max-iterations", type=int, default=8)
    p.add_argument("--patience", type=int, default=2)
    p.add_argument("--sigma", type=float, default=DEFAULT_SIGMA, help="kernel width")
    p.add_argument("--lambda", dest="lam", type=float, default=0.5,
                   help="diversity weight for exemplar selection")
    p.add_argument("--set-size", type=int, default=5, help="exemplars per class")
    p.add_argument("--eta", type=float, default=0.1, help="importance threshold")
    p.add_argument("--eta-high", type=float, default=0.3, help="raised threshold for correctness")
    p.add_argument("--out", default=None, help="write output here instead of stdout")
    p.add_argument("--jobs", type=int, default=1, help="parallel workers across input lines")


def _config_from_args(args) -> RunConfig:
    config = RunConfig(
        backend=args.backend, bridge_cmd=args.bridge_cmd, corpus=args.corpus,
        lexicon=args.lexicon, decoder=args.decoder, dim=args.dim,
        seed=_resolve_seed(args), k=args.k, s=args.s, n=args.n,
        max_iterations=args.max_iterations, patience=args.patience,
        sigma=args.sigma, lam=args.lam, set_size=args.set_size,
        eta=args.eta, eta_high=args.eta_high, jobs=args.jobs,
    )
    # validate every sub-config now, before any model is touched
    config.explainer_config()
    config.evaluation_config()
    return config


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="proxplain",
                                     description="Local explanations for text classifiers")
    sub = parser.add_subparsers(dest="command", required=True)

    p_explain = sub.add_parser("explain", help="explain one or more texts")
    _add_common_flags(p_explain)
    p_explain.add_argument("text", nargs="*", help="pre-tokenized texts (space-separated tokens)")
    p_explain.add_argument("--file", default=None, help="file of texts, one per line")
    p_explain.add_argument("--pretty", action="store_true", help="human-readable rendering")
    p_explain.set_defaults(func=cmd_explain)

    p_eval = sub.add_parser("evaluate", help="run the sentence-edition evaluation harness")
    _add_common_flags(p_eval)
    p_eval.add_argument("test_file", help="file of test texts, one per line")
    p_eval.set_defaults(func=cmd_evaluate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ProxplainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
