"""Serving the models from another process.

Writes a corpus and lexicon to disk, launches the reference model server
(`model-server`, from the separate proxplain-server package) as a child
process, and runs the full pipeline through the line-delimited wire protocol.
The explanation matches the in-process toy backend token for token.
"""

import shutil
import sys
import tempfile
from pathlib import Path

from proxplain.bridge import BridgeBackend
from proxplain.explainer import ExplainerConfig, explain
from proxplain.models import build_corpus
from proxplain.neighborhood import NeighborhoodConfig
from proxplain.toydata import DEFAULT_LEXICON, build_toy_backend, make_review_corpus

if shutil.which("model-server") is None:
    sys.exit("model-server not installed; run `pip install -e server/` first")

workdir = Path(tempfile.mkdtemp())
texts = make_review_corpus(150, seed=7)
corpus_path = workdir / "corpus.txt"
corpus_path.write_text("\n".join(" ".join(t) for t in texts) + "\n", encoding="utf-8")
lexicon_path = workdir / "lexicon.tsv"
lexicon_path.write_text("".join(f"{t}\t{w}\n" for t, w in DEFAULT_LEXICON.items()),
                        encoding="utf-8")

command = (f"model-server --mode toy-mirror --corpus {corpus_path} "
           f"--lexicon {lexicon_path} --dim 64 --seed 0")
print(f"launching: {command}\n")
bridge = BridgeBackend(command)
print(f"handshake: latent_dim={bridge.latent_dim}, "
      f"deterministic={bridge.deterministic_decoder}\n")

query = ["the", "service", "was", "rude", "."]
config = ExplainerConfig(neighborhood=NeighborhoodConfig(k=8, s=6, n=40, max_iterations=3))

remote = explain(query, build_corpus(texts, bridge), bridge, config, seed=11)
toy_backend, toy_corpus = build_toy_backend(texts, DEFAULT_LEXICON, dim=64, seed=0)
local = explain(query, toy_corpus, toy_backend, config, seed=11)

print(f"query: {' '.join(query)}  ->  {remote.prediction.label}")
print("counterfactuals through the bridge:")
for nb in remote.counterfactuals:
    print(f"  {' '.join(nb.tokens)}")
same = [nb.tokens for nb in remote.counterfactuals] == [nb.tokens for nb in local.counterfactuals]
print(f"\ntoken-identical with the in-process backend: {same}")
bridge.close()
