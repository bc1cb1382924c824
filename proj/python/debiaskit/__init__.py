"""Concept-subspace debiasing for word embeddings.

Thin Python layer over the native ``_debiaskit`` module. Jobs, word sets and
results use the same JSON shapes as the HTTP service, as plain dicts here.
"""
import json
import os

_here = os.path.dirname(__file__)
if "DEBIASKIT_DATA_DIR" not in os.environ and os.path.isdir(os.path.join(_here, "data")):
    os.environ["DEBIASKIT_DATA_DIR"] = os.path.join(_here, "data")

from ._debiaskit import (  # noqa: E402
    DebiasError,
    Embedding,
    bundled_word_list,
    data_dir,
    ect_score,
    export_embedding,
    load_embedding,
    nearest_neighbors,
    parse_embedding,
    weat_effect_size,
)
from . import _debiaskit as _native  # noqa: E402

__all__ = [
    "DebiasError",
    "Embedding",
    "bundled_embedding",
    "bundled_word_list",
    "compare_subspaces",
    "data_dir",
    "ect_score",
    "error_kind",
    "evaluate",
    "export_embedding",
    "identify",
    "load_embedding",
    "nearest_neighbors",
    "parse_embedding",
    "run_job",
    "weat_effect_size",
]


def bundled_embedding():
    """The shipped 300-d vectors."""
    return load_embedding(os.path.join(data_dir(), "gnews300_subset.txt"))


def run_job(embedding, job):
    """Run a debiasing job dict. Returns (output embedding, result dict)."""
    output, result = _native.run_job_json(embedding, json.dumps(job))
    return output, json.loads(result)


def identify(embedding, job, k=10):
    """Concept direction for the job's seeds, with nearest words on each side."""
    return json.loads(_native.identify_json(embedding, json.dumps(job), k))


def evaluate(embedding, sets):
    """WEAT and ECT report for {"weat": {x, y, a, b}, "ect_attributes": [...]}."""
    return json.loads(_native.evaluate_json(embedding, json.dumps(sets)))


def compare_subspaces(embedding, names_f=None, names_m=None):
    """Rows of (method, ECT, WEAT) after one projection per subspace method."""
    names_f = names_f if names_f is not None else bundled_word_list("names_female")
    names_m = names_m if names_m is not None else bundled_word_list("names_male")
    return _native.compare_subspaces(embedding, names_f, names_m)


def error_kind(err):
    """Category string of a DebiasError, e.g. "unknown_token"."""
    return err.args[1] if len(err.args) > 1 else None
