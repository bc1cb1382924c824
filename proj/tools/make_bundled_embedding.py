#!/usr/bin/env python3
"""Build data/gnews300_subset.txt, the bundled real-vector fixture.

Pulls two wheels from PyPI that ship subsets of the public GoogleNews word2vec
vectors (300-d), merges them, keeps the most frequent lowercase words plus every
token used by the shipped word lists, normalizes each row to unit length and
writes glove_text with 6 significant digits.

    python3 tools/make_bundled_embedding.py [--frequent 2000]
"""
import argparse
import io
import json
import pickle
import urllib.request
import zipfile
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parent.parent
WHEELS = {
    "responsibly": "responsibly/we/data/GoogleNews-vectors-negative300-bolukbasi.bin",
    "wefe": "wefe/datasets/data/test_model.kv",
}


def fetch_wheel(name, cache):
    path = cache / f"{name}.whl"
    if not path.exists():
        meta = json.load(urllib.request.urlopen(f"https://pypi.org/pypi/{name}/json"))
        url = [u["url"] for u in meta["urls"] if u["filename"].endswith(".whl")][0]
        path.write_bytes(urllib.request.urlopen(url).read())
    return zipfile.ZipFile(path)


def read_w2v_bin(blob):
    header, rest = blob.split(b"\n", 1)
    n, d = map(int, header.split())
    words, vecs, p = [], [], 0
    for _ in range(n):
        j = rest.index(b" ", p)
        words.append(rest[p:j].decode("utf8"))
        p = j + 1
        vecs.append(np.frombuffer(rest[p:p + 4 * d], dtype="<f4"))
        p += 4 * d
        if rest[p:p + 1] == b"\n":
            p += 1
    return words, np.array(vecs, dtype=np.float64)


class _Stub:
    def __init__(self, *a, **k):
        pass

    def __setstate__(self, state):
        self.__dict__.update(state)


class _KvUnpickler(pickle.Unpickler):
    def find_class(self, module, name):
        if module.startswith("gensim"):
            return _Stub
        return super().find_class(module, name)


def read_kv(blob):
    kv = _KvUnpickler(io.BytesIO(blob)).load()
    return [str(w) for w in kv.index2word], np.asarray(kv.vectors, dtype=np.float64)


def wordlist_tokens():
    toks = []
    for f in sorted((ROOT / "data" / "wordlists").glob("*.txt")):
        toks += [t.strip() for t in f.read_text().split("\n") if t.strip()]
    return toks


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--frequent", type=int, default=2000)
    ap.add_argument("--cache", default="/tmp/embedding-wheels")
    ap.add_argument("--out", default=str(ROOT / "data" / "gnews300_subset.txt"))
    args = ap.parse_args()
    cache = Path(args.cache)
    cache.mkdir(parents=True, exist_ok=True)

    gw, gv = read_w2v_bin(fetch_wheel("responsibly", cache).read(WHEELS["responsibly"]))
    kw, kv = read_kv(fetch_wheel("wefe", cache).read(WHEELS["wefe"]))
    table = {w: v for w, v in zip(kw, kv)}
    table.update({w: v for w, v in zip(gw, gv)})

    order = [w for w in gw if w.isalpha() and w.islower()][: args.frequent]
    seen = set(order)
    missing = []
    for t in wordlist_tokens():
        if t in seen:
            continue
        if t in table:
            order.append(t)
            seen.add(t)
        else:
            missing.append(t)
    if missing:
        print("not in source vectors:", " ".join(sorted(set(missing))))

    with open(args.out, "w", encoding="utf8", newline="\n") as out:
        for w in order:
            v = table[w] / np.linalg.norm(table[w])
            out.write(w + " " + " ".join(f"{x:.6g}" for x in v) + "\n")
    print(f"wrote {len(order)} x {gv.shape[1]} to {args.out}")


if __name__ == "__main__":
    main()
