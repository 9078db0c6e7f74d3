"""Generated corpus: determinism, ground truth, and the on-disk layout."""

import json

import numpy as np

from drazin_lab.corpus import generate_corpus, write_corpus
from drazin_lab.drazin import drazin_index
from drazin_lab.linalg import load_matrix_text


def test_same_seed_same_matrices():
    a = generate_corpus(42, 6)
    b = generate_corpus(42, 6)
    for ga, gb in zip(a, b):
        assert np.array_equal(ga.matrix, gb.matrix)
        assert ga.metadata() == gb.metadata()
    c = generate_corpus(43, 6)
    assert not np.array_equal(a[0].matrix, c[0].matrix)


def test_ground_truth_holds():
    for gm in generate_corpus(5, 40):
        assert 2 <= gm.n <= 12
        assert gm.core_dim + sum(gm.nil_blocks) == gm.n
        assert gm.index == (max(gm.nil_blocks) if gm.nil_blocks else 0)
        assert 1.0 <= gm.cond_s <= 100.0
        # the labeled index is what the engine recomputes from scratch
        assert drazin_index(gm.matrix) == gm.index


def test_population_covers_edge_cases():
    kinds = {"invertible": 0, "nilpotent": 0, "mixed": 0}
    for gm in generate_corpus(11, 120):
        if gm.core_dim == gm.n:
            kinds["invertible"] += 1
        elif gm.core_dim == 0:
            kinds["nilpotent"] += 1
        else:
            kinds["mixed"] += 1
    assert all(v > 0 for v in kinds.values())


def test_write_corpus_round_trip(tmp_path):
    out = tmp_path / "corpus"
    paths = write_corpus(out, seed=8, count=3)
    assert len(paths) == 6  # matrix text + json sidecar per sample
    samples = generate_corpus(8, 3)
    for i, gm in enumerate(samples):
        M = load_matrix_text(out / f"matrix_{i:04d}.txt")
        assert np.array_equal(M, gm.matrix)
        meta = json.loads((out / f"matrix_{i:04d}.json").read_text())
        assert meta["index"] == gm.index
        assert meta["n"] == gm.n
        assert meta["seed"] == 8 and meta["position"] == i


def test_write_corpus_regeneration_is_byte_identical(tmp_path):
    d1, d2 = tmp_path / "one", tmp_path / "two"
    write_corpus(d1, seed=21, count=2)
    write_corpus(d2, seed=21, count=2)
    for name in sorted(p.name for p in d1.iterdir()):
        assert (d1 / name).read_bytes() == (d2 / name).read_bytes()
