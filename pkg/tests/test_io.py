import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ptame import io
from ptame.acceptance import random_word
from ptame.constructions.mimick import nagata_factorization
from ptame.ffield import ctx_for
from ptame.permgroup import Perm
from ptame.polymap import Affine, Scale, TameWord, VarPerm, level_domain


def _same(a: TameWord, b: TameWord):
    pts = level_domain(a.ctx, a.width)[1]
    if a.param:
        return all(np.array_equal(a.specialize(c).apply(level_domain(a.ctx, a.n)[1]),
                                  b.specialize(c).apply(level_domain(a.ctx, a.n)[1]))
                   for c in range(1, a.ctx.size))
    return np.array_equal(a.apply(pts), b.apply(pts))


@given(st.integers(0, 2**32 - 1))
def test_word_json_round_trip(seed):
    rng = np.random.default_rng(seed)
    ctx = ctx_for(2, 2)
    w = random_word(ctx, 2, rng)
    back = io.word_from_json(json.loads(json.dumps(io.word_to_json(w))))
    assert io.word_to_json(back) == io.word_to_json(w)
    assert _same(w, back)


def test_all_generator_kinds_round_trip(tmp_path):
    ctx = ctx_for(3, 1)
    A = Affine(((1, 1), (0, 1)), (2, 0), ctx)
    w = TameWord(ctx, 2, [A, Scale(1, 2, ctx), VarPerm((1, 0))])
    path = tmp_path / "w.jsonl"
    io.write_words(path, [w, w.inverse()])
    back = io.read_words(path)
    assert len(back) == 2 and _same(back[0], w) and _same(back[1], w.inverse())


def test_generator_per_line_layout(tmp_path):
    ctx = ctx_for(3, 1)
    Nz = nagata_factorization(ctx)
    path = tmp_path / "n.jsonl"
    io.write_generator_lines(path, Nz)
    (back,) = io.read_words(path)
    assert back.param and _same(back, Nz)
    # bare generator lines need the field and arity from the caller
    bare = tmp_path / "bare.jsonl"
    bare.write_text("\n".join(path.read_text().splitlines()[1:]) + "\n")
    with pytest.raises(ValueError):
        io.read_words(bare)
    (w,) = io.read_words(bare, ctx, 3)
    assert w.n == 3 and not w.param


def test_empty_file(tmp_path):
    p = tmp_path / "e.jsonl"
    p.write_text("\n")
    assert io.read_words(p) == []


def test_parse_univariate():
    ctx = ctx_for(3, 2)
    g = io.parse_univariate(ctx, "Z^2+1")
    assert [g.eval([c]) for c in range(9)].count(0) == 2
    assert io.parse_univariate(ctx, "[1,0,1]") == g
    assert io.parse_univariate(ctx, "2*Z^3 - Z") == io.parse_univariate(ctx, "[0,2,0,2]")
    with pytest.raises(ValueError):
        io.parse_univariate(ctx, "Y^2")


def test_perm_and_report_serialization(tmp_path):
    p = Perm(np.array([2, 0, 1]))
    assert io.perm_from_json(io.perm_to_json(p)) == p
    text = io.dumps_report({"x": np.int64(3), "arr": np.arange(2)})
    obj = json.loads(text)
    assert obj["schema_version"] == io.SCHEMA_VERSION and obj["x"] == 3 and obj["arr"] == [0, 1]
    assert io.table_lines({"a": {"b": 1}, "c": [1, 2]}) == ["a.b: 1", "c: [1, 2]"]
