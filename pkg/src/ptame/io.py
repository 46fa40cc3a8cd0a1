"""JSON serialization of words, polynomials, permutations and reports."""
from __future__ import annotations

import json
import re
from pathlib import Path
from typing import Iterable

import numpy as np

from .ffield import FieldCtx, ctx_for
from .mpoly import LocalizedPoly, MPoly
from .permgroup import Perm
from .polymap import Affine, Elementary, Scale, Swap, TameWord, VarPerm

SCHEMA_VERSION = 1


def poly_to_json(f) -> dict:
    if isinstance(f, LocalizedPoly):
        return {"num": f.numerator.to_literal(), "t": f.denom_power, "g": f.g.to_literal()}
    return {"poly": f.to_literal()}


def poly_from_json(ctx: FieldCtx, nvars: int, obj: dict):
    if "num" in obj:
        num = MPoly.from_literal(ctx, nvars, obj["num"], base_coeff=False)
        g = MPoly.from_literal(ctx, 1, obj["g"])
        return LocalizedPoly(num, int(obj["t"]), g)
    return MPoly.from_literal(ctx, nvars, obj["poly"], base_coeff=False)


def gen_to_json(g) -> dict:
    if isinstance(g, Elementary):
        return {"kind": "elementary", "target": g.target, **poly_to_json(g.f)}
    if isinstance(g, Swap):
        return {"kind": "swap", "i": g.i}
    if isinstance(g, VarPerm):
        return {"kind": "varperm", "sigma": list(g.sigma)}
    if isinstance(g, Scale):
        return {"kind": "scale", "i": g.i, "a": g.a}
    if isinstance(g, Affine):
        return {"kind": "affine", "matrix": [list(r) for r in g.matrix], "shift": list(g.shift)}
    raise TypeError(f"cannot serialize {g!r}")


def gen_from_json(ctx: FieldCtx, width: int, obj: dict):
    kind = obj["kind"]
    if kind == "elementary":
        return Elementary(int(obj["target"]), poly_from_json(ctx, width, obj))
    if kind == "swap":
        return Swap(int(obj["i"]))
    if kind == "varperm":
        return VarPerm(tuple(int(x) for x in obj["sigma"]))
    if kind == "scale":
        return Scale(int(obj["i"]), int(obj["a"]), ctx)
    if kind == "affine":
        return Affine(tuple(tuple(int(x) for x in r) for r in obj["matrix"]),
                      tuple(int(x) for x in obj["shift"]), ctx)
    raise ValueError(f"unknown generator kind {kind!r}")


def word_to_json(w: TameWord) -> dict:
    return {"q": w.ctx.q, "m": w.ctx.m, "n": w.n, "param": w.param,
            "gens": [gen_to_json(g) for g in w.gens]}


def word_from_json(obj: dict, ctx: FieldCtx | None = None) -> TameWord:
    ctx = ctx or ctx_for(int(obj["q"]), int(obj["m"]))
    n = int(obj["n"])
    param = bool(obj.get("param", False))
    width = n + (1 if param else 0)
    return TameWord(ctx, n, [gen_from_json(ctx, width, g) for g in obj["gens"]], param)


def read_words(path, ctx: FieldCtx | None = None, n: int | None = None) -> list[TameWord]:
    """Read a word file.

    Two layouts are accepted: one whole word object (with "gens") per line, or
    one generator object per line forming a single word, optionally preceded by
    a header line such as {"param": true} (which may also carry q, m, n).
    """
    objs = [json.loads(line) for line in Path(path).read_text().splitlines() if line.strip()]
    if not objs:
        return []
    if all("gens" in o for o in objs):
        return [word_from_json(o, ctx) for o in objs]
    param = False
    if "kind" not in objs[0]:
        head = objs.pop(0)
        param = bool(head.get("param", False))
        n = int(head.get("n", n)) if head.get("n", n) is not None else None
        if ctx is None and "q" in head:
            ctx = ctx_for(int(head["q"]), int(head.get("m", 1)))
    if ctx is None or n is None:
        raise ValueError("generator-per-line word files need q, m and n")
    width = n + (1 if param else 0)
    return [TameWord(ctx, n, [gen_from_json(ctx, width, o) for o in objs], param)]


def write_words(path, words: Iterable[TameWord]):
    with open(path, "w") as fh:
        for w in words:
            fh.write(json.dumps(word_to_json(w), sort_keys=True) + "\n")


def write_generator_lines(path, w: TameWord):
    """Single word, one generator per line, with a header line."""
    with open(path, "w") as fh:
        fh.write(json.dumps({"param": w.param, "q": w.ctx.q, "m": w.ctx.m, "n": w.n}) + "\n")
        for g in w.gens:
            fh.write(json.dumps(gen_to_json(g), sort_keys=True) + "\n")


_TERM = re.compile(r"^(?:(\d+)\*?)?(?:Z(?:\^(\d+))?)?$")


def parse_univariate(ctx: FieldCtx, text: str) -> MPoly:
    """Polynomial in Z with integer coefficients, e.g. "Z^2+1", "2*Z^3+Z", or "[1,0,1]" (low first)."""
    text = text.replace(" ", "")
    if text.startswith("["):
        coeffs = json.loads(text)
        return MPoly(ctx, 1, {(k,): ctx.from_int(int(c)) for k, c in enumerate(coeffs)})
    terms: dict = {}
    for part in re.split(r"\+", text.replace("-", "+-")):
        if not part:
            continue
        sign = 1
        if part.startswith("-"):
            sign, part = -1, part[1:]
        mt = _TERM.match(part)
        if not mt or not part:
            raise ValueError(f"cannot parse term {part!r}")
        coef, exp = mt.group(1), mt.group(2)
        has_z = "Z" in part
        k = int(exp) if exp else (1 if has_z else 0)
        c = ctx.from_int(sign * int(coef) if coef else sign)
        terms[(k,)] = ctx.add(terms.get((k,), 0), c)
    return MPoly(ctx, 1, terms)


def parse_point(text: str) -> tuple:
    return tuple(int(x) for x in text.split(",") if x.strip())


def perm_to_json(p: Perm) -> dict:
    return {"degree": p.degree, "images": [int(x) for x in p.images]}


def perm_from_json(obj: dict) -> Perm:
    return Perm(np.asarray(obj["images"], dtype=np.int64))


def _default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def dumps_report(data: dict) -> str:
    body = {"schema_version": SCHEMA_VERSION, **data}
    return json.dumps(body, sort_keys=True, indent=2, default=_default)


def write_report(path, data: dict):
    Path(path).write_text(dumps_report(data) + "\n")


def table_lines(data: dict, prefix: str = "") -> list[str]:
    """Flatten a report into 'key: value' lines."""
    out = []
    for k in sorted(data):
        v = data[k]
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out += table_lines(v, key + ".")
        else:
            out.append(f"{key}: {json.dumps(v, default=_default) if isinstance(v, (list, tuple)) else v}")
    return out
