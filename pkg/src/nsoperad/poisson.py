"""The Poisson operad with a bracket of degree m = d-1.

Arity-n elements are multilinear polynomials in letters x_1..x_n (degree 0)
built from a graded-commutative product and a bracket of degree m.  The
normal form is a product of blocks ordered by their minimum letter; each
block is a left-normed bracket word whose first letter is the block minimum.

Internally a monomial is a tuple of blocks, a block is a tuple of letters,
and an element is a dict ``{monomial: Fraction}``.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Mapping

from .exactla import axpy
from .operad import FinOperad, NormalizedSupport, build_operad

CONVENTIONS = ("infix", "prefix")


class NonMultilinear(ValueError):
    pass


class IndexOutOfRange(IndexError):
    pass


def _sign(k: int) -> int:
    return -1 if k % 2 else 1


# ------------------------------------------------------------ data types

@dataclass(frozen=True)
class PoissonMonomial:
    arity: int
    m: int
    blocks: tuple

    def __post_init__(self):
        letters = sorted(x for b in self.blocks for x in b)
        if letters != list(range(1, self.arity + 1)):
            raise NonMultilinear(f"letters {letters} are not exactly 1..{self.arity}")
        mins = [b[0] for b in self.blocks]
        if any(not b for b in self.blocks) or mins != sorted(mins) or any(b[0] != min(b) for b in self.blocks):
            raise ValueError("monomial is not in normal form")

    @property
    def degree(self) -> int:
        return self.m * (self.arity - len(self.blocks))

    def __str__(self) -> str:
        return monomial_label(self.blocks)


class PoissonElement:
    """Rational combination of normal monomials of a fixed arity."""

    def __init__(self, arity: int, m: int, terms: Mapping[tuple, Fraction] | None = None):
        self.arity = arity
        self.m = m
        self.terms = {k: Fraction(v) for k, v in (terms or {}).items() if v}
        for mono in self.terms:
            PoissonMonomial(arity, m, mono)

    def monomials(self) -> list[PoissonMonomial]:
        return [PoissonMonomial(self.arity, self.m, k) for k in sorted(self.terms)]

    def coefficient(self, blocks) -> Fraction:
        return self.terms.get(tuple(tuple(b) for b in blocks), Fraction(0))

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "PoissonElement") -> "PoissonElement":
        out = dict(self.terms)
        axpy(out, 1, other.terms)
        return PoissonElement(self.arity, self.m, out)

    def __neg__(self) -> "PoissonElement":
        return PoissonElement(self.arity, self.m, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "PoissonElement") -> "PoissonElement":
        return self + (-other)

    def __rmul__(self, c) -> "PoissonElement":
        return PoissonElement(self.arity, self.m, {k: c * v for k, v in self.terms.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, PoissonElement):
            return NotImplemented
        return (self.arity, self.m, self.terms) == (other.arity, other.m, other.terms)

    def __hash__(self):
        return hash((self.arity, self.m, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = [f"{c}*{monomial_label(k)}" for k, c in sorted(self.terms.items())]
        return " + ".join(parts)


# ------------------------------------------------------------ rewriting core

def _block_deg(block, m: int) -> int:
    return m * (len(block) - 1)


def _mono_deg(mono, m: int) -> int:
    return m * sum(len(b) - 1 for b in mono)


def _sort_blocks(blocks: list, m: int) -> tuple[int, tuple]:
    """Sort a product of blocks by minimum letter; returns (sign, sorted blocks)."""
    order = sorted(range(len(blocks)), key=lambda j: blocks[j][0])
    odd = [_block_deg(b, m) % 2 for b in blocks]
    inv = 0
    for a in range(len(order)):
        for b in range(a + 1, len(order)):
            if order[a] > order[b] and odd[order[a]] and odd[order[b]]:
                inv += 1
    return _sign(inv), tuple(blocks[j] for j in order)


def product(x: Mapping, y: Mapping, m: int) -> dict:
    out: dict = {}
    for a, ca in x.items():
        for b, cb in y.items():
            s, mono = _sort_blocks(list(a) + list(b), m)
            out[mono] = out.get(mono, 0) + s * ca * cb
    return {k: v for k, v in out.items() if v}


@lru_cache(maxsize=None)
def _embed_word(word: tuple, m: int) -> tuple:
    """Associative expansion of a left-normed bracket word (letters have degree m)."""
    if len(word) == 1:
        return ((word, 1),)
    left = dict(_embed_word(word[:-1], m))
    last = word[-1]
    lam_u = m * (len(word) - 1)
    s = -_sign(lam_u * m)
    out: dict = {}
    for w, c in left.items():
        out[w + (last,)] = out.get(w + (last,), 0) + c
        out[(last,) + w] = out.get((last,) + w, 0) + s * c
    return tuple((k, v) for k, v in out.items() if v)


def _lie_bracket_words(u: tuple, v: tuple, m: int) -> dict:
    """[u, v] for left-normed words, expressed in left-normed min-first words."""
    eu, ev = _embed_word(u, m), _embed_word(v, m)
    lam_u, lam_v = m * len(u), m * len(v)
    s = -_sign(lam_u * lam_v)
    first = min(min(u), min(v))
    out: dict = {}
    for a, ca in eu:
        for b, cb in ev:
            w = a + b
            if w[0] == first:
                out[w] = out.get(w, 0) + ca * cb
            w = b + a
            if w[0] == first:
                out[w] = out.get(w, 0) + s * ca * cb
    return {k: v for k, v in out.items() if v}


def _bracket_mono(a: tuple, b: tuple, m: int) -> dict:
    """[A, B] for normal monomials A, B via the Leibniz rule."""
    if not a or not b:
        return {}
    if len(b) > 1:
        deg_a = _mono_deg(a, m)
        out: dict = {}
        acc = 0
        for j, bj in enumerate(b):
            s = _sign((deg_a + m) * acc)
            inner = _bracket_mono(a, (bj,), m)
            for mono, c in inner.items():
                for term, c2 in product(product({b[:j]: 1}, {mono: 1}, m), {b[j + 1:]: 1}, m).items():
                    out[term] = out.get(term, 0) + s * c * c2
            acc += _block_deg(bj, m)
        return {k: v for k, v in out.items() if v}
    # b is a single Lie word
    if len(a) > 1:
        deg_a, deg_b = _mono_deg(a, m), _block_deg(b[0], m)
        flip = -_sign((deg_a + m) * (deg_b + m))
        return {k: flip * v for k, v in _bracket_mono(b, a, m).items() if v}
    lie = _lie_bracket_words(a[0], b[0], m)
    return {(w,): c for w, c in lie.items()}


def bracket(x: Mapping, y: Mapping, m: int) -> dict:
    out: dict = {}
    for a, ca in x.items():
        for b, cb in y.items():
            for k, c in _bracket_mono(a, b, m).items():
                out[k] = out.get(k, 0) + c * ca * cb
    return {k: v for k, v in out.items() if v}


# ------------------------------------------------------------ expressions

@dataclass(frozen=True)
class Letter:
    index: int


@dataclass(frozen=True)
class Bracket:
    left: object
    right: object


@dataclass(frozen=True)
class Product:
    left: object
    right: object


@dataclass(frozen=True)
class One:
    pass


@dataclass(frozen=True)
class Const:
    """An already-normal element used as a leaf."""
    terms: tuple  # ((monomial, coef), ...)


def letters_of(e) -> list[int]:
    if isinstance(e, Letter):
        return [e.index]
    if isinstance(e, (Bracket, Product)):
        return letters_of(e.left) + letters_of(e.right)
    if isinstance(e, Const):
        seen = set()
        for mono, _ in e.terms:
            seen |= {x for b in mono for x in b}
        return sorted(seen)
    return []


def _eval(e, m: int) -> dict:
    if isinstance(e, Letter):
        return {((e.index,),): Fraction(1)}
    if isinstance(e, One):
        return {(): Fraction(1)}
    if isinstance(e, Const):
        return dict(e.terms)
    if isinstance(e, Product):
        return product(_eval(e.left, m), _eval(e.right, m), m)
    if isinstance(e, Bracket):
        return bracket(_eval(e.left, m), _eval(e.right, m), m)
    raise TypeError(f"not an expression: {e!r}")


def normalize(e, m: int) -> PoissonElement:
    """Rewrite a multilinear bracket/product expression into normal form."""
    if isinstance(e, str):
        e = parse_expression(e)
    ls = letters_of(e)
    if sorted(ls) != list(range(1, len(ls) + 1)):
        raise NonMultilinear(f"letters {ls} are not a permutation of 1..{len(ls)}")
    return PoissonElement(len(ls), m, _eval(e, m))


_TOKEN = re.compile(r"\s*(x\d+|\[|\]|,|\*|\.|\(|\)|1)")


def parse_expression(text: str):
    """Parse e.g. ``[x1,x2x3]`` or ``[[x1,x3],x2]*x4``; juxtaposition is product."""
    toks = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        mt = _TOKEN.match(text, pos)
        if not mt:
            raise ValueError(f"cannot parse {text[pos:]!r}")
        toks.append(mt.group(1))
        pos = mt.end()
    toks.append(None)
    i = 0

    def peek():
        return toks[i]

    def take(expected=None):
        nonlocal i
        t = toks[i]
        if expected is not None and t != expected:
            raise ValueError(f"expected {expected!r}, found {t!r}")
        i += 1
        return t

    def atom():
        t = peek()
        if t is None:
            raise ValueError("unexpected end of expression")
        if t.startswith("x"):
            take()
            return Letter(int(t[1:]))
        if t == "1":
            take()
            return One()
        if t == "(":
            take()
            e = prod()
            take(")")
            return e
        if t == "[":
            take()
            a = prod()
            take(",")
            b = prod()
            take("]")
            return Bracket(a, b)
        raise ValueError(f"unexpected token {t!r}")

    def prod():
        e = atom()
        while peek() is not None and peek() not in ("]", ",", ")"):
            if peek() in ("*", "."):
                take()
            e = Product(e, atom())
        return e

    e = prod()
    if peek() is not None:
        raise ValueError(f"trailing input at {peek()!r}")
    return e


def monomial_expression(blocks) -> object:
    """Expression tree of a normal monomial: product of left-normed words."""
    if not blocks:
        return One()
    words = []
    for b in blocks:
        e = Letter(b[0])
        for x in b[1:]:
            e = Bracket(e, Letter(x))
        words.append(e)
    out = words[0]
    for w in words[1:]:
        out = Product(out, w)
    return out


def monomial_label(blocks) -> str:
    if not blocks:
        return "1"

    def word(b):
        s = f"x{b[0]}"
        for x in b[1:]:
            s = f"[{s},x{x}]"
        return s
    return ".".join(word(b) for b in blocks)


# ------------------------------------------------------------ basis

def _set_partitions(items: list) -> Iterator[list[list]]:
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        yield [[first]] + part
        for j in range(len(part)):
            yield part[:j] + [[first] + part[j]] + part[j + 1:]


def normal_monomials(n: int) -> list[tuple]:
    """All normal monomials of arity n, in a fixed canonical order."""
    out = []
    for part in _set_partitions(list(range(1, n + 1))):
        part = sorted((sorted(b) for b in part), key=lambda b: b[0])
        choices = [[(b[0],) + p for p in itertools.permutations(b[1:])] for b in part]
        for combo in itertools.product(*choices):
            out.append(tuple(combo))
    out.sort(key=lambda mono: (n - len(mono), mono))
    return out


def poincare_coefficients(n: int, m: int) -> dict[int, int]:
    """Degree -> dimension from the product formula Π_{i<n} (1 + i t^m)."""
    poly = {0: 1}
    for i in range(1, n):
        new: dict = {}
        for k, c in poly.items():
            new[k] = new.get(k, 0) + c
            new[k + m] = new.get(k + m, 0) + i * c
        poly = new
    return poly


# ------------------------------------------------------------ composition

def _relabel(mono: tuple, f) -> tuple:
    return tuple(tuple(f(x) for x in b) for b in mono)


def _prefix_sign(mono: tuple, m: int) -> int:
    # moving each bracket symbol in front of its left operand: left operand of the t-th bracket has t letters
    return _sign(sum(m * m * (t - 1) for b in mono for t in range(1, len(b))))


def compose_monomials(w: tuple, n: int, i: int, v: tuple, k: int, m: int, convention: str = "infix") -> dict:
    """Substitute monomial v (arity k) for x_i in monomial w (arity n) and normalize."""
    if not 1 <= i <= n:
        raise IndexOutOfRange(f"position {i} outside arity {n}")
    deg_v = _mono_deg(v, m)
    right = 0
    seen = False
    for b in w:
        if seen:
            right += len(b) - 1
        elif i in b:
            r = b.index(i) + 1
            right += len(b) - r
            seen = True
    sign = _sign(deg_v * m * right)
    v_rel = _relabel(v, lambda x: x + i - 1)
    leaf = Const(((v_rel, Fraction(1)),))

    def sub(e):
        if isinstance(e, Letter):
            return leaf if e.index == i else e
        if isinstance(e, Bracket):
            return Bracket(sub(e.left), sub(e.right))
        if isinstance(e, Product):
            return Product(sub(e.left), sub(e.right))
        return e
    # substitute first, then shift the letters after position i
    expr = _relabel_expr(sub(monomial_expression(w)), i, k)
    res = _eval(expr, m)
    if convention == "prefix":
        pre = _prefix_sign(w, m) * _prefix_sign(v, m)
        return {mono: sign * pre * _prefix_sign(mono, m) * c for mono, c in res.items()}
    if convention != "infix":
        raise ValueError(f"unknown sign convention {convention!r}")
    return {mono: sign * c for mono, c in res.items()}


def _relabel_expr(e, i: int, k: int):
    if isinstance(e, Letter):
        x = e.index
        return e if x <= i else Letter(x + k - 1)
    if isinstance(e, Bracket):
        return Bracket(_relabel_expr(e.left, i, k), _relabel_expr(e.right, i, k))
    if isinstance(e, Product):
        return Product(_relabel_expr(e.left, i, k), _relabel_expr(e.right, i, k))
    return e


def compose(a: PoissonElement, i: int, b: PoissonElement, convention: str = "infix") -> PoissonElement:
    if a.m != b.m:
        raise ValueError("elements of different Poisson operads")
    if not 1 <= i <= a.arity:
        raise IndexOutOfRange(f"position {i} outside arity {a.arity}")
    out: dict = {}
    for w, cw in a.terms.items():
        for v, cv in b.terms.items():
            axpy(out, cw * cv, compose_monomials(w, a.arity, i, v, b.arity, a.m, convention))
    return PoissonElement(a.arity + b.arity - 1, a.m, out)


# ------------------------------------------------------------ the operad

def poisson_operad(d: int, arity_max: int, convention: str = "infix") -> FinOperad:
    """Poiss_{d-1} truncated at ``arity_max``, with μ = x1x2 and e = 1."""
    if d < 2:
        raise ValueError("d must be at least 2")
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown sign convention {convention!r}")
    m = d - 1
    bases = {n: [(mono, _mono_deg(mono, m)) for mono in normal_monomials(n)] for n in range(arity_max + 1)}
    arity_of = {mono: n for n in bases for mono, _ in bases[n]}

    def comp(n, i, k, w, v):
        return compose_monomials(w, n, i, v, k, m, convention)

    op = build_operad(arity_max, bases, comp, unit_key=((1,),), label_fn=monomial_label,
                      mu_key=((1,), (2,)) if arity_max >= 2 else None, basepoint_key=(),
                      name=f"Poiss_{m}" + ("" if convention == "infix" else f"[{convention}]"))
    op.shift = m
    op.convention = convention
    # weight = number of brackets; normalized monomials have no singleton blocks, so p <= 2w
    op.weights = {n: [_mono_deg(mono, m) // m if m else 0 for mono, _ in bases[n]] for n in bases}
    op.support = NormalizedSupport(lambda w: 2 * w, _poisson_weight_bound(m))
    return op


def _poisson_weight_bound(m: int):
    # total degree t = w*m - p with w + 1 <= p <= 2w for w >= 1, and t = 0 for w = 0
    if m == 1:
        return lambda t: -1 if t > 0 else (0 if t == 0 else None)
    if m == 2:
        return lambda t: -1 if t < 0 else None
    return lambda t: t // (m - 2) if t >= 0 else -1


def element_of(op: FinOperad, n: int, x: Mapping) -> PoissonElement:
    """View a sparse global vector of a Poisson FinOperad as a PoissonElement."""
    return PoissonElement(n, op.shift, {op.keys[n][g]: c for g, c in x.items()})


def vector_of(op: FinOperad, e: PoissonElement) -> dict:
    return {op.key_index[e.arity][k]: c for k, c in e.terms.items()}
