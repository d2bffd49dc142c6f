"""Model-independent combinator algebra and the executable axiom suite.

The combinators (identity, composition, pairing, projections, sums,
zero maps) are shared by every model. Each model contributes an
infinitesimal extension `epsilon` and a difference combinator
`derivative`; the axiom checkers below turn the coherence laws of a
Cartesian difference category into extensional morphism equalities.

Axiom schemas are written once against a small category interface
(`BaseCat` here, a Kleisli adapter in `monad`), so the same code
checks the base models and the Kleisli category of the tangent bundle
monad. Generalized points x, y, z, w inside a schema are tautological
projections from a product stage, which makes pointwise equality over
the stage equivalent to quantifying the law over sampled/enumerated
element points.
"""

from __future__ import annotations

import weakref
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DomainMismatch, ModelRestriction, ShapeMismatch, UnknownPrimitive
from .morphisms import (
    DEFAULT_STRATEGY,
    EqualityStrategy,
    LawReport,
    Morphism,
    TABLE_LIMIT,
    morphisms_equal,
    report_from_equalities,
    table_codec_size,
    tabulate,
    to_jsonable,
)
from .spaces import (
    Product,
    Space,
    TERMINAL,
    add_elem,
    arange_for,
    codec_size,
    derive_seed,
    elements_equal,
    encode,
    format_space,
    iter_space,
    neg_elem,
    sample_space,
    space_size,
    v_add,
    v_neg,
    zero_elem,
)


def _lazy_table(dom: Space, builder: Callable[[], Optional[np.ndarray]]):
    """Defer table construction; None when the domain can never tabulate."""
    n = codec_size(dom)
    if n is None or n > TABLE_LIMIT:
        return None
    return builder


def _merge_model(*ms: Morphism) -> Optional[str]:
    tags = {m.model for m in ms if m.model is not None}
    if len(tags) > 1:
        raise DomainMismatch(f"mixed model tags {tags}")
    return tags.pop() if tags else None


# ---------------------------------------------------------------------------
# combinators


def identity(space: Space) -> Morphism:
    return Morphism(space, space, lambda x: x, name="id",
                    table_builder=_lazy_table(space, lambda: arange_for(space)))


def projection(i: int, left: Space, right: Space) -> Morphism:
    if i not in (0, 1):
        raise DomainMismatch("projection index must be 0 or 1")
    dom = Product(left, right)
    cod = left if i == 0 else right

    def build():
        r = codec_size(right)
        idx = arange_for(dom)
        return idx // r if i == 0 else idx % r

    return Morphism(dom, cod, (lambda x: x[0]) if i == 0 else (lambda x: x[1]),
                    name=f"pi{i}", table_builder=_lazy_table(dom, build))


def terminal_map(space: Space) -> Morphism:
    def build():
        n = codec_size(space)
        return np.zeros(n, dtype=np.int64)

    return Morphism(space, TERMINAL, lambda x: (), name="!",
                    table_builder=_lazy_table(space, build))


def zero_map(dom: Space, cod: Space) -> Morphism:
    z = zero_elem(cod)
    builder = None
    if table_codec_size(cod) is not None:
        # the zero element always encodes to index 0
        builder = _lazy_table(dom, lambda: np.zeros(codec_size(dom), dtype=np.int64))
    return Morphism(dom, cod, lambda x, _z=z: _z, name="0", table_builder=builder)


def const_map(dom: Space, cod: Space, value) -> Morphism:
    builder = None
    if table_codec_size(cod) is not None:
        code = encode(cod, value)
        builder = _lazy_table(
            dom, lambda: np.full(codec_size(dom), code, dtype=np.int64))
    return Morphism(dom, cod, lambda x, _v=value: _v, name="const",
                    table_builder=builder)


def compose(g: Morphism, f: Morphism) -> Morphism:
    if f.cod != g.dom:
        raise DomainMismatch(f"cannot compose {g!r} after {f!r}")

    def build():
        tf, tg = tabulate(f), tabulate(g)
        return None if tf is None or tg is None else tg[tf]

    return Morphism(
        f.dom, g.cod,
        lambda x, _f=f.fn, _g=g.fn: _g(_f(x)),
        model=_merge_model(f, g),
        name=f"({g.name} . {f.name})",
        table_builder=_lazy_table(f.dom, build),
    )


def pair(f: Morphism, g: Morphism) -> Morphism:
    if f.dom != g.dom:
        raise DomainMismatch(f"pairing needs a shared domain: {f!r}, {g!r}")
    cod = Product(f.cod, g.cod)

    def build():
        tf, tg = tabulate(f), tabulate(g)
        if tf is None or tg is None or table_codec_size(cod) is None:
            return None
        return tf * codec_size(g.cod) + tg

    return Morphism(
        f.dom, cod,
        lambda x, _f=f.fn, _g=g.fn: (_f(x), _g(x)),
        model=_merge_model(f, g),
        name=f"<{f.name},{g.name}>",
        table_builder=_lazy_table(f.dom, build),
    )


def add(f: Morphism, g: Morphism) -> Morphism:
    if f.dom != g.dom or f.cod != g.cod:
        raise DomainMismatch(f"sum needs matching shapes: {f!r}, {g!r}")
    cod = f.cod

    def build():
        tf, tg = tabulate(f), tabulate(g)
        return None if tf is None or tg is None else v_add(cod, tf, tg)

    return Morphism(
        f.dom, cod,
        lambda x, _f=f.fn, _g=g.fn, _c=cod: add_elem(_c, _f(x), _g(x)),
        model=_merge_model(f, g),
        name=f"({f.name} + {g.name})",
        table_builder=_lazy_table(f.dom, build),
    )


def negate(f: Morphism) -> Morphism:
    def build():
        tf = tabulate(f)
        return None if tf is None else v_neg(f.cod, tf)

    return Morphism(
        f.dom, f.cod,
        lambda x, _f=f.fn, _c=f.cod: neg_elem(_c, _f(x)),
        model=f.model,
        name=f"(-{f.name})",
        table_builder=_lazy_table(f.dom, build),
    )


def subtract(f: Morphism, g: Morphism) -> Morphism:
    return add(f, negate(g))


def product_map(f: Morphism, g: Morphism) -> Morphism:
    """f x g on a product domain."""
    dom = Product(f.dom, g.dom)
    return pair(compose(f, projection(0, f.dom, g.dom)),
                compose(g, projection(1, f.dom, g.dom)))


# ---------------------------------------------------------------------------
# difference models


class DifferenceModel:
    """A concrete Cartesian difference category over a family of spaces.

    Subclasses fix the legal space kinds, the infinitesimal extension,
    the difference combinator, a registry of named primitives, and a
    source of random law-check subjects. Derivatives are memoized per
    morphism so that repeated axiom instantiations share their tables.
    """

    tag: str = "abstract"

    def __init__(self):
        self._primitives: dict[str, Callable[[Space], Morphism]] = {}
        self._primitive_cache: dict[tuple[str, Space], Morphism] = {}
        self._derivative_cache: "weakref.WeakKeyDictionary[Morphism, Morphism]" = (
            weakref.WeakKeyDictionary()
        )

    # -- spaces

    def legal_space(self, space: Space) -> bool:
        raise NotImplementedError

    def check_space(self, space: Space):
        if not self.legal_space(space):
            raise ModelRestriction(
                f"{format_space(space)} is not a legal {self.tag} space"
            )

    @property
    def default_space(self) -> Space:
        raise NotImplementedError

    # -- structure

    def epsilon(self, f: Morphism) -> Morphism:
        raise NotImplementedError

    def derivative(self, f: Morphism) -> Morphism:
        cached = self._derivative_cache.get(f)
        if cached is None:
            cached = self._derivative(f)
            self._derivative_cache[f] = cached
        return cached

    def _derivative(self, f: Morphism) -> Morphism:
        raise NotImplementedError

    def oplus_map(self, space: Space) -> Morphism:
        """Induced action on one object: pi0 + eps(pi1) : A x A -> A."""
        p0, p1 = projection(0, space, space), projection(1, space, space)
        m = add(p0, self.epsilon(p1))
        m.name = "oplus"
        return m

    def plus_map(self, space: Space) -> Morphism:
        p0, p1 = projection(0, space, space), projection(1, space, space)
        m = add(p0, p1)
        m.name = "plus"
        return m

    def zero_point(self, space: Space) -> Morphism:
        return zero_map(TERMINAL, space)

    # -- primitives

    def register_primitive(self, name: str, factory: Callable[[Space], Morphism]):
        self._primitives[name] = factory
        self._primitive_cache = {k: v for k, v in self._primitive_cache.items()
                                 if k[0] != name}

    def primitive(self, name: str, space: Optional[Space] = None) -> Morphism:
        if name not in self._primitives:
            raise UnknownPrimitive(f"{self.tag} has no primitive {name!r}")
        sp = space if space is not None else self.default_space
        key = (name, sp)
        cached = self._primitive_cache.get(key)
        if cached is not None:
            return cached
        m = self._primitives[name](sp)
        m.model = self.tag
        m.name = name
        self._primitive_cache[key] = m
        return m

    def primitive_names(self) -> list[str]:
        return sorted(self._primitives)

    # -- subjects

    def random_subjects(self, space: Space, count: int, seed: int) -> list[Morphism]:
        raise NotImplementedError


def epsilon(model: DifferenceModel, f: Morphism) -> Morphism:
    return model.epsilon(f)


def derivative(model: DifferenceModel, f: Morphism) -> Morphism:
    return model.derivative(f)


def oplus(model: DifferenceModel, f: Morphism, g: Morphism) -> Morphism:
    """f (+) g = f + eps(g), the action of changes on values."""
    if f.dom != g.dom or f.cod != g.cod:
        raise DomainMismatch("oplus needs matching shapes")
    return add(f, model.epsilon(g))


# ---------------------------------------------------------------------------
# the category interface the axiom schemas are written against


class BaseCat:
    """A difference model presented as a category of plain morphisms."""

    def __init__(self, model: DifferenceModel):
        self.model = model

    def dom(self, f):
        return f.dom

    def cod(self, f):
        return f.cod

    def identity(self, a):
        return identity(a)

    def compose(self, g, f):
        return compose(g, f)

    def pair(self, f, g):
        return pair(f, g)

    def proj(self, i, a, b):
        return projection(i, a, b)

    def zero(self, a, b):
        return zero_map(a, b)

    def add(self, f, g):
        return add(f, g)

    def terminal(self, a):
        return terminal_map(a)

    def epsilon(self, f):
        return self.model.epsilon(f)

    def derivative(self, f):
        return self.model.derivative(f)

    def obj_product(self, a, b):
        return Product(a, b)

    def generic_points(self, objs: Sequence[Space]):
        """A stage object and tautological points covering objs elementwise."""
        stage = _nested(objs)
        return stage, _point_projections(stage, objs)

    def equal(self, f, g, strat):
        return morphisms_equal(f, g, strat)

    def describe(self, f):
        return f.name


def _nested(objs: Sequence[Space]) -> Space:
    out = objs[-1]
    for o in reversed(objs[:-1]):
        out = Product(o, out)
    return out


def _point_projections(stage: Space, objs: Sequence[Space]) -> list[Morphism]:
    points = []
    walk = identity(stage)
    for k, o in enumerate(objs):
        if k == len(objs) - 1:
            points.append(walk)
        else:
            rest = _nested(objs[k + 1:])
            points.append(compose(projection(0, o, rest), walk))
            walk = compose(projection(1, o, rest), walk)
    return points


# ---------------------------------------------------------------------------
# axiom schemas: each returns (label, lhs, rhs) morphism pairs


def _d(cat, f):
    return cat.derivative(f)


def _e(cat, f):
    return cat.epsilon(f)


def sides_cdc0(cat, f):
    a = cat.dom(f)
    stage, (x, y) = cat.generic_points([a, a])
    lhs = cat.compose(f, cat.add(x, _e(cat, y)))
    rhs = cat.add(cat.compose(f, x), _e(cat, cat.compose(_d(cat, f), cat.pair(x, y))))
    return [("f(x+eps y) = f x + eps(df<x,y>)", lhs, rhs)]


def sides_cdc1(cat, f, g):
    a, b = cat.dom(f), cat.cod(f)
    out = [
        ("d[f+g] = d[f]+d[g]", _d(cat, cat.add(f, g)), cat.add(_d(cat, f), _d(cat, g))),
        ("d[0] = 0", _d(cat, cat.zero(a, b)), cat.zero(cat.obj_product(a, a), b)),
        ("d[eps f] = eps d[f]", _d(cat, _e(cat, f)), _e(cat, _d(cat, f))),
    ]
    return out


def sides_cdc2(cat, f):
    a, b = cat.dom(f), cat.cod(f)
    df = _d(cat, f)
    stage, (x, y, z) = cat.generic_points([a, a, a])
    lhs = cat.compose(df, cat.pair(x, cat.add(y, z)))
    rhs = cat.add(
        cat.compose(df, cat.pair(x, y)),
        cat.compose(df, cat.pair(cat.add(x, _e(cat, y)), z)),
    )
    stage1, (x1,) = cat.generic_points([a])
    zero_side = cat.compose(df, cat.pair(x1, cat.zero(stage1, a)))
    return [
        ("df<x,y+z> = df<x,y> + df<x+eps y,z>", lhs, rhs),
        ("df<x,0> = 0", zero_side, cat.zero(stage1, b)),
    ]


def sides_cdc2_additivity(cat, f):
    a, b = cat.dom(f), cat.cod(f)
    df = _d(cat, f)
    stage, (x, y, z) = cat.generic_points([a, a, a])
    lhs = cat.compose(df, cat.pair(x, cat.add(y, z)))
    rhs = cat.add(cat.compose(df, cat.pair(x, y)), cat.compose(df, cat.pair(x, z)))
    stage1, (x1,) = cat.generic_points([a])
    zero_side = cat.compose(df, cat.pair(x1, cat.zero(stage1, a)))
    return [
        ("df<x,y+z> = df<x,y> + df<x,z>", lhs, rhs),
        ("df<x,0> = 0", zero_side, cat.zero(stage1, b)),
    ]


def sides_cdc3(cat, a, b=None):
    b = a if b is None else b
    p = cat.obj_product(a, b)
    tp = cat.obj_product(p, p)
    p1 = cat.proj(1, p, p)
    return [
        ("d[1] = pi1",
         _d(cat, cat.identity(a)), cat.proj(1, a, a)),
        ("d[pi0] = pi0.pi1",
         _d(cat, cat.proj(0, a, b)), cat.compose(cat.proj(0, a, b), p1)),
        ("d[pi1] = pi1.pi1",
         _d(cat, cat.proj(1, a, b)), cat.compose(cat.proj(1, a, b), p1)),
    ]


def sides_cdc4(cat, f, g):
    a = cat.dom(f)
    ta = cat.obj_product(a, a)
    return [
        ("d<f,g> = <d f,d g>",
         _d(cat, cat.pair(f, g)), cat.pair(_d(cat, f), _d(cat, g))),
        ("d[!] = !", _d(cat, cat.terminal(a)), cat.terminal(ta)),
    ]


def sides_cdc5(cat, g, f):
    a = cat.dom(f)
    p0 = cat.proj(0, a, a)
    lhs = _d(cat, cat.compose(g, f))
    rhs = cat.compose(_d(cat, g), cat.pair(cat.compose(f, p0), _d(cat, f)))
    return [("chain rule", lhs, rhs)]


def _second(cat, f):
    return _d(cat, _d(cat, f))


def sides_cdc6(cat, f):
    a = cat.dom(f)
    d2 = _second(cat, f)
    stage, (x, y, z) = cat.generic_points([a, a, a])
    zero = cat.zero(stage, a)
    lhs = cat.compose(d2, cat.pair(cat.pair(x, y), cat.pair(zero, z)))
    rhs = cat.compose(_d(cat, f), cat.pair(cat.add(x, _e(cat, y)), z))
    return [("d2f<<x,y>,<0,z>> = df<x+eps y,z>", lhs, rhs)]


def sides_cdc7(cat, f):
    a = cat.dom(f)
    d2 = _second(cat, f)
    stage, (x, y, z) = cat.generic_points([a, a, a])
    zero = cat.zero(stage, a)
    lhs = cat.compose(d2, cat.pair(cat.pair(x, y), cat.pair(z, zero)))
    rhs = cat.compose(d2, cat.pair(cat.pair(x, z), cat.pair(y, zero)))
    return [("d2f<<x,y>,<z,0>> = d2f<<x,z>,<y,0>>", lhs, rhs)]


def sides_cdc6a(cat, f):
    a = cat.dom(f)
    d2 = _second(cat, f)
    stage, (x, y) = cat.generic_points([a, a])
    zero = cat.zero(stage, a)
    lhs = cat.compose(d2, cat.pair(cat.pair(x, zero), cat.pair(zero, y)))
    rhs = cat.compose(_d(cat, f), cat.pair(x, y))
    return [("d2f<<x,0>,<0,y>> = df<x,y>", lhs, rhs)]


def sides_cdc7a(cat, f):
    a = cat.dom(f)
    d2 = _second(cat, f)
    stage, (x, y, z, w) = cat.generic_points([a, a, a, a])
    lhs = cat.compose(d2, cat.pair(cat.pair(x, y), cat.pair(z, w)))
    rhs = cat.compose(d2, cat.pair(cat.pair(x, z), cat.pair(y, w)))
    return [("d2f<<x,y>,<z,w>> = d2f<<x,z>,<y,w>>", lhs, rhs)]


def sides_e1(cat, f, g):
    a, b = cat.dom(f), cat.cod(f)
    return [
        ("eps(f+g) = eps f + eps g",
         _e(cat, cat.add(f, g)), cat.add(_e(cat, f), _e(cat, g))),
        ("eps 0 = 0", _e(cat, cat.zero(a, b)), cat.zero(a, b)),
    ]


def sides_e2(cat, g, f):
    lhs = _e(cat, cat.compose(g, f))
    rhs = cat.compose(_e(cat, g), f)
    return [("eps(g.f) = eps(g).f", lhs, rhs)]


def sides_e3(cat, f, g):
    a, b = cat.cod(f), cat.cod(g)
    ab = cat.obj_product(a, b)
    eid = _e(cat, cat.identity(ab))
    out = [
        ("eps pi0 = pi0 . eps(1)",
         _e(cat, cat.proj(0, a, b)), cat.compose(cat.proj(0, a, b), eid)),
        ("eps pi1 = pi1 . eps(1)",
         _e(cat, cat.proj(1, a, b)), cat.compose(cat.proj(1, a, b), eid)),
        ("eps<f,g> = <eps f,eps g>",
         _e(cat, cat.pair(f, g)), cat.pair(_e(cat, f), _e(cat, g))),
    ]
    return out


def sides_deps_i(cat, f):
    a = cat.dom(f)
    df = _d(cat, f)
    stage, (x, y) = cat.generic_points([a, a])
    lhs = cat.compose(df, cat.pair(x, _e(cat, y)))
    rhs = cat.compose(_e(cat, df), cat.pair(x, y))
    return [("df<x,eps y> = eps(df)<x,y>", lhs, rhs)]


def sides_deps_ii(cat, f):
    a = cat.dom(f)
    edf = _e(cat, _d(cat, f))
    stage, (x, y, z) = cat.generic_points([a, a, a])
    lhs = cat.compose(edf, cat.pair(cat.add(x, _e(cat, y)), z))
    rhs = cat.compose(edf, cat.pair(cat.add(x, _e(cat, _e(cat, y))), z))
    return [("eps(df)<x+eps y,z> = eps(df)<x+eps^2 y,z>", lhs, rhs)]


def _eps_pow(cat, f, k):
    for _ in range(k):
        f = _e(cat, f)
    return f


def _d2_corner(cat, f):
    """The shared argument <<x,y>,<z,0>> over a three-point stage."""
    a = cat.dom(f)
    stage, (x, y, z) = cat.generic_points([a, a, a])
    arg = cat.pair(cat.pair(x, y), cat.pair(z, cat.zero(stage, a)))
    return arg


def sides_deps_iii(cat, f):
    d2 = _second(cat, f)
    arg = _d2_corner(cat, f)
    lhs = cat.compose(_eps_pow(cat, d2, 2), arg)
    rhs = cat.compose(_eps_pow(cat, d2, 3), arg)
    return [("eps^2(d2f) = eps^3(d2f) on <<x,y>,<z,0>>", lhs, rhs)]


def sides_eq1_strong(cat, f):
    d2 = _second(cat, f)
    arg = _d2_corner(cat, f)
    lhs = cat.compose(_eps_pow(cat, d2, 1), arg)
    rhs = cat.compose(_eps_pow(cat, d2, 2), arg)
    return [("eps(d2f) = eps^2(d2f) on <<x,y>,<z,0>>", lhs, rhs)]


def sides_linearity(cat, f):
    a = cat.dom(f)
    lhs = _d(cat, f)
    rhs = cat.compose(f, cat.proj(1, a, a))
    return [("d[f] = f.pi1", lhs, rhs)]


def sides_eps_linearity(cat, f):
    return sides_linearity(cat, _e(cat, f))


def sides_eps_vanishing(cat, a):
    return [("eps(1) = 0", _e(cat, cat.identity(a)), cat.zero(a, a))]


def sides_f2(cat, a, model):
    op = model.oplus_map(a)
    pl = model.plus_map(a)
    p = Product(a, a)
    p1 = projection(1, p, p)
    return [
        ("d[oplus] = oplus.pi1", cat.derivative(op), cat.compose(op, p1)),
        ("d[plus] = plus.pi1", cat.derivative(pl), cat.compose(pl, p1)),
    ]


def sides_oplus_eps(cat, f, g, model):
    """f (+) g computed through the action map versus f + eps(g)."""
    a = cat.cod(f)
    lhs = cat.compose(model.oplus_map(a), cat.pair(f, g))
    rhs = cat.add(f, _e(cat, g))
    return [("oplus<f,g> = f + eps g", lhs, rhs)]


# ---------------------------------------------------------------------------
# axiom dispatch

AXIOM_IDS = [
    "CdC0", "CdC1", "CdC2", "CdC3", "CdC4", "CdC5", "CdC6", "CdC7",
    "CdC6a", "CdC7a", "E1", "E2", "E3", "CDC2-additivity",
    "DEps-i", "DEps-ii", "DEps-iii", "Eq1-strong",
    "Linearity", "EpsLinearity", "EpsVanishing",
    "F1", "F2", "F3", "F4", "OplusEps",
]

# arity: how many subject morphisms a schema consumes ("space" = per-object)
_AXIOM_TABLE = {
    "CdC0": (sides_cdc0, 1),
    "CdC1": (sides_cdc1, 2),
    "CdC2": (sides_cdc2, 1),
    "CdC3": (sides_cdc3, "space"),
    "CdC4": (sides_cdc4, 2),
    "CdC5": (sides_cdc5, 2),
    "CdC6": (sides_cdc6, 1),
    "CdC7": (sides_cdc7, 1),
    "CdC6a": (sides_cdc6a, 1),
    "CdC7a": (sides_cdc7a, 1),
    "E1": (sides_e1, 2),
    "E2": (sides_e2, 2),
    "E3": (sides_e3, 2),
    "CDC2-additivity": (sides_cdc2_additivity, 1),
    "DEps-i": (sides_deps_i, 1),
    "DEps-ii": (sides_deps_ii, 1),
    "DEps-iii": (sides_deps_iii, 1),
    "Eq1-strong": (sides_eq1_strong, 1),
    "Linearity": (sides_linearity, 1),
    "EpsLinearity": (sides_eps_linearity, 1),
    "EpsVanishing": (sides_eps_vanishing, "space"),
}


def axiom_sides(cat, model, axiom: str, subjects: Sequence[Morphism]):
    if axiom in ("F1", "F2", "F3", "F4", "OplusEps"):
        space = subjects[0].dom if subjects else model.default_space
        return _flatness_sides(cat, model, axiom, space, subjects)
    if axiom not in _AXIOM_TABLE:
        raise ShapeMismatch(f"unknown axiom id {axiom!r}")
    schema, arity = _AXIOM_TABLE[axiom]
    if arity == "space":
        space = subjects[0].dom if subjects else model.default_space
        return schema(cat, space)
    if arity == 1:
        if not subjects:
            raise ShapeMismatch(f"{axiom} needs one subject morphism")
        return schema(cat, subjects[0])
    # arity 2: reuse the single subject when only one is supplied
    f = subjects[0]
    g = subjects[1] if len(subjects) > 1 else subjects[0]
    if axiom in ("CdC5", "E2"):
        if f.cod != g.dom and g.cod == f.dom:
            f, g = g, f
        if f.cod != g.dom:
            raise ShapeMismatch(f"{axiom} needs composable subjects")
        return schema(cat, g, f)  # schema signature: (cat, g, f)
    if axiom in ("CdC1", "E1") and (f.dom != g.dom or f.cod != g.cod):
        raise ShapeMismatch(f"{axiom} needs parallel subjects")
    if axiom == "CdC4" and f.dom != g.dom:
        raise ShapeMismatch("CdC4 needs subjects with a shared domain")
    return schema(cat, f, g)


def _flatness_sides(cat, model, axiom, space, subjects):
    if axiom == "F2":
        return sides_f2(cat, space, model)
    if axiom == "F3":
        # the map-flatness condition, checked on the supplied subjects
        out = []
        for f in subjects:
            df = cat.derivative(f)
            a = f.dom
            p0, p1 = projection(0, a, a), projection(1, a, a)
            lhs = cat.epsilon(df)
            rhs = cat.compose(df, cat.pair(p0, cat.epsilon(p1)))
            out.append((f"eps(d {f.name}) = d {f.name}<x,eps y>", lhs, rhs))
        return out
    if axiom == "OplusEps":
        f = subjects[0] if subjects else identity(space)
        g = subjects[1] if len(subjects) > 1 else f
        return sides_oplus_eps(cat, f, g, model)
    raise ShapeMismatch(f"{axiom} is handled by check_flatness")


def check_axiom(
    model: DifferenceModel,
    axiom: str,
    subjects: Sequence[Morphism] | Morphism,
    strat: EqualityStrategy = DEFAULT_STRATEGY,
    cat=None,
) -> LawReport:
    """Instantiate one axiom on the given subjects and compare both sides."""
    if isinstance(subjects, Morphism):
        subjects = [subjects]
    if axiom in ("F1", "F4"):
        space = subjects[0].dom if subjects else model.default_space
        rep = check_flatness(model, space, strat, parts=(axiom,))
        rep.axiom = axiom
        return rep
    cat = cat or BaseCat(model)
    pairs = axiom_sides(cat, model, axiom, list(subjects))
    subject = ",".join(m.name for m in subjects) if subjects else "-"
    return report_from_equalities(axiom, model.tag, subject, pairs, strat,
                                  seed=_strat_seed(strat), equal_fn=cat.equal)


def _strat_seed(strat: EqualityStrategy) -> int:
    return getattr(strat.mode, "seed", 0)


# ---------------------------------------------------------------------------
# linearity and flatness predicates


def is_group_homomorphism(f: Morphism, strat: EqualityStrategy = DEFAULT_STRATEGY) -> bool:
    """Additivity probe independent of any difference combinator."""
    a, b = f.dom, f.cod
    plus_a = add(projection(0, a, a), projection(1, a, a))
    plus_b = add(projection(0, b, b), projection(1, b, b))
    lhs = compose(f, plus_a)
    rhs = compose(plus_b, pair(compose(f, projection(0, a, a)),
                               compose(f, projection(1, a, a))))
    if not morphisms_equal(lhs, rhs, strat).passed:
        return False
    z_in, z_out = zero_map(TERMINAL, a), zero_map(TERMINAL, b)
    return morphisms_equal(compose(f, z_in), z_out, strat).passed


def is_linear(
    model: DifferenceModel,
    f: Morphism,
    strat: EqualityStrategy = DEFAULT_STRATEGY,
) -> tuple[bool, LawReport]:
    cat = BaseCat(model)
    pairs = sides_linearity(cat, f)
    rep = report_from_equalities("Linearity", model.tag, f.name, pairs, strat,
                                 seed=_strat_seed(strat))
    if rep.passed and not is_group_homomorphism(f, strat):
        # a linear map must be additive; surfacing the inconsistency beats hiding it
        rep.violations += 1
        rep.counterexample = {"clause": "linear map failed the additivity consequence"}
    return rep.passed, rep


def is_epsilon_linear(
    model: DifferenceModel, f: Morphism, strat: EqualityStrategy = DEFAULT_STRATEGY
) -> bool:
    ok, _ = is_linear(model, model.epsilon(f), strat)
    return ok


def is_epsilon_vanishing(
    model: DifferenceModel, space: Space, strat: EqualityStrategy = DEFAULT_STRATEGY
) -> bool:
    rep = morphisms_equal(model.epsilon(identity(space)), zero_map(space, space), strat)
    return rep.passed


def _right_injectivity(model, space, strat):
    """Search for x, y, y' with x (+) y = x (+) y' but y != y'."""
    op = model.oplus_map(space)
    n = space_size(space)
    if n is not None and n * n * n <= strat.bound * 10:
        elems = list(iter_space(space))
        checked = 0
        for x in elems:
            seen = {}
            for y in elems:
                checked += 1
                v = op((x, y))
                key = to_json_key(v)
                if key in seen and seen[key] != y:
                    return False, checked, {
                        "input": to_jsonable(x),
                        "lhs": to_jsonable(seen[key]),
                        "rhs": to_jsonable(y),
                    }, None
                seen.setdefault(key, y)
        return True, checked, None, None
    # not enumerable: sampled refutation search only; no sound positive verdict
    pts = sample_space(Product(space, Product(space, space)), 512, _strat_seed(strat))
    checked = 0
    for x, (y1, y2) in pts:
        checked += 1
        if elements_equal_guard(space, y1, y2, strat):
            continue
        v1, v2 = op((x, y1)), op((x, y2))
        if elements_equal_guard(space, v1, v2, strat):
            return False, checked, {
                "input": to_jsonable(x),
                "lhs": to_jsonable(y1),
                "rhs": to_jsonable(y2),
            }, None
    return True, checked, None, "unknown"


def to_json_key(v):
    return repr(to_jsonable(v))


def elements_equal_guard(space, a, b, strat):
    return elements_equal(space, a, b, strat.abs_tol, strat.rel_tol)


def check_flatness(
    model: DifferenceModel,
    space: Space,
    strat: EqualityStrategy = DEFAULT_STRATEGY,
    parts: Sequence[str] = ("F1", "F2", "F3", "F4", "OplusEps"),
) -> LawReport:
    """Flatness of the induced change action on one object.

    F1 holds structurally (the induced action has delta = base); F2
    asks the action and the change addition to be linear; F3 is the
    map condition checked on the model's registered primitives; F4 is
    right-injectivity of the action, decided exhaustively when the
    space enumerates and reported as verdict "unknown" otherwise.
    """
    cat = BaseCat(model)
    checked = 0
    violations = 0
    counterexample = None
    verdict = None
    seed = _strat_seed(strat)

    def run(pairs, label):
        nonlocal checked, violations, counterexample
        rep = report_from_equalities(label, model.tag, format_space(space), pairs, strat, seed)
        checked += rep.checked
        violations += rep.violations
        if counterexample is None and rep.counterexample is not None:
            counterexample = rep.counterexample

    for part in parts:
        if part == "F1":
            checked += 1  # delta = base by construction of the induced action
        elif part == "F2":
            run(sides_f2(cat, space, model), "F2")
        elif part == "F3":
            prims = []
            for name in model.primitive_names():
                try:
                    p = model.primitive(name, space)
                except Exception:
                    continue
                if p.dom == space and p.cod == space:
                    prims.append(p)
            if prims:
                run(_flatness_sides(cat, model, "F3", space, prims), "F3")
        elif part == "F4":
            ok, n, cx, verd = _right_injectivity(model, space, strat)
            checked += n
            if not ok:
                violations += 1
                if counterexample is None:
                    counterexample = dict(cx, clause="F4 right-injectivity")
            if verd is not None:
                verdict = verd
        elif part == "OplusEps":
            f = identity(space)
            g = model.epsilon(identity(space))
            g.name = "eps(id)"
            run(sides_oplus_eps(cat, f, g, model), "OplusEps")
            subs = model.random_subjects(space, 2, derive_seed(seed, "oplus-eps"))
            if len(subs) == 2:
                run(sides_oplus_eps(cat, subs[0], subs[1], model), "OplusEps")

    return LawReport(
        axiom="+".join(parts),
        model=model.tag,
        subject=format_space(space),
        strategy=strat.describe(),
        checked=checked,
        violations=violations,
        counterexample=counterexample,
        seed=seed,
        verdict=verdict if violations == 0 else None,
    )
