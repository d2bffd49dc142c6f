"""Additive maps with a scalar infinitesimal extension.

Objects are integer modules (cyclic groups and bounded integers);
morphisms are restricted to additive maps, enforced extensionally at
registration and on differentiation. The difference combinator drops
the base point, d[f](m, n) = f(n), and eps^r multiplies by a fixed
scalar r, which by default is neither zero nor the identity.
"""

from __future__ import annotations

import random

from ..errors import NotAdditive
from ..kernel import (
    DifferenceModel,
    TABLE_LIMIT,
    compose,
    is_group_homomorphism,
    projection,
)
from ..morphisms import Auto, EqualityStrategy, Morphism, tabulate
from ..spaces import (
    BoundedInt,
    arange_for,
    CyclicGroup,
    Product,
    Space,
    Terminal,
    codec_size,
    derive_seed,
    format_space,
    scale_elem,
    v_scale,
)

_ADDITIVITY_PROBE = EqualityStrategy(Auto(count=48, seed=17), bound=4096)


def _int_kinds(space: Space) -> bool:
    if isinstance(space, (CyclicGroup, BoundedInt, Terminal)):
        return True
    if isinstance(space, Product):
        return _int_kinds(space.left) and _int_kinds(space.right)
    return False


def _leaves(space: Space):
    if isinstance(space, (CyclicGroup, BoundedInt)):
        yield space
    elif isinstance(space, Product):
        yield from _leaves(space.left)
        yield from _leaves(space.right)


def _flatten(space: Space, x, out: list):
    if isinstance(space, (CyclicGroup, BoundedInt)):
        out.append(x)
    elif isinstance(space, Product):
        _flatten(space.left, x[0], out)
        _flatten(space.right, x[1], out)


def _unflatten(space: Space, vals, pos=0):
    if isinstance(space, CyclicGroup):
        return vals[pos] % space.n, pos + 1
    if isinstance(space, BoundedInt):
        return vals[pos], pos + 1
    if isinstance(space, Product):
        l, pos = _unflatten(space.left, vals, pos)
        r, pos = _unflatten(space.right, vals, pos)
        return (l, r), pos
    return (), pos


class ModuleModel(DifferenceModel):
    def __init__(self, r: int = 2):
        super().__init__()
        self.r = r
        self.tag = f"module:r={r}"
        self.register_primitive("dbl", self._scale_primitive(2))
        self.register_primitive("triple", self._scale_primitive(3))
        self.register_primitive("neg", self._scale_primitive(-1))

    @staticmethod
    def _scale_primitive(k: int):
        def factory(space: Space) -> Morphism:
            def build():
                return v_scale(space, k, arange_for(space))

            n = codec_size(space)
            return Morphism(space, space,
                            lambda x, _s=space: scale_elem(_s, k, x),
                            name=f"x{k}",
                            table_builder=build if n is not None
                            and n <= TABLE_LIMIT else None)

        return factory

    def legal_space(self, space: Space) -> bool:
        return _int_kinds(space)

    @property
    def default_space(self) -> Space:
        return BoundedInt(-100, 100)

    def require_additive(self, f: Morphism):
        if not is_group_homomorphism(f, _ADDITIVITY_PROBE):
            raise NotAdditive(f"{f!r} is not additive; the module model rejects it")

    def epsilon(self, f: Morphism) -> Morphism:
        cod = f.cod

        def build():
            tf = tabulate(f)
            return None if tf is None else v_scale(cod, self.r, tf)

        n = codec_size(f.dom)
        return Morphism(
            f.dom, cod,
            lambda x, _f=f.fn, _c=cod, _r=self.r: scale_elem(_c, _r, _f(x)),
            model=self.tag, name=f"eps({f.name})",
            table_builder=build if n is not None and n <= TABLE_LIMIT else None,
        )

    def _derivative(self, f: Morphism) -> Morphism:
        self.check_space(f.dom)
        self.check_space(f.cod)
        self.require_additive(f)
        d = compose(f, projection(1, f.dom, f.dom))
        d.model = self.tag
        d.name = f"d[{f.name}]"
        return d

    def random_subjects(self, space: Space, count: int, seed: int) -> list[Morphism]:
        """Random additive endomaps: an integer matrix over the leaf carriers."""
        self.check_space(space)
        width = len(list(_leaves(space)))
        out = []
        for i in range(count):
            rng = random.Random(derive_seed(seed, "module-subject",
                                            format_space(space), i))
            mat = [[rng.randint(-3, 3) for _ in range(width)] for _ in range(width)]

            def fn(x, _space=space, _mat=mat):
                flat: list = []
                _flatten(_space, x, flat)
                outs = [sum(k * v for k, v in zip(row, flat)) for row in _mat]
                return _unflatten(_space, outs)[0]

            out.append(Morphism(space, space, fn, model=self.tag, name=f"lin{i}"))
        return out
