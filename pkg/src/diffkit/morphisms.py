"""Morphisms, extensional equality, and law reports.

A Morphism is a total evaluation procedure between two spaces plus
bookkeeping (model tag, display name, optional combinator-term
provenance). Equality of morphisms is extensional over a finite test
set: exhaustive when the domain enumerates under a configured bound,
otherwise seeded sampling.

Morphisms over group-closed finite spaces may carry an integer lookup
table mirroring their evaluation procedure (`table[i] == encode(cod,
fn(decode(dom, i)))`). Tables let exhaustive comparisons over large
product domains run as vectorized array operations; closure evaluation
stays the semantic ground truth and the two are checked against each
other in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DomainMismatch, SizeExceeded
from .spaces import (
    DEFAULT_ENUM_BOUND,
    Space,
    codec_size,
    decode,
    derive_seed,
    elements_equal,
    encode,
    format_space,
    iter_space,
    sample_space,
    space_size,
)

TABLE_LIMIT = 2_000_000  # max entries a lookup table may hold
_INT64_SAFE = 2**62  # codes above this cannot live in an int64 table


def table_codec_size(space: Space) -> Optional[int]:
    """Codec size when it is small enough for int64 table entries."""
    n = codec_size(space)
    return n if n is not None and n <= _INT64_SAFE else None


@dataclass(eq=False)
class Morphism:
    """Morphism identity is object identity; equality of morphisms is
    extensional and goes through `morphisms_equal`.

    `table` caches the integer-coded lookup table; `table_builder` is a
    deferred recipe for it. Builders run only when an exhaustive
    comparison actually needs the table — constructing eagerly would
    evaluate closures over whole mid-size domains that a sampled check
    never visits.
    """

    dom: Space
    cod: Space
    fn: Callable
    model: Optional[str] = None
    name: str = "f"
    table: Optional[np.ndarray] = field(default=None, repr=False)
    provenance: Optional[object] = field(default=None, repr=False)
    table_builder: Optional[Callable] = field(default=None, repr=False)

    def __call__(self, x):
        return self.fn(x)

    def __repr__(self):
        return f"<{self.name}: {format_space(self.dom)} -> {format_space(self.cod)}>"


def from_table(dom: Space, cod: Space, table: np.ndarray, model=None, name="table") -> Morphism:
    """Morphism backed by an explicit index table over codec spaces."""
    tbl = np.asarray(table, dtype=np.int64)

    def fn(x, _dom=dom, _cod=cod, _tbl=tbl):
        return decode(_cod, int(_tbl[encode(_dom, x)]))

    return Morphism(dom, cod, fn, model=model, name=name, table=tbl)


def tabulate(m: Morphism, limit: int = TABLE_LIMIT) -> Optional[np.ndarray]:
    """Force (and cache) the index table of `m`, if feasible.

    A deferred builder is preferred; as a last resort the closure is
    evaluated over the whole domain, which only exhaustive comparison
    paths (already gated by their bound) should trigger.
    """
    if m.table is not None:
        return m.table
    n = codec_size(m.dom)
    if n is None or n > limit or table_codec_size(m.cod) is None:
        return None
    if m.table_builder is not None:
        builder, m.table_builder = m.table_builder, None
        tbl = builder()
        if tbl is not None:
            m.table = tbl
            return tbl
    tbl = np.fromiter(
        (encode(m.cod, m.fn(decode(m.dom, i))) for i in range(n)), dtype=np.int64, count=n
    )
    m.table = tbl
    return tbl


# ---------------------------------------------------------------------------
# equality strategies


@dataclass(frozen=True)
class Exhaustive:
    def describe(self) -> str:
        return "exhaustive"


@dataclass(frozen=True)
class Sampled:
    count: int = 256
    seed: int = 0

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("sample count must be positive")

    def describe(self) -> str:
        return f"sampled({self.count},seed={self.seed})"


@dataclass(frozen=True)
class Auto:
    """Exhaustive when the comparison domain fits the bound, else sampled.

    Law checks quantify over stages of varying size (A, A^3, A^4, ...),
    so the exhaustive/sampled split has to be decided per comparison.
    """

    count: int = 256
    seed: int = 0

    def describe(self) -> str:
        return f"auto({self.count},seed={self.seed})"


@dataclass(frozen=True)
class EqualityStrategy:
    mode: object = Auto()
    abs_tol: float = 1e-9
    rel_tol: float = 1e-6
    bound: int = DEFAULT_ENUM_BOUND

    def describe(self) -> str:
        return self.mode.describe()

    def with_seed(self, seed: int) -> "EqualityStrategy":
        if isinstance(self.mode, Sampled):
            return EqualityStrategy(
                Sampled(self.mode.count, seed), self.abs_tol, self.rel_tol, self.bound
            )
        if isinstance(self.mode, Auto):
            return EqualityStrategy(
                Auto(self.mode.count, seed), self.abs_tol, self.rel_tol, self.bound
            )
        return self

    def resolve(self, dom: Space) -> "EqualityStrategy":
        """Collapse Auto to a concrete mode for the given comparison domain."""
        if not isinstance(self.mode, Auto):
            return self
        n = space_size(dom)
        mode = (
            Exhaustive()
            if n is not None and n <= self.bound
            else Sampled(self.mode.count, self.mode.seed)
        )
        return EqualityStrategy(mode, self.abs_tol, self.rel_tol, self.bound)


DEFAULT_STRATEGY = EqualityStrategy(Auto())


def strategy_for(
    space: Space,
    count: int = 256,
    seed: int = 0,
    bound: int = DEFAULT_ENUM_BOUND,
    abs_tol: float = 1e-9,
    rel_tol: float = 1e-6,
) -> EqualityStrategy:
    """Exhaustive when the space enumerates under the bound, else sampled."""
    n = space_size(space)
    mode = Exhaustive() if n is not None and n <= bound else Sampled(count, seed)
    return EqualityStrategy(mode, abs_tol, rel_tol, bound)


@dataclass
class EqualityReport:
    passed: bool
    checked: int
    counterexample: Optional[dict] = None  # {"input":..., "lhs":..., "rhs":...}
    mode: str = "exhaustive"
    seed: Optional[int] = None


def to_jsonable(x):
    """Elements as JSON data: tuples become lists, numpy scalars plain ints."""
    if isinstance(x, tuple):
        return [to_jsonable(v) for v in x]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    return x


def _test_points(dom: Space, strat: EqualityStrategy):
    if isinstance(strat.mode, Exhaustive):
        n = space_size(dom)
        if n is None or n > strat.bound:
            raise SizeExceeded(
                f"exhaustive mode illegal on {format_space(dom)} "
                f"(size {n} > bound {strat.bound})"
            )
        return iter_space(dom), None
    return sample_space(dom, strat.mode.count, strat.mode.seed), strat.mode.seed


def morphisms_equal(f: Morphism, g: Morphism, strat: EqualityStrategy) -> EqualityReport:
    """Extensional comparison; reports the first counterexample in test order."""
    if f.dom != g.dom or f.cod != g.cod:
        raise DomainMismatch(f"cannot compare {f!r} with {g!r}")
    strat = strat.resolve(f.dom)

    # vectorized path: exhaustive over a codec domain with both tables present
    if isinstance(strat.mode, Exhaustive):
        n = codec_size(f.dom)
        if n is not None and n <= strat.bound:
            tf = f.table if f.table is not None else tabulate(f)
            tg = g.table if g.table is not None else tabulate(g)
            if tf is not None and tg is not None:
                diff = np.nonzero(tf != tg)[0]
                if diff.size == 0:
                    return EqualityReport(True, n, mode="exhaustive")
                i = int(diff[0])
                x = decode(f.dom, i)
                return EqualityReport(
                    False,
                    n,
                    counterexample={
                        "input": to_jsonable(x),
                        "lhs": to_jsonable(decode(f.cod, int(tf[i]))),
                        "rhs": to_jsonable(decode(g.cod, int(tg[i]))),
                    },
                    mode="exhaustive",
                )

    points, seed = _test_points(f.dom, strat)
    checked = 0
    for x in points:
        checked += 1
        a, b = f(x), g(x)
        if not elements_equal(f.cod, a, b, strat.abs_tol, strat.rel_tol):
            return EqualityReport(
                False,
                checked,
                counterexample={
                    "input": to_jsonable(x),
                    "lhs": to_jsonable(a),
                    "rhs": to_jsonable(b),
                },
                mode=strat.describe(),
                seed=seed,
            )
    return EqualityReport(True, checked, mode=strat.describe(), seed=seed)


# ---------------------------------------------------------------------------
# law reports


@dataclass
class LawReport:
    axiom: str
    model: str
    subject: str
    strategy: str
    checked: int
    violations: int
    counterexample: Optional[dict] = None
    seed: int = 0
    verdict: Optional[str] = None  # only "unknown" is ever emitted

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def to_dict(self) -> dict:
        d = {
            "axiom": self.axiom,
            "model": self.model,
            "subject": self.subject,
            "strategy": self.strategy,
            "checked": self.checked,
            "violations": self.violations,
        }
        if self.counterexample is not None:
            d["counterexample"] = self.counterexample
        d["seed"] = self.seed
        if self.verdict is not None:
            d["verdict"] = self.verdict
        return d


def report_from_equalities(
    axiom: str,
    model: str,
    subject: str,
    pairs,
    strat: EqualityStrategy,
    seed: int = 0,
    equal_fn=None,
) -> LawReport:
    """Fold (label, lhs, rhs) morphism pairs into one LawReport."""
    if equal_fn is None:
        equal_fn = morphisms_equal
    checked = 0
    violations = 0
    counterexample = None
    for label, lhs, rhs in pairs:
        s = strat
        if isinstance(strat.mode, (Sampled, Auto)):
            s = strat.with_seed(derive_seed(strat.mode.seed, axiom, label))
        rep = equal_fn(lhs, rhs, s)
        checked += rep.checked
        if not rep.passed:
            violations += 1
            if counterexample is None:
                counterexample = dict(rep.counterexample or {}, clause=label)
    return LawReport(
        axiom=axiom,
        model=model,
        subject=subject,
        strategy=strat.describe(),
        checked=checked,
        violations=violations,
        counterexample=counterexample,
        seed=seed,
    )
