"""Tangent bundle monad, its Kleisli category, and linear algebras.

T doubles every object (T(A) = A x A) and sends f to <f . pi0, d[f]>.
The unit pairs a point with the zero tangent; the multiplication folds
a second-order tangent down with the infinitesimal extension:

    eta = <1, 0>        mu = <pi00, pi10 + pi01 + eps(pi11)>

Kleisli maps A -> T(B) are kept as their two components. Composition
has a closed form and a definitional form (mu . T(g) . f); because the
closed form is the easiest place to get wrong, every call cross-checks
the two on a few sampled points (or exhaustively, in test builds).

The Kleisli category is itself a difference category: `KleisliCat`
adapts it to the axiom schemas in `kernel`, with generalized points of
A taken as base maps into T(A).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import DiffkitError, DomainMismatch
from .kernel import (
    BaseCat,
    DifferenceModel,
    add,
    check_axiom,
    compose,
    identity,
    is_group_homomorphism,
    is_linear,
    pair,
    product_map,
    projection,
    zero_map,
)
from .morphisms import (
    DEFAULT_STRATEGY,
    EqualityStrategy,
    LawReport,
    Morphism,
    Sampled,
    morphisms_equal,
    report_from_equalities,
)
from .spaces import Product, Space, TERMINAL, format_space

_ORACLE_MODE = "sampled"  # "sampled" | "full" | "off"
_ORACLE_POINTS = 8


def set_oracle_mode(mode: str):
    """Cross-check policy for the closed-form Kleisli composition."""
    global _ORACLE_MODE
    if mode not in ("sampled", "full", "off"):
        raise ValueError(mode)
    _ORACLE_MODE = mode


def oracle_mode() -> str:
    return _ORACLE_MODE


# ---------------------------------------------------------------------------
# the functor, unit, multiplication


def T_space(a: Space) -> Space:
    return Product(a, a)


def T_map(model: DifferenceModel, f: Morphism) -> Morphism:
    m = pair(compose(f, projection(0, f.dom, f.dom)), model.derivative(f))
    m.name = f"T({f.name})"
    return m


def eta(model: DifferenceModel, a: Space) -> Morphism:
    m = pair(identity(a), zero_map(a, a))
    m.name = "eta"
    return m


def mu(model: DifferenceModel, a: Space) -> Morphism:
    ta = T_space(a)
    p0, p1 = projection(0, ta, ta), projection(1, ta, ta)
    q0, q1 = projection(0, a, a), projection(1, a, a)
    pi00 = compose(q0, p0)
    pi10 = compose(q1, p0)
    pi01 = compose(q0, p1)
    pi11 = compose(q1, p1)
    m = pair(pi00, add(add(pi10, pi01), model.epsilon(pi11)))
    m.name = "mu"
    return m


def phi(a: Space, b: Space) -> Morphism:
    """T(A x B) -> T(A) x T(B); swaps the two middle coordinates."""
    ab = Product(a, b)
    pa, pb = projection(0, a, b), projection(1, a, b)
    m = pair(product_map(pa, pa), product_map(pb, pb))
    m.name = "phi"
    return m


def phi_inv(a: Space, b: Space) -> Morphism:
    ta, tb = T_space(a), T_space(b)
    qa0, qa1 = projection(0, a, a), projection(1, a, a)
    qb0, qb1 = projection(0, b, b), projection(1, b, b)
    m = pair(product_map(qa0, qb0), product_map(qa1, qb1))
    m.name = "phi_inv"
    return m


def check_monad_laws(
    model: DifferenceModel, a: Space, strat: EqualityStrategy = DEFAULT_STRATEGY
) -> LawReport:
    ta = T_space(a)
    pairs = [
        ("mu . eta_T = 1", compose(mu(model, a), eta(model, ta)), identity(ta)),
        ("mu . T(eta) = 1", compose(mu(model, a), T_map(model, eta(model, a))), identity(ta)),
        (
            "mu . mu_T = mu . T(mu)",
            compose(mu(model, a), mu(model, ta)),
            compose(mu(model, a), T_map(model, mu(model, a))),
        ),
    ]
    return report_from_equalities(
        "MonadLaws", model.tag, format_space(a), pairs, strat,
        seed=getattr(strat.mode, "seed", 0),
    )


def check_tangent_identities(
    model: DifferenceModel,
    a: Space,
    subjects: Sequence[Morphism],
    strat: EqualityStrategy = DEFAULT_STRATEGY,
) -> LawReport:
    """Naturality of eta and mu plus the T/derivative interplay identities."""
    pairs = []
    ta = T_space(a)
    for f in subjects:
        tf = T_map(model, f)
        pairs.append((f"T({f.name}).eta = eta.{f.name}",
                      compose(tf, eta(model, f.dom)), compose(eta(model, f.cod), f)))
        t2f = T_map(model, tf)
        pairs.append((f"mu.T^2({f.name}) = T({f.name}).mu",
                      compose(mu(model, f.cod), t2f), compose(tf, mu(model, f.dom))))
        pairs.append((f"T(d[{f.name}]) = d[T({f.name})].phi",
                      T_map(model, model.derivative(f)),
                      compose(model.derivative(tf), phi(f.dom, f.dom))))
        pairs.append((f"T(eps {f.name}) = eps T({f.name})",
                      T_map(model, model.epsilon(f)), model.epsilon(tf)))
    if len(subjects) >= 2:
        f, g = subjects[0], subjects[1]
        pairs.append(("T(f+g) = T(f)+T(g)",
                      T_map(model, add(f, g)), add(T_map(model, f), T_map(model, g))))
    pairs.append(("T(0) = 0",
                  T_map(model, zero_map(a, a)), zero_map(T_space(a), T_space(a))))
    # linear maps double strictly: T(plus) = plus x plus
    plus = model.plus_map(a)
    pairs.append(("T(plus) = plus x plus", T_map(model, plus), product_map(plus, plus)))
    # eps slides through the structure maps
    m = mu(model, a)
    pairs.append(("eps(mu) = mu . eps(1)",
                  model.epsilon(m), compose(m, model.epsilon(identity(T_space(ta))))))
    e = eta(model, a)
    pairs.append(("eps(eta) = eta . eps(1)",
                  model.epsilon(e), compose(e, model.epsilon(identity(a)))))
    ph = phi(a, a)
    pairs.append(("eps(phi) = phi . eps(1)",
                  model.epsilon(ph), compose(ph, model.epsilon(identity(ph.dom)))))
    return report_from_equalities(
        "TangentIdentities", model.tag, format_space(a), pairs, strat,
        seed=getattr(strat.mode, "seed", 0),
    )


# ---------------------------------------------------------------------------
# Kleisli maps


@dataclass(eq=False)
class KleisliMap:
    dom: Space
    cod: Space
    f0: Morphism
    f1: Morphism

    def __post_init__(self):
        for c in (self.f0, self.f1):
            if c.dom != self.dom or c.cod != self.cod:
                raise DomainMismatch("Kleisli components must share dom and cod")

    @property
    def name(self) -> str:
        return f"<{self.f0.name}|{self.f1.name}>"

    def as_base(self) -> Morphism:
        return pair(self.f0, self.f1)

    def __call__(self, x):
        return (self.f0(x), self.f1(x))


def kleisli_from_base(m: Morphism, cod: Space) -> KleisliMap:
    return KleisliMap(m.dom, cod,
                      compose(projection(0, cod, cod), m),
                      compose(projection(1, cod, cod), m))


def kleisli_identity(model: DifferenceModel, a: Space) -> KleisliMap:
    return KleisliMap(a, a, identity(a), zero_map(a, a))


def kleisli_proj(i: int, a: Space, b: Space) -> KleisliMap:
    p = Product(a, b)
    c = a if i == 0 else b
    return KleisliMap(p, c, projection(i, a, b), zero_map(p, c))


def kleisli_zero(a: Space, b: Space) -> KleisliMap:
    return KleisliMap(a, b, zero_map(a, b), zero_map(a, b))


def kleisli_add(f: KleisliMap, g: KleisliMap) -> KleisliMap:
    return KleisliMap(f.dom, f.cod, add(f.f0, g.f0), add(f.f1, g.f1))


def kleisli_pair(f: KleisliMap, g: KleisliMap) -> KleisliMap:
    if f.dom != g.dom:
        raise DomainMismatch("Kleisli pairing needs a shared domain")
    return KleisliMap(f.dom, Product(f.cod, g.cod),
                      pair(f.f0, g.f0), pair(f.f1, g.f1))


def kleisli_epsilon(model: DifferenceModel, f: KleisliMap) -> KleisliMap:
    return KleisliMap(f.dom, f.cod, model.epsilon(f.f0), model.epsilon(f.f1))


def kleisli_derivative(model: DifferenceModel, f: KleisliMap) -> KleisliMap:
    return KleisliMap(Product(f.dom, f.dom), f.cod,
                      model.derivative(f.f0), model.derivative(f.f1))


def kleisli_compose(
    model: DifferenceModel,
    g: KleisliMap,
    f: KleisliMap,
    oracle_strat: Optional[EqualityStrategy] = None,
) -> KleisliMap:
    """Closed-form composition <g0.f0, d[g0]<f0,f1> + g1.(f0 (+) f1)>.

    Every call recomputes the definitional form mu . T(g) . f and
    asserts agreement (sampled by default, full under test builds).
    """
    if f.cod != g.dom:
        raise DomainMismatch(f"cannot compose {g.name} after {f.name}")
    c0 = compose(g.f0, f.f0)
    c1 = add(
        compose(model.derivative(g.f0), pair(f.f0, f.f1)),
        compose(g.f1, add(f.f0, model.epsilon(f.f1))),
    )
    out = KleisliMap(f.dom, g.cod, c0, c1)

    if _ORACLE_MODE != "off":
        definitional = compose(mu(model, g.cod),
                               compose(T_map(model, g.as_base()), f.as_base()))
        strat = oracle_strat
        if strat is None:
            strat = (DEFAULT_STRATEGY if _ORACLE_MODE == "full"
                     else EqualityStrategy(Sampled(_ORACLE_POINTS, 1009)))
        rep = morphisms_equal(out.as_base(), definitional, strat)
        if not rep.passed:
            raise DiffkitError(
                f"Kleisli composition self-check failed: {rep.counterexample}"
            )
    return out


def sharp(model: DifferenceModel, k: KleisliMap) -> Morphism:
    """Kleisli extension T(A) -> T(B): <f0.pi0, f1.pi0 + d[f0] + eps(d[f1])>."""
    a = k.dom
    p0 = projection(0, a, a)
    m = pair(
        compose(k.f0, p0),
        add(add(compose(k.f1, p0), model.derivative(k.f0)),
            model.epsilon(model.derivative(k.f1))),
    )
    m.name = f"{k.name}#"
    return m


# ---------------------------------------------------------------------------
# the Kleisli category as an axiom-schema target


class KleisliCat:
    """Difference-category interface over Kleisli maps.

    A generalized point of A at stage S is a base map S -> T(A), so the
    point stage for k points of A is the base product of k copies of
    T(A) with its tautological projections split into components.
    """

    def __init__(self, model: DifferenceModel):
        self.model = model

    def dom(self, f):
        return f.dom

    def cod(self, f):
        return f.cod

    def identity(self, a):
        return kleisli_identity(self.model, a)

    def compose(self, g, f):
        return kleisli_compose(self.model, g, f)

    def pair(self, f, g):
        return kleisli_pair(f, g)

    def proj(self, i, a, b):
        return kleisli_proj(i, a, b)

    def zero(self, a, b):
        return kleisli_zero(a, b)

    def add(self, f, g):
        return kleisli_add(f, g)

    def terminal(self, a):
        return kleisli_zero(a, TERMINAL)

    def epsilon(self, f):
        return kleisli_epsilon(self.model, f)

    def derivative(self, f):
        return kleisli_derivative(self.model, f)

    def obj_product(self, a, b):
        return Product(a, b)

    def generic_points(self, objs: Sequence[Space]):
        base_objs = [T_space(o) for o in objs]
        stage = base_objs[-1]
        for o in reversed(base_objs[:-1]):
            stage = Product(o, stage)
        cat = BaseCat(self.model)
        _, chains = cat.generic_points(base_objs)
        points = [kleisli_from_base(chain, o) for chain, o in zip(chains, objs)]
        return stage, points

    def equal(self, f, g, strat):
        return morphisms_equal(f.as_base(), g.as_base(), strat)

    def describe(self, f):
        return f.name


def random_kleisli_subjects(
    model: DifferenceModel, space: Space, count: int, seed: int
) -> list[KleisliMap]:
    comps = model.random_subjects(space, 2 * count, seed)
    return [
        KleisliMap(space, space, comps[2 * i], comps[2 * i + 1]) for i in range(count)
    ]


_KLEISLI_AXIOMS = [
    "CdC0", "CdC1", "CdC2", "CdC3", "CdC4", "CdC5", "CdC6", "CdC7",
    "CdC6a", "CdC7a", "E1", "E2", "E3",
]


def check_kleisli_cdc(
    model: DifferenceModel,
    a: Space,
    strat: EqualityStrategy = DEFAULT_STRATEGY,
    subjects: int = 8,
    seed: int = 0,
    include_additivity: Optional[bool] = None,
) -> list[LawReport]:
    """The full coherence suite, run inside the Kleisli category.

    When the base infinitesimal extension is zero (the smooth model),
    the Kleisli derivative is additive in its second argument as well,
    so CDC2-additivity is appended there by default.
    """
    cat = KleisliCat(model)
    subs = random_kleisli_subjects(model, a, subjects, seed)
    if include_additivity is None:
        include_additivity = model.tag == "smooth"
    axioms = list(_KLEISLI_AXIOMS) + (["CDC2-additivity"] if include_additivity else [])
    out = []
    for ax in axioms:
        agg: Optional[LawReport] = None
        for i, s in enumerate(subs):
            pair_subjects = [s, subs[(i + 1) % len(subs)]]
            rep = check_axiom(model, ax, pair_subjects, strat, cat=cat)
            if agg is None:
                agg = rep
                agg.subject = f"{len(subs)} random kleisli subjects"
            else:
                agg.checked += rep.checked
                agg.violations += rep.violations
                if agg.counterexample is None:
                    agg.counterexample = rep.counterexample
        out.append(agg)
    return out


# ---------------------------------------------------------------------------
# linear T-algebras


@dataclass
class AlgebraCandidate:
    space: Space
    nu: Morphism  # T(space) -> space


def free_algebra(model: DifferenceModel, a: Space) -> AlgebraCandidate:
    return AlgebraCandidate(T_space(a), mu(model, a))


def check_linear_algebra(
    model: DifferenceModel,
    cand: AlgebraCandidate,
    strat: EqualityStrategy = DEFAULT_STRATEGY,
) -> LawReport:
    """Algebra laws nu.eta = 1 and nu.T(nu) = nu.mu, plus linearity of nu.

    In the finite-difference model a passing candidate decomposes as
    nu(x, y) = x + e(y) with e an endomorphism; e is extracted as
    nu(0, -) and both the homomorphism property and the decomposition
    are re-verified.
    """
    a, nu = cand.space, cand.nu
    if nu.dom != T_space(a) or nu.cod != a:
        raise DomainMismatch("algebra map must have type T(A) -> A")
    pairs = [
        ("nu . eta = 1", compose(nu, eta(model, a)), identity(a)),
        ("nu . T(nu) = nu . mu",
         compose(nu, T_map(model, nu)), compose(nu, mu(model, a))),
    ]
    linear, lin_rep = is_linear(model, nu, strat)
    rep = report_from_equalities(
        "LinearAlgebra", model.tag, format_space(a), pairs, strat,
        seed=getattr(strat.mode, "seed", 0),
    )
    rep.checked += lin_rep.checked
    rep.violations += lin_rep.violations
    if rep.counterexample is None and lin_rep.counterexample is not None:
        rep.counterexample = dict(lin_rep.counterexample, clause="nu linearity")

    if rep.passed and model.tag == "findiff":
        e = compose(nu, pair(zero_map(a, a), identity(a)))
        e.name = "e"
        if not is_group_homomorphism(e, strat):
            rep.violations += 1
            rep.counterexample = {"clause": "extracted e = nu(0,-) is not additive"}
        else:
            p0, p1 = projection(0, a, a), projection(1, a, a)
            recon = add(p0, compose(e, p1))
            check = morphisms_equal(nu, recon, strat)
            rep.checked += check.checked
            if not check.passed:
                rep.violations += 1
                rep.counterexample = dict(check.counterexample,
                                          clause="nu != pi0 + e(pi1)")
    return rep
