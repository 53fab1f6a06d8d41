"""Derivability of freshness (a # t) and alpha-equivalence (s =a= t)
judgements under a freshness context.

Both judgements are checked by a single syntax-directed recursion over the
rules #ab, #[a], #[b], #X, #f and ~a, ~[a], ~[b], ~X, ~f.  The checkers
either answer with a replayable derivation tree or, on the fast path, with a
plain boolean.  A de Bruijn style conversion of ground terms provides an
independent oracle for alpha-equivalence.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .terms import (
    Abstraction,
    App,
    Atom,
    AtomTerm,
    NominalError,
    Permutation,
    Substitution,
    Suspension,
    Term,
    Unknown,
    act,
    swap,
    unknowns_of,
)


@dataclass(frozen=True, slots=True)
class FreshnessConstraint:
    """A pair a # t; primitive when t is a bare unknown."""

    atom: Atom
    target: Term

    @property
    def is_primitive(self) -> bool:
        return isinstance(self.target, Suspension) and self.target.perm.is_identity


@dataclass(frozen=True)
class FreshnessContext:
    """A finite set of primitive constraints a # X, the hypotheses of every
    judgement.  Set semantics: order and duplicates are irrelevant."""

    pairs: frozenset[tuple[Atom, Unknown]] = frozenset()

    @classmethod
    def of(cls, *pairs: tuple[Atom, Unknown]) -> "FreshnessContext":
        return cls(frozenset(pairs))

    def __iter__(self):
        return iter(sorted(self.pairs, key=lambda p: (p[0].name, p[1].name)))

    def __len__(self):
        return len(self.pairs)

    def __contains__(self, pair: tuple[Atom, Unknown]) -> bool:
        return pair in self.pairs

    def __or__(self, other: "FreshnessContext") -> "FreshnessContext":
        return FreshnessContext(self.pairs | other.pairs)

    def with_pairs(self, pairs: Iterable[tuple[Atom, Unknown]]) -> "FreshnessContext":
        return FreshnessContext(self.pairs | frozenset(pairs))

    def atoms(self) -> set[Atom]:
        return {a for a, _ in self.pairs}

    def unknowns(self) -> set[Unknown]:
        return {x for _, x in self.pairs}


EMPTY_CTX = FreshnessContext()


@dataclass(frozen=True)
class Derivation:
    """A rule application tree; each node carries the rule name and the
    judgement it concludes."""

    rule: str
    conclusion: tuple
    children: tuple["Derivation", ...] = ()


def fresh_holds(ctx: FreshnessContext, a: Atom, t: Term) -> bool:
    """Is ctx |- a # t derivable?  Fast path without derivation recording."""
    match t:
        case AtomTerm(b):
            return a != b
        case Suspension(pi, x):
            return (pi.inverse()(a), x) in ctx
        case Abstraction(b, body):
            return a == b or fresh_holds(ctx, a, body)
        case App(_, args):
            return all(fresh_holds(ctx, a, u) for u in args)
    raise TypeError(f"not a term: {t!r}")


def check_fresh(ctx: FreshnessContext, a: Atom, t: Term) -> Optional[Derivation]:
    """Like fresh_holds but returns the derivation, or None."""
    conclusion = ("fresh", ctx, a, t)
    match t:
        case AtomTerm(b):
            return Derivation("#ab", conclusion) if a != b else None
        case Suspension(pi, x):
            return Derivation("#X", conclusion) if (pi.inverse()(a), x) in ctx else None
        case Abstraction(b, body):
            if a == b:
                return Derivation("#[a]", conclusion)
            sub = check_fresh(ctx, a, body)
            return Derivation("#[b]", conclusion, (sub,)) if sub else None
        case App(_, args):
            subs = []
            for u in args:
                sub = check_fresh(ctx, a, u)
                if sub is None:
                    return None
                subs.append(sub)
            return Derivation("#f", conclusion, tuple(subs))
    raise TypeError(f"not a term: {t!r}")


def disagreement_set(pi: Permutation, pi2: Permutation) -> frozenset[Atom]:
    """The atoms on which the two permutations differ."""
    return frozenset(a for a in pi.support | pi2.support if pi(a) != pi2(a))


def alpha_holds(ctx: FreshnessContext, s: Term, t: Term) -> bool:
    """Is ctx |- s =a= t derivable?  Fast path without derivation recording."""
    match (s, t):
        case (AtomTerm(a), AtomTerm(b)):
            return a == b
        case (Suspension(p1, x1), Suspension(p2, x2)):
            return x1 == x2 and all((a, x1) in ctx for a in disagreement_set(p1, p2))
        case (Abstraction(a, u), Abstraction(b, v)):
            if a == b:
                return alpha_holds(ctx, u, v)
            return fresh_holds(ctx, b, u) and alpha_holds(ctx, act(swap(b, a), u), v)
        case (App(f, xs), App(g, ys)):
            return f == g and len(xs) == len(ys) and all(alpha_holds(ctx, u, v) for u, v in zip(xs, ys))
    return False


def check_alpha(ctx: FreshnessContext, s: Term, t: Term) -> Optional[Derivation]:
    """Like alpha_holds but returns the derivation, or None."""
    conclusion = ("alpha", ctx, s, t)
    match (s, t):
        case (AtomTerm(a), AtomTerm(b)):
            return Derivation("~a", conclusion) if a == b else None
        case (Suspension(p1, x1), Suspension(p2, x2)):
            if x1 == x2 and all((a, x1) in ctx for a in disagreement_set(p1, p2)):
                return Derivation("~X", conclusion)
            return None
        case (Abstraction(a, u), Abstraction(b, v)):
            if a == b:
                sub = check_alpha(ctx, u, v)
                return Derivation("~[a]", conclusion, (sub,)) if sub else None
            fr = check_fresh(ctx, b, u)
            if fr is None:
                return None
            sub = check_alpha(ctx, act(swap(b, a), u), v)
            return Derivation("~[b]", conclusion, (fr, sub)) if sub else None
        case (App(f, xs), App(g, ys)):
            if f != g or len(xs) != len(ys):
                return None
            subs = []
            for u, v in zip(xs, ys):
                sub = check_alpha(ctx, u, v)
                if sub is None:
                    return None
                subs.append(sub)
            return Derivation("~f", conclusion, tuple(subs))
    return None


def ctx_entails(ctx: FreshnessContext, constraints: Iterable[FreshnessConstraint | tuple[Atom, Term]]) -> bool:
    """Does ctx derive every constraint a # t in the collection?"""
    for c in constraints:
        a, t = (c.atom, c.target) if isinstance(c, FreshnessConstraint) else c
        if not fresh_holds(ctx, a, t):
            return False
    return True


def verify_derivation(d: Derivation) -> bool:
    """Replay a derivation: check that each node is a correct application of
    its rule to its children's conclusions."""
    match d.conclusion:
        case ("fresh", ctx, a, t):
            expected = check_fresh(ctx, a, t)
        case ("alpha", ctx, s, t):
            expected = check_alpha(ctx, s, t)
        case _:
            return False
    return expected is not None and _same_shape(expected, d)


def _same_shape(a: Derivation, b: Derivation) -> bool:
    return (
        a.rule == b.rule
        and a.conclusion == b.conclusion
        and len(a.children) == len(b.children)
        and all(_same_shape(x, y) for x, y in zip(a.children, b.children))
    )


class NonGroundError(NominalError):
    pass


def nameless_form(t: Term, binders: tuple[Atom, ...] = ()) -> tuple:
    """Convert a ground term to a nameless (binder-indexed) tree.

    Bound atoms become their de Bruijn distance to the binder, free atoms
    stay by name.  Two ground terms are alpha-equivalent exactly when their
    nameless forms are equal.
    """
    match t:
        case AtomTerm(a):
            for i, b in enumerate(reversed(binders)):
                if a == b:
                    return ("bound", i)
            return ("free", a.name)
        case Abstraction(a, body):
            return ("abs", nameless_form(body, binders + (a,)))
        case App(f, args):
            return ("app", f, tuple(nameless_form(u, binders) for u in args))
        case Suspension():
            raise NonGroundError(f"term contains an unknown: {t!r}")
    raise TypeError(f"not a term: {t!r}")


def alpha_oracle_ground(s: Term, t: Term) -> bool:
    """Alpha-equivalence of ground terms, decided independently of the
    Figure-style rules via the nameless conversion."""
    if unknowns_of(s) or unknowns_of(t):
        raise NonGroundError("alpha_oracle_ground requires ground terms")
    return nameless_form(s) == nameless_form(t)
