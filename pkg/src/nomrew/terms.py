"""Nominal term syntax and its two actions.

Atoms are bindable object-level names, unknowns are instantiable variables,
and a term is an atom, a suspension pi.X (a permutation waiting on an
unknown), an atom-abstraction [a]t, or a term-former application
f(t1,...,tn).  Permutations are finitely supported bijections on atoms kept
as swap lists; substitutions map unknowns to terms and do not avoid capture.
Everything here is an immutable value.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

MACHINE_MARK = "$"


class NominalError(Exception):
    """Base class for errors raised by this package."""


class SignatureError(NominalError):
    pass


@dataclass(frozen=True, slots=True)
class Atom:
    """An object-level name; equal iff the names are equal.

    Names containing the reserved ``$`` marker are machine-generated and can
    never be written in user syntax, so they are fresh by construction.
    """

    name: str

    @property
    def is_machine(self) -> bool:
        return MACHINE_MARK in self.name

    def __repr__(self):
        return f"Atom({self.name!r})"

    def __lt__(self, other: "Atom"):
        return self.name < other.name


@dataclass(frozen=True, slots=True)
class Unknown:
    """A variable standing for an as yet unknown term."""

    name: str

    @property
    def is_machine(self) -> bool:
        return MACHINE_MARK in self.name

    def __repr__(self):
        return f"Unknown({self.name!r})"

    def __lt__(self, other: "Unknown"):
        return self.name < other.name


class Permutation:
    """A finitely supported bijection on atoms, stored as a swap list.

    The list ``[s1, ..., sn]`` denotes the composition ``s1 o ... o sn``
    where the rightmost swap acts first.  Composition is concatenation and
    inverse is reversal, so both are cheap.  Equality and hashing go through
    the induced mapping: two swap lists describing the same bijection
    compare equal.
    """

    __slots__ = ("swaps", "_mapping", "_hash")

    def __init__(self, swaps: Iterable[tuple[Atom, Atom]] = ()):
        self.swaps = tuple((a, b) for a, b in swaps)
        self._mapping: dict[Atom, Atom] | None = None
        self._hash: int | None = None

    @property
    def mapping(self) -> dict[Atom, Atom]:
        """The nontrivial part of the induced function."""
        if self._mapping is None:
            mentioned = {c for pair in self.swaps for c in pair}
            out = {}
            for c in mentioned:
                img = c
                for a, b in reversed(self.swaps):
                    if img == a:
                        img = b
                    elif img == b:
                        img = a
                if img != c:
                    out[c] = img
            self._mapping = out
        return self._mapping

    @property
    def support(self) -> frozenset[Atom]:
        return frozenset(self.mapping)

    @property
    def is_identity(self) -> bool:
        return not self.mapping

    def __call__(self, a: Atom) -> Atom:
        return self.mapping.get(a, a)

    def inverse(self) -> "Permutation":
        return Permutation(tuple(reversed(self.swaps)))

    def __mul__(self, other: "Permutation") -> "Permutation":
        """Functional composition: ``(p * q)(a) == p(q(a))``."""
        return Permutation(self.swaps + other.swaps)

    def __eq__(self, other):
        if not isinstance(other, Permutation):
            return NotImplemented
        return self.mapping == other.mapping

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.mapping.items()))
        return self._hash

    @classmethod
    def from_mapping(cls, mapping: Mapping[Atom, Atom]) -> "Permutation":
        """Build a permutation from its nontrivial mapping (must be bijective)."""
        nontrivial = {a: b for a, b in mapping.items() if a != b}
        if set(nontrivial) != set(nontrivial.values()):
            raise ValueError(f"not a bijection: {mapping}")
        swaps = []
        seen = set()
        for start in sorted(nontrivial):
            if start in seen:
                continue
            cycle = [start]
            seen.add(start)
            nxt = nontrivial[start]
            while nxt != start:
                cycle.append(nxt)
                seen.add(nxt)
                nxt = nontrivial[nxt]
            for i in range(len(cycle) - 1):
                swaps.append((cycle[i], cycle[i + 1]))
        return cls(tuple(swaps))

    def normalized(self) -> "Permutation":
        """An equal permutation with a canonical (cycle-derived) swap list."""
        return Permutation.from_mapping(self.mapping)

    def __repr__(self):
        if self.is_identity:
            return "Permutation(id)"
        body = "".join(f"({a.name} {b.name})" for a, b in self.normalized().swaps)
        return f"Permutation({body})"


ID = Permutation()


def swap(a: Atom, b: Atom) -> Permutation:
    return Permutation(((a, b),))


class Term:
    """Base class of the four term constructors."""

    __slots__ = ()


@dataclass(frozen=True, slots=True)
class AtomTerm(Term):
    atom: Atom


@dataclass(frozen=True, slots=True)
class Suspension(Term):
    """A permutation suspended on an unknown, applied once it is instantiated."""

    perm: Permutation
    unknown: Unknown


@dataclass(frozen=True, slots=True)
class Abstraction(Term):
    atom: Atom
    body: Term


@dataclass(frozen=True, slots=True)
class App(Term):
    former: str
    args: tuple[Term, ...] = ()


def var(x: Unknown) -> Suspension:
    """The bare unknown X, i.e. the identity suspension id.X."""
    return Suspension(ID, x)


def act(pi: Permutation, t: Term) -> Term:
    """Permutation action on a term.

    Suspensions absorb the permutation eagerly, so a term at rest never
    contains a permutation applied to anything but an unknown; abstracted
    atoms are renamed along with everything else.
    """
    if pi.is_identity:
        return t
    match t:
        case AtomTerm(a):
            return AtomTerm(pi(a))
        case Suspension(inner, x):
            return Suspension(pi * inner, x)
        case Abstraction(a, body):
            return Abstraction(pi(a), act(pi, body))
        case App(f, args):
            return App(f, tuple(act(pi, u) for u in args))
    raise TypeError(f"not a term: {t!r}")


class Substitution(Mapping):
    """A finite map from unknowns to terms; unknowns outside the domain
    behave as the identity.  Identity bindings are dropped on construction
    so equal substitutions compare and hash equal."""

    __slots__ = ("_map",)

    def __init__(self, mapping: Mapping[Unknown, Term] | Iterable[tuple[Unknown, Term]] = ()):
        items = mapping.items() if isinstance(mapping, Mapping) else mapping
        self._map = {x: t for x, t in items if t != var(x)}

    def __getitem__(self, x: Unknown) -> Term:
        return self._map[x]

    def __iter__(self) -> Iterator[Unknown]:
        return iter(self._map)

    def __len__(self) -> int:
        return len(self._map)

    def image(self, x: Unknown) -> Term:
        """sigma(X), which is id.X when X is outside the domain."""
        got = self._map.get(x)
        return var(x) if got is None else got

    def compose(self, other: "Substitution") -> "Substitution":
        """The substitution mapping each X to (X sigma) other."""
        out = {x: substitute(t, other) for x, t in self._map.items()}
        for y, t in other._map.items():
            if y not in out:
                out[y] = t
        return Substitution(out)

    def __hash__(self):
        return hash(frozenset(self._map.items()))

    def __repr__(self):
        inner = ", ".join(f"{x.name}->{t!r}" for x, t in sorted(self._map.items(), key=lambda kv: kv[0].name))
        return f"Substitution({inner})"


EMPTY_SUBST = Substitution()


def substitute(t: Term, sigma: Substitution) -> Term:
    """Substitution action on a term.  Deliberately capturing: abstraction
    bodies are substituted under the binder unchanged."""
    if not sigma:
        return t
    match t:
        case AtomTerm():
            return t
        case Suspension(pi, x):
            got = sigma._map.get(x)
            return t if got is None else act(pi, got)
        case Abstraction(a, body):
            return Abstraction(a, substitute(body, sigma))
        case App(f, args):
            return App(f, tuple(substitute(u, sigma) for u in args))
    raise TypeError(f"not a term: {t!r}")


def atoms_of(*items) -> set[Atom]:
    """All atoms appearing anywhere in the given syntax.

    Accepts terms, atoms, unknowns, permutations, substitutions and
    arbitrarily nested iterables of these (freshness contexts iterate as
    (atom, unknown) pairs, so they work too).  The atoms of a suspension are
    the support of its permutation.
    """
    out: set[Atom] = set()
    stack = list(items)
    while stack:
        it = stack.pop()
        match it:
            case None | Unknown() | str() | int():
                pass
            case Atom():
                out.add(it)
            case AtomTerm(a):
                out.add(a)
            case Suspension(pi, _):
                out.update(pi.support)
            case Abstraction(a, body):
                out.add(a)
                stack.append(body)
            case App(_, args):
                stack.extend(args)
            case Permutation():
                out.update(it.support)
            case Substitution():
                stack.extend(it.values())
            case _:
                stack.extend(it)
    return out


def unknowns_of(*items) -> set[Unknown]:
    """All unknowns appearing anywhere in the given syntax; see atoms_of."""
    out: set[Unknown] = set()
    stack = list(items)
    while stack:
        it = stack.pop()
        match it:
            case None | Atom() | AtomTerm() | Permutation() | str() | int():
                pass
            case Unknown():
                out.add(it)
            case Suspension(_, x):
                out.add(x)
            case Abstraction(_, body):
                stack.append(body)
            case App(_, args):
                stack.extend(args)
            case Substitution():
                stack.extend(it.keys())
                stack.extend(it.values())
            case _:
                stack.extend(it)
    return out


def subterms(t: Term) -> Iterator[Term]:
    """All subterms of t in preorder, including t itself.  Suspensions are
    leaves: nothing under an unknown is a subterm."""
    yield t
    match t:
        case Abstraction(_, body):
            yield from subterms(body)
        case App(_, args):
            for u in args:
                yield from subterms(u)


def term_size(t: Term) -> int:
    return sum(1 for _ in subterms(t))


def term_depth(t: Term) -> int:
    """Depth with leaves (atoms and suspensions) at depth 1."""
    match t:
        case Abstraction(_, body):
            return 1 + term_depth(body)
        case App(_, args):
            return 1 + max((term_depth(u) for u in args), default=0)
        case _:
            return 1


@dataclass(frozen=True)
class Signature:
    """Term-formers with their arities."""

    arities: tuple[tuple[str, int], ...]

    @classmethod
    def of(cls, mapping: Mapping[str, int] | Iterable[tuple[str, int]]) -> "Signature":
        items = mapping.items() if isinstance(mapping, Mapping) else tuple(mapping)
        seen: dict[str, int] = {}
        for name, arity in items:
            if arity < 0:
                raise SignatureError(f"negative arity for {name}")
            if name in seen and seen[name] != arity:
                raise SignatureError(f"former {name} declared with arities {seen[name]} and {arity}")
            seen[name] = arity
        return cls(tuple(sorted(seen.items())))

    def arity(self, former: str) -> int:
        for name, n in self.arities:
            if name == former:
                return n
        raise SignatureError(f"unknown term-former {former}")

    def __contains__(self, former: str) -> bool:
        return any(name == former for name, _ in self.arities)

    def check_term(self, t: Term) -> None:
        """Raise SignatureError if t applies an undeclared or misused former.
        Reserved machine formers (containing $) pass unchecked."""
        for u in subterms(t):
            if isinstance(u, App) and MACHINE_MARK not in u.former:
                if len(u.args) != self.arity(u.former):
                    raise SignatureError(
                        f"former {u.former} has arity {self.arity(u.former)}, applied to {len(u.args)} arguments"
                    )


EMPTY_SIGNATURE = Signature(())


def fresh_names(base: str, count: int, avoid: set[str]) -> list[str]:
    """Deterministically pick `count` machine names base$0, base$1, ... that
    avoid the given names."""
    out: list[str] = []
    for n in itertools.count():
        if len(out) == count:
            break
        cand = f"{base}{MACHINE_MARK}{n}"
        if cand not in avoid:
            out.append(cand)
    return out
