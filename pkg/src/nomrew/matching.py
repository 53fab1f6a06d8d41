"""Nominal matching: instantiate the unknowns of a pattern-in-context so it
becomes alpha-equivalent to a target term under the target's context.

The solver decomposes a worklist of pattern/target pairs.  Mismatched
abstractions turn into a swapped equation plus a pending freshness
obligation, mirroring the ~[b] rule; a suspension pi.X on the pattern side
resolves to X -> pi^-1 . target.  Duplicate occurrences are reconciled by an
alpha check, and the pattern context's obligations are checked once the
substitution is complete.  Matching solutions are unique up to
alpha-equivalence under the target context; the solver returns the first
computed, which is not canonical.  Quadratic worst case; no attempt is made
at the known linear-time bound.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

from .alpha import FreshnessContext, alpha_holds, fresh_holds
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
    act,
    atoms_of,
    fresh_names,
    subterms,
    substitute,
    swap,
    term_size,
    unknowns_of,
)


class MatchProblemError(NominalError):
    pass


class OracleOverflow(NominalError):
    """The brute-force oracle refused an input beyond its documented bounds."""


@dataclass(frozen=True)
class MatchProblem:
    """(pattern_ctx |- pattern) matched against (target_ctx |- target).

    The two sides may not share unknowns; this is checked at construction.
    """

    pattern_ctx: FreshnessContext
    pattern: Term
    target_ctx: FreshnessContext
    target: Term

    def __post_init__(self):
        shared = unknowns_of(self.pattern_ctx, self.pattern) & unknowns_of(self.target_ctx, self.target)
        if shared:
            names = ", ".join(sorted(x.name for x in shared))
            raise MatchProblemError(f"pattern and target share unknowns: {names}")


@dataclass(frozen=True)
class MatchSolution:
    sigma: Substitution


def is_solution(problem: MatchProblem, sigma: Substitution) -> bool:
    """The three defining conditions: the domain lies within the pattern
    side, the instantiated pattern context holds under the target context,
    and the instantiated pattern is alpha-equivalent to the target."""
    if not set(sigma) <= unknowns_of(problem.pattern_ctx, problem.pattern):
        return False
    for a, x in problem.pattern_ctx:
        if not fresh_holds(problem.target_ctx, a, sigma.image(x)):
            return False
    return alpha_holds(problem.target_ctx, substitute(problem.pattern, sigma), problem.target)


def solve_match(problem: MatchProblem) -> Optional[MatchSolution]:
    """Return a solution, or None when none exists."""
    delta = problem.target_ctx
    binds: dict = {}
    pending: list[tuple[Atom, Term]] = []  # b # p, checked once binds is complete
    work = [(problem.pattern, problem.target)]
    while work:
        l, s = work.pop()
        match (l, s):
            case (AtomTerm(a), AtomTerm(b)):
                if a != b:
                    return None
            case (Suspension(pi, x), _):
                image = act(pi.inverse(), s)
                if x in binds:
                    if not alpha_holds(delta, binds[x], image):
                        return None
                else:
                    binds[x] = image
            case (Abstraction(a, lbody), Abstraction(b, sbody)):
                if a == b:
                    work.append((lbody, sbody))
                else:
                    pending.append((b, lbody))
                    work.append((act(swap(b, a), lbody), sbody))
            case (App(f, largs), App(g, sargs)):
                if f != g or len(largs) != len(sargs):
                    return None
                work.extend(zip(largs, sargs))
            case _:
                return None

    # Unknowns constrained by the pattern context but absent from the
    # pattern can always be sent to an atom fresh for everything in sight.
    leftover = {x for _, x in problem.pattern_ctx if x not in binds}
    if leftover:
        used = {a.name for a in atoms_of(problem.pattern_ctx, problem.pattern, problem.target_ctx, problem.target)}
        spare = AtomTerm(Atom(fresh_names("m", 1, used)[0]))
        for x in leftover:
            binds[x] = spare

    sigma = Substitution(binds)
    for b, p in pending:
        if not fresh_holds(delta, b, substitute(p, sigma)):
            return None
    for a, x in problem.pattern_ctx:
        if not fresh_holds(delta, a, sigma.image(x)):
            return None
    assert is_solution(problem, sigma)
    return MatchSolution(sigma)


MAX_ORACLE_NODES = 12
MAX_ORACLE_UNKNOWNS = 3


def enumerate_solutions_small(problem: MatchProblem, atom_budget: int = 1) -> list[Substitution]:
    """Brute-force matching oracle for desk-scale problems.

    Candidate images are the subterms of the target (plus bare atoms) closed
    under all permutations of the problem's atoms plus `atom_budget` spare
    atoms; every assignment of pattern unknowns to candidates is filtered
    through is_solution.  Used to certify no-match answers in tests.
    Raises OracleOverflow beyond its documented bounds rather than silently
    truncating.
    """
    if term_size(problem.target) > MAX_ORACLE_NODES:
        raise OracleOverflow(f"target has more than {MAX_ORACLE_NODES} nodes")
    pattern_unknowns = sorted(unknowns_of(problem.pattern_ctx, problem.pattern))
    if len(pattern_unknowns) > MAX_ORACLE_UNKNOWNS:
        raise OracleOverflow(f"pattern has more than {MAX_ORACLE_UNKNOWNS} unknowns")

    base = atoms_of(problem.pattern_ctx, problem.pattern, problem.target_ctx, problem.target)
    spare_names = fresh_names("s", atom_budget, {a.name for a in base})
    universe = sorted(base) + [Atom(n) for n in spare_names]

    seeds = list(subterms(problem.target)) + [AtomTerm(a) for a in universe]
    candidates = set()
    for perm_images in itertools.permutations(universe):
        pi = Permutation.from_mapping(dict(zip(universe, perm_images)))
        for u in seeds:
            candidates.add(act(pi, u))
    ordered = sorted(candidates, key=repr)

    out = []
    seen = set()
    for images in itertools.product(ordered, repeat=len(pattern_unknowns)):
        sigma = Substitution(zip(pattern_unknowns, images))
        if sigma in seen:
            continue
        seen.add(sigma)
        if is_solution(problem, sigma):
            out.append(sigma)
    return out
