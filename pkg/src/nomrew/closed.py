"""Freshened variants, the closedness test, closed rewriting, and the
equality decision procedure for convergent closed theories.

A closed rewrite step first renames every atom and unknown of the rule to
machine-fresh ones, extends the context with freshness of those new atoms
for the subject's unknowns, and then solves a plain matching problem: no
permutation search at all, which is the efficiency payoff over general
rewriting.  Machine atoms that the match drags into the result only ever
occur where the extended context proves them fresh, so a scrubbing pass
rewrites the result to an alpha-equivalent representative mentioning as few
of them as possible.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

from .alpha import EMPTY_CTX, FreshnessContext, alpha_holds, fresh_holds
from .matching import MatchProblem, MatchSolution, solve_match
from .rewrite import (
    DEFAULT_CONFIG,
    NormalizeResult,
    ReachableSet,
    RewriteRule,
    RewriteStep,
    SearchConfig,
    StepResults,
    Theory,
    _decompositions,
    _ordered_paths,
    _universe,
    path_str,
    positions,
    replace_at,
    subterm_at,
)
from .terms import (
    MACHINE_MARK,
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
    atoms_of,
    substitute,
    swap,
    unknowns_of,
)

PAIR_FORMER = "$pair"  # reserved 2-ary former used by the rule closedness test


class NotClosedError(NominalError):
    pass


class FreshNamer:
    """A monotone counter for machine-fresh names, confined to one engine
    session.  The seed fixes the starting counter so traces reproduce."""

    def __init__(self, seed: int = 0):
        self._n = seed

    def _next(self, stem: str, avoid: set[str]) -> str:
        while True:
            name = f"{stem}{MACHINE_MARK}{self._n}"
            self._n += 1
            if name not in avoid:
                return name

    def fresh_atom(self, base: str, avoid: set[str]) -> Atom:
        return Atom(self._next(base.split(MACHINE_MARK)[0] or "a", avoid))

    def fresh_unknown(self, base: str, avoid: set[str]) -> Unknown:
        return Unknown(self._next(base.split(MACHINE_MARK)[0] or "V", avoid))


@dataclass(frozen=True)
class FreshenedVariant:
    """A structure-preserving renaming to machine-fresh atoms and unknowns.

    `renamed` has exactly the shape of the original with the two bijections
    applied; the images avoid the caller's avoid sets and everything in the
    original.
    """

    renamed: object
    atom_map: dict
    unknown_map: dict


def _rename_term(t: Term, amap: dict, umap: dict) -> Term:
    match t:
        case AtomTerm(a):
            return AtomTerm(amap.get(a, a))
        case Suspension(pi, x):
            swaps = tuple((amap.get(a, a), amap.get(b, b)) for a, b in pi.swaps)
            return Suspension(Permutation(swaps), umap.get(x, x))
        case Abstraction(a, body):
            return Abstraction(amap.get(a, a), _rename_term(body, amap, umap))
        case App(f, args):
            return App(f, tuple(_rename_term(u, amap, umap) for u in args))
    raise TypeError(f"not a term: {t!r}")


def _rename_ctx(ctx: FreshnessContext, amap: dict, umap: dict) -> FreshnessContext:
    return FreshnessContext(frozenset((amap.get(a, a), umap.get(x, x)) for a, x in ctx))


def _make_maps(atoms, unknowns, avoid_atoms, avoid_unknowns, namer: FreshNamer):
    avoid_names = {a.name for a in avoid_atoms} | {a.name for a in atoms}
    avoid_names |= {x.name for x in avoid_unknowns} | {x.name for x in unknowns}
    amap = {}
    for a in sorted(atoms):
        fresh = namer.fresh_atom(a.name, avoid_names)
        avoid_names.add(fresh.name)
        amap[a] = fresh
    umap = {}
    for x in sorted(unknowns):
        fresh = namer.fresh_unknown(x.name, avoid_names)
        avoid_names.add(fresh.name)
        umap[x] = fresh
    return amap, umap


def freshen_term_in_context(
    ctx: FreshnessContext,
    t: Term,
    avoid_atoms: set[Atom] = frozenset(),
    avoid_unknowns: set[Unknown] = frozenset(),
    namer: FreshNamer | None = None,
) -> FreshenedVariant:
    namer = namer or FreshNamer()
    amap, umap = _make_maps(atoms_of(ctx, t), unknowns_of(ctx, t), avoid_atoms, avoid_unknowns, namer)
    return FreshenedVariant((_rename_ctx(ctx, amap, umap), _rename_term(t, amap, umap)), amap, umap)


def freshen_rule(
    rule: RewriteRule,
    avoid_atoms: set[Atom] = frozenset(),
    avoid_unknowns: set[Unknown] = frozenset(),
    namer: FreshNamer | None = None,
) -> FreshenedVariant:
    namer = namer or FreshNamer()
    amap, umap = _make_maps(rule.atoms(), rule.unknowns(), avoid_atoms, avoid_unknowns, namer)
    renamed = RewriteRule(
        rule.name,
        _rename_ctx(rule.ctx, amap, umap),
        _rename_term(rule.lhs, amap, umap),
        _rename_term(rule.rhs, amap, umap),
    )
    return FreshenedVariant(renamed, amap, umap)


@dataclass(frozen=True)
class ClosednessResult:
    closed: bool
    problem: MatchProblem
    witness: Optional[Substitution]
    variant: FreshenedVariant

    def __bool__(self):
        return self.closed


def is_closed(ctx: FreshnessContext, t: Term, namer: FreshNamer | None = None) -> ClosednessResult:
    """Does (ctx |- t) match its own freshened variant under ctx extended
    with freshness of all the variant's atoms for all of t's unknowns?  The
    answer does not depend on which freshened variant is chosen."""
    variant = freshen_term_in_context(ctx, t, atoms_of(ctx, t), unknowns_of(ctx, t), namer)
    fresh_ctx, fresh_t = variant.renamed
    extension = {
        (a, x)
        for a in atoms_of(fresh_ctx, fresh_t)
        for x in unknowns_of(ctx, t)
    }
    problem = MatchProblem(fresh_ctx, fresh_t, ctx.with_pairs(extension), t)
    sol = solve_match(problem)
    return ClosednessResult(sol is not None, problem, sol.sigma if sol else None, variant)


def is_closed_rule(rule: RewriteRule, namer: FreshNamer | None = None) -> ClosednessResult:
    """A rule (or axiom) is closed when its context paired with both sides,
    packed with a reserved pair former, is closed."""
    return is_closed(rule.ctx, App(PAIR_FORMER, (rule.lhs, rule.rhs)), namer)


def _minimize_perm(pi: Permutation, movable: set[Atom]) -> Permutation:
    """The permutation agreeing with pi outside `movable` whose support is
    as small as possible (disagreements stay inside `movable`)."""
    keep = {c: v for c, v in pi.mapping.items() if c not in movable}
    involved = set(keep) | set(keep.values())
    missing = sorted(involved - set(keep))
    free = set(involved) - set(keep.values())
    for c in list(missing):
        if c in free:
            keep[c] = c
            missing.remove(c)
            free.remove(c)
    for c, v in zip(missing, sorted(free)):
        keep[c] = v
    return Permutation.from_mapping(keep)


def scrub(ctx: FreshnessContext, t: Term, pool: list[Atom]) -> Term:
    """Rewrite t to an alpha-equivalent term (under ctx) mentioning as few
    machine atoms as possible: suspension permutations are minimized using
    the freshness facts ctx provides, and machine-named binders are renamed
    into the pool where freshness allows."""
    match t:
        case AtomTerm():
            return t
        case Suspension(pi, x):
            movable = {a for a in pi.support if (a, x) in ctx}
            return Suspension(_minimize_perm(pi, movable), x)
        case Abstraction(a, body):
            body = scrub(ctx, body, pool)
            if a.is_machine:
                for z in pool:
                    if z != a and fresh_holds(ctx, z, body):
                        # the rename pushes a swap into suspensions, so the
                        # renamed body needs scrubbing again
                        return Abstraction(z, scrub(ctx, act(swap(z, a), body), pool))
            return Abstraction(a, body)
        case App(f, args):
            return App(f, tuple(scrub(ctx, u, pool) for u in args))
    raise TypeError(f"not a term: {t!r}")


def closed_rewrite_step(
    ctx: FreshnessContext,
    s: Term,
    rule: RewriteRule,
    namer: FreshNamer | None = None,
    cfg: SearchConfig = DEFAULT_CONFIG,
    with_variants: bool = True,
) -> StepResults:
    """All closed one-step rewrites of s by the rule, modulo alpha on the
    subject.  The rule is freshened against everything in sight, the context
    is extended with freshness of the freshened atoms for the subject's
    unknowns, and each position is solved by plain matching."""
    namer = namer or FreshNamer()
    variant = freshen_rule(rule, atoms_of(ctx, s) | rule.atoms(), unknowns_of(ctx, s) | rule.unknowns(), namer)
    frule: RewriteRule = variant.renamed
    extension = FreshnessContext(
        frozenset((a, x) for a in frule.atoms() for x in unknowns_of(ctx, s))
    )
    ctx2 = ctx | extension
    # Same variant universe as the general engine so the two step relations
    # stay comparable on closed rules.
    universe, truncated = _universe(rule.atoms(), atoms_of(ctx, s), cfg)
    pool = sorted(atoms_of(ctx, s)) + sorted(rule.atoms() - atoms_of(ctx, s)) + [a for a in universe if a.is_machine]
    out = []
    seen = set()
    for path, _ in positions(s):
        for hole, rebuild in _decompositions(ctx2, s, path, universe, with_variants):
            sol = solve_match(MatchProblem(frule.ctx, frule.lhs, ctx2, hole))
            if sol is None:
                continue
            raw = rebuild(substitute(frule.rhs, sol.sigma))
            result = scrub(ctx2, raw, pool)
            key = (path, result, sol.sigma)
            if key in seen:
                continue
            seen.add(key)
            out.append(
                RewriteStep(
                    rule.name,
                    path,
                    Permutation(),
                    sol.sigma,
                    s,
                    rebuild(hole),
                    result,
                    mode="closed",
                    freshened=frule,
                    ctx_extension=extension,
                )
            )
    return StepResults(out, truncated)


def replay_closed_step(ctx: FreshnessContext, step: RewriteStep) -> bool:
    """Re-verify a closed step from its recorded freshened rule and context
    extension."""
    if step.mode != "closed" or step.freshened is None:
        return False
    frule = step.freshened
    ctx2 = ctx | step.ctx_extension
    if not alpha_holds(ctx2, step.source, step.variant):
        return False
    try:
        hole = subterm_at(step.variant, step.path)
    except IndexError:
        return False
    theta = step.subst
    for a, x in frule.ctx:
        if not fresh_holds(ctx2, a, theta.image(x)):
            return False
    if not alpha_holds(ctx2, hole, substitute(frule.lhs, theta)):
        return False
    rebuilt = replace_at(step.variant, step.path, substitute(frule.rhs, theta))
    return alpha_holds(ctx2, rebuilt, step.result)


def _first_step_closed(
    ctx: FreshnessContext, s: Term, theory: Theory, namer: FreshNamer, cfg: SearchConfig
) -> Optional[RewriteStep]:
    for path in _ordered_paths(s, cfg.strategy):
        hole = subterm_at(s, path)
        for rule in theory.rules:
            variant = freshen_rule(
                rule, atoms_of(ctx, s) | rule.atoms(), unknowns_of(ctx, s) | rule.unknowns(), namer
            )
            frule: RewriteRule = variant.renamed
            extension = FreshnessContext(
                frozenset((a, x) for a in frule.atoms() for x in unknowns_of(ctx, s))
            )
            ctx2 = ctx | extension
            sol = solve_match(MatchProblem(frule.ctx, frule.lhs, ctx2, hole))
            if sol is None:
                continue
            pool = sorted(atoms_of(ctx, s)) + sorted(rule.atoms() - atoms_of(ctx, s))
            result = scrub(ctx2, replace_at(s, path, substitute(frule.rhs, sol.sigma)), pool)
            return RewriteStep(
                rule.name, path, Permutation(), sol.sigma, s, s, result,
                mode="closed", freshened=frule, ctx_extension=extension,
            )
    return None


def closed_normalize(
    ctx: FreshnessContext,
    s: Term,
    theory: Theory,
    fuel: int = 500,
    namer: FreshNamer | None = None,
    strategy: str | None = None,
    cfg: SearchConfig = DEFAULT_CONFIG,
) -> NormalizeResult:
    """Apply closed steps (leftmost-outermost, first rule in theory order)
    until none applies or the fuel runs out."""
    if fuel <= 0:
        raise ValueError("fuel must be positive")
    if strategy is not None:
        from dataclasses import replace as _replace

        cfg = _replace(cfg, strategy=strategy)
    namer = namer or FreshNamer()
    trace: list[RewriteStep] = []
    current = s
    for _ in range(fuel):
        step = _first_step_closed(ctx, current, theory, namer, cfg)
        if step is None:
            return NormalizeResult(current, trace, "normal_form")
        trace.append(step)
        current = step.result
    if _first_step_closed(ctx, current, theory, namer, cfg) is None:
        return NormalizeResult(current, trace, "normal_form")
    return NormalizeResult(current, trace, "fuel_exhausted")


def closed_reachable(
    ctx: FreshnessContext,
    s: Term,
    theory: Theory,
    fuel: int,
    namer: FreshNamer | None = None,
    cfg: SearchConfig = DEFAULT_CONFIG,
) -> ReachableSet:
    if fuel <= 0:
        raise ValueError("fuel must be positive")
    namer = namer or FreshNamer()
    reached = ReachableSet(ctx)
    reached.add(s)
    frontier = [s]
    for _ in range(fuel):
        new: list[Term] = []
        for t in frontier:
            for rule in theory.rules:
                for step in closed_rewrite_step(ctx, t, rule, namer, cfg):
                    if reached.add(step.result):
                        new.append(step.result)
        if not new:
            break
        frontier = new
    return reached


def closed_joinable(
    ctx: FreshnessContext,
    s: Term,
    t: Term,
    theory: Theory,
    fuel: int = 5,
    namer: FreshNamer | None = None,
    cfg: SearchConfig = DEFAULT_CONFIG,
) -> bool:
    """Is there a term both sides closed-rewrite to (within the fuel)?"""
    from_s = closed_reachable(ctx, s, theory, fuel, namer, cfg)
    from_t = closed_reachable(ctx, t, theory, fuel, namer, cfg)
    return any(u in from_t for u in from_s)


@dataclass
class Decision:
    verdict: str  # "equal" | "not_equal" | "inconclusive"
    left: NormalizeResult
    right: NormalizeResult
    assume_convergent: bool


def decide_equal(
    ctx: FreshnessContext,
    s: Term,
    t: Term,
    theory: Theory,
    assume_convergent: bool = False,
    fuel: int = 500,
    namer: FreshNamer | None = None,
    cfg: SearchConfig = DEFAULT_CONFIG,
) -> Decision:
    """Normalize both sides by closed rewriting and compare normal forms up
    to alpha.  "equal" is always definitive (soundness); "not_equal" is
    definitive only under the convergence assumption, otherwise it degrades
    to "inconclusive", as does running out of fuel.

    Every rule of the theory must be closed; otherwise the theorems backing
    this procedure do not apply and the offending rules are reported.
    """
    bad = [rule.name for rule in theory.rules if not is_closed_rule(rule, namer)]
    if bad:
        raise NotClosedError(f"rules not closed: {', '.join(bad)}")
    namer = namer or FreshNamer()
    left = closed_normalize(ctx, s, theory, fuel, namer, cfg=cfg)
    right = closed_normalize(ctx, t, theory, fuel, namer, cfg=cfg)
    if alpha_holds(ctx, left.term, right.term):
        return Decision("equal", left, right, assume_convergent)
    if left.status == "normal_form" and right.status == "normal_form" and assume_convergent:
        return Decision("not_equal", left, right, assume_convergent)
    return Decision("inconclusive", left, right, assume_convergent)
