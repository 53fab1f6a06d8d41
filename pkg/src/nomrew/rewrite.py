"""General nominal rewriting.

A one-step rewrite instantiates a rule at a position of the subject under a
permutation: the subject decomposes as C[s'], a permutation pi and a
substitution theta are found with the rule context entailed, s' alpha-equal
to pi.(lhs theta), and the result is C[pi.(rhs theta)], where the step's
output is only meaningful up to alpha-equivalence.  Because the reflexive
case of the rewrite relation is alpha-equivalence itself, the step
enumerator also explores alpha-variants of the subject obtained by renaming
the binders above the chosen position; that is how [b][a]a reaches [a]b
under the abstraction-stripping rule.

The permutation search is bounded: candidates are generated from the rule's
atoms mapped injectively into a finite universe (the atoms of the rule, the
context and the subject, plus a few machine-fresh spares).  Two permutations
agreeing on the rule's atoms produce identical steps, so this enumeration
loses nothing inside the universe; the universe cap itself is a documented
source of incompleteness, surfaced through the `truncated` flag.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Callable, Iterator, Optional

from .alpha import EMPTY_CTX, FreshnessContext, alpha_holds, fresh_holds
from .matching import MatchProblem, solve_match
from .terms import (
    Abstraction,
    App,
    Atom,
    AtomTerm,
    NominalError,
    Permutation,
    Signature,
    Substitution,
    Suspension,
    Term,
    Unknown,
    act,
    atoms_of,
    fresh_names,
    substitute,
    swap,
    unknowns_of,
    var,
)

Path = tuple  # steps are "body" or an integer argument index (0-based)


class RuleError(NominalError):
    pass


def path_str(path: Path) -> str:
    if not path:
        return "e"
    return ".".join("body" if s == "body" else f"arg{s + 1}" for s in path)


def positions(t: Term) -> list[tuple[Path, Term]]:
    """All positions of t in leftmost-outermost (preorder) order, paired
    with the subterm at each.  Suspensions are leaves."""
    out: list[tuple[Path, Term]] = []

    def walk(u: Term, here: Path):
        out.append((here, u))
        match u:
            case Abstraction(_, body):
                walk(body, here + ("body",))
            case App(_, args):
                for i, arg in enumerate(args):
                    walk(arg, here + (i,))

    walk(t, ())
    return out


def subterm_at(t: Term, path: Path) -> Term:
    for step in path:
        match (t, step):
            case (Abstraction(_, body), "body"):
                t = body
            case (App(_, args), int()) if step < len(args):
                t = args[step]
            case _:
                raise IndexError(f"no position {path_str(path)} in term")
    return t


def replace_at(t: Term, path: Path, new: Term) -> Term:
    if not path:
        return new
    step = path[0]
    match (t, step):
        case (Abstraction(a, body), "body"):
            return Abstraction(a, replace_at(body, path[1:], new))
        case (App(f, args), int()) if step < len(args):
            args = args[:step] + (replace_at(args[step], path[1:], new),) + args[step + 1 :]
            return App(f, args)
    raise IndexError(f"no position {path_str(path)} in term")


@dataclass(frozen=True)
class RewriteRule:
    """ctx |- lhs -> rhs.  Executability requires the unknowns of the rhs
    and of the context to occur in the lhs."""

    name: str
    ctx: FreshnessContext
    lhs: Term
    rhs: Term

    def validate(self, signature: Signature | None = None) -> None:
        lhs_unknowns = unknowns_of(self.lhs)
        extra = unknowns_of(self.rhs) - lhs_unknowns
        if extra:
            names = ", ".join(sorted(x.name for x in extra))
            raise RuleError(f"rule {self.name}: unknowns on rhs not on lhs: {names}")
        extra = unknowns_of(self.ctx) - lhs_unknowns
        if extra:
            names = ", ".join(sorted(x.name for x in extra))
            raise RuleError(f"rule {self.name}: context constrains unknowns not on lhs: {names}")
        if isinstance(self.lhs, Suspension) and not any(x == self.lhs.unknown for _, x in self.ctx):
            # A completely unconstrained variable lhs would rewrite every
            # term to an instance of the rhs; reject it as degenerate.
            raise RuleError(f"rule {self.name}: lhs is an unconstrained variable")
        if signature is not None:
            signature.check_term(self.lhs)
            signature.check_term(self.rhs)

    def atoms(self) -> set[Atom]:
        return atoms_of(self.ctx, self.lhs, self.rhs)

    def unknowns(self) -> set[Unknown]:
        return unknowns_of(self.ctx, self.lhs, self.rhs)


@dataclass(frozen=True)
class Theory:
    """A signature together with a finite list of rules.  kind is "rewrite"
    for oriented rules and "equational" for axioms written with =."""

    signature: Signature
    rules: tuple[RewriteRule, ...]
    kind: str = "rewrite"
    name: str = ""

    def validate(self) -> None:
        seen = set()
        for rule in self.rules:
            if rule.name in seen:
                raise RuleError(f"duplicate rule name {rule.name}")
            seen.add(rule.name)
            rule.validate(self.signature)

    def atoms(self) -> set[Atom]:
        out: set[Atom] = set()
        for rule in self.rules:
            out |= rule.atoms()
        return out


@dataclass(frozen=True)
class SearchConfig:
    """Knobs for the bounded permutation search.

    max_support caps the atom universe the permutations act on (6 atoms
    means at most 720 distinct permutations per position); spare_cap limits
    how many machine-fresh spare atoms join the universe so a rule atom can
    be sent somewhere fresh for the subject.
    """

    max_support: int = 6
    spare_cap: int = 2
    fuel: int = 500
    strategy: str = "outermost"
    gamma_budget: int | None = None


DEFAULT_CONFIG = SearchConfig()


@dataclass(frozen=True)
class RewriteStep:
    """A replayable witness for one rewrite step.

    `variant` is the alpha-variant of `source` the step actually fired on
    (equal to `source` when no binder was renamed).  For closed steps the
    freshened rule and the context extension are recorded too, so the step
    replays bit-exactly.
    """

    rule: str
    path: Path
    perm: Permutation
    subst: Substitution
    source: Term
    variant: Term
    result: Term
    mode: str = "general"
    freshened: Optional[RewriteRule] = None
    ctx_extension: FreshnessContext = EMPTY_CTX


class StepResults(list):
    """A list of RewriteStep with a flag telling whether the permutation
    universe was truncated (in which case absence of steps is inconclusive)."""

    def __init__(self, steps=(), truncated=False):
        super().__init__(steps)
        self.truncated = truncated


@dataclass
class NormalizeResult:
    term: Term
    trace: list[RewriteStep]
    status: str  # "normal_form" | "fuel_exhausted"


def _freshen_rule_unknowns(rule: RewriteRule, away_from: set[Unknown]) -> RewriteRule:
    clashing = rule.unknowns() & away_from
    if not clashing:
        return rule
    used = {x.name for x in rule.unknowns() | away_from}
    renaming = {}
    for x in sorted(clashing):
        stem = x.name.split("$")[0] or "V"
        fresh = fresh_names(stem, 1, used)[0]
        used.add(fresh)
        renaming[x] = var(Unknown(fresh))
    sigma = Substitution(renaming)
    ctx = FreshnessContext.of(
        *((a, sigma.image(x).unknown if x in renaming else x) for a, x in rule.ctx)
    )
    return RewriteRule(rule.name, ctx, substitute(rule.lhs, sigma), substitute(rule.rhs, sigma))


def _universe(rule_atoms: set[Atom], other_atoms: set[Atom], cfg: SearchConfig) -> tuple[list[Atom], bool]:
    """The atom universe for the permutation search: rule atoms, then the
    context/subject atoms, then machine-fresh spares, capped at
    cfg.max_support (rule atoms always survive the cap)."""
    spare_count = min(len(rule_atoms), cfg.spare_cap)
    used = {a.name for a in rule_atoms | other_atoms}
    spares = [Atom(n) for n in fresh_names("p", spare_count, used)]
    ordered = sorted(rule_atoms) + sorted(other_atoms - rule_atoms) + spares
    limit = max(cfg.max_support, len(rule_atoms))
    if len(ordered) > limit:
        return ordered[:limit], True
    return ordered, False


def _complete_injection(sources: list[Atom], images: tuple[Atom, ...]) -> Permutation:
    """Extend an injective map on the rule's atoms to a permutation."""
    mapping = dict(zip(sources, images))
    involved = set(mapping) | set(mapping.values())
    free_sources = sorted(involved - set(mapping))
    free_images = set(involved - set(mapping.values()))
    for a in list(free_sources):
        if a in free_images:
            mapping[a] = a
            free_sources.remove(a)
            free_images.remove(a)
    for a, b in zip(free_sources, sorted(free_images)):
        mapping[a] = b
    return Permutation.from_mapping(mapping)


def _candidate_perms(rule_atoms: list[Atom], universe: list[Atom]) -> list[Permutation]:
    if not rule_atoms:
        return [Permutation()]
    perms = []
    for images in itertools.permutations(universe, len(rule_atoms)):
        perms.append(_complete_injection(rule_atoms, images))
    # Try the least disruptive candidates first so traces stay readable.
    perms.sort(key=lambda p: (len(p.mapping), sorted(a.name for a in p.support)))
    return perms


def _decompositions(
    ctx: FreshnessContext,
    t: Term,
    path: Path,
    universe: list[Atom],
    with_variants: bool,
) -> Iterator[tuple[Term, Callable[[Term], Term]]]:
    """Walk down `path`, optionally renaming each binder passed to another
    universe atom that is fresh for the body (an alpha-move).  Yields the
    (possibly renamed) subterm at the hole and a rebuild function; rebuilding
    with the hole content itself reconstructs the alpha-variant fired on."""
    if not path:
        yield t, lambda u: u
        return
    step = path[0]
    match (t, step):
        case (Abstraction(a, body), "body"):
            binders = [a]
            if with_variants:
                binders += [z for z in universe if z != a and fresh_holds(ctx, z, body)]
            for z in binders:
                inner = body if z == a else act(swap(z, a), body)
                for hole, rebuild in _decompositions(ctx, inner, path[1:], universe, with_variants):
                    yield hole, (lambda u, z=z, rb=rebuild: Abstraction(z, rb(u)))
        case (App(f, args), int()) if step < len(args):
            for hole, rebuild in _decompositions(ctx, args[step], path[1:], universe, with_variants):
                yield hole, (
                    lambda u, f=f, args=args, i=step, rb=rebuild: App(
                        f, args[:i] + (rb(u),) + args[i + 1 :]
                    )
                )
        case _:
            raise IndexError(f"no position {path_str(path)} in term")


def rewrite_step_general(
    ctx: FreshnessContext,
    s: Term,
    rule: RewriteRule,
    cfg: SearchConfig = DEFAULT_CONFIG,
    with_variants: bool = True,
    extra_atoms: set[Atom] = frozenset(),
) -> StepResults:
    """All one-step rewrites of s by the rule, modulo alpha on the subject,
    within the configured permutation budget.  extra_atoms widens the
    permutation universe (used when a specific target is in mind)."""
    rule = _freshen_rule_unknowns(rule, unknowns_of(ctx, s))
    rule_atoms = sorted(rule.atoms())
    universe, truncated = _universe(set(rule_atoms), atoms_of(ctx, s) | set(extra_atoms), cfg)
    perms = _candidate_perms(rule_atoms, universe)
    out = []
    seen = set()
    for path, _ in positions(s):
        for hole, rebuild in _decompositions(ctx, s, path, universe, with_variants):
            for pi in perms:
                sol = _match_instance(rule, pi, ctx, hole)
                if sol is None:
                    continue
                result = rebuild(substitute(act(pi, rule.rhs), sol))
                key = (path, result, pi, sol)
                if key in seen:
                    continue
                seen.add(key)
                out.append(
                    RewriteStep(rule.name, path, pi, sol, s, rebuild(hole), result)
                )
    return StepResults(out, truncated)


def _match_instance(
    rule: RewriteRule, pi: Permutation, ctx: FreshnessContext, hole: Term
) -> Optional[Substitution]:
    problem = MatchProblem(rule.ctx, act(pi, rule.lhs), ctx, hole)
    sol = solve_match(problem)
    return None if sol is None else sol.sigma


def replay_step(ctx: FreshnessContext, step: RewriteStep, rule: RewriteRule) -> bool:
    """Re-verify a general step from its recorded witness."""
    if step.mode != "general" or rule.name != step.rule:
        return False
    rule = _freshen_rule_unknowns(rule, unknowns_of(ctx, step.source))
    if not alpha_holds(ctx, step.source, step.variant):
        return False
    try:
        hole = subterm_at(step.variant, step.path)
    except IndexError:
        return False
    theta = step.subst
    for a, x in rule.ctx:
        if not fresh_holds(ctx, a, theta.image(x)):
            return False
    if not alpha_holds(ctx, hole, substitute(act(step.perm, rule.lhs), theta)):
        return False
    rebuilt = replace_at(step.variant, step.path, substitute(act(step.perm, rule.rhs), theta))
    return alpha_holds(ctx, rebuilt, step.result)


def _ordered_paths(s: Term, strategy: str) -> list[Path]:
    pre = [p for p, _ in positions(s)]
    if strategy == "outermost":
        return pre
    if strategy == "innermost":
        out: list[Path] = []

        def post(u: Term, here: Path):
            match u:
                case Abstraction(_, body):
                    post(body, here + ("body",))
                case App(_, args):
                    for i, arg in enumerate(args):
                        post(arg, here + (i,))
            out.append(here)

        post(s, ())
        return out
    raise ValueError(f"unknown strategy {strategy!r}")


def _first_step_general(
    ctx: FreshnessContext, s: Term, theory: Theory, cfg: SearchConfig
) -> Optional[RewriteStep]:
    """The first applicable step under the strategy ordering: positions in
    strategy order, rules in theory order, least-disruptive permutation
    first.  Only identity variants are tried; if any alpha-variant of s can
    step then so can s itself, so this loses no normal-form detection."""
    for path in _ordered_paths(s, cfg.strategy):
        hole = subterm_at(s, path)
        for rule in theory.rules:
            frule = _freshen_rule_unknowns(rule, unknowns_of(ctx, s))
            rule_atoms = sorted(frule.atoms())
            universe, _ = _universe(set(rule_atoms), atoms_of(ctx, s), cfg)
            for pi in _candidate_perms(rule_atoms, universe):
                sol = _match_instance(frule, pi, ctx, hole)
                if sol is not None:
                    result = replace_at(s, path, substitute(act(pi, frule.rhs), sol))
                    return RewriteStep(rule.name, path, pi, sol, s, s, result)
    return None


def normalize_general(
    ctx: FreshnessContext,
    s: Term,
    theory: Theory,
    strategy: str | None = None,
    fuel: int = 500,
    cfg: SearchConfig = DEFAULT_CONFIG,
) -> NormalizeResult:
    """Apply steps under the strategy until none applies (normal_form) or
    the fuel runs out (fuel_exhausted)."""
    if fuel <= 0:
        raise ValueError("fuel must be positive")
    if strategy is not None:
        cfg = replace(cfg, strategy=strategy)
    trace: list[RewriteStep] = []
    current = s
    for _ in range(fuel):
        step = _first_step_general(ctx, current, theory, cfg)
        if step is None:
            return NormalizeResult(current, trace, "normal_form")
        trace.append(step)
        current = step.result
    if _first_step_general(ctx, current, theory, cfg) is None:
        return NormalizeResult(current, trace, "normal_form")
    return NormalizeResult(current, trace, "fuel_exhausted")


class ReachableSet:
    """A set of terms up to alpha-equivalence under a fixed context."""

    def __init__(self, ctx: FreshnessContext):
        self.ctx = ctx
        self.reps: list[Term] = []

    def add(self, t: Term) -> bool:
        """Add t's class; True when it was new."""
        if t in self:
            return False
        self.reps.append(t)
        return True

    def __contains__(self, t: Term) -> bool:
        return any(alpha_holds(self.ctx, rep, t) for rep in self.reps)

    def __iter__(self):
        return iter(self.reps)

    def __len__(self):
        return len(self.reps)


def rewrite_closure_reachable(
    ctx: FreshnessContext,
    s: Term,
    theory: Theory,
    fuel: int,
    cfg: SearchConfig = DEFAULT_CONFIG,
) -> ReachableSet:
    """Everything reachable from s in at most `fuel` one-step rewrites,
    collected up to alpha-equivalence (so the set contains s's own
    alpha-variants by construction of membership)."""
    if fuel <= 0:
        raise ValueError("fuel must be positive")
    reached = ReachableSet(ctx)
    reached.add(s)
    frontier = [s]
    for _ in range(fuel):
        new: list[Term] = []
        for t in frontier:
            for rule in theory.rules:
                for step in rewrite_step_general(ctx, t, rule, cfg):
                    if reached.add(step.result):
                        new.append(step.result)
        if not new:
            break
        frontier = new
    return reached


@dataclass
class SearchResult:
    found: bool
    trace: list[RewriteStep] | None
    gamma: FreshnessContext
    ctx: FreshnessContext  # the context the search (and its trace) ran under


def _invertible(rule: RewriteRule) -> bool:
    return unknowns_of(rule.lhs) <= unknowns_of(rule.rhs) and unknowns_of(rule.ctx) <= unknowns_of(rule.rhs)


def symmetric_search(
    ctx: FreshnessContext,
    s: Term,
    t: Term,
    theory: Theory,
    fuel: int = 100,
    gamma_budget: int | None = None,
    cfg: SearchConfig = DEFAULT_CONFIG,
) -> SearchResult:
    """Bounded search for s <-> t: breadth-first over steps of the theory
    and of its executable reversals, under the context extended with up to
    gamma_budget machine-fresh constraints added all at once.

    `found` certifies derivability (the trace replays under the extended
    context); not_found is only a failure to find within the budget.
    """
    if gamma_budget is None:
        gamma_budget = cfg.gamma_budget if cfg.gamma_budget is not None else len(theory.atoms())
    unknowns = sorted(unknowns_of(ctx, s, t))
    used = {a.name for a in atoms_of(ctx, s, t) | theory.atoms()}
    gamma_pairs = []
    for name in fresh_names("g", gamma_budget if unknowns else 0, used):
        gamma_pairs.extend((Atom(name), x) for x in unknowns)
    gamma = FreshnessContext(frozenset(gamma_pairs))
    ctx2 = ctx | gamma

    # Reversed rules need not pass the parse-time lhs restriction: a bare
    # variable lhs just makes an expansion step, which the fuel bounds.
    rules = list(theory.rules)
    for rule in theory.rules:
        if _invertible(rule):
            rules.append(RewriteRule(rule.name + "~", rule.ctx, rule.rhs, rule.lhs))

    if alpha_holds(ctx2, s, t):
        return SearchResult(True, [], gamma, ctx2)

    reached = ReachableSet(ctx2)
    reached.add(s)
    frontier: list[tuple[Term, list[RewriteStep]]] = [(s, [])]
    expansions = 0
    while frontier and expansions < fuel:
        nxt: list[tuple[Term, list[RewriteStep]]] = []
        for u, trace in frontier:
            if expansions >= fuel:
                break
            expansions += 1
            for rule in rules:
                for step in rewrite_step_general(ctx2, u, rule, cfg):
                    if alpha_holds(ctx2, step.result, t):
                        return SearchResult(True, trace + [step], gamma, ctx2)
                    if reached.add(step.result):
                        nxt.append((step.result, trace + [step]))
        frontier = nxt
    return SearchResult(False, None, gamma, ctx2)


def check_equivariance_sample(
    ctx: FreshnessContext,
    s: Term,
    t: Term,
    rule: RewriteRule,
    pi: Permutation,
    cfg: SearchConfig = DEFAULT_CONFIG,
) -> bool:
    """Given that s one-step rewrites to t, confirm pi.s one-step rewrites
    to pi.t (equivariance of the one-step relation).  The target's atoms are
    added to the search universe so the witnessing permutation is in range."""
    target = act(pi, t)
    steps = rewrite_step_general(ctx, act(pi, s), rule, cfg, extra_atoms=atoms_of(target))
    return any(alpha_holds(ctx, step.result, target) for step in steps)
