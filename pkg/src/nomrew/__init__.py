"""Nominal rewriting toolkit.

Terms with atoms, unknowns and suspensions; alpha-equivalence and freshness
under freshness contexts; nominal matching; general and closed rewriting;
and an equality decision procedure for convergent closed theories.
"""

from .terms import (
    Abstraction,
    App,
    Atom,
    AtomTerm,
    Permutation,
    Signature,
    Substitution,
    Suspension,
    Term,
    Unknown,
    act,
    atoms_of,
    substitute,
    subterms,
    swap,
    term_depth,
    term_size,
    unknowns_of,
    var,
    ID,
    EMPTY_SUBST,
    EMPTY_SIGNATURE,
    NominalError,
    SignatureError,
)
from .alpha import (
    Derivation,
    FreshnessConstraint,
    FreshnessContext,
    EMPTY_CTX,
    alpha_holds,
    alpha_oracle_ground,
    check_alpha,
    check_fresh,
    ctx_entails,
    disagreement_set,
    fresh_holds,
    nameless_form,
    verify_derivation,
)
from .matching import (
    MatchProblem,
    MatchProblemError,
    MatchSolution,
    OracleOverflow,
    enumerate_solutions_small,
    is_solution,
    solve_match,
)
from .rewrite import (
    DEFAULT_CONFIG,
    NormalizeResult,
    ReachableSet,
    RewriteRule,
    RewriteStep,
    RuleError,
    SearchConfig,
    SearchResult,
    StepResults,
    Theory,
    check_equivariance_sample,
    normalize_general,
    path_str,
    positions,
    replace_at,
    replay_step,
    rewrite_closure_reachable,
    rewrite_step_general,
    subterm_at,
    symmetric_search,
)
from .closed import (
    ClosednessResult,
    Decision,
    FreshNamer,
    FreshenedVariant,
    NotClosedError,
    PAIR_FORMER,
    closed_joinable,
    closed_normalize,
    closed_reachable,
    closed_rewrite_step,
    decide_equal,
    freshen_rule,
    freshen_term_in_context,
    is_closed,
    is_closed_rule,
    replay_closed_step,
    scrub,
)
