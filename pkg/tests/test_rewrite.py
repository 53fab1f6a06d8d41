import random

import pytest

from nomrew import (
    Abstraction,
    App,
    Atom,
    AtomTerm,
    EMPTY_CTX,
    FreshnessContext,
    ID,
    RewriteRule,
    RuleError,
    SearchConfig,
    Signature,
    Theory,
    Unknown,
    act,
    alpha_holds,
    check_equivariance_sample,
    normalize_general,
    positions,
    replace_at,
    replay_step,
    rewrite_closure_reachable,
    rewrite_step_general,
    subterm_at,
    swap,
    symmetric_search,
    var,
)
from strategies import random_perm, random_term

a, b, c = Atom("a"), Atom("b"), Atom("c")
X, Xp, Y = Unknown("X"), Unknown("Xp"), Unknown("Y")


def lam(atom, body):
    return App("lam", (Abstraction(atom, body),))


def app(f, x):
    return App("app", (f, x))


SIG = Signature.of({"lam": 1, "app": 2, "f": 1})

BETA_VAR = RewriteRule("beta_var", EMPTY_CTX, app(lam(a, AtomTerm(a)), var(X)), var(X))
ETA = RewriteRule("eta", FreshnessContext.of((a, X)), lam(a, app(var(X), AtomTerm(a))), var(X))
STRIP = RewriteRule("strip", EMPTY_CTX, Abstraction(a, var(X)), var(X))
ATOM_AB = RewriteRule("atom_ab", EMPTY_CTX, AtomTerm(a), AtomTerm(b))
EXPAND = RewriteRule("expand", FreshnessContext.of((a, X)), var(X), App("f", (var(X),)))

BETA_APP = RewriteRule(
    "beta_app",
    EMPTY_CTX,
    app(lam(a, app(var(X), var(Xp))), var(Y)),
    app(app(lam(a, var(X)), var(Y)), app(lam(a, var(Xp)), var(Y))),
)
BETAETA = Theory(SIG, (BETA_APP, BETA_VAR,
                       RewriteRule("beta_eps", FreshnessContext.of((a, Y)), app(lam(a, var(Y)), var(X)), var(Y)),
                       RewriteRule("beta_fn", FreshnessContext.of((b, Y)),
                                   app(lam(a, lam(b, var(X))), var(Y)),
                                   lam(b, app(lam(a, var(X)), var(Y)))),
                       ETA))


def test_positions_atom():
    assert positions(AtomTerm(a)) == [((), AtomTerm(a))]


def test_positions_abstraction():
    t = Abstraction(a, AtomTerm(b))
    assert positions(t) == [((), t), (("body",), AtomTerm(b))]


def test_positions_leftmost_outermost():
    t = App("app", (AtomTerm(a), App("f", (AtomTerm(b),))))
    paths = [p for p, _ in positions(t)]
    assert paths == [(), (0,), (1,), (1, 0)]


def test_subterm_and_replace_roundtrip():
    t = app(lam(a, AtomTerm(a)), AtomTerm(b))
    for path, sub in positions(t):
        assert subterm_at(t, path) == sub
        assert replace_at(t, path, sub) == t


def test_rule_validation():
    with pytest.raises(RuleError):
        RewriteRule("bad", EMPTY_CTX, var(X), var(Y)).validate()
    with pytest.raises(RuleError):
        RewriteRule("bad", FreshnessContext.of((a, Y)), var(X), var(X)).validate()
    with pytest.raises(RuleError):
        RewriteRule("bad", EMPTY_CTX, var(X), App("f", (var(X),))).validate()
    EXPAND.validate()  # constrained variable lhs is allowed


def test_step_beta_var():
    s = app(lam(a, AtomTerm(a)), AtomTerm(b))
    steps = rewrite_step_general(EMPTY_CTX, s, BETA_VAR)
    assert any(st.result == AtomTerm(b) for st in steps)


def test_step_strip_finds_permuted_result():
    # [b][a]a reaches [a]b at the body position of its variant [a][b]b,
    # with a non-identity permutation.
    s = Abstraction(b, Abstraction(a, AtomTerm(a)))
    want = Abstraction(a, AtomTerm(b))
    steps = rewrite_step_general(EMPTY_CTX, s, STRIP)
    hits = [st for st in steps if alpha_holds(EMPTY_CTX, st.result, want)]
    assert hits
    st = hits[0]
    assert not st.perm.is_identity
    assert st.subst.image(next(iter(st.subst))) == AtomTerm(a)
    assert alpha_holds(EMPTY_CTX, st.variant, s)


def test_step_atom_rule_moves_to_fresh_atom():
    steps = rewrite_step_general(EMPTY_CTX, AtomTerm(c), ATOM_AB)
    results = {st.result for st in steps}
    assert any(isinstance(t, AtomTerm) and t.atom.is_machine for t in results)
    assert not steps.truncated


def test_step_expand_needs_context():
    assert list(rewrite_step_general(EMPTY_CTX, var(X), EXPAND)) == []
    ctx = FreshnessContext.of((b, X))
    steps = rewrite_step_general(ctx, var(X), EXPAND)
    assert any(alpha_holds(ctx, st.result, App("f", (var(X),))) for st in steps)


def test_steps_replay():
    rng = random.Random(3)
    for s in (
        app(lam(a, AtomTerm(a)), AtomTerm(b)),
        Abstraction(b, Abstraction(a, AtomTerm(a))),
        AtomTerm(c),
        random_term(rng, depth=3, unknowns=[]),
    ):
        for rule in (BETA_VAR, STRIP, ATOM_AB):
            for st in rewrite_step_general(EMPTY_CTX, s, rule):
                assert replay_step(EMPTY_CTX, st, rule)


def test_truncation_flag():
    cfg = SearchConfig(max_support=2)
    t = App("app", (AtomTerm(c), AtomTerm(Atom("d"))))
    steps = rewrite_step_general(EMPTY_CTX, t, ATOM_AB, cfg)
    assert steps.truncated


def test_closure_contains_alpha_variants():
    s = Abstraction(a, AtomTerm(a))
    reach = rewrite_closure_reachable(EMPTY_CTX, s, Theory(SIG, (BETA_VAR,)), fuel=1)
    assert Abstraction(b, AtomTerm(b)) in reach


def test_closure_of_strip_reaches_permuted_form():
    s = Abstraction(b, Abstraction(a, AtomTerm(a)))
    reach = rewrite_closure_reachable(EMPTY_CTX, s, Theory(SIG, (STRIP,)), fuel=1)
    assert Abstraction(a, AtomTerm(b)) in reach


def test_normalize_beta_eta():
    s = app(lam(a, app(AtomTerm(a), AtomTerm(a))), AtomTerm(b))
    res = normalize_general(EMPTY_CTX, s, BETAETA, fuel=50)
    assert res.status == "normal_form"
    assert alpha_holds(EMPTY_CTX, res.term, app(AtomTerm(b), AtomTerm(b)))


def test_normalize_normal_form_is_noop():
    res = normalize_general(EMPTY_CTX, AtomTerm(b), BETAETA, fuel=5)
    assert res.term == AtomTerm(b) and res.trace == [] and res.status == "normal_form"


def test_normalize_eta_under_context():
    ctx = FreshnessContext.of((a, X))
    res = normalize_general(ctx, lam(a, app(var(X), AtomTerm(a))), Theory(SIG, (ETA,)), fuel=10)
    assert res.status == "normal_form"
    assert alpha_holds(ctx, res.term, var(X))


def test_normalize_fuel_exhaustion():
    loop = RewriteRule("loop", EMPTY_CTX, App("f", (var(X),)), App("f", (var(X),)))
    res = normalize_general(EMPTY_CTX, App("f", (AtomTerm(a),)), Theory(SIG, (loop,)), fuel=3)
    assert res.status == "fuel_exhausted" and len(res.trace) == 3


def test_normalize_strategies_differ_on_first_step():
    s = app(lam(a, AtomTerm(a)), app(lam(a, AtomTerm(a)), AtomTerm(b)))
    outer = normalize_general(EMPTY_CTX, s, Theory(SIG, (BETA_VAR,)), strategy="outermost", fuel=10)
    inner = normalize_general(EMPTY_CTX, s, Theory(SIG, (BETA_VAR,)), strategy="innermost", fuel=10)
    assert outer.trace[0].path == ()
    assert inner.trace[0].path != ()
    assert alpha_holds(EMPTY_CTX, outer.term, AtomTerm(b))
    assert alpha_holds(EMPTY_CTX, inner.term, AtomTerm(b))


def test_symmetric_search_remark():
    th = Theory(Signature.of({"f": 1}), (EXPAND,))
    hit = symmetric_search(EMPTY_CTX, var(X), App("f", (var(X),)), th, fuel=100, gamma_budget=1)
    assert hit.found and len(hit.gamma) == 1
    for st in hit.trace:
        rule = next(r for r in list(th.rules) + [RewriteRule("expand~", EXPAND.ctx, EXPAND.rhs, EXPAND.lhs)] if r.name == st.rule)
        assert replay_step(hit.ctx, st, rule)
    miss = symmetric_search(EMPTY_CTX, var(X), App("f", (var(X),)), th, fuel=100, gamma_budget=0)
    assert not miss.found


def test_symmetric_search_reflexive_ground():
    th = Theory(SIG, (BETA_VAR,))
    s = Abstraction(a, AtomTerm(a))
    res = symmetric_search(EMPTY_CTX, s, Abstraction(b, AtomTerm(b)), th, fuel=10)
    assert res.found and res.trace == []


def test_symmetric_search_uses_reversed_rules():
    th = Theory(SIG, (BETA_VAR,))
    # b = app(lam([a]a), b) needs the reversed (expansion) direction.
    res = symmetric_search(EMPTY_CTX, AtomTerm(b), app(lam(a, AtomTerm(a)), AtomTerm(b)), th, fuel=50)
    assert res.found


def test_equivariance_samples():
    s = app(lam(a, AtomTerm(a)), AtomTerm(b))
    steps = rewrite_step_general(EMPTY_CTX, s, BETA_VAR)
    t = next(st.result for st in steps if st.result == AtomTerm(b))
    assert check_equivariance_sample(EMPTY_CTX, s, t, BETA_VAR, swap(a, c))
    assert check_equivariance_sample(EMPTY_CTX, s, t, BETA_VAR, ID)
    assert check_equivariance_sample(EMPTY_CTX, AtomTerm(a), AtomTerm(b), ATOM_AB, swap(a, c))


def test_equivariance_on_random_steps():
    rng = random.Random(17)
    checked = 0
    for _ in range(60):
        s = random_term(rng, depth=3, unknowns=[])
        for rule in (BETA_VAR, ATOM_AB, STRIP):
            steps = rewrite_step_general(EMPTY_CTX, s, rule)
            if not steps:
                continue
            st = rng.choice(list(steps))
            pi = random_perm(rng)
            assert check_equivariance_sample(EMPTY_CTX, s, st.result, rule, pi)
            checked += 1
    assert checked > 20
