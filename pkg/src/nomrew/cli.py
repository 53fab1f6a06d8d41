"""Command line interface.

Subcommands: check (per-rule closedness), normalize, equal, alpha, fresh,
match, step (one-step enumeration) and replay (re-verify a JSON trace).
Exit codes are a stable contract: 0 yes/equal/all-closed, 1 no/not-equal/
not-closed/no-match, 2 usage or parse errors, 3 inconclusive or fuel
exhausted.  JSON reports carry "schema": 1 and embed the theory text, so a
report replays on its own.  The NOMREW_SEED environment variable fixes the
fresh-name counter for reproducible traces.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .alpha import Derivation, FreshnessContext, check_alpha, check_fresh
from .closed import (
    FreshNamer,
    NotClosedError,
    closed_normalize,
    closed_rewrite_step,
    decide_equal,
    is_closed_rule,
    replay_closed_step,
)
from .matching import MatchProblem, solve_match
from .rewrite import (
    DEFAULT_CONFIG,
    RewriteRule,
    RewriteStep,
    SearchConfig,
    Theory,
    normalize_general,
    replay_step,
    rewrite_step_general,
    symmetric_search,
)
from .syntax import (
    ParseError,
    parse_context,
    parse_term,
    parse_theory,
    pretty,
    pretty_ctx,
    pretty_perm,
    pretty_rule,
    pretty_subst,
    pretty_theory,
)
from .terms import Atom, NominalError, Permutation, Substitution, Unknown

SCHEMA = 1

EXIT_OK = 0
EXIT_NO = 1
EXIT_USAGE = 2
EXIT_INCONCLUSIVE = 3


def _namer() -> FreshNamer:
    seed = os.environ.get("NOMREW_SEED", "0")
    try:
        return FreshNamer(int(seed))
    except ValueError:
        raise NominalError(f"NOMREW_SEED must be an integer, got {seed!r}")


def _load_theory(path: str) -> Theory:
    with open(path, encoding="utf-8") as fh:
        return parse_theory(fh.read())


def _subst_json(sigma: Substitution) -> dict:
    return {x.name: pretty(t) for x, t in sorted(sigma.items(), key=lambda kv: kv[0].name)}


def _ctx_json(ctx: FreshnessContext) -> list:
    return [[a.name, x.name] for a, x in ctx]


def _perm_json(pi: Permutation) -> list:
    return [[a.name, b.name] for a, b in pi.normalized().swaps]


def _step_json(step: RewriteStep) -> dict:
    out = {
        "rule": step.rule,
        "path": list(step.path),
        "perm": _perm_json(step.perm),
        "subst": _subst_json(step.subst),
        "source": pretty(step.source),
        "variant": pretty(step.variant),
        "result": pretty(step.result),
        "mode": step.mode,
        "ctx_extension": _ctx_json(step.ctx_extension),
    }
    if step.freshened is not None:
        fr = step.freshened
        out["freshened"] = {
            "name": fr.name,
            "ctx": pretty_ctx(fr.ctx),
            "lhs": pretty(fr.lhs),
            "rhs": pretty(fr.rhs),
        }
    else:
        out["freshened"] = None
    return out


def _step_from_json(data: dict) -> RewriteStep:
    freshened = None
    if data.get("freshened"):
        fr = data["freshened"]
        freshened = RewriteRule(
            fr["name"],
            parse_context(fr["ctx"], allow_machine=True),
            parse_term(fr["lhs"], allow_machine=True),
            parse_term(fr["rhs"], allow_machine=True),
        )
    return RewriteStep(
        rule=data["rule"],
        path=tuple(s if s == "body" else int(s) for s in data["path"]),
        perm=Permutation(tuple((Atom(a), Atom(b)) for a, b in data["perm"])),
        subst=Substitution(
            (Unknown(x), parse_term(t, allow_machine=True)) for x, t in data["subst"].items()
        ),
        source=parse_term(data["source"], allow_machine=True),
        variant=parse_term(data["variant"], allow_machine=True),
        result=parse_term(data["result"], allow_machine=True),
        mode=data["mode"],
        freshened=freshened,
        ctx_extension=FreshnessContext(
            frozenset((Atom(a), Unknown(x)) for a, x in data["ctx_extension"])
        ),
    )


def _deriv_json(d: Derivation) -> dict:
    kind = d.conclusion[0]
    if kind == "fresh":
        _, ctx, a, t = d.conclusion
        judgement = f"{pretty_ctx(ctx)} |- {a.name} # {pretty(t)}"
    else:
        _, ctx, s, t = d.conclusion
        judgement = f"{pretty_ctx(ctx)} |- {pretty(s)} =a= {pretty(t)}"
    return {"rule": d.rule, "judgement": judgement, "children": [_deriv_json(c) for c in d.children]}


def _print_deriv(d: Derivation, indent: int = 0) -> None:
    info = _deriv_json(d)
    print("  " * indent + f"[{info['rule']}] {info['judgement']}")
    for child in d.children:
        _print_deriv(child, indent + 1)


def _emit(report: dict, as_json: bool) -> None:
    if as_json:
        print(json.dumps(report, indent=2))


def _cfg(args) -> SearchConfig:
    return SearchConfig(
        max_support=getattr(args, "max_support", DEFAULT_CONFIG.max_support),
        strategy=getattr(args, "strategy", "outermost"),
    )


def cmd_check(args) -> int:
    theory = _load_theory(args.theory)
    namer = _namer()
    rows = []
    all_closed = True
    for rule in theory.rules:
        res = is_closed_rule(rule, namer)
        all_closed &= res.closed
        rows.append((rule, res))
        if not args.json:
            verdict = "closed" if res.closed else "not closed"
            witness = f"  witness {pretty_subst(res.witness)}" if res.witness else ""
            print(f"{rule.name}: {verdict}{witness}")
    report = {
        "schema": SCHEMA,
        "command": "check",
        "theory": pretty_theory(theory),
        "all_closed": all_closed,
        "rules": [
            {"name": rule.name, "closed": res.closed,
             "witness": _subst_json(res.witness) if res.witness else None}
            for rule, res in rows
        ],
    }
    _emit(report, args.json)
    return EXIT_OK if all_closed else EXIT_NO


def cmd_normalize(args) -> int:
    theory = _load_theory(args.theory)
    ctx = parse_context(args.ctx)
    term = parse_term(args.term, theory.signature)
    cfg = _cfg(args)
    if args.general:
        res = normalize_general(ctx, term, theory, args.strategy, args.fuel, cfg)
        mode = "general"
    else:
        res = closed_normalize(ctx, term, theory, args.fuel, _namer(), args.strategy, cfg)
        mode = "closed"
    if not args.json:
        print(pretty(res.term))
        print(f"status: {res.status} after {len(res.trace)} steps")
        if args.trace:
            for i, step in enumerate(res.trace):
                pi = pretty_perm(step.perm) or "id"
                print(
                    f"  {i + 1}. {step.rule} at {_path_text(step.path)} pi={pi} "
                    f"theta={pretty_subst(step.subst)} ->1 {pretty(step.result)}"
                )
    report = {
        "schema": SCHEMA,
        "command": "normalize",
        "theory": pretty_theory(theory),
        "ctx": pretty_ctx(ctx),
        "mode": mode,
        "term": pretty(term),
        "result": pretty(res.term),
        "status": res.status,
        "trace": [_step_json(s) for s in res.trace],
    }
    _emit(report, args.json)
    return EXIT_OK if res.status == "normal_form" else EXIT_INCONCLUSIVE


def _path_text(path) -> str:
    from .rewrite import path_str

    return path_str(path)


def cmd_equal(args) -> int:
    theory = _load_theory(args.theory)
    ctx = parse_context(args.ctx)
    left = parse_term(args.left, theory.signature)
    right = parse_term(args.right, theory.signature)
    try:
        decision = decide_equal(
            ctx, left, right, theory,
            assume_convergent=args.assume_convergent, fuel=args.fuel, namer=_namer(),
        )
    except NotClosedError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    if not args.json:
        print(decision.verdict)
        print(f"  {pretty(left)} ->* {pretty(decision.left.term)} [{decision.left.status}]")
        print(f"  {pretty(right)} ->* {pretty(decision.right.term)} [{decision.right.status}]")
    report = {
        "schema": SCHEMA,
        "command": "equal",
        "theory": pretty_theory(theory),
        "ctx": pretty_ctx(ctx),
        "verdict": decision.verdict,
        "left": {"term": pretty(left), "normal_form": pretty(decision.left.term),
                 "status": decision.left.status, "trace": [_step_json(s) for s in decision.left.trace]},
        "right": {"term": pretty(right), "normal_form": pretty(decision.right.term),
                  "status": decision.right.status, "trace": [_step_json(s) for s in decision.right.trace]},
    }
    _emit(report, args.json)
    return {"equal": EXIT_OK, "not_equal": EXIT_NO}.get(decision.verdict, EXIT_INCONCLUSIVE)


def cmd_alpha(args) -> int:
    ctx = parse_context(args.ctx)
    s = parse_term(args.left)
    t = parse_term(args.right)
    deriv = check_alpha(ctx, s, t)
    holds = deriv is not None
    if not args.json:
        print("yes" if holds else "no")
        if args.trace and deriv:
            _print_deriv(deriv)
    report = {
        "schema": SCHEMA, "command": "alpha", "ctx": pretty_ctx(ctx),
        "left": pretty(s), "right": pretty(t), "holds": holds,
        "derivation": _deriv_json(deriv) if deriv else None,
    }
    _emit(report, args.json)
    return EXIT_OK if holds else EXIT_NO


def cmd_fresh(args) -> int:
    ctx = parse_context(args.ctx)
    atom = parse_term(args.atom)
    from .terms import AtomTerm

    if not isinstance(atom, AtomTerm):
        print("error: first positional argument must be an atom", file=sys.stderr)
        return EXIT_USAGE
    t = parse_term(args.term)
    deriv = check_fresh(ctx, atom.atom, t)
    holds = deriv is not None
    if not args.json:
        print("yes" if holds else "no")
        if args.trace and deriv:
            _print_deriv(deriv)
    report = {
        "schema": SCHEMA, "command": "fresh", "ctx": pretty_ctx(ctx),
        "atom": atom.atom.name, "term": pretty(t), "holds": holds,
        "derivation": _deriv_json(deriv) if deriv else None,
    }
    _emit(report, args.json)
    return EXIT_OK if holds else EXIT_NO


def cmd_match(args) -> int:
    problem = MatchProblem(
        parse_context(args.pattern_ctx),
        parse_term(args.pattern),
        parse_context(args.target_ctx),
        parse_term(args.target),
    )
    sol = solve_match(problem)
    if not args.json:
        print(f"solution {pretty_subst(sol.sigma)}" if sol else "no match")
    report = {
        "schema": SCHEMA, "command": "match",
        "pattern_ctx": pretty_ctx(problem.pattern_ctx), "pattern": pretty(problem.pattern),
        "target_ctx": pretty_ctx(problem.target_ctx), "target": pretty(problem.target),
        "solution": _subst_json(sol.sigma) if sol else None,
    }
    _emit(report, args.json)
    return EXIT_OK if sol else EXIT_NO


def cmd_step(args) -> int:
    theory = _load_theory(args.theory)
    ctx = parse_context(args.ctx)
    term = parse_term(args.term, theory.signature)
    cfg = _cfg(args)
    namer = _namer()
    steps = []
    truncated = False
    for rule in theory.rules:
        if args.general:
            got = rewrite_step_general(ctx, term, rule, cfg)
        else:
            got = closed_rewrite_step(ctx, term, rule, namer, cfg)
        truncated |= got.truncated
        steps.extend(got)
    if not args.json:
        if not steps:
            print("no steps")
        for step in steps:
            pi = pretty_perm(step.perm) or "id"
            print(f"{step.rule} at {_path_text(step.path)} pi={pi} ->1 {pretty(step.result)}")
        if truncated:
            print("(permutation universe truncated: absence of steps is inconclusive)")
    report = {
        "schema": SCHEMA,
        "command": "step",
        "theory": pretty_theory(theory),
        "ctx": pretty_ctx(ctx),
        "mode": "general" if args.general else "closed",
        "term": pretty(term),
        "truncated": truncated,
        "steps": [_step_json(s) for s in steps],
    }
    _emit(report, args.json)
    return EXIT_OK


def cmd_replay(args) -> int:
    with open(args.report, encoding="utf-8") as fh:
        report = json.load(fh)
    if report.get("schema") != SCHEMA:
        print(f"error: unsupported schema {report.get('schema')!r}", file=sys.stderr)
        return EXIT_USAGE
    theory = parse_theory(report["theory"], allow_machine=True)
    rules = {rule.name: rule for rule in theory.rules}
    ctx = parse_context(report.get("ctx", ""), allow_machine=True)

    traces = []
    if report["command"] == "normalize":
        traces.append(report["trace"])
    elif report["command"] == "equal":
        traces.append(report["left"]["trace"])
        traces.append(report["right"]["trace"])
    elif report["command"] == "step":
        traces.append(report["steps"])
    else:
        print(f"error: nothing to replay in a {report['command']!r} report", file=sys.stderr)
        return EXIT_USAGE

    checked = 0
    for trace in traces:
        for data in trace:
            step = _step_from_json(data)
            if step.mode == "closed":
                ok = replay_closed_step(ctx, step)
            else:
                ok = replay_step(ctx, step, rules[step.rule])
            if not ok:
                print(f"step {checked + 1} FAILED to replay: {data['rule']} at {data['path']}")
                return EXIT_NO
            checked += 1
    print(f"replayed {checked} steps: all valid")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nomrew", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="report closedness of every rule in a theory file")
    p.add_argument("theory")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("normalize", help="rewrite a term to normal form")
    p.add_argument("theory")
    p.add_argument("--term", required=True)
    p.add_argument("--ctx", default="")
    p.add_argument("--fuel", type=int, default=500)
    p.add_argument("--strategy", choices=("outermost", "innermost"), default="outermost")
    p.add_argument("--max-support", type=int, default=DEFAULT_CONFIG.max_support, dest="max_support")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--general", action="store_true", help="general rewriting (permutation search)")
    mode.add_argument("--closed", action="store_true", help="closed rewriting (default)")
    p.add_argument("--trace", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_normalize)

    p = sub.add_parser("equal", help="decide equality via closed normal forms")
    p.add_argument("theory")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--ctx", default="")
    p.add_argument("--fuel", type=int, default=500)
    p.add_argument("--assume-convergent", action="store_true", dest="assume_convergent")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_equal)

    p = sub.add_parser("alpha", help="check alpha-equivalence of two terms")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--ctx", default="")
    p.add_argument("--trace", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_alpha)

    p = sub.add_parser("fresh", help="check a freshness judgement atom # term")
    p.add_argument("atom")
    p.add_argument("term")
    p.add_argument("--ctx", default="")
    p.add_argument("--trace", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_fresh)

    p = sub.add_parser("match", help="solve a nominal matching problem")
    p.add_argument("pattern_ctx")
    p.add_argument("pattern")
    p.add_argument("target_ctx")
    p.add_argument("target")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_match)

    p = sub.add_parser("step", help="enumerate one-step rewrites of a term")
    p.add_argument("theory")
    p.add_argument("--term", required=True)
    p.add_argument("--ctx", default="")
    p.add_argument("--max-support", type=int, default=DEFAULT_CONFIG.max_support, dest="max_support")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--general", action="store_true")
    mode.add_argument("--closed", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_step)

    p = sub.add_parser("replay", help="re-verify every step in a JSON report")
    p.add_argument("report")
    p.set_defaults(fn=cmd_replay)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except NominalError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
