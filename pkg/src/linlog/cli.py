"""Command-line interface.

Exit codes: 0 positive answer (valid, proved, accepted, member, model
found), 1 definite negative, 2 unknown or budget exhausted, 3 usage or
input error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import encoder, machine, phase, search, translations
from .errors import LinLogError, NotCLLProof, RootMismatch
from .kernel import SYSTEMS, check_proof, dumps_proof, loads_proof
from .syntax import LanguageId, parse_formula, parse_sequent, print_formula, print_sequent

OK, NO, UNKNOWN, USAGE = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE, f"{self.prog}: error: {message}\n")


def _seed(args) -> str:
    if args.seed is not None:
        return str(args.seed)
    return os.environ.get("LINLOG_SEED", "0")


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text()


def _emit(args, text: str, payload: dict):
    """Write the main artefact to --out (if given) and report on stdout."""
    out = getattr(args, "out", None)
    if out:
        Path(out).write_text(text)
    if args.format == "json":
        print(json.dumps(payload, sort_keys=True))
    elif not out or payload.get("_always_print"):
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        print(payload.get("status", "ok"))


def _system(name: str):
    try:
        return SYSTEMS[name.lower()]
    except KeyError:
        raise argparse.ArgumentTypeError(f"unknown system {name!r}; choose from {', '.join(SYSTEMS)}")


# -- verbs ----------------------------------------------------------------------


def cmd_check(args):
    proof = loads_proof(_read(args.proof))
    report = check_proof(proof, args.system)
    payload = {"status": "ok" if report.ok else "rejected", "system": args.system.name,
               "conclusion": print_sequent(proof.conclusion), "size": proof.size()}
    if not report.ok:
        payload.update(path=list(report.path), reason=report.reason, error=type(report.error).__name__)
    _emit(args, report.describe(), payload)
    return OK if report.ok else NO


def cmd_translate(args):
    which = translations.TranslationId(args.which)
    lang = LanguageId.LI if which is translations.TranslationId.TI else LanguageId.L
    if args.sequent:
        if which is translations.TranslationId.TI:
            s = parse_sequent(args.text, lang, intuitionistic=True)
            out = type(s)(tuple(map(translations.ti, s.ante)), tuple(map(translations.ti, s.succ)))
        else:
            out = translations.translate_sequent(parse_sequent(args.text, lang))
        text = print_sequent(out)
    else:
        text = print_formula(translations.translate(parse_formula(args.text, lang), which))
    _emit(args, text, {"status": "ok", "result": text})
    return OK


def cmd_transform(args):
    proof = loads_proof(_read(args.proof))
    source = SYSTEMS[args.source] if args.source else None
    try:
        out = translations.transform_cll_to_cllr(proof, source)
    except NotCLLProof as exc:
        _emit(args, f"not transformable: {exc}", {"status": "rejected", "reason": str(exc)})
        return NO
    _emit(args, dumps_proof(out), {"status": "ok", "conclusion": print_sequent(out.conclusion),
                                   "size": out.size()})
    return OK


def cmd_reduce(args):
    proof = loads_proof(_read(args.proof))
    target = parse_sequent(args.sequent)
    try:
        out = translations.reduce_back_to_cll(proof, target.ante, target.succ)
    except RootMismatch as exc:
        _emit(args, f"root mismatch: {exc}", {"status": "rejected", "reason": str(exc)})
        return NO
    _emit(args, dumps_proof(out), {"status": "ok", "conclusion": print_sequent(out.conclusion),
                                   "size": out.size()})
    return OK


def _machine(args):
    return machine.parse_machine(_read(args.machine))


def cmd_simulate(args):
    m = _machine(args)
    if args.multiset is not None:
        verdict = phase.budgeted_pm_membership(m, args.multiset.split(), args.budget)
        _emit(args, verdict.value, {"status": verdict.value})
        return {phase.Membership.MEMBER: OK, phase.Membership.NONMEMBER: NO}.get(verdict, UNKNOWN)
    if args.id is None:
        raise argparse.ArgumentTypeError("simulate needs --id or --multiset")
    start = machine.MachineID.parse(args.id)
    outcome = machine.run(m, start, args.budget)
    if isinstance(outcome, machine.BudgetExhausted):
        _emit(args, f"budget exhausted at {outcome.last} after {outcome.steps} steps",
              {"status": "exhausted", "last": str(outcome.last), "steps": outcome.steps})
        return UNKNOWN
    status = "accepted" if outcome.accepted else "rejected"
    lines = [str(i) for i in outcome.ids] + [status]
    _emit(args, "\n".join(lines), {"status": status, "ids": [str(i) for i in outcome.ids]})
    return OK if outcome.accepted else NO


def cmd_normalize(args):
    out = machine.normalize(_machine(args))
    text = machine.dump_machine(out)
    _emit(args, text, {"status": "ok", "machine": text})
    return OK


def cmd_encode(args):
    enc = encoder.encode_theta(_machine(args))
    lines = [f"{label}: {print_formula(f)}" for label, f in enc.components]
    lines.append(f"theta: {print_formula(enc.theta)}")
    payload = {"status": "ok", "theta": print_formula(enc.theta),
               "components": {label: print_formula(f) for label, f in enc.components}}
    if args.id:
        g = print_sequent(encoder.goal(enc, machine.MachineID.parse(args.id)))
        lines.append(f"goal: {g}")
        payload["goal"] = g
    _emit(args, "\n".join(lines), payload)
    return OK


def cmd_certify(args):
    m = _machine(args)
    start = machine.MachineID.parse(args.id)
    result = encoder.certify_acceptance(m, start, args.budget)
    if isinstance(result, encoder.NotAcceptedWithinBudget):
        status = "exhausted" if result.exhausted else "rejected"
        _emit(args, f"not accepted ({status})", {"status": status})
        return UNKNOWN if result.exhausted else NO
    _emit(args, dumps_proof(result), {"status": "ok", "conclusion": print_sequent(result.conclusion),
                                      "size": result.size()})
    return OK


def cmd_search(args):
    intuitionistic = not args.system.classical
    s = parse_sequent(args.sequent, args.system.lang, intuitionistic=intuitionistic or None)
    if args.mall:
        result = search.decide_mall(s)
    else:
        budget = search.SearchBudget(args.depth, args.contractions, args.nodes)
        result = search.prove(s, args.system, budget)
    if isinstance(result, search.Proved):
        _emit(args, dumps_proof(result.proof), {"status": "proved", "nodes": result.nodes,
                                                "size": result.proof.size()})
        return OK
    status = "refuted" if isinstance(result, search.Refuted) else "exhausted"
    _emit(args, status, {"status": status, "nodes": result.nodes})
    return NO if status == "refuted" else UNKNOWN


def cmd_refute(args):
    s = parse_sequent(args.sequent)
    result = phase.find_countermodel(s, args.max_size, _seed(args), jobs=args.jobs)
    if isinstance(result, phase.NotFound):
        _emit(args, f"no countermodel up to size {args.max_size}", {"status": "not-found",
                                                                      "checked": result.checked})
        return UNKNOWN
    text = phase.dump_model(result)
    _emit(args, text, {"status": "found", "model": text})
    return OK


def cmd_models(args):
    names = [a for a in args.atoms.split(",") if a]
    gen = phase.generate_models(_seed(args), args.max_size, names, args.per_space)
    texts = []
    for k, model in enumerate(gen):
        if args.count is not None and k >= args.count:
            break
        texts.append(phase.dump_model(model))
    _emit(args, "---\n".join(texts), {"status": "ok", "models": texts})
    return OK


# -- argument parsing ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    top = _Parser(prog="linlog", description="Linear logic proof tools and counter-machine encodings.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--seed", default=None, help="seed for randomized verbs (default: $LINLOG_SEED or 0)")
    common.add_argument("--jobs", type=int, default=1, help="worker processes (results do not depend on it)")
    sub = top.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    p = sub.add_parser("check", parents=[common], help="verify a proof file")
    p.add_argument("proof")
    p.add_argument("--system", type=_system, default=SYSTEMS["cll"])
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("translate", parents=[common], help="apply tl, tr or ti")
    p.add_argument("text")
    p.add_argument("--which", choices=[t.value for t in translations.TranslationId], default="tl")
    p.add_argument("--sequent", action="store_true", help="translate a whole sequent (tl left, tr right)")
    p.set_defaults(fn=cmd_translate)

    p = sub.add_parser("transform", parents=[common], help="proof of G |- D to weakening-free proof of tl[G] |- tr[D]")
    p.add_argument("proof")
    p.add_argument("--source", choices=("cll", "ill"), default=None)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_transform)

    p = sub.add_parser("reduce", parents=[common], help="weakening-free proof back to a proof of G |- D")
    p.add_argument("proof")
    p.add_argument("--sequent", required=True, help="the original sequent G |- D")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_reduce)

    for verb, fn, help_ in (("simulate", cmd_simulate, "run a counter machine"),
                            ("normalize", cmd_normalize, "add drain states before the terminal"),
                            ("encode", cmd_encode, "print the machine formula (and a goal)"),
                            ("certify", cmd_certify, "prove the goal of an accepted ID")):
        p = sub.add_parser(verb, parents=[common], help=help_)
        p.add_argument("--machine", required=True)
        if verb in ("simulate", "encode", "certify"):
            p.add_argument("--id", required=verb == "certify", help="state,p,q")
        if verb in ("simulate", "certify"):
            p.add_argument("--budget", type=int, default=10_000)
        if verb == "simulate":
            p.add_argument("--multiset", help="space-separated atoms; decide membership in the machine model's bottom")
        if verb in ("normalize", "certify"):
            p.add_argument("--out")
        p.set_defaults(fn=fn)

    p = sub.add_parser("search", parents=[common], help="bounded cut-free proof search")
    p.add_argument("--sequent", required=True)
    p.add_argument("--system", type=_system, default=SYSTEMS["cll"])
    p.add_argument("--depth", type=int, default=40)
    p.add_argument("--contractions", type=int, default=2)
    p.add_argument("--nodes", type=int, default=200_000)
    p.add_argument("--mall", action="store_true", help="use the terminating MALL decision procedure")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_search)

    p = sub.add_parser("refute", parents=[common], help="look for a finite phase countermodel")
    p.add_argument("--sequent", required=True)
    p.add_argument("--max-size", type=int, default=2)
    p.set_defaults(fn=cmd_refute)

    p = sub.add_parser("models", parents=[common], help="print generated phase models")
    p.add_argument("--max-size", type=int, default=2)
    p.add_argument("--atoms", default="p,q")
    p.add_argument("--per-space", type=int, default=1)
    p.add_argument("--count", type=int, default=None)
    p.set_defaults(fn=cmd_models)
    return top


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (LinLogError, argparse.ArgumentTypeError, OSError, ValueError) as exc:
        print(f"linlog {args.verb}: error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
