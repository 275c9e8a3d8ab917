"""The ten acceptance checks, runnable from pytest or as a script.

Each ``criterion_N`` returns an :class:`Outcome`.  ``artifacts`` maps file
names to their text: a deterministic report (no timings) and, where proofs
are produced, a manifest with the SHA-256 of every serialized proof.  The
determinism check reruns criteria 2-9 in a fresh interpreter and compares
those files byte for byte.

    python -m tests.acceptance_harness --out DIR [--seed S]

writes the artifacts of criteria 2-9 into DIR.
"""
from __future__ import annotations

import argparse
import hashlib
import os
import random
import subprocess
import sys
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path

from linlog.encoder import NotAcceptedWithinBudget, certify_acceptance, encode_theta, goal
from linlog.kernel import CLL, CLLR, CLLRR, MALL, RuleId, check_proof, dumps_proof
from linlog.machine import (
    MachineID, Run, lift_id, loop_machine, normalize, random_machine, run,
    subtraction_machine,
)
from linlog.phase import (
    NotFound, PhaseModel, closure_law_failures, find_countermodel, generate_models,
    sequent_holds, spaces,
)
from linlog.search import Proved, Refuted, SearchBudget, decide_mall, is_mall, prove
from linlog.syntax import LanguageId, Sequent, atoms, parse_sequent, print_sequent
from linlog.translations import (
    build_tl_tr_proof, reduce_back_to_cll, tl, tr, transform_cll_to_cllr, translate_sequent,
)
from tests.formula_gen import all_formulas, random_formula, random_sequent
from tests.golden_corpus import ALL_SYSTEMS, CORPUS, expected_outcome, mutations

REPORT: list[str] = []
SEED = "0"

TITLES = {
    1: "kernel fidelity on the golden corpus",
    2: "tl(A) |- tr(A) proofs check without weakening",
    3: "weakening-free round trip on searched proofs",
    4: "accepted machine runs compile to checked proofs",
    5: "non-accepted IDs get no proof",
    6: "closure laws on phase spaces",
    7: "soundness of checked proofs in finite models",
    8: "countermodels and the MALL decision procedure",
    9: "normalized machines accept exactly the halting runs",
    10: "reruns are byte-identical",
}
LIMITS = {1: 1.0, 2: 30.0, 4: 60.0, 7: 120.0}


@dataclass
class Outcome:
    number: int
    passed: bool
    summary: str
    artifacts: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return f"criterion {self.number:>2} [{verdict}] {TITLES[self.number]}: {self.summary} ({self.seconds:.1f}s)"


def _digest(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def _manifest(named_proofs) -> str:
    return "".join(f"{_digest(dumps_proof(p))}  {name}\n" for name, p in named_proofs)


_CACHE: dict = {}


def _timed(number, seed, fn):
    start = time.perf_counter()
    passed, summary, artifacts = fn()
    seconds = time.perf_counter() - start
    limit = LIMITS.get(number)
    if limit is not None and seconds >= limit:
        passed = False
        summary += f"; over the {limit:.0f}s limit"
    out = Outcome(number, passed, summary, artifacts, seconds)
    _CACHE[number, seed] = out
    return out


# -- 1 ---------------------------------------------------------------------------


def criterion_1(seed=SEED) -> Outcome:
    def body():
        failures = []
        for entry in CORPUS:
            for cfg in ALL_SYSTEMS:
                want = expected_outcome(entry, cfg)
                report = check_proof(entry.proof, cfg)
                if (want is None) != report.ok or (want is not None and not isinstance(report.error, want)):
                    failures.append(f"{entry.name} under {cfg.name}")
            for label, bad, err in mutations(entry):
                report = check_proof(bad, entry.system)
                if report.ok or not isinstance(report.error, err):
                    failures.append(f"{entry.name}: {label} accepted")
        used = set().union(*(e.proof.rules_used() for e in CORPUS))
        missing = set(RuleId) - used
        disabled = [e for e in CORPUS if e.system is CLL]
        n_mut = sum(len(mutations(e)) for e in CORPUS)
        ok = not failures and not missing and len(CORPUS) >= 30 and disabled
        summary = (f"{len(CORPUS)} proofs, {len(used)} rules covered, {n_mut} mutants and "
                   f"{len(disabled)} weakening proofs under CLLR rejected, {len(failures)} failures")
        if missing:
            summary += f"; uncovered: {sorted(r.value for r in missing)}"
        return bool(ok), summary, {}
    return _timed(1, seed, body)


# -- 2 ---------------------------------------------------------------------------


def _c2_formulas(seed):
    exhaustive = list(all_formulas(5, ("p", "q")))
    rng = random.Random(f"{seed}:c2")
    sampled = [random_formula(rng, 12, ("p", "q", "r"), units=True) for _ in range(500)]
    return exhaustive, sampled


def criterion_2(seed=SEED) -> Outcome:
    def body():
        exhaustive, sampled = _c2_formulas(seed)
        failures, proofs = [], []
        for k, a in enumerate(exhaustive + sampled):
            pf = build_tl_tr_proof(a)
            if pf.conclusion != Sequent((tl(a),), (tr(a),)) or not check_proof(pf, CLLR).ok:
                failures.append(str(a))
            proofs.append((f"c2-{k:04d}", pf))
        _CACHE["c2_proofs", seed] = [p for _, p in proofs]
        report = f"formulas {len(exhaustive)} exhaustive + {len(sampled)} sampled\nfailures {len(failures)}\n"
        report += "".join(f"failed {f}\n" for f in failures)
        summary = f"{len(exhaustive)} exhaustive + {len(sampled)} random formulas, {len(failures)} failures"
        return not failures, summary, {"c2-report.txt": report, "c2-proofs.sha256": _manifest(proofs)}
    return _timed(2, seed, body)


# -- 3 ---------------------------------------------------------------------------

C3_BUDGET = SearchBudget(max_depth=20, max_contractions_per_branch=2, max_nodes=2000)


def criterion_3(seed=SEED) -> Outcome:
    def body():
        rng = random.Random(f"{seed}:c3")
        pool = [random_sequent(rng, 8, ("p", "q")) for _ in range(200)]
        lines, failures, proofs, checked = [], [], [], []
        for k, s in enumerate(pool):
            res = prove(s, CLL, C3_BUDGET)
            lines.append(f"{k:03d} {type(res).__name__.lower()} {print_sequent(s)}\n")
            if not isinstance(res, Proved):
                continue
            try:
                fwd = transform_cll_to_cllr(res.proof, CLL)
                back = reduce_back_to_cll(fwd, s.ante, s.succ)
            except Exception as exc:  # any failure here is a counted defect
                failures.append(f"{print_sequent(s)}: {exc}")
                continue
            ok = (fwd.conclusion == translate_sequent(s) and check_proof(fwd, CLLR).ok
                  and back.conclusion == s and check_proof(back, CLL).ok)
            if not ok:
                failures.append(print_sequent(s))
            proofs += [(f"c3-{k:03d}-cll", res.proof), (f"c3-{k:03d}-cllr", fwd), (f"c3-{k:03d}-back", back)]
            checked.append((res.proof, fwd, back))
        _CACHE["c3_proofs", seed] = [p for triple in checked for p in triple]
        report = "".join(lines) + f"proved {len(checked)}\nfailures {len(failures)}\n"
        report += "".join(f"failed {f}\n" for f in failures)
        summary = f"{len(checked)} of {len(pool)} pool sequents proved, {len(failures)} round-trip failures"
        return not failures and checked, summary, {"c3-report.txt": report, "c3-proofs.sha256": _manifest(proofs)}
    return _timed(3, seed, body)


# -- 4 ---------------------------------------------------------------------------

MACHINES = (("loop", loop_machine), ("subtraction", subtraction_machine))
SIM_BUDGET = 10_000


def _accepted_inputs(m, limit=20):
    for s in m.sorted_states():
        for p in range(limit + 1):
            for q in range(limit + 1):
                mid = MachineID(s, p, q)
                outcome = run(m, mid, SIM_BUDGET)
                yield mid, isinstance(outcome, Run) and outcome.accepted


def criterion_4(seed=SEED) -> Outcome:
    def body():
        failures, proofs, lines = [], [], []
        for name, make in MACHINES:
            m = make()
            enc = encode_theta(m)
            count = 0
            for mid, accepted in _accepted_inputs(m):
                if not accepted:
                    continue
                pf = certify_acceptance(m, mid, SIM_BUDGET, enc)
                ok = (not isinstance(pf, NotAcceptedWithinBudget) and pf.conclusion == goal(enc, mid)
                      and check_proof(pf, CLLRR).ok)
                if not ok:
                    failures.append(f"{name} {mid}")
                    continue
                count += 1
                proofs.append((f"c4-{name}-{mid.state}-{mid.p}-{mid.q}", pf))
            lines.append(f"{name} certified {count}\n")
        _CACHE["c4_proofs", seed] = [p for _, p in proofs]
        report = "".join(lines) + f"failures {len(failures)}\n" + "".join(f"failed {f}\n" for f in failures)
        summary = f"{len(proofs)} accepted inputs certified under CLLRR, {len(failures)} failures"
        return not failures, summary, {"c4-report.txt": report, "c4-proofs.sha256": _manifest(proofs)}
    return _timed(4, seed, body)


# -- 5 ---------------------------------------------------------------------------

C5_NODE_CAP = 3000


def _rejected_ids(limit=3):
    for name, make in MACHINES:
        m = make()
        for s in m.sorted_states():
            for p in range(limit + 1):
                for q in range(limit + 1):
                    mid = MachineID(s, p, q)
                    outcome = run(m, mid, SIM_BUDGET)
                    if isinstance(outcome, Run) and not outcome.accepted:
                        yield name, m, mid


def criterion_5(seed=SEED) -> Outcome:
    def body():
        lines, proved, total = [], [], 0
        encodings = {}
        for name, m, mid in _rejected_ids():
            enc = encodings.setdefault(name, encode_theta(m))
            n = mid.p + mid.q + 4
            budget = SearchBudget(max_depth=2 * n, max_contractions_per_branch=n, max_nodes=C5_NODE_CAP)
            res = prove(goal(enc, mid), CLLRR, budget)
            total += 1
            lines.append(f"{name} {mid} {type(res).__name__.lower()} nodes={res.nodes}\n")
            if isinstance(res, Proved):
                proved.append(f"{name} {mid}")
        report = "".join(lines) + f"ids {total}\nproved {len(proved)}\n"
        summary = f"{total} non-accepted IDs searched, {len(proved)} proofs found"
        return total >= 50 and not proved, summary, {"c5-report.txt": report}
    return _timed(5, seed, body)


# -- 6 ---------------------------------------------------------------------------


def criterion_6(seed=SEED) -> Outcome:
    def body():
        pool = list(spaces(6, seed))
        rng = random.Random(f"{seed}:c6")
        counts: dict = {}
        sizes = set()
        for i in range(10_000):
            sp = pool[i % len(pool)]
            sizes.add(sp.n)
            x = rng.randrange(1 << sp.n)
            y = x | rng.randrange(1 << sp.n) if rng.random() < 0.5 else rng.randrange(1 << sp.n)
            for law in closure_law_failures(sp, x, y):
                counts[law] = counts.get(law, 0) + 1
        bad = sum(counts.values())
        report = f"spaces {len(pool)}\npairs 10000\nsizes {sorted(sizes)}\n"
        report += "".join(f"failed {law} {n}\n" for law, n in sorted(counts.items()))
        summary = f"10000 pairs over {len(pool)} spaces of size 1-6, {bad} law failures"
        return bad == 0, summary, {"c6-report.txt": report}
    return _timed(6, seed, body)


# -- 7 ---------------------------------------------------------------------------


def _checked_conclusions(seed):
    """Conclusions of every checked proof from criteria 1-4, deduplicated in first-seen order."""
    proofs = [e.proof for e in CORPUS if check_proof(e.proof, CLL).ok]
    for n in (2, 3, 4):
        key = (f"c{n}_proofs", seed)
        if key not in _CACHE:
            CRITERIA[n](seed)
        proofs += _CACHE[key]
    seen, out = set(), []
    for p in proofs:
        if p.conclusion not in seen:
            seen.add(p.conclusion)
            out.append(p.conclusion)
    return len(proofs), out


def criterion_7(seed=SEED) -> Outcome:
    def body():
        n_proofs, conclusions = _checked_conclusions(seed)
        names = sorted(set().union(*(atoms(f) for s in conclusions for f in s.formulas())))
        models = list(generate_models(seed, 3, names, per_space=2))
        n_spaces = len({(m.space.table, m.space.bottom) for m in models})
        failures = []
        for s in conclusions:
            for k, m in enumerate(models):
                if not sequent_holds(m, s):
                    failures.append(f"{print_sequent(s)} fails in model {k}")
                    break
        report = (f"proofs {n_proofs}\nsequents {len(conclusions)}\nspaces {n_spaces}\n"
                  f"models {len(models)}\nfailures {len(failures)}\n")
        report += "".join(f"{f}\n" for f in failures)
        summary = (f"{len(conclusions)} distinct conclusions x {len(models)} models "
                   f"({n_spaces} spaces), {len(failures)} failures")
        return not failures, summary, {"c7-report.txt": report}
    return _timed(7, seed, body)


# -- 8 ---------------------------------------------------------------------------

REFUTABLE = ("p |- p * p", "p + q |- p", "|- 0")


def _provable_pool(seed, n=50):
    """``n`` sequents with kernel-checked proofs: corpus conclusions, then tl/tr instances."""
    out, seen = [], set()
    for e in CORPUS:
        if check_proof(e.proof, CLL).ok and e.proof.conclusion not in seen:
            seen.add(e.proof.conclusion)
            out.append(e.proof.conclusion)
    rng = random.Random(f"{seed}:c8-provable")
    while len(out) < n:
        pf = build_tl_tr_proof(random_formula(rng, 6, ("p", "q")))
        if check_proof(pf, CLL).ok and pf.conclusion not in seen:
            seen.add(pf.conclusion)
            out.append(pf.conclusion)
    return out[:n]


def _mall_pool(seed, n=100, max_size=8):
    rng = random.Random(f"{seed}:c8-mall")
    out = []
    while len(out) < n:
        s = random_sequent(rng, max_size, ("p", "q"), LanguageId.L)
        if is_mall(s) and s.size <= max_size:
            out.append(s)
    return out


def criterion_8(seed=SEED) -> Outcome:
    def body():
        lines, problems = [], []
        for text in REFUTABLE:
            s = parse_sequent(text)
            m = find_countermodel(s, max_size=2, seed=seed)
            found = isinstance(m, PhaseModel) and m.space.n <= 2 and not sequent_holds(m, s)
            lines.append(f"refute {text}: {'found' if found else 'missing'}\n")
            if not found:
                problems.append(f"no countermodel for {text}")
        provable = _provable_pool(seed)
        for s in provable:
            res = find_countermodel(s, max_size=3, seed=seed)
            if not isinstance(res, NotFound):
                problems.append(f"countermodel for provable {print_sequent(s)}")
        lines.append(f"provable {len(provable)} all not-found {not any('provable' in p for p in problems)}\n")
        proved = refuted = with_model = 0
        for s in _mall_pool(seed):
            verdict = decide_mall(s)
            model = find_countermodel(s, max_size=2, seed=seed)
            if isinstance(verdict, Proved):
                proved += 1
                if not check_proof(verdict.proof, MALL).ok or verdict.proof.conclusion != s:
                    problems.append(f"unchecked proof for {print_sequent(s)}")
                if not isinstance(model, NotFound):
                    problems.append(f"proved but refutable: {print_sequent(s)}")
            elif isinstance(verdict, Refuted):
                refuted += 1
                with_model += not isinstance(model, NotFound)
            else:
                problems.append(f"no verdict for {print_sequent(s)}")
            lines.append(f"mall {type(verdict).__name__.lower()} "
                         f"{'model' if not isinstance(model, NotFound) else '-'} {print_sequent(s)}\n")
        report = "".join(lines) + f"problems {len(problems)}\n" + "".join(f"{p}\n" for p in problems)
        summary = (f"3/3 countermodels, {len(provable)} provable without model, MALL pool "
                   f"{proved} proved / {refuted} refuted ({with_model} with a model), {len(problems)} problems")
        return not problems, summary, {"c8-report.txt": report}
    return _timed(8, seed, body)


# -- 9 ---------------------------------------------------------------------------

C9_BUDGET = 200


def criterion_9(seed=SEED) -> Outcome:
    def body():
        rng = random.Random(f"{seed}:c9")
        lines, disagreements, halted_count = [], 0, 0
        for k in range(20):
            m = random_machine(rng, rng.randint(2, 5))
            norm = normalize(m)
            states = m.sorted_states()
            for _ in range(20):
                start = MachineID(rng.choice(states), rng.randint(0, 6), rng.randint(0, 6))
                out = run(m, start, C9_BUDGET)
                halted = isinstance(out, Run)
                # without a final ID the drain has nothing to empty
                extra = out.final.p + out.final.q + 2 if halted else 2
                lifted = run(norm, lift_id(m, start), C9_BUDGET + extra)
                accepted = isinstance(lifted, Run) and lifted.accepted
                agree = halted == accepted
                if halted and accepted:
                    agree = len(lifted) == len(out) + extra
                halted_count += halted
                disagreements += not agree
                lines.append(f"m{k:02d} {start} halted={halted} accepted={accepted}\n")
        report = "".join(lines) + f"halted {halted_count}\ndisagreements {disagreements}\n"
        summary = f"400 runs on 20 machines ({halted_count} halting), {disagreements} disagreements"
        return disagreements == 0, summary, {"c9-report.txt": report}
    return _timed(9, seed, body)


# -- 10 --------------------------------------------------------------------------

RERUN = (2, 3, 4, 5, 6, 7, 8, 9)
CRITERIA = {n: globals()[f"criterion_{n}"] for n in range(1, 10)}


def write_artifacts(out_dir, seed=SEED):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for n in RERUN:
        outcome = _CACHE.get((n, seed)) or CRITERIA[n](seed)
        for name, text in outcome.artifacts.items():
            (out_dir / name).write_text(text)


def criterion_10(seed=SEED) -> Outcome:
    def body():
        with tempfile.TemporaryDirectory() as tmp:
            here, there = Path(tmp, "in-process"), Path(tmp, "rerun")
            write_artifacts(here, seed)
            env = dict(os.environ, PYTHONHASHSEED="12345")
            root = Path(__file__).resolve().parent.parent
            proc = subprocess.run([sys.executable, "-m", "tests.acceptance_harness", "--out", str(there),
                                   "--seed", str(seed)], cwd=root, env=env, capture_output=True, text=True)
            if proc.returncode != 0:
                return False, f"rerun failed: {proc.stderr.strip()[-300:]}", {}
            names = sorted(p.name for p in here.iterdir())
            other = sorted(p.name for p in there.iterdir())
            differing = [n for n in names if n not in other or (here / n).read_bytes() != (there / n).read_bytes()]
            differing += [n for n in other if n not in names]
        summary = f"{len(names)} files compared after a rerun with another hash seed, {len(differing)} differ"
        if differing:
            summary += f": {', '.join(differing)}"
        return not differing, summary, {}
    return _timed(10, seed, body)


CRITERIA[10] = criterion_10


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--out", required=True)
    ap.add_argument("--seed", default=SEED)
    args = ap.parse_args(argv)
    write_artifacts(args.out, args.seed)
    return 0


if __name__ == "__main__":
    sys.exit(main())
