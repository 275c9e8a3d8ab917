"""Encoding a counter machine as a formula, and compiling accepted runs into proofs.

The machine's program becomes one formula ``theta``: a left-associated
``&``-chain of implications, one per transition (two per decrement) plus four
fixed guard formulas.  An ID ``(s, p, q)`` becomes the goal

    (!theta)^g(s), c_s, a^p, b^q |- c_t

where ``g`` is 0 at the terminal state and 1 elsewhere.  Every ``!theta`` copy
must be consumed since the target systems have no weakening; the guard
formulas exist to absorb the last copy once a zero test has fired.
"""
from __future__ import annotations

from dataclasses import dataclass

from . import derive as d
from .errors import NotAccepted, UnknownLabel, UnknownState
from .kernel import CLLRR, Proof, check_proof
from .machine import BudgetExhausted, CounterMachine, Dec, Inc, MachineID, Run, run as simulate
from .syntax import Atom, Bang, Lolli, Plus, Sequent, Tensor, With

A = Atom("a")
B = Atom("b")
A_GUARD = Atom("a'")
B_GUARD = Atom("b'")


def state_atom(s: str) -> Atom:
    return Atom(f"c_{s}")


@dataclass(frozen=True)
class ThetaEncoding:
    machine: CounterMachine
    theta: object
    components: tuple          # ((label, formula), ...) in chain order
    props: dict

    @property
    def bang_theta(self):
        return Bang(self.theta)

    @property
    def terminal_atom(self) -> Atom:
        return self.props[self.machine.terminal]

    def label_index(self, label) -> int:
        for i, (lab, _) in enumerate(self.components):
            if lab == label:
                return i
        raise UnknownLabel(label)

    def component(self, label):
        return self.components[self.label_index(label)][1]


def g(m: CounterMachine, state: str) -> int:
    return 0 if state == m.terminal else 1


def _counter_atoms(counter):
    return (A, A_GUARD) if counter == "A" else (B, B_GUARD)


def encode_theta(m: CounterMachine) -> ThetaEncoding:
    props = {s: state_atom(s) for s in m.sorted_states()}
    props.update({"counterA": A, "counterB": B, "guardA": A_GUARD, "guardB": B_GUARD})
    ct = props[m.terminal]
    comps = []
    for s, prog in m.tau.items():
        cj = props[s]
        unit, guard = _counter_atoms(prog.counter)
        if isinstance(prog, Inc):
            comps.append((f"{s}.inc", Lolli(cj, Tensor(props[prog.next], unit))))
        else:
            comps.append((f"{s}.dec", Lolli(Tensor(cj, unit), props[prog.nonzero])))
            comps.append((f"{s}.zero", Lolli(cj, Plus(props[prog.zero], With(guard, ct)))))
    a_done, b_done = With(A_GUARD, ct), With(B_GUARD, ct)
    comps += [
        ("guardA", Lolli(A_GUARD, a_done)),
        ("guardA.b", Lolli(Tensor(a_done, B), a_done)),
        ("guardB", Lolli(B_GUARD, b_done)),
        ("guardB.a", Lolli(Tensor(b_done, A), b_done)),
    ]
    theta = comps[0][1]
    for _, f in comps[1:]:
        theta = With(theta, f)
    return ThetaEncoding(m, theta, tuple(comps), props)


def goal(enc: ThetaEncoding, mid: MachineID) -> Sequent:
    m = enc.machine
    if mid.state not in m.states:
        raise UnknownState(mid.state)
    ante = (enc.bang_theta,) * g(m, mid.state) + (enc.props[mid.state],) + (A,) * mid.p + (B,) * mid.q
    return Sequent(ante, (enc.terminal_atom,))


@dataclass(frozen=True)
class Fragment:
    """A chain of ``&l`` steps turning one conjunct of theta back into theta.

    ``steps`` lists, innermost first, the (index, left, right) of each ``&l``.
    """
    label: str
    steps: tuple

    def graft(self, p: Proof) -> Proof:
        for i, left, right in self.steps:
            p = d.with_l(p, i, left, right)
        return p

    @property
    def rules(self):
        return tuple(f"with_l{i}" for i, _, _ in self.steps)


def _prefixes(enc):
    out = []
    acc = None
    for _, f in enc.components:
        acc = f if acc is None else With(acc, f)
        out.append(acc)
    return out


def select_component(enc: ThetaEncoding, label) -> Fragment:
    i = enc.label_index(label)
    pre = _prefixes(enc)
    comps = [f for _, f in enc.components]
    steps = []
    if i >= 1:
        steps.append((1, pre[i - 1], comps[i]))
    for j in range(max(i, 0) + 1, len(comps)):
        steps.append((0, pre[j - 1], comps[j]))
    return Fragment(label, tuple(steps))


class _Compiler:
    def __init__(self, enc: ThetaEncoding):
        self.enc = enc
        self.fragments = {lab: select_component(enc, lab) for lab, _ in enc.components}
        self.exhaust: dict = {}

    def use(self, label, p: Proof, with_copy: bool) -> Proof:
        """Graft the conjunct-selection chain, then ``!l``, then ``!C`` if a copy remains."""
        enc = self.enc
        p = self.fragments[label].graft(p)
        p = d.bang_l(p, enc.theta)
        if with_copy:
            p = d.bang_c(p, enc.theta)
        return p

    def exhaust_guard(self, counter: str, n: int, gk: int) -> Proof:
        """``(!theta)^gk, guard & c_t, other^n |- c_t`` where ``other`` is the opposite counter's atom."""
        key = (counter, n, gk)
        if key in self.exhaust:
            return self.exhaust[key]
        unit_self, guard = _counter_atoms(counter)
        other = B if counter == "A" else A
        ct = self.enc.terminal_atom
        done = With(guard, ct)
        tag = "guardA" if counter == "A" else "guardB"
        if n == 0:
            close = d.with_l(d.identity(ct), 1, guard, ct)
            if gk == 0:
                p = close
            else:
                first = d.with_l(d.identity(guard), 0, guard, ct)
                p = d.lolli_l(first, close, guard, done)
                p = self.use(tag, p, with_copy=False)
        else:
            prev = self.exhaust_guard(counter, n - 1, gk)
            pair = d.tensor_r(d.identity(done), d.identity(other), done, other)
            p = d.lolli_l(pair, prev, Tensor(done, other), done)
            p = self.use(f"{tag}.{'b' if counter == 'A' else 'a'}", p, with_copy=gk == 1)
        self.exhaust[key] = p
        return p

    def compile(self, r: Run) -> Proof:
        enc, m = self.enc, self.enc.machine
        ids = r.ids
        proof = d.identity(enc.terminal_atom)
        for cur, nxt in zip(reversed(ids[:-1]), reversed(ids[1:])):
            prog = m.tau[cur.state]
            ci = enc.props[cur.state]
            gk = g(m, nxt.state)
            unit, guard = _counter_atoms(prog.counter)
            if isinstance(prog, Inc):
                ck = enc.props[prog.next]
                step = d.tensor_l(proof, ck, unit)
                step = d.lolli_l(d.identity(ci), step, ci, Tensor(ck, unit))
                proof = self.use(f"{cur.state}.inc", step, with_copy=gk == 1)
                continue
            value = cur.p if prog.counter == "A" else cur.q
            if value > 0:
                ck = enc.props[prog.nonzero]
                pair = d.tensor_r(d.identity(ci), d.identity(unit), ci, unit)
                step = d.lolli_l(pair, proof, Tensor(ci, unit), ck)
                proof = self.use(f"{cur.state}.dec", step, with_copy=gk == 1)
            else:
                ck = enc.props[prog.zero]
                other_count = cur.q if prog.counter == "A" else cur.p
                done = With(guard, enc.terminal_atom)
                side = self.exhaust_guard(prog.counter, other_count, gk)
                step = d.plus_l(proof, side, ck, done)
                step = d.lolli_l(d.identity(ci), step, ci, Plus(ck, done))
                proof = self.use(f"{cur.state}.zero", step, with_copy=gk == 1)
        return proof


def compile_run_to_proof(enc: ThetaEncoding, r: Run) -> Proof:
    if not r.accepted:
        raise NotAccepted(f"run from {r.ids[0]} is not accepted")
    proof = _Compiler(enc).compile(r)
    want = goal(enc, r.ids[0])
    if proof.conclusion != want:  # pragma: no cover - guarded by construction
        raise NotAccepted(f"compiled root {proof.conclusion} differs from goal {want}")
    return proof


@dataclass(frozen=True)
class NotAcceptedWithinBudget:
    outcome: object            # the rejecting Run or BudgetExhausted

    @property
    def exhausted(self) -> bool:
        return isinstance(self.outcome, BudgetExhausted)


def certify_acceptance(m: CounterMachine, mid: MachineID, budget: int, enc: ThetaEncoding | None = None):
    """Proof of the goal for ``mid`` if the machine accepts it within ``budget`` steps."""
    outcome = simulate(m, mid, budget)
    if not isinstance(outcome, Run) or not outcome.accepted:
        return NotAcceptedWithinBudget(outcome)
    enc = enc or encode_theta(m)
    proof = compile_run_to_proof(enc, outcome)
    report = check_proof(proof, CLLRR)
    if not report.ok:  # pragma: no cover - would be a compiler bug
        raise AssertionError(report.describe())
    return proof
