"""Two-counter (Minsky) machines: representation, simulation, normalization."""
from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from typing import Mapping, Union

from .errors import AtTerminal, MachineError, MachineFormatError, UnknownState

COUNTERS = ("A", "B")


@dataclass(frozen=True)
class Inc:
    counter: str
    next: str


@dataclass(frozen=True)
class Dec:
    counter: str
    nonzero: str
    zero: str


Program = Union[Inc, Dec]


@dataclass(frozen=True, order=True)
class MachineID:
    state: str
    p: int = 0
    q: int = 0

    def __post_init__(self):
        if self.p < 0 or self.q < 0:
            raise MachineError(f"counters must be non-negative, got ({self.p}, {self.q})")

    def __str__(self):
        return f"({self.state}, {self.p}, {self.q})"

    @classmethod
    def parse(cls, text: str) -> "MachineID":
        parts = [t.strip() for t in text.strip().strip("()").split(",")]
        if len(parts) != 3:
            raise MachineFormatError(f"expected 'state,p,q', got {text!r}")
        try:
            return cls(parts[0], int(parts[1]), int(parts[2]))
        except ValueError as exc:
            raise MachineFormatError(f"bad counter value in {text!r}") from exc


@dataclass(frozen=True)
class CounterMachine:
    terminal: str
    tau: Mapping[str, Program]
    states: frozenset = field(default=frozenset())

    def __post_init__(self):
        states = frozenset(self.states) | {self.terminal} | frozenset(self.tau)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "tau", dict(sorted(self.tau.items())))
        if self.terminal in self.tau:
            raise MachineFormatError(f"terminal state {self.terminal} must not have a program")
        for s, prog in self.tau.items():
            if prog.counter not in COUNTERS:
                raise MachineFormatError(f"state {s}: unknown counter {prog.counter!r}")
            targets = (prog.next,) if isinstance(prog, Inc) else (prog.nonzero, prog.zero)
            for t in targets:
                if t not in states:
                    raise MachineFormatError(f"state {s} jumps to undeclared state {t}")
        missing = states - set(self.tau) - {self.terminal}
        if missing:
            raise MachineFormatError(f"no program for state(s) {', '.join(sorted(missing))}")

    def sorted_states(self):
        return sorted(self.states)


@dataclass(frozen=True)
class Run:
    ids: tuple
    accepted: bool

    @property
    def final(self) -> MachineID:
        return self.ids[-1]

    def __len__(self):
        return len(self.ids)


@dataclass(frozen=True)
class BudgetExhausted:
    """The machine was still running after ``steps`` transitions."""
    last: MachineID
    steps: int


def step(m: CounterMachine, mid: MachineID) -> MachineID:
    if mid.state == m.terminal:
        raise AtTerminal(f"{mid} is at the terminal state")
    try:
        prog = m.tau[mid.state]
    except KeyError:
        raise UnknownState(mid.state) from None
    da = 1 if prog.counter == "A" else 0
    db = 1 - da
    if isinstance(prog, Inc):
        return MachineID(prog.next, mid.p + da, mid.q + db)
    value = mid.p if prog.counter == "A" else mid.q
    if value > 0:
        return MachineID(prog.nonzero, mid.p - da, mid.q - db)
    return MachineID(prog.zero, mid.p, mid.q)


def run(m: CounterMachine, start: MachineID, budget: int):
    """Simulate for at most ``budget`` steps.

    Returns a :class:`Run` when the terminal state is reached (accepted only
    at ``(terminal, 0, 0)``), otherwise :class:`BudgetExhausted`.
    """
    if start.state not in m.states:
        raise UnknownState(start.state)
    ids = [start]
    cur = start
    for _ in range(budget):
        if cur.state == m.terminal:
            break
        cur = step(m, cur)
        ids.append(cur)
    if cur.state != m.terminal:
        return BudgetExhausted(cur, budget)
    return Run(tuple(ids), cur.p == 0 and cur.q == 0)


# -- normalization ----------------------------------------------------------

DRAIN_A = "drainA@1"
DRAIN_B = "drainB@1"


def lift_state(s: str) -> str:
    return f"{s}@0"


def normalize(m: CounterMachine) -> CounterMachine:
    """Add two drain states that empty A then B before entering the terminal.

    Every jump to the old terminal is redirected to the first drain state, so
    a run that stops at ``(terminal, r, s)`` in ``m`` becomes an accepted run
    of the result.
    """
    term = lift_state(m.terminal)

    def redirect(t):
        return DRAIN_A if t == m.terminal else lift_state(t)

    tau = {}
    for s, prog in m.tau.items():
        if isinstance(prog, Inc):
            tau[lift_state(s)] = Inc(prog.counter, redirect(prog.next))
        else:
            tau[lift_state(s)] = Dec(prog.counter, redirect(prog.nonzero), redirect(prog.zero))
    tau[DRAIN_A] = Dec("A", DRAIN_A, DRAIN_B)
    tau[DRAIN_B] = Dec("B", DRAIN_B, term)
    return CounterMachine(term, tau, frozenset(map(lift_state, m.states)) | {DRAIN_A, DRAIN_B})


def lift_id(m: CounterMachine, mid: MachineID) -> MachineID:
    """Where ``mid`` starts in ``normalize(m)``.

    A start at the old terminal goes straight to the drain so that it, too,
    is accepted whatever the counters hold.
    """
    if mid.state == m.terminal:
        return MachineID(DRAIN_A, mid.p, mid.q)
    return MachineID(lift_state(mid.state), mid.p, mid.q)


# -- machine files ------------------------------------------------------------

_TERMINAL = re.compile(r"^terminal\s+(\S+)$")
_INC = re.compile(r"^state\s+(\S+)\s*=\s*inc\s+([AB])\s*->\s*(\S+)$")
_DEC = re.compile(r"^state\s+(\S+)\s*=\s*dec\s+([AB])\s*->\s*(\S+)\s+else\s+(\S+)$")


def parse_machine(text: str) -> CounterMachine:
    terminal = None
    tau: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if mt := _TERMINAL.match(line):
            if terminal is not None:
                raise MachineFormatError(f"line {lineno}: second terminal declaration")
            terminal = mt.group(1)
            continue
        if mt := _INC.match(line):
            s, prog = mt.group(1), Inc(mt.group(2), mt.group(3))
        elif mt := _DEC.match(line):
            s, prog = mt.group(1), Dec(mt.group(2), mt.group(3), mt.group(4))
        else:
            raise MachineFormatError(f"line {lineno}: cannot parse {raw.strip()!r}")
        if s in tau:
            raise MachineFormatError(f"line {lineno}: state {s} declared twice")
        tau[s] = prog
    if terminal is None:
        raise MachineFormatError("missing 'terminal' declaration")
    return CounterMachine(terminal, tau)


def dump_machine(m: CounterMachine) -> str:
    lines = [f"terminal {m.terminal}"]
    for s, prog in m.tau.items():
        if isinstance(prog, Inc):
            lines.append(f"state {s} = inc {prog.counter} -> {prog.next}")
        else:
            lines.append(f"state {s} = dec {prog.counter} -> {prog.nonzero} else {prog.zero}")
    return "\n".join(lines) + "\n"


def random_machine(rng: random.Random, n_states: int) -> CounterMachine:
    """A machine with ``n_states`` states (terminal included), programs drawn uniformly."""
    if n_states < 1:
        raise ValueError("need at least the terminal state")
    names = [f"s{i}" for i in range(1, n_states)] + ["st"]
    tau = {}
    for s in names[:-1]:
        counter = rng.choice(COUNTERS)
        if rng.random() < 0.5:
            tau[s] = Inc(counter, rng.choice(names))
        else:
            tau[s] = Dec(counter, rng.choice(names), rng.choice(names))
    return CounterMachine("st", tau)


# -- the two reference machines ---------------------------------------------

def loop_machine() -> CounterMachine:
    """One working state that empties A and then stops."""
    return CounterMachine("st", {"s1": Dec("A", "s1", "st")})


def subtraction_machine() -> CounterMachine:
    """Computes truncated subtraction ``A := A - B`` and stops.

    Accepts ``(s1, p, q)`` exactly when ``p <= q``: any left-over A blocks
    acceptance since nothing else empties it.
    """
    return CounterMachine("st", {
        "s1": Dec("B", "s2", "st"),
        "s2": Dec("A", "s1", "s3"),
        "s3": Dec("B", "s3", "st"),
    })
