"""Finite phase semantics.

A phase space is a finite commutative monoid with a designated subset
``bottom``.  Subsets are int bitmasks over element indices (bit ``i`` set
means element ``i`` is in).  ``neg(X)`` is the set of ``y`` with
``x * y`` in bottom for all ``x`` in ``X``; facts are the sets fixed by
double negation, and every formula is interpreted as a fact.
"""
from __future__ import annotations

import enum
import itertools
import random
import re
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property

from .errors import InvalidSpace, ModelFormatError, PremiseNotTrue, UnboundAtom
from .syntax import (
    Atom, Bang, Bot, Formula, Lolli, Neg, One, Par, Plus, Quest, Sequent,
    Tensor, Top, With, Zero, atoms,
)


def members(mask: int):
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def mask_of(elements) -> int:
    out = 0
    for e in elements:
        out |= 1 << e
    return out


class PhaseSpace:
    """A commutative monoid on ``range(n)`` with identity ``unit`` and a subset ``bottom``."""

    def __init__(self, table, unit: int = 0, bottom: int = 0, name: str = ""):
        self.table = tuple(tuple(int(v) for v in row) for row in table)
        self.n = n = len(self.table)
        self.unit = unit
        self.bottom = bottom
        self.name = name
        self.full = (1 << n) - 1
        self._validate()
        # image[x][Y] = x * Y as a mask
        self.image = [[0] * (1 << n) for _ in range(n)]
        for x in range(n):
            row = self.image[x]
            for y in range(n):
                bit = 1 << self.table[x][y]
                step = 1 << y
                for Y in range(1 << n):
                    if Y & step:
                        row[Y] |= bit
        self._neg = {}

    def _validate(self):
        n, t = self.n, self.table
        if n == 0:
            raise InvalidSpace("a phase space needs at least one element")
        if any(len(row) != n for row in t):
            raise InvalidSpace("operation table must be square")
        if any(not 0 <= v < n for row in t for v in row):
            raise InvalidSpace("operation table refers to unknown elements")
        if not 0 <= self.unit < n:
            raise InvalidSpace(f"unit {self.unit} is not an element")
        if self.bottom & ~((1 << n) - 1) or self.bottom < 0:
            raise InvalidSpace("bottom refers to unknown elements")
        for x in range(n):
            if t[self.unit][x] != x or t[x][self.unit] != x:
                raise InvalidSpace(f"element {self.unit} is not an identity for {x}")
            for y in range(n):
                if t[x][y] != t[y][x]:
                    raise InvalidSpace(f"not commutative at ({x}, {y})")
                for z in range(n):
                    if t[t[x][y]][z] != t[x][t[y][z]]:
                        raise InvalidSpace(f"not associative at ({x}, {y}, {z})")

    def with_bottom(self, bottom: int) -> "PhaseSpace":
        return PhaseSpace(self.table, self.unit, bottom, self.name)

    def __eq__(self, other):
        return (isinstance(other, PhaseSpace) and self.table == other.table
                and self.unit == other.unit and self.bottom == other.bottom)

    def __hash__(self):
        return hash((self.table, self.unit, self.bottom))

    def __repr__(self):
        return f"PhaseSpace({self.name or self.n}, bottom={sorted(members(self.bottom))})"

    def mul(self, x: int, y: int) -> int:
        return self.table[x][y]

    def product(self, X: int, Y: int) -> int:
        out = 0
        for x in members(X):
            out |= self.image[x][Y]
        return out

    def neg(self, X: int) -> int:
        got = self._neg.get(X)
        if got is None:
            got = 0
            bot = self.bottom
            for y in range(self.n):
                if not self.image[y][X] & ~bot:
                    got |= 1 << y
            self._neg[X] = got
        return got

    def closure(self, X: int) -> int:
        return self.neg(self.neg(X))

    def is_fact(self, X: int) -> bool:
        return self.closure(X) == X

    @cached_property
    def one(self) -> int:
        return self.closure(1 << self.unit)

    @cached_property
    def idempotents(self) -> int:
        """Idempotent elements of the fact generated by the unit."""
        return mask_of(i for i in members(self.one) if self.table[i][i] == i)

    @cached_property
    def facts(self) -> tuple:
        return tuple(sorted({self.closure(X) for X in range(1 << self.n)}))


def lin_neg(space: PhaseSpace, x: int) -> int:
    return space.neg(x)


def closure(space: PhaseSpace, x: int) -> int:
    return space.closure(x)


def closure_law_failures(space: PhaseSpace, x: int, y: int) -> list[str]:
    """Names of the closure laws that fail for the pair ``x``, ``y``."""
    cx, cy = space.closure(x), space.closure(y)
    failed = []
    if x & ~cx:
        failed.append("extensive")
    if space.closure(cx) != cx:
        failed.append("idempotent")
    if x & ~y == 0:
        if cx & ~cy:
            failed.append("monotone")
        if space.neg(y) & ~space.neg(x):
            failed.append("antitone")
    if space.product(cx, cy) & ~space.closure(space.product(x, y)):
        failed.append("multiplicative")
    return failed


@dataclass(eq=False)
class PhaseModel:
    space: PhaseSpace
    valuation: dict
    _memo: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        for name, X in self.valuation.items():
            if not self.space.is_fact(X):
                raise InvalidSpace(f"value of {name} is not a fact")

    def __eq__(self, other):
        return isinstance(other, PhaseModel) and self.space == other.space and self.valuation == other.valuation

    def __hash__(self):
        return hash((self.space, tuple(sorted(self.valuation.items()))))


def interpret(m: PhaseModel, f: Formula) -> int:
    memo = m._memo
    got = memo.get(f)
    if got is not None:
        return got
    sp = m.space
    # iterative post-order so deep formulas do not hit the recursion limit
    stack = [(f, False)]
    while stack:
        g, ready = stack.pop()
        if g in memo:
            continue
        kids = (g.sub,) if hasattr(g, "sub") else (g.left, g.right) if hasattr(g, "left") else ()
        if not ready and any(k not in memo for k in kids):
            stack.append((g, True))
            stack.extend((k, False) for k in kids if k not in memo)
            continue
        memo[g] = _clause(sp, m.valuation, memo, g)
    return memo[f]


def _clause(sp: PhaseSpace, val, memo, g) -> int:
    if isinstance(g, Atom):
        try:
            return val[g.name]
        except KeyError:
            raise UnboundAtom(g.name) from None
    if isinstance(g, One):
        return sp.one
    if isinstance(g, Bot):
        return sp.bottom
    if isinstance(g, Top):
        return sp.full
    if isinstance(g, Zero):
        return sp.closure(0)
    if isinstance(g, Neg):
        return sp.neg(memo[g.sub])
    if isinstance(g, Bang):
        return sp.closure(memo[g.sub] & sp.idempotents)
    if isinstance(g, Quest):
        return sp.neg(sp.neg(memo[g.sub]) & sp.idempotents)
    a, b = memo[g.left], memo[g.right]
    if isinstance(g, Tensor):
        return sp.closure(sp.product(a, b))
    if isinstance(g, With):
        return a & b
    if isinstance(g, Par):
        return sp.neg(sp.product(sp.neg(a), sp.neg(b)))
    if isinstance(g, Plus):
        return sp.closure(a | b)
    if isinstance(g, Lolli):
        return mask_of(z for z in range(sp.n) if not sp.image[z][a] & ~b)
    raise TypeError(f"cannot interpret {g!r}")


def is_true(m: PhaseModel, f: Formula) -> bool:
    return bool(interpret(m, f) >> m.space.unit & 1)


def tensor_fold(m: PhaseModel, fs) -> int:
    sp = m.space
    out = sp.one
    for f in fs:
        out = sp.closure(sp.product(out, interpret(m, f)))
    return out


def par_fold(m: PhaseModel, fs) -> int:
    sp = m.space
    out = sp.bottom
    for f in fs:
        out = sp.neg(sp.product(sp.neg(out), sp.neg(interpret(m, f))))
    return out


def sequent_holds(m: PhaseModel, s: Sequent) -> bool:
    """Whether the tensor of the antecedent is included in the par of the succedent."""
    return not tensor_fold(m, s.ante) & ~par_fold(m, s.succ)


def product_inclusion(m: PhaseModel, gamma, as_, c: Formula) -> bool:
    """Whether ``[A1] ... [An]`` (plain pointwise product) is included in ``[C]``.

    Every member of ``gamma`` must be true in ``m``; that is what lets the
    inclusion be read off a provable ``gamma, A1..An |- C``.
    """
    as_ = list(as_)
    if not as_:
        raise ValueError("need at least one formula to multiply")
    for b in gamma:
        if not is_true(m, b):
            raise PremiseNotTrue(f"{b} is not true in the model")
    sp = m.space
    prod = interpret(m, as_[0])
    for f in as_[1:]:
        prod = sp.product(prod, interpret(m, f))
    return not prod & ~interpret(m, c)


# ---------------------------------------------------------------------------
# Monoids


def enumerate_monoids(n: int):
    """Every commutative monoid table on ``range(n)`` with identity 0 (labelled, not up to iso)."""
    if n < 1:
        return
    pairs = [(x, y) for x in range(1, n) for y in range(x, n)]
    for values in itertools.product(range(n), repeat=len(pairs)):
        t = [[0] * n for _ in range(n)]
        for x in range(n):
            t[0][x] = t[x][0] = x
        for (x, y), v in zip(pairs, values):
            t[x][y] = t[y][x] = v
        if all(t[t[x][y]][z] == t[x][t[y][z]] for x in range(1, n) for y in range(1, n) for z in range(1, n)):
            yield tuple(map(tuple, t))


def cyclic_table(n):
    return tuple(tuple((x + y) % n for y in range(n)) for x in range(n))


def chain_table(n):
    """Idempotent chain: ``x * y = max(x, y)``."""
    return tuple(tuple(max(x, y) for y in range(n)) for x in range(n))


def saturating_table(n):
    """Counting up to ``n - 1`` and sticking there."""
    return tuple(tuple(min(x + y, n - 1) for y in range(n)) for x in range(n))


FAMILIES = (("cyclic", cyclic_table), ("chain", chain_table), ("saturating", saturating_table))

EXHAUSTIVE_MAX = 3
MAX_SIZE = 6


def spaces(max_size: int, seed=0, bottoms_per_family: int = 8):
    """Phase spaces up to ``max_size`` elements in a fixed order.

    Up to three elements: every monoid with every bottom.  Four to six: the
    three families, each with ``bottoms_per_family`` seeded bottoms.
    """
    if max_size > MAX_SIZE:
        raise ValueError(f"max_size is limited to {MAX_SIZE}")
    for n in range(1, min(max_size, EXHAUSTIVE_MAX) + 1):
        for k, table in enumerate(enumerate_monoids(n)):
            for bottom in range(1 << n):
                yield PhaseSpace(table, 0, bottom, f"m{n}.{k}")
    for n in range(EXHAUSTIVE_MAX + 1, max_size + 1):
        for fam, make in FAMILIES:
            rng = random.Random(f"{seed}:{fam}:{n}")
            table = make(n)
            picks = sorted(rng.sample(range(1 << n), min(bottoms_per_family, 1 << n)))
            for bottom in picks:
                yield PhaseSpace(table, 0, bottom, f"{fam}{n}")


def random_fact(space: PhaseSpace, rng: random.Random) -> int:
    return space.closure(rng.randrange(1 << space.n))


def generate_models(seed, max_size: int, atom_names=("p", "q"), per_space: int = 2):
    """Yield ``per_space`` seeded models for each space from :func:`spaces`.

    Valuations are raw random subsets pushed through closure, so every value
    is a fact.
    """
    names = sorted(atom_names)
    for i, sp in enumerate(spaces(max_size, seed)):
        rng = random.Random(f"{seed}:{sp.n}:{i}")
        for _ in range(per_space):
            yield PhaseModel(sp, {a: random_fact(sp, rng) for a in names})


@dataclass(frozen=True)
class NotFound:
    checked: int


def _first_failure(task):
    """Scan one space; return (valuations checked, failing valuation or None)."""
    i, sp, s, names, seed, cap = task
    facts = sp.facts
    if len(facts) ** len(names) <= cap:
        choices = itertools.product(facts, repeat=len(names))
    else:
        rng = random.Random(f"{seed}:cm:{i}")
        choices = (tuple(rng.choice(facts) for _ in names) for _ in range(cap))
    checked = 0
    for combo in choices:
        checked += 1
        val = dict(zip(names, combo))
        if not sequent_holds(PhaseModel(sp, val), s):
            return checked, val
    return checked, None


def find_countermodel(s: Sequent, max_size: int = 2, seed=0, valuation_cap: int = 4096, jobs: int = 1):
    """First model (in a fixed order) where ``s`` fails, else :class:`NotFound`.

    Valuations range over all assignments of facts to the atoms of ``s``;
    above ``valuation_cap`` assignments per space a seeded sample is used.
    With ``jobs > 1`` spaces are scanned in worker processes, but the answer
    is still the one the sequential scan would give.
    """
    names = sorted(set().union(set(), *(atoms(f) for f in s.formulas())))
    tasks = [(i, sp, s, names, seed, valuation_cap) for i, sp in enumerate(spaces(max_size, seed))]
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_first_failure, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        results = (_first_failure(t) for t in tasks)
    checked = 0
    for task, (n, val) in zip(tasks, results):
        checked += n
        if val is not None:
            return PhaseModel(task[1], val)
    return NotFound(checked)


# ---------------------------------------------------------------------------
# Model files


def dump_model(m: PhaseModel) -> str:
    sp = m.space

    def fmt(X):
        return "{" + ", ".join(f"e{i}" for i in members(X)) + "}"

    lines = [f"elements {sp.n}", f"unit e{sp.unit}", "op"]
    lines += [" ".join(f"e{v}" for v in row) for row in sp.table]
    lines.append(f"bottom {fmt(sp.bottom)}")
    lines += [f"{name} = {fmt(X)}" for name, X in sorted(m.valuation.items())]
    return "\n".join(lines) + "\n"


_ELEM = re.compile(r"e(\d+)$")


def _elem(tok, n):
    mt = _ELEM.match(tok.strip())
    if not mt or int(mt.group(1)) >= n:
        raise ModelFormatError(f"bad element {tok!r}")
    return int(mt.group(1))


def _set(text, n):
    text = text.strip()
    if not (text.startswith("{") and text.endswith("}")):
        raise ModelFormatError(f"expected a set in braces, got {text!r}")
    body = text[1:-1].strip()
    return mask_of(_elem(t, n) for t in body.split(",")) if body else 0


def parse_model(text: str) -> PhaseModel:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    try:
        head, unit_line, op_line = lines[:3]
        if not head.startswith("elements ") or not unit_line.startswith("unit ") or op_line != "op":
            raise ModelFormatError("expected 'elements', 'unit' and 'op' header lines")
        n = int(head.split()[1])
        unit = _elem(unit_line.split()[1], n)
        table = [[_elem(t, n) for t in row.split()] for row in lines[3:3 + n]]
        rest = lines[3 + n:]
        if not rest or not rest[0].startswith("bottom "):
            raise ModelFormatError("expected 'bottom' line after the table")
        bottom = _set(rest[0][len("bottom "):], n)
        val = {}
        for ln in rest[1:]:
            name, _, value = ln.partition("=")
            if not _:
                raise ModelFormatError(f"bad valuation line {ln!r}")
            val[name.strip()] = _set(value, n)
    except (ValueError, IndexError) as exc:
        if isinstance(exc, ModelFormatError):
            raise
        raise ModelFormatError(str(exc)) from exc
    return PhaseModel(PhaseSpace(table, unit, bottom), val)


# ---------------------------------------------------------------------------
# The counter-machine model, restricted to what a budget can decide


class Membership(enum.Enum):
    MEMBER = "member"
    NONMEMBER = "nonmember"
    UNKNOWN = "unknown"


def budgeted_pm_membership(m, multiset, budget: int) -> Membership:
    """Decide whether a multiset of atom names lies in the machine model's bottom.

    Bottom holds ``c_s a^p b^q`` for accepted ``(s, p, q)``, every ``a' b^q``
    and every ``b' a^p``.  The first shape needs a simulation, which may run
    out of ``budget`` steps; the answer is then UNKNOWN, never NONMEMBER.
    """
    from .encoder import A, A_GUARD, B, B_GUARD, state_atom
    from .machine import MachineID, Run, run

    counts = Counter(str(x.name) if isinstance(x, Atom) else str(x) for x in multiset)
    p, q = counts.pop(A.name, 0), counts.pop(B.name, 0)
    if counts == Counter({A_GUARD.name: 1}) and p == 0:
        return Membership.MEMBER
    if counts == Counter({B_GUARD.name: 1}) and q == 0:
        return Membership.MEMBER
    if len(counts) != 1 or sum(counts.values()) != 1:
        return Membership.NONMEMBER
    (name,) = counts
    by_atom = {state_atom(s).name: s for s in m.states}
    if name not in by_atom:
        return Membership.NONMEMBER
    outcome = run(m, MachineID(by_atom[name], p, q), budget)
    if not isinstance(outcome, Run):
        return Membership.UNKNOWN
    return Membership.MEMBER if outcome.accepted else Membership.NONMEMBER
