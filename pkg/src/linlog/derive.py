"""Forward (top-down) proof construction.

Each function takes premise proofs plus the formulas the rule acts on and
returns a :class:`~linlog.kernel.Proof` whose conclusion and annotations are
computed here.  Nothing in this module is trusted: builders elsewhere use it
for convenience and every result is re-checked by :func:`kernel.check_proof`.
"""
from __future__ import annotations

from collections import defaultdict

from .errors import CutMismatch, NotApplicable
from .kernel import Proof, RuleId as R
from .syntax import (
    BOT, ONE, Bang, Formula, Lolli, Neg, Par, Plus, Quest, Sequent, Tensor,
    TOP, With, ZERO, msub,
)


def _positions(side):
    where = defaultdict(list)
    for j, f in enumerate(side):
        where[f].append(j)
    return where


def _index_of(side, f):
    for j, g in enumerate(side):
        if g == f:
            return j
    raise NotApplicable(f"{f} not found")


def _match(side, items, skip=None):
    where = _positions(side)
    out = []
    for f in items:
        slots = [j for j in where.get(f, ()) if j != skip]
        if not slots:
            raise NotApplicable(f"{f} missing from context")
        j = slots[0]
        where[f].remove(j)
        out.append(j)
    return tuple(sorted(out))


def _node(rule, conclusion, premises=(), principal=None, side=None, left=None, cut_formula=None):
    idx = ()
    skip_a = skip_s = None
    if principal is not None:
        seq_side = conclusion.ante if side == "L" else conclusion.succ
        i = _index_of(seq_side, principal)
        idx = (i,)
        if side == "L":
            skip_a = i
        else:
            skip_s = i
    split = None
    if left is not None:
        la, ls = left
        split = (_match(conclusion.ante, la, skip_a), _match(conclusion.succ, ls, skip_s))
    return Proof(rule, conclusion, tuple(premises), idx, split, cut_formula)


def _take(side, f):
    rest = msub(side, (f,))
    if rest is None:
        raise NotApplicable(f"active formula {f} not present")
    return rest


# -- axioms -----------------------------------------------------------------

def identity(a: Formula) -> Proof:
    return Proof(R.ID, Sequent((a,), (a,)))


def one_r() -> Proof:
    return Proof(R.ONE_R, Sequent((), (ONE,)))


def bot_l() -> Proof:
    return Proof(R.BOT_L, Sequent((BOT,), ()))


def top_r(ante=(), succ=()) -> Proof:
    s = Sequent(tuple(ante), tuple(succ) + (TOP,))
    return _node(R.TOP_R, s, principal=TOP, side="R")


def zero_l(ante=(), succ=()) -> Proof:
    s = Sequent(tuple(ante) + (ZERO,), tuple(succ))
    return _node(R.ZERO_L, s, principal=ZERO, side="L")


# -- one-premise rules ------------------------------------------------------

def _unary_left(rule, p, consumed, produced):
    """Replace ``consumed`` (antecedent formulas of p) with ``produced``."""
    G = p.conclusion.ante
    for f in consumed:
        G = _take(G, f)
    s = Sequent(G + (produced,), p.conclusion.succ)
    return _node(rule, s, (p,), produced, "L")


def _unary_right(rule, p, consumed, produced):
    D = p.conclusion.succ
    for f in consumed:
        D = _take(D, f)
    s = Sequent(p.conclusion.ante, D + (produced,))
    return _node(rule, s, (p,), produced, "R")


def neg_r(p, a):
    """A, G |- D  ==>  G |- D, ~A"""
    G = _take(p.conclusion.ante, a)
    s = Sequent(G, p.conclusion.succ + (Neg(a),))
    return _node(R.NEG_R, s, (p,), Neg(a), "R")


def neg_l(p, a):
    """G |- D, A  ==>  ~A, G |- D"""
    D = _take(p.conclusion.succ, a)
    s = Sequent(p.conclusion.ante + (Neg(a),), D)
    return _node(R.NEG_L, s, (p,), Neg(a), "L")


def bot_r(p):
    return _unary_right(R.BOT_R, p, (), BOT)


def one_l(p):
    return _unary_left(R.ONE_L, p, (), ONE)


def tensor_l(p, a, b):
    return _unary_left(R.TENSOR_L, p, (a, b), Tensor(a, b))


def par_r(p, a, b):
    return _unary_right(R.PAR_R, p, (a, b), Par(a, b))


def with_l(p, i, a0, a1):
    rule = R.WITH_L0 if i == 0 else R.WITH_L1
    return _unary_left(rule, p, ((a0, a1)[i],), With(a0, a1))


def plus_r(p, i, a0, a1):
    rule = R.PLUS_R0 if i == 0 else R.PLUS_R1
    return _unary_right(rule, p, ((a0, a1)[i],), Plus(a0, a1))


def lolli_r(p, a, b):
    G = _take(p.conclusion.ante, a)
    D = _take(p.conclusion.succ, b)
    s = Sequent(G, D + (Lolli(a, b),))
    return _node(R.LOLLI_R, s, (p,), Lolli(a, b), "R")


def bang_w(p, a):
    """Weaken in ``!a``."""
    return _unary_left(R.BANG_W, p, (), Bang(a))


def bang_c(p, a):
    """Merge two copies of ``!a``."""
    return _unary_left(R.BANG_C, p, (Bang(a), Bang(a)), Bang(a))


def bang_l(p, a):
    return _unary_left(R.BANG_L, p, (a,), Bang(a))


def bang_r(p, a):
    return _unary_right(R.BANG_R, p, (a,), Bang(a))


def quest_w(p, a):
    return _unary_right(R.QUEST_W, p, (), Quest(a))


def quest_c(p, a):
    return _unary_right(R.QUEST_C, p, (Quest(a), Quest(a)), Quest(a))


def quest_r(p, a):
    return _unary_right(R.QUEST_R, p, (a,), Quest(a))


def quest_l(p, a):
    return _unary_left(R.QUEST_L, p, (a,), Quest(a))


# -- two-premise rules ------------------------------------------------------

def with_r(p0, p1, a, b):
    D0 = _take(p0.conclusion.succ, a)
    D1 = _take(p1.conclusion.succ, b)
    if p0.conclusion.ante != p1.conclusion.ante or D0 != D1:
        raise NotApplicable("&r premises must share their context")
    s = Sequent(p0.conclusion.ante, D0 + (With(a, b),))
    return _node(R.WITH_R, s, (p0, p1), With(a, b), "R")


def plus_l(p0, p1, a, b):
    G0 = _take(p0.conclusion.ante, a)
    G1 = _take(p1.conclusion.ante, b)
    if G0 != G1 or p0.conclusion.succ != p1.conclusion.succ:
        raise NotApplicable("+l premises must share their context")
    s = Sequent(G0 + (Plus(a, b),), p0.conclusion.succ)
    return _node(R.PLUS_L, s, (p0, p1), Plus(a, b), "L")


def tensor_r(p0, p1, a, b):
    """G |- D, A   and   G' |- D', B  ==>  G, G' |- D, D', A * B"""
    D0 = _take(p0.conclusion.succ, a)
    D1 = _take(p1.conclusion.succ, b)
    G0, G1 = p0.conclusion.ante, p1.conclusion.ante
    s = Sequent(G0 + G1, D0 + D1 + (Tensor(a, b),))
    return _node(R.TENSOR_R, s, (p0, p1), Tensor(a, b), "R", left=(G0, D0))


def par_l(p0, p1, a, b):
    """A, G |- D   and   B, G' |- D'  ==>  A | B, G, G' |- D, D'"""
    G0 = _take(p0.conclusion.ante, a)
    G1 = _take(p1.conclusion.ante, b)
    D0, D1 = p0.conclusion.succ, p1.conclusion.succ
    s = Sequent(G0 + G1 + (Par(a, b),), D0 + D1)
    return _node(R.PAR_L, s, (p0, p1), Par(a, b), "L", left=(G0, D0))


def lolli_l(p0, p1, a, b):
    """G |- D, A   and   B, G' |- D'  ==>  A -o B, G, G' |- D, D'"""
    D0 = _take(p0.conclusion.succ, a)
    G1 = _take(p1.conclusion.ante, b)
    G0, D1 = p0.conclusion.ante, p1.conclusion.succ
    s = Sequent(G0 + G1 + (Lolli(a, b),), D0 + D1)
    return _node(R.LOLLI_L, s, (p0, p1), Lolli(a, b), "L", left=(G0, D0))


def cut(p0, p1, a):
    """G |- D, A   and   A, G' |- D'  ==>  G, G' |- D, D'"""
    D0 = msub(p0.conclusion.succ, (a,))
    G1 = msub(p1.conclusion.ante, (a,))
    if D0 is None or G1 is None:
        raise CutMismatch(f"cut formula {a} must occur in the left succedent and the right antecedent")
    G0, D1 = p0.conclusion.ante, p1.conclusion.succ
    s = Sequent(G0 + G1, D0 + D1)
    return _node(R.CUT, s, (p0, p1), left=(G0, D0), cut_formula=a)
