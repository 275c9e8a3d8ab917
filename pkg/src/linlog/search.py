"""Bounded backward proof search (cut-free) and a decision procedure for MALL.

The search reads rules bottom-up through :func:`kernel.apply_rule`, so every
node it emits carries exactly the annotations the checker expects.  Strategy:

1. close the branch with an axiom if one applies;
2. otherwise apply the first invertible rule found and commit to it;
3. otherwise try every non-invertible instance: each principal formula,
   every context split (chosen per group of equal formulas), both ``&l`` /
   ``+r`` indices, dereliction, promotion, weakening, and contraction last.

A failure is a *refutation* only if nothing was cut short by the depth
bound, the node limit, or the contraction budget.  Sequents that reappear
on their own branch are pruned; a shortest proof never needs them.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import NotApplicable, NotMALL
from .kernel import MALL, Proof, RuleId as R, SystemConfig, apply_rule, check_proof
from .syntax import (
    Bang, Bot, Lolli, Neg, One, Par, Plus, Quest, Sequent, Tensor, Top, With, Zero,
)


@dataclass(frozen=True)
class SearchBudget:
    max_depth: int = 40
    max_contractions_per_branch: int = 2
    max_nodes: int | None = 200_000

    def __post_init__(self):
        if self.max_depth < 0 or self.max_contractions_per_branch < 0:
            raise ValueError("budget fields must be non-negative")
        if self.max_nodes is not None and self.max_nodes < 0:
            raise ValueError("budget fields must be non-negative")


@dataclass(frozen=True)
class Proved:
    proof: Proof
    nodes: int = 0


@dataclass(frozen=True)
class Refuted:
    nodes: int = 0


@dataclass(frozen=True)
class Exhausted:
    reason: str = "budget"
    nodes: int = 0


class _OutOfNodes(Exception):
    pass


# invertible rules, tried in this order; single-premise ones first
_INVERTIBLE_L = ((Tensor, R.TENSOR_L), (Neg, R.NEG_L), (One, R.ONE_L), (Plus, R.PLUS_L))
_INVERTIBLE_R = ((Par, R.PAR_R), (Lolli, R.LOLLI_R), (Neg, R.NEG_R), (Bot, R.BOT_R), (With, R.WITH_R))
_INVERTIBLE_ORDER = {R.TENSOR_L: 0, R.NEG_L: 0, R.ONE_L: 0, R.PAR_R: 0, R.LOLLI_R: 0,
                     R.NEG_R: 0, R.BOT_R: 0, R.PLUS_L: 1, R.WITH_R: 1}


def _distinct(side):
    """(index of first occurrence, formula) for each distinct formula of a canonical side."""
    seen = None
    for j, f in enumerate(side):
        if f != seen:
            yield j, f
            seen = f


def _groups(side, skip):
    """Index lists of equal formulas, leaving out ``skip``."""
    out = []
    for _, grp in itertools.groupby((j for j in range(len(side)) if j != skip), key=lambda j: side[j]):
        out.append(list(grp))
    return out


_SPLIT = object()  # placeholder: every context split is tried


def _split_instances(rule, seq, j):
    """(split annotation, premises) for every way to divide the context of a two-premise rule.

    Same result as calling ``apply_rule`` per split, without re-validating
    the annotation each time.
    """
    a, s = seq.ante, seq.succ
    if rule is R.TENSOR_R:
        f = s[j]
        ga, gs = _groups(a, None), _groups(s, j)
    else:
        f = a[j]
        ga, gs = _groups(a, j), _groups(s, None)
    n_a = len(ga)
    for counts in itertools.product(*[range(len(g) + 1) for g in ga + gs]):
        left_a, right_a, left_s, right_s = [], [], [], []
        for g, c in zip(ga, counts):
            left_a.extend(g[:c])
            right_a.extend(g[c:])
        for g, c in zip(gs, counts[n_a:]):
            left_s.extend(g[:c])
            right_s.extend(g[c:])
        la = tuple(a[i] for i in left_a)
        ra = tuple(a[i] for i in right_a)
        ls = tuple(s[i] for i in left_s)
        rs = tuple(s[i] for i in right_s)
        if rule is R.TENSOR_R:
            prem = (Sequent(la, ls + (f.left,)), Sequent(ra, rs + (f.right,)))
        elif rule is R.PAR_L:
            prem = (Sequent(la + (f.left,), ls), Sequent(ra + (f.right,), rs))
        else:
            prem = (Sequent(la, ls + (f.left,)), Sequent(ra + (f.right,), rs))
        yield (tuple(left_a), tuple(left_s)), prem


class _Search:
    def __init__(self, cfg: SystemConfig, budget: SearchBudget):
        self.cfg = cfg
        self.budget = budget
        self.nodes = 0
        self.proved: dict = {}
        self.refuted: set = set()
        self.failed: set = set()
        self.path: set = set()
        self.enabled = frozenset(r for r in R if cfg.disabled_reason(r) is None and r is not R.CUT)

    # -- helpers -----------------------------------------------------------

    def premises(self, rule, seq, principal=(), split=None):
        if rule not in self.enabled:
            return None
        try:
            prem = apply_rule(rule, seq, principal, split)
        except NotApplicable:
            return None
        # premises only contain subformulas of the conclusion, so the
        # language check done at the root carries over
        if not self.cfg.classical and any(len(p.succ) != 1 for p in prem):
            return None
        return prem

    def axiom(self, seq):
        a, s = seq.ante, seq.succ
        if len(a) == 1 and len(s) == 1 and a[0] == s[0] and R.ID in self.enabled:
            return Proof(R.ID, seq)
        if not a and len(s) == 1 and isinstance(s[0], One) and R.ONE_R in self.enabled:
            return Proof(R.ONE_R, seq)
        if not s and len(a) == 1 and isinstance(a[0], Bot) and R.BOT_L in self.enabled:
            return Proof(R.BOT_L, seq)
        for j, f in enumerate(s):
            if isinstance(f, Top) and self.premises(R.TOP_R, seq, (j,)) is not None:
                return Proof(R.TOP_R, seq, (), (j,))
        for j, f in enumerate(a):
            if isinstance(f, Zero) and self.premises(R.ZERO_L, seq, (j,)) is not None:
                return Proof(R.ZERO_L, seq, (), (j,))
        return None

    def invertible(self, seq):
        best = None
        for side, table in ((seq.ante, _INVERTIBLE_L), (seq.succ, _INVERTIBLE_R)):
            for j, f in enumerate(side):
                for cls, rule in table:
                    if isinstance(f, cls) and rule in self.enabled:
                        if best is None or _INVERTIBLE_ORDER[rule] < _INVERTIBLE_ORDER[best[0]]:
                            best = (rule, j)
                        if _INVERTIBLE_ORDER[rule] == 0:
                            return best
        return best

    def options(self, seq, contr):
        """Non-invertible rule instances as (rule, principal, split, contraction key)."""
        a, s = seq.ante, seq.succ
        late = []
        for j, f in _distinct(a):
            if isinstance(f, With):
                yield R.WITH_L0, (j,), None, None
                yield R.WITH_L1, (j,), None, None
        for j, f in _distinct(s):
            if isinstance(f, Plus):
                yield R.PLUS_R0, (j,), None, None
                yield R.PLUS_R1, (j,), None, None
        for j, f in _distinct(a):
            if isinstance(f, Bang):
                yield R.BANG_L, (j,), None, None
        for j, f in _distinct(s):
            if isinstance(f, Quest):
                yield R.QUEST_R, (j,), None, None
        for j, f in _distinct(s):
            if isinstance(f, Tensor):
                yield R.TENSOR_R, (j,), _SPLIT, None
        for j, f in _distinct(a):
            if isinstance(f, (Lolli, Par)):
                rule = R.LOLLI_L if isinstance(f, Lolli) else R.PAR_L
                yield rule, (j,), _SPLIT, None
        for j, f in _distinct(s):
            if isinstance(f, Bang):
                yield R.BANG_R, (j,), None, None
        for j, f in _distinct(a):
            if isinstance(f, Quest):
                yield R.QUEST_L, (j,), None, None
        for j, f in _distinct(a):
            if isinstance(f, Bang):
                late.append((R.BANG_W, (j,), None, None))
                late.append((R.BANG_C, (j,), None, f))
        for j, f in _distinct(s):
            if isinstance(f, Quest):
                late.append((R.QUEST_W, (j,), None, None))
                late.append((R.QUEST_C, (j,), None, f))
        late.sort(key=lambda o: o[3] is not None)  # weakenings before contractions
        yield from late

    # -- search ------------------------------------------------------------

    def prove(self, seq: Sequent, depth: int, contr: tuple):
        """Return (proof or None, truncated, looped).

        ``looped`` marks a failure that depends on pruning a repeat of some
        sequent on the current path; such failures are not cached.
        """
        if seq in self.proved:
            return self.proved[seq], False, False
        if seq in self.refuted:
            return None, False, False
        if seq in self.path:
            return None, False, True
        key = (seq, depth, contr)
        if key in self.failed:
            return None, True, False
        self.nodes += 1
        if self.budget.max_nodes is not None and self.nodes > self.budget.max_nodes:
            raise _OutOfNodes
        ax = self.axiom(seq)
        if ax is not None:
            self.proved[seq] = ax
            return ax, False, False
        if depth <= 0:
            self.failed.add(key)
            return None, True, False
        self.path.add(seq)
        try:
            proof, truncated, looped = self._expand(seq, depth, contr)
        finally:
            self.path.discard(seq)
        if proof is not None:
            self.proved[seq] = proof
        elif truncated:
            if not looped:
                self.failed.add(key)
        elif not looped:
            self.refuted.add(seq)
        return proof, truncated, looped

    def _children(self, prem, depth, contr):
        subs = []
        truncated = looped = False
        for p in prem:
            sub, t, lp = self.prove(p, depth - 1, contr)
            truncated |= t
            looped |= lp
            if sub is None:
                return None, truncated, looped
            subs.append(sub)
        return subs, truncated, looped

    def _expand(self, seq, depth, contr):
        inv = self.invertible(seq)
        if inv is not None:
            rule, j = inv
            prem = self.premises(rule, seq, (j,))
            if prem is not None:
                subs, truncated, looped = self._children(prem, depth, contr)
                if subs is None:
                    return None, truncated, looped
                return Proof(rule, seq, tuple(subs), (j,)), False, False
        truncated = looped = False
        limit = self.budget.max_contractions_per_branch
        for rule, principal, split, cformula in self.options(seq, contr):
            if rule not in self.enabled:
                continue
            sub_contr = contr
            if cformula is not None:
                used = dict(contr)
                if used.get(cformula, 0) >= limit:
                    truncated = True
                    continue
                used[cformula] = used.get(cformula, 0) + 1
                sub_contr = tuple(sorted(used.items(), key=lambda kv: kv[0].key))
            if split is _SPLIT:
                if rule not in self.enabled:
                    continue
                instances = _split_instances(rule, seq, principal[0])
            else:
                prem = self.premises(rule, seq, principal)
                instances = () if prem is None else ((None, prem),)
            for split, prem in instances:
                if not self.cfg.classical and any(len(p.succ) != 1 for p in prem):
                    continue
                subs, t, lp = self._children(prem, depth, sub_contr)
                truncated |= t
                looped |= lp
                if subs is not None:
                    return Proof(rule, seq, tuple(subs), principal, split), False, False
        return None, truncated, looped


def prove(s: Sequent, cfg: SystemConfig, budget: SearchBudget | None = None):
    """Search for a cut-free proof of ``s`` in ``cfg``."""
    budget = budget or SearchBudget()
    if any(not cfg.admits(f) for f in s.formulas()) or (not cfg.classical and len(s.succ) != 1):
        return Refuted(0)
    search = _Search(cfg, budget)
    try:
        proof, truncated, _ = search.prove(s, budget.max_depth, ())
    except _OutOfNodes:
        return Exhausted("node limit", search.nodes)
    except RecursionError:
        return Exhausted("recursion limit", search.nodes)
    if proof is not None:
        report = check_proof(proof, cfg)
        if not report.ok:  # pragma: no cover - the search only emits kernel steps
            raise AssertionError(f"search produced an invalid proof: {report.describe()}")
        return Proved(proof, search.nodes)
    # at the root a loop-pruned failure is final: the path above it is empty
    if truncated:
        return Exhausted("depth or contraction bound", search.nodes)
    return Refuted(search.nodes)


def is_mall(s: Sequent) -> bool:
    return all(MALL.admits(f) for f in s.formulas())


def decide_mall(s: Sequent):
    """Proved or Refuted for any sequent without exponentials.

    Every backward step shrinks the total size of the sequent, so a depth
    bound of that size is never reached and the search is exhaustive.
    """
    if not is_mall(s):
        raise NotMALL(f"{s} contains exponentials")
    result = prove(s, MALL, SearchBudget(max_depth=s.size + 1, max_contractions_per_branch=0, max_nodes=None))
    if isinstance(result, Exhausted):  # pragma: no cover - ruled out by the size argument
        raise AssertionError(f"MALL search did not terminate cleanly on {s}")
    return result
