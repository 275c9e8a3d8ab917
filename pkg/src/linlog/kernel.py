"""Proof objects and the rule checker for every system variant.

A :class:`Proof` node records the rule name, its conclusion, and just enough
annotation (principal formula index, context split, cut formula) that every
node can be verified without search.  The checking relation is
:func:`apply_rule` read bottom-up: given a conclusion and annotations it
returns the premises the rule demands, and a node is valid iff those are
exactly the conclusions of its children.
"""
from __future__ import annotations

import enum
import json
import sys
from contextlib import contextmanager
from dataclasses import dataclass, field

from .errors import (
    CutMismatch, DisabledRule, KernelError, LanguageViolation, MalformedNode,
    NotApplicable, ProofFormatError,
)
from .syntax import (
    Bang, Bot, Formula, LanguageId, Lolli, Neg, One, Par, Plus, Quest, Sequent,
    Tensor, Top, With, Zero, admits, parse_formula, parse_sequent,
    print_formula, print_sequent, subformulas,
)


class RuleId(enum.Enum):
    ID = "id"
    CUT = "cut"
    NEG_R = "neg_r"
    NEG_L = "neg_l"
    BOT_R = "bot_r"
    BOT_L = "bot_l"
    ONE_R = "one_r"
    ONE_L = "one_l"
    TOP_R = "top_r"
    ZERO_L = "zero_l"
    TENSOR_R = "tensor_r"
    TENSOR_L = "tensor_l"
    WITH_R = "with_r"
    WITH_L0 = "with_l0"
    WITH_L1 = "with_l1"
    PAR_R = "par_r"
    PAR_L = "par_l"
    PLUS_R0 = "plus_r0"
    PLUS_R1 = "plus_r1"
    PLUS_L = "plus_l"
    LOLLI_R = "lolli_r"
    LOLLI_L = "lolli_l"
    BANG_W = "bang_w"
    BANG_C = "bang_c"
    BANG_R = "bang_r"
    BANG_L = "bang_l"
    QUEST_W = "quest_w"
    QUEST_C = "quest_c"
    QUEST_R = "quest_r"
    QUEST_L = "quest_l"

    @property
    def side(self):
        """'L' or 'R' for rules with a principal formula, else None."""
        return _RULE_INFO[self][0]

    @property
    def connective(self):
        return _RULE_INFO[self][1]

    @property
    def index(self):
        return _INDEXED.get(self)


R = RuleId

# rule -> (side of principal formula, connective class)
_RULE_INFO = {
    R.ID: (None, None), R.CUT: (None, None),
    R.NEG_R: ("R", Neg), R.NEG_L: ("L", Neg),
    R.BOT_R: ("R", Bot), R.BOT_L: (None, Bot),
    R.ONE_R: (None, One), R.ONE_L: ("L", One),
    R.TOP_R: ("R", Top), R.ZERO_L: ("L", Zero),
    R.TENSOR_R: ("R", Tensor), R.TENSOR_L: ("L", Tensor),
    R.WITH_R: ("R", With), R.WITH_L0: ("L", With), R.WITH_L1: ("L", With),
    R.PAR_R: ("R", Par), R.PAR_L: ("L", Par),
    R.PLUS_R0: ("R", Plus), R.PLUS_R1: ("R", Plus), R.PLUS_L: ("L", Plus),
    R.LOLLI_R: ("R", Lolli), R.LOLLI_L: ("L", Lolli),
    R.BANG_W: ("L", Bang), R.BANG_C: ("L", Bang), R.BANG_R: ("R", Bang), R.BANG_L: ("L", Bang),
    R.QUEST_W: ("R", Quest), R.QUEST_C: ("R", Quest), R.QUEST_R: ("R", Quest), R.QUEST_L: ("L", Quest),
}
_INDEXED = {R.WITH_L0: 0, R.WITH_L1: 1, R.PLUS_R0: 0, R.PLUS_R1: 1}
SPLIT_RULES = frozenset({R.CUT, R.TENSOR_R, R.PAR_L, R.LOLLI_L})
WEAKENING_RULES = frozenset({R.BANG_W, R.QUEST_W})
CONTRACTION_RULES = frozenset({R.BANG_C, R.QUEST_C})
EXPONENTIAL_RULES = frozenset({R.BANG_W, R.BANG_C, R.BANG_R, R.BANG_L,
                               R.QUEST_W, R.QUEST_C, R.QUEST_R, R.QUEST_L})
# rules of the intuitionistic (single-succedent) calculus
INTUITIONISTIC_RULES = frozenset({
    R.ID, R.CUT, R.ONE_R, R.ONE_L, R.TOP_R, R.ZERO_L, R.TENSOR_R, R.TENSOR_L,
    R.WITH_R, R.WITH_L0, R.WITH_L1, R.PLUS_R0, R.PLUS_R1, R.PLUS_L,
    R.LOLLI_R, R.LOLLI_L, R.BANG_W, R.BANG_C, R.BANG_R, R.BANG_L,
})


_EXPONENTIAL_MASK = (1 << Bang.rank) | (1 << Quest.rank)


@dataclass(frozen=True)
class SystemConfig:
    name: str
    lang: LanguageId
    classical: bool = True
    weakening_enabled: bool = True
    contraction_enabled: bool = True
    cut_enabled: bool = True
    exponentials: bool = True

    def admits(self, f: Formula) -> bool:
        if not admits(self.lang, f):
            return False
        if not self.exponentials:
            return not (f.kinds & _EXPONENTIAL_MASK)
        return True

    def disabled_reason(self, rule: RuleId) -> str | None:
        """Why ``rule`` is unavailable in this system, or None if it is available."""
        if not self.classical and rule not in INTUITIONISTIC_RULES:
            return "not an intuitionistic rule"
        conn = rule.connective
        if conn is not None and conn in self.lang.forbidden:
            return f"connective {conn.symbol} not in {self.lang.value}"
        if rule in EXPONENTIAL_RULES and not self.exponentials:
            return "no exponentials"
        if rule in WEAKENING_RULES and not self.weakening_enabled:
            return "weakening disabled"
        if rule in CONTRACTION_RULES and not self.contraction_enabled:
            return "contraction disabled"
        if rule is R.CUT and not self.cut_enabled:
            return "cut disabled"
        return None

    def __str__(self):
        return self.name


CLL = SystemConfig("CLL", LanguageId.L)
CLLR = SystemConfig("CLLR", LanguageId.L, weakening_enabled=False)
CLLRR = SystemConfig("CLLRR", LanguageId.Lminus, weakening_enabled=False)
MALL = SystemConfig("MALL", LanguageId.L, exponentials=False)
ILL = SystemConfig("ILL", LanguageId.LI, classical=False)
ILLR = SystemConfig("ILLR", LanguageId.LI, classical=False, weakening_enabled=False)
ILLRR = SystemConfig("ILLRR", LanguageId.LIminus, classical=False, weakening_enabled=False)

SYSTEMS = {cfg.name.lower(): cfg for cfg in (CLL, CLLR, CLLRR, MALL, ILL, ILLR, ILLRR)}


# ---------------------------------------------------------------------------
# Proof objects


@dataclass(frozen=True, eq=False)
class Proof:
    rule: RuleId
    conclusion: Sequent
    premises: tuple = ()
    principal: tuple = ()
    split: tuple | None = None
    cut: Formula | None = None

    @property
    def index(self):
        return self.rule.index

    def size(self) -> int:
        n, stack = 0, [self]
        while stack:
            p = stack.pop()
            n += 1
            stack.extend(p.premises)
        return n

    def height(self) -> int:
        best, stack = 0, [(self, 1)]
        while stack:
            p, h = stack.pop()
            best = max(best, h)
            stack.extend((q, h + 1) for q in p.premises)
        return best

    def nodes(self):
        stack = [self]
        while stack:
            p = stack.pop()
            yield p
            stack.extend(reversed(p.premises))

    def rules_used(self) -> set:
        return {p.rule for p in self.nodes()}


@dataclass
class CheckReport:
    ok: bool
    path: tuple = ()
    reason: str = ""
    error: KernelError | None = field(default=None, repr=False)

    def __bool__(self):
        return self.ok

    def describe(self) -> str:
        if self.ok:
            return "ok"
        return f"rejected at {list(self.path)}: {self.reason}"


# ---------------------------------------------------------------------------
# Inverse rule reading


def _pick(seq: Sequent, rule: RuleId, principal):
    if len(principal) != 1:
        raise NotApplicable(f"{rule.value} needs exactly one principal index")
    i = principal[0]
    side = seq.ante if rule.side == "L" else seq.succ
    if not isinstance(i, int) or not 0 <= i < len(side):
        raise NotApplicable(f"principal index {i} out of range")
    f = side[i]
    if not isinstance(f, rule.connective):
        raise NotApplicable(f"principal formula {f} is not a {rule.connective.__name__}")
    rest = side[:i] + side[i + 1:]
    return i, f, rest


def _split(seq: Sequent, split, skip_ante=None, skip_succ=None):
    if split is None or len(split) != 2:
        raise NotApplicable("context split annotation missing")
    out = []
    for side, chosen, skip in ((seq.ante, split[0], skip_ante), (seq.succ, split[1], skip_succ)):
        chosen = list(chosen)
        if len(set(chosen)) != len(chosen):
            raise NotApplicable("split lists an index twice")
        for j in chosen:
            if not isinstance(j, int) or not 0 <= j < len(side) or j == skip:
                raise NotApplicable(f"split index {j} is invalid")
        taken = set(chosen)
        left = tuple(side[j] for j in chosen)
        right = tuple(f for j, f in enumerate(side) if j not in taken and j != skip)
        out.append((left, right))
    (la, ra), (ls, rs) = out
    return la, ls, ra, rs


def apply_rule(rule: RuleId, conclusion: Sequent, principal=(), split=None, cut=None) -> list:
    """Premises demanded by ``rule`` for ``conclusion`` under the annotations.

    Raises :class:`NotApplicable` if the rule cannot conclude this sequent.
    """
    S = Sequent
    G, D = conclusion.ante, conclusion.succ
    if rule.side is None and len(principal):
        raise NotApplicable(f"{rule.value} takes no principal index")
    if rule is R.ID:
        if len(G) == 1 and len(D) == 1 and G[0] == D[0]:
            return []
        raise NotApplicable("id needs A |- A")
    if rule is R.ONE_R:
        if not G and len(D) == 1 and isinstance(D[0], One):
            return []
        raise NotApplicable("1r concludes exactly |- 1")
    if rule is R.BOT_L:
        if not D and len(G) == 1 and isinstance(G[0], Bot):
            return []
        raise NotApplicable("bot l concludes exactly bot |-")
    if rule is R.CUT:
        if cut is None:
            raise NotApplicable("cut formula missing")
        la, ls, ra, rs = _split(conclusion, split)
        return [S(la, ls + (cut,)), S((cut,) + ra, rs)]

    i, f, rest = _pick(conclusion, rule, principal)
    if rule.side == "L":
        G = rest
    else:
        D = rest

    if rule in (R.TOP_R, R.ZERO_L):
        return []
    if rule is R.NEG_R:
        return [S(G + (f.sub,), D)]
    if rule is R.NEG_L:
        return [S(G, D + (f.sub,))]
    if rule in (R.BOT_R, R.ONE_L):
        return [S(G, D)]
    if rule is R.TENSOR_L:
        return [S(G + (f.left, f.right), D)]
    if rule is R.WITH_R:
        return [S(G, D + (f.left,)), S(G, D + (f.right,))]
    if rule in (R.WITH_L0, R.WITH_L1):
        return [S(G + ((f.left, f.right)[rule.index],), D)]
    if rule is R.PAR_R:
        return [S(G, D + (f.left, f.right))]
    if rule in (R.PLUS_R0, R.PLUS_R1):
        return [S(G, D + ((f.left, f.right)[rule.index],))]
    if rule is R.PLUS_L:
        return [S(G + (f.left,), D), S(G + (f.right,), D)]
    if rule is R.LOLLI_R:
        return [S(G + (f.left,), D + (f.right,))]
    if rule in (R.TENSOR_R, R.PAR_L, R.LOLLI_L):
        if rule is R.TENSOR_R:
            la, ls, ra, rs = _split(conclusion, split, skip_succ=i)
            return [S(la, ls + (f.left,)), S(ra, rs + (f.right,))]
        la, ls, ra, rs = _split(conclusion, split, skip_ante=i)
        if rule is R.PAR_L:
            return [S((f.left,) + la, ls), S((f.right,) + ra, rs)]
        return [S(la, ls + (f.left,)), S((f.right,) + ra, rs)]
    if rule in (R.BANG_W, R.QUEST_W):
        return [S(G, D)]
    if rule is R.BANG_C:
        return [S(G + (f, f), D)]
    if rule is R.QUEST_C:
        return [S(G, D + (f, f))]
    if rule is R.BANG_L:
        return [S(G + (f.sub,), D)]
    if rule is R.QUEST_R:
        return [S(G, D + (f.sub,))]
    if rule in (R.BANG_R, R.QUEST_L):
        if not all(isinstance(g, Bang) for g in G):
            raise NotApplicable(f"{rule.value} needs every antecedent formula to be !-prefixed")
        if not all(isinstance(d, Quest) for d in D):
            raise NotApplicable(f"{rule.value} needs every succedent formula to be ?-prefixed")
        if rule is R.BANG_R:
            return [S(G, D + (f.sub,))]
        return [S(G + (f.sub,), D)]
    raise NotApplicable(f"unknown rule {rule}")  # pragma: no cover


# ---------------------------------------------------------------------------
# Checking


def _check_node(p: Proof, cfg: SystemConfig, path):
    if not isinstance(p.rule, RuleId):
        raise MalformedNode(path, f"unknown rule {p.rule!r}")
    for f in p.conclusion.formulas():
        if not cfg.admits(f):
            raise LanguageViolation(f, cfg.name)
    if not cfg.classical and len(p.conclusion.succ) != 1:
        raise MalformedNode(path, "intuitionistic sequent without exactly one succedent formula")
    reason = cfg.disabled_reason(p.rule)
    if reason is not None:
        raise DisabledRule(p.rule, cfg.name)
    if p.rule is not R.CUT and p.cut is not None:
        raise MalformedNode(path, "cut formula annotation on a non-cut node")
    if p.rule not in SPLIT_RULES and p.split is not None:
        raise MalformedNode(path, "split annotation on a rule that does not split contexts")
    try:
        expected = apply_rule(p.rule, p.conclusion, p.principal, p.split, p.cut)
    except NotApplicable as exc:
        raise MalformedNode(path, str(exc)) from None
    if len(expected) != len(p.premises):
        raise MalformedNode(path, f"{p.rule.value} needs {len(expected)} premises, got {len(p.premises)}")
    for k, (want, sub) in enumerate(zip(expected, p.premises)):
        if sub.conclusion != want:
            raise MalformedNode(path, f"premise {k} is {print_sequent(sub.conclusion)}, "
                                      f"rule demands {print_sequent(want)}")


def check_proof(p: Proof, cfg: SystemConfig) -> CheckReport:
    """Verify every node of ``p`` under ``cfg``; report the first failure (pre-order)."""
    stack = [(p, ())]
    while stack:
        node, path = stack.pop()
        try:
            _check_node(node, cfg, path)
        except KernelError as exc:
            return CheckReport(False, path, str(exc), exc)
        for k in range(len(node.premises) - 1, -1, -1):
            stack.append((node.premises[k], path + (k,)))
    return CheckReport(True)


def verify(p: Proof, cfg: SystemConfig) -> Proof:
    """Like :func:`check_proof` but raises the underlying error."""
    report = check_proof(p, cfg)
    if not report.ok:
        raise report.error
    return p


def cut(left: Proof, right: Proof, cut_formula: Formula) -> Proof:
    """Compose ``left`` (... |- ..., A) and ``right`` (A, ... |- ...) by Cut on A."""
    from .derive import cut as derive_cut
    return derive_cut(left, right, cut_formula)


# ---------------------------------------------------------------------------
# JSON proof files


@contextmanager
def deep_recursion(limit=20000):
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, limit))
    try:
        yield
    finally:
        sys.setrecursionlimit(old)


def proof_to_dict(p: Proof) -> dict:
    def encode(node, kids):
        d = {"rule": node.rule.value, "conclusion": print_sequent(node.conclusion),
             "principal": list(node.principal)}
        if node.split is not None:
            d["split"] = [list(node.split[0]), list(node.split[1])]
        if node.index is not None:
            d["index"] = node.index
        if node.cut is not None:
            d["cut"] = print_formula(node.cut)
        d["premises"] = kids
        return d

    # post-order without recursion: proofs from the machine encoder are deep
    done = {}
    stack = [(p, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            done[id(node)] = encode(node, [done[id(q)] for q in node.premises])
        else:
            stack.append((node, True))
            stack.extend((q, False) for q in node.premises)
    return done[id(p)]


def proof_from_dict(d: dict) -> Proof:
    stack = [(d, False)]
    built = {}
    while stack:
        node, expanded = stack.pop()
        if not isinstance(node, dict):
            raise ProofFormatError("proof node must be an object")
        if not expanded:
            stack.append((node, True))
            stack.extend((q, False) for q in node.get("premises", []))
            continue
        try:
            rule = RuleId(node["rule"])
        except (KeyError, ValueError):
            raise ProofFormatError(f"unknown rule {node.get('rule')!r}") from None
        if "conclusion" not in node:
            raise ProofFormatError("proof node without conclusion")
        conclusion = parse_sequent(node["conclusion"], LanguageId.L, intuitionistic=False)
        split = node.get("split")
        if split is not None:
            split = (tuple(split[0]), tuple(split[1]))
        if "index" in node and node["index"] != rule.index:
            raise ProofFormatError(f"index {node['index']} contradicts rule {rule.value}")
        cut_f = parse_formula(node["cut"]) if node.get("cut") is not None else None
        premises = tuple(built[id(q)] for q in node.get("premises", []))
        built[id(node)] = Proof(rule, conclusion, premises, tuple(node.get("principal", ())), split, cut_f)
    return built[id(d)]


def dumps_proof(p: Proof) -> str:
    with deep_recursion():
        return json.dumps(proof_to_dict(p), separators=(",", ":"), ensure_ascii=False) + "\n"


def loads_proof(text: str) -> Proof:
    with deep_recursion():
        data = json.loads(text)
    return proof_from_dict(data)
