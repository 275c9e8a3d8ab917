"""Weakening-simulating translations and the proof transformers built on them.

``tl``/``tr`` guard every ``!`` on the left with ``& 1`` and every ``?`` on the
right with ``+ bot``; the unit then absorbs what weakening would have
discarded.  The builders here produce explicit proofs:

* :func:`build_tl_tr_proof` -- ``tl(A) |- tr(A)`` without weakening,
* :func:`transform_cll_to_cllr` -- a cut-free CLL proof of ``G |- D`` into a
  weakening-free proof of ``tl[G] |- tr[D]``,
* :func:`build_expansion_proofs` -- ``A |- tl(A)`` and ``tr(A) |- A`` in CLL,
* :func:`reduce_back_to_cll` -- cut the above against a weakening-free proof
  to recover ``G |- D`` in CLL.

The same functions serve the intuitionistic systems (ILL/ILLR) since on
intuitionistic formulas every step they emit is a Table-3 rule.
"""
from __future__ import annotations

import enum
from functools import lru_cache

from . import derive as d
from .errors import NotCLLProof, RootMismatch, TranslationError, UnsupportedCut
from .kernel import CLL, CLLR, ILL, ILLR, Proof, RuleId as R, SystemConfig, check_proof
from .syntax import (
    BOT, ONE, Atom, Bang, Bot, LanguageId, Lolli, Neg, One, Par, Plus, Quest,
    Sequent, Tensor, Top, With, Zero, admits, msub,
)


class TranslationId(enum.Enum):
    TL = "tl"
    TR = "tr"
    TI = "ti"


_UNITS = (One, Bot, Top, Zero)
_MONOIDAL = (Tensor, Par, With, Plus)


@lru_cache(maxsize=None)
def tl(f):
    if isinstance(f, (Atom,) + _UNITS):
        return f
    if isinstance(f, Neg):
        return Neg(tr(f.sub))
    if isinstance(f, _MONOIDAL):
        return type(f)(tl(f.left), tl(f.right))
    if isinstance(f, Lolli):
        return Lolli(tr(f.left), tl(f.right))
    if isinstance(f, Bang):
        return Bang(With(tl(f.sub), ONE))
    if isinstance(f, Quest):
        return Quest(tl(f.sub))
    raise TranslationError(f"cannot translate {f!r}")


@lru_cache(maxsize=None)
def tr(f):
    if isinstance(f, (Atom,) + _UNITS):
        return f
    if isinstance(f, Neg):
        return Neg(tl(f.sub))
    if isinstance(f, _MONOIDAL):
        return type(f)(tr(f.left), tr(f.right))
    if isinstance(f, Lolli):
        return Lolli(tl(f.left), tr(f.right))
    if isinstance(f, Bang):
        return Bang(tr(f.sub))
    if isinstance(f, Quest):
        return Quest(Plus(tr(f.sub), BOT))
    raise TranslationError(f"cannot translate {f!r}")


@lru_cache(maxsize=None)
def ti(f):
    """The single intuitionistic translation: homomorphic except ``!A -> !(t(A) & 1)``."""
    if isinstance(f, (Atom,) + _UNITS):
        return f
    if isinstance(f, (Tensor, With, Plus, Lolli)):
        return type(f)(ti(f.left), ti(f.right))
    if isinstance(f, Bang):
        return Bang(With(ti(f.sub), ONE))
    raise TranslationError(f"cannot translate {f!r}")


_TRANSLATE = {TranslationId.TL: (tl, LanguageId.L), TranslationId.TR: (tr, LanguageId.L),
              TranslationId.TI: (ti, LanguageId.LI)}


def translate(f, which: TranslationId):
    fn, lang = _TRANSLATE[TranslationId(which)]
    if not admits(lang, f):
        from .errors import LanguageViolation
        raise LanguageViolation(f, lang.value)
    return fn(f)


def translate_sequent(s: Sequent) -> Sequent:
    return Sequent(tuple(tl(f) for f in s.ante), tuple(tr(f) for f in s.succ))


# ---------------------------------------------------------------------------
# tl(A) |- tr(A) without weakening


@lru_cache(maxsize=None)
def build_tl_tr_proof(a) -> Proof:
    if isinstance(a, (Atom,) + _UNITS):
        return d.identity(a)
    if isinstance(a, Neg):
        d0 = build_tl_tr_proof(a.sub)
        step = d.neg_r(d0, tl(a.sub))                 # |- ~tl(B), tr(B)
        return d.neg_l(step, tr(a.sub))               # ~tr(B) |- ~tl(B)
    if isinstance(a, Lolli):
        b, c = a.left, a.right
        d0, d1 = build_tl_tr_proof(b), build_tl_tr_proof(c)
        step = d.lolli_l(d0, d1, tr(b), tl(c))        # tr(B) -o tl(C), tl(B) |- tr(C)
        return d.lolli_r(step, tl(b), tr(c))
    if isinstance(a, Bang):
        b = a.sub
        step = d.with_l(build_tl_tr_proof(b), 0, tl(b), ONE)
        step = d.bang_l(step, With(tl(b), ONE))
        return d.bang_r(step, tr(b))
    if isinstance(a, Quest):
        b = a.sub
        step = d.plus_r(build_tl_tr_proof(b), 0, tr(b), BOT)
        step = d.quest_r(step, Plus(tr(b), BOT))
        return d.quest_l(step, tl(b))
    b, c = a.left, a.right
    d0, d1 = build_tl_tr_proof(b), build_tl_tr_proof(c)
    if isinstance(a, Tensor):
        step = d.tensor_r(d0, d1, tr(b), tr(c))
        return d.tensor_l(step, tl(b), tl(c))
    if isinstance(a, Par):
        step = d.par_l(d0, d1, tl(b), tl(c))
        return d.par_r(step, tr(b), tr(c))
    if isinstance(a, With):
        left = d.with_l(d0, 0, tl(b), tl(c))
        right = d.with_l(d1, 1, tl(b), tl(c))
        return d.with_r(left, right, tr(b), tr(c))
    if isinstance(a, Plus):
        left = d.plus_r(d0, 0, tr(b), tr(c))
        right = d.plus_r(d1, 1, tr(b), tr(c))
        return d.plus_l(left, right, tl(b), tl(c))
    raise TranslationError(f"cannot build proof for {a!r}")


# ---------------------------------------------------------------------------
# CLL proof of G |- D  ->  weakening-free proof of tl[G] |- tr[D]


def _principal(p: Proof):
    side = p.conclusion.ante if p.rule.side == "L" else p.conclusion.succ
    return side[p.principal[0]]


def _transform(p: Proof) -> Proof:
    rule = p.rule
    if rule is R.CUT:
        raise UnsupportedCut("proof transformation needs a cut-free proof")
    if rule is R.ID:
        return build_tl_tr_proof(p.conclusion.ante[0])
    s = translate_sequent(p.conclusion)
    if rule is R.ONE_R:
        return d.one_r()
    if rule is R.BOT_L:
        return d.bot_l()
    f = _principal(p)
    if rule is R.TOP_R:
        return d.top_r(s.ante, msub(s.succ, (f,)))
    if rule is R.ZERO_L:
        return d.zero_l(msub(s.ante, (f,)), s.succ)

    subs = [_transform(q) for q in p.premises]
    if rule is R.BANG_W:
        # weakening is simulated through the unit guarding tl(!A) = !(tl(A) & 1)
        a = tl(f.sub)
        step = d.one_l(subs[0])
        step = d.with_l(step, 1, a, ONE)
        return d.bang_l(step, With(a, ONE))
    if rule is R.QUEST_W:
        a = tr(f.sub)
        step = d.bot_r(subs[0])
        step = d.plus_r(step, 1, a, BOT)
        return d.quest_r(step, Plus(a, BOT))
    if rule is R.BANG_L:
        a = tl(f.sub)
        step = d.with_l(subs[0], 0, a, ONE)
        return d.bang_l(step, With(a, ONE))
    if rule is R.QUEST_R:
        a = tr(f.sub)
        step = d.plus_r(subs[0], 0, a, BOT)
        return d.quest_r(step, Plus(a, BOT))
    if rule is R.BANG_C:
        return d.bang_c(subs[0], With(tl(f.sub), ONE))
    if rule is R.QUEST_C:
        return d.quest_c(subs[0], Plus(tr(f.sub), BOT))
    if rule is R.BANG_R:
        return d.bang_r(subs[0], tr(f.sub))
    if rule is R.QUEST_L:
        return d.quest_l(subs[0], tl(f.sub))
    if rule is R.NEG_R:
        return d.neg_r(subs[0], tl(f.sub))
    if rule is R.NEG_L:
        return d.neg_l(subs[0], tr(f.sub))
    if rule is R.BOT_R:
        return d.bot_r(subs[0])
    if rule is R.ONE_L:
        return d.one_l(subs[0])
    b, c = f.left, f.right
    if rule is R.TENSOR_R:
        return d.tensor_r(subs[0], subs[1], tr(b), tr(c))
    if rule is R.TENSOR_L:
        return d.tensor_l(subs[0], tl(b), tl(c))
    if rule is R.PAR_R:
        return d.par_r(subs[0], tr(b), tr(c))
    if rule is R.PAR_L:
        return d.par_l(subs[0], subs[1], tl(b), tl(c))
    if rule is R.WITH_R:
        return d.with_r(subs[0], subs[1], tr(b), tr(c))
    if rule in (R.WITH_L0, R.WITH_L1):
        return d.with_l(subs[0], rule.index, tl(b), tl(c))
    if rule in (R.PLUS_R0, R.PLUS_R1):
        return d.plus_r(subs[0], rule.index, tr(b), tr(c))
    if rule is R.PLUS_L:
        return d.plus_l(subs[0], subs[1], tl(b), tl(c))
    if rule is R.LOLLI_R:
        return d.lolli_r(subs[0], tl(b), tr(c))
    if rule is R.LOLLI_L:
        return d.lolli_l(subs[0], subs[1], tr(b), tl(c))
    raise TranslationError(f"unhandled rule {rule}")  # pragma: no cover


def _source_and_target(p: Proof, source: SystemConfig | None):
    if source is None:
        source = ILL if check_proof(p, ILL).ok else CLL
    target = ILLR if not source.classical else CLLR
    return source, target


def transform_cll_to_cllr(p: Proof, source: SystemConfig | None = None) -> Proof:
    """Rewrite a cut-free proof of ``G |- D`` into a weakening-free proof of ``tl[G] |- tr[D]``.

    ``source`` defaults to ILL when the proof is intuitionistic, else CLL; the
    result then lives in ILLR or CLLR respectively.
    """
    source, target = _source_and_target(p, source)
    report = check_proof(p, source)
    if not report.ok:
        raise NotCLLProof(f"input does not check under {source.name}: {report.describe()}")
    out = _transform(p)
    want = translate_sequent(p.conclusion)
    if out.conclusion != want:  # pragma: no cover - guarded by construction
        raise TranslationError("transformed proof has the wrong root")
    report = check_proof(out, target)
    if not report.ok:  # pragma: no cover
        raise TranslationError(f"transformed proof fails under {target.name}: {report.describe()}")
    return out


# ---------------------------------------------------------------------------
# A |- tl(A) and tr(A) |- A in CLL


@lru_cache(maxsize=None)
def build_expansion_proofs(a) -> tuple[Proof, Proof]:
    if isinstance(a, (Atom,) + _UNITS):
        return d.identity(a), d.identity(a)
    if isinstance(a, Neg):
        b = a.sub
        into_b, from_b = build_expansion_proofs(b)
        # ~B |- ~tr(B), from tr(B) |- B
        left = d.neg_r(d.neg_l(from_b, b), tr(b))
        # ~tl(B) |- ~B, from B |- tl(B)
        right = d.neg_r(d.neg_l(into_b, tl(b)), b)
        return left, right
    if isinstance(a, Bang):
        b = a.sub
        into_b, from_b = build_expansion_proofs(b)
        keep = d.bang_l(into_b, b)                          # !B |- tl(B)
        drop = d.bang_w(d.one_r(), b)                       # !B |- 1
        left = d.bang_r(d.with_r(keep, drop, tl(b), ONE), With(tl(b), ONE))
        right = d.bang_r(d.bang_l(from_b, tr(b)), b)        # !tr(B) |- !B
        return left, right
    if isinstance(a, Quest):
        b = a.sub
        into_b, from_b = build_expansion_proofs(b)
        left = d.quest_l(d.quest_r(into_b, tl(b)), b)       # ?B |- ?tl(B)
        use = d.quest_r(from_b, b)                          # tr(B) |- ?B
        drop = d.quest_w(d.bot_l(), b)                      # bot |- ?B
        right = d.quest_l(d.plus_l(use, drop, tr(b), BOT), Plus(tr(b), BOT))
        return left, right
    b, c = a.left, a.right
    into_b, from_b = build_expansion_proofs(b)
    into_c, from_c = build_expansion_proofs(c)
    if isinstance(a, Tensor):
        left = d.tensor_l(d.tensor_r(into_b, into_c, tl(b), tl(c)), b, c)
        right = d.tensor_l(d.tensor_r(from_b, from_c, b, c), tr(b), tr(c))
        return left, right
    if isinstance(a, Par):
        left = d.par_r(d.par_l(into_b, into_c, b, c), tl(b), tl(c))
        right = d.par_r(d.par_l(from_b, from_c, tr(b), tr(c)), b, c)
        return left, right
    if isinstance(a, With):
        left = d.with_r(d.with_l(into_b, 0, b, c), d.with_l(into_c, 1, b, c), tl(b), tl(c))
        right = d.with_r(d.with_l(from_b, 0, tr(b), tr(c)), d.with_l(from_c, 1, tr(b), tr(c)), b, c)
        return left, right
    if isinstance(a, Plus):
        left = d.plus_l(d.plus_r(into_b, 0, tl(b), tl(c)), d.plus_r(into_c, 1, tl(b), tl(c)), b, c)
        right = d.plus_l(d.plus_r(from_b, 0, b, c), d.plus_r(from_c, 1, b, c), tr(b), tr(c))
        return left, right
    if isinstance(a, Lolli):
        # B -o C |- tr(B) -o tl(C)
        left = d.lolli_r(d.lolli_l(from_b, into_c, b, c), tr(b), tl(c))
        # tl(B) -o tr(C) |- B -o C
        right = d.lolli_r(d.lolli_l(into_b, from_c, tl(b), tr(c)), b, c)
        return left, right
    raise TranslationError(f"cannot build expansion proofs for {a!r}")


# ---------------------------------------------------------------------------
# weakening-free proof of tl[G] |- tr[D]  ->  CLL proof of G |- D


def reduce_back_to_cll(p: Proof, gamma, delta) -> Proof:
    """Cut ``p`` against the expansion proofs of each member of ``gamma`` and ``delta``."""
    target = Sequent(tuple(gamma), tuple(delta))
    if p.conclusion != translate_sequent(target):
        raise RootMismatch(f"expected root {translate_sequent(target)}, got {p.conclusion}")
    out = p
    for a in target.ante:
        into_a, _ = build_expansion_proofs(a)
        out = d.cut(into_a, out, tl(a))
    for b in target.succ:
        _, from_b = build_expansion_proofs(b)
        out = d.cut(out, from_b, tr(b))
    return out


def round_trip_check(s: Sequent, proof: Proof | None = None, budget=None) -> bool:
    """Run both transformers on a proof of ``s`` and kernel-check each result.

    Without ``proof`` one is searched for under CLL (or ILL for
    single-succedent intuitionistic sequents); returns False if none is found.
    """
    from .search import SearchBudget, prove, Proved
    intuitionistic = len(s.succ) == 1 and all(admits(LanguageId.LI, f) for f in s.formulas())
    source = ILL if intuitionistic else CLL
    if proof is None:
        result = prove(s, source, budget or SearchBudget())
        if not isinstance(result, Proved):
            return False
        proof = result.proof
    source, target = _source_and_target(proof, None)
    if proof.conclusion != s or not check_proof(proof, source).ok:
        return False
    forward = transform_cll_to_cllr(proof, source)
    if forward.conclusion != translate_sequent(s) or not check_proof(forward, target).ok:
        return False
    back = reduce_back_to_cll(forward, s.ante, s.succ)
    return back.conclusion == s and check_proof(back, source).ok
