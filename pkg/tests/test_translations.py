import random

import pytest
from hypothesis import given, settings

from linlog import derive as d
from linlog.errors import LanguageViolation, NotCLLProof, RootMismatch, UnsupportedCut
from linlog.kernel import CLL, CLLR, ILL, ILLR, Proof, RuleId as R, check_proof
from linlog.search import Proved, SearchBudget, prove
from linlog.syntax import (
    BOT, ONE, TOP, ZERO, Atom, LanguageId, Lolli, Neg, Sequent, parse_formula as F,
    parse_sequent as S, subformulas,
)
from linlog.translations import (
    TranslationId, build_expansion_proofs, build_tl_tr_proof, reduce_back_to_cll,
    round_trip_check, ti, tl, tr, transform_cll_to_cllr, translate, translate_sequent,
)
from tests.formula_gen import formula_strategy, random_sequent

p, q = F("p"), F("q")


@pytest.mark.parametrize("which, src, out", [
    (TranslationId.TL, "!(c -o a)", "!((c -o a) & 1)"),
    (TranslationId.TL, "p", "p"),
    (TranslationId.TR, "?p", "?(p + bot)"),
    (TranslationId.TR, "!p", "!p"),
    (TranslationId.TL, "?p", "?p"),
    (TranslationId.TL, "!p -o q", "!p -o q"),
    (TranslationId.TR, "!p -o q", "!(p & 1) -o q"),
    (TranslationId.TL, "~?p", "~?(p + bot)"),
    (TranslationId.TI, "!p -o q", "!(p & 1) -o q"),
    (TranslationId.TI, "!!p", "!(!(p & 1) & 1)"),
])
def test_translation_examples(which, src, out):
    assert translate(F(src), which) == F(out)


def test_translate_rejects_foreign_formulas():
    with pytest.raises(LanguageViolation):
        translate(F("p | q"), TranslationId.TI)


def test_translate_sequent_sides():
    assert translate_sequent(S("!p |- ?q")) == S("!(p & 1) |- ?(q + bot)")


def test_units_and_atoms_fixed():
    for f in (Atom("p"), ONE, BOT, TOP, ZERO):
        for which in (TranslationId.TL, TranslationId.TR):
            assert translate(f, which) == f
        if f is not BOT:
            assert translate(f, TranslationId.TI) == f


@given(formula_strategy())
def test_duality(a):
    assert tl(Neg(a)) == Neg(tr(a))
    assert tr(Neg(a)) == Neg(tl(a))


@given(formula_strategy(LanguageId.LI))
def test_ti_agrees_with_tl_without_implication(a):
    # ti and tl coincide until a -o puts a ! in negative position
    if not any(isinstance(g, Lolli) for g in subformulas(a)):
        assert ti(a) == tl(a)


def test_identity_base_case():
    pf = build_tl_tr_proof(p)
    assert pf.rule is R.ID and pf.conclusion == S("p |- p")


def test_bang_case_shape():
    pf = build_tl_tr_proof(F("!p"))
    assert [pf.rule, pf.premises[0].rule, pf.premises[0].premises[0].rule] == [R.BANG_R, R.BANG_L, R.WITH_L0]
    assert pf.conclusion == S("!(p & 1) |- !p")


def test_mixed_formula_checks_under_cllr():
    pf = build_tl_tr_proof(F("(p + q) * ?r"))
    assert check_proof(pf, CLLR).ok


@given(formula_strategy())
def test_builder_checks_under_cllr(a):
    pf = build_tl_tr_proof(a)
    assert pf.conclusion == Sequent((tl(a),), (tr(a),))
    assert check_proof(pf, CLLR).ok


@given(formula_strategy())
def test_expansion_proofs_check_under_cll(a):
    into, out = build_expansion_proofs(a)
    assert into.conclusion.ante == (a,) and into.conclusion.succ == (tl(a),)
    assert out.conclusion.ante == (tr(a),) and out.conclusion.succ == (a,)
    assert check_proof(into, CLL).ok and check_proof(out, CLL).ok


def test_expansion_bang_shape():
    into, _ = build_expansion_proofs(F("!q"))
    assert into.rule is R.BANG_R and into.premises[0].rule is R.WITH_R
    drop = into.premises[0].premises[1]
    assert drop.rule is R.BANG_W and drop.premises[0].rule is R.ONE_R


def test_transform_identity():
    assert transform_cll_to_cllr(d.identity(F("!p * q"))).conclusion == S("!(p & 1) * q |- !p * q")


def test_transform_weakening_block():
    pf = d.bang_w(d.one_r(), q)              # !q |- 1
    out = transform_cll_to_cllr(pf)
    assert out.conclusion == S("!(q & 1) |- 1")
    assert [out.rule, out.premises[0].rule, out.premises[0].premises[0].rule] == [R.BANG_L, R.WITH_L1, R.ONE_L]
    assert check_proof(out, CLLR).ok


def test_transform_question_weakening():
    pf = d.quest_w(d.identity(p), q)         # p |- p, ?q
    out = transform_cll_to_cllr(pf)
    assert out.conclusion == S("p |- p, ?(q + bot)")
    assert R.QUEST_W not in out.rules_used()
    assert check_proof(out, CLLR).ok


def test_transform_rejects_cut_and_bad_input():
    with pytest.raises(UnsupportedCut):
        transform_cll_to_cllr(d.cut(d.identity(p), d.identity(p), p))
    bad = Proof(R.ID, S("p |- q"))
    with pytest.raises(NotCLLProof):
        transform_cll_to_cllr(bad)


def test_reduce_back_root_mismatch():
    with pytest.raises(RootMismatch):
        reduce_back_to_cll(d.identity(p), [q], [q])


def test_reduce_back_recovers_sequent():
    pf = d.bang_w(d.one_r(), q)
    back = reduce_back_to_cll(transform_cll_to_cllr(pf), [F("!q")], [ONE])
    assert back.conclusion == S("!q |- 1")
    assert check_proof(back, CLL).ok


@pytest.mark.parametrize("text", ["p |- p", "!p |- 1", "|- 1", "!p |- p * p", "p |- p, ?q"])
def test_round_trip_examples(text):
    assert round_trip_check(S(text))


def test_round_trip_false_without_proof():
    assert not round_trip_check(S("p |- q"), budget=SearchBudget(max_depth=6))


def test_intuitionistic_pipeline():
    s = S("!p, q |- q")
    res = prove(s, ILL, SearchBudget())
    assert isinstance(res, Proved)
    out = transform_cll_to_cllr(res.proof, ILL)
    assert check_proof(out, ILLR).ok
    back = reduce_back_to_cll(out, s.ante, s.succ)
    assert check_proof(back, ILL).ok


def test_single_translation_loses_identity():
    # ti on both sides turns an ILL identity into a sequent ILLR cannot prove
    a = F("!p -o q")
    assert check_proof(d.identity(a), ILL).ok
    s = Sequent((ti(a),), (a,))
    res = prove(s, ILLR, SearchBudget(max_depth=12))
    assert not isinstance(res, Proved)


@settings(max_examples=40)
@given(formula_strategy(max_leaves=4))
def test_transform_then_reduce_on_identities(a):
    pf = d.identity(a)
    out = transform_cll_to_cllr(pf, CLL)
    assert check_proof(out, CLLR).ok
    back = reduce_back_to_cll(out, [a], [a])
    assert check_proof(back, CLL).ok


def test_round_trip_on_random_pool():
    rng = random.Random("translations-pool")
    proved = 0
    for _ in range(40):
        s = random_sequent(rng, 4)
        res = prove(s, CLL, SearchBudget(max_depth=14, max_nodes=5000))
        if isinstance(res, Proved):
            proved += 1
            assert round_trip_check(s, res.proof)
    assert proved > 0
