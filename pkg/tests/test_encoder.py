import pytest

from linlog import derive as d
from linlog.encoder import (
    A, A_GUARD, B, NotAcceptedWithinBudget, certify_acceptance, compile_run_to_proof,
    encode_theta, g, goal, select_component, state_atom,
)
from linlog.errors import NotAccepted, UnknownLabel, UnknownState
from linlog.kernel import CLL, CLLR, CLLRR, RuleId as R, check_proof
from linlog.machine import (
    CounterMachine, Dec, Inc, MachineID as M, loop_machine, run, subtraction_machine,
)
from linlog.syntax import LanguageId, Sequent, admits, parse_formula as F, subformulas

# proof nodes <= K * (run length + p + q + 1) * |components|
SIZE_FACTOR = 4


def test_components_follow_transitions():
    m = CounterMachine("st", {"s1": Inc("A", "s2"), "s2": Dec("A", "s1", "st")})
    enc = encode_theta(m)
    assert enc.component("s1.inc") == F("c_s1 -o c_s2 * a")
    assert enc.component("s2.dec") == F("c_s2 * a -o c_s1")
    assert enc.component("s2.zero") == F("c_s2 -o c_st + (a' & c_st)")
    assert enc.component("guardA.b") == F("(a' & c_st) * b -o a' & c_st")
    assert enc.component("guardB.a") == F("(b' & c_st) * a -o b' & c_st")
    assert len(enc.components) == 3 + 4
    with pytest.raises(UnknownLabel):
        enc.component("s9.inc")


def test_theta_is_left_chain_in_reduced_language():
    enc = encode_theta(subtraction_machine())
    f = enc.theta
    for _, comp in reversed(enc.components[1:]):
        assert f.right == comp
        f = f.left
    assert f == enc.components[0][1]
    assert admits(LanguageId.Lminus, enc.bang_theta)
    assert {a.name for a in subformulas(enc.theta) if hasattr(a, "name")} >= {"a", "b", "a'", "b'", "c_st"}


def test_props_mapping():
    enc = encode_theta(loop_machine())
    assert enc.props["s1"] == state_atom("s1")
    assert enc.props["counterA"] == A and enc.props["counterB"] == B
    assert enc.props["guardA"] == A_GUARD
    assert enc.terminal_atom == F("c_st")


def test_goal_examples():
    m = loop_machine()
    enc = encode_theta(m)
    assert goal(enc, M("st", 0, 0)) == Sequent((F("c_st"),), (F("c_st"),))
    assert goal(enc, M("s1", 2, 1)) == Sequent((enc.bang_theta, F("c_s1"), A, A, B), (F("c_st"),))
    assert goal(enc, M("st", 1, 0)) == Sequent((F("c_st"), A), (F("c_st"),))
    assert g(m, "st") == 0 and g(m, "s1") == 1
    with pytest.raises(UnknownState):
        goal(enc, M("nowhere", 0, 0))


def test_select_component_shapes():
    enc = encode_theta(subtraction_machine())
    k = len(enc.components)
    last = select_component(enc, enc.components[-1][0])
    assert last.rules == ("with_l1",)
    first = select_component(enc, enc.components[0][0])
    assert first.rules == ("with_l0",) * (k - 1)


def test_every_fragment_checks_when_grafted():
    for m in (loop_machine(), subtraction_machine()):
        enc = encode_theta(m)
        for label, comp in enc.components:
            pf = select_component(enc, label).graft(d.identity(comp))
            assert pf.conclusion == Sequent((enc.theta,), (comp,))
            assert check_proof(pf, CLLRR).ok


def test_compile_base_case():
    enc = encode_theta(loop_machine())
    pf = compile_run_to_proof(enc, run(loop_machine(), M("st", 0, 0), 0))
    assert pf.rule is R.ID and pf.conclusion == goal(enc, M("st", 0, 0))


@pytest.mark.parametrize("start", [M("s1", 1, 0), M("s1", 0, 0), M("s1", 3, 0)])
def test_compile_loop_runs(start):
    m = loop_machine()
    enc = encode_theta(m)
    pf = compile_run_to_proof(enc, run(m, start, 100))
    assert pf.conclusion == goal(enc, start)
    assert check_proof(pf, CLLRR).ok


def test_zero_test_uses_exhaust_guard():
    m = loop_machine()
    pf = compile_run_to_proof(encode_theta(m), run(m, M("s1", 0, 0), 10))
    assert R.PLUS_L in pf.rules_used()
    assert R.BANG_W not in pf.rules_used()


def test_compile_rejects_unaccepted_run():
    m = loop_machine()
    with pytest.raises(NotAccepted):
        compile_run_to_proof(encode_theta(m), run(m, M("s1", 0, 1), 10))


def test_certify_examples():
    m = loop_machine()
    pf = certify_acceptance(m, M("s1", 3, 0), 100)
    assert check_proof(pf, CLLRR).ok
    out = certify_acceptance(m, M("s1", 0, 1), 100)
    assert isinstance(out, NotAcceptedWithinBudget) and not out.exhausted
    out = certify_acceptance(m, M("s1", 5, 0), 2)
    assert isinstance(out, NotAcceptedWithinBudget) and out.exhausted
    base = certify_acceptance(m, M("st", 0, 0), 0)
    assert base.conclusion == Sequent((F("c_st"),), (F("c_st"),))


def test_subtraction_certificates_and_size_bound():
    m = subtraction_machine()
    enc = encode_theta(m)
    n_comp = len(enc.components)
    for p in range(6):
        for q in range(p, 6):
            start = M("s1", p, q)
            r = run(m, start, 1000)
            pf = certify_acceptance(m, start, 1000, enc)
            assert pf.conclusion == goal(enc, start)
            assert pf.size() <= SIZE_FACTOR * (len(r) + p + q + 1) * n_comp
            # the weaker systems accept it too
            assert check_proof(pf, CLLR).ok and check_proof(pf, CLL).ok


def test_inc_machine_certifies():
    m = CounterMachine("st", {"s1": Inc("B", "s2"), "s2": Dec("B", "s3", "st"), "s3": Dec("A", "s3", "st")})
    for p in range(4):
        pf = certify_acceptance(m, M("s1", p, 0), 100)
        assert check_proof(pf, CLLRR).ok
