import json
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from treelogic import scenarios  # noqa: E402
from treelogic.instrument import Log, log  # noqa: E402
from treelogic.kripke import Obs, Pure, not_done  # noqa: E402
from treelogic.logic.check import check  # noqa: E402
from treelogic.logic.formula import AF, AG, AU, Done, Top, done, logged, top  # noqa: E402
from treelogic.rules import (Certificate, DomainIncomplete, LoopSpace, PremiseFailed,  # noqa: E402
                             apply_bind_au_l, apply_bind_au_l_eq, apply_bind_l, apply_iter_ag,
                             apply_iter_au_l, apply_iter_au_r, apply_split_au)
from treelogic.tree import Cont, bind, branch, ret, then  # noqa: E402
from treelogic.values import Inl, Inr  # noqa: E402

PRINTS = "hello"
printed = logged(lambda o: o == PRINTS, "obs(value == hello)")


def _print_after(x):
    return then(log(PRINTS), ret(x))


def _ignore(x):
    return ret(x)


# ---------------------------------------------------------------- bind

def test_bind_l_when_t_prints():
    cert = apply_bind_l(log(PRINTS), Cont(_ignore), Pure, AF(printed))
    assert cert.ok and cert.rule == "BindL" and cert.oracle == "holds"


def test_bind_l_fails_when_t_is_silent():
    with pytest.raises(PremiseFailed) as e:
        apply_bind_l(ret(0), Cont(_print_after), Pure, AF(printed))
    assert e.value.certificate.premises[0].verdict == "fails"


def test_bind_au_l_when_continuation_prints():
    t = branch(3)
    cert = apply_bind_au_l(t, Cont(_print_after), Pure, AF(printed), Top)
    assert cert.ok and cert.oracle == "holds"
    assert [p.instances for p in cert.premises] == [1, 3]


def test_bind_au_l_postcondition_must_be_reached():
    small = done(lambda x, w: x < 2, "val(value < 2)")
    with pytest.raises(PremiseFailed) as e:
        apply_bind_au_l(branch(3), Cont(_print_after), Pure, AF(printed), small)
    assert e.value.premise is e.value.certificate.premises[0]


def _quiet_unless_one(x):
    return _print_after(x) if x == 1 else ret(x)


def test_bind_au_l_checks_every_continuation():
    with pytest.raises(PremiseFailed) as e:
        apply_bind_au_l(branch(2), Cont(_quiet_unless_one), Pure, AF(printed), Top)
    assert e.value.premise.witness == repr((0, Pure))


def test_bind_au_l_eq():
    cert = apply_bind_au_l_eq(ret(7), Cont(_print_after), Pure, AF(printed))
    assert cert.ok and cert.rule == "BindAU_L="
    with pytest.raises(PremiseFailed):
        apply_bind_au_l_eq(branch(2), Cont(_print_after), Pure, AF(printed))


def test_bind_au_l_needs_until_goal():
    with pytest.raises(ValueError):
        apply_bind_au_l(ret(1), Cont(_print_after), Pure, AG(printed), Top)


# --------------------------------------------------------------- loops

def _count_down(i):
    return then(log(i), ret(Inr(i) if i == 0 else Inl(i - 1)))


def _stall(i):
    return then(log(i), ret(Inr(i) if i == 0 else Inl(i)))


def _forever(i):
    return then(log(i), ret(Inl((i + 1) % 3)))


def _exit_now(i):
    return then(log(i), ret(Inr(i)))


def natural(i, w):
    return i >= 0


def rank(i, w):
    return i


ended_at_zero = done(lambda x, w: x == 0, "finish(value == 0)")


def test_iter_au_r_terminates():
    cert = apply_iter_au_r(Cont(_count_down), 5, Pure, top, ended_at_zero, natural, rank)
    assert cert.ok and cert.oracle == "holds"
    assert cert.premises[1].instances == 6


def test_iter_au_r_immediate_exit():
    cert = apply_iter_au_r(Cont(_exit_now), 0, Pure, top, ended_at_zero, natural, rank)
    assert cert.ok and cert.premises[1].instances == 1


def test_iter_au_r_non_decreasing_ranking():
    with pytest.raises(PremiseFailed) as e:
        apply_iter_au_r(Cont(_stall), 5, Pure, top, ended_at_zero, natural, rank)
    assert e.value.premise.witness is not None


def test_iter_au_r_needs_suffix_goal():
    with pytest.raises(ValueError):
        apply_iter_au_r(Cont(_count_down), 2, Pure, top, top, natural, rank)


def test_iter_ag_invariance():
    seen = logged(lambda o: o in (0, 1, 2), "obs(value < 3)")
    start = Obs(Log(0))
    cert = apply_iter_ag(Cont(_forever), 0, start, seen, lambda i, w: 0 <= i < 3)
    # heads are (i, world) pairs: i = 0 is met first in the start world, later after logging 2
    assert cert.ok and cert.oracle == "holds" and cert.premises[1].instances == 4


def test_iter_ag_rejects_exiting_body():
    with pytest.raises(PremiseFailed) as e:
        apply_iter_ag(Cont(_count_down), 2, Pure, top, natural)
    assert "step(i)" in e.value.premise.description


def test_iter_ag_initial_invariant():
    with pytest.raises(PremiseFailed) as e:
        apply_iter_ag(Cont(_forever), 0, Pure, top, lambda i, w: i > 0)
    assert e.value.premise.description == "R holds initially"


def test_iter_au_l_eventually():
    two = logged(lambda o: o == 2, "obs(value == 2)")
    cert = apply_iter_au_l(Cont(_forever), 0, Pure, top, two, lambda i, w: 0 <= i <= 2,
                           lambda i, w: (2 - i) % 3)
    assert cert.ok and cert.oracle == "holds"
    assert sum(cert.premises[1].fired.values()) == cert.premises[1].instances


def test_split_with_r_i_equal_to_r_matches_iter_au_l():
    two = logged(lambda o: o == 2, "obs(value == 2)")
    R = lambda i, w: 0 <= i <= 2  # noqa: E731
    f = lambda i, w: (2 - i) % 3  # noqa: E731
    a = apply_iter_au_l(Cont(_forever), 0, Pure, top, two, R, f)
    b = apply_split_au(Cont(_forever), 0, Pure, top, two, R, R, f)
    assert a.ok and b.ok and a.oracle == b.oracle == "holds"


def test_split_au_fails_without_progress():
    never = logged(lambda o: o == 7, "obs(value == 7)")
    with pytest.raises(PremiseFailed):
        apply_split_au(Cont(_forever), 0, Pure, top, never, lambda i, w: True,
                       lambda i, w: False, lambda i, w: 0)


def test_election_split_has_two_phases():
    b = scenarios.build("election", n=3)
    cert = b.prove("split-au")
    assert cert.ok and cert.rule == "BindAU_L"
    inner = cert.premises[1].subproofs
    assert len(inner) == 3 and all(c.rule == "SplitAU_L" for c in inner)
    assert all(len(c.premises) == 3 for c in inner)


# ------------------------------------------------------------ domains

def test_user_domain_must_cover_reachable_states():
    R = lambda i, w: 0 <= i < 3  # noqa: E731
    with pytest.raises(DomainIncomplete) as e:
        apply_iter_ag(Cont(_forever), 0, Pure, top, R, domain=[(0, Pure)])
    assert e.value.state[0] == 1


def test_removing_any_domain_state_is_detected():
    b = scenarios.build("rr", q=(1, 2, 3), target=2)
    ri = b.rule_inputs
    space = LoopSpace(ri["step"])
    full = space.closure(ri["i0"], b.world, ri["R"])
    cert = apply_iter_ag(ri["step"], ri["i0"], b.world, b.goal.body, ri["R"], domain=full)
    assert cert.ok
    for k in range(len(full)):
        with pytest.raises(DomainIncomplete):
            apply_iter_ag(ri["step"], ri["i0"], b.world, b.goal.body, ri["R"],
                          domain=full[:k] + full[k + 1:])


def test_weakened_premises_are_detected():
    b = scenarios.build("rr", q=(1, 2, 3), target=2)
    ri = b.rule_inputs
    # invariant without the target: some R-state can no longer see it
    with pytest.raises(PremiseFailed):
        apply_iter_au_l(ri["step"], ri["i0"], b.world, top, b.formulas["eventually"],
                        lambda i, w: not_done(w), lambda i, w: 0)
    # constant ranking: no state can decrease
    with pytest.raises(PremiseFailed):
        apply_iter_au_l(ri["step"], ri["i0"], b.world, top, b.formulas["eventually"],
                        ri["R"], lambda i, w: 0)


# --------------------------------------------------------- certificates

def test_certificate_json_shape():
    b = scenarios.build("rr", q=(1, 2), target=2)
    out = b.prove("iter-ag").to_json()
    json.dumps(out)
    assert set(out) == {"rule", "goal", "premises", "conclusion", "oracle"}
    assert all({"description", "verdict", "instances"} <= set(p) for p in out["premises"])
    assert out["conclusion"] == out["goal"]


def test_failed_certificate_has_no_conclusion():
    cert = Certificate("X", "goal")
    assert not cert.ok and cert.to_json()["conclusion"] is None


def test_certificates_agree_with_direct_check():
    for sid, params in [("rr", {"q": (2, 1)}), ("secure-mem", {"bound": 4}),
                        ("election", {"n": 2})]:
        b = scenarios.build(sid, **params)
        for rule in b.provers:
            cert = b.prove(rule)
            goal = b.goal if rule != "iter-au-l" else AF(b.formulas["eventually"])
            assert cert.ok == check(b.tree, b.world, goal).holds


def test_bind_then_au_goal():
    assert isinstance(AU(top, Done(lambda x, w: True)), AU)
    t = bind(branch(2), Cont(_print_after))
    assert check(t, Pure, AF(printed)).holds
