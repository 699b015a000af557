import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

import gen  # noqa: E402
from treelogic.kripke import Pure, TauBudgetExceeded, successors  # noqa: E402
from treelogic.scenarios.queue import POP  # noqa: E402
from treelogic.tree import (STUCK, Br, Cont, Distinguished, Equivalent, Ret, Tau, Unknown, Vis,  # noqa: E402
                            ZeroArity, bind, bisim_upto_tau, branch, choice, iterate, ret,
                            stuck, tau, trigger, vis)
from treelogic.values import Inl, Inr  # noqa: E402


def equiv(a, b):
    return isinstance(bisim_upto_tau(a, b), Equivalent)


def test_ret_is_a_leaf():
    n = ret(3).node
    assert isinstance(n, Ret) and n.value == 3


def test_bind_ret_applies_continuation():
    assert equiv(bind(ret(1), lambda x: ret(x + 1)), ret(2))
    assert not equiv(bind(ret(1), lambda x: ret(x + 1)), ret(1))


def test_bind_right_identity_on_random_trees():
    rng = gen.rng_for(10)
    for _ in range(200):
        t = gen.random_tree(rng)
        assert equiv(bind(t, ret), t)


def test_bind_stuck_is_stuck():
    assert bind(stuck(), lambda x: ret(x)).node is STUCK
    assert equiv(bind(stuck(), ret), stuck())


def test_iter_immediate_exit():
    t = iterate(lambda i: ret(Inr(i)), 7)
    assert equiv(t, ret(7))


def test_iter_counts_down():
    def step(i):
        return ret(Inr("done") if i == 0 else Inl(i - 1))
    t = iterate(step, 2)
    assert equiv(t, ret("done"))
    # each continuing iteration inserts one guarding silent step
    node, taus = t.node, 0
    while isinstance(node, Tau):
        taus += 1
        node = node.child.node
    assert taus == 2 and node.value == "done"


def test_iter_silent_loop_exceeds_tau_budget():
    t = iterate(lambda i: ret(Inl(i)), 0)
    with pytest.raises(TauBudgetExceeded):
        successors(t, Pure, 64)


def test_trigger_is_vis_with_ret_continuation():
    n = trigger(POP).node
    assert isinstance(n, Vis) and n.event == POP
    assert n.child(5).node.value == 5


def test_bind_trigger_is_vis_with_continuation():
    e = gen.Ask("a")
    k = Cont(lambda x: ret(x * 10))
    assert equiv(bind(trigger(e), k), vis(e, k))


def test_branch_and_choice():
    n = branch(3).node
    assert isinstance(n, Br) and n.arity == 3
    assert [n.child(i).node.value for i in range(3)] == [0, 1, 2]
    c = choice(ret("H"), ret("T")).node
    assert c.arity == 2 and c.child(0).node.value == "H" and c.child(1).node.value == "T"


def test_zero_arity_rejected():
    with pytest.raises(ZeroArity):
        branch(0)


def test_bisim_examples():
    assert isinstance(bisim_upto_tau(tau(ret(5)), ret(5)), Equivalent)
    d = bisim_upto_tau(ret(1), ret(2))
    assert isinstance(d, Distinguished) and d.witness
    assert isinstance(bisim_upto_tau(stuck(), ret(0)), Distinguished)


def test_bisim_reports_unknown_on_exhaustion():
    deep = ret(0)
    for _ in range(5):
        deep = vis(gen.Beep("a"), Cont(lambda d, _: d, deep))
    assert isinstance(bisim_upto_tau(deep, deep, fuel=2), Unknown)
    assert isinstance(bisim_upto_tau(tau(tau(ret(1))), ret(1), tau_budget=1), Unknown)


def test_bisim_rejects_negative_budgets():
    with pytest.raises(ValueError):
        bisim_upto_tau(ret(1), ret(1), fuel=-1)


def test_bisim_distinguishes_branch_arity_and_events():
    assert not equiv(branch(2), branch(3))
    assert not equiv(trigger(gen.Beep("a")), trigger(gen.Beep("b")))


def test_bind_congruence_under_tau_perturbation():
    rng = gen.rng_for(11)
    for _ in range(100):
        t = gen.random_tree(rng)
        k = gen.random_cont(rng)
        assert equiv(bind(t, k), bind(gen.perturb(rng, t), k))


def _double(x):
    return ret(2 * x)


def test_trees_are_memoized_and_keyed():
    t = bind(branch(2), Cont(_double))
    assert t.node is t.node
    assert t.key is not None and t.key == bind(branch(2), Cont(_double)).key
    assert t.key != bind(branch(3), Cont(_double)).key
    assert ret(1).key != ret(True).key
    assert ret(None).key is not None
