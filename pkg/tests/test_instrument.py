import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

import gen  # noqa: E402
from treelogic.instrument import Log, UnhandledEvent, instrument, instrumented_step, log  # noqa: E402
from treelogic.kripke import Finish, Obs, Pure, successors  # noqa: E402
from treelogic.logic.graph import explore  # noqa: E402
from treelogic.scenarios.queue import POP, Push, queue_handler  # noqa: E402
from treelogic.tree import (STUCK, Cont, Equivalent, bind, bisim_upto_tau, branch, iterate,  # noqa: E402
                            ret, stuck, tau, then, trigger)
from treelogic.values import Inl, Inr  # noqa: E402


def equiv(a, b):
    return isinstance(bisim_upto_tau(a, b), Equivalent)


def counting_handler(e, n):
    """Answers Ask with the parity of the counter; every event is logged and counted."""
    if isinstance(e, gen.Beep):
        return then(log((e.name, n)), ret((None, n + 1)))
    if isinstance(e, gen.Ask):
        return then(log((e.name, n)), ret((n % 2, n + 1)))
    raise UnhandledEvent(e)


def test_instrument_ret():
    assert equiv(instrument(queue_handler, ret(4), (1,)), ret((4, (1,))))


def test_pop_logs_head_then_returns_rest():
    t = instrument(queue_handler, trigger(POP), (7, 9))
    [(t1, w1)] = successors(t, Pure)
    assert w1 == Obs(Log(7), None)
    [(_, w2)] = successors(t1, w1)
    assert w2 == Finish(Log(7), None, (7, (9,)))


def test_pop_on_empty_queue_is_stuck():
    t = instrument(queue_handler, trigger(POP), ())
    assert equiv(t, stuck())
    assert successors(t, Pure) == []


def test_push_is_silent():
    t = instrument(queue_handler, trigger(Push(3)), (1,))
    assert equiv(t, ret((None, (1, 3))))


def test_unhandled_event():
    t = instrument(queue_handler, trigger(gen.Beep("a")), ())
    with pytest.raises(UnhandledEvent):
        t.node


def test_log_successor():
    [(t, w)] = successors(log(5), Pure)
    assert w == Obs(Log(5), None) and t.node.value is None


def test_log_then_ret_finishes_in_two_steps():
    t = bind(log(5), lambda _: ret(1))
    [(t1, w1)] = successors(t, Pure)
    [(t2, w2)] = successors(t1, w1)
    assert w2 == Finish(Log(5), None, 1) and t2.node is STUCK


def test_no_events_means_no_logs():
    rng = gen.rng_for(30)
    for _ in range(50):
        t = gen.random_tree(rng)
        if _has_events(t):
            continue
        g = explore(instrument(counting_handler, t, 0), Pure)
        assert all(not isinstance(st.world, Obs) for st in g.states)


def _has_events(t):
    g = explore(t, Pure)
    return any(isinstance(st.world, Obs) for st in g.states)


def test_instrumented_worlds_are_log_observations():
    rng = gen.rng_for(31)
    for _ in range(100):
        g = explore(instrument(counting_handler, gen.random_tree(rng), 0), Pure)
        for st in g.states:
            w = st.world
            if isinstance(w, (Obs, Finish)):
                assert isinstance(w.event, Log) and w.response is None


def _instr_k(k, xs):
    x, s = xs
    return instrument(counting_handler, k(x), s)


def test_instrument_commutes_with_bind():
    rng = gen.rng_for(32)
    for _ in range(200):
        t = gen.random_tree(rng, depth=5)
        k = gen.random_cont(rng)
        s = rng.randrange(3)
        lhs = instrument(counting_handler, bind(t, k), s)
        rhs = bind(instrument(counting_handler, t, s), Cont(_instr_k, k))
        assert equiv(lhs, rhs)


def _count_down(i):
    return then(trigger(gen.Beep("x")), ret(Inr(i) if i == 0 else Inl(i - 1)))


def test_instrumented_step_matches_instrumented_loop():
    for i0 in range(4):
        direct = instrument(counting_handler, iterate(Cont(_count_down), i0), 0)
        via_step = iterate(instrumented_step(counting_handler, Cont(_count_down)), (i0, 0))
        assert equiv(direct, via_step)


def test_branching_is_preserved():
    t = instrument(counting_handler, branch(3), 5)
    assert [s.tree.node.value for s in successors(t, Pure)] == [(0, 5), (1, 5), (2, 5)]


def test_handler_guard_inserts_tau():
    t = instrument(queue_handler, then(trigger(Push(1)), ret(0)), ())
    assert equiv(t, tau(ret((0, (1,)))))
