import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

import gen  # noqa: E402
from treelogic.logic.algebra import LAWS, PatternMismatch, law, rewrite, substitute  # noqa: E402
from treelogic.logic.check import check_finite  # noqa: E402
from treelogic.logic.formula import AG, AN, AU, EG, EN, EU, And, Or, Top  # noqa: E402

P, Q, R = gen.obs_is(0), gen.obs_is(1), gen.obs_in({1, 2})


def test_ag_unfold():
    assert rewrite(AG(P), "AG-unfold") == AN(P, AG(P))
    assert rewrite(AN(P, AG(P)), "AG-unfold", "backward") == AG(P)


def test_au_unfold():
    assert rewrite(AU(P, Q), "AU-unfold") == Or(Q, AN(P, AU(P, Q)))


def test_au_unfold_accepts_suffix_goal():
    assert rewrite(AU(P, Top), "AU-unfold") == Or(Top, AN(P, AU(P, Top)))


def test_an_weaken_is_one_way():
    assert rewrite(AN(P, Q), "AN-weaken") == EN(P, Q)
    assert law("AN-weaken").one_way
    with pytest.raises(PatternMismatch):
        rewrite(EN(P, Q), "AN-weaken", "backward")


def test_ag_and_splits():
    assert rewrite(AG(And(P, Q)), "AG-and") == And(AG(P), AG(Q))


def test_mismatch():
    with pytest.raises(PatternMismatch):
        rewrite(EG(P), "AG-unfold")
    with pytest.raises(PatternMismatch):
        # the same pattern variable must bind equal formulas
        rewrite(Or(Q, AN(P, AU(R, Q))), "AU-unfold", "backward")
    with pytest.raises(KeyError):
        law("AG-nonsense")
    with pytest.raises(ValueError):
        rewrite(AG(P), "AG-unfold", "sideways")


def test_every_law_rewrites_its_own_left_side():
    rng = gen.rng_for(50)
    for lw in LAWS:
        env_f = {m: gen.random_prefix(rng, 2) for m in lw.metavars}
        lhs, rhs = substitute(lw.lhs, env_f), substitute(lw.rhs, env_f)
        assert rewrite(lhs, lw) == rhs


def test_rewrites_preserve_truth_on_random_graphs():
    rng = gen.rng_for(51)
    for _ in range(100):
        g = gen.random_graph(rng, max_states=30)
        a, b = gen.random_prefix(rng, 2), gen.random_prefix(rng, 2)
        for f in (AG(a), AU(a, b), EU(a, b), EG(a), AG(And(a, b))):
            for lw in LAWS:
                try:
                    g2 = rewrite(f, lw)
                except PatternMismatch:
                    continue
                x, y = check_finite(g, f).truth, check_finite(g, g2).truth
                if lw.equivalence:
                    assert x == y, lw.name
                else:
                    assert all(v for u, v in zip(x, y) if u), lw.name


def test_false_equivalence_would_be_caught():
    # AG distributes over And but not over Or: the oracle must notice
    rng = gen.rng_for(52)
    found = False
    for _ in range(300):
        g = gen.random_graph(rng, max_states=20)
        a, b = rng.choice(gen.PREFIX_ATOMS), rng.choice(gen.PREFIX_ATOMS)
        if check_finite(g, AG(Or(a, b))).truth != check_finite(g, Or(AG(a), AG(b))).truth:
            found = True
            break
    assert found
