"""Smoke test for the pyrotaposet extension.

Build and install first:
    pip install --no-build-isolation -e crates/python
then run:
    python python/smoke_test.py
"""

from collections import Counter

import pyrotaposet as rp

EXAMPLE = """\
SM 4 4
m1: w1 w2 w3 w4
m2: w2 w4 w1 w3
m3: w3 w4 w2 w1
m4: w4 w2 w3 w1
w1: m2 m1 m3 m4
w2: m3 m1 m4 m2
w3: m4 m1 m2 m3
w4: m1 m3 m4 m2
"""


def check_example():
    inst = rp.Instance.parse(EXAMPLE)
    assert inst.n_men == 4 and inst.is_complete()
    assert inst.count_stable_matchings() == 4
    assert inst.rotations() == [[(0, 0), (1, 1)], [(2, 2), (3, 3)], [(0, 1), (2, 3)]]
    assert sorted(inst.rotation_edges()) == [(0, 1), (0, 2), (1, 2)]
    assert inst.man_optimal() == [0, 1, 2, 3]
    assert inst.woman_optimal() == [3, 0, 1, 2]
    assert inst.median() == [1, 0, 2, 3]
    assert inst.median(upper=True) == [1, 0, 3, 2]
    assert inst.sex_equal() == ([1, 0, 2, 3], (7, 10, 3, 10))
    assert inst.balanced()[1][3] == 10

    draws = inst.sample(seed=20240601, draws=4000)
    assert draws == inst.sample(seed=20240601, draws=4000)
    assert all(inst.is_stable(d) for d in draws)
    freq = Counter(tuple(d) for d in draws)
    assert len(freq) == 4 and all(abs(c - 1000) < 150 for c in freq.values())


def check_realizations():
    diamond = rp.Poset(4, [(0, 1), (0, 2), (1, 3), (2, 3)])
    assert diamond.count_downsets() == 6
    assert diamond.pathwidth() == 2
    for model in ["complete", "bounded3", "attr6", "list2inf", "range"]:
        inst = rp.realize_poset(diamond, model)
        assert rp.check_realization(diamond, inst), model
        again = rp.Instance.parse(inst.to_text())
        assert again.rotation_poset().count_downsets() == 6, model
        if again.is_complete():
            assert again.count_stable_matchings() == 6, model
    lists = rp.realize_poset(diamond, "bounded3")
    assert max(map(len, lists.men_lists() + lists.women_lists())) <= 3

    chain = rp.Poset.parse("DAG 60 59\n" + "".join(f"{i} {i + 1}\n" for i in range(1, 60)))
    decomposition = "PD 60\n" + "".join(f"{i} {i + 1}\n" for i in range(1, 60)) + "60\n"
    assert chain.count_downsets(decomposition) == 61


def check_errors():
    for bad in [lambda: rp.Instance.parse("SM 1 1\nm1: w1 w1\n"),
                lambda: rp.Poset(2, [(0, 1), (1, 0)]),
                lambda: rp.realize_poset(rp.Poset(1, []), "nope")]:
        try:
            bad()
        except ValueError:
            continue
        raise AssertionError("expected ValueError")


if __name__ == "__main__":
    check_example()
    check_realizations()
    check_errors()
    print("pyrotaposet smoke test passed")
