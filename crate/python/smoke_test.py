"""Smoke test for the easyqg_py extension module."""

import json
import math
from fractions import Fraction

import easyqg_py as qg


def check_partitions():
    p = qg.Partition("[o/oo]{0,1,2}")
    cap = qg.Partition("[oo/]{0,1}")
    comp, loops = p.compose(cap)
    assert str(comp) == "[o/]{0}" and loops == 0
    assert p.involute().k == 2 and p.involute().l == 1
    assert p.tensor(cap).points() == 5
    assert qg.Partition(json.dumps(p.to_json())) == p
    assert len({p, qg.Partition(str(p))}) == 1
    nc2 = qg.Category("nc2")
    basis = nc2.basis("oooo")
    assert len(basis) == 2 and all(b.is_noncrossing() and b.is_pairing() for b in basis)
    assert len(qg.Category("p").basis("ooo")) == 5
    assert qg.Category("p").free_version() == "nc"


def check_weingarten():
    assert qg.gram_det("nc2", "oooo", 4) == 240
    assert qg.det_formula("onplus", 4, 4) == 240
    for k in range(1, 6):
        for n in range(1, k + 4):
            assert qg.gram_det("p", "o" * k, n) == qg.det_formula("lindstrom", k, n)
    g = qg.gram("p", "ooo", 4)
    w = qg.weingarten_matrix("p", "ooo", 4)
    m = len(g)
    for i in range(m):
        for j in range(m):
            s = sum(w[i][t] * g[t][j] for t in range(m))
            assert s == (1 if i == j else 0)
    assert qg.integrate("p", [1, 1], [1, 1], 3) == Fraction(1, 3)
    assert qg.integrate("p", [1, 2], [2, 1], 4) == qg.sn_integral([1, 2], [2, 1], 4)
    assert qg.truncated_moment("p", "oooo", 5, 5) == 15 == qg.fix_space_dim("p", "oooo", 5)
    try:
        qg.weingarten_matrix("p", "ooo", 1)
    except RuntimeError as e:
        assert "SingularGram" in str(e)
    else:
        raise AssertionError("expected a singular Gram matrix")


def check_freeprob():
    bell = [1, 2, 5, 15, 52]
    assert qg.moments_to_cumulants(bell, "classical") == [1] * 5
    kappa = qg.moments_to_cumulants(bell, "free")
    assert kappa[3] == 2
    assert qg.cumulants_to_moments(kappa, "free") == bell
    assert qg.law_moments("cat:t=1:nc2", 6) == [0, 1, 0, 2, 0, 5]
    r = qg.bp_check("p", "nc", Fraction(1, 2), 8)
    assert r["passed"]


def check_fusion():
    assert qg.fuse("hs+:3", "1", "2") == {"()": 1, "(0)": 1, "(1,2)": 1}
    power = qg.decompose_power("on+", 6)
    total = sum(m * qg.fusion_dim("on+", label, 3) for label, m in power.items())
    assert total == 3 ** 6
    try:
        qg.fuse("on+", "x", "1")
    except ValueError as e:
        assert "InvalidLabel" in str(e)
    else:
        raise AssertionError("expected an invalid label")


def check_montecarlo():
    d = qg.derangement_rate(20, 20000, seed=7)
    assert abs(d["exact_f64"] - math.exp(-1)) < 1e-15
    assert abs(d["z"]) <= 4
    rep = qg.empirical_moments("sn", 20, Fraction(1, 2), 3, 20000, seed=1)
    assert all(abs(row["z"]) <= 4 for row in rep["rows"])
    again = qg.empirical_moments("sn", 20, Fraction(1, 2), 3, 20000, seed=1)
    assert rep == again


def check_cli():
    code, out = qg.run_cli(["selftest"])
    assert code == 0
    last = json.loads(out.strip().splitlines()[-1])
    assert last["summary"] == "pass"
    code, out = qg.run_cli(["frobnicate"])
    assert code == 2


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("check_"):
            fn()
            print(f"{name[6:]}: ok")
    print("rng:", qg.RNG)
