"""Acceptance criteria, one test each; every test prints a PASS/FAIL line."""

import time
from contextlib import contextmanager

import pytest

from freedist.suites import DEFAULT_SEED, build_report, render_json

SUITE_N = {"algebra": "2..5", "kostant": "2..4", "models": "2..5", "tractor": "2..4",
           "octonion": "2..5", "inclusions": "2..5"}


@pytest.fixture(scope="module")
def runs():
    out = {}
    for name, n in SUITE_N.items():
        t0 = time.perf_counter()
        rep = build_report(name, n, DEFAULT_SEED, timestamps=False)
        out[name] = (rep, time.perf_counter() - t0)
    return out


@contextmanager
def criterion(capsys, number, text):
    ok = False
    try:
        yield
        ok = True
    finally:
        with capsys.disabled():
            print(f"\ncriterion {number}: {'PASS' if ok else 'FAIL'} - {text}")


def _by_id(rep):
    return {c.id: c for c in rep.checks}


def _passes(rep, prefix):
    sel = [c for c in rep.checks if c.id.startswith(prefix)]
    assert sel, f"no checks under {prefix}"
    bad = [c.id for c in sel if c.status != "pass"]
    assert not bad, bad
    return sel


def test_criterion_01_algebra(runs, capsys):
    with criterion(capsys, 1, "algebra suite exact for n = 2..5 in < 10 s"):
        rep, t = runs["algebra"]
        ids = _by_id(rep)
        for n in range(2, 6):
            for key in ("jacobi", "grade additivity", "wedge map bijective", "[g1,g1] = g2",
                        "dim g - dim p = n(n+1)/2"):
                assert ids[f"algebra.n={n}.{key}"].status == "pass"
        assert rep.ok and t < 10


def test_criterion_02_kostant(runs, capsys):
    with criterion(capsys, 2, "Kostant complex and H2 block support, n = 5 behind --deep"):
        rep, t = runs["kostant"]
        ids = _by_id(rep)
        for n in (2, 3, 4):
            assert ids[f"kostant.n={n}.d d = 0"].status == "pass"
            assert ids[f"kostant.n={n}.d* d* = 0"].status == "pass"
        for n in (2, 3):
            assert ids[f"kostant.n={n}.support in (g1^g2)xg0"].status == "pass"
        assert ids["kostant.n=4.(g1^g2)xg-2: present"].status == "pass"
        assert "(g₁∧g₂)⊗g₋₂" in ids["kostant.n=4.(g1^g2)xg-2: present"].witness
        assert rep.ok and t < 300
        shallow = build_report("kostant", "5", timestamps=False)
        assert _by_id(shallow)["kostant.n=5"].status == "skipped"


def test_criterion_03_models(runs, capsys):
    with criterion(capsys, 3, "model commutator tables, flat and non-flat curvature, normality"):
        rep, t = runs["models"]
        ids = _by_id(rep)
        for n in range(2, 6):
            _passes(rep, f"models.n={n}.")
            assert ids[f"models.n={n}.flat curvature = 0"].status == "pass"
        for n in (2, 3, 4):
            assert any(i.startswith(f"models.n={n}.d*kappa") for i in ids)
        assert ids["models.nonflat.kappa(U12,X1')=U34"].status == "pass"
        _passes(rep, "models.nonflat.")
        assert rep.ok and t < 30


def test_criterion_04_twisted(runs, capsys):
    with criterion(capsys, 4, "twisted product of two rank-2 models"):
        rep, _ = runs["models"]
        sel = _passes(rep, "models.twisted.")
        keys = {c.id.split("models.twisted.", 1)[1] for c in sel}
        assert {"[X~j, X~k] = [Xj, Xk]", "[Y~j, Y~k] = [Yj, Yk]", "[X~j, Y~k] = Tjk",
                "free of rank 4", "curvature is the direct sum (zero)"} <= keys


def test_criterion_05_tractor(runs, capsys):
    with criterion(capsys, 5, "tractor metric invariance, normalizations and maximal-rank connection"):
        rep, t = runs["tractor"]
        ids = _by_id(rep)
        assert ids["tractor.n=2.symbolic h invariance"].status == "pass"
        for n in (3, 4):
            assert ids[f"tractor.n={n}.randomized h invariance"].status == "pass"
            for r in range(1, n + 1):
                assert ids[f"tractor.n={n}.r={r}.mu symmetric"].status == "pass"
        assert any(".strong." in i and i.endswith("mu kills iso(A)") for i in ids)
        for n in (2, 3):
            _passes(rep, f"tractor.n={n}.maxpref.")
        assert ids["tractor.mutation.n=2.non-parallel V"].status == "pass"
        assert rep.ok and t < 60


def test_criterion_06_octonion(runs, capsys):
    with criterion(capsys, 6, "octonion identities, triple table and plane classification"):
        rep, t = runs["octonion"]
        _passes(rep, "octonion.identities.")
        sel = _passes(rep, "octonion.triple.")
        keys = {c.id for c in sel}
        assert "octonion.triple.a a = 1" in keys and "octonion.triple.lam(yz, zx, xy) = -1" in keys
        ids = _by_id(rep)
        for k in ("canonical plane Closed", "triple plane Open", "theta=1 triple plane Open"):
            c = ids[f"octonion.classify.{k}"]
            assert c.status == "pass" and len(c.witness) == 20
        assert rep.ok and t < 60


def test_criterion_07_stabilizers(runs, capsys):
    with criterion(capsys, 7, "stabilizer dimensions 14 and 21, graded g2' with g0 part of dim 8"):
        octo, t1 = runs["octonion"]
        inc, t2 = runs["inclusions"]
        o, i = _by_id(octo), _by_id(inc)
        assert o["octonion.stab(theta) = 14"].status == "pass"
        assert i["inclusions.four-form.annihilator in so(4,4) has dimension 21"].status == "pass"
        assert o["octonion.graded.g2' cap p = g2' cap g_0 of dim 8"].status == "pass"
        _passes(octo, "octonion.graded.")
        assert t1 + t2 < 120


def test_criterion_08_inclusions(runs, capsys):
    with criterion(capsys, 8, "sl(4)=so(3,3), su(2,2)=so(4,2), Fefferman pentuple and transversality"):
        rep, t = runs["inclusions"]
        ids = _by_id(rep)
        for name, sig in (("lambda2", "(3, 3)"), ("su22", "(4, 2)")):
            for key in ("bracket preserving", "injective", "image dimension 15", "onto the orthogonal algebra",
                        f"signature {sig}"):
                assert ids[f"inclusions.{name}.{key}"].status == "pass"
        assert ids["inclusions.fefferman-cr.dims (21, 15, 15, 10, 9)"].status == "pass"
        assert ids["inclusions.fefferman-cr.transverse: g + phat = ghat"].status == "pass"
        assert rep.ok and t < 60


def test_criterion_09_mutations(runs, capsys):
    with criterion(capsys, 9, "every suite detects a perturbed input with a witness"):
        for name, (rep, _) in runs.items():
            muts = [c for c in rep.checks if ".mutation." in c.id]
            assert muts, name
            assert all(c.status == "pass" and c.witness for c in muts), name


def test_criterion_10_determinism(capsys):
    with criterion(capsys, 10, "run_suite(all) twice gives byte-identical JSON"):
        a = render_json(build_report("all", None, DEFAULT_SEED, timestamps=False))
        b = render_json(build_report("all", None, DEFAULT_SEED, timestamps=False))
        assert a == b
        assert '"fail": 0' in a
