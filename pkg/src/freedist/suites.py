"""Verification suites: run named groups of checks and serialize the results."""

from __future__ import annotations

import json
import random
import time
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from fractions import Fraction
from typing import Any, Callable, Iterable

from .report import Report

SUITES = ("algebra", "kostant", "models", "tractor", "octonion", "inclusions")
DEFAULT_SEED = 20240611
DEFAULT_N = (2, 5)
STATUSES = ("pass", "fail", "skipped")

__all__ = [
    "CheckResult",
    "SuiteReport",
    "SUITES",
    "DEFAULT_SEED",
    "parse_n_range",
    "run_suite",
    "build_report",
    "emit_report",
    "render_json",
    "render_text",
    "parse_report",
    "jsonable",
]


@dataclass
class CheckResult:
    id: str
    anchor: str
    status: str
    witness: Any = None
    elapsed: float | None = None

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"bad status {self.status!r}")
        if self.status == "fail" and self.witness is None:
            self.witness = "check failed without a recorded witness"


@dataclass
class SuiteReport:
    suite: str
    seed: int
    params: dict
    checks: list[CheckResult]
    generated_at: str | None = None

    @property
    def summary(self) -> dict[str, int]:
        out = {s: 0 for s in STATUSES}
        for c in self.checks:
            out[c.status] += 1
        return out

    @property
    def ok(self) -> bool:
        return self.summary["fail"] == 0

    def to_dict(self) -> dict:
        d = {
            "suite": self.suite,
            "seed": self.seed,
            "params": self.params,
            "checks": [asdict(c) for c in self.checks],
            "summary": self.summary,
        }
        if self.generated_at is not None:
            d["generated_at"] = self.generated_at
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SuiteReport":
        checks = [CheckResult(**c) for c in d["checks"]]
        rep = cls(d["suite"], d["seed"], d["params"], checks, d.get("generated_at"))
        if rep.summary != d["summary"]:
            raise ValueError("summary does not match the checks")
        return rep


def jsonable(x: Any) -> Any:
    """Deterministic JSON-safe rendering of witnesses."""
    if x is None or isinstance(x, (bool, int, str)):
        return x
    if isinstance(x, float):
        return x
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, dict):
        return {str(jsonable(k)) if not isinstance(k, str) else k: jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, (set, frozenset)):
        return sorted((jsonable(v) for v in x), key=repr)
    if hasattr(x, "to_json"):
        return jsonable(x.to_json())
    return repr(x)


def parse_n_range(text: str | tuple | None) -> tuple[int, int]:
    if text is None:
        return DEFAULT_N
    if isinstance(text, tuple):
        lo, hi = text
    else:
        parts = str(text).split("..")
        try:
            if len(parts) == 1:
                lo = hi = int(parts[0])
            elif len(parts) == 2:
                lo, hi = int(parts[0]), int(parts[1])
            else:
                raise ValueError
        except ValueError:
            raise ValueError(f"invalid n-range {text!r}; use MIN..MAX") from None
    if lo < 2 or hi < lo:
        raise ValueError(f"invalid n-range {text!r}; need 2 <= MIN <= MAX")
    return lo, hi


class _Collector:
    def __init__(self, timing: bool):
        self.timing = timing
        self.results: list[CheckResult] = []

    def _elapsed(self, t0: float) -> float | None:
        return round(time.perf_counter() - t0, 3) if self.timing else None

    def report(self, prefix: str, anchor: str, fn: Callable[[], Report], keep: Iterable[str] | None = None,
               witness: Callable[[Report, str], Any] | None = None) -> Report:
        t0 = time.perf_counter()
        rep = fn()
        el = self._elapsed(t0)
        for key, ok in rep.checks.items():
            if keep is not None and key not in keep:
                continue
            w = rep.witnesses.get(key)
            if witness is not None:
                w = witness(rep, key) if w is None else w
            self.results.append(CheckResult(f"{prefix}.{key}", anchor, "pass" if ok else "fail",
                                            jsonable(w), el))
        return rep

    def check(self, cid: str, anchor: str, fn: Callable[[], tuple[bool, Any]]) -> None:
        t0 = time.perf_counter()
        ok, w = fn()
        self.results.append(CheckResult(cid, anchor, "pass" if ok else "fail", jsonable(w), self._elapsed(t0)))

    def mutation(self, cid: str, anchor: str, fn: Callable[[], tuple[bool, Any]]) -> None:
        """fn returns (inner check passed, witness); the mutation check passes when the inner one fails."""
        t0 = time.perf_counter()
        inner_ok, w = fn()
        detected = not inner_ok and w is not None
        self.results.append(CheckResult(cid, anchor, "pass" if detected else "fail",
                                        jsonable(w if detected else "perturbed input was not detected"),
                                        self._elapsed(t0)))

    def skip(self, cid: str, anchor: str, why: str) -> None:
        self.results.append(CheckResult(cid, anchor, "skipped", why, None))


# ---------------------------------------------------------------------------
# suites


def _suite_algebra(col: _Collector, ns, seed, deep):
    from .graded_lie import LieAlgebra, build_so, grading_element, nilradical_check

    anchor = "so(n+1,n) with the free-distribution grading"
    for n in ns:
        g = build_so(n)
        p = f"algebra.n={n}"
        col.check(f"{p}.antisymmetry", anchor, lambda: _viol(g.antisymmetry_violations()))
        col.check(f"{p}.jacobi", anchor, lambda: _viol(g.jacobi_violations()))
        col.check(f"{p}.grade additivity", anchor, lambda: _viol(g.grade_additivity_violations()))

        def eps_check(g=g):
            e = grading_element(g)
            bad = [i for i in range(g.dim) if e.eigenvalue_on(i) != g.grades[i]]
            return not bad, bad[:5]

        col.check(f"{p}.grading element", anchor, eps_check)
        col.report(p, "free nilradical: wedge map onto g2 and dim g/p",
                   lambda g=g: nilradical_check(g),
                   keep=("wedge map bijective", "[g1,g1] = g2", "dim g - dim p = n(n+1)/2",
                         "p-perp ideal of p", "[p-perp,[p-perp,p-perp]] = 0"),
                   witness=lambda r, k: {"dim g - dim p": r.data.get("dim g - dim p"),
                                         "wedge rank": r.data.get("wedge rank")})

    def mutated():
        g = build_so(ns[0])
        table = [[dict(c) for c in row] for row in g.table]
        i, j = 0, g.dim - 1
        k = next(iter(table[i][j]), 0)
        table[i][j][k] = table[i][j].get(k, 0) + 1
        table[j][i][k] = -table[i][j][k]
        bad = LieAlgebra(g.dim, table).jacobi_violations(limit=3)
        return not bad, bad or None

    col.mutation("algebra.mutation.perturbed structure constant", "Jacobi identity", mutated)


def _viol(bad):
    return not bad, bad[:5]


def _suite_kostant(col: _Collector, ns, seed, deep):
    from .graded_lie import build_so
    from .kostant import codifferential_columns, compose_columns, complex_report

    anchor = "Kostant codifferential and H2 of p-perp with values in g"
    for n in ns:
        if n > 5:
            col.skip(f"kostant.n={n}", anchor, "n > 5 is outside the supported range")
            continue
        if n == 5 and not deep:
            col.skip(f"kostant.n={n}", anchor, "n = 5 runs with --deep")
            continue
        p = f"kostant.n={n}"
        rep = col.report(p, anchor, lambda n=n: complex_report(build_so(n)))
        sup = rep.data["homology"].block_support
        labels = rep.data["support"]
        if n <= 3:
            col.check(f"{p}.support in (g1^g2)xg0", "harmonic curvature is never torsion-free",
                      lambda: (bool(sup) and all(t == (1, 2, 0) for t in sup), labels))
        elif n == 4:
            col.check(f"{p}.(g1^g2)xg-2: present", "harmonic curvature is never torsion-free",
                      lambda: ((1, 2, -2) in sup, labels))
        else:
            col.check(f"{p}.support nonempty", anchor, lambda: (bool(sup), labels))

    def mutated():
        g = build_so(2)
        _, _, hi = codifferential_columns(g, 3)
        _, _, lo = codifferential_columns(g, 2)
        lo = [dict(c) for c in lo]
        j = next(j for j, c in enumerate(hi) if c)
        k = next(iter(hi[j]))
        lo[k] = {r: -v for r, v in lo[k].items()} if lo[k] else {0: Fraction(1)}
        bad = [(j, dict(c)) for j, c in enumerate(compose_columns(lo, hi)) if c]
        return not bad, [(j, {str(r): str(v) for r, v in c.items()}) for j, c in bad[:2]] or None

    col.mutation("kostant.mutation.flipped codifferential column", "d* d* = 0", mutated)


def _suite_models(col: _Collector, ns, seed, deep):
    from .poly_models import (
        commutator_table_check,
        conformal_invariance_check,
        curvature_to_json,
        flat_curvature,
        nonflat_example,
        normality_check,
        standard_model,
        twisted_product_report,
    )
    from .poly_models import _kappa

    anchor = "homogeneous model of the free n-distribution"
    for n in ns:
        p = f"models.n={n}"
        m = standard_model(n)
        col.report(p, anchor, lambda m=m: commutator_table_check(m))
        col.check(f"{p}.flat curvature = 0", anchor, lambda m=m: _empty(flat_curvature(m), m))
        if n <= 4:
            col.report(p, "normality of the flat connection", lambda m=m: normality_check(m))
    if ns[0] <= 4 <= ns[-1]:
        m = nonflat_example(4)
        curv = flat_curvature(m)
        a, b, c = m.index("U12"), m.index("X1'"), m.index("U34")

        def single():
            val = _kappa(curv, a, b)
            ok = len(curv) == 1 and set(val) == {c} and val[c] == 1
            return ok, curvature_to_json(m, curv)

        col.check("models.nonflat.kappa(U12,X1')=U34", "non-flat example: only torsion component", single)
        col.report("models.nonflat", "non-flat example is normal", lambda: normality_check(m, curv))

        def planted():
            bad = dict(curv)
            bad[(0, 1)] = {c: curv[min(curv)][c] * 0 + 1}
            r = normality_check(m, bad)
            return r.ok, r.witnesses or None

        col.mutation("models.mutation.planted kappa(X1,X2)=U34", "normality detects a planted entry", planted)
    col.report("models.twisted", "twisted product of two free 2-distributions",
               lambda: twisted_product_report(standard_model(2), standard_model(2), seed=seed))
    if ns[0] <= 3 <= ns[-1]:
        rng = random.Random(seed)
        ups = [Fraction(rng.randint(-5, 5), rng.randint(1, 3)) for _ in range(3)]
        col.report("models.conformal", "conformal structure for n = 3",
                   lambda: conformal_invariance_check(standard_model(3), ups))


def _empty(curv, m):
    from .poly_models import curvature_to_json
    return not curv, curvature_to_json(m, curv) if curv else None


def _suite_tractor(col: _Collector, ns, seed, deep):
    from .tractor import (
        h_invariance_check,
        normalization_report,
        random_generic_V,
        verify_maxpref_properties,
        normalize_splitting_for_V,
        mu_extraction,
    )

    rng = random.Random(seed)
    anchor = "tractor metric and Weyl structure changes"
    for n in ns:
        if n > 4:
            col.skip(f"tractor.n={n}", anchor, "tractor checks cover n <= 4")
            continue
        p = f"tractor.n={n}"
        if n == 2:
            col.report(p, anchor, lambda: h_invariance_check(2))
        else:
            col.report(p, anchor, lambda n=n: h_invariance_check(n, rng, 20))
        for r in range(1, n + 1):
            col.report(f"{p}.r={r}", "V-preferred normalization",
                       lambda n=n, r=r: normalization_report(n, r, 100, rng))
            for gr in range(r):
                col.report(f"{p}.r={r}.g_rank={gr}.strong", "strongly V-preferred normalization",
                           lambda n=n, r=r, gr=gr: normalization_report(n, r, 10, rng, True, gr))
        if n <= 3 or deep:
            V = random_generic_V(n, n, rng)
            s0 = [s.to_vector() for s in V]
            col.report(f"{p}.maxpref", "maximal-rank V-preferred connection",
                       lambda s0=s0, n=n: verify_maxpref_properties(s0, n))
            if n == ns[0]:
                col.mutation(f"tractor.mutation.n={n}.non-parallel V", "maximal-rank V-preferred connection",
                             lambda s0=s0, n=n: _mut(verify_maxpref_properties(s0, n, mutate=True)))

    def literal_stage2():
        r = random.Random(seed)
        bad = []
        for _ in range(5):
            V = random_generic_V(3, 3, r)
            try:
                _, Vn = normalize_splitting_for_V(V, stage2_coefficient="literal")
                mu, _ = mu_extraction(Vn)
            except ValueError:
                continue
            if any(mu[i][j] != mu[j][i] for i in range(3) for j in range(3)):
                bad.append([[str(c) for c in row] for row in mu])
        return not bad, bad[:1] or None

    col.mutation("tractor.mutation.literal stage-two coefficient", "mu symmetric", literal_stage2)


def _mut(rep: Report):
    return rep.ok, rep.failures or None


def _suite_octonion(col: _Collector, ns, seed, deep):
    from .graded_lie import so_of_form
    from . import octonion as O

    col.report("octonion.identities", "split octonions are alternative and composition",
               lambda: O.symbolic_identities())
    col.mutation("octonion.mutation.literal product", "alternativity and multiplicativity",
                 lambda: _mut_identities(O))
    col.report("octonion.triple", "octonionic triple multiplication table",
               lambda: O.triple_table_check(*O.find_triple()))
    closed = O.canonical_closed_plane()
    tri = O.IsotropicPlane(list(O.find_triple()))
    rng = random.Random(seed)

    def orbit(plane, tag):
        got = []
        for _ in range(20):
            got.append(O.classify_isotropic_plane(plane.rebased(O.random_basis_change(rng))).tag)
        return all(t == tag for t in got), got

    col.check("octonion.classify.canonical plane Closed", "orbits of isotropic 3-planes",
              lambda: orbit(closed, "Closed"))
    col.check("octonion.classify.triple plane Open", "orbits of isotropic 3-planes", lambda: orbit(tri, "Open"))
    x, y, z = O.find_triple()
    unit = O.IsotropicPlane([x, y, z.scale(1 / O.theta(x, y, z))])
    col.check("octonion.classify.theta=1 triple plane Open", "orbits of isotropic 3-planes",
              lambda: orbit(unit, "Open") if O.theta(*unit.basis) == 1 else (False, "theta != 1"))

    def equivalence():
        bad = []
        for kind in ("so", "g2-closed", "g2-open"):
            for _ in range(5):
                c = O.classify_isotropic_plane(O.random_plane(rng, kind))
                if (c.theta == 0) != c.products_closed:
                    bad.append((kind, str(c.theta)))
        return not bad, bad

    col.check("octonion.classify.theta=0 iff B.B in B", "orbits of isotropic 3-planes", equivalence)
    col.check("octonion.closed plane B.B != 0", "orbits of isotropic 3-planes",
              lambda: (O.classify_isotropic_plane(closed).z is not None, None))

    def stab_theta():
        st = O.stabilizer_algebra(O.theta_tensor(), so_of_form(O.im_gram()))
        return st.dim == 14 and st.closed(), st.dim

    col.check("octonion.stab(theta) = 14", "G2' is the stabilizer of the generic 3-form", stab_theta)

    def stab_cayley():
        st = O.stabilizer_algebra(O.cayley_form(), so_of_form(O.octonion_gram()), 4)
        return st.dim == 21 and st.closed(), st.dim

    col.check("octonion.stab(4-form on O') = 21", "spin(4,3) inside so(4,4)", stab_cayley)
    col.report("octonion.graded", "graded decomposition of g2'", lambda: O.g2_graded_decomposition(tri))
    col.report("octonion.sl3", "SL(3)/T2 example", O.sl3_example_check)


def _mut_identities(O):
    r = O.symbolic_identities(O.zorn_mul_literal)
    return r.ok, r.failures or None


def _suite_inclusions(col: _Collector, ns, seed, deep):
    from . import inclusions as I

    def rep_checks(name, build, sig):
        def run():
            r = build().report()
            r.record(f"signature {sig}", r.data["signature"] == sig, r.data["signature"])
            return r
        return run

    col.report("inclusions.lambda2", "sl(4,R) = so(3,3) on Lambda^2", rep_checks("l2", I.lambda2_rep, (3, 3)))
    col.report("inclusions.su22", "su(2,2) = so(4,2) on a real form of Lambda^2 C^4",
               rep_checks("su", I.su22_rep, (4, 2)))
    col.report("inclusions.four-form", "su(2,2) inside spin(4,3) via Re(v) - mu^2", I.su22_four_form_check)
    col.report("inclusions.fefferman-free", "so(n+1,n) inside so(n+1,n+1)",
               lambda: I.fefferman_free_example(3))
    col.report("inclusions.fefferman-cr", "CR Fefferman dimension count", I.fefferman_cr_example)

    def wrong_weight():
        r = I.su22_four_form_check(Fraction(2))
        return r.ok, r.witnesses or None

    col.mutation("inclusions.mutation.four-form weight 2", "annihilator dimension", wrong_weight)


_RUNNERS = {
    "algebra": _suite_algebra,
    "kostant": _suite_kostant,
    "models": _suite_models,
    "tractor": _suite_tractor,
    "octonion": _suite_octonion,
    "inclusions": _suite_inclusions,
}


def run_suite(selector: str, n_range=None, seed: int = DEFAULT_SEED, deep: bool = False,
              timing: bool = True) -> list[CheckResult]:
    """Run a suite (or "all") and return its results sorted by check id."""
    if selector != "all" and selector not in _RUNNERS:
        raise ValueError(f"unknown suite {selector!r}; choose from {', '.join(SUITES + ('all',))}")
    lo, hi = parse_n_range(n_range)
    ns = list(range(lo, hi + 1))
    col = _Collector(timing)
    for name in (SUITES if selector == "all" else (selector,)):
        _RUNNERS[name](col, ns, seed, deep)
    return sorted(col.results, key=lambda c: c.id)


def build_report(selector: str, n_range=None, seed: int = DEFAULT_SEED, deep: bool = False,
                 timestamps: bool = True) -> SuiteReport:
    lo, hi = parse_n_range(n_range)
    checks = run_suite(selector, (lo, hi), seed, deep, timing=timestamps)
    stamp = datetime.now(timezone.utc).isoformat(timespec="seconds") if timestamps else None
    return SuiteReport(selector, seed, {"n": [lo, hi], "deep": deep}, checks, stamp)


def render_json(report: SuiteReport) -> str:
    return json.dumps(report.to_dict(), indent=2, ensure_ascii=False) + "\n"


def render_text(report: SuiteReport) -> str:
    lines = [f"suite: {report.suite}  seed: {report.seed}  n: {report.params['n'][0]}..{report.params['n'][1]}"]
    lines.append(f"{'STATUS':<8}{'CHECK':<64}WITNESS")
    for c in report.checks:
        w = "" if c.witness is None else json.dumps(c.witness, ensure_ascii=False)
        if len(w) > 60:
            w = w[:57] + "..."
        lines.append(f"{c.status.upper():<8}{c.id[:63]:<64}{w}")
    s = report.summary
    lines.append(f"pass {s['pass']}  fail {s['fail']}  skipped {s['skipped']}")
    return "\n".join(lines) + "\n"


def emit_report(report: SuiteReport, fmt: str = "text", path=None) -> str:
    if not report.checks:
        raise ValueError("nothing to report")
    if fmt == "json":
        text = render_json(report)
    elif fmt == "text":
        text = render_text(report)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


def parse_report(text: str) -> SuiteReport:
    return SuiteReport.from_dict(json.loads(text))
