"""Acceptance criteria 1-10, each at its stated tolerance and time limit.

Run under pytest for the summary block, or directly (``python3 tests/test_acceptance.py``)
for one PASS/FAIL line per criterion.
"""

import itertools
import math
import sys
import time
from fractions import Fraction as F
from pathlib import Path

import numpy as np
import pytest
from scipy import integrate

sys.path.insert(0, str(Path(__file__).parent))
from conftest import RESULTS, record, summary_lines  # noqa: E402

from branchforge import galerkin, reducible  # noqa: E402
from branchforge.cli import main  # noqa: E402
from branchforge.continuation import ContinuationConfig, detect_bifurcations, trace_curve, trunk_point  # noqa: E402
from branchforge.galerkin import AlgebraicSystem, energy, pair_is_reducible, pattern_holds  # noqa: E402
from branchforge.modes import FUNDAMENTAL, ModeIndex, ModeSet, cos_overlap, diagonal_truncation, parse_modes, sin_overlap  # noqa: E402
from branchforge.realroots import parametric_discriminant, sturm_count  # noqa: E402
from branchforge.reducible import (  # noqa: E402
    eta, eta_A, eta_B, n_mode_solution, sample_branch, shoot_of_primary_branch, sign_orbit,
)
from branchforge.scenarios import (  # noqa: E402
    CASE1_SEXTIC, CASE4_DISCRIMINANT, PERTURBATION_CONFIG, PERTURBED, _case1_facts, case4_cubic,
    compare_tree_vs_continuation, run_scenario, theorem_table,
)
from branchforge.tree import build_tree, order_scan, primary_branch_count  # noqa: E402


def cold_caches():
    """Timed criteria start from empty memo tables."""
    galerkin._overlap_product.cache_clear()
    galerkin._cs.cache_clear()
    galerkin.pair_is_reducible.cache_clear()
    reducible._coefficients.cache_clear()


def mode_sets_up_to(K):
    """All reducible pairs and triples with both indices of every mode <= K."""
    ms = [ModeIndex(m, n) for m in range(K + 1) for n in range(K + 1)]
    pairs = [(a, b) for a, b in itertools.combinations(ms, 2) if pair_is_reducible(a, b)]
    adj = {}
    for a, b in pairs:
        adj.setdefault(a, set()).add(b)
    triples = [(a, b, c) for a, b in pairs for c in sorted(adj.get(b, ()))
               if c in adj.get(a, ()) and pattern_holds((a, b, c), new=(c,))]
    return [ModeSet(s) for s in pairs + triples]


# ------------------------------------------------------------------ 1
def test_criterion_01_tree_counts():
    cold_caches()
    t0 = time.perf_counter()
    s3, s4, s9 = (build_tree(N).stats for N in (3, 4, 9))
    dt = time.perf_counter() - t0
    ok = (s3["branches"] == 1 and s4["branches"] == 3 and s9["branches"] == 30 and s9["primary"] == 28
          and s9["secondary"] == 1 and s9["by_order"].get("3") == 1 and dt < 10)
    record(1, ok, f"N=3:{s3['branches']} N=4:{s4['branches']} N=9:{s9['branches']} "
                  f"(primary {s9['primary']}, secondary {s9['secondary']}, order-3 {s9['by_order'].get('3')}) "
                  f"in {dt:.1f}s")
    assert ok


# ------------------------------------------------------------------ 2
def test_criterion_02_primary_count_law():
    cold_caches()
    t0 = time.perf_counter()
    bad = [N for N in range(3, 21) if primary_branch_count(N) != (N - 2) * (N - 1) // 2]
    dt = time.perf_counter() - t0
    ok = not bad and dt < 30
    record(2, ok, f"(N-2)(N-1)/2 for N=3..20, mismatches {bad}, {dt:.1f}s")
    assert ok


# ------------------------------------------------------------------ 3
@pytest.mark.xfail(strict=True, reason="absolute 1e-10 is below double-precision roundoff for amplitudes "
                                       "of order 1e2-1e3 once an index reaches 5; see the decision log")
def test_criterion_03_closed_form_fidelity():
    cold_caches()
    t0 = time.perf_counter()
    worst, worst_set, count, failing = 0.0, None, 0, 0
    for S in mode_sets_up_to(10):
        if not reducible.reducible_coefficients(S).domain:
            continue
        sol = n_mode_solution(S)
        count += 1
        system = AlgebraicSystem(S)
        r = max(system.residual_norm(w, sol.amplitudes(w)) for w in sample_branch(sol, 52)[1:-1])
        failing += r >= 1e-10
        if r > worst:
            worst, worst_set = r, S
    dt = time.perf_counter() - t0
    ok = failing == 0 and dt < 60
    record(3, ok, f"{count} sets x 50 omegas, worst max-norm {worst:.2e} at {worst_set.as_pairs()}, "
                  f"{failing} sets >= 1e-10, {dt:.1f}s")
    assert ok


# ------------------------------------------------------------------ 4
def test_criterion_04_two_mode_endpoints():
    sol = n_mode_solution([(0, 0), (1, 2)])
    iv = sol.domain[0]
    exact = iv.lo.square == F(97, 33) and iv.hi.square == F(71, 23)
    system = AlgebraicSystem([(0, 0), (1, 2)])
    cfg = ContinuationConfig(omega_max=3.0, max_step=2e-2)
    curve = trace_curve(system, trunk_point(system, (0, 0), 1.01, cfg), 1, cfg)
    bps = detect_bifurcations(curve, config=cfg)
    target = math.sqrt(71 / 23)
    err = min((abs(p.omega - target) for p in bps), default=math.inf)
    ok = exact and err < 1e-8
    record(4, ok, f"domain [sqrt({iv.lo.square}), sqrt({iv.hi.square})], trunk bifurcation error {err:.1e}")
    assert ok


# ------------------------------------------------------------------ 5
def test_criterion_05_shoot_energies():
    worst, count = 0.0, 0
    for n in range(2, 11):
        for m in range(1, n):
            sh = shoot_of_primary_branch(m, n)
            modes = ModeSet([(0, 0), (m, n)])
            sol = n_mode_solution(modes)
            iv = sol.domain[0]
            end = next(e for e in (iv.lo, iv.hi) if e is not None and e.square == sh.omega.square)
            w = end.value
            e = energy(w, sol.amplitudes(w), modes)
            worst = max(worst, abs(e - sh.energy) / sh.energy)
            count += 1
    ok = worst < 1e-12
    record(5, ok, f"{count} primary branches, worst relative error {worst:.1e}")
    assert ok


# ------------------------------------------------------------------ 6
def test_criterion_06_order4_scan():
    cold_caches()
    t0 = time.perf_counter()
    at = order_scan(4, 35)
    below = order_scan(4, 34)
    dt = time.perf_counter() - t0
    expected = [ModeSet([(0, 0), (1, 2), (5, 9), (20, 35)]), ModeSet([(0, 0), (1, 3), (3, 8), (14, 35)])]
    ok = at == expected and below == [] and dt < 600
    record(6, ok, f"through 35: {[s.as_pairs() for s in at]}, below 35: {len(below)} types, {dt:.1f}s")
    assert ok


# ------------------------------------------------------------------ 7
def test_criterion_07_appendix_theorem():
    rows = theorem_table(5)
    iff = all(r.holds and r.expected == (r.mode.m >= 1 and r.mode.n >= 1 and r.mode.n > r.mode.m) for r in rows)
    by_case = {}
    for r in rows:
        by_case.setdefault(r.case, []).append(r)
    positivity = all("positivity" in r.method for c in ("2", "5") for r in by_case[c])
    descartes = all(r.established is False and "Descartes" in r.method for r in by_case["3"])
    disc = parametric_discriminant(case4_cubic, 6)
    disc_ok = disc == CASE4_DISCRIMINANT and disc.leading < 0 and all(r.established is False for r in by_case["4"])
    f = _case1_facts()
    sextic = sturm_count(CASE1_SEXTIC) == 2 and sturm_count(CASE1_SEXTIC, 0) == 0
    star = f["omega_star"] is not None and 4 < f["omega_star"] < math.sqrt(17) and f["omega_star_bracket"]
    case1 = all(r.established is False for r in by_case["1"])
    ok = iff and positivity and descartes and disc_ok and sextic and star and case1 and len(rows) == 35
    record(7, ok, f"{len(rows)} pairs, iff {iff}; cases 2/5 {positivity}, 3 {descartes}, 4 {disc_ok}, "
                  f"1 sextic {sextic}, omega* {f['omega_star']:.6f} in (4, sqrt 17) {star}")
    assert ok


# ------------------------------------------------------------------ 8
def test_criterion_08_loop_resolution():
    closed, times = {}, {}
    for name in ("pert", "ladder", "v10"):
        system = AlgebraicSystem(parse_modes(PERTURBED[name][0]))
        t0 = time.perf_counter()
        start = trunk_point(system, FUNDAMENTAL, 1.1, PERTURBATION_CONFIG)
        curve = trace_curve(system, start, 1, PERTURBATION_CONFIG)
        times[name] = time.perf_counter() - t0
        closed[name] = curve.closed
    ok = closed["pert"] and closed["ladder"] and not closed["v10"] and max(times.values()) < 60
    record(8, ok, ", ".join(f"{k} loop={closed[k]} ({times[k]:.1f}s)" for k in closed))
    assert ok


# ------------------------------------------------------------------ 9
def test_criterion_09_tube_distance():
    parts, ok = [], True
    for N in (3, 4):
        rep = compare_tree_vs_continuation(N)
        ds = [d for _, _, d in rep.nested]
        ok &= rep.distance < 0.1 and rep.nonincreasing
        parts.append(f"N={N}: {rep.distance:.4f}, nested " + " ".join(f"{d:.4f}" for d in ds))
    record(9, ok, "; ".join(parts))
    assert ok


# ------------------------------------------------------------------ 10
ODD = (1, 3, 5, 7, 9, 11, 13, 15)


def _quad(f, *k):
    val, _ = integrate.quad(lambda x: np.prod([f(v * x) for v in k], axis=0), 0, math.pi,
                            limit=200, epsabs=1e-13, epsrel=0)
    return val


def _fd_jacobian(s, w, a, h=1e-6):
    cols = []
    for i in range(len(a)):
        e = np.zeros_like(a)
        e[i] = h
        cols.append((s.residual(w, a + e) - s.residual(w, a - e)) / (2 * h))
    return np.array(cols).T


def _deterministic(tmp):
    same = True
    for tag in ("a", "b"):
        assert main(["tree", "--truncation", "4", "--out", str(tmp / tag / "tree")]) == 0
        assert main(["trace", "--system", "truncated:2", "--out", str(tmp / tag / "trace")]) == 0
    same &= (tmp / "a/tree/tree.json").read_bytes() == (tmp / "b/tree/tree.json").read_bytes()
    same &= (tmp / "a/trace/curve.csv").read_bytes() == (tmp / "b/trace/curve.csv").read_bytes()
    r1, r2 = run_scenario("fig2", tmp / "a/sc"), run_scenario("fig2", tmp / "b/sc")
    same &= r1.to_dict() == r2.to_dict()
    for name in r1.artifacts:
        same &= (tmp / "a/sc" / name).read_bytes() == (tmp / "b/sc" / name).read_bytes()
    return bool(same)


def test_criterion_10_property_suites(tmp_path):
    quad_err = 0.0
    for args in itertools.combinations_with_replacement(ODD, 4):
        quad_err = max(quad_err, abs(_quad(np.cos, *args) - cos_overlap(*args) * math.pi / 8),
                       abs(_quad(np.sin, *args) - sin_overlap(*args) * math.pi / 8))

    rng = np.random.default_rng(7)
    jac_err = 0.0
    for N in (1, 2, 3, 4):
        s = AlgebraicSystem(diagonal_truncation(N))
        for _ in range(5):
            a, w = rng.normal(size=s.size), rng.uniform(0.5, 3)
            J, _ = s.jacobian(w, a)
            jac_err = max(jac_err, np.linalg.norm(J - _fd_jacobian(s, w, a)) / np.linalg.norm(J))

    eta_ok = True
    for a, b in itertools.product(range(21), repeat=2):
        eta_ok &= all(f(a, b) % 2 == 1 for f in (eta, eta_A, eta_B))
        eta_ok &= not (eta(a, b) < 0 and eta(b, a) < 0)
        if (a, b) != (0, 0):
            eta_ok &= not (eta_B(a, b) > 0 and eta_B(b, a) > 0)

    orbit_err = 0.0
    for modes in ([(0, 0), (1, 2)], [(0, 0), (1, 3), (3, 8)], [(0, 0), (2, 3)]):
        sol = n_mode_solution(modes)
        s = AlgebraicSystem(modes)
        iv = sol.domain[0]
        w = 0.5 * (iv.lo.value + iv.hi.value)
        orbit = sign_orbit(sol.amplitudes(w))
        assert len(orbit) == sol.orbit_size
        orbit_err = max(orbit_err, max(s.residual_norm(w, x) for x in orbit))

    same = _deterministic(tmp_path)
    ok = quad_err < 1e-12 and jac_err < 1e-6 and eta_ok and orbit_err < 1e-10 and same
    record(10, ok, f"quadrature {quad_err:.1e}, jacobian {jac_err:.1e}, eta lemmas {bool(eta_ok)}, "
                   f"sign orbit {orbit_err:.1e}, byte-identical reruns {same}")
    assert ok


if __name__ == "__main__":
    import tempfile

    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_criterion_")]
    for fn in tests:
        try:
            if "tmp_path" in fn.__code__.co_varnames[:fn.__code__.co_argcount]:
                with tempfile.TemporaryDirectory() as d:
                    fn(Path(d))
            else:
                fn()
        except AssertionError:
            pass
    print("\n".join(summary_lines()))
    sys.exit(0 if all(ok for ok, _ in RESULTS.values()) else 1)
