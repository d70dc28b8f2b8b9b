"""End-to-end studies tied to the figures and appendix cases of the reference work.

A scenario is a table of claims plus one compute function.  The compute
function returns the computed value for every claim key (and the diagram
datasets); the table says what each value is expected to be and how it is
compared.  The claim tables double as the acceptance manifest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.spatial import cKDTree

from .continuation import (
    ContinuationConfig,
    ContinuationCurve,
    detect_bifurcations,
    switch_branch,
    trace_curve,
    trunk_point,
)
from .export import curve_table, element_table, write_csv, write_json
from .galerkin import AlgebraicSystem, is_reducible
from .modes import FUNDAMENTAL, ModeIndex, ModeSet, diagonal_truncation
from .realroots import (
    IntPolynomial,
    descartes_positive_bound,
    gcd,
    interpolate,
    isolate_roots,
    parametric_discriminant,
    poly,
    resultant,
    squarefree_part,
    sturm_count,
)
from .reducible import (
    BranchSolution,
    SqrtRational,
    attachments,
    eta_B,
    n_mode_solution,
    primary_energy_bounds,
    shoot_of_primary_branch,
    three_mode_closed_form,
)
from .tree import _element, build_tree, order_scan


class UnknownScenarioError(KeyError):
    pass


# --------------------------------------------------------------------- reports
@dataclass(frozen=True)
class Claim:
    key: str
    description: str
    reference: str
    expected: object
    computed: object
    passed: bool

    def to_dict(self) -> dict:
        return {
            "key": self.key,
            "description": self.description,
            "reference": self.reference,
            "expected": _jsonable(self.expected),
            "computed": _jsonable(self.computed),
            "pass": self.passed,
        }


@dataclass
class ScenarioReport:
    scenario_id: str
    claims: list[Claim]
    artifacts: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    metrics: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.claims)

    def failures(self) -> list[Claim]:
        return [c for c in self.claims if not c.passed]

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario_id,
            "pass": self.passed,
            "claims": [c.to_dict() for c in self.claims],
            "notes": list(self.notes),
            "metrics": _jsonable(self.metrics),
            "artifacts": list(self.artifacts),
        }


def _jsonable(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, SqrtRational):
        return str(v)
    if isinstance(v, ModeIndex):
        return [v.m, v.n]
    if isinstance(v, ModeSet):
        return v.as_pairs()
    if isinstance(v, (np.floating, np.integer, np.bool_)):
        return v.item()
    if isinstance(v, float):
        return v if math.isfinite(v) else str(v)
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


# ------------------------------------------------------------ claim machinery
def equals(computed, expected) -> bool:
    return computed == expected


def below(computed, expected) -> bool:
    return computed is not None and computed < expected


def within(tol: float) -> Callable[[object, object], bool]:
    def check(computed, expected) -> bool:
        return computed is not None and abs(computed - expected) <= tol
    return check


@dataclass(frozen=True)
class ClaimSpec:
    key: str
    description: str
    reference: str
    expected: object = True
    check: Callable[[object, object], bool] = equals


@dataclass
class Study:
    values: dict
    datasets: dict = field(default_factory=dict)  # name -> (header, rows)
    notes: list[str] = field(default_factory=list)
    metrics: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Scenario:
    scenario_id: str
    title: str
    claims: tuple[ClaimSpec, ...]
    compute: Callable[[], Study]


# ----------------------------------------------------------------- shared bits
TRUNK_OFFSET = 1e-2

# Finer step control for the truncated Galerkin systems: near the places where a
# branch meets a trunk two solution sheets come very close and a coarse
# corrector jumps between them.
GALERKIN_CONFIG = ContinuationConfig(
    omega_min=0.9, omega_max=3.2, max_step=5e-3, min_cos_angle=0.99, max_correction=0.1, stop_on_loop=False
)
PERTURBATION_CONFIG = ContinuationConfig(omega_min=0.9, omega_max=4.0, max_step=2e-2)

PERTURBED = {
    "pert": ("(0,0),(1,2),(0,1)", "perturbation cos(tau) sin(3x)"),
    "v11": ("(0,0),(1,2),(1,1)", "perturbation cos(3tau) sin(3x)"),
    "v10": ("(0,0),(1,2),(1,0)", "perturbation cos(3tau) sin(x)"),
    "ladder": ("(0,0),(2,4),(0,1),(1,2)", "ladder C1 cos(tau) sin(3x), C2 cos(3tau) sin(5x)"),
}


def _modes(text: str) -> ModeSet:
    from .modes import parse_modes

    return parse_modes(text)


def _bracket(w: Fraction) -> str:
    return str(w)


def _ends(sol: BranchSolution) -> list:
    iv = sol.domain[0]
    lower, upper = attachments(sol, iv)
    return [x if isinstance(x, str) or x is None else x.as_pairs() for x in (lower, upper)]


def _nearest(points, target: float) -> float | None:
    if not points:
        return None
    return min((p.omega for p in points), key=lambda w: abs(w - target))


# ------------------------------------------------------------------- tube test
NESTED_WINDOWS = ((1.05, 3.0), (1.05, 2.0), (1.05, 1.5), (1.05, 1.2))


def densify(P: np.ndarray, h: float = 2e-3) -> np.ndarray:
    """Insert points along a polyline so consecutive points are at most ``h`` apart."""
    if len(P) < 2:
        return P.copy()
    seg = np.diff(P, axis=0)
    k = np.maximum(1, np.ceil(np.linalg.norm(seg, axis=1) / h).astype(int))
    out = [P[:1]]
    for a, d, n in zip(P[:-1], seg, k):
        t = (np.arange(1, n + 1) / n)[:, None]
        out.append(a + t * d)
    return np.vstack(out)


def hausdorff(A: np.ndarray, B: np.ndarray, window: tuple[float, float], relative: bool = True) -> float:
    """Symmetric Hausdorff distance of the parts of A and B with omega in ``window``.

    Each restricted point is measured against the whole other set, so shrinking
    the window can only lower the value.  ``relative`` divides each distance by
    the norm of the point it is measured from.
    """
    lo, hi = window
    worst = 0.0
    for X, Y in ((A, B), (B, A)):
        sel = X[(X[:, 0] >= lo) & (X[:, 0] <= hi)]
        if len(sel) == 0:
            continue
        d, _ = cKDTree(Y).query(sel)
        if relative:
            d = d / np.linalg.norm(sel, axis=1)
        worst = max(worst, float(d.max()))
    return worst


@dataclass
class TubeReport:
    N: int
    window: tuple[float, float]
    distance: float
    nested: list[tuple[float, float, float]]
    curve: ContinuationCurve
    tree: object
    datasets: dict

    @property
    def nonincreasing(self) -> bool:
        ds = [d for _, _, d in self.nested]
        return all(b <= a for a, b in zip(ds, ds[1:])) and ds[-1] < ds[0]


def trace_primary(N: int, config: ContinuationConfig = GALERKIN_CONFIG) -> ContinuationCurve:
    system = AlgebraicSystem(diagonal_truncation(N))
    return trace_curve(system, trunk_point(system, FUNDAMENTAL, 1 + TRUNK_OFFSET, config), 1, config)


def compare_tree_vs_continuation(N: int, omega_window: tuple[float, float] = (1.05, 3.0),
                                 windows=NESTED_WINDOWS, curve: ContinuationCurve | None = None) -> TubeReport:
    """Relative Hausdorff distance in (Omega, sqrt E) between the traced primary curve and the tree."""
    if N not in (3, 4, 9):
        raise ValueError("comparison is defined for N in {3, 4, 9}")
    curve = curve or trace_primary(N)
    tree = build_tree(N)
    omax = GALERKIN_CONFIG.omega_max
    traced = densify(np.column_stack([curve.omegas(), np.sqrt(curve.energies())]))
    parts = []
    tree_rows = []
    for idx, e in enumerate(tree.elements):
        om, en, _ = e.sample(4000, omega_max=omax)
        if len(om) == 0:
            continue
        parts.append(densify(np.column_stack([om, np.sqrt(en)])))
        tree_rows += [[idx, w, v] for w, v in zip(om[::20], en[::20])] + [[idx, om[-1], en[-1]]]
    reference = np.vstack(parts)
    nested = [(lo, hi, hausdorff(traced, reference, (lo, hi))) for lo, hi in windows]
    distance = hausdorff(traced, reference, omega_window)
    ch, rows = curve_table(curve)
    overlay = [[0, -1, r[1], r[2]] for r in rows] + [[1] + r for r in tree_rows]
    datasets = {
        "traced": (ch, rows),
        "tree": (["element", "omega", "energy"], tree_rows),
        "overlay": (["source", "element", "omega", "energy"], overlay),
    }
    return TubeReport(N, omega_window, distance, nested, curve, tree, datasets)


# ----------------------------------------------------------------- fig 2 and 3
def _fig2() -> Study:
    modes = ModeSet([(0, 0), (1, 2)])
    sol = n_mode_solution(modes)
    iv = sol.domain[0]
    system = AlgebraicSystem(modes)
    cfg = ContinuationConfig(omega_min=0.9, omega_max=2.5, max_step=2e-2)
    trunk = trace_curve(system, trunk_point(system, (0, 0), 1 + TRUNK_OFFSET, cfg), 1, cfg)
    bps = detect_bifurcations(trunk, resolution=1e-10, config=cfg)
    upper = iv.hi.value
    bp = min(bps, key=lambda p: abs(p.omega - upper)) if bps else None
    switched = switch_branch(system, bp, cfg) if bp is not None else []
    ib = modes.index((1, 2))
    b_signs = sorted(int(np.sign(p.amplitudes[ib])) for p in switched)

    onset = Fraction(5, 3)
    sec = trace_curve(system, trunk_point(system, (1, 2), float(onset) + TRUNK_OFFSET, cfg), 1, cfg)
    sec_bps = detect_bifurcations(sec, resolution=1e-10, config=cfg)

    om = np.linspace(iv.lo.value, iv.hi.value, 400)
    en = np.array([sol.energy(w) for w in om]) / math.pi
    elo, ehi = primary_energy_bounds(1, 2)
    exact_ends = (sol.energy_over_pi(iv.lo.square), sol.energy_over_pi(iv.hi.square))
    pairs = {"(m,n)=(1,2)": str(Fraction(5, 3)), "(m,n)=(2,1)": str(Fraction(3, 5))}
    values = {
        "lower_sq": iv.lo.square,
        "upper_sq": iv.hi.square,
        "onset": Fraction(ModeIndex(1, 2).spatial, ModeIndex(1, 2).temporal),
        "attachments": _ends(sol),
        "energy_decreasing": bool(np.all(np.diff(en) < 0)),
        "energy_bounds": exact_ends == (ehi, elo),
        "shoot": exact_ends[0] == shoot_of_primary_branch(1, 2).energy_over_pi,
        "trunk_bifurcation": None if bp is None else abs(bp.omega - upper),
        "switch_signs": b_signs,
        "secondary_bifurcation": None if _nearest(sec_bps, iv.lo.value) is None
        else abs(_nearest(sec_bps, iv.lo.value) - iv.lo.value),
        "caption_labels": pairs["(m,n)=(1,2)"] == str(onset) and pairs["(m,n)=(2,1)"] != str(onset),
    }
    datasets = {
        "primary_trunk": element_table(_element(ModeSet([(0, 0)])), 200, 2.5),
        "secondary_trunk": element_table(_element(ModeSet([(1, 2)])), 200, 2.5),
        "branch": element_table(_element(modes, sol), 200, 2.5),
        "trunk_trace": curve_table(trunk),
    }
    notes = [
        "Fig. 2 caption labels the case (n,m)=(1,2); the secondary onset 5/3 = (2n+1)/(2m+1) "
        "requires (m,n)=(1,2), which is what is computed here."
    ]
    metrics = {"trunk_bifurcations": [p.omega for p in bps], "secondary_bifurcations": [p.omega for p in sec_bps]}
    return Study(values, datasets, notes, metrics)


FIG2_CLAIMS = (
    ClaimSpec("lower_sq", "branch domain lower end Omega^2", "Fig. 2", Fraction(97, 33)),
    ClaimSpec("upper_sq", "branch domain upper end Omega^2", "Fig. 2", Fraction(71, 23)),
    ClaimSpec("onset", "secondary (1,2) trunk leaves zero at Omega = 5/3", "Fig. 2 caption", Fraction(5, 3)),
    ClaimSpec("attachments", "branch connects the (1,2) trunk (low end) to the primary trunk (high end)",
              "Fig. 2", [[[1, 2]], [[0, 0]]]),
    ClaimSpec("energy_decreasing", "energy decreases with Omega along the branch", "Fig. 2"),
    ClaimSpec("energy_bounds", "branch energy spans exactly the closed-form bounds", "Fig. 2"),
    ClaimSpec("shoot", "high-energy end is the shoot on the secondary trunk", "Fig. 2 (red dot)"),
    ClaimSpec("trunk_bifurcation", "trunk bifurcation recovered by continuation to 1e-8", "Fig. 2 (blue dot)",
              1e-8, below),
    ClaimSpec("switch_signs", "branch switching gives two starts with B of opposite sign", "Fig. 2", [-1, 1]),
    ClaimSpec("secondary_bifurcation", "secondary-trunk bifurcation recovered to 1e-8", "Fig. 2 (red dot)",
              1e-8, below),
    ClaimSpec("caption_labels", "onset 5/3 fixes the label (m,n)=(1,2), not (2,1)", "Fig. 2 caption"),
)


def _fig3() -> Study:
    b1, b2 = ModeIndex(1, 3), ModeIndex(3, 8)
    modes = ModeSet([FUNDAMENTAL, b1, b2])
    sol = n_mode_solution(modes)
    iv = sol.domain[0]
    system = AlgebraicSystem(modes)
    worst = 0.0
    for w in np.linspace(iv.lo.value, iv.hi.value, 50)[1:-1]:
        worst = max(worst, system.residual_norm(w, sol.amplitudes(w)))
    secondary = n_mode_solution([b1, b2])
    primary = n_mode_solution([FUNDAMENTAL, b1])
    case = 2 if eta_B(b2.m, b1.m) > 0 else 3 if eta_B(b1.m, b2.m) > 0 else 1
    values = {
        "reducible": is_reducible(modes),
        "interval": [iv.lo.square, iv.hi.square],
        "case": case,
        "closed_form": three_mode_closed_form(b1, b2) == sol.coeff_sq,
        "attachments": _ends(sol),
        "residual": worst,
        "connections_exist": bool(secondary.domain and primary.domain
                                  and secondary.domain[0].contains_square(iv.lo.square)
                                  and primary.domain[0].contains_square(iv.hi.square)),
    }
    om = 2.6
    datasets = {
        "three_mode": element_table(_element(modes, sol), 200, om),
        "secondary_branch": element_table(_element(ModeSet([b1, b2])), 200, om),
        "primary_branch": element_table(_element(ModeSet([FUNDAMENTAL, b1])), 200, om),
    }
    return Study(values, datasets)


FIG3_CLAIMS = (
    ClaimSpec("reducible", "{(0,0),(1,3),(3,8)} is reducible", "Fig. 3"),
    ClaimSpec("interval", "three-mode frequency interval (Omega^2 ends)", "Fig. 3",
              [Fraction(269, 45), Fraction(1823, 303)]),
    ClaimSpec("case", "eta_B(m2,m1) > 0 > eta_B(m1,m2)", "Fig. 3", 2),
    ClaimSpec("closed_form", "general N-mode formula agrees with the eta_A / eta_B form", "Fig. 3"),
    ClaimSpec("attachments", "connects the {(1,3),(3,8)} branch to the {(0,0),(1,3)} branch", "Fig. 3",
              [[[1, 3], [3, 8]], [[0, 0], [1, 3]]]),
    ClaimSpec("residual", "closed form solves the assembled Galerkin system", "Fig. 3", 1e-10, below),
    ClaimSpec("connections_exist", "both connected branches exist at the attachment frequencies", "Fig. 3"),
)


# ---------------------------------------------------------------------- fig 4
_FIG4_COUNTS = {3: {"branches": 1}, 4: {"branches": 3},
                9: {"branches": 30, "primary": 28, "secondary": 1, "order3": 1}}


def _fig4(N: int) -> Callable[[], Study]:
    def compute() -> Study:
        tree = build_tree(N)
        s = tree.stats
        values = {
            "branches": s["branches"],
            "primary": s["primary"],
            "secondary": s["secondary"],
            "order3": s["by_order"].get("3", 0),
        }
        metrics = {"stats_line": tree.stats_line()}
        datasets = {}
        if N in (3, 4):
            rep = compare_tree_vs_continuation(N)
            values["tube"] = rep.distance
            values["tube_nested"] = rep.nonincreasing
            metrics["nested"] = [list(x) for x in rep.nested]
            datasets = rep.datasets
        else:
            trip = [e for e in tree.branches if e.order == 3]
            values["order3_type"] = [e.type_tag.as_pairs() for e in trip]
            values["order3_in_window"] = all(1.05 <= e.interval.lo.value and e.interval.hi is not None
                                             and e.interval.hi.value <= 3.0 for e in trip)
            rows = []
            for idx, e in enumerate(tree.elements):
                om, en, _ = e.sample(200, omega_max=3.2)
                rows += [[idx, w, v] for w, v in zip(om, en)]
            datasets = {"tree": (["element", "omega", "energy"], rows)}
        return Study(values, datasets, metrics=metrics)
    return compute


def _fig4_claims(N: int) -> tuple[ClaimSpec, ...]:
    out = [ClaimSpec(k, f"N={N} tree: number of {k} branches" if k != "branches" else f"N={N} tree: branch count",
                     "Fig. 4 (middle column)", v) for k, v in _FIG4_COUNTS[N].items()]
    if N in (3, 4):
        radius = 0.05 if N == 3 else 0.1
        out.append(ClaimSpec("tube", f"traced N={N} curve stays within relative {radius} of the tree on [1.05, 3]",
                             "Fig. 4 (right column)", radius, below))
        out.append(ClaimSpec("tube_nested", "tube distance shrinks over windows approaching Omega = 1",
                             "Fig. 4"))
    else:
        out.append(ClaimSpec("order3_type", "the order-3 branch is {(0,0),(1,3),(3,8)}", "Fig. 4 / Fig. 5",
                             [[[0, 0], [1, 3], [3, 8]]]))
        out.append(ClaimSpec("order3_in_window", "order-3 branch region lies inside the plotted window",
                             "Fig. 5 caption"))
    return tuple(out)


# ---------------------------------------------------------------------- fig 5
def _fig5() -> Study:
    curve = trace_primary(4)
    om, en = curve.omegas(), curve.energies()
    tree = build_tree(4)
    gaps = {}
    for e in tree.branches:
        if not e.is_primary_branch:
            continue
        other = next(x for x in e.type_tag if x != FUNDAMENTAL)
        sh = shoot_of_primary_branch(other.m, other.n)
        near = np.abs(om - sh.omega.value) < 1e-2
        gaps[other.tag()] = float(abs(en[near].max() - sh.energy) / sh.energy) if near.any() else None
    values = {
        "loops": curve.marker_kinds().count("closed-loop") >= 1,
        "shoots": max((g for g in gaps.values() if g is not None), default=None)
        if all(g is not None for g in gaps.values()) else None,
        "order3_first": (build_tree(8).stats["by_order"].get("3", 0), build_tree(9).stats["by_order"].get("3", 0)),
    }
    values["order3_first"] = list(values["order3_first"])
    zoom = [r for r in curve_table(curve)[1] if 1.38 <= r[1] <= 1.46]
    datasets = {"N4_zoom": (curve_table(curve)[0], zoom)}
    for e in tree.branches:
        if e.interval.lo.value < 1.46:
            datasets["N4_branch_" + "_".join(x.tag() for x in e.type_tag)] = element_table(e, 200, 1.46)
    return Study(values, datasets, metrics={"shoot_gaps": gaps})


FIG5_CLAIMS = (
    ClaimSpec("loops", "the traced N=4 curve resolves branches into closed loops", "Fig. 5"),
    ClaimSpec("shoots", "traced energy peaks match every primary shoot within 5% relative", "Fig. 5", 0.05, below),
    ClaimSpec("order3_first", "N=9 is the smallest truncation with an order-3 branch", "Fig. 5 caption", [0, 1]),
)


# ---------------------------------------------------------------------- fig 6
PRINTED_SYSTEMS = {
    # variable -> mode, then per equation variable: {monomial: coefficient} with linear part (const, Omega^2)
    "pert": (
        {"A": (0, 0), "B": (1, 2), "C": (0, 1)},
        {
            "A": ({"AAA": 9, "AAC": -9, "ABB": 12, "ABC": -6, "ACC": 18, "BCC": 3}, (16, -16)),
            "B": ({"BBB": 9, "AAB": 12, "BCC": 12, "AAC": -3, "ACC": 3}, (400, -144)),
            "C": ({"CCC": 9, "AAC": 18, "BBC": 12, "ABC": 6, "AAA": -3, "AAB": -3}, (144, -16)),
        },
    ),
    "v11": (
        {"A": (0, 0), "B": (1, 2), "C": (1, 1)},
        {
            "A": ({"AAA": 9, "AAC": -3, "ABB": 12, "ACC": 12, "ABC": -12}, (16, -16)),
            "B": ({"BBB": 9, "AAB": 12, "BCC": 18, "AAC": -6}, (400, -144)),
            "C": ({"CCC": 9, "AAC": 12, "BBC": 18, "AAA": -1, "AAB": -6}, (144, -144)),
        },
    ),
    "v10": (
        {"A": (0, 0), "B": (1, 2), "C": (1, 0)},
        {
            "A": ({"AAA": 9, "AAC": 9, "ABB": 12, "ACC": 18}, (16, -16)),
            "B": ({"BBB": 9, "AAB": 12, "BCC": 18}, (400, -144)),
            "C": ({"CCC": 9, "AAC": 18, "BBC": 18, "AAA": 3}, (16, -144)),
        },
    ),
    "ladder": (
        {"A": (0, 0), "B": (2, 4), "P": (0, 1), "Q": (1, 2)},
        {
            "A": ({"AAA": 9, "AAP": -9, "ABB": 12, "APP": 18, "AQQ": 12, "APQ": -6,
                   "BPQ": -6, "PPQ": 3, "BQQ": 3}, (16, -16)),
            "B": ({"BBB": 9, "AAB": 12, "BPP": 12, "BQQ": 12, "AQQ": 3, "APQ": -6}, (1296, -400)),
            "P": ({"PPP": 9, "AAP": 18, "BBP": 12, "PQQ": 12, "APQ": 6, "AAQ": -3, "ABQ": -6, "AAA": -3},
                  (144, -16)),
            "Q": ({"QQQ": 9, "AAQ": 12, "BBQ": 12, "PPQ": 12, "ABQ": 6, "AAP": -3, "APP": 3, "ABP": -6},
                  (400, -144)),
        },
    ),
}


def printed_system_matches(name: str) -> bool:
    """Compare a printed equation list with the assembled integer coefficients."""
    names, eqs = PRINTED_SYSTEMS[name]
    system = AlgebraicSystem(ModeSet(names.values()))
    idx = {v: system.span.index(m) for v, m in names.items()}
    table = system.cubic_table()
    want = {}
    lin = system.linear_coefficients()
    for var, (monos, linear) in eqs.items():
        k = idx[var]
        if tuple(lin[k]) != linear:
            return False
        for mono, c in monos.items():
            want[(k, tuple(sorted(idx[v] for v in mono)))] = c
    return want == table


def forced_residual(system: AlgebraicSystem, point) -> float:
    """Smallest residual obtained by zeroing one non-fundamental amplitude of ``point``.

    A value far above the corrector tolerance means no such amplitude can vanish
    on the curve.
    """
    worst = math.inf
    for i, mode in enumerate(system.span):
        if mode == FUNDAMENTAL:
            continue
        a = point.amplitudes.copy()
        a[i] = 0.0
        worst = min(worst, system.residual_norm(point.omega, a))
    return worst


def _fig6() -> Study:
    values = {}
    datasets = {}
    metrics = {}
    for name, (text, _) in PERTURBED.items():
        system = AlgebraicSystem(_modes(text))
        start = trunk_point(system, FUNDAMENTAL, 1.1, PERTURBATION_CONFIG)
        curve = trace_curve(system, start, 1, PERTURBATION_CONFIG)
        values[f"{name}_printed"] = printed_system_matches(name)
        values[f"{name}_loop"] = curve.closed
        values[f"{name}_mixing"] = forced_residual(system, start)
        datasets[name] = curve_table(curve)
        metrics[name] = {"points": len(curve.points), "markers": [m.to_dict() for m in curve.markers]}
    system = AlgebraicSystem(_modes(PERTURBED["pert"][0]))
    p = trunk_point(system, FUNDAMENTAL, 1.1, PERTURBATION_CONFIG)
    a = p.amplitudes
    flip = a.copy()
    flip[system.span.index((1, 2))] *= -1
    values["pert_z2"] = bool(np.array_equal(system.residual(p.omega, -a), -system.residual(p.omega, a)))
    values["pert_no_quarter"] = system.residual_norm(p.omega, flip) > 1e-6
    return Study(values, datasets, metrics=metrics)


FIG6_CLAIMS = (
    ClaimSpec("pert_printed", "assembled equations equal the printed perturbed system", "Fig. 6"),
    ClaimSpec("pert_loop", "trace from the trunk closes a loop", "Fig. 6 (solid blue)"),
    ClaimSpec("pert_mixing", "B and C cannot vanish on the trunk: zeroing either leaves a residual above 1e-8",
              "Fig. 6", 1e-8, lambda c, e: c > e),
    ClaimSpec("pert_z2", "overall u -> -u symmetry holds exactly", "Fig. 6"),
    ClaimSpec("pert_no_quarter", "the (A,B) -> (A,-B) symmetry of the reducible pair is broken", "Fig. 6"),
    ClaimSpec("v11_printed", "assembled equations equal the printed cos(3tau)sin(3x) variant", "Fig. 6 text"),
    ClaimSpec("v11_loop", "cos(3tau)sin(3x) perturbation also closes a loop", "Fig. 6 text"),
    ClaimSpec("v10_printed", "assembled equations equal the printed cos(3tau)sin(x) variant", "Fig. 6 text"),
    ClaimSpec("v10_loop", "cos(3tau)sin(x) perturbation does not close a loop", "Fig. 6 text", False),
    ClaimSpec("ladder_printed", "assembled equations equal the printed ladder system (C1^2 term in the last line)",
              "Fig. 6 text"),
    ClaimSpec("ladder_loop", "the C1/C2 ladder closes a loop", "Fig. 6 text"),
    ClaimSpec("ladder_mixing", "B, C1, C2 cannot vanish on the trunk: zeroing any leaves a residual above 1e-8",
              "Fig. 6 text", 1e-8, lambda c, e: c > e),
)


# ------------------------------------------------------------- appendix cases
def _y() -> IntPolynomial:
    return IntPolynomial([0, 1])


def case1_cubic(y) -> IntPolynomial:
    return poly(35721, -54432 * (y + 1), 20736 * (y * y + 2 * y + 29), -2048 * (y - 1) ** 3)


def case3_cubic(y) -> IntPolynomial:
    return poly(35721, 54432 * (y + 1), 20736 * (29 * y * y + 2 * y + 1), -2048 * (y - 1) ** 3)


def case3_cubic_as_printed(y) -> IntPolynomial:
    return poly(35721, 54432 * (y + 1), 20736 * (29 * y * y + 2 * y + 1) ** 2, -2048 * (y - 1) ** 3)


def case4_cubic(y) -> IntPolynomial:
    return poly(24759, 485568 * (y - 1), 5577984 * (y - 1) ** 2, -2048 * (y - 1) ** 3)


CASE4_DISCRIMINANT = -9853595053368871187644416 * (_y() - 1) ** 6
CASE1_QUARTIC = poly(1, -4, -186, -132, -2751)
CASE1_DISCRIMINANT = 20643001562824704 * (_y() + 23) ** 2 * CASE1_QUARTIC
CASE1_SEXTIC = poly(1, 6, -84, 40, 2328, -6588, 4902)


def pair_equations(mode, B: Fraction, y: Fraction) -> tuple[IntPolynomial, IntPolynomial]:
    """Equations of the {(0,0), mode} system as polynomials in A at fixed B and Omega^2 = y.

    The first is the A-equation divided by A (every monomial of it contains A).
    """
    system = AlgebraicSystem([FUNDAMENTAL, mode])
    ia = system.span.index(FUNDAMENTAL)
    lin = system.linear_coefficients()
    eqs = []
    for k in (ia, 1 - ia):
        c = [Fraction(0)] * 4
        c0, c2 = lin[k]
        if k == ia:
            c[1] += c0 + c2 * y
        else:
            c[0] += (c0 + c2 * y) * B
        for (kk, trip), v in system.cubic_table().items():
            if kk == k:
                da = trip.count(ia)
                c[da] += v * B ** (3 - da)
        eqs.append(IntPolynomial(c))
    g = eqs[0]
    if g.coeffs and g.coeffs[0] != 0:
        raise ValueError("A-equation has a term without A")
    return IntPolynomial(g.coeffs[1:]), eqs[1]


def eliminated_in_B(mode, y: Fraction) -> IntPolynomial:
    """Resultant in A of the two equations, as an exact polynomial in B (degree <= 12)."""
    pts = [(b, resultant(*pair_equations(mode, Fraction(b), y))) for b in range(1, 16)]
    r = interpolate(pts[:13])
    if any(r(b) != v for b, v in pts[13:]):
        raise AssertionError("elimination degree bound exceeded")
    return r


def matches_elimination(mode, family, nodes=(Fraction(1, 3), Fraction(3), Fraction(7, 2), Fraction(20))) -> bool:
    """family(y)(B^2) divides the eliminant with a constant quotient at every node."""
    for y in nodes:
        q, r = divmod(eliminated_in_B(mode, y), family(y).substitute_square())
        if not r.is_zero() or q.degree != 0:
            return False
    return True


def sign_on(p: IntPolynomial, lo: Fraction, hi: Fraction | None) -> int | None:
    """Constant sign of p on the open interval (lo, hi), or None if it changes."""
    if p.is_zero():
        return 0
    sq = squarefree_part(p)
    b = math.inf if hi is None else hi
    roots = sturm_count(sq, lo, b) - (1 if hi is not None and sq(hi) == 0 else 0)
    if roots:
        return None
    probe = lo + 1 if hi is None else (lo + hi) / 2
    v = p(probe)
    return (v > 0) - (v < 0)


def descartes_on(family_coeffs: list[IntPolynomial], lo: Fraction, hi: Fraction | None) -> int | None:
    """Sign variations of a polynomial whose coefficients are polynomials in y, valid on all of (lo, hi)."""
    signs = [sign_on(c, lo, hi) for c in family_coeffs]
    if any(s is None for s in signs):
        return None
    nz = [s for s in signs if s]
    return sum(1 for a, b in zip(nz, nz[1:]) if a != b)


def diagonal_pair_solution(mode) -> BranchSolution:
    """Two-mode solution of a pair whose cubic part is a_k sum_j K_kj a_j^2 (no mixed monomials)."""
    span = ModeSet([FUNDAMENTAL, mode])
    K = AlgebraicSystem(span).coupling_matrix
    if K is None:
        raise ValueError(f"{span} has mixed monomials")
    (a, b), (c, d) = K.tolist()
    det = Fraction(a * d - b * c)
    rhs = [(-16 * x.spatial**2, 16 * x.temporal**2) for x in span]  # (const, slope) of 16(M^2 y - N^2)
    s0 = ((d * rhs[0][1] - b * rhs[1][1]) / det, (d * rhs[0][0] - b * rhs[1][0]) / det)
    s1 = ((a * rhs[1][1] - c * rhs[0][1]) / det, (a * rhs[1][0] - c * rhs[0][0]) / det)
    return BranchSolution(span, (s0, s1))


def appendix_case(m: int, n: int) -> str:
    if (m, n) == (0, 0):
        raise ValueError("the partner mode must differ from (0,0)")
    if (m, n) == (0, 1):
        return "1"
    if m == 0:
        return "2"
    if (m, n) == (1, 0):
        return "3"
    if (m, n) == (1, 1):
        return "4"
    if n == 0:
        return "5"
    return "reducible"


@dataclass(frozen=True)
class TheoremRow:
    mode: ModeIndex
    case: str
    expected: bool  # extra bifurcation on the primary trunk above Omega = 1
    established: bool | None
    method: str

    @property
    def holds(self) -> bool:
        return self.established is not None and self.established == self.expected


def _case1_facts() -> dict:
    y = _y()
    disc = parametric_discriminant(case1_cubic, 6)
    roots = isolate_roots(CASE1_QUARTIC, Fraction(1, 10**12), 0, None)
    ystar = roots[0] if len(roots) == 1 else None
    p, q = Fraction(-8) * (y**4 + 12 * y**3 - 160 * y + 202), 81 - 6 * y * (y + 7)
    h2a = [-Fraction(256, 9) * (y * y + 4 * y - 15) ** 2, 16 * (3 * y * y + 10 * y - 38), IntPolynomial([-18])]
    h2b = [64 * (2 * y**3 + 9 * y * y - 26 * y - 15), 36 * (y * y + 2 * y - 16), IntPolynomial([-27])]
    comb = [h2b[0] * h2a[i] - h2a[0] * h2b[i] for i in range(3)]
    comb_ok = comb[0].is_zero() and divmod(comb[2], q)[1].is_zero() and divmod(comb[1], -p)[1].is_zero() \
        and divmod(comb[2], q)[0] == divmod(comb[1], -p)[0]
    numerator = h2b[2] * p * p + h2b[1] * p * q + h2b[0] * q * q
    quot, rem = divmod(numerator, poly(2, 1) * CASE1_SEXTIC)
    sextic_roots = isolate_roots(CASE1_SEXTIC, Fraction(1, 10**9))
    facts = {
        "cubic": matches_elimination((0, 1), case1_cubic),
        "discriminant": disc == CASE1_DISCRIMINANT,
        "descartes": descartes_positive_bound(CASE1_QUARTIC),
        "quartic_positive_roots": sturm_count(CASE1_QUARTIC, 0),
        "omega_star": None if ystar is None else math.sqrt(float(ystar.midpoint)),
        "omega_star_bracket": ystar is not None and 16 < ystar.lo and ystar.hi < 17,
        "counts": None if ystar is None else [sturm_count(case1_cubic(ystar.lo), 0), sturm_count(case1_cubic(ystar.hi), 0)],
        "combination": comb_ok,
        "sextic_factor": rem.is_zero() and quot.degree == 0,
        "sextic_squarefree": gcd(CASE1_SEXTIC, CASE1_SEXTIC.derivative()).degree == 0,
        "sextic_real": sturm_count(CASE1_SEXTIC),
        "sextic_positive": sturm_count(CASE1_SEXTIC, 0),
        "sextic_signs": [CASE1_SEXTIC.sign_at(Fraction(v)) for v in (-12, -10, 0)],
        "sextic_in_range": sturm_count(CASE1_SEXTIC, -12, -10),
        "sextic_roots": [float(r.midpoint) for r in sextic_roots],
    }
    return facts


def theorem_row(m: int, n: int) -> TheoremRow:
    """Decide from exact data whether the primary trunk of {(0,0),(m,n)} has an extra bifurcation above 1."""
    mode = ModeIndex(m, n)
    case = appendix_case(m, n)
    expected = m >= 1 and n >= 1 and n > m
    one = Fraction(1)
    if case == "reducible":
        sol = n_mode_solution([FUNDAMENTAL, mode])
        est = False
        if sol.domain:
            iv = sol.domain[0]
            ends = [(iv.lo.square, attachments(sol, iv)[0])]
            if iv.hi is not None:
                ends.append((iv.hi.square, attachments(sol, iv)[1]))
            est = any(w > one and e == ModeSet([FUNDAMENTAL]) for w, e in ends)
        return TheoremRow(mode, case, expected, est, "closed-form domain and end attachments")
    if case in ("2", "5"):
        sol = diagonal_pair_solution(mode)
        ib = sol.mode_set.index(mode)
        p, q = sol.coeff_sq[ib]
        if not sol.domain:
            return TheoremRow(mode, case, expected, False, "positivity domain empty")
        lo = sol.domain[0].lo.square
        # B^2 = p y + q never vanishes on the domain, so the solution never meets B = 0
        est = not (p > 0 and p * lo + q > 0)
        return TheoremRow(mode, case, expected, est, "positivity domain; B^2 > 0 on it")
    if case == "3":
        y = _y()
        fam = [IntPolynomial([35721]), 54432 * (y + 1), 20736 * (29 * y * y + 2 * y + 1), -2048 * (y - 1) ** 3]
        below1, above1 = descartes_on(fam, Fraction(0), one), descartes_on(fam, one, None)
        ok = matches_elimination(mode, case3_cubic) and below1 == 0 and above1 == 1
        return TheoremRow(mode, case, expected, False if ok else None, "Descartes count 0 below 1, 1 above")
    if case == "4":
        ok = matches_elimination(mode, case4_cubic) and parametric_discriminant(case4_cubic, 6) == CASE4_DISCRIMINANT
        return TheoremRow(mode, case, expected, False if ok else None, "discriminant -c (Omega^2-1)^6 < 0")
    f = _case1_facts()
    ok = (f["cubic"] and f["discriminant"] and f["quartic_positive_roots"] == 1 and f["omega_star_bracket"]
          and f["sextic_factor"] and f["sextic_real"] == 2 and f["sextic_positive"] == 0)
    return TheoremRow(mode, case, expected, False if ok else None, "Sturm counts of the quartic and sextic")


def theorem_table(max_index: int = 5) -> list[TheoremRow]:
    return [theorem_row(m, n) for m in range(max_index + 1) for n in range(max_index + 1) if (m, n) != (0, 0)]


def _primary_trunk_bifurcations(mode, omega_max: float = 6.0) -> list[float]:
    system = AlgebraicSystem([FUNDAMENTAL, mode])
    cfg = ContinuationConfig(omega_min=0.9, omega_max=omega_max, max_step=2e-2)
    curve = trace_curve(system, trunk_point(system, FUNDAMENTAL, 1 + TRUNK_OFFSET, cfg), 1, cfg)
    return [p.omega for p in detect_bifurcations(curve, config=cfg)]


def _theorem_values(case: str) -> dict:
    rows = [r for r in theorem_table() if r.case == case]
    return {"theorem": all(r.holds for r in rows), "theorem_pairs": [[r.mode.m, r.mode.n] for r in rows]}


def _appendix1() -> Study:
    f = _case1_facts()
    values = {k: f[k] for k in ("cubic", "discriminant", "descartes", "quartic_positive_roots", "omega_star_bracket",
                                "counts", "combination", "sextic_factor", "sextic_squarefree", "sextic_real",
                                "sextic_positive", "sextic_signs", "sextic_in_range")}
    system = AlgebraicSystem([FUNDAMENTAL, (0, 1)])
    cfg = ContinuationConfig(omega_min=2.9, omega_max=5.0, max_step=2e-2)
    sec = trace_curve(system, trunk_point(system, (0, 1), 3 + TRUNK_OFFSET, cfg), 1, cfg)
    bps = detect_bifurcations(sec, resolution=1e-10, config=cfg)
    target = math.sqrt(17)
    near = _nearest(bps, target)
    values["secondary_bifurcation"] = None if near is None else abs(near - target)
    bp = min(bps, key=lambda p: abs(p.omega - target)) if bps else None
    values["two_branches"] = 0 if bp is None else len(switch_branch(system, bp, cfg))
    values["trunk_bifurcations"] = len(_primary_trunk_bifurcations((0, 1)))
    values.update(_theorem_values("1"))
    metrics = {"omega_star": f["omega_star"], "sextic_roots": f["sextic_roots"]}
    return Study(values, {"secondary_trunk": curve_table(sec)}, metrics=metrics)


APPENDIX1_CLAIMS = (
    ClaimSpec("cubic", "cubic in B^2 equals the eliminant of the two equations", "Appendix Case 1"),
    ClaimSpec("discriminant", "discriminant factors as c (y+23)^2 (y^4-4y^3-186y^2-132y-2751)", "Appendix Case 1"),
    ClaimSpec("descartes", "Descartes bound for the quartic is one positive root", "Appendix Case 1", 1),
    ClaimSpec("quartic_positive_roots", "Sturm count of positive quartic roots", "Appendix Case 1", 1),
    ClaimSpec("omega_star_bracket", "Omega_* lies in (4, sqrt 17)", "Appendix Case 1"),
    ClaimSpec("counts", "positive B^2 roots: 1 just below Omega_*, 3 just above", "Appendix Case 1", [1, 3]),
    ClaimSpec("combination", "the A^2 relation is a combination of the two hyperboloid equations",
              "Appendix Case 1"),
    ClaimSpec("sextic_factor", "hyperboloid eliminant equals c (2 Omega + 1) times the sextic", "Appendix Case 1"),
    ClaimSpec("sextic_squarefree", "sextic roots are simple (gcd with derivative is 1)", "Appendix Case 1"),
    ClaimSpec("sextic_real", "sextic has exactly two real roots", "Appendix Case 1", 2),
    ClaimSpec("sextic_positive", "sextic has no positive roots", "Appendix Case 1", 0),
    ClaimSpec("sextic_signs", "sextic signs at Omega = -12, -10, 0", "Appendix Case 1", [1, -1, 1]),
    ClaimSpec("sextic_in_range", "one sextic root in (-12, -10]", "Appendix Case 1", 1),
    ClaimSpec("secondary_bifurcation", "continuation finds the secondary-trunk bifurcation at sqrt 17 (1e-8)",
              "Appendix Case 1", 1e-8, below),
    ClaimSpec("two_branches", "two branches bifurcate at sqrt 17", "Appendix Case 1", 2),
    ClaimSpec("trunk_bifurcations", "no bifurcation on the primary trunk for Omega in (1, 6)", "Appendix Case 1", 0),
    ClaimSpec("theorem", "no extra bifurcation on the primary trunk (theorem, case 1)", "Appendix theorem"),
)


def _appendix2() -> Study:
    values = {}
    rows = []
    ok_domain = ok_ends = ok_form = ok_dist = True
    for n in range(2, 6):
        mode = ModeIndex(0, n)
        sol = diagonal_pair_solution(mode)
        iv = sol.domain[0]
        N2 = 4 * n * n + 4 * n
        c = Fraction(16, 27)
        ok_form &= sol.coeff_sq == ((c, -c * (2 * N2 + 1)), (c, c * (N2 - 1)))
        ok_domain &= iv.lo.square == 2 * N2 + 1 and iv.hi is None
        ok_ends &= attachments(sol, iv)[0] == ModeSet([mode])
        om = np.linspace(iv.lo.value, iv.lo.value + 3.0, 200)
        for w in om:
            a = sol.amplitudes(w)
            rows.append([n, w, sol.energy(w), a[0], a[1]])
        dmin = min(math.hypot(sol.amplitudes(w)[0] - 4 / 3 * math.sqrt(w * w - 1), sol.amplitudes(w)[1]) for w in om)
        ok_dist &= dmin > 0
    values["domain"] = ok_domain
    values["closed_form"] = ok_form
    values["attaches_secondary"] = ok_ends
    values["never_crosses"] = ok_dist
    values["trunk_bifurcations"] = len(_primary_trunk_bifurcations((0, 2)))
    values.update(_theorem_values("2"))
    notes = ["The printed B amplitude of this case carries (Omega^2 - (4n^2+4n-1)); solving the system gives "
             "(Omega^2 + 4n^2 + 4n - 1), and the case concerns n >= 2 rather than m >= 2."]
    return Study(values, {"solutions": (["n", "omega", "energy", "a_0_0", "a_0_n"], rows)}, notes)


APPENDIX2_CLAIMS = (
    ClaimSpec("domain", "extra solution exists exactly for Omega^2 > 8n^2+8n+1 (n = 2..5)", "Appendix Case 2"),
    ClaimSpec("closed_form", "A^2, B^2 = 16/27 (Omega^2 - (8n^2+8n+1)), 16/27 (Omega^2 + 4n^2+4n-1)",
              "Appendix Case 2"),
    ClaimSpec("attaches_secondary", "it bifurcates from the secondary trunk", "Appendix Case 2"),
    ClaimSpec("never_crosses", "minimum distance to the primary trunk is positive on the sampled range",
              "Appendix Case 2"),
    ClaimSpec("trunk_bifurcations", "no bifurcation on the primary trunk of {(0,0),(0,2)}", "Appendix Case 2", 0),
    ClaimSpec("theorem", "no extra bifurcation on the primary trunk (theorem, case 2)", "Appendix theorem"),
)


def _appendix3() -> Study:
    y = _y()
    fam = [-2048 * (y - 1) ** 3, 20736 * (29 * y * y + 2 * y + 1), 54432 * (y + 1), IntPolynomial([35721])]
    values = {
        "cubic": matches_elimination((1, 0), case3_cubic),
        "printed_cubic": matches_elimination((1, 0), case3_cubic_as_printed),
        "below_one": descartes_on(fam, Fraction(0), Fraction(1)),
        "above_one": descartes_on(fam, Fraction(1), None),
        "roots_at_2": sturm_count(case3_cubic(Fraction(4)), 0),
        "trunk_bifurcations": len(_primary_trunk_bifurcations((1, 0))),
    }
    values.update(_theorem_values("3"))
    notes = ["The printed cubic of this case squares the factor (1 + 2 Omega^2 + 29 Omega^4); the eliminant of "
             "the two equations has it to the first power, and the sign argument is unchanged."]
    return Study(values, notes=notes)


APPENDIX3_CLAIMS = (
    ClaimSpec("cubic", "eliminant equals 35721b^3 + 54432(y+1)b^2 + 20736(29y^2+2y+1)b - 2048(y-1)^3",
              "Appendix Case 3"),
    ClaimSpec("printed_cubic", "the printed form with the squared factor is not the eliminant", "Appendix Case 3",
              False),
    ClaimSpec("below_one", "Descartes count on Omega < 1 is 0", "Appendix Case 3", 0),
    ClaimSpec("above_one", "Descartes count on Omega > 1 is 1", "Appendix Case 3", 1),
    ClaimSpec("roots_at_2", "one positive B^2 root at Omega = 2", "Appendix Case 3", 1),
    ClaimSpec("trunk_bifurcations", "no bifurcation on the primary trunk", "Appendix Case 3", 0),
    ClaimSpec("theorem", "no extra bifurcation on the primary trunk (theorem, case 3)", "Appendix theorem"),
)


def _appendix4() -> Study:
    y = _y()
    values = {
        "cubic": matches_elimination((1, 1), case4_cubic),
        "discriminant": parametric_discriminant(case4_cubic, 6) == CASE4_DISCRIMINANT,
        "real_roots": [sturm_count(case4_cubic(Fraction(v))) for v in (Fraction(1, 2), Fraction(2), Fraction(9))],
        "constant_sign": [sign_on(-2048 * (y - 1) ** 3, Fraction(0), Fraction(1)),
                          sign_on(-2048 * (y - 1) ** 3, Fraction(1), None)],
        "trunk_bifurcations": len(_primary_trunk_bifurcations((1, 1))),
    }
    values.update(_theorem_values("4"))
    return Study(values)


APPENDIX4_CLAIMS = (
    ClaimSpec("cubic", "eliminant equals the printed cubic in B^2", "Appendix Case 4"),
    ClaimSpec("discriminant", "discriminant equals -9853595053368871187644416 (Omega^2-1)^6", "Appendix Case 4"),
    ClaimSpec("real_roots", "a single real B^2 root away from Omega = 1", "Appendix Case 4", [1, 1, 1]),
    ClaimSpec("constant_sign", "value at B = 0 is positive below Omega = 1, negative above", "Appendix Case 4",
              [1, -1]),
    ClaimSpec("trunk_bifurcations", "no bifurcation on the primary trunk", "Appendix Case 4", 0),
    ClaimSpec("theorem", "no extra bifurcation on the primary trunk (theorem, case 4)", "Appendix theorem"),
)


def _appendix5() -> Study:
    ok_form = ok_empty = True
    for m in range(2, 6):
        sol = diagonal_pair_solution(ModeIndex(m, 0))
        c = Fraction(16, 27)
        M2 = 4 * m * m + 4 * m
        ok_form &= sol.coeff_sq == ((c * (2 * M2 + 1), -c), (c * (1 - M2), -c))
        ok_empty &= not sol.domain
    values = {
        "closed_form": ok_form,
        "empty": ok_empty,
        "trunk_bifurcations": len(_primary_trunk_bifurcations((2, 0))),
    }
    values.update(_theorem_values("5"))
    notes = ["The printed B equation of this case reads -(2m+1)^2 Omega^2 + 16; the projection gives "
             "-16 (2m+1)^2 Omega^2 + 16, which is what the printed closed form solves."]
    return Study(values, notes=notes)


APPENDIX5_CLAIMS = (
    ClaimSpec("closed_form", "A^2, B^2 = 16/27 ((8m^2+8m+1) Omega^2 - 1), 16/27 ((1-4m-4m^2) Omega^2 - 1)",
              "Appendix Case 5"),
    ClaimSpec("empty", "two-mode solution is never real for m = 2..5", "Appendix Case 5"),
    ClaimSpec("trunk_bifurcations", "no bifurcation on the primary trunk of {(0,0),(2,0)}", "Appendix Case 5", 0),
    ClaimSpec("theorem", "no extra bifurcation on the primary trunk (theorem, case 5)", "Appendix theorem"),
)


def _order4() -> Study:
    expected = [ModeSet([(0, 0), (1, 2), (5, 9), (20, 35)]), ModeSet([(0, 0), (1, 3), (3, 8), (14, 35)])]
    below = order_scan(4, 34)
    at = order_scan(4, 35)
    return Study({"below_35": [s.as_pairs() for s in below], "through_35": [s.as_pairs() for s in at],
                  "through_35_expected": at == expected})


ORDER4_CLAIMS = (
    ClaimSpec("below_35", "no order-4 type with all indices below 35", "order-4 types (main text)", []),
    ClaimSpec("through_35", "indices up to 35 give exactly the two lowest order-4 types", "order-4 types (main text)",
              [[[0, 0], [1, 2], [5, 9], [20, 35]], [[0, 0], [1, 3], [3, 8], [14, 35]]]),
    ClaimSpec("through_35_expected", "scan result equals the listed types", "order-4 types (main text)"),
)


SCENARIOS: dict[str, Scenario] = {
    s.scenario_id: s
    for s in (
        Scenario("fig2", "primary branch {(0,0),(1,2)}", FIG2_CLAIMS, _fig2),
        Scenario("fig3", "three-mode branch {(0,0),(1,3),(3,8)}", FIG3_CLAIMS, _fig3),
        Scenario("fig4-N3", "N=3 tree vs truncated Galerkin", _fig4_claims(3), _fig4(3)),
        Scenario("fig4-N4", "N=4 tree vs truncated Galerkin", _fig4_claims(4), _fig4(4)),
        Scenario("fig4-N9", "N=9 tree", _fig4_claims(9), _fig4(9)),
        Scenario("fig5-zoom", "zoom on loops and shoots", FIG5_CLAIMS, _fig5),
        Scenario("fig6-perturbation", "perturbed reducible systems", FIG6_CLAIMS, _fig6),
        Scenario("appendix-case1", "modes (0,0),(0,1)", APPENDIX1_CLAIMS, _appendix1),
        Scenario("appendix-case2", "modes (0,0),(0,n), n >= 2", APPENDIX2_CLAIMS, _appendix2),
        Scenario("appendix-case3", "modes (0,0),(1,0)", APPENDIX3_CLAIMS, _appendix3),
        Scenario("appendix-case4", "modes (0,0),(1,1)", APPENDIX4_CLAIMS, _appendix4),
        Scenario("appendix-case5", "modes (0,0),(m,0), m >= 2", APPENDIX5_CLAIMS, _appendix5),
        Scenario("order4-scan", "lowest order-4 types", ORDER4_CLAIMS, _order4),
    )
}


def scenario_ids() -> list[str]:
    return list(SCENARIOS)


def run_scenario(scenario_id: str, out_dir: Path | str | None = None) -> ScenarioReport:
    """Run one study; with ``out_dir`` write report.json and the CSV datasets there."""
    try:
        sc = SCENARIOS[scenario_id]
    except KeyError:
        raise UnknownScenarioError(scenario_id) from None
    study = sc.compute()
    claims = []
    for spec in sc.claims:
        got = study.values.get(spec.key)
        try:
            ok = bool(spec.check(got, spec.expected))
        except TypeError:
            ok = False
        claims.append(Claim(spec.key, spec.description, spec.reference, spec.expected, got, ok))
    report = ScenarioReport(scenario_id, claims, notes=list(study.notes), metrics=dict(study.metrics))
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for name, (header, rows) in sorted(study.datasets.items()):
            fname = f"{scenario_id}_{name}.csv"
            write_csv(out / fname, header, rows)
            report.artifacts.append(fname)
        report.artifacts.append("report.json")
        write_json(out / "report.json", report.to_dict())
    return report
