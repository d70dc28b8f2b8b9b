"""Pseudo-arc-length continuation in Omega for finite Galerkin systems.

The state is x = (a_1, ..., a_S, Omega).  A curve is traced with a tangent
predictor and a bordered Newton corrector; folds are sign changes of dOmega/ds,
branch points are sign changes of the determinant of the tangent-bordered
Jacobian [[dF/da, dF/dOmega], [t^T]], which is nonzero through regular folds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .galerkin import AlgebraicSystem, SolutionPoint
from .modes import as_mode


class NewtonError(RuntimeError):
    """Corrector failed to converge."""


class SingularSystemError(NewtonError):
    """The bordered Jacobian became numerically singular."""


@dataclass(frozen=True)
class ContinuationConfig:
    newton_tol: float = 1e-10
    max_newton_iters: int = 25
    initial_step: float = 1e-3
    min_step: float = 1e-8
    max_step: float = 5e-2
    max_points: int = 20000
    omega_min: float = 0.0
    omega_max: float = 6.0
    max_amplitude: float = 1e3
    switch_eps: float = 1e-3
    growth: float = 1.3
    min_cos_angle: float = 0.9
    max_correction: float = 0.5  # corrector displacement allowed, as a fraction of the step
    stop_on_loop: bool = True
    loop_min_fill: float = 1e-3

    def __post_init__(self) -> None:
        if not self.min_step <= self.initial_step <= self.max_step:
            raise ValueError("need min_step <= initial_step <= max_step")
        if self.omega_min >= self.omega_max:
            raise ValueError("empty omega window")


@dataclass(frozen=True)
class Marker:
    index: int
    kind: str  # fold | bifurcation-candidate | closed-loop | stall | window-exit
    partner: int | None = None  # for closed-loop: earlier segment the curve returns to

    def to_dict(self) -> dict:
        d = {"index": self.index, "kind": self.kind}
        if self.partner is not None:
            d["partner"] = self.partner
        return d


@dataclass
class ContinuationCurve:
    system: AlgebraicSystem
    points: list[SolutionPoint]
    markers: list[Marker] = field(default_factory=list)
    arclength: list[float] = field(default_factory=list)
    tangents: list[np.ndarray] = field(default_factory=list)
    test_signs: list[int] = field(default_factory=list)

    def states(self) -> np.ndarray:
        return np.array([p.state() for p in self.points])

    def omegas(self) -> np.ndarray:
        return np.array([p.omega for p in self.points])

    def energies(self) -> np.ndarray:
        return np.array([self.system.energy(p.omega, p.amplitudes) for p in self.points])

    def marker_kinds(self) -> list[str]:
        return [m.kind for m in self.markers]

    @property
    def closed(self) -> bool:
        return "closed-loop" in self.marker_kinds()


# ---------------------------------------------------------------- linear algebra
def _full_jacobian(system: AlgebraicSystem, x: np.ndarray) -> np.ndarray:
    Ja, dw = system.jacobian(x[-1], x[:-1])
    return np.column_stack([Ja, dw])


def _bordered(system: AlgebraicSystem, x: np.ndarray, row: np.ndarray) -> np.ndarray:
    return np.vstack([_full_jacobian(system, x), row])


def tangent_vector(system: AlgebraicSystem, x: np.ndarray, reference: np.ndarray | None = None) -> np.ndarray:
    """Unit null vector of [dF/da, dF/dOmega], oriented along ``reference`` if given."""
    if reference is None:
        _, _, vt = np.linalg.svd(_full_jacobian(system, x))
        t = vt[-1]
        return t / np.linalg.norm(t)
    K = _bordered(system, x, reference)
    rhs = np.zeros(len(x))
    rhs[-1] = 1.0
    t = np.linalg.solve(K, rhs)
    return t / np.linalg.norm(t)


def bordered_determinant_sign(system: AlgebraicSystem, x: np.ndarray, t: np.ndarray) -> int:
    sign, _ = np.linalg.slogdet(_bordered(system, x, t))
    return int(sign)


# ---------------------------------------------------------------------- corrector
def newton_correct(
    system: AlgebraicSystem,
    guess,
    constraint: tuple[np.ndarray, float],
    config: ContinuationConfig = ContinuationConfig(),
) -> tuple[SolutionPoint, int]:
    """Solve F = 0 together with the affine condition c.x = c0 by Newton's method.

    ``guess`` is a SolutionPoint or a state vector (amplitudes..., omega).
    Returns the corrected point and the number of Newton steps taken.
    """
    x = guess.state() if isinstance(guess, SolutionPoint) else np.array(guess, dtype=float)
    c, c0 = np.asarray(constraint[0], dtype=float), float(constraint[1])
    if c.shape != x.shape:
        raise ValueError("constraint does not match the state dimension")
    tol = config.newton_tol
    for it in range(config.max_newton_iters + 1):
        F = system.residual(x[-1], x[:-1])
        g = float(c @ x - c0)
        if not np.all(np.isfinite(F)):
            raise NewtonError("residual overflow")
        if np.max(np.abs(F)) < tol and abs(g) < tol:
            return SolutionPoint(float(x[-1]), x[:-1].copy(), float(np.max(np.abs(F)))), it
        if it == config.max_newton_iters:
            break
        K = _bordered(system, x, c)
        try:
            dx = np.linalg.solve(K, -np.append(F, g))
        except np.linalg.LinAlgError as exc:
            raise SingularSystemError("bordered Jacobian is singular") from exc
        if not np.all(np.isfinite(dx)):
            raise SingularSystemError("bordered Jacobian is singular")
        x = x + dx
    raise NewtonError(f"no convergence after {config.max_newton_iters} iterations")


def fixed_omega(size: int, omega: float) -> tuple[np.ndarray, float]:
    c = np.zeros(size + 1)
    c[-1] = 1.0
    return c, float(omega)


def solve_at_omega(system: AlgebraicSystem, omega: float, amplitudes, config=ContinuationConfig()) -> SolutionPoint:
    guess = np.append(np.asarray(amplitudes, dtype=float), omega)
    return newton_correct(system, guess, fixed_omega(system.size, omega), config)[0]


def trunk_point(system: AlgebraicSystem, mode=(0, 0), omega: float = 1.01, config=ContinuationConfig()) -> SolutionPoint:
    """Solution near the one-mode trunk of ``mode``, corrected on the full system.

    The overall sign is fixed so that the largest amplitude is positive.
    """
    mode = as_mode(mode)
    if mode not in system.span:
        raise ValueError(f"mode {mode} is not in the span")
    sq = 16.0 * (mode.temporal**2 * omega**2 - mode.spatial**2) / 9.0
    if sq <= 0:
        raise ValueError(f"trunk of {mode} does not exist at omega={omega}")
    a = np.zeros(system.size)
    a[system.span.index(mode)] = math.sqrt(sq)
    p = solve_at_omega(system, omega, a, config)
    if p.amplitudes[np.argmax(np.abs(p.amplitudes))] < 0:
        p = p.negated()
    return p


# -------------------------------------------------------------------------- trace
def _crossing(oe: np.ndarray, folds: list[int], min_fill: float) -> int | None:
    """Earlier segment of the (Omega, E) polyline ``oe`` crossed by its last segment.

    The crossing closes a loop only if a fold lies between the two segments and
    the loop encloses at least ``min_fill`` of its bounding box; this rejects the
    thin slivers formed where a curve turns around and retraces itself.
    """
    n = len(oe) - 1
    if n < 3 or not folds:
        return None
    end = min(folds[-1] - 1, n - 2)
    if end < 1:
        return None
    p, q = oe[-2], oe[-1]
    a, b = oe[:end], oe[1:end + 1]

    def orient(u, v, w):
        return (v[..., 0] - u[..., 0]) * (w[..., 1] - u[..., 1]) - (v[..., 1] - u[..., 1]) * (w[..., 0] - u[..., 0])

    hit = np.nonzero((orient(p, q, a) * orient(p, q, b) < 0) & (orient(a, b, p) * orient(a, b, q) < 0))[0]
    for j in hit[::-1]:
        loop = oe[j + 1:]
        x, y = loop[:, 0], loop[:, 1]
        box = np.ptp(x) * np.ptp(y)
        area = 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))
        if box > 0 and area >= min_fill * box:
            return int(j)
    return None


def trace_curve(
    system: AlgebraicSystem,
    start: SolutionPoint,
    direction: int = 1,
    config: ContinuationConfig = ContinuationConfig(),
    orient: np.ndarray | None = None,
) -> ContinuationCurve:
    """Trace the solution curve through ``start``.

    ``direction`` picks the initial sign of dOmega/ds; if ``orient`` is given the
    initial tangent is instead chosen with positive projection on it (times
    ``direction``), which is needed when the curve starts with dOmega/ds = 0.
    """
    if direction not in (1, -1):
        raise ValueError("direction must be +1 or -1")
    x0 = start.state()
    if system.residual_norm(x0[-1], x0[:-1]) >= config.newton_tol:
        raise NewtonError("start point does not satisfy the residual tolerance")
    t = tangent_vector(system, x0)
    ref = t[-1] if orient is None else float(t @ np.asarray(orient, dtype=float))
    if ref * direction < 0 or (ref == 0 and direction < 0):
        t = -t
    t = tangent_vector(system, x0, t)

    curve = ContinuationCurve(system, [system.point(x0[-1], x0[:-1])])
    curve.arclength.append(0.0)
    curve.tangents.append(t)
    curve.test_signs.append(bordered_determinant_sign(system, x0, t))
    t_start = t
    x, h, s = x0, config.initial_step, 0.0
    travelled = 0.0
    oe = [(x0[-1], system.energy(x0[-1], x0[:-1]))]
    folds: list[int] = []

    while len(curve.points) < config.max_points:
        pred = x + h * t
        try:
            p, its = newton_correct(system, pred, (t, float(t @ x) + h), config)
            xn = p.state()
            tn = tangent_vector(system, xn, t)
            ok = float(tn @ t) >= config.min_cos_angle and np.linalg.norm(xn - pred) <= config.max_correction * h + 1e-12
        except (NewtonError, np.linalg.LinAlgError):
            ok = False
        if not ok:
            h *= 0.5
            if h < config.min_step:
                curve.markers.append(Marker(len(curve.points) - 1, "stall"))
                break
            continue

        step = float(np.linalg.norm(xn - x))
        s += step
        travelled += step
        curve.points.append(p)
        curve.arclength.append(s)
        curve.tangents.append(tn)
        curve.test_signs.append(bordered_determinant_sign(system, xn, tn))
        i = len(curve.points) - 1
        if tn[-1] * t[-1] < 0:
            curve.markers.append(Marker(i, "fold"))
            folds.append(i)
        oe.append((xn[-1], system.energy(xn[-1], xn[:-1])))
        if curve.test_signs[-1] != curve.test_signs[-2]:
            curve.markers.append(Marker(i, "bifurcation-candidate"))
        x, t = xn, tn
        if its <= 4:
            h = min(h * config.growth, config.max_step)

        if travelled > 4 * config.max_step and np.linalg.norm(x - x0) < max(h, config.initial_step) and t @ t_start > 0:
            curve.markers.append(Marker(i, "closed-loop", 0))
            if config.stop_on_loop:
                break
        j = _crossing(np.array(oe), folds, config.loop_min_fill)
        if j is not None and not any(m.kind == "closed-loop" and m.partner == j for m in curve.markers):
            curve.markers.append(Marker(i, "closed-loop", j))
            if config.stop_on_loop:
                break
        if not (config.omega_min <= x[-1] <= config.omega_max) or np.max(np.abs(x[:-1])) > config.max_amplitude:
            curve.markers.append(Marker(i, "window-exit"))
            break
    return curve


# --------------------------------------------------------------- branch points
def _smallest_singular(system: AlgebraicSystem, x: np.ndarray, t: np.ndarray) -> float:
    return float(np.linalg.svd(_bordered(system, x, t), compute_uv=False)[-1])


def _refine(system: AlgebraicSystem, xa: np.ndarray, ta: np.ndarray, sign_a: int, xb: np.ndarray,
            config: ContinuationConfig, resolution: float) -> SolutionPoint:
    """Bisect on arclength between xa and xb until the Omega bracket is below ``resolution``.

    Each trial is a pseudo-arclength step from the current lower bracket point;
    if the corrector fails close to the branch point the bisection stops and the
    bracket end with the smaller test value is returned.
    """
    lo_x, lo_t = xa, ta
    hi_x = xb
    gap = float(ta @ (xb - xa))
    for _ in range(200):
        if abs(hi_x[-1] - lo_x[-1]) < resolution or gap < 1e-15:
            break
        delta = 0.5 * gap
        try:
            p, _ = newton_correct(system, lo_x + delta * lo_t, (lo_t, float(lo_t @ lo_x) + delta), config)
        except (NewtonError, np.linalg.LinAlgError):
            break
        xm = p.state()
        tm = tangent_vector(system, xm, lo_t)
        if bordered_determinant_sign(system, xm, tm) == sign_a:
            lo_x, lo_t = xm, tm
            gap = float(lo_t @ (hi_x - lo_x))
        else:
            hi_x = xm
            gap = delta
    t_hi = tangent_vector(system, hi_x, lo_t)
    best = lo_x if _smallest_singular(system, lo_x, lo_t) <= _smallest_singular(system, hi_x, t_hi) else hi_x
    return system.point(best[-1], best[:-1])


def detect_bifurcations(curve: ContinuationCurve, resolution: float = 1e-9,
                        config: ContinuationConfig = ContinuationConfig()) -> list[SolutionPoint]:
    """Refine every sign change of the bordered determinant along ``curve``."""
    system = curve.system
    loose = replace(config, max_newton_iters=min(config.max_newton_iters, 15))
    found = []
    for i in range(len(curve.points) - 1):
        if curve.test_signs[i] == curve.test_signs[i + 1]:
            continue
        xa = curve.points[i].state()
        xb = curve.points[i + 1].state()
        found.append(_refine(system, xa, curve.tangents[i], curve.test_signs[i], xb, loose, resolution))
    return found


def switch_branch(system: AlgebraicSystem, point: SolutionPoint, config: ContinuationConfig = ContinuationConfig(),
                  tangent: np.ndarray | None = None, rank_tol: float = 1e-6) -> list[SolutionPoint]:
    """Start points on the branches crossing ``point`` transversally to the traced curve.

    Returns [] unless [dF/da, dF/dOmega] is rank deficient at ``point`` (so folds
    give nothing).
    """
    x0 = point.state()
    J = _full_jacobian(system, x0)
    _, sv, vt = np.linalg.svd(J)
    if sv[-1] > rank_tol * max(sv[0], 1.0):
        return []
    null = vt[-2:]
    t1 = tangent if tangent is not None else null[1]
    t1 = t1 / np.linalg.norm(t1)
    # Direction in the two-dimensional kernel orthogonal to the traced tangent.
    coeffs = null @ t1
    t2 = coeffs[1] * null[0] - coeffs[0] * null[1]
    t2 /= np.linalg.norm(t2)
    eps = config.switch_eps
    out: list[SolutionPoint] = []
    for sgn in (1.0, -1.0):
        try:
            p, _ = newton_correct(system, x0 + sgn * eps * t2, (t2, float(t2 @ x0) + sgn * eps), config)
        except NewtonError:
            continue
        if np.linalg.norm(p.state() - x0) > 10 * eps:
            continue
        if all(np.linalg.norm(p.state() - q.state()) > 1e-6 for q in out):
            out.append(p)
    return out


def trace_family(
    system: AlgebraicSystem,
    start: SolutionPoint,
    config: ContinuationConfig = ContinuationConfig(),
    max_depth: int = 1,
    rank_tol: float = 1e-3,
) -> list[ContinuationCurve]:
    """The curve through ``start`` plus the curves obtained by branch switching.

    Bifurcations found on a curve of depth d < max_depth are switched; each new
    start is traced away from the branch point.  Loops do not stop the traces.
    """
    cfg = replace(config, stop_on_loop=False)
    first = trace_curve(system, start, 1, cfg)
    curves = [first]
    queue = [(first, 0)]
    while queue:
        curve, depth = queue.pop(0)
        if depth >= max_depth:
            continue
        for bp in detect_bifurcations(curve, config=cfg):
            for p in switch_branch(system, bp, cfg, rank_tol=rank_tol):
                away = p.state() - bp.state()
                child = trace_curve(system, p, 1, cfg, orient=away)
                curves.append(child)
                queue.append((child, depth + 1))
    return curves
