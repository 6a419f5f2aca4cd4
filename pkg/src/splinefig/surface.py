"""Hidden-line wireframe scenes of parametric surfaces.

A surface (x(u,v), y(u,v), z(u,v)) is viewed under an orthographic
camera with azimuth theta and elevation phi:

    X     = -x sin(theta) + y cos(theta)
    Y     = -x cos(theta) sin(phi) - y sin(theta) sin(phi) + z cos(phi)
    depth =  x cos(theta) cos(phi) + y sin(theta) cos(phi) + z sin(phi)

Larger depth means nearer the eye.  The drawing pipeline:

 1. collect the curves to draw: parameter-rectangle boundaries, the
    silhouette (zero set of the projected Jacobian J(u,v), traced with
    the implicit machinery), iso-parameter wires, and extras (axes);
 2. intersect each projected curve with the projected outline curves,
    refining near-tangential contacts with spline windows;
 3. cut the curves at those points and decide each interval's
    visibility by a depth test at its midpoint (a damped Newton solve
    finds every surface point covering the midpoint);
 4. emit visible intervals solid and hidden ones dashed (or drop them).

Everything is deterministic; the per-curve work items are independent
and run through a thread pool.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from .expr import (
    BinOp,
    Const,
    DomainError,
    ExprError,
    ExprNode,
    compile_fn,
    diff,
    free_vars,
    parse,
)
from .geom import Point2, Point3, Polyline, closest_approach
from .implicit import TraceConfig, trace_zero_set
from .render import DrawItem, Label, Scene, Style, scene_from_items
from .spline import SplineMethod, build_spline

log = logging.getLogger(__name__)

NEWTON_MAX_ITER = 40
NEWTON_TOL = 1e-10
SELF_OCCLUSION_UV_TOL = 1e-4
OCCLUSION_EPS_FACTOR = 1e-6
CROSSING_DEDUP_TOL = 1e-9


class SurfaceError(ValueError):
    pass


@dataclass(frozen=True)
class Projection:
    """Orthographic camera; angles in radians."""

    azimuth: float = math.radians(60.0)
    elevation: float = math.radians(25.0)

    def __post_init__(self):
        if not -math.pi / 2 < self.elevation < math.pi / 2:
            raise ValueError("elevation must lie in (-pi/2, pi/2)")


def project(p: Point3, proj: Projection) -> tuple[Point2, float]:
    """Screen position and depth (larger depth = nearer the eye)."""
    st, ct = math.sin(proj.azimuth), math.cos(proj.azimuth)
    sf, cf = math.sin(proj.elevation), math.cos(proj.elevation)
    sx = -p.x * st + p.y * ct
    sy = -p.x * ct * sf - p.y * st * sf + p.z * cf
    d = p.x * ct * cf + p.y * st * cf + p.z * sf
    return Point2(sx, sy), d


@dataclass(frozen=True)
class ParametricSurface:
    """Coordinate expressions over the closed rectangle u_range x v_range."""

    x: ExprNode
    y: ExprNode
    z: ExprNode
    u_range: tuple[float, float]
    v_range: tuple[float, float]

    def __post_init__(self):
        if not self.u_range[0] < self.u_range[1]:
            raise ValueError("degenerate u range")
        if not self.v_range[0] < self.v_range[1]:
            raise ValueError("degenerate v range")
        extra = (
            free_vars(self.x) | free_vars(self.y) | free_vars(self.z)
        ) - {"u", "v"}
        if extra:
            raise SurfaceError(f"unexpected free variables {sorted(extra)}")

    @classmethod
    def from_strings(
        cls,
        x: str,
        y: str,
        z: str,
        u_range: tuple[float, float],
        v_range: tuple[float, float],
    ) -> "ParametricSurface":
        return cls(parse(x), parse(y), parse(z), tuple(u_range), tuple(v_range))

    @cached_property
    def _fns(self) -> tuple[Callable, Callable, Callable]:
        return (
            compile_fn(self.x, ("u", "v")),
            compile_fn(self.y, ("u", "v")),
            compile_fn(self.z, ("u", "v")),
        )

    def point(self, u: float, v: float) -> Point3:
        fx, fy, fz = self._fns
        return Point3(fx(u, v), fy(u, v), fz(u, v))


@dataclass(frozen=True)
class SpaceCurve:
    """An ordered 3D vertex chain, optionally tagged with (u, v) preimages."""

    points: tuple[Point3, ...]
    uv: tuple[tuple[float, float], ...] | None = None
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        if len(self.points) < 2:
            raise ValueError("a space curve needs at least 2 points")
        if self.uv is not None:
            object.__setattr__(self, "uv", tuple(self.uv))
            if len(self.uv) != len(self.points):
                raise ValueError("uv tag length mismatch")


def _projected_exprs(s: ParametricSurface, proj: Projection) -> tuple[ExprNode, ExprNode]:
    st, ct = math.sin(proj.azimuth), math.cos(proj.azimuth)
    sf, cf = math.sin(proj.elevation), math.cos(proj.elevation)
    x_expr = BinOp("+", BinOp("*", Const(-st), s.x), BinOp("*", Const(ct), s.y))
    y_expr = BinOp(
        "+",
        BinOp(
            "+",
            BinOp("*", Const(-ct * sf), s.x),
            BinOp("*", Const(-st * sf), s.y),
        ),
        BinOp("*", Const(cf), s.z),
    )
    return x_expr, y_expr


def _jacobian_fn(
    s: ParametricSurface, proj: Projection
) -> Callable[[float, float], float]:
    """J(u,v) = X_u Y_v - X_v Y_u, symbolic when possible."""
    x_expr, y_expr = _projected_exprs(s, proj)
    try:
        xu = compile_fn(diff(x_expr, "u"), ("u", "v"))
        xv = compile_fn(diff(x_expr, "v"), ("u", "v"))
        yu = compile_fn(diff(y_expr, "u"), ("u", "v"))
        yv = compile_fn(diff(y_expr, "v"), ("u", "v"))

        def jac(u: float, v: float) -> float:
            return xu(u, v) * yv(u, v) - xv(u, v) * yu(u, v)

        return jac
    except ExprError:
        # non-differentiable expression: central finite differences
        fx = compile_fn(x_expr, ("u", "v"))
        fy = compile_fn(y_expr, ("u", "v"))
        hu = 1e-6 * (s.u_range[1] - s.u_range[0])
        hv = 1e-6 * (s.v_range[1] - s.v_range[0])

        def jac_fd(u: float, v: float) -> float:
            xu = (fx(u + hu, v) - fx(u - hu, v)) / (2 * hu)
            xv = (fx(u, v + hv) - fx(u, v - hv)) / (2 * hv)
            yu = (fy(u + hu, v) - fy(u - hu, v)) / (2 * hu)
            yv = (fy(u, v + hv) - fy(u, v - hv)) / (2 * hv)
            return xu * yv - xv * yu

        return jac_fd


def silhouette(
    s: ParametricSurface,
    proj: Projection,
    cfg: TraceConfig | None = None,
) -> list[SpaceCurve]:
    """Fold curves of the projection: trace of J(u, v) = 0."""
    if cfg is None:
        cfg = TraceConfig(s.u_range, s.v_range)
    jac = _jacobian_fn(s, proj)
    curves: list[SpaceCurve] = []
    for poly in trace_zero_set(jac, cfg):
        pts = []
        uv = []
        for p in poly.points:
            try:
                pts.append(s.point(p.x, p.y))
            except DomainError:
                continue
            uv.append((p.x, p.y))
        if len(pts) < 2:
            continue
        curve = SpaceCurve(tuple(pts), tuple(uv), f"silhouette:{len(curves)}")
        # a fold along a degenerate parameter line (a cone apex, a pole)
        # maps to a single 3D point and is no curve at all
        if _collapsed(curve):
            continue
        curves.append(curve)
    return curves


def _edge_curve(
    s: ParametricSurface, fixed: str, value: float, samples: int
) -> SpaceCurve | None:
    lo, hi = s.v_range if fixed == "u" else s.u_range
    pts = []
    uv = []
    for k in range(samples + 1):
        t = lo + (hi - lo) * (k / samples)
        u, v = (value, t) if fixed == "u" else (t, value)
        try:
            pts.append(s.point(u, v))
        except DomainError:
            continue
        uv.append((u, v))
    if len(pts) < 2:
        return None
    return SpaceCurve(tuple(pts), tuple(uv), f"boundary:{fixed}={value:g}")


def _collapsed(curve: SpaceCurve) -> bool:
    first = curve.points[0]
    scale = max(1.0, max(max(abs(p.x), abs(p.y), abs(p.z)) for p in curve.points))
    return all(p.dist(first) <= 1e-9 * scale for p in curve.points)


def _is_seam(a: SpaceCurve, b: SpaceCurve) -> bool:
    """Opposite edges that trace the same points (a closure seam).

    Either in step (surface of revolution) or reversed (a half-twist
    closure): both mean the edge is interior to the surface.
    """
    if len(a.points) != len(b.points):
        return False
    scale = max(
        1.0, max(max(abs(p.x), abs(p.y), abs(p.z)) for p in a.points)
    )
    tol = 1e-9 * scale
    if all(p.dist(q) <= tol for p, q in zip(a.points, b.points)):
        return True
    return all(
        p.dist(q) <= tol for p, q in zip(a.points, reversed(b.points))
    )


def boundary_curves(s: ParametricSurface, samples: int = 100) -> list[SpaceCurve]:
    """Parameter-rectangle edges that bound actual geometry.

    Edges that collapse to a point (cones, poles) are dropped, and so
    are pairs of opposite edges that coincide pointwise (the seam of a
    closed surface of revolution is not a boundary).
    """
    u_lo = _edge_curve(s, "u", s.u_range[0], samples)
    u_hi = _edge_curve(s, "u", s.u_range[1], samples)
    v_lo = _edge_curve(s, "v", s.v_range[0], samples)
    v_hi = _edge_curve(s, "v", s.v_range[1], samples)
    for pair in ((u_lo, u_hi), (v_lo, v_hi)):
        if pair[0] is not None and pair[1] is not None and _is_seam(*pair):
            if pair is (u_lo, u_hi):
                u_lo = u_hi = None
            else:
                v_lo = v_hi = None
    result = []
    for edge in (u_lo, u_hi, v_lo, v_hi):
        if edge is not None and not _collapsed(edge):
            result.append(edge)
    return result


def wires(
    s: ParametricSurface,
    fixed_u: Sequence[float] = (),
    fixed_v: Sequence[float] = (),
    samples: int = 100,
) -> list[SpaceCurve]:
    """Iso-parameter curves at the given u values, then the given v values."""
    out: list[SpaceCurve] = []
    for value in fixed_u:
        if not s.u_range[0] <= value <= s.u_range[1]:
            raise SurfaceError(f"wire u={value!r} outside {s.u_range}")
        curve = _edge_curve(s, "u", value, samples)
        if curve is not None and not _collapsed(curve):
            out.append(replace(curve, label=f"wire:u={value:g}"))
    for value in fixed_v:
        if not s.v_range[0] <= value <= s.v_range[1]:
            raise SurfaceError(f"wire v={value!r} outside {s.v_range}")
        curve = _edge_curve(s, "v", value, samples)
        if curve is not None and not _collapsed(curve):
            out.append(replace(curve, label=f"wire:v={value:g}"))
    return out


def project_curve(curve: SpaceCurve, proj: Projection) -> Polyline | None:
    """Project to screen coordinates, keeping 3D and uv annotations."""
    pts: list[Point2] = []
    space: list[Point3] = []
    uv: list[tuple[float, float]] = []
    for k, p in enumerate(curve.points):
        q, _ = project(p, proj)
        if pts and pts[-1].dist(q) == 0.0:
            continue
        pts.append(q)
        space.append(p)
        if curve.uv is not None:
            uv.append(curve.uv[k])
    if len(pts) < 2:
        return None
    return Polyline(
        tuple(pts), tuple(space), tuple(uv) if curve.uv is not None else None
    )


# ---------------------------------------------------------------------------
# projected-curve intersections and contact refinement


@dataclass(frozen=True)
class Crossing:
    point: Point2
    ia: int
    ib: int


@dataclass(frozen=True)
class ContactSite:
    """A near-tangential approach that deserves spline refinement."""

    point: Point2
    ia: int
    ib: int
    tangential: bool


@dataclass(frozen=True)
class IntersectionResult:
    crossings: tuple[Crossing, ...]
    contacts: tuple[ContactSite, ...]


def intersect_projected(
    a: Polyline, b: Polyline, tol: float = 0.01
) -> IntersectionResult:
    """Transversal crossings of two polylines plus flagged contact sites.

    tol is the contact threshold: a closest approach below tol with no
    crossing nearby, or more than 3 crossings inside a 5-vertex window,
    marks a site for refinement.  With a is b the polyline is tested
    against itself (adjacent segments skipped).
    """
    self_mode = a is b
    pa = a.as_array()
    pb = b.as_array()
    a0, a1 = pa[:-1], pa[1:]
    b0, b1 = pb[:-1], pb[1:]
    amin = np.minimum(a0, a1)
    amax = np.maximum(a0, a1)
    bmin = np.minimum(b0, b1)
    bmax = np.maximum(b0, b1)
    overlap = (
        (amin[:, None, 0] <= bmax[None, :, 0])
        & (bmin[None, :, 0] <= amax[:, None, 0])
        & (amin[:, None, 1] <= bmax[None, :, 1])
        & (bmin[None, :, 1] <= amax[:, None, 1])
    )
    if self_mode:
        n = len(a0)
        idx = np.arange(n)
        near_diag = np.abs(idx[:, None] - idx[None, :]) <= 1
        overlap &= ~near_diag
        overlap &= idx[:, None] < idx[None, :]
    cand_i, cand_j = np.nonzero(overlap)

    crossings: list[Crossing] = []
    for i, j in zip(cand_i.tolist(), cand_j.tolist()):
        p = a0[i]
        r = a1[i] - p
        q = b0[j]
        w = b1[j] - q
        denom = r[0] * w[1] - r[1] * w[0]
        if denom == 0.0:
            continue
        dq = q - p
        t = (dq[0] * w[1] - dq[1] * w[0]) / denom
        s = (dq[0] * r[1] - dq[1] * r[0]) / denom
        if 0.0 <= t <= 1.0 and 0.0 <= s <= 1.0:
            pt = Point2(float(p[0] + t * r[0]), float(p[1] + t * r[1]))
            if any(pt.dist(c.point) <= CROSSING_DEDUP_TOL for c in crossings):
                continue
            crossings.append(Crossing(pt, int(i), int(j)))

    contacts: list[ContactSite] = []
    # crossings bunched along a few vertices signal a tangential wiggle
    used = set()
    for k, c in enumerate(crossings):
        if k in used:
            continue
        group = [
            m
            for m, d in enumerate(crossings)
            if abs(d.ia - c.ia) <= 5 and m not in used
        ]
        if len(group) > 3:
            used.update(group)
            mid = group[len(group) // 2]
            g = crossings[mid]
            contacts.append(ContactSite(g.point, g.ia, g.ib, tangential=False))
    if not self_mode:
        # every local minimum of the vertex-to-segment distance below tol
        # is a candidate tangency (curves can brush the outline more than
        # once, so the single global closest approach is not enough)
        seg = b1 - b0
        seg_len2 = (seg * seg).sum(axis=1)
        seg_len2[seg_len2 == 0.0] = 1.0
        dp = pa[:, None, :] - b0[None, :, :]
        tt = (dp * seg[None, :, :]).sum(axis=2) / seg_len2[None, :]
        tt = np.clip(tt, 0.0, 1.0)
        foot = b0[None, :, :] + tt[:, :, None] * seg[None, :, :]
        dist = np.sqrt(((pa[:, None, :] - foot) ** 2).sum(axis=2))
        below = np.argwhere(dist < tol)
        sites: list[tuple[float, int, int]] = []
        for i, j in below.tolist():
            window = dist[
                max(0, i - 2) : i + 3, max(0, j - 2) : j + 3
            ]
            if dist[i, j] <= window.min():
                sites.append((float(dist[i, j]), int(i), int(j)))
        sites.sort()
        kept: list[tuple[int, int]] = []
        for d, i, j in sites:
            if any(abs(i - ki) < 6 and abs(j - kj) < 6 for ki, kj in kept):
                continue
            if any(abs(c.ia - i) <= 5 and abs(c.ib - j) <= 5 for c in crossings):
                continue
            kept.append((i, j))
            fx, fy = foot[i, j]
            mid = Point2(
                0.5 * (pa[i, 0] + float(fx)), 0.5 * (pa[i, 1] + float(fy))
            )
            contacts.append(ContactSite(mid, i, j, tangential=True))
    return IntersectionResult(tuple(crossings), tuple(contacts))


@dataclass(frozen=True)
class RefinedContact:
    point: Point2
    refined: bool  # False: tangential site left at the closest-approach midpoint


def _window_spline(poly: Polyline, center: int, window: int):
    lo = max(0, center - window)
    hi = min(len(poly.points) - 1, center + window)
    pts = poly.points[lo : hi + 1]
    if len(pts) < 2:
        return None
    return build_spline(pts, method=SplineMethod.OSHIMA, closed=False)


def _dist_to_chain(p: Point2, chain: Sequence[Point2]) -> float:
    best = p.dist(chain[0])
    for q0, q1 in zip(chain, chain[1:]):
        dx, dy = q1.x - q0.x, q1.y - q0.y
        den = dx * dx + dy * dy
        t = 0.0 if den == 0.0 else min(
            1.0, max(0.0, ((p.x - q0.x) * dx + (p.y - q0.y) * dy) / den)
        )
        best = min(best, math.hypot(p.x - q0.x - t * dx, p.y - q0.y - t * dy))
    return best


def _closest_fit_point(sp_a, sp_b, seed: Point2, tol: float):
    """Best-first closest approach of two spline fits.

    Boxes are popped by their minimum possible separation and split
    until both are smaller than tol; the midpoint of the winning pair
    is the contact estimate.  A pair further apart than a percent of
    the window size is no contact at all.
    """
    import heapq
    from itertools import count

    from .geom import bezier_bbox, bezier_subdivide

    def box_gap(ba, bb) -> float:
        dx = max(ba[0] - bb[2], bb[0] - ba[2], 0.0)
        dy = max(ba[1] - bb[3], bb[1] - ba[3], 0.0)
        return math.hypot(dx, dy)

    tick = count()
    heap = []
    span = 1e-12
    for sa in sp_a.segments:
        ba = bezier_bbox(sa)
        span = max(span, ba[2] - ba[0], ba[3] - ba[1])
        for sb in sp_b.segments:
            bb = bezier_bbox(sb)
            heapq.heappush(heap, (box_gap(ba, bb), next(tick), sa, ba, sb, bb))

    for _ in range(5000):
        if not heap:
            break
        gap, _, sa, ba, sb, bb = heapq.heappop(heap)
        da = math.hypot(ba[2] - ba[0], ba[3] - ba[1])
        db = math.hypot(bb[2] - bb[0], bb[3] - bb[1])
        if da < tol and db < tol:
            if gap > 0.01 * (1.0 + span):
                break
            return RefinedContact(
                Point2(
                    0.25 * (ba[0] + ba[2] + bb[0] + bb[2]),
                    0.25 * (ba[1] + ba[3] + bb[1] + bb[3]),
                ),
                True,
            )
        if da >= db:
            for piece in bezier_subdivide(sa, 0.5):
                bp = bezier_bbox(piece)
                heapq.heappush(
                    heap, (box_gap(bp, bb), next(tick), piece, bp, sb, bb)
                )
        else:
            for piece in bezier_subdivide(sb, 0.5):
                bp = bezier_bbox(piece)
                heapq.heappush(
                    heap, (box_gap(ba, bp), next(tick), sa, ba, piece, bp)
                )
    return RefinedContact(seed, False)


def refine_contact(
    a: Polyline,
    b: Polyline,
    center_a: int,
    center_b: int,
    window: int = 6,
    tol: float = 1e-7,
) -> RefinedContact:
    """Intersection of local spline fits around a contact site.

    Open splines through 2*window+1 vertices around each center are
    intersected by recursive bounding-box subdivision (split both
    curves at t=1/2 while the boxes overlap, accept once both box
    diagonals drop under tol).  Candidates within 10*tol collapse to
    their centroid; with several candidates the one nearest the
    original site wins; with none the site is returned unrefined.
    """
    from .geom import bezier_bbox, bezier_subdivide

    seed = (a.points[center_a] + b.points[center_b]) * 0.5
    sp_a = _window_spline(a, center_a, window)
    sp_b = _window_spline(b, center_b, window)
    if sp_a is None or sp_b is None:
        return RefinedContact(seed, False)

    # overlapping windows (a curve drawn twice, grazing duplicates)
    # never separate under subdivision; bail before burning the budget
    win_a = a.points[max(0, center_a - window) : center_a + window + 1]
    win_b = b.points[max(0, center_b - window) : center_b + window + 1]
    if all(_dist_to_chain(p, win_b) <= 10.0 * tol for p in win_a):
        return RefinedContact(seed, False)

    candidates: list[Point2] = []
    budget = [20_000]

    def recurse(sa, sb, depth: int) -> None:
        if budget[0] <= 0:
            return
        budget[0] -= 1
        xa0, ya0, xa1, ya1 = bezier_bbox(sa)
        xb0, yb0, xb1, yb1 = bezier_bbox(sb)
        if xa1 < xb0 or xb1 < xa0 or ya1 < yb0 or yb1 < ya0:
            return
        da = math.hypot(xa1 - xa0, ya1 - ya0)
        db = math.hypot(xb1 - xb0, yb1 - yb0)
        if da < tol and db < tol:
            candidates.append(
                Point2(
                    0.25 * (xa0 + xa1 + xb0 + xb1),
                    0.25 * (ya0 + ya1 + yb0 + yb1),
                )
            )
            return
        if depth > 60:
            return
        left_a, right_a = bezier_subdivide(sa, 0.5) if da >= tol else (sa, None)
        left_b, right_b = bezier_subdivide(sb, 0.5) if db >= tol else (sb, None)
        for pa in (left_a, right_a):
            if pa is None:
                continue
            for pb in (left_b, right_b):
                if pb is None:
                    continue
                recurse(pa, pb, depth + 1)

    for sa in sp_a.segments:
        for sb in sp_b.segments:
            recurse(sa, sb, 0)

    if not candidates:
        # the fits never cross: a grazing contact.  The touch point is
        # then the closest approach of the two fits, found best-first
        # on bounding-box distance.
        return _closest_fit_point(sp_a, sp_b, seed, tol)
    clusters: list[list[Point2]] = []
    for p in candidates:
        for cluster in clusters:
            if p.dist(cluster[0]) <= 10.0 * tol:
                cluster.append(p)
                break
        else:
            clusters.append([p])
    centroids = [
        Point2(sum(p.x for p in c) / len(c), sum(p.y for p in c) / len(c))
        for c in clusters
    ]
    best = min(centroids, key=lambda p: (p.dist(seed), p.x, p.y))
    return RefinedContact(best, True)


# ---------------------------------------------------------------------------
# visibility


@dataclass(frozen=True)
class VisibilityTaggedCurve:
    """A projected curve split at cut parameters into tagged intervals.

    Cut parameters are vertex index + fraction along the polyline; the
    hidden tuple has one flag per interval (len(cuts) + 1).
    """

    polyline: Polyline
    cuts: tuple[float, ...]
    hidden: tuple[bool, ...]
    label: str = ""

    def intervals(self) -> list[tuple[Polyline, bool]]:
        bounds = [0.0, *self.cuts, float(len(self.polyline.points) - 1)]
        out = []
        for k in range(len(bounds) - 1):
            sub = _sub_polyline(self.polyline, bounds[k], bounds[k + 1])
            if sub is not None:
                out.append((sub, self.hidden[k]))
        return out


def _param_point(poly: Polyline, param: float) -> Point2:
    i = min(int(param), len(poly.points) - 2)
    t = param - i
    return _lerp2(poly.points[i], poly.points[i + 1], t)


def _lerp2(a: Point2, b: Point2, t: float) -> Point2:
    return Point2(a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t)


def _sub_polyline(poly: Polyline, p0: float, p1: float) -> Polyline | None:
    if p1 - p0 <= 1e-12:
        return None
    pts = [_param_point(poly, p0)]
    i0 = int(math.floor(p0)) + 1
    i1 = int(math.ceil(p1))
    for k in range(i0, min(i1, len(poly.points) - 1) + 1):
        if k <= p1:
            pts.append(poly.points[k])
    end = _param_point(poly, p1)
    if pts and pts[-1].dist(end) > 0.0:
        pts.append(end)
    dedup = [pts[0]]
    for p in pts[1:]:
        if p.dist(dedup[-1]) > 0.0:
            dedup.append(p)
    if len(dedup) < 2:
        return None
    return Polyline(tuple(dedup))


def _locate_param(poly: Polyline, q: Point2) -> tuple[float, float]:
    """Nearest (param, distance) of a point on the polyline."""
    best = (0.0, math.inf)
    pts = poly.points
    for i in range(len(pts) - 1):
        a, b = pts[i], pts[i + 1]
        vx, vy = b.x - a.x, b.y - a.y
        L2 = vx * vx + vy * vy
        t = 0.0 if L2 == 0.0 else ((q.x - a.x) * vx + (q.y - a.y) * vy) / L2
        t = max(0.0, min(1.0, t))
        p = Point2(a.x + vx * t, a.y + vy * t)
        d = p.dist(q)
        if d < best[1]:
            best = (i + t, d)
    return best


class OcclusionTester:
    """Finds surface points covering a screen position by damped Newton."""

    def __init__(self, s: ParametricSurface, proj: Projection, seeds: int = 32):
        self.surface = s
        self.proj = proj
        self.seeds = seeds
        x_expr, y_expr = _projected_exprs(s, proj)
        self.fx = compile_fn(x_expr, ("u", "v"))
        self.fy = compile_fn(y_expr, ("u", "v"))
        try:
            self.fxu = compile_fn(diff(x_expr, "u"), ("u", "v"))
            self.fxv = compile_fn(diff(x_expr, "v"), ("u", "v"))
            self.fyu = compile_fn(diff(y_expr, "u"), ("u", "v"))
            self.fyv = compile_fn(diff(y_expr, "v"), ("u", "v"))
        except ExprError:
            hu = 1e-7 * (s.u_range[1] - s.u_range[0])
            hv = 1e-7 * (s.v_range[1] - s.v_range[0])
            self.fxu = lambda u, v: (self.fx(u + hu, v) - self.fx(u - hu, v)) / (2 * hu)
            self.fxv = lambda u, v: (self.fx(u, v + hv) - self.fx(u, v - hv)) / (2 * hv)
            self.fyu = lambda u, v: (self.fy(u + hu, v) - self.fy(u - hu, v)) / (2 * hu)
            self.fyv = lambda u, v: (self.fy(u, v + hv) - self.fy(u, v - hv)) / (2 * hv)

        n = seeds
        ulo, uhi = s.u_range
        vlo, vhi = s.v_range
        us = np.array([ulo + (uhi - ulo) * (i / n) for i in range(n + 1)])
        vs = np.array([vlo + (vhi - vlo) * (j / n) for j in range(n + 1)])
        gx = np.full((n + 1, n + 1), np.nan)
        gy = np.full((n + 1, n + 1), np.nan)
        for i in range(n + 1):
            for j in range(n + 1):
                try:
                    gx[i, j] = self.fx(us[i], vs[j])
                    gy[i, j] = self.fy(us[i], vs[j])
                except DomainError:
                    pass
        self.us, self.vs = us, vs
        cx = np.stack([gx[:-1, :-1], gx[1:, :-1], gx[1:, 1:], gx[:-1, 1:]])
        cy = np.stack([gy[:-1, :-1], gy[1:, :-1], gy[1:, 1:], gy[:-1, 1:]])
        with np.errstate(invalid="ignore"):
            self.cell_ok = ~np.isnan(cx).any(axis=0) & ~np.isnan(cy).any(axis=0)
            self.xmin = np.nanmin(cx, axis=0)
            self.xmax = np.nanmax(cx, axis=0)
            self.ymin = np.nanmin(cy, axis=0)
            self.ymax = np.nanmax(cy, axis=0)
        # the projected cell can poke out of its corner box; inflate
        finite_x = gx[np.isfinite(gx)]
        finite_y = gy[np.isfinite(gy)]
        if finite_x.size == 0:
            raise SurfaceError("surface projects nowhere")
        span = max(
            float(finite_x.max() - finite_x.min()),
            float(finite_y.max() - finite_y.min()),
            1e-9,
        )
        self.scene_scale = span
        pad = 0.75 * (self.xmax - self.xmin + self.ymax - self.ymin) + 1e-9
        self.xmin -= pad
        self.xmax += pad
        self.ymin -= pad
        self.ymax += pad

    def _newton(self, q: Point2, u: float, v: float) -> tuple[float, float] | None:
        s = self.surface
        ulo, uhi = s.u_range
        vlo, vhi = s.v_range
        mu = 0.05 * (uhi - ulo)
        mv = 0.05 * (vhi - vlo)
        tol = NEWTON_TOL * (1.0 + self.scene_scale)
        try:
            gx = self.fx(u, v) - q.x
            gy = self.fy(u, v) - q.y
        except DomainError:
            return None
        err = math.hypot(gx, gy)
        for _ in range(NEWTON_MAX_ITER):
            if err <= tol:
                return (u, v)
            try:
                a = self.fxu(u, v)
                b = self.fxv(u, v)
                c = self.fyu(u, v)
                d = self.fyv(u, v)
            except DomainError:
                return None
            det = a * d - b * c
            if abs(det) < 1e-300:
                return None
            du = (d * gx - b * gy) / det
            dv = (a * gy - c * gx) / det
            lam = 1.0
            stepped = False
            while lam >= 1.0 / 64.0:
                nu = u - lam * du
                nv = v - lam * dv
                if (
                    ulo - mu <= nu <= uhi + mu
                    and vlo - mv <= nv <= vhi + mv
                ):
                    try:
                        ngx = self.fx(nu, nv) - q.x
                        ngy = self.fy(nu, nv) - q.y
                    except DomainError:
                        ngx = ngy = math.inf
                    nerr = math.hypot(ngx, ngy)
                    if nerr < err:
                        u, v, gx, gy, err = nu, nv, ngx, ngy, nerr
                        stepped = True
                        break
                lam *= 0.5
            if not stepped:
                return None
        return (u, v) if err <= tol else None

    def covers(self, q: Point2) -> tuple[list[tuple[float, float]], int]:
        """All distinct (u, v) with projection q, and the candidate count."""
        mask = (
            self.cell_ok
            & (self.xmin <= q.x)
            & (q.x <= self.xmax)
            & (self.ymin <= q.y)
            & (q.y <= self.ymax)
        )
        cells = np.argwhere(mask)
        roots: list[tuple[float, float]] = []
        for i, j in cells.tolist():
            u0 = 0.5 * (self.us[i] + self.us[i + 1])
            v0 = 0.5 * (self.vs[j] + self.vs[j + 1])
            root = self._newton(q, u0, v0)
            if root is None:
                continue
            u, v = root
            ulo, uhi = self.surface.u_range
            vlo, vhi = self.surface.v_range
            eps_u = 1e-9 * (uhi - ulo)
            eps_v = 1e-9 * (vhi - vlo)
            if not (ulo - eps_u <= u <= uhi + eps_u and vlo - eps_v <= v <= vhi + eps_v):
                continue
            u = min(max(u, ulo), uhi)
            v = min(max(v, vlo), vhi)
            if any(math.hypot(u - ru, v - rv) <= 1e-7 for ru, rv in roots):
                continue
            roots.append((u, v))
        return roots, len(cells)

    def depth_at(self, u: float, v: float) -> float:
        _, d = project(self.surface.point(u, v), self.proj)
        return d

    def hidden(
        self,
        q: Point2,
        depth: float,
        own_uv: tuple[float, float] | None,
        eps: float,
    ) -> tuple[bool, bool]:
        """(is_hidden, newton_trouble) for a point at the given depth."""
        roots, n_candidates = self.covers(q)
        if n_candidates > 0 and not roots:
            return False, True
        for u, v in roots:
            if own_uv is not None:
                if math.hypot(u - own_uv[0], v - own_uv[1]) <= SELF_OCCLUSION_UV_TOL:
                    continue
            if self.depth_at(u, v) > depth + eps:
                return True, False
        return False, False


def classify_visibility(
    curve: SpaceCurve,
    s: ParametricSurface,
    proj: Projection,
    cuts: Sequence[Point2],
    tester: OcclusionTester | None = None,
) -> VisibilityTaggedCurve:
    """Split the projected curve at the cut points and tag each interval.

    Visibility is decided at the interval midpoint: the interval is
    hidden when some surface point projects there with strictly larger
    depth (beyond a small epsilon).  Points within parameter distance
    1e-4 of the curve's own preimage never count as occluders.  When
    the Newton solves all fail the interval stays visible and a warning
    is logged.
    """
    if tester is None:
        tester = OcclusionTester(s, proj)
    poly = project_curve(curve, proj)
    if poly is None:
        raise SurfaceError(f"curve {curve.label!r} projects to a point")
    n_last = float(len(poly.points) - 1)
    params: list[float] = []
    for q in cuts:
        param, dist = _locate_param(poly, q)
        if dist > 0.05 * (1.0 + tester.scene_scale):
            continue
        params.append(param)
    params.sort()
    cleaned: list[float] = []
    for p in params:
        if p <= 1e-9 or p >= n_last - 1e-9:
            continue
        if cleaned and p - cleaned[-1] <= 1e-9:
            continue
        cleaned.append(p)

    eps = OCCLUSION_EPS_FACTOR * tester.scene_scale
    bounds = [0.0, *cleaned, n_last]
    hidden_flags: list[bool] = []
    trouble = False
    for k in range(len(bounds) - 1):
        mid = 0.5 * (bounds[k] + bounds[k + 1])
        i = min(int(mid), len(poly.points) - 2)
        t = mid - i
        if poly.params is not None:
            ua, va = poly.params[i]
            ub, vb = poly.params[i + 1]
            own_uv = (ua + (ub - ua) * t, va + (vb - va) * t)
            p3 = s.point(*own_uv)
            q, d = project(p3, proj)
        else:
            own_uv = None
            a3, b3 = poly.space[i], poly.space[i + 1]
            p3 = Point3(
                a3.x + (b3.x - a3.x) * t,
                a3.y + (b3.y - a3.y) * t,
                a3.z + (b3.z - a3.z) * t,
            )
            q, d = project(p3, proj)
        flag, bad = tester.hidden(q, d, own_uv, eps)
        hidden_flags.append(flag)
        trouble = trouble or bad
    if trouble:
        log.warning(
            "newton occlusion solve failed for %r; leaving interval visible",
            curve.label,
        )
    return VisibilityTaggedCurve(
        poly, tuple(cleaned), tuple(hidden_flags), curve.label
    )


# ---------------------------------------------------------------------------
# scene assembly


@dataclass(frozen=True)
class SceneConfig:
    wires_u: tuple[float, ...] = ()
    wires_v: tuple[float, ...] = ()
    grid: int = 200
    samples: int = 100
    seeds: int = 32
    contact_tol: float = 0.02
    refine_tol: float = 1e-7
    window: int = 6
    hidden_style: str = "dashed"  # or "omit"
    axes: bool = True

    def __post_init__(self):
        if self.hidden_style not in ("dashed", "omit"):
            raise ValueError("hidden_style must be 'dashed' or 'omit'")


@dataclass(frozen=True)
class SceneReport:
    """What went into a scene, for inspection and tests."""

    silhouettes: tuple[VisibilityTaggedCurve, ...]
    boundaries: tuple[VisibilityTaggedCurve, ...]
    wires: tuple[VisibilityTaggedCurve, ...]
    extras: tuple[VisibilityTaggedCurve, ...]


def _axis_curves(s: ParametricSurface, samples: int) -> list[SpaceCurve]:
    n = 8
    pts = []
    for i in range(n + 1):
        u = s.u_range[0] + (s.u_range[1] - s.u_range[0]) * (i / n)
        for j in range(n + 1):
            v = s.v_range[0] + (s.v_range[1] - s.v_range[0]) * (j / n)
            try:
                pts.append(s.point(u, v))
            except DomainError:
                continue
    if not pts:
        raise SurfaceError("surface undefined everywhere")
    los = [min(p.x for p in pts), min(p.y for p in pts), min(p.z for p in pts)]
    his = [max(p.x for p in pts), max(p.y for p in pts), max(p.z for p in pts)]
    curves = []
    for axis, name in enumerate("xyz"):
        span = max(his[axis] - los[axis], 1.0)
        lo = min(los[axis], 0.0) - 0.35 * span
        hi = max(his[axis], 0.0) + 0.35 * span
        coords = []
        for k in range(samples + 1):
            t = lo + (hi - lo) * (k / samples)
            vec = [0.0, 0.0, 0.0]
            vec[axis] = t
            coords.append(Point3(*vec))
        curves.append(SpaceCurve(tuple(coords), None, f"axis:{name}"))
    return curves


def build_surface_scene(
    s: ParametricSurface,
    proj: Projection | None = None,
    config: SceneConfig | None = None,
    extra_curves: Sequence[SpaceCurve] = (),
) -> tuple[Scene, SceneReport]:
    """Assemble the hidden-line scene and report its tagged curves."""
    proj = proj or Projection()
    cfg = config or SceneConfig()

    sil = silhouette(s, proj, TraceConfig(s.u_range, s.v_range, grid=cfg.grid))
    bounds = boundary_curves(s, samples=cfg.samples)
    wire_curves = wires(s, cfg.wires_u, cfg.wires_v, samples=cfg.samples)
    extras = list(extra_curves)
    if cfg.axes:
        extras.extend(_axis_curves(s, cfg.samples))

    outline_curves = [*bounds, *sil]
    drawn: list[tuple[str, SpaceCurve]] = (
        [("boundary", c) for c in bounds]
        + [("silhouette", c) for c in sil]
        + [("wire", c) for c in wire_curves]
        + [("extra", c) for c in extras]
    )
    projected: list[tuple[str, SpaceCurve, Polyline]] = []
    for role, curve in drawn:
        poly = project_curve(curve, proj)
        if poly is None:
            log.warning("dropping curve %r: degenerate projection", curve.label)
            continue
        projected.append((role, curve, poly))
    outline_polys = [
        (c, p) for role, c, p in projected if role in ("boundary", "silhouette")
    ]

    tester = OcclusionTester(s, proj, seeds=cfg.seeds)

    def cut_points(poly: Polyline) -> list[Point2]:
        pts: list[Point2] = []
        for oc, op in outline_polys:
            if op is poly:
                res = intersect_projected(poly, poly, tol=cfg.contact_tol)
            else:
                res = intersect_projected(poly, op, tol=cfg.contact_tol)
            pts.extend(c.point for c in res.crossings)
            for site in res.contacts:
                other = poly if op is poly else op
                rc = refine_contact(
                    poly, other, site.ia, site.ib, cfg.window, cfg.refine_tol
                )
                pts.append(rc.point)
        return pts

    def work(item: tuple[str, SpaceCurve, Polyline]) -> VisibilityTaggedCurve:
        role, curve, poly = item
        return classify_visibility(curve, s, proj, cut_points(poly), tester)

    with ThreadPoolExecutor() as pool:
        tagged = list(pool.map(work, projected))

    by_role: dict[str, list[VisibilityTaggedCurve]] = {
        "boundary": [],
        "silhouette": [],
        "wire": [],
        "extra": [],
    }
    for (role, _, _), tc in zip(projected, tagged):
        by_role[role].append(tc)

    items: list[DrawItem] = []
    for tc in tagged:
        drawn: list[DrawItem] = []
        for sub, hidden_flag in tc.intervals():
            if hidden_flag and cfg.hidden_style == "omit":
                continue
            style = Style.DASHED if hidden_flag else Style.SOLID
            drawn.append(DrawItem(sub, style=style))
        if drawn and tc.label.startswith("axis:"):
            # axis letter just past the positive end
            name = tc.label.split(":", 1)[1]
            end = tc.polyline.points[-1]
            drawn[-1] = replace(
                drawn[-1], label=Label(name, Point2(end.x + 0.15, end.y + 0.15))
            )
        items.extend(drawn)
    scene = scene_from_items(items)
    report = SceneReport(
        tuple(by_role["silhouette"]),
        tuple(by_role["boundary"]),
        tuple(by_role["wire"]),
        tuple(by_role["extra"]),
    )
    return scene, report


def render_surface_scene(
    s: ParametricSurface,
    proj: Projection | None = None,
    config: SceneConfig | None = None,
    extra_curves: Sequence[SpaceCurve] = (),
) -> Scene:
    """The assembled Scene (see build_surface_scene for the report too)."""
    return build_surface_scene(s, proj, config, extra_curves)[0]


# ---------------------------------------------------------------------------
# the contact showcase: a paraboloid silhouette brushed by the y axis


@dataclass(frozen=True)
class ContactDemoResult:
    refined: Point2
    refined_ok: bool
    analytic: Point2
    cluster: tuple[Point2, ...]
    cluster_spread: float
    crossings: int


def paraboloid_surface() -> ParametricSurface:
    return ParametricSurface.from_strings(
        "u*cos(v)", "u*sin(v)", "4-u^2", (0.0, 2.0), (0.0, 2.0 * math.pi)
    )


def contact_demo(
    theta: float = math.radians(60.0),
    phi: float = math.radians(25.0),
    grid: int = 200,
    samples: int = 100,
    window: int = 6,
    tol: float = 1e-7,
) -> ContactDemoResult:
    """Refine the y-axis / silhouette crossing of the standard paraboloid.

    The projected silhouette of z = 4 - u^2 is the parabola
    Y = (T/2) sin(phi) + (4 - T^2/4) cos(phi) - cos(phi) X^2 with
    T = tan(phi), and the projected y axis is Y = -tan(theta) sin(phi) X,
    so the true crossing solves a quadratic; that closed form is the
    reference the refined point is compared against.
    """
    s = paraboloid_surface()
    proj = Projection(theta, phi)
    sil = silhouette(s, proj, TraceConfig(s.u_range, s.v_range, grid=grid))
    if not sil:
        raise SurfaceError("no silhouette under this view")
    sil_curve = max(sil, key=lambda c: len(c.points))
    sil_poly = project_curve(sil_curve, proj)

    axis_pts = tuple(
        Point3(0.0, -4.0 + 8.0 * (k / samples), 0.0) for k in range(samples + 1)
    )
    axis_poly = project_curve(SpaceCurve(axis_pts, None, "axis:y"), proj)

    res = intersect_projected(axis_poly, sil_poly, tol=0.02)
    i, j, dmin = closest_approach(axis_poly, sil_poly)

    # the raw vertex-pair cluster around the closest approach: this is
    # what the crossing looks like before refinement
    pa = axis_poly.as_array()
    pb = sil_poly.as_array()
    d = np.sqrt(((pa[:, None, :] - pb[None, :, :]) ** 2).sum(axis=2))
    thresh = max(2.0 * dmin, 1e-12)
    pairs = np.argwhere(d <= thresh)
    cluster = tuple(
        Point2(*(0.5 * (pa[ii] + pb[jj]))) for ii, jj in pairs.tolist()
    )
    spread = 0.0
    for m in range(len(cluster)):
        for k in range(m + 1, len(cluster)):
            spread = max(spread, cluster[m].dist(cluster[k]))

    rc = refine_contact(axis_poly, sil_poly, i, j, window=window, tol=tol)

    t_phi = math.tan(phi)
    c0 = (t_phi / 2.0) * math.sin(phi) + (4.0 - t_phi * t_phi / 4.0) * math.cos(phi)
    slope = -math.tan(theta) * math.sin(phi)
    # equating the two: cos(phi) X^2 + slope X - c0 = 0
    a_q = math.cos(phi)
    disc = slope * slope + 4.0 * a_q * c0
    x_limit = math.sqrt(max(4.0 - t_phi * t_phi / 4.0, 0.0))
    roots = [
        (-slope + sgn * math.sqrt(disc)) / (2.0 * a_q) for sgn in (-1.0, 1.0)
    ]
    on_sil = [x for x in roots if abs(x) <= x_limit] or roots
    xr = min(on_sil, key=lambda x: abs(x - rc.point.x))
    analytic = Point2(xr, slope * xr)

    return ContactDemoResult(
        rc.point, rc.refined, analytic, cluster, spread, len(res.crossings)
    )
