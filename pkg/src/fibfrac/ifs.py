"""The five-map iterated function system behind the curve family.

The maps are not hard-coded: they are recovered from the five-partite
self-similarity of the drawn curves.  A junction recursion propagates the
six five-partite junction points of f_m and l_m exactly to arbitrarily high
order, the recursion is validated against an actually drawn reference curve,
and the similarity parameters are then fitted at a converged order where the
junction hexagons are similar to machine precision.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import turtle, words
from .errors import (
    DegenerateLandmarksError,
    DomainError,
    SelfSimilarityError,
)

CHORD_LENGTH = math.sqrt(2.0)

# converged recursion level per parity class (5 mod 6 and 3 mod 6)
_CONVERGED_LEVEL = {0: 149, 1: 147}


@dataclass(frozen=True)
class Similarity:
    """Planar similarity z -> a * z + t, with optional x-axis mirror first.

    scale = |a|, rotation = arg(a); reflect conjugates the input before the
    rotation and scaling are applied.
    """

    scale: float
    rotation: float
    reflect: bool
    translation: tuple

    def _coeffs(self):
        a = self.scale * complex(math.cos(self.rotation), math.sin(self.rotation))
        t = complex(self.translation[0], self.translation[1])
        return a, t

    def apply(self, pts) -> np.ndarray:
        """Transform an (N, 2) point array."""
        pts = np.asarray(pts, dtype=np.float64)
        z = pts[..., 0] + 1j * pts[..., 1]
        if self.reflect:
            z = np.conj(z)
        a, t = self._coeffs()
        out = a * z + t
        return np.stack([out.real, out.imag], axis=-1)

    def compose(self, other: "Similarity") -> "Similarity":
        """The similarity applying `other` first, then this one."""
        a1, t1 = self._coeffs()
        a2, t2 = other._coeffs()
        if self.reflect:
            a = a1 * np.conj(a2)
            t = a1 * np.conj(t2) + t1
        else:
            a = a1 * a2
            t = a1 * t2 + t1
        return Similarity(
            scale=abs(a),
            rotation=math.atan2(a.imag, a.real),
            reflect=self.reflect != other.reflect,
            translation=(t.real, t.imag),
        )


def _fit_complex(src: np.ndarray, dst: np.ndarray):
    """Centered least-squares similarity fit, trying both reflections.

    Centering keeps the normal equations well conditioned regardless of how
    far the landmark cloud sits from the origin.
    """
    zs = src[:, 0] + 1j * src[:, 1]
    zd = dst[:, 0] + 1j * dst[:, 1]
    ms, md = zs.mean(), zd.mean()
    zdc = zd - md
    best = None
    for refl in (False, True):
        zc = np.conj(zs - ms) if refl else (zs - ms)
        denom = float(np.vdot(zc, zc).real)
        if denom == 0.0:
            raise DegenerateLandmarksError("all source landmarks coincide")
        a = complex(np.vdot(zc, zdc)) / denom
        t = md - a * (np.conj(ms) if refl else ms)
        rms = float(np.sqrt(np.mean(np.abs(a * zc - zdc) ** 2)))
        if best is None or rms < best[3]:
            best = (a, t, refl, rms)
    a, t, refl, rms = best
    sim = Similarity(
        scale=abs(a),
        rotation=math.atan2(a.imag, a.real),
        reflect=refl,
        translation=(t.real, t.imag),
    )
    return sim, rms


def fit_similarity(src, dst, allow_collinear: bool = False):
    """Least-squares similarity carrying src landmarks onto dst landmarks.

    Tries reflect = False and True and keeps the smaller RMS residual.
    Returns (Similarity, residual).  Collinear landmark sets leave the
    reflection undetermined and are rejected unless allow_collinear is set
    (the fitted in-line map is still well defined and used internally for
    degenerate angles).
    """
    src = np.asarray(src, dtype=np.float64)
    dst = np.asarray(dst, dtype=np.float64)
    if src.shape != dst.shape or src.ndim != 2 or src.shape[1] != 2:
        raise DomainError("src and dst must be matching (N, 2) arrays")
    if src.shape[0] < 3:
        raise DomainError("need at least 3 landmarks, got %d" % src.shape[0])
    if not allow_collinear:
        sv = np.linalg.svd(src - src.mean(axis=0), compute_uv=False)
        if sv[0] == 0.0 or sv[1] <= 1e-9 * sv[0]:
            raise DegenerateLandmarksError("source landmarks are collinear")
    return _fit_complex(src, dst)


def _rot(t: float) -> np.ndarray:
    c, s = math.cos(t), math.sin(t)
    return np.array([[c, -s], [s, c]])


_MIRROR = np.array([[-1.0, 0.0], [0.0, 1.0]])


def _psi(sym: int, pos: int, sgn: int) -> int:
    """Turn-count contribution of one symbol at 1-based position pos."""
    if sym == 1:
        return 0
    return sgn if pos % 2 == 0 else -sgn


def _junction_indices(i: int, n: int) -> np.ndarray:
    """Vertex indices of the six five-partite junction points of f_n."""
    len3 = words.fib_length(i, n - 3)
    len6 = words.fib_length(i, n - 6)
    return np.array(
        [0, len3, 2 * len3, 2 * len3 + len6, 3 * len3 + len6, 4 * len3 + len6]
    )


class _Skeleton:
    """Exact chord and junction-hexagon recursion for drawings of f_m and l_m.

    Seeds for m <= 12 come from direct drawing; higher orders follow from the
    five-partite assembly.  A part starting at an odd symbol offset sees the
    position parity flipped, which mirrors its drawing across the initial
    heading axis and negates its turn count; the bookkeeping here carries
    both effects exactly.
    """

    def __init__(self, i, alpha, parity="even-left", draw_parity=None, m_max=150):
        self.i = i
        self.alpha = alpha
        self.sgn = 1 if parity == "even-left" else -1
        draw_parity = parity if draw_parity is None else draw_parity
        # exact arbitrary-precision lengths: only offset parities are needed,
        # and materializable-word limits do not apply to bookkeeping
        self.L = {1: 1, 2: i}
        for m in range(3, m_max + 1):
            self.L[m] = self.L[m - 1] + self.L[m - 2]
        self.v = {}  # chord vector of the f_m drawing
        self.vl = {}  # chord vector of the l_m drawing
        self.K = {}  # net turn count of f_m
        self.Kl = {}
        self.H = {}  # six-point junction hexagons, m >= 7
        self.Hl = {}
        for m in range(1, min(12, m_max) + 1):
            w = words.word_concat(i, m)
            p = turtle.draw(w, alpha, parity=draw_parity).points
            self.v[m] = p[-1].copy()
            self.K[m] = turtle.turn_count(w, parity=parity)
            if self.L[m] >= 2:
                lw = words.l_word_bits(i, m)
                pl = turtle.draw(lw, alpha, parity=draw_parity).points
                self.vl[m] = pl[-1].copy()
                self.Kl[m] = turtle.turn_count(lw, parity=parity)
            if m >= 7:
                self.H[m] = p[_junction_indices(i, m)].copy()
                self.Hl[m] = self.H[m].copy()
                self.Hl[m][-1] = self.vl[m]
        for m in range(13, m_max + 1):
            self._step(m)

    def _part_plan(self, m):
        len3 = self.L[m - 3]
        len6 = self.L[m - 6]
        offsets = (0, len3, 2 * len3, 2 * len3 + len6, 3 * len3 + len6)
        orders = (m - 3, m - 3, m - 6, m - 3, m - 3)
        use_l = (False, False, False, True, True)
        return offsets, orders, use_l

    def _step(self, m):
        a = self.alpha
        offsets, orders, use_l = self._part_plan(m)
        turn = 0
        junction = np.zeros(2)
        pts = [junction.copy()]
        for k in range(5):
            sub = orders[k]
            flip = offsets[k] % 2 == 1
            vsub = self.vl[sub] if use_l[k] else self.v[sub]
            ksub = self.Kl[sub] if use_l[k] else self.K[sub]
            frame = _rot(turn * a) @ (_MIRROR if flip else np.eye(2))
            junction = junction + frame @ vsub
            pts.append(junction.copy())
            turn = turn + (-ksub if flip else ksub)
        self.v[m] = pts[-1].copy()
        self.K[m] = turn
        self.H[m] = np.array(pts)
        # l_m differs from f_m only in its last two symbols, so rebuild the
        # last two segments with the swapped symbols at the same positions
        length = self.L[m]
        a1, b1 = (0, 1) if m % 2 == 0 else (1, 0)
        kpre = (
            self.K[m]
            - _psi(a1, length - 1, self.sgn)
            - _psi(b1, length, self.sgn)
        )

        def seg(count):
            t = math.pi / 2 + count * a
            return np.array([math.cos(t), math.sin(t)])

        base = self.v[m] - seg(kpre + _psi(a1, length - 1, self.sgn)) - seg(kpre)
        vl = base + seg(kpre) + seg(kpre + _psi(b1, length - 1, self.sgn))
        self.vl[m] = vl
        self.Kl[m] = kpre + _psi(b1, length - 1, self.sgn) + _psi(a1, length, self.sgn)
        self.Hl[m] = self.H[m].copy()
        self.Hl[m][-1] = vl

    def part_hexagons(self, m):
        """Whole-curve hexagon and the five parts' own junction hexagons."""
        a = self.alpha
        offsets, orders, use_l = self._part_plan(m)
        turn = 0
        junction = np.zeros(2)
        parts = []
        for k in range(5):
            sub = orders[k]
            flip = offsets[k] % 2 == 1
            hsub = self.Hl[sub] if use_l[k] else self.H[sub]
            vsub = self.vl[sub] if use_l[k] else self.v[sub]
            ksub = self.Kl[sub] if use_l[k] else self.K[sub]
            frame = _rot(turn * a) @ (_MIRROR if flip else np.eye(2))
            parts.append(junction + hsub @ frame.T)
            junction = junction + frame @ vsub
            turn = turn + (-ksub if flip else ksub)
        return self.H[m], parts


@dataclass(frozen=True)
class CanonicalFrame:
    """Placement of the limit: first vertex at origin, chord sqrt(2) long."""

    chord_direction: float

    def seeds(self) -> np.ndarray:
        e = CHORD_LENGTH * np.array(
            [math.cos(self.chord_direction), math.sin(self.chord_direction)]
        )
        return np.array([[0.0, 0.0], e])


@dataclass(frozen=True)
class IFS:
    """Five similarity maps in the canonical frame."""

    maps: tuple
    alpha: float
    parity: str  # "even" or "odd", the parity of the family index i
    frame: CanonicalFrame


def derive_ifs(i: int, alpha: float, n_ref: int | None = None,
               parity: str = "even-left", draw_parity: str | None = None) -> IFS:
    """Recover the five maps from the self-similarity of the drawn curve.

    The reference order n_ref (default 17 for even i, 15 for odd i) must be
    5 mod 6 for even i and 3 mod 6 for odd i.  The junction recursion is
    validated against the actually drawn curve at n_ref; any disagreement
    beyond 1e-6 of the curve diameter raises SelfSimilarityError, which is
    what a mis-set turn parity triggers.  Passing draw_parity different from
    parity deliberately constructs that failure (negative control).

    The similarity parameters are fitted on junction hexagons at a converged
    order, so they do not depend on n_ref beyond validation.
    """
    if i < 2:
        raise DomainError("family index i must be >= 2, got %r" % (i,))
    if not 0.0 <= alpha <= math.pi / 2:
        raise DomainError("alpha must lie in [0, pi/2], got %r" % (alpha,))
    want = 5 if i % 2 == 0 else 3
    if n_ref is None:
        n_ref = 17 if i % 2 == 0 else 15
    if n_ref % 6 != want:
        raise DomainError(
            "for i=%d the reference order must be %d (mod 6), got %d"
            % (i, want, n_ref)
        )
    if n_ref < 7:
        raise DomainError("reference order must be at least 7, got %d" % n_ref)
    level = _CONVERGED_LEVEL[i % 2]
    sk = _Skeleton(i, alpha, parity=parity, draw_parity=draw_parity,
                   m_max=max(level, n_ref))

    # validate the recursion against the drawn reference curve
    drawn = turtle.draw(
        words.word_concat(i, n_ref), alpha,
        parity=parity if draw_parity is None else draw_parity,
    ).points
    lo = drawn.min(axis=0)
    hi = drawn.max(axis=0)
    diam = math.hypot(hi[0] - lo[0], hi[1] - lo[1])
    tol = 1e-6 * diam
    drawn_hex = drawn[_junction_indices(i, n_ref)]
    if np.max(np.abs(drawn_hex - sk.H[n_ref])) > tol:
        raise SelfSimilarityError(
            "junction recursion disagrees with the drawn curve at n=%d; "
            "check the drawing-rule parity configuration" % n_ref
        )
    _, ref_parts = sk.part_hexagons(n_ref)
    offsets, orders, _ = sk._part_plan(n_ref)
    for k in range(5):
        if orders[k] < 7:
            continue
        gidx = offsets[k] + _junction_indices(i, orders[k])
        if np.max(np.abs(drawn[gidx] - ref_parts[k])) > tol:
            raise SelfSimilarityError(
                "five-partite sub-curve %d disagrees with the drawn curve at "
                "n=%d; check the drawing-rule parity configuration" % (k + 1, n_ref)
            )

    # fit the maps at the converged order in the canonical frame
    hexagon, parts = sk.part_hexagons(level)
    scale = CHORD_LENGTH / math.hypot(*sk.v[level])
    src = hexagon * scale
    src_diam = math.hypot(
        np.ptp(src[:, 0]), np.ptp(src[:, 1])
    )
    maps = []
    for k, part in enumerate(parts):
        sim, rms = fit_similarity(src, part * scale, allow_collinear=True)
        if rms > 1e-6 * src_diam:
            raise SelfSimilarityError(
                "similarity fit for part %d has residual %.3e (diameter %.3e)"
                % (k + 1, rms, src_diam)
            )
        maps.append(sim)
    chord = sk.v[level]
    direction = math.atan2(chord[1], chord[0])
    return IFS(
        maps=tuple(maps),
        alpha=alpha,
        parity="even" if i % 2 == 0 else "odd",
        frame=CanonicalFrame(chord_direction=direction),
    )


def attractor(ifs: IFS, depth: int | None = None,
              budget: int | None = None) -> np.ndarray:
    """Deterministic iteration of the IFS from the two chord endpoints.

    V_0 is the canonical seed pair; each level replaces V with the five map
    images concatenated in map order, so depth d gives exactly 2 * 5^d points
    in canonical depth-first order with duplicates kept.  Budget mode stops
    before the count would exceed `budget`.
    """
    if depth is None and budget is None:
        raise DomainError("need a depth or a point budget")
    if depth is not None and depth < 0:
        raise DomainError("depth must be >= 0, got %r" % (depth,))
    if budget is not None and budget < 2:
        raise DomainError("budget must allow at least the 2 seed points")
    pts = ifs.frame.seeds()
    level = 0
    while True:
        if depth is not None and level >= depth:
            break
        if budget is not None and 5 * pts.shape[0] > budget:
            break
        pts = np.vstack([m.apply(pts) for m in ifs.maps])
        level += 1
    return pts


def _convex_hull(pts: np.ndarray) -> np.ndarray:
    """Convex hull vertices in counterclockwise order (monotone chain).

    Collinear boundary points are dropped.  Degenerate inputs return fewer
    than 3 vertices.
    """
    pts = np.unique(np.asarray(pts, dtype=np.float64), axis=0)
    if pts.shape[0] <= 2:
        return pts
    # reject points strictly inside the octagon of axis/diagonal extremes
    # before the sequential scan; only candidates near the boundary remain
    proj = np.column_stack(
        [pts[:, 0], pts[:, 1], pts[:, 0] + pts[:, 1], pts[:, 0] - pts[:, 1]]
    )
    ext = np.unique(np.concatenate([proj.argmin(axis=0), proj.argmax(axis=0)]))
    if ext.size >= 3:
        oct_pts = pts[ext]
        c = oct_pts.mean(axis=0)
        oct_pts = oct_pts[
            np.argsort(np.arctan2(oct_pts[:, 1] - c[1], oct_pts[:, 0] - c[0]))
        ]
        inside = np.ones(pts.shape[0], dtype=bool)
        for j in range(oct_pts.shape[0]):
            ex, ey = oct_pts[(j + 1) % oct_pts.shape[0]] - oct_pts[j]
            rx = pts[:, 0] - oct_pts[j, 0]
            ry = pts[:, 1] - oct_pts[j, 1]
            inside &= ex * ry - ey * rx > 0.0
        pts = pts[~inside]

    def chain(seq):
        out = []
        for x, y in seq:
            while len(out) >= 2 and (
                (out[-1][0] - out[-2][0]) * (y - out[-2][1])
                - (out[-1][1] - out[-2][1]) * (x - out[-2][0])
            ) <= 0.0:
                out.pop()
            out.append((x, y))
        return out

    seq = [(float(x), float(y)) for x, y in pts]
    lower = chain(seq)
    upper = chain(seq[::-1])
    return np.array(lower[:-1] + upper[:-1])


def _support_directions(hull: np.ndarray, extra_angles=()) -> np.ndarray:
    """Outward unit normals of the hull edges, merged and angle-sorted.

    Near-parallel edge families (within 1e-6 rad) are merged to their
    length-weighted mean so that adjacent support lines always intersect
    cleanly.  extra_angles are appended unless an existing family already
    covers them.  Degenerate hulls fall back to a slab around the point set.
    """
    if hull.shape[0] >= 3:
        edges = np.roll(hull, -1, axis=0) - hull
        lens = np.hypot(edges[:, 0], edges[:, 1])
        keep = lens > 0.0
        ang = np.arctan2(edges[keep, 1], edges[keep, 0]) - math.pi / 2
        wts = lens[keep]
    else:
        d = hull[-1] - hull[0]
        base = math.atan2(d[1], d[0]) if np.hypot(*d) > 0.0 else 0.0
        ang = np.array([base, base + math.pi / 2, base + math.pi,
                        base - math.pi / 2])
        wts = np.ones(4)
    ang = np.mod(ang, 2.0 * math.pi)
    order = np.argsort(ang)
    ang = ang[order]
    wts = wts[order]
    merged = []
    g_ang, g_wt = ang[0], wts[0]
    for a, w in zip(ang[1:], wts[1:]):
        if a - g_ang <= 1e-6:
            g_ang = (g_ang * g_wt + a * w) / (g_wt + w)
            g_wt += w
        else:
            merged.append((g_ang, g_wt))
            g_ang, g_wt = a, w
    merged.append((g_ang, g_wt))
    # first and last families may also wrap around 2*pi
    if len(merged) >= 2 and merged[0][0] + 2.0 * math.pi - merged[-1][0] <= 1e-6:
        (a0, w0), (a1, w1) = merged[0], merged.pop()
        merged[0] = (((a0 + 2.0 * math.pi) * w0 + a1 * w1) / (w0 + w1)
                     % (2.0 * math.pi), w0 + w1)
    angles = [a for a, _ in merged]
    for extra in extra_angles:
        extra = extra % (2.0 * math.pi)
        if all(min(abs(extra - a), 2.0 * math.pi - abs(extra - a)) > 1e-6
               for a in angles):
            angles.append(extra)
    # bisect any angular gap wide enough to leave the polygon unbounded
    # (near-collinear samples produce only two antipodal families)
    angles.sort()
    widest = math.inf
    while widest > 0.9 * math.pi:
        widest = 0.0
        filled = []
        count = len(angles)
        for j, a in enumerate(angles):
            filled.append(a)
            b = angles[(j + 1) % count] + (2.0 * math.pi if j == count - 1 else 0.0)
            if b - a > 0.9 * math.pi:
                filled.append(a + (b - a) / 2.0)
                widest = max(widest, b - a)
        angles = sorted(x % (2.0 * math.pi) for x in filled)
    if len(angles) > 512:
        weights = {a: w for a, w in merged}
        angles.sort(key=lambda a: weights.get(a, math.inf), reverse=True)
        angles = angles[:512]
    ang = np.sort(np.asarray(angles, dtype=np.float64))
    return np.column_stack([np.cos(ang), np.sin(ang)])


def _support_polygon_corners(normals: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    """Corners of the convex polygon {x : normals @ x <= offsets}.

    Normals must be sorted by angle; consecutive half-plane boundaries meet
    in the polygon's corners.
    """
    n2 = np.roll(normals, -1, axis=0)
    o2 = np.roll(offsets, -1)
    det = normals[:, 0] * n2[:, 1] - normals[:, 1] * n2[:, 0]
    if np.any(np.abs(det) < 1e-12):
        raise DegenerateLandmarksError(
            "support polygon degenerates: parallel adjacent half-planes"
        )
    cx = (offsets * n2[:, 1] - o2 * normals[:, 1]) / det
    cy = (normals[:, 0] * o2 - n2[:, 0] * offsets) / det
    return np.column_stack([cx, cy])


def _polygon_overlap(pa: np.ndarray, pb: np.ndarray) -> float:
    """Separating-axis overlap depth of two convex polygons (<= 0: separated)."""
    depth = math.inf
    for poly in (pa, pb):
        edges = np.roll(poly, -1, axis=0) - poly
        lens = np.hypot(edges[:, 0], edges[:, 1])
        edges = edges[lens > 0.0] / lens[lens > 0.0, None]
        axes = np.column_stack([-edges[:, 1], edges[:, 0]])
        qa = pa @ axes.T
        qb = pb @ axes.T
        gaps = np.minimum(qa.max(axis=0), qb.max(axis=0)) - np.maximum(
            qa.min(axis=0), qb.min(axis=0)
        )
        depth = min(depth, float(gaps.min()))
    return depth


@dataclass(frozen=True)
class OSCReport:
    """Outcome of the open-set-condition check."""

    contained: bool
    pairwise_disjoint: bool
    margin: float


def verify_osc(ifs: IFS, tolerance: float = 1e-9) -> OSCReport:
    """Check the open set condition with an invariant support polygon.

    The open set V is the polygon bounded in the edge directions of the
    depth-8 attractor sample's convex hull (plus the chord slab), so the
    direction set follows the attractor's own frame for every family index
    and drawing parity.  Offsets start from the hull supports and are
    inflated until V contains its own five images, then containment and
    pairwise interior disjointness are measured on the image polygons.
    margin is the slack left under `tolerance`; positive margin means both
    checks passed.
    """
    sample = attractor(ifs, depth=8)
    hull = _convex_hull(sample)
    dirc = ifs.frame.chord_direction
    normals = _support_directions(
        hull, extra_angles=(dirc + math.pi / 2, dirc - math.pi / 2)
    )
    offsets = (hull @ normals.T).max(axis=0)
    scale_ref = float(np.max(np.abs(offsets))) + 1.0
    for _ in range(200):
        corners = _support_polygon_corners(normals, offsets)
        images = np.vstack([m.apply(corners) for m in ifs.maps])
        grown = np.maximum(offsets, (images @ normals.T).max(axis=0))
        if np.all(grown - offsets <= 1e-15 * scale_ref):
            offsets = grown
            break
        offsets = grown
    corners = _support_polygon_corners(normals, offsets)
    image_polys = [m.apply(corners) for m in ifs.maps]
    worst_violation = max(
        float(((poly @ normals.T) - offsets).max()) for poly in image_polys
    )
    worst_overlap = 0.0
    count = len(image_polys)
    for j in range(count):
        for k in range(j + 1, count):
            overlap = _polygon_overlap(image_polys[j], image_polys[k])
            if overlap > worst_overlap:
                worst_overlap = overlap
    contained = worst_violation <= tolerance
    disjoint = worst_overlap <= tolerance
    margin = tolerance - max(worst_violation, worst_overlap)
    return OSCReport(
        contained=contained,
        pairwise_disjoint=disjoint,
        margin=float(margin),
    )


def invariance_residual(ifs: IFS, pts) -> float:
    """Hausdorff distance between the union of the five map images and pts."""
    from . import metrics

    pts = np.asarray(pts, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[0] < 2:
        raise DomainError("point set must contain at least 2 points")
    union = np.vstack([m.apply(pts) for m in ifs.maps])
    return metrics.hausdorff_distance(union, pts)


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def to_json(ifs: IFS) -> str:
    """Serialize an IFS with 17 significant digits, byte-deterministic."""
    map_items = []
    for m in ifs.maps:
        map_items.append(
            '{"scale": %s, "rotation": %s, "reflect": %s, "tx": %s, "ty": %s}'
            % (
                _fmt(m.scale),
                _fmt(m.rotation),
                "true" if m.reflect else "false",
                _fmt(m.translation[0]),
                _fmt(m.translation[1]),
            )
        )
    return (
        '{"alpha": %s, "parity": "%s", "chord_direction": %s, "maps": [%s]}'
        % (_fmt(ifs.alpha), ifs.parity, _fmt(ifs.frame.chord_direction),
           ", ".join(map_items))
    )


def from_json(text: str) -> IFS:
    """Rebuild an IFS from its JSON serialization."""
    data = json.loads(text)
    maps = tuple(
        Similarity(
            scale=float(m["scale"]),
            rotation=float(m["rotation"]),
            reflect=bool(m["reflect"]),
            translation=(float(m["tx"]), float(m["ty"])),
        )
        for m in data["maps"]
    )
    if len(maps) != 5:
        raise DomainError("an IFS needs exactly five maps, got %d" % len(maps))
    return IFS(
        maps=maps,
        alpha=float(data["alpha"]),
        parity=str(data["parity"]),
        frame=CanonicalFrame(chord_direction=float(data["chord_direction"])),
    )
