"""Turtle rendering of i-Fibonacci words and geometry of the resulting curves.

The drawing rule starts at the origin heading straight up (pi/2).  For the
j-th symbol (1-based) it draws one segment of length `unit`, then turns by
alpha after a 0 (left on even j, right on odd j under the default parity)
and keeps its heading after a 1.  Headings are tracked as integer multiples
of alpha so direction never drifts over millions of segments.
"""

from __future__ import annotations

import math
from collections import namedtuple
from dataclasses import dataclass

import numpy as np

from . import words
from .errors import DomainError

INITIAL_HEADING = math.pi / 2

PARITIES = ("even-left", "odd-left")


def _turn_signs(bits: np.ndarray, parity: str) -> np.ndarray:
    """Per-symbol turn as an integer multiple of alpha (+1 left, -1 right)."""
    if parity not in PARITIES:
        raise DomainError("parity must be one of %r, got %r" % (PARITIES, parity))
    signs = np.zeros(bits.size, dtype=np.int8)
    idx = np.arange(bits.size, dtype=np.int64)
    zeros = bits == 0
    signs[zeros & (idx % 2 == 1)] = 1  # even 1-based position
    signs[zeros & (idx % 2 == 0)] = -1  # odd 1-based position
    if parity == "odd-left":
        np.negative(signs, out=signs)
    return signs


@dataclass(frozen=True)
class Polyline:
    """An ordered run of 2D vertices produced by the drawing rule."""

    points: np.ndarray
    i: int | None
    n: int | None
    alpha: float
    unit: float
    final_heading: float
    turn_count: int

    def __len__(self) -> int:
        return int(self.points.shape[0])


def draw(w, alpha: float, unit: float = 1.0, parity: str = "even-left") -> Polyline:
    """Render a word as a polyline; vertex count is word length + 1."""
    if not 0.0 <= alpha <= math.pi / 2:
        raise DomainError("alpha must lie in [0, pi/2], got %r" % (alpha,))
    if not unit > 0.0:
        raise DomainError("unit must be positive, got %r" % (unit,))
    bits = words.as_bits(w)
    signs = _turn_signs(bits, parity)
    kcum = np.cumsum(signs, dtype=np.int64)
    kbefore = np.empty(bits.size, dtype=np.int64)
    if bits.size:
        kbefore[0] = 0
        kbefore[1:] = kcum[:-1]
    heading = INITIAL_HEADING + alpha * kbefore
    pts = np.zeros((bits.size + 1, 2), dtype=np.float64)
    pts[1:, 0] = np.cumsum(unit * np.cos(heading))
    pts[1:, 1] = np.cumsum(unit * np.sin(heading))
    k_total = int(kcum[-1]) if bits.size else 0
    wi = w.i if isinstance(w, words.Word) else None
    wn = w.n if isinstance(w, words.Word) else None
    return Polyline(
        points=pts,
        i=wi,
        n=wn,
        alpha=alpha,
        unit=unit,
        final_heading=INITIAL_HEADING + alpha * k_total,
        turn_count=k_total,
    )


def turn_count(w, parity: str = "even-left") -> int:
    """Net turn count of a word: the integer k with final heading pi/2 + k*alpha."""
    bits = words.as_bits(w)
    if bits.size == 0:
        return 0
    return int(_turn_signs(bits, parity).sum(dtype=np.int64))


def net_angle(w, alpha: float, parity: str = "even-left") -> float:
    """Final heading pi/2 + alpha * (sum of turns); pi/2 for the empty word."""
    return INITIAL_HEADING + alpha * turn_count(w, parity)


@dataclass(frozen=True)
class CurveStats:
    """Chord width, perpendicular height, aspect ratio, and net heading."""

    w: float
    h: float
    aspect: float
    net_angle: float


def _as_points(p) -> np.ndarray:
    pts = p.points if isinstance(p, Polyline) else np.asarray(p, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise DomainError("expected an (N, 2) point array")
    return pts


def curve_stats(p) -> CurveStats:
    """Width w = |last - first|; height h = perpendicular spread across the chord.

    h is the full extent of the signed perpendicular offsets from the chord
    line (equal to the maximum distance when the curve stays on one side).
    The aspect ratio w/h is flagged infinite when h < 1e-12 * w.
    """
    pts = _as_points(p)
    if pts.shape[0] < 2:
        raise DomainError("curve_stats needs at least 2 points")
    chord = pts[-1] - pts[0]
    w = float(math.hypot(chord[0], chord[1]))
    if w > 0.0:
        ux, uy = chord[0] / w, chord[1] / w
        eta = (pts[:, 0] - pts[0, 0]) * (-uy) + (pts[:, 1] - pts[0, 1]) * ux
        h = float(eta.max() - eta.min())
    else:
        h = float(max(np.ptp(pts[:, 0]), np.ptp(pts[:, 1])))
    if h < 1e-12 * w or h == 0.0:
        aspect = math.inf
    else:
        aspect = w / h
    final = p.final_heading if isinstance(p, Polyline) else math.nan
    return CurveStats(w=w, h=h, aspect=aspect, net_angle=final)


@dataclass(frozen=True)
class OrientedBox:
    """Minimal rectangle in a given frame containing all of a sub-curve's vertices."""

    center: np.ndarray
    axis: np.ndarray
    half: tuple

    def corners(self) -> np.ndarray:
        u = self.axis
        v = np.array([-u[1], u[0]])
        a, b = self.half
        return np.array(
            [
                self.center + a * u + b * v,
                self.center - a * u + b * v,
                self.center - a * u - b * v,
                self.center + a * u - b * v,
            ]
        )

    def diagonal(self) -> float:
        return 2.0 * math.hypot(self.half[0], self.half[1])


def oriented_box(p, frame_angle: float = 0.0) -> OrientedBox:
    """Minimal rectangle whose axes are the global axes rotated by frame_angle."""
    pts = _as_points(p)
    if pts.shape[0] < 2:
        raise DomainError("oriented_box needs at least 2 points")
    u = np.array([math.cos(frame_angle), math.sin(frame_angle)])
    v = np.array([-u[1], u[0]])
    rel = pts - pts[0]
    xi = rel @ u
    eta = rel @ v
    xi_lo, xi_hi = float(xi.min()), float(xi.max())
    eta_lo, eta_hi = float(eta.min()), float(eta.max())
    center = pts[0] + u * (0.5 * (xi_lo + xi_hi)) + v * (0.5 * (eta_lo + eta_hi))
    half = (0.5 * (xi_hi - xi_lo), 0.5 * (eta_hi - eta_lo))
    return OrientedBox(center=center, axis=u, half=half)


def subcurves(i: int, n: int, alpha: float, unit: float = 1.0,
              parity: str = "even-left"):
    """Five-partite split of the drawn curve, with one oriented box per part.

    Parts share their junction vertices, so part k ends where part k+1
    starts.  Each part's box is aligned to that part's own drawing frame:
    the global frame rotated by (entering turn count) * alpha, which is the
    frame in which the part is a copy of a free-standing curve.  Returns
    (list of five Polylines, list of five OrientedBoxes).
    """
    fp = words.five_partite(i, n)  # validates n >= 7 and the decomposition
    bits = fp.word.bits()
    kcum = np.concatenate(
        ([0], np.cumsum(_turn_signs(bits, parity), dtype=np.int64))
    )
    whole = draw(fp.word, alpha, unit=unit, parity=parity)
    polys = []
    boxes = []
    for start, end in fp.parts:
        pts = whole.points[start : end + 1]
        polys.append(
            Polyline(
                points=pts,
                i=i,
                n=None,
                alpha=alpha,
                unit=unit,
                final_heading=math.nan,
                turn_count=0,
            )
        )
        boxes.append(oriented_box(pts, frame_angle=int(kcum[start]) * alpha))
    return polys, boxes


def _axis_radius(box: OrientedBox, ax: np.ndarray) -> float:
    u = box.axis
    v = np.array([-u[1], u[0]])
    return abs(box.half[0] * float(u @ ax)) + abs(box.half[1] * float(v @ ax))


def _sat_overlap(a: OrientedBox, b: OrientedBox) -> float:
    """Smallest projected overlap across the four SAT axes (<= 0: separated)."""
    axes = (
        a.axis,
        np.array([-a.axis[1], a.axis[0]]),
        b.axis,
        np.array([-b.axis[1], b.axis[0]]),
    )
    d = b.center - a.center
    depth = math.inf
    for ax in axes:
        overlap = _axis_radius(a, ax) + _axis_radius(b, ax) - abs(float(d @ ax))
        if overlap < depth:
            depth = overlap
    return depth


BoxReport = namedtuple("BoxReport", ["disjoint", "violating_pair"])


def boxes_disjoint(boxes) -> BoxReport:
    """Pairwise interior disjointness via the separating-axis test.

    Boundary contact is allowed: overlap up to tau = 1e-9 times the largest
    box diagonal does not count as a violation.  Returns the verdict and the
    first violating pair of indices (or None).
    """
    boxes = list(boxes)
    if not boxes:
        return BoxReport(True, None)
    tau = 1e-9 * max(b.diagonal() for b in boxes)
    for j in range(len(boxes)):
        for k in range(j + 1, len(boxes)):
            if _sat_overlap(boxes[j], boxes[k]) > tau:
                return BoxReport(False, (j, k))
    return BoxReport(True, None)


def check_box_residue(i: int, n: int) -> None:
    """Axis-aligned box claims hold for n = 5 mod 6 (even i), n = 3 mod 6 (odd i)."""
    want = 5 if i % 2 == 0 else 3
    if n % 6 != want:
        raise DomainError(
            "for i=%d the box property needs n = %d (mod 6), got n=%d" % (i, want, n)
        )


def endpoints_on_box(i: int, n: int, alpha: float = math.pi / 2,
                     parity: str = "even-left") -> bool:
    """True iff both curve endpoints sit on the axis-aligned bounding box edge.

    Only defined at alpha = pi/2 where the bounding box is axis-aligned, for
    n = 5 (mod 6) when i is even and n = 3 (mod 6) when i is odd.  For even i
    the endpoints land exactly on box corners; for odd i they sit on the top
    and bottom edges.
    """
    check_box_residue(i, n)
    if abs(alpha - math.pi / 2) > 1e-12:
        raise DomainError("endpoints_on_box is defined for alpha = pi/2 only")
    p = draw(words.word_concat(i, n), math.pi / 2, parity=parity)
    pts = p.points
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    tol = 1e-9 * math.hypot(hi[0] - lo[0], hi[1] - lo[1])
    ok = True
    for q in (pts[0], pts[-1]):
        on_edge = (
            abs(q[0] - lo[0]) <= tol
            or abs(q[0] - hi[0]) <= tol
            or abs(q[1] - lo[1]) <= tol
            or abs(q[1] - hi[1]) <= tol
        )
        ok = ok and on_edge
    return ok


def collinear_run_lengths(p, tol: float = 1e-9) -> np.ndarray:
    """Lengths of maximal collinear same-direction runs of segments."""
    pts = _as_points(p)
    d = np.diff(pts, axis=0)
    if d.shape[0] == 0:
        return np.zeros(0)
    seglen = np.hypot(d[:, 0], d[:, 1])
    if d.shape[0] == 1:
        return seglen
    cross = d[:-1, 0] * d[1:, 1] - d[:-1, 1] * d[1:, 0]
    dot = (d[:-1] * d[1:]).sum(axis=1)
    straight = (np.abs(cross) <= tol * seglen[:-1] * seglen[1:]) & (dot > 0)
    starts = np.concatenate(([0], np.flatnonzero(~straight) + 1))
    return np.add.reduceat(seglen, starts)
