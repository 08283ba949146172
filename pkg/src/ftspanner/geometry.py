"""Points, axis-aligned boxes, cones and cone frames.

Point sets are plain ``(n, d)`` float arrays. Boxes and cones are small
immutable dataclasses for the public API; the ``_``-prefixed numba helpers
operate on raw coordinate arrays and are shared by the construction kernels.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from numba import njit

ANGLE_TOL = 1e-9
MAX_FRAME_CONES = 2_000_000


def as_points(points, *, allow_empty: bool = False) -> np.ndarray:
    """Validate and return a C-contiguous ``(n, d)`` float64 array."""
    arr = np.ascontiguousarray(np.asarray(points, dtype=np.float64))
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise ValueError(f"points must be a 2-d array, got shape {arr.shape}")
    if arr.shape[1] < 1:
        raise ValueError("dimension must be >= 1")
    if arr.shape[0] == 0 and not allow_empty:
        raise ValueError("point set is empty")
    if not np.all(np.isfinite(arr)):
        raise ValueError("point coordinates must be finite")
    return arr


def check_distinct(points: np.ndarray) -> None:
    """Raise ``ValueError`` if two rows coincide."""
    uniq = np.unique(points, axis=0)
    if uniq.shape[0] != points.shape[0]:
        raise ValueError(
            f"point set contains {points.shape[0] - uniq.shape[0]} duplicate point(s)")


@dataclass(frozen=True)
class AABox:
    """Closed axis-aligned box ``[lo, hi]``."""

    lo: tuple[float, ...]
    hi: tuple[float, ...]

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lo)
        hi = tuple(float(v) for v in self.hi)
        if len(lo) != len(hi) or not lo:
            raise ValueError("lo and hi must have the same nonzero length")
        if any(a > b for a, b in zip(lo, hi)):
            raise ValueError(f"invalid box: lo {lo} exceeds hi {hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def from_points(cls, points) -> "AABox":
        pts = as_points(points)
        return cls(tuple(pts.min(axis=0)), tuple(pts.max(axis=0)))

    @classmethod
    def from_arrays(cls, lo: np.ndarray, hi: np.ndarray) -> "AABox":
        return cls(tuple(lo.tolist()), tuple(hi.tolist()))

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def sides(self) -> tuple[float, ...]:
        return tuple(b - a for a, b in zip(self.lo, self.hi))

    @property
    def center(self) -> tuple[float, ...]:
        return tuple((a + b) / 2 for a, b in zip(self.lo, self.hi))

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        return np.array(self.lo), np.array(self.hi)

    def contains_point(self, p: Sequence[float], tol: float = 0.0) -> bool:
        return all(a - tol <= x <= b + tol for a, x, b in zip(self.lo, p, self.hi))

    def contains_box(self, other: "AABox", tol: float = 0.0) -> bool:
        return all(a - tol <= c and d <= b + tol
                   for a, b, c, d in zip(self.lo, self.hi, other.lo, other.hi))

    def corners(self) -> list[tuple[float, ...]]:
        return [tuple(c) for c in itertools.product(*zip(self.lo, self.hi))]

    def aspect_ratio(self) -> float:
        return aspect_ratio(self)


def _check_same_dim(b1: AABox, b2: AABox) -> None:
    if b1.dim != b2.dim:
        raise ValueError(f"dimension mismatch: {b1.dim} vs {b2.dim}")


def box_distance(b1: AABox, b2: AABox) -> float:
    """Euclidean distance between two boxes (0 when they intersect)."""
    _check_same_dim(b1, b2)
    return float(_box_distance(*b1.arrays(), *b2.arrays()))


def box_size(b: AABox) -> float:
    """Length of the longest side."""
    return max(b.sides)


def aspect_ratio(b: AABox) -> float:
    """Longest over shortest side; a point has aspect ratio 1."""
    sides = b.sides
    longest, shortest = max(sides), min(sides)
    if longest == 0.0:
        return 1.0
    if shortest == 0.0:
        return math.inf
    return longest / shortest


@dataclass(frozen=True)
class Cone:
    """Closed circular cone ``{v : angle(v, axis) <= half_angle}``."""

    axis: tuple[float, ...]
    half_angle: float

    def __post_init__(self):
        axis = tuple(float(v) for v in self.axis)
        norm = math.sqrt(sum(v * v for v in axis))
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"cone axis must be a unit vector (norm {norm!r})")
        if not 0.0 < self.half_angle < math.pi / 2:
            raise ValueError(f"half_angle must lie in (0, pi/2), got {self.half_angle}")
        object.__setattr__(self, "axis", axis)


@dataclass(frozen=True, eq=False)
class ConeFrame:
    """A finite family of cones covering every direction of R^d.

    ``axes`` and ``half_angles`` hold the same cones as ``cones`` in array
    form for the numba kernels. In the plane the cones are equal sectors with
    axes at angle ``2*pi*i/m`` so that lookups reduce to index arithmetic.
    """

    dim: int
    alpha: float
    cones: tuple[Cone, ...]
    axes: np.ndarray = field(repr=False)
    half_angles: np.ndarray = field(repr=False)
    planar: bool = False

    @property
    def angular_span(self) -> float:
        return 2.0 * float(self.half_angles.max())

    def __len__(self) -> int:
        return len(self.cones)

    def cone_index(self, direction: Sequence[float]) -> int:
        """Lowest index of a cone containing ``direction``."""
        v = np.asarray(direction, dtype=np.float64)
        if not np.any(v):
            raise ValueError("zero direction")
        return int(_cone_index(v, self.axes, self.half_angles, self.planar))

    def cones_containing(self, direction: Sequence[float]) -> list[int]:
        v = np.asarray(direction, dtype=np.float64)
        if not np.any(v):
            raise ValueError("zero direction")
        buf = np.empty(len(self.cones), dtype=np.int64)
        cnt = _cones_containing(v, self.axes, self.half_angles, self.planar, buf)
        return buf[:cnt].tolist()


def build_frame(alpha: float, d: int) -> ConeFrame:
    """Build a cone frame of angular span at most ``alpha`` in ``R^d``.

    The plane uses ``ceil(2*pi/alpha)`` equal sectors. For ``d >= 3`` a
    ``g^(d-1)`` grid on each cube face is projected to the sphere; every cell
    becomes a cone around its center direction whose half-angle is the
    largest center-to-corner angle over all cells. ``g`` is the smallest
    grid resolution meeting the span bound, so ``|F| = 2d * g^(d-1)`` with
    ``g`` roughly ``2*sqrt(d-1)/alpha``.
    """
    if not 0.0 < alpha < math.pi / 3:
        raise ValueError(f"alpha must lie in (0, pi/3), got {alpha}")
    if d < 1:
        raise ValueError("dimension must be >= 1")
    if d == 1:
        axes = np.array([[1.0], [-1.0]])
        halves = np.full(2, alpha / 2)
        planar = False
    elif d == 2:
        m = math.ceil(2 * math.pi / alpha - 1e-9)
        ang = 2 * math.pi * np.arange(m) / m
        axes = np.column_stack([np.cos(ang), np.sin(ang)])
        halves = np.full(m, math.pi / m)
        planar = True
    else:
        axes, half = _cube_grid_frame(alpha, d)
        halves = np.full(len(axes), half)
        planar = False
    cones = tuple(Cone(tuple(a), float(h)) for a, h in zip(axes.tolist(), halves))
    return ConeFrame(d, float(alpha), cones, np.ascontiguousarray(axes),
                     np.ascontiguousarray(halves), planar)


def _cube_grid_frame(alpha: float, d: int) -> tuple[np.ndarray, float]:
    g = max(1, math.ceil(2 * math.sqrt(d - 1) / alpha) - 2)
    while True:
        count = 2 * d * g ** (d - 1)
        if count > MAX_FRAME_CONES:
            raise ValueError(
                f"a frame with span {alpha} in R^{d} needs {count} cones; "
                f"limit is {MAX_FRAME_CONES}")
        axes, half = _cube_grid(g, d)
        if 2 * half <= alpha:
            return axes, half
        g += 1


def _cube_grid(g: int, d: int) -> tuple[np.ndarray, float]:
    ticks = -1.0 + 2.0 * np.arange(g + 1) / g
    mids = (ticks[:-1] + ticks[1:]) / 2
    grid = np.stack(np.meshgrid(*([mids] * (d - 1)), indexing="ij"), axis=-1).reshape(-1, d - 1)
    offsets = np.array(list(itertools.product((-1.0, 1.0), repeat=d - 1))) / g
    # the angular extent of a cell does not depend on which face it sits on
    centers = np.insert(grid, 0, 1.0, axis=1)
    cn = centers / np.linalg.norm(centers, axis=1, keepdims=True)
    worst = 0.0
    for off in offsets:
        corner = centers.copy()
        corner[:, 1:] += off
        corner /= np.linalg.norm(corner, axis=1, keepdims=True)
        diff = np.linalg.norm(cn - corner, axis=1)
        summ = np.linalg.norm(cn + corner, axis=1)
        worst = max(worst, float(np.max(2 * np.arctan2(diff, summ))))
    faces = []
    for axis in range(d):
        for sign in (1.0, -1.0):
            pts = np.insert(grid, axis, sign, axis=1)
            faces.append(pts / np.linalg.norm(pts, axis=1, keepdims=True))
    return np.vstack(faces), worst + 1e-12


def angle_between(u: Sequence[float], v: Sequence[float]) -> float:
    """Angle in ``[0, pi]`` between two nonzero vectors."""
    a = np.asarray(u, dtype=np.float64)
    b = np.asarray(v, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError("vectors must have the same dimension")
    if not np.any(a) or not np.any(b):
        raise ValueError("angle with a zero vector is undefined")
    return float(_angle(a, b))


def cone_contains(apex: Sequence[float], cone: Cone, q: Sequence[float]) -> bool:
    """Whether ``q`` lies in the cone translated to ``apex`` (boundary inclusive)."""
    v = np.asarray(q, dtype=np.float64) - np.asarray(apex, dtype=np.float64)
    if not np.any(v):
        raise ValueError("q coincides with the apex; direction undefined")
    return angle_between(v, cone.axis) <= cone.half_angle + ANGLE_TOL


def cap_radius(base: AABox, target: AABox) -> float:
    """Angular radius, around the center-to-center direction, of all
    directions from a point of ``base`` to a point of ``target``."""
    _check_same_dim(base, target)
    return float(_cap_radius(*base.arrays(), *target.arrays()))


def general_cone_direction(base: AABox, target: AABox, frame: ConeFrame,
                           theta1: float | None = None) -> list[int]:
    """Indices of the frame cones through which ``base`` sees ``target``.

    Always selects the cones meeting the cap of directions from ``base`` to
    ``target``, so from every point of ``base`` their union contains
    ``target``. With ``theta1`` it also adds every cone all of whose
    directions lie within ``theta1`` of the cone holding the center-to-center
    direction; the span of the result is then at most ``2*theta1 + alpha``
    whenever the cap fits inside that window.
    """
    _check_same_dim(base, target)
    if box_distance(base, target) <= 0.0:
        raise ValueError("general cone direction needs disjoint boxes")
    blo, bhi = base.arrays()
    tlo, thi = target.arrays()
    radius = _cap_radius(blo, bhi, tlo, thi)
    c = (tlo + thi) / 2 - (blo + bhi) / 2
    buf = np.empty(len(frame), dtype=np.int64)
    cnt = _select_cones(c, radius, frame.axes, frame.half_angles, frame.planar, buf)
    chosen = set(buf[:cnt].tolist())
    if theta1 is not None:
        b0 = frame.cone_index(c)
        h0 = frame.half_angles[b0]
        for i in range(len(frame)):
            far = _angle(frame.axes[i], frame.axes[b0]) + frame.half_angles[i] - h0
            if far <= theta1 + ANGLE_TOL:
                chosen.add(i)
    return sorted(chosen)


def angular_span(frame: ConeFrame, indices: Iterable[int]) -> float:
    """Largest angle between two directions inside the union of the cones."""
    idx = list(indices)
    best = 0.0
    for i in idx:
        for j in idx:
            a = float(_angle(frame.axes[i], frame.axes[j])) if i != j else 0.0
            best = max(best, a + frame.half_angles[i] + frame.half_angles[j])
    return min(best, math.pi)


# --------------------------------------------------------------------------
# numba helpers on raw arrays


@njit(cache=True)
def _box_distance(lo1, hi1, lo2, hi2):
    s = 0.0
    for i in range(lo1.shape[0]):
        g = lo2[i] - hi1[i]
        g2 = lo1[i] - hi2[i]
        if g2 > g:
            g = g2
        if g > 0.0:
            s += g * g
    return math.sqrt(s)


@njit(cache=True)
def _box_size(lo, hi):
    s = 0.0
    for i in range(lo.shape[0]):
        w = hi[i] - lo[i]
        if w > s:
            s = w
    return s


@njit(cache=True)
def _norm(v):
    s = 0.0
    for i in range(v.shape[0]):
        s += v[i] * v[i]
    return math.sqrt(s)


@njit(cache=True)
def _angle(u, v):
    # 2*atan2(|u^-v^|, |u^+v^|) stays accurate near 0 and pi
    nu = _norm(u)
    nv = _norm(v)
    dm = 0.0
    dp = 0.0
    for i in range(u.shape[0]):
        a = u[i] / nu
        b = v[i] / nv
        dm += (a - b) * (a - b)
        dp += (a + b) * (a + b)
    return 2.0 * math.atan2(math.sqrt(dm), math.sqrt(dp))


@njit(cache=True)
def _cap_radius(blo, bhi, tlo, thi):
    c2 = 0.0
    rb = 0.0
    rt = 0.0
    for i in range(blo.shape[0]):
        c = (tlo[i] + thi[i]) / 2 - (blo[i] + bhi[i]) / 2
        c2 += c * c
        rb += (bhi[i] - blo[i]) ** 2
        rt += (thi[i] - tlo[i]) ** 2
    cn = math.sqrt(c2)
    r = (math.sqrt(rb) + math.sqrt(rt)) / 2
    if r >= cn:
        return math.pi
    return math.asin(r / cn)


@njit(cache=True)
def _planar_phi(v):
    phi = math.atan2(v[1], v[0])
    if phi < 0.0:
        phi += 2 * math.pi
    return phi


@njit(cache=True)
def _cones_containing(v, axes, halves, planar, out):
    m = axes.shape[0]
    cnt = 0
    if planar:
        s = 2 * math.pi / m
        phi = _planar_phi(v)
        i0 = int(math.floor(phi / s))
        for k in range(i0 - 1, i0 + 3):
            diff = abs(phi - k * s)
            if diff <= halves[0] + ANGLE_TOL:
                idx = k % m
                dup = False
                for q in range(cnt):
                    if out[q] == idx:
                        dup = True
                if not dup:
                    out[cnt] = idx
                    cnt += 1
        return cnt
    for i in range(m):
        if _angle(v, axes[i]) <= halves[i] + ANGLE_TOL:
            out[cnt] = i
            cnt += 1
    return cnt


@njit(cache=True)
def _cone_index(v, axes, halves, planar):
    buf = np.empty(4 if planar else axes.shape[0], dtype=np.int64)
    cnt = _cones_containing(v, axes, halves, planar, buf)
    best = axes.shape[0]
    for q in range(cnt):
        if buf[q] < best:
            best = buf[q]
    return best


@njit(cache=True)
def _select_cones(c, radius, axes, halves, planar, out):
    """Cones whose axis is within ``radius + half_angle`` of direction ``c``."""
    m = axes.shape[0]
    if planar:
        s = 2 * math.pi / m
        w = radius + halves[0] + ANGLE_TOL
        if 2 * w >= 2 * math.pi:
            for i in range(m):
                out[i] = i
            return m
        phi = _planar_phi(c)
        first = int(math.ceil((phi - w) / s))
        last = int(math.floor((phi + w) / s))
        cnt = 0
        for k in range(first, last + 1):
            out[cnt] = k % m
            cnt += 1
            if cnt == m:
                break
        return cnt
    cnt = 0
    for i in range(m):
        if _angle(c, axes[i]) <= radius + halves[i] + ANGLE_TOL:
            out[cnt] = i
            cnt += 1
    return cnt
