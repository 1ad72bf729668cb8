"""Polyline paths and their admissibility against a filtered set.

Paths are piecewise linear with the standardized arclength parametrization
t in [0, 1]; polylines keep lengths and point incidences exact, curved
inputs must be pre-sampled by the caller.  A path is allowed at budget L
when it is shorter than L and, after leaving the centre, avoids every
member at level L.  The set of admissible budgets is an interval
(length, h] with h the smallest level hit by the path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .filtered_set import FilteredSet

# An entry within this distance of the path counts as hit (conservative
# for admissibility); concatenation endpoints must agree to 1e-12.
INCIDENCE_TOL = 1e-9
ENDPOINT_TOL = 1e-12


class Path:
    """Polyline in the complex plane, at least one vertex, consecutive
    vertices distinct."""

    def __init__(self, vertices):
        vs = tuple(complex(v) for v in vertices)
        if not vs:
            raise PreconditionError("a path needs at least one vertex")
        for a, b in zip(vs, vs[1:]):
            if a == b:
                raise PreconditionError("consecutive vertices must be distinct")
        self.vertices = vs
        diffs = np.diff(np.array(vs, dtype=complex)) if len(vs) > 1 else np.zeros(0, complex)
        self.seg_lengths = np.abs(diffs)
        self.seg_dirs = diffs / self.seg_lengths if len(vs) > 1 else diffs
        self.cum_lengths = np.concatenate([[0.0], np.cumsum(self.seg_lengths)])
        self.length = float(self.cum_lengths[-1])

    @property
    def start(self) -> complex:
        return self.vertices[0]

    @property
    def end(self) -> complex:
        return self.vertices[-1]

    @property
    def n_segments(self) -> int:
        return len(self.vertices) - 1

    def is_constant(self) -> bool:
        return len(self.vertices) == 1

    def vertex_fractions(self) -> np.ndarray:
        """Standardized t of each vertex (arclength fractions)."""
        if self.is_constant():
            return np.zeros(1)
        return self.cum_lengths / self.length

    def point_at(self, t: float) -> complex:
        """Point at standardized parameter t in [0, 1]."""
        if self.is_constant():
            return self.vertices[0]
        u = min(max(float(t), 0.0), 1.0) * self.length
        k = int(np.searchsorted(self.cum_lengths, u, side="right")) - 1
        k = min(max(k, 0), self.n_segments - 1)
        return self.vertices[k] + self.seg_dirs[k] * (u - self.cum_lengths[k])

    def prefix_length(self, t: float) -> float:
        """Arclength travelled up to standardized parameter t."""
        return min(max(float(t), 0.0), 1.0) * self.length

    def sample(self, n: int):
        """(t, z, s) arrays: n uniform parameters merged with all vertices."""
        ts = np.linspace(0.0, 1.0, max(int(n), 2))
        ts = np.unique(np.concatenate([ts, self.vertex_fractions()]))
        zs = np.array([self.point_at(t) for t in ts], dtype=complex)
        ss = ts * self.length
        return ts, zs, ss


def concat(a: Path, b: Path) -> Path:
    """Concatenation; b must start where a ends (1e-12)."""
    if abs(a.end - b.start) > ENDPOINT_TOL:
        raise PreconditionError(f"paths do not meet: {a.end} vs {b.start}")
    return Path(a.vertices + b.vertices[1:])


def reverse(a: Path) -> Path:
    """The inverse path, vertices in reverse order; length is preserved."""
    return Path(a.vertices[::-1])


@dataclass(frozen=True)
class AdmissibleLevelInterval:
    """Budgets L at which a path is allowed: (lower, upper], lower the path
    length (excluded), upper at most the horizon (included)."""

    lower: float
    upper: float

    @property
    def empty(self) -> bool:
        return not (self.lower < self.upper)

    def contains(self, L: float) -> bool:
        return self.lower < L <= self.upper


def _segment_distances(points: np.ndarray, starts: np.ndarray, ends: np.ndarray) -> np.ndarray:
    """Min distance of each point to the union of segments.  points (m,),
    starts/ends (n,) complex; returns (m,)."""
    if len(starts) == 0:
        return np.full(len(points), np.inf)
    d = ends - starts  # (n,)
    ap = points[:, None] - starts[None, :]  # (m, n)
    denom = (d.real ** 2 + d.imag ** 2)[None, :]
    tproj = (ap.real * d.real[None, :] + ap.imag * d.imag[None, :]) / denom
    tproj = np.clip(tproj, 0.0, 1.0)
    closest = starts[None, :] + tproj * d[None, :]
    return np.abs(points[:, None] - closest).min(axis=1)


def _hit_levels(path: Path, fset: FilteredSet) -> float:
    """Smallest entry level incident to the path (horizon if none hit);
    0.0 when the path returns to the centre after departure."""
    if path.is_constant():
        return fset.horizon
    starts = np.array(path.vertices[:-1], dtype=complex)
    ends = np.array(path.vertices[1:], dtype=complex)
    # a return to the centre on any segment after the first kills every level
    if path.n_segments > 1:
        dc = _segment_distances(np.array([fset.centre]), starts[1:], ends[1:])[0]
        if dc <= INCIDENCE_TOL:
            return 0.0
    h = fset.horizon
    if len(fset.points):
        dmin = _segment_distances(fset.points, starts, ends)
        hit = dmin <= INCIDENCE_TOL
        if hit.any():
            h = min(h, float(fset.levels[hit].min()))
    return h


def admissible_levels(path: Path, fset: FilteredSet) -> AdmissibleLevelInterval:
    """Admissible budget interval of a path against a filtered set.

    The path must start at the centre.  It avoids members(L) iff every
    entry it meets has level >= L; combined with length < L the admissible
    budgets are exactly (length, min(h, horizon)] with h the smallest level
    met.  Interior returns to the centre itself are forbidden (the centre
    is a member at every level).
    """
    if abs(path.start - fset.centre) > INCIDENCE_TOL:
        raise PreconditionError("path must start at the set centre")
    h = _hit_levels(path, fset)
    return AdmissibleLevelInterval(path.length, min(h, fset.horizon))


def is_allowed(path: Path, fset: FilteredSet) -> bool:
    return not admissible_levels(path, fset).empty


def local_radius(z: complex, prefix: float, fset: FilteredSet) -> float:
    """Feasible ball radius at a point reached with arclength `prefix`.

    A radius r around z is feasible iff every entry within distance r has
    level at least prefix + r, and the budget stays within the horizon:
    r_max = min(horizon - prefix, min_p max(|p - z|, level(p) - prefix)).
    """
    r = fset.horizon - prefix
    if len(fset.points):
        cand = np.maximum(np.abs(fset.points - z), fset.levels - prefix)
        r = min(r, float(cand.min()))
    return r


def distance_to_set(path: Path, fset: FilteredSet, n_samples: int | None = None) -> float:
    """Computable lower bound for the distance of an allowed path to the
    filtered set: the min over sampled prefixes of the feasible ball
    radius.  Never exceeds the true distance (which infimizes over the
    whole deformation class of the path); always positive for an allowed
    path.  Default sampling: 256 per unit length plus all vertices (the
    minimand only kinks at vertices and equidistance loci).
    """
    iv = admissible_levels(path, fset)
    if iv.empty:
        raise PreconditionError("path is not allowed for this set")
    if n_samples is None:
        n_samples = int(math.ceil(256 * max(1.0, path.length)))
    ts, zs, ss = path.sample(n_samples)
    if len(fset.points):
        cand = np.maximum(np.abs(fset.points[None, :] - zs[:, None]),
                          fset.levels[None, :] - ss[:, None]).min(axis=1)
        r = min(float(cand.min()), float((fset.horizon - ss).min()))
    else:
        r = float((fset.horizon - ss).min())
    return r


def _wrap_angle(x: float) -> float:
    return (x + math.pi) % (2 * math.pi) - math.pi


def is_directional(path: Path, theta: float, alpha: float) -> bool:
    """True iff every segment direction lies in the open arc
    (theta - alpha, theta + alpha).  Requires 0 < alpha < pi/2; vacuously
    true for a constant path."""
    if not (0.0 < alpha < math.pi / 2):
        raise PreconditionError("alpha must lie in (0, pi/2)")
    for d in path.seg_dirs:
        if abs(_wrap_angle(math.atan2(d.imag, d.real) - theta)) >= alpha:
            return False
    return True
