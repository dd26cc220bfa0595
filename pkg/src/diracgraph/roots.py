"""Zeros of analytic functions in rectangles via the argument principle.

Cells are subdivided until each holds a single zero (or a tight cluster),
and zeros are then polished with Muller's method.  Points where the
function has poles are handled by small exclusion disks: cells touching a
disk are never counted, only split until they are negligible and then
dropped.
"""

from __future__ import annotations

import math
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import ContourThroughZero

__all__ = ["Rect", "Root", "RootSearch", "muller", "find_roots"]

SIDE_SAMPLES = 64
MAX_PHASE_STEP = np.pi / 2
# off-centre split points, tried in order when a child contour hits a zero
SPLITS = (0.4871, 0.4937, 0.5313, 0.4419, 0.5581)


@dataclass(frozen=True)
class Rect:
    x0: float
    x1: float
    y0: float
    y1: float

    @property
    def width(self) -> float:
        return self.x1 - self.x0

    @property
    def height(self) -> float:
        return self.y1 - self.y0

    @property
    def size(self) -> float:
        return max(self.width, self.height)

    @property
    def center(self) -> complex:
        return complex(0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1))

    def corners(self):
        return (
            complex(self.x0, self.y0),
            complex(self.x1, self.y0),
            complex(self.x1, self.y1),
            complex(self.x0, self.y1),
        )

    def contains(self, z, slack: float = 0.0) -> bool:
        return (
            self.x0 - slack <= z.real <= self.x1 + slack
            and self.y0 - slack <= z.imag <= self.y1 + slack
        )

    def distance(self, z) -> float:
        dx = max(self.x0 - z.real, 0.0, z.real - self.x1)
        dy = max(self.y0 - z.imag, 0.0, z.imag - self.y1)
        return math.hypot(dx, dy)

    def split(self, frac: float):
        w, h = self.width, self.height
        xs = [self.x0, self.x0 + frac * w, self.x1] if w >= 0.5 * h else [self.x0, self.x1]
        # the second fraction differs slightly so x and y cuts never align with a symmetric zero pattern
        fy = 1.0 - frac + 0.0031
        ys = [self.y0, self.y0 + fy * h, self.y1] if h >= 0.5 * w else [self.y0, self.y1]
        return [Rect(xs[i], xs[i + 1], ys[j], ys[j + 1]) for i in range(len(xs) - 1) for j in range(len(ys) - 1)]

    def as_list(self):
        return [self.x0, self.x1, self.y0, self.y1]


@dataclass
class Root:
    z: complex
    order: int
    multiplicity: int = 1
    cluster: bool = False


@dataclass
class RootSearch:
    roots: list = field(default_factory=list)
    unresolved: list = field(default_factory=list)
    dropped: list = field(default_factory=list)
    winding_total: int = 0


def muller(f: Callable, z0: complex, h: float, tol: float, maxiter: int = 80):
    """Muller iteration for a scalar analytic ``f``.

    Returns ``(z, converged)`` where ``converged`` means the last step was
    below ``tol``.
    """
    xs = [complex(z0) - h, complex(z0) + h, complex(z0) + 0.5j * h]
    fs = [f(x) for x in xs]
    step = np.inf
    for _ in range(maxiter):
        x0, x1, x2 = xs
        f0, f1, f2 = fs
        if f2 == 0:
            return x2, True
        if not all(np.isfinite(v) for v in fs):
            return x2, False
        q = (x2 - x1) / (x1 - x0)
        A = q * f2 - q * (1 + q) * f1 + q * q * f0
        B = (2 * q + 1) * f2 - (1 + q) ** 2 * f1 + q * q * f0
        C = (1 + q) * f2
        disc = np.sqrt(B * B - 4 * A * C)
        den = B + disc if abs(B + disc) >= abs(B - disc) else B - disc
        if den == 0:
            # degenerate parabola: fall back to a secant step
            den = (f2 - f1) / (x2 - x1) if f2 != f1 else 1.0
            x3 = x2 - f2 / den
        else:
            x3 = x2 - (x2 - x1) * 2 * C / den
        step = abs(x3 - x2)
        xs = [x1, x2, x3]
        fs = [f1, f2, f(x3)]
        if step <= max(1e-3 * tol, 4 * np.finfo(float).eps * max(1.0, abs(x3))):
            break
    return xs[-1], bool(step < tol)


class _Search:
    def __init__(self, f, excluded, tol, max_depth, mu, kernel_dim, cluster_size):
        self.f = f
        self.excluded = list(excluded)
        self.tol = tol
        self.max_depth = max_depth
        self.mu = mu
        self.kernel_dim = kernel_dim
        self.cluster_size = cluster_size
        self.memo = {}
        self.lock = threading.Lock()

    def f1(self, z):
        return complex(self.f(np.array([z], dtype=complex))[0])

    def _values(self, zs):
        fs = np.asarray(self.f(zs), dtype=complex)
        if not np.all(np.isfinite(fs)) or np.any(fs == 0):
            raise ContourThroughZero("function vanishes or is undefined on a contour")
        return fs

    def segment(self, p: complex, q: complex) -> float:
        with self.lock:
            if (p, q) in self.memo:
                return self.memo[(p, q)]
            if (q, p) in self.memo:
                return -self.memo[(q, p)]
        t = np.linspace(0.0, 1.0, SIDE_SAMPLES + 1)
        fs = self._values(p + (q - p) * t)
        for _ in range(60):
            dphi = np.angle(fs[1:] / fs[:-1])
            bad = np.flatnonzero(np.abs(dphi) > MAX_PHASE_STEP)
            if bad.size == 0:
                break
            if np.min(t[bad + 1] - t[bad]) < 1e-13:
                raise ContourThroughZero(f"phase does not resolve on segment {p} -> {q}")
            tm = 0.5 * (t[bad] + t[bad + 1])
            fm = self._values(p + (q - p) * tm)
            t = np.insert(t, bad + 1, tm)
            fs = np.insert(fs, bad + 1, fm)
        else:
            raise ContourThroughZero(f"phase does not resolve on segment {p} -> {q}")
        total = float(np.sum(np.angle(fs[1:] / fs[:-1])))
        with self.lock:
            self.memo[(p, q)] = total
        return total

    def winding(self, cell: Rect) -> int:
        c = cell.corners()
        total = sum(self.segment(c[i], c[(i + 1) % 4]) for i in range(4))
        n = total / (2 * np.pi)
        if abs(n - round(n)) > 0.2:
            raise ContourThroughZero(f"non-integer winding {n:.3f} on {cell}")
        return int(round(n))

    def touching(self, cell: Rect):
        return [(p, r) for p, r in self.excluded if cell.distance(p) <= r]

    def run(self, cell: Rect, n: Optional[int], depth: int, out: RootSearch):
        near = self.touching(cell)
        if near:
            if cell.size < 4 * min(r for _, r in near):
                for p, _ in near:
                    if p not in out.dropped:
                        out.dropped.append(p)
                return
            self.subdivide(cell, depth, out)
            return
        if n is None:
            n = self.winding(cell)
        if n == 0:
            return
        if n < 0 or depth >= self.max_depth:
            out.unresolved.append((cell, n))
            return
        h = 0.25 * cell.size
        if n == 1:
            z, ok = muller(self.f1, cell.center, h, self.tol)
            if ok and cell.contains(z, 1e-9 * cell.size):
                out.roots.append(Root(z, 1, self._kernel_dim(z, 1)))
                return
        else:
            if self.mu is not None:
                z, ok = muller(self.mu, cell.center, h, self.tol)
                if ok and cell.contains(z, 1e-9 * cell.size) and self._kernel_dim(z, n) == n:
                    out.roots.append(Root(z, n, n))
                    return
            if cell.size < self.cluster_size:
                z, _ = muller(self.mu or self.f1, cell.center, h, self.tol)
                if not cell.contains(z, cell.size):
                    z = cell.center
                out.roots.append(Root(z, n, self._kernel_dim(z, n), cluster=True))
                return
        self.subdivide(cell, depth, out)

    def _kernel_dim(self, z, default):
        return self.kernel_dim(z) if self.kernel_dim is not None else default

    def subdivide(self, cell: Rect, depth: int, out: RootSearch):
        for frac in SPLITS:
            children = cell.split(frac)
            try:
                counts = [None if self.touching(c) else self.winding(c) for c in children]
            except ContourThroughZero:
                continue
            for c, k in zip(children, counts):
                self.run(c, k, depth + 1, out)
            return
        out.unresolved.append((cell, None))


def find_roots(
    f: Callable,
    regions: Sequence[Rect],
    *,
    excluded: Sequence = (),
    tol: float = 1e-10,
    max_depth: int = 40,
    mu: Optional[Callable] = None,
    kernel_dim: Optional[Callable] = None,
    cluster_size: Optional[float] = None,
    jobs: int = 1,
) -> RootSearch:
    """Locate zeros of the vectorised function ``f`` inside ``regions``.

    Parameters
    ----------
    f : callable
        Maps a complex ndarray to a complex ndarray; non-finite values mark
        points where it is undefined.
    regions : sequence of Rect
        Disjoint rectangles to search.
    excluded : sequence of (complex, float)
        Centres and radii of disks that are never enclosed by a counted contour.
    mu : callable, optional
        Scalar analytic function vanishing at the same points with order one,
        used to polish clusters.
    kernel_dim : callable, optional
        Geometric multiplicity at a polished zero.
    """
    if cluster_size is None:
        cluster_size = 1e-7 * max((r.size for r in regions), default=1.0)
    search = _Search(f, excluded, tol, max_depth, mu, kernel_dim, cluster_size)

    def top(region: Rect):
        out = RootSearch()
        cell = region
        n = None
        if not search.touching(cell):
            for attempt in range(6):
                try:
                    n = search.winding(cell)
                    break
                except ContourThroughZero:
                    # grow the outer contour slightly off the offending zero
                    e = (1e-7 * (attempt + 1) * 3.1) * max(cell.size, 1.0)
                    cell = Rect(cell.x0 - e, cell.x1 + 1.3 * e, cell.y0 - 0.7 * e, cell.y1 + e)
            else:
                out.unresolved.append((region, None))
                return out
            out.winding_total = n
        search.run(cell, n, 0, out)
        return out

    if jobs > 1 and len(regions) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            parts = list(ex.map(top, regions))
    else:
        parts = [top(r) for r in regions]
    res = RootSearch()
    for p in parts:
        res.roots.extend(p.roots)
        res.unresolved.extend(p.unresolved)
        res.dropped.extend(x for x in p.dropped if x not in res.dropped)
        res.winding_total += p.winding_total
    res.roots.sort(key=lambda r: (r.z.real, r.z.imag))
    return res
