"""Gray-level co-occurrence matrices and the homogeneity/contrast/energy statistics."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .imageio import QuantizedImage


@dataclass(frozen=True)
class Offset:
    """Displacement added to ``(x, y)``; ``dx`` moves along columns, ``dy`` along rows."""

    dx: int
    dy: int

    def __post_init__(self):
        if self.dx == 0 and self.dy == 0:
            raise ValueError("offset (0, 0) is not a displacement")

    def __neg__(self) -> "Offset":
        return Offset(-self.dx, -self.dy)

    def __iter__(self):
        yield self.dx
        yield self.dy


@dataclass(frozen=True)
class Region:
    """Half-open pixel box ``[x0, x1) x [y0, y1)``."""

    x0: int
    y0: int
    x1: int
    y1: int

    def __post_init__(self):
        if not (self.x0 < self.x1 and self.y0 < self.y1):
            raise ValueError(f"empty region {self}")

    @property
    def width(self) -> int:
        return self.x1 - self.x0

    @property
    def height(self) -> int:
        return self.y1 - self.y0

    @property
    def size(self) -> int:
        return self.width * self.height

    @classmethod
    def whole(cls, width: int, height: int) -> "Region":
        return cls(0, 0, width, height)

    def check_inside(self, width: int, height: int) -> None:
        if self.x0 < 0 or self.y0 < 0 or self.x1 > width or self.y1 > height:
            raise ValueError(f"region {self} out of bounds for {width}x{height} image")

    def slice(self, arr: np.ndarray) -> np.ndarray:
        return arr[self.y0:self.y1, self.x0:self.x1]


@dataclass(frozen=True)
class CooccurrenceMatrix:
    cells: np.ndarray
    normalized: bool = False
    degenerate: bool = field(default=False)

    @property
    def n_levels(self) -> int:
        return self.cells.shape[0]

    @property
    def total(self) -> float:
        return float(self.cells.sum())


def shifted_pairs(block: np.ndarray, d: Offset) -> tuple[np.ndarray, np.ndarray]:
    """Return aligned views ``(a, b)`` with ``b[y, x] = block[y + dy, x + dx]``.

    Only positions whose neighbour stays inside ``block`` are kept.
    """
    h, w = block.shape
    dx, dy = d.dx, d.dy
    if abs(dx) >= w or abs(dy) >= h:
        empty = block[0:0, 0:0]
        return empty, empty
    ys = slice(max(0, -dy), h - max(0, dy))
    xs = slice(max(0, -dx), w - max(0, dx))
    yn = slice(max(0, dy), h - max(0, -dy))
    xn = slice(max(0, dx), w - max(0, -dx))
    return block[ys, xs], block[yn, xn]


def glcm(q: QuantizedImage, region: Region, d: Offset) -> CooccurrenceMatrix:
    """Count ordered grade pairs ``(q[x, y], q[(x, y) + d])`` with both ends in ``region``."""
    region.check_inside(q.width, q.height)
    n = q.n_levels
    a, b = shifted_pairs(region.slice(q.grades), d)
    counts = np.bincount((a * n + b).ravel(), minlength=n * n)
    return CooccurrenceMatrix(counts.reshape(n, n).astype(np.int64))


def glcm_stack(q: QuantizedImage, labels: np.ndarray, n_blocks: int, d: Offset) -> np.ndarray:
    """Raw co-occurrence counts for every block of a labelled tiling at once.

    ``labels[y, x]`` is the block index of each pixel.  A pair is counted for
    block ``b`` only when both of its pixels carry label ``b``, so the result
    ``out[b]`` equals :func:`glcm` over that block's region.
    """
    n = q.n_levels
    a, b = shifted_pairs(q.grades, d)
    la, lb = shifted_pairs(labels, d)
    same = la == lb
    codes = (la[same] * n + a[same]) * n + b[same]
    counts = np.bincount(codes, minlength=n_blocks * n * n)
    return counts.reshape(n_blocks, n, n)


def stack_statistics(counts: np.ndarray, names) -> tuple[np.ndarray, np.ndarray]:
    """Normalize a ``(B, n, n)`` count stack and evaluate ``names`` per block.

    Returns ``(values, degenerate)`` with ``values`` shaped ``(B, len(names))``;
    blocks without pairs get zeros and ``degenerate = True``.  Only nonzero
    cells are visited, which matters for 256-level matrices.
    """
    n_blocks, n, _ = counts.shape
    flat = counts.reshape(-1)
    idx = np.flatnonzero(flat)
    block, cell = np.divmod(idx, n * n)
    i, j = np.divmod(cell, n)
    totals = counts.sum(axis=(1, 2))
    degenerate = totals == 0
    p = flat[idx] / np.where(degenerate, 1, totals)[block]
    dist = np.abs(i - j)
    cols = []
    for name in names:
        if name == "homogeneity":
            w = p / (1.0 + dist)
        elif name == "contrast":
            w = p * (dist * dist)
        elif name == "energy":
            w = p * p
        else:
            raise ValueError(f"unknown statistic {name!r}")
        cols.append(np.bincount(block, weights=w, minlength=n_blocks))
    return np.stack(cols, axis=1), degenerate


def normalize(m: CooccurrenceMatrix) -> CooccurrenceMatrix:
    """Scale cells to sum to one.

    A matrix with no pairs stays zero and is flagged ``degenerate``.
    """
    if m.normalized:
        return m
    total = m.cells.sum()
    if total == 0:
        return CooccurrenceMatrix(np.zeros(m.cells.shape), normalized=True, degenerate=True)
    return CooccurrenceMatrix(m.cells / float(total), normalized=True)


def _require_normalized(m: CooccurrenceMatrix) -> np.ndarray:
    if not m.normalized:
        raise ValueError("statistic requires a normalized co-occurrence matrix")
    return m.cells


def _grade_distance(n: int) -> np.ndarray:
    r = np.arange(n)
    return np.abs(r[:, None] - r[None, :])


def homogeneity(m: CooccurrenceMatrix) -> float:
    p = _require_normalized(m)
    return float(np.sum(p / (1.0 + _grade_distance(p.shape[0]))))


def contrast(m: CooccurrenceMatrix) -> float:
    p = _require_normalized(m)
    return float(np.sum(_grade_distance(p.shape[0]) ** 2 * p))


def energy(m: CooccurrenceMatrix) -> float:
    p = _require_normalized(m)
    return float(np.sum(p * p))


STATISTICS = {
    "homogeneity": homogeneity,
    "contrast": contrast,
    "energy": energy,
}
