"""Block-level style features and the Scoot score.

An image is split into a ``k x k`` grid; each block contributes a short feature
vector (by default contrast and energy of its normalized co-occurrence matrix).
Block vectors are concatenated, averaged over the configured offsets, and two
images are compared by ``1 / (1 + euclidean distance)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .cooccur import (
    STATISTICS,
    Offset,
    Region,
    glcm,
    glcm_stack,
    normalize,
    shifted_pairs,
    stack_statistics,
)
from .errors import LayoutMismatchError
from .imageio import GrayImage, QuantizedImage, as_levels, quantize

DEFAULT_DIRECTIONS = (Offset(0, 1), Offset(-1, 1), Offset(-1, 0), Offset(-1, -1))
STAT_ORDER = ("homogeneity", "contrast", "energy")
_STAT_ALIASES = {"h": "homogeneity", "c": "contrast", "e": "energy"}


def parse_statistics(spec: str | Sequence[str]) -> tuple[str, ...]:
    """Accept ``"ce"``, ``"c,e"`` or full names; return them in canonical order."""
    if isinstance(spec, str):
        parts = [p for p in spec.replace(",", " ").split() if p]
        if len(parts) == 1 and parts[0] not in STATISTICS and set(parts[0]) <= set(_STAT_ALIASES):
            parts = list(parts[0])
    else:
        parts = list(spec)
    names = set()
    for p in parts:
        name = _STAT_ALIASES.get(p, p)
        if name not in STATISTICS:
            raise ValueError(f"unknown statistic {p!r}; choose from {', '.join(STAT_ORDER)}")
        names.add(name)
    if not names:
        raise ValueError("at least one statistic is required")
    return tuple(s for s in STAT_ORDER if s in names)


@dataclass(frozen=True)
class ScootConfig:
    n_levels: int = 6
    grid_k: int = 4
    directions: tuple[Offset, ...] = DEFAULT_DIRECTIONS
    statistics: tuple[str, ...] = ("contrast", "energy")
    quantize_enabled: bool = True

    def __post_init__(self):
        if self.grid_k < 1:
            raise ValueError("grid_k must be >= 1")
        if not 2 <= self.n_levels <= 256:
            raise ValueError("n_levels must be in [2, 256]")
        dirs = tuple(d if isinstance(d, Offset) else Offset(*d) for d in self.directions)
        if not dirs:
            raise ValueError("at least one direction is required")
        object.__setattr__(self, "directions", dirs)
        object.__setattr__(self, "statistics", parse_statistics(self.statistics))

    @property
    def effective_levels(self) -> int:
        return self.n_levels if self.quantize_enabled else 256

    def as_dict(self) -> dict:
        return {
            "n_levels": self.n_levels,
            "grid_k": self.grid_k,
            "directions": [[d.dx, d.dy] for d in self.directions],
            "statistics": list(self.statistics),
            "quantize_enabled": self.quantize_enabled,
        }


@dataclass(frozen=True)
class FeatureLayout:
    extractor: str
    block_dim: int
    grid_k: int
    levels: int
    directions: tuple[Offset, ...]
    statistics: tuple[str, ...] = ()

    @property
    def length(self) -> int:
        return self.block_dim * self.grid_k ** 2


@dataclass(frozen=True)
class StyleFeatureVector:
    values: np.ndarray
    layout: FeatureLayout
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.shape != (self.layout.length,):
            raise ValueError(f"expected {self.layout.length} values, got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("feature values must be finite")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __len__(self):
        return len(self.values)

    def distance(self, other: "StyleFeatureVector") -> float:
        if self.layout != other.layout:
            raise LayoutMismatchError(
                f"cannot compare feature layouts {self.layout} and {other.layout}"
            )
        diff = self.values - other.values
        return math.sqrt(float(np.dot(diff, diff)))


# ---------------------------------------------------------------------------
# Feature extractors
# ---------------------------------------------------------------------------

class FeatureExtractor:
    """Per-block feature plug-in.

    Subclasses set ``id``, ``uses_quantized`` and ``uses_direction`` and
    implement :meth:`per_block`.
    """

    id: str = ""
    uses_quantized: bool = True
    uses_direction: bool = True

    def block_dim(self, config: ScootConfig) -> int:
        raise NotImplementedError

    def per_block(self, img, region: Region, d: Offset | None, config: ScootConfig) -> np.ndarray:
        raise NotImplementedError

    def is_degenerate(self, region: Region, d: Offset | None) -> bool:
        return False

    def grid_features(self, img, grid: "BlockGrid", d: Offset | None, config: ScootConfig) -> np.ndarray:
        """``(k*k, block_dim)`` features for every block; subclasses may batch this."""
        return np.stack([self.per_block(img, r, d, config) for r in grid.regions])

    def layout(self, config: ScootConfig) -> FeatureLayout:
        return FeatureLayout(
            extractor=self.id,
            block_dim=self.block_dim(config),
            grid_k=config.grid_k,
            levels=config.effective_levels if self.uses_quantized else 256,
            directions=config.directions if self.uses_direction else (),
            statistics=config.statistics if self.id == "glcm" else (),
        )

    def __repr__(self):
        return f"<{type(self).__name__} {self.id}>"


class GLCMExtractor(FeatureExtractor):
    """Selected Haralick statistics of each block's normalized co-occurrence matrix."""

    id = "glcm"

    def block_dim(self, config):
        return len(config.statistics)

    def per_block(self, img, region, d, config):
        m = normalize(glcm(img, region, d))
        return np.array([STATISTICS[s](m) for s in config.statistics])

    def is_degenerate(self, region, d):
        return abs(d.dx) >= region.width or abs(d.dy) >= region.height

    def grid_features(self, img, grid, d, config):
        counts = glcm_stack(img, grid.labels, len(grid.regions), d)
        values, _ = stack_statistics(counts, config.statistics)
        return values


class GLRLMExtractor(FeatureExtractor):
    id = "glrlm"

    def block_dim(self, config):
        return 5

    def per_block(self, img, region, d, config):
        return glrlm_features(img, region, d)

    def grid_features(self, img, grid, d, config):
        return glrlm_grid_features(img, grid, d)


class SobelExtractor(FeatureExtractor):
    id = "sobel"
    uses_quantized = False
    uses_direction = False

    def block_dim(self, config):
        return 2

    def per_block(self, img, region, d, config):
        return sobel_features(img, region)


CE = GLCMExtractor()
GLRLM = GLRLMExtractor()
SOBEL = SobelExtractor()
EXTRACTORS = {e.id: e for e in (CE, GLRLM, SOBEL)}


# ---------------------------------------------------------------------------
# GLRLM
# ---------------------------------------------------------------------------

def run_length_matrix(q: QuantizedImage, region: Region, d: Offset) -> np.ndarray:
    """``R[i, l - 1]`` = number of maximal runs of grade ``i`` with length ``l`` along ``d``."""
    region.check_inside(q.width, q.height)
    block = region.slice(q.grades)
    _, grade, length = _run_lengths(block, np.zeros(block.shape, dtype=np.intp), d)
    r = np.zeros((q.n_levels, max(block.shape)), dtype=np.int64)
    np.add.at(r, (grade, length - 1), 1)
    return r


def glrlm_features(q: QuantizedImage, region: Region, d: Offset) -> np.ndarray:
    """Short/long run emphasis, gray-level and run-length non-uniformity, run percentage.

    Both non-uniformities are divided by the squared run count so every
    statistic except LRE lies in ``(0, 1]``.
    """
    r = run_length_matrix(q, region, d).astype(np.float64)
    return _glrlm_stats(r[None], np.array([float(region.size)]))[0]


def _run_lengths(grades: np.ndarray, labels: np.ndarray, d: Offset):
    """Start positions, grades and lengths of maximal runs along ``d``.

    A run never crosses a label boundary, so each block of a labelled tiling
    is treated as its own region.
    """
    h, w = grades.shape
    dx, dy = d.dx, d.dy
    # a pixel starts a run unless its predecessor (p - d) shares its label and grade
    has_prev = np.zeros((h, w), dtype=bool)
    cur, prev = shifted_pairs(grades, -d)
    lcur, lprev = shifted_pairs(labels, -d)
    if cur.size:
        ys = slice(max(0, dy), h - max(0, -dy))
        xs = slice(max(0, dx), w - max(0, -dx))
        has_prev[ys, xs] = (cur == prev) & (lcur == lprev)

    sy, sx = np.nonzero(~has_prev)
    grade = grades[sy, sx]
    label = labels[sy, sx]
    length = np.ones(len(sy), dtype=np.intp)
    py, px = sy, sx
    active = np.arange(len(sy))
    while active.size:
        ny, nx = py + dy, px + dx
        ok = (ny >= 0) & (ny < h) & (nx >= 0) & (nx < w)
        idx = np.nonzero(ok)[0]
        ok[idx] = (grades[ny[idx], nx[idx]] == grade[active[idx]]) & (
            labels[ny[idx], nx[idx]] == label[active[idx]]
        )
        active = active[ok]
        py, px = ny[ok], nx[ok]
        length[active] += 1
    return label, grade, length


def _glrlm_stats(r: np.ndarray, pixels: np.ndarray) -> np.ndarray:
    """Five run-length statistics from a ``(B, levels, max_len)`` stack."""
    lengths = np.arange(1, r.shape[2] + 1, dtype=np.float64)
    n_runs = r.sum(axis=(1, 2))
    sre = np.sum(r / lengths ** 2, axis=(1, 2)) / n_runs
    lre = np.sum(r * lengths ** 2, axis=(1, 2)) / n_runs
    gln = np.sum(r.sum(axis=2) ** 2, axis=1) / n_runs / n_runs
    rln = np.sum(r.sum(axis=1) ** 2, axis=1) / n_runs / n_runs
    rp = n_runs / pixels
    return np.stack([sre, lre, gln, rln, rp], axis=1)


def glrlm_grid_features(q: QuantizedImage, grid: "BlockGrid", d: Offset) -> np.ndarray:
    n_blocks = len(grid.regions)
    label, grade, length = _run_lengths(q.grades, grid.labels, d)
    max_len = max(q.width, q.height)
    codes = (label * q.n_levels + grade) * max_len + (length - 1)
    r = np.bincount(codes, minlength=n_blocks * q.n_levels * max_len)
    r = r.reshape(n_blocks, q.n_levels, max_len).astype(np.float64)
    pixels = np.array([reg.size for reg in grid.regions], dtype=np.float64)
    return _glrlm_stats(r, pixels)


# ---------------------------------------------------------------------------
# Sobel
# ---------------------------------------------------------------------------

# largest gradient magnitude an 8-bit 3x3 neighbourhood can produce
SOBEL_MAX = 255.0 * math.sqrt(20.0)


def sobel_magnitude(block: np.ndarray) -> np.ndarray:
    """Sobel gradient magnitude at the interior pixels of ``block``."""
    b = block.astype(np.float64)
    tl, tc, tr = b[:-2, :-2], b[:-2, 1:-1], b[:-2, 2:]
    ml, mr = b[1:-1, :-2], b[1:-1, 2:]
    bl, bc, br = b[2:, :-2], b[2:, 1:-1], b[2:, 2:]
    gx = (tr + 2 * mr + br) - (tl + 2 * ml + bl)
    gy = (bl + 2 * bc + br) - (tl + 2 * tc + tr)
    return np.hypot(gx, gy)


def sobel_features(img: GrayImage, region: Region) -> np.ndarray:
    """Mean and standard deviation of the scaled Sobel magnitude inside ``region``."""
    region.check_inside(img.width, img.height)
    if region.width < 3 or region.height < 3:
        raise ValueError(f"Sobel features need a region of at least 3x3, got {region}")
    mag = sobel_magnitude(region.slice(img.pixels)) / SOBEL_MAX
    return np.array([mag.mean(), mag.std()])


# ---------------------------------------------------------------------------
# Grid, Phi, Psi, score
# ---------------------------------------------------------------------------

def block_grid(width: int, height: int, k: int) -> list[Region]:
    """Tile a ``width x height`` image into ``k * k`` blocks in row-major order."""
    if k < 1:
        raise ValueError("grid size must be >= 1")
    if width < k or height < k:
        raise ValueError(f"image {width}x{height} is smaller than a {k}x{k} grid")
    xb = [c * width // k for c in range(k + 1)]
    yb = [r * height // k for r in range(k + 1)]
    return [Region(xb[c], yb[r], xb[c + 1], yb[r + 1]) for r in range(k) for c in range(k)]


@dataclass(frozen=True)
class BlockGrid:
    """Block regions plus a per-pixel map of block indices."""

    regions: tuple[Region, ...]
    labels: np.ndarray

    @classmethod
    def build(cls, width: int, height: int, k: int) -> "BlockGrid":
        regions = block_grid(width, height, k)
        xb = np.array([c * width // k for c in range(k + 1)])
        yb = np.array([r * height // k for r in range(k + 1)])
        col = np.searchsorted(xb, np.arange(width), side="right") - 1
        row = np.searchsorted(yb, np.arange(height), side="right") - 1
        labels = row[:, None] * k + col[None, :]
        return cls(tuple(regions), labels)


def prepare(img: GrayImage, config: ScootConfig, extractor: FeatureExtractor):
    """Return the raster the extractor consumes: grades, raw levels, or the gray image."""
    if not extractor.uses_quantized:
        return img
    if config.quantize_enabled:
        return quantize(img, config.n_levels)
    return as_levels(img)


def _phi(prepared, grid, config, d, extractor) -> tuple[np.ndarray, list[str]]:
    warnings = []
    for idx, region in enumerate(grid.regions):
        if d is not None and extractor.is_degenerate(region, d):
            warnings.append(
                f"block {idx} ({region.width}x{region.height}) has no pixel pairs "
                f"at offset ({d.dx}, {d.dy})"
            )
    values = extractor.grid_features(prepared, grid, d, config)
    return values.reshape(-1), warnings


def phi(
    img: GrayImage,
    config: ScootConfig,
    d: Offset | None,
    extractor: FeatureExtractor = CE,
) -> StyleFeatureVector:
    """Concatenate per-block features at a single offset, blocks in row-major order."""
    grid = BlockGrid.build(img.width, img.height, config.grid_k)
    prepared = prepare(img, config, extractor)
    if extractor.uses_direction and d is None:
        raise ValueError(f"extractor {extractor.id} needs an offset")
    values, warnings = _phi(prepared, grid, config, d if extractor.uses_direction else None, extractor)
    return StyleFeatureVector(values, extractor.layout(config), tuple(warnings))


def psi(img: GrayImage, config: ScootConfig = ScootConfig(), extractor: FeatureExtractor = CE) -> StyleFeatureVector:
    """Average of :func:`phi` over the configured directions."""
    grid = BlockGrid.build(img.width, img.height, config.grid_k)
    prepared = prepare(img, config, extractor)
    if not extractor.uses_direction:
        values, warnings = _phi(prepared, grid, config, None, extractor)
    else:
        total = None
        warnings = []
        for d in config.directions:
            v, w = _phi(prepared, grid, config, d, extractor)
            total = v if total is None else total + v
            warnings.extend(w)
        values = total / len(config.directions)
    return StyleFeatureVector(values, extractor.layout(config), tuple(warnings))


def score_from_features(x: StyleFeatureVector, y: StyleFeatureVector) -> float:
    return 1.0 / (1.0 + x.distance(y))


@dataclass(frozen=True)
class ScootResult:
    score: float
    warnings: tuple[str, ...] = ()


def scoot_detail(
    gt: GrayImage,
    syn: GrayImage,
    config: ScootConfig = ScootConfig(),
    extractor: FeatureExtractor = CE,
) -> ScootResult:
    fx = psi(gt, config, extractor)
    fy = psi(syn, config, extractor)
    warnings = tuple(f"gt: {w}" for w in fx.warnings) + tuple(f"syn: {w}" for w in fy.warnings)
    return ScootResult(score_from_features(fx, fy), warnings)


def scoot(
    gt: GrayImage,
    syn: GrayImage,
    config: ScootConfig = ScootConfig(),
    extractor: FeatureExtractor = CE,
) -> float:
    """Style similarity in ``(0, 1]``; 1 means identical block features."""
    return scoot_detail(gt, syn, config, extractor).score


def with_statistics(config: ScootConfig, stats) -> ScootConfig:
    return replace(config, statistics=parse_statistics(stats))
