"""Meta-measures: tests that evaluate a similarity measure itself.

* mm1 - ranking stability when the GT is shrunk by a few pixels
* mm2 - ranking stability when the GT is slightly rotated
* mm3 - whether real syntheses beat a GT reduced to its light strokes
* mm4 - agreement with human better/worse judgements

Ranking drift is reported as ``theta = 1 - rho`` with ``rho`` the Spearman
correlation between the algorithms' scores before and after perturbation.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.stats import rankdata

from .errors import DegenerateRankingError, ManifestError
from .imageio import GrayImage, load_gray, resize_nn, rotate_nn, shrink, split_strokes

SHRINK_PIXELS = 5
ROTATION_DEGREES = 5.0
LIGHT_THRESHOLD = 170


@dataclass(frozen=True)
class Measure:
    """A similarity measure with known polarity.

    ``pixel_aligned`` measures need equally sized inputs; the harness resizes
    the synthesis to the GT's current size before scoring them.
    """

    id: str
    fn: Callable[[GrayImage, GrayImage], float]
    higher_is_better: bool = True
    pixel_aligned: bool = False
    params: dict = field(default_factory=dict, compare=False)
    detail: Callable | None = field(default=None, compare=False)

    def score(self, gt: GrayImage, syn: GrayImage) -> float:
        return self.evaluate(gt, syn)[0]

    def evaluate(self, gt: GrayImage, syn: GrayImage) -> tuple[float, tuple[str, ...]]:
        """Score a pair, returning ``(score, warnings)``."""
        warnings: tuple[str, ...] = ()
        if self.pixel_aligned and syn.shape != gt.shape:
            syn = resize_nn(syn, gt.width, gt.height)
        if self.detail is not None:
            value, warnings = self.detail(gt, syn)
        else:
            value = self.fn(gt, syn)
        return float(value), tuple(warnings)

    def beats(self, a: float, b: float) -> bool:
        """True when score ``a`` is strictly better than ``b``."""
        return a > b if self.higher_is_better else a < b


def negated(m: Measure) -> Measure:
    """The same measure with negated scores and flipped polarity."""
    detail = None
    if m.detail is not None:
        def detail(gt, syn, _d=m.detail):
            v, w = _d(gt, syn)
            return -v, w
    return Measure(
        id=f"neg-{m.id}",
        fn=lambda gt, syn, _f=m.fn: -_f(gt, syn),
        higher_is_better=not m.higher_is_better,
        pixel_aligned=m.pixel_aligned,
        params=m.params,
        detail=detail,
    )


# ---------------------------------------------------------------------------
# Rank correlation
# ---------------------------------------------------------------------------

def spearman_rho(a: Sequence[float], b: Sequence[float]) -> float:
    """Spearman correlation using average ranks for ties."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError(f"score lists differ in length: {a.shape} vs {b.shape}")
    if len(a) < 2:
        raise ValueError("need at least two scores to rank")
    ra = rankdata(a) - (len(a) + 1) / 2.0
    rb = rankdata(b) - (len(b) + 1) / 2.0
    saa = float(np.dot(ra, ra))
    sbb = float(np.dot(rb, rb))
    if saa == 0 or sbb == 0:
        raise DegenerateRankingError("constant score list has no ranking")
    rho = float(np.dot(ra, rb)) / math.sqrt(saa * sbb)
    return min(1.0, max(-1.0, rho))


def theta(a: Sequence[float], b: Sequence[float]) -> float:
    return 1.0 - spearman_rho(a, b)


# ---------------------------------------------------------------------------
# Datasets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BenchmarkDataset:
    """GT sketches and per-algorithm syntheses, keyed by photo id.

    Paths are absolute.  Iteration order is always sorted by id so results do
    not depend on manifest ordering.
    """

    gt: dict[str, str]
    algorithms: dict[str, dict[str, str]]

    def __post_init__(self):
        if not self.gt:
            raise ManifestError("gt", "no photos listed")
        if len(self.algorithms) < 2:
            raise ManifestError("algorithms", "at least two algorithms are required")
        for algo, cells in self.algorithms.items():
            missing = sorted(set(self.gt) - set(cells))
            if missing:
                raise ManifestError(f"algorithms.{algo}", f"missing photo {missing[0]!r}")
            extra = sorted(set(cells) - set(self.gt))
            if extra:
                raise ManifestError(f"algorithms.{algo}.{extra[0]}", "photo has no GT entry")

    @property
    def photo_ids(self) -> list[str]:
        return sorted(self.gt)

    @property
    def algorithm_ids(self) -> list[str]:
        return sorted(self.algorithms)

    def synthesis(self, algo: str, photo: str) -> str:
        return self.algorithms[algo][photo]


def _read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ManifestError("<file>", f"cannot read {path}: {exc.strerror or exc}") from None
    except json.JSONDecodeError as exc:
        raise ManifestError("<file>", f"invalid JSON in {path}: {exc}") from None


def _path_value(value, key, base):
    if not isinstance(value, str) or not value:
        raise ManifestError(key, "expected a non-empty path string")
    return os.path.normpath(os.path.join(base, value))


def load_manifest(path) -> BenchmarkDataset:
    """Parse ``{"gt": {photo: path}, "algorithms": {algo: {photo: path}}}``."""
    doc = _read_json(path)
    base = os.path.dirname(os.path.abspath(path))
    if not isinstance(doc, dict):
        raise ManifestError("<root>", "expected a JSON object")
    for key in ("gt", "algorithms"):
        if key not in doc:
            raise ManifestError(key, "required key is missing")
        if not isinstance(doc[key], dict):
            raise ManifestError(key, "expected an object")
    extra = sorted(set(doc) - {"gt", "algorithms"})
    if extra:
        raise ManifestError(extra[0], "unknown key")
    gt = {str(p): _path_value(v, f"gt.{p}", base) for p, v in doc["gt"].items()}
    algorithms = {}
    for algo, cells in doc["algorithms"].items():
        if not isinstance(cells, dict):
            raise ManifestError(f"algorithms.{algo}", "expected an object")
        algorithms[str(algo)] = {
            str(p): _path_value(v, f"algorithms.{algo}.{p}", base) for p, v in cells.items()
        }
    return BenchmarkDataset(gt, algorithms)


@dataclass(frozen=True)
class RankedPair:
    gt: str
    better: str
    worse: str

    def __post_init__(self):
        if len({self.gt, self.better, self.worse}) != 3:
            raise ValueError(f"ranked pair paths must be distinct: {self}")


def load_pairs(path) -> list[RankedPair]:
    """Parse a JSON list of ``{"gt", "better", "worse"}`` path triples."""
    doc = _read_json(path)
    base = os.path.dirname(os.path.abspath(path))
    if not isinstance(doc, list):
        raise ManifestError("<root>", "expected a JSON list")
    pairs = []
    for i, entry in enumerate(doc):
        if not isinstance(entry, dict):
            raise ManifestError(f"[{i}]", "expected an object")
        for key in ("gt", "better", "worse"):
            if key not in entry:
                raise ManifestError(f"[{i}].{key}", "required key is missing")
        extra = sorted(set(entry) - {"gt", "better", "worse"})
        if extra:
            raise ManifestError(f"[{i}].{extra[0]}", "unknown key")
        try:
            pairs.append(RankedPair(*(_path_value(entry[k], f"[{i}].{k}", base)
                                      for k in ("gt", "better", "worse"))))
        except ValueError as exc:
            if isinstance(exc, ManifestError):
                raise
            raise ManifestError(f"[{i}]", str(exc)) from None
    return pairs


# ---------------------------------------------------------------------------
# Results
# ---------------------------------------------------------------------------

@dataclass
class MetaResult:
    meta_id: str
    measure_id: str
    aggregate: float
    items: list[dict]
    warnings: list[str] = field(default_factory=list)

    @property
    def unit(self) -> str:
        return "theta" if self.meta_id in ("mm1", "mm2") else "percent"

    def to_dict(self) -> dict:
        return {
            "meta": self.meta_id,
            "measure": self.measure_id,
            "unit": self.unit,
            "aggregate": self.aggregate,
            "items": self.items,
            "warnings": self.warnings,
        }


class _Loader:
    """Loads each image once per run; safe to share across worker threads."""

    def __init__(self):
        self._cache: dict[str, GrayImage] = {}

    def __call__(self, path: str) -> GrayImage:
        img = self._cache.get(path)
        if img is None:
            img = load_gray(path)
            self._cache[path] = img
        return img


def _map(fn, items: Iterable, jobs: int) -> list:
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _mean(values) -> float:
    values = list(values)
    return math.fsum(values) / len(values)


def _stability(meta_id, ds, m, perturb, jobs) -> MetaResult:
    load = _Loader()
    algos = ds.algorithm_ids

    def one(photo):
        gt = load(ds.gt[photo])
        moved = perturb(gt)
        before, after, warns = [], [], []
        for algo in algos:
            syn = load(ds.synthesis(algo, photo))
            s0, w0 = m.evaluate(gt, syn)
            s1, w1 = m.evaluate(moved, syn)
            before.append(s0)
            after.append(s1)
            warns.extend(f"{photo}/{algo}: {w}" for w in w0 + w1)
        item = {"id": photo, "value": None, "degenerate": False,
                "scores": before, "perturbed_scores": after}
        try:
            item["value"] = theta(before, after)
        except DegenerateRankingError:
            item["value"] = 1.0
            item["degenerate"] = True
            warns.append(f"{photo}: constant score list, theta recorded as 1")
        return item, warns

    results = _map(one, ds.photo_ids, jobs)
    items = [r[0] for r in results]
    warnings = [w for r in results for w in r[1]]
    return MetaResult(meta_id, m.id, _mean(i["value"] for i in items), items, warnings)


def mm1_resize_stability(ds: BenchmarkDataset, m: Measure, shrink_px: int = SHRINK_PIXELS,
                         jobs: int = 1) -> MetaResult:
    return _stability("mm1", ds, m, lambda gt: shrink(gt, shrink_px) if shrink_px else gt, jobs)


def mm2_rotation_stability(ds: BenchmarkDataset, m: Measure, degrees: float = ROTATION_DEGREES,
                           jobs: int = 1) -> MetaResult:
    return _stability("mm2", ds, m, lambda gt: rotate_nn(gt, degrees) if degrees else gt, jobs)


def mm3_content_capture(ds: BenchmarkDataset, m: Measure, threshold: int = LIGHT_THRESHOLD,
                        jobs: int = 1) -> MetaResult:
    load = _Loader()
    algos = ds.algorithm_ids

    def one(photo):
        gt = load(ds.gt[photo])
        _, light = split_strokes(gt, threshold)
        light_score, warns = m.evaluate(gt, light)
        scores = []
        warns = [f"{photo}/light: {w}" for w in warns]
        for algo in algos:
            s, w = m.evaluate(gt, load(ds.synthesis(algo, photo)))
            scores.append(s)
            warns.extend(f"{photo}/{algo}: {x}" for x in w)
        mean = _mean(scores)
        item = {"id": photo, "value": m.beats(mean, light_score),
                "mean_score": mean, "light_score": light_score}
        return item, warns

    results = _map(one, ds.photo_ids, jobs)
    items = [r[0] for r in results]
    wins = sum(1 for i in items if i["value"])
    return MetaResult("mm3", m.id, 100.0 * wins / len(items), items,
                      [w for r in results for w in r[1]])


def mm4_human_agreement(pairs: Sequence[RankedPair], m: Measure, jobs: int = 1) -> MetaResult:
    """Percentage of pairs where the measure strictly prefers the human-preferred sketch."""
    if not pairs:
        raise ValueError("ranked pair set is empty")
    load = _Loader()

    def one(indexed):
        idx, p = indexed
        gt = load(p.gt)
        sb, wb = m.evaluate(gt, load(p.better))
        sw, ww = m.evaluate(gt, load(p.worse))
        item = {"id": idx, "value": m.beats(sb, sw), "better_score": sb, "worse_score": sw}
        return item, [f"[{idx}]: {w}" for w in wb + ww]

    results = _map(one, enumerate(pairs), jobs)
    items = [r[0] for r in results]
    agree = sum(1 for i in items if i["value"])
    return MetaResult("mm4", m.id, 100.0 * agree / len(items), items,
                      [w for r in results for w in r[1]])


META_MEASURES = {
    "mm1": mm1_resize_stability,
    "mm2": mm2_rotation_stability,
    "mm3": mm3_content_capture,
    "mm4": mm4_human_agreement,
}
