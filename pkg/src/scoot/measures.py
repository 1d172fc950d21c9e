"""Registry of named measures usable from the harness and the CLI."""

from __future__ import annotations

from dataclasses import replace

from . import baselines, style
from .meta import Measure
from .style import CE, GLRLM, SOBEL, ScootConfig

# statistic subsets of the CE ablation, keyed by registry suffix
_GLCM_VARIANTS = {
    "scoot-ce": "ce",
    "scoot-h": "h",
    "scoot-e": "e",
    "scoot-c": "c",
    "scoot-ch": "ch",
    "scoot-he": "he",
    "scoot-hec": "hec",
}

MEASURE_IDS = (
    *_GLCM_VARIANTS,
    "scoot-ce-nq",
    "scoot-glrlm",
    "scoot-sobel",
    "ssim",
    "gmsd",
)


def _scoot_measure(mid: str, config: ScootConfig, extractor) -> Measure:
    def detail(gt, syn):
        r = style.scoot_detail(gt, syn, config, extractor)
        return r.score, r.warnings

    return Measure(
        id=mid,
        fn=lambda gt, syn: style.scoot(gt, syn, config, extractor),
        higher_is_better=True,
        pixel_aligned=False,
        params={"extractor": extractor.id, **config.as_dict()},
        detail=detail,
    )


def build_config(mid: str, base: ScootConfig | None = None, statistics=None) -> ScootConfig:
    """Config for a scoot-* id; ``statistics`` overrides the id's default subset."""
    config = base or ScootConfig()
    if mid in _GLCM_VARIANTS:
        config = replace(config, statistics=statistics or _GLCM_VARIANTS[mid])
    elif mid == "scoot-ce-nq":
        config = replace(config, statistics=statistics or "ce", quantize_enabled=False)
    elif statistics:
        config = replace(config, statistics=statistics)
    return config


def get_measure(
    mid: str,
    config: ScootConfig | None = None,
    statistics=None,
    params: baselines.BaselineParams = baselines.DEFAULT_PARAMS,
) -> Measure:
    """Build the measure registered under ``mid``.

    ``config`` supplies grid, levels, directions and the quantization flag for
    scoot variants; it is ignored by the pixel baselines.
    """
    if mid not in MEASURE_IDS:
        raise KeyError(f"unknown measure {mid!r}; valid ids: {', '.join(MEASURE_IDS)}")
    if mid == "ssim":
        return Measure("ssim", lambda x, y: baselines.ssim(x, y, params), True, True,
                       {"window_size": params.window_size, "window_sigma": params.window_sigma,
                        "k1": params.k1, "k2": params.k2, "dynamic_range": params.dynamic_range})
    if mid == "gmsd":
        return Measure("gmsd", lambda x, y: baselines.gmsd(x, y, params), False, True,
                       {"downsample": params.gmsd_downsample, "c": params.gmsd_c})
    extractor = {"scoot-glrlm": GLRLM, "scoot-sobel": SOBEL}.get(mid, CE)
    return _scoot_measure(mid, build_config(mid, config, statistics), extractor)
