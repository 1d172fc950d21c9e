"""Procedural face-sketch fixtures for exercising the benchmark harness.

Real evaluation needs artist-drawn sketches and the outputs of synthesis
algorithms.  These generators produce small stand-ins with the same gross
structure: dark outlines, mid-tone hatched hair, light shading strokes on a
white background, plus "synthesized" variants that keep or lose that style.
"""

from __future__ import annotations

import json
import os

import numpy as np
from scipy import ndimage

from .imageio import GrayImage, save_pgm


def _stroke(canvas, x0, y0, x1, y1, tone, width=1):
    n = int(max(abs(x1 - x0), abs(y1 - y0)) * 2) + 2
    xs = np.linspace(x0, x1, n)
    ys = np.linspace(y0, y1, n)
    h, w = canvas.shape
    for off in range(width):
        xi = np.clip(np.round(xs + off).astype(int), 0, w - 1)
        yi = np.clip(np.round(ys).astype(int), 0, h - 1)
        canvas[yi, xi] = np.minimum(canvas[yi, xi], tone)


def _ellipse(canvas, cx, cy, rx, ry, tone, width=2, start=0.0, stop=2 * np.pi):
    t = np.linspace(start, stop, int(8 * (rx + ry)) + 8)
    h, w = canvas.shape
    for k in range(width):
        xi = np.clip(np.round(cx + (rx + k * 0.5) * np.cos(t)).astype(int), 0, w - 1)
        yi = np.clip(np.round(cy + (ry + k * 0.5) * np.sin(t)).astype(int), 0, h - 1)
        canvas[yi, xi] = np.minimum(canvas[yi, xi], tone)


def face_sketch(rng: np.random.Generator, width: int = 80, height: int = 100,
                hatch_angle: float | None = None, hatch_tone: int | None = None,
                hatch_spacing: int | None = None) -> np.ndarray:
    """A face-like sketch as a ``uint8`` array."""
    canvas = np.full((height, width), 255, dtype=np.uint8)
    cx, cy = width / 2 + rng.uniform(-3, 3), height * 0.55 + rng.uniform(-3, 3)
    rx, ry = width * rng.uniform(0.30, 0.36), height * rng.uniform(0.33, 0.38)

    # hair: hatched strokes over the top of the head
    angle = rng.uniform(-0.9, 0.9) if hatch_angle is None else hatch_angle
    tone = int(rng.integers(60, 140)) if hatch_tone is None else hatch_tone
    spacing = int(rng.integers(2, 5)) if hatch_spacing is None else hatch_spacing
    top = int(cy - ry - height * 0.12)
    hair_bottom = int(cy - ry * 0.45)
    for x in range(-height, width + height, spacing):
        x0, y0 = x, max(top, 0)
        x1 = x0 + np.tan(angle) * (hair_bottom - y0)
        _stroke(canvas, x0, y0, x1, hair_bottom, tone + int(rng.integers(-20, 20)))
    yy, xx = np.mgrid[0:height, 0:width]
    outside = ((xx - cx) / (rx * 1.15)) ** 2 + ((yy - cy + ry * 0.25) / (ry * 1.05)) ** 2 > 1
    canvas[outside & (yy < hair_bottom)] = 255

    # light shading strokes on the cheeks
    for side in (-1, 1):
        for i in range(int(rng.integers(5, 9))):
            sx = cx + side * rx * 0.55 + rng.uniform(-3, 3)
            sy = cy + ry * 0.1 + i * 2.5
            _stroke(canvas, sx - 4, sy, sx + 4, sy + rng.uniform(-2, 2), int(rng.integers(175, 215)))

    # dark outlines: face, eyes, nose, mouth
    _ellipse(canvas, cx, cy, rx, ry, int(rng.integers(20, 60)), width=2)
    for side in (-1, 1):
        _ellipse(canvas, cx + side * rx * 0.4, cy - ry * 0.15, rx * 0.16, ry * 0.07,
                 int(rng.integers(10, 50)))
        canvas[int(cy - ry * 0.15), int(cx + side * rx * 0.4)] = 0
    _stroke(canvas, cx, cy - ry * 0.05, cx - 2, cy + ry * 0.25, int(rng.integers(90, 150)))
    _ellipse(canvas, cx, cy + ry * 0.5, rx * 0.3, ry * 0.08, int(rng.integers(30, 80)),
             width=2, start=0.1, stop=np.pi - 0.1)
    return canvas


def blurred(rng, sketch: np.ndarray, sigma: float = 2.0) -> np.ndarray:
    """An over-smoothed synthesis: stroke texture lost, no noise."""
    out = ndimage.gaussian_filter(sketch.astype(np.float64), sigma)
    return np.clip(np.round(out), 0, 255).astype(np.uint8)


def noisy(rng, sketch: np.ndarray, sigma: float = 12.0) -> np.ndarray:
    """A synthesis with pixel noise over the correct strokes."""
    out = sketch.astype(np.float64) + rng.normal(0, sigma, sketch.shape)
    return np.clip(np.round(out), 0, 255).astype(np.uint8)


def jittered(rng, sketch: np.ndarray, max_shift: int = 1) -> np.ndarray:
    """Correct style with strokes slightly displaced (a misaligned synthesis)."""
    dy, dx = rng.integers(-max_shift, max_shift + 1, size=2)
    out = np.roll(sketch, (int(dy), int(dx)), axis=(0, 1))
    return out


def washed(rng, sketch: np.ndarray, strength: float = 0.55) -> np.ndarray:
    """Correctly placed strokes rendered too light (low tonal contrast)."""
    out = 255.0 - (255.0 - sketch.astype(np.float64)) * strength
    return np.clip(np.round(out), 0, 255).astype(np.uint8)


SYNTHESIZERS = {
    "blur": blurred,
    "noise": noisy,
    "jitter": jittered,
    "washed": washed,
}


def uniform_noise(rng, shape) -> np.ndarray:
    return rng.integers(0, 256, size=shape, dtype=np.uint8)


def write_dataset(root, n_photos: int = 6, seed: int = 0, width: int = 200, height: int = 250,
                  algorithms=("blur", "noise", "jitter")) -> str:
    """Write GT and synthesized PGMs plus ``manifest.json`` under ``root``; return the manifest path."""
    rng = np.random.default_rng(seed)
    os.makedirs(os.path.join(root, "gt"), exist_ok=True)
    manifest = {"gt": {}, "algorithms": {a: {} for a in algorithms}}
    for i in range(n_photos):
        pid = f"p{i:03d}"
        gt = face_sketch(rng, width, height)
        save_pgm(GrayImage(gt), os.path.join(root, "gt", f"{pid}.pgm"))
        manifest["gt"][pid] = f"gt/{pid}.pgm"
        for algo in algorithms:
            os.makedirs(os.path.join(root, algo), exist_ok=True)
            syn = SYNTHESIZERS[algo](rng, gt)
            save_pgm(GrayImage(syn), os.path.join(root, algo, f"{pid}.pgm"))
            manifest["algorithms"][algo][pid] = f"{algo}/{pid}.pgm"
    path = os.path.join(root, "manifest.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
    return path


def write_ranked_pairs(root, n_pairs: int = 50, seed: int = 0, width: int = 64,
                       height: int = 80) -> str:
    """Pairs where ``better`` is a byte copy of the GT and ``worse`` is uniform noise."""
    rng = np.random.default_rng(seed)
    os.makedirs(os.path.join(root, "pairs"), exist_ok=True)
    entries = []
    for i in range(n_pairs):
        gt = GrayImage(face_sketch(rng, width, height))
        names = {k: f"pairs/{i:03d}_{k}.pgm" for k in ("gt", "better", "worse")}
        save_pgm(gt, os.path.join(root, names["gt"]))
        save_pgm(gt, os.path.join(root, names["better"]))
        save_pgm(GrayImage(uniform_noise(rng, gt.shape)), os.path.join(root, names["worse"]))
        entries.append(names)
    path = os.path.join(root, "pairs.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(entries, fh, indent=2)
    return path
