import os

import numpy as np
import pytest

from scoot import synthetic
from scoot.imageio import GrayImage

ACCEPTANCE_LINES: list[str] = []


def pytest_addoption(parser):
    parser.addoption(
        "--cufs-manifest",
        default=os.environ.get("SCOOT_CUFS_MANIFEST"),
        help="benchmark manifest with real GT sketches for the optional data-dependent check",
    )


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_image(rng, height, width) -> GrayImage:
    return GrayImage(rng.integers(0, 256, size=(height, width), dtype=np.uint8))


@pytest.fixture(scope="session")
def fixture_dataset(tmp_path_factory):
    """Six GT sketches, three synthesizers, seed 0."""
    root = tmp_path_factory.mktemp("dataset")
    return synthetic.write_dataset(root, n_photos=6, seed=0)


@pytest.fixture(scope="session")
def fixture_pairs(tmp_path_factory):
    """Fifty entries with better = GT copy and worse = uniform noise, seed 0."""
    root = tmp_path_factory.mktemp("pairs")
    return synthetic.write_ranked_pairs(root, n_pairs=50, seed=0)


def write_manifest(root, gts: dict, algorithms: dict) -> str:
    """Save arrays as PGMs under ``root`` and write a manifest over them."""
    import json
    from scoot.imageio import save_pgm

    doc = {"gt": {}, "algorithms": {a: {} for a in algorithms}}
    for pid, arr in gts.items():
        save_pgm(GrayImage(arr), root / f"gt_{pid}.pgm")
        doc["gt"][pid] = f"gt_{pid}.pgm"
    for algo, cells in algorithms.items():
        for pid, arr in cells.items():
            save_pgm(GrayImage(arr), root / f"{algo}_{pid}.pgm")
            doc["algorithms"][algo][pid] = f"{algo}_{pid}.pgm"
    path = root / "manifest.json"
    path.write_text(json.dumps(doc, indent=2, sort_keys=True))
    return str(path)


def light_dark_sketch(height=40, width=40) -> np.ndarray:
    """White canvas with a dark bar (tone 50) and a light bar (tone 200)."""
    a = np.full((height, width), 255, dtype=np.uint8)
    a[5:15, 5:35] = 50
    a[25:35, 5:35] = 200
    return a


@pytest.fixture
def content_manifest(tmp_path):
    """Four photos; syntheses are GT copies for three, blank pages for the fourth."""
    gt = light_dark_sketch()
    blank = np.full_like(gt, 255)
    gts = {f"p{i}": gt for i in range(4)}
    algos = {a: {f"p{i}": (gt if i < 3 else blank) for i in range(4)} for a in ("a", "b")}
    return write_manifest(tmp_path, gts, algos)
