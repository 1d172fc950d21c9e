import csv
import io
import json

import numpy as np
import pytest

from scoot.cli import main
from scoot.imageio import GrayImage, save_pgm


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def pair(tmp_path, rng):
    a = tmp_path / "a.pgm"
    b = tmp_path / "b.pgm"
    save_pgm(GrayImage(rng.integers(0, 256, (40, 36), dtype=np.uint8)), a)
    save_pgm(GrayImage(rng.integers(0, 256, (30, 44), dtype=np.uint8)), b)
    return str(a), str(b)


class TestScore:
    def test_identical_json(self, capsys, pair):
        code, out, _ = run(capsys, "score", pair[0], pair[0])
        assert code == 0
        doc = json.loads(out)
        assert doc["score"] == 1.0
        assert doc["measure"] == "scoot-ce"
        assert doc["config"]["params"]["grid_k"] == 4
        assert "version" in doc

    def test_csv(self, capsys, pair):
        code, out, _ = run(capsys, "score", *pair, "--format", "csv")
        rows = list(csv.reader(io.StringIO(out)))
        assert rows[0] == ["gt", "syn", "measure", "score"]
        assert 0 < float(rows[1][3]) <= 1

    def test_ssim_resizes_syn(self, capsys, pair):
        code, out, _ = run(capsys, "score", *pair, "--measure", "ssim")
        assert code == 0 and -1 <= json.loads(out)["score"] <= 1

    def test_unknown_measure(self, capsys, pair):
        with pytest.raises(SystemExit) as exc:
            main(["score", *pair, "--measure", "psnr"])
        assert exc.value.code == 2
        assert "scoot-ce" in capsys.readouterr().err

    def test_missing_file(self, capsys, pair, tmp_path):
        code, out, err = run(capsys, "score", pair[0], str(tmp_path / "none.pgm"))
        assert code == 1 and out == ""
        assert "none.pgm" in err

    def test_bad_stats(self, capsys, pair):
        code, _, err = run(capsys, "score", *pair, "--stats", "xyz")
        assert code == 1 and "error" in err


class TestFeatures:
    def test_constant_image(self, capsys, tmp_path):
        p = tmp_path / "c.pgm"
        save_pgm(GrayImage(np.full((32, 32), 90, dtype=np.uint8)), p)
        code, out, _ = run(capsys, "features", str(p))
        doc = json.loads(out)
        assert doc["layout"]["length"] == 32
        assert doc["values"] == [0.0, 1.0] * 16

    def test_single_block(self, capsys, tmp_path):
        p = tmp_path / "c.pgm"
        save_pgm(GrayImage(np.full((8, 8), 90, dtype=np.uint8)), p)
        _, out, _ = run(capsys, "features", str(p), "--grid", "1")
        assert json.loads(out)["values"] == [0.0, 1.0]

    def test_csv_layout(self, capsys, pair):
        _, out, _ = run(capsys, "features", pair[0], "--stats", "hec", "--format", "csv")
        rows = list(csv.reader(io.StringIO(out)))
        assert rows[0] == ["index", "block", "component", "value"]
        assert len(rows) == 1 + 48

    def test_baseline_has_no_features(self, capsys, pair):
        code, _, err = run(capsys, "features", pair[0], "--measure", "gmsd")
        assert code == 1 and "no style features" in err


class TestBatchAndMeta:
    def test_batch(self, capsys, fixture_dataset):
        code, out, _ = run(capsys, "batch", "--manifest", fixture_dataset)
        assert code == 0
        assert len(json.loads(out)["records"]) == 18

    def test_batch_csv_rows(self, capsys, fixture_dataset):
        _, out, _ = run(capsys, "batch", "--manifest", fixture_dataset, "--format", "csv")
        assert len(out.splitlines()) == 19

    def test_mm4(self, capsys, fixture_pairs):
        code, out, _ = run(capsys, "meta", "mm4", "--pairs", fixture_pairs)
        doc = json.loads(out)
        assert code == 0 and doc["aggregate"] == 100.0 and doc["unit"] == "percent"

    def test_mm3_ratio_ssim(self, capsys, content_manifest):
        _, out, _ = run(capsys, "meta", "mm3", "--manifest", content_manifest, "--measure", "ssim")
        doc = json.loads(out)
        assert doc["aggregate"] == 75.0
        assert doc["config"]["threshold"] == 170

    def test_mm1_csv(self, capsys, fixture_dataset):
        _, out, _ = run(capsys, "meta", "mm1", "--manifest", fixture_dataset, "--format", "csv")
        rows = list(csv.reader(io.StringIO(out)))
        assert rows[0] == ["id", "value"]
        assert rows[-1][0] == "aggregate" and len(rows) == 8

    def test_mm4_needs_pairs(self, capsys, fixture_dataset):
        code, _, err = run(capsys, "meta", "mm4", "--manifest", fixture_dataset)
        assert code == 1 and "--pairs" in err

    def test_bad_manifest(self, capsys, tmp_path):
        p = tmp_path / "m.json"
        p.write_text('{"gt": {}}')
        code, _, err = run(capsys, "meta", "mm1", "--manifest", str(p))
        assert code == 1 and "algorithms" in err

    def test_jobs_must_be_positive(self, capsys, fixture_dataset):
        with pytest.raises(SystemExit) as exc:
            main(["batch", "--manifest", fixture_dataset, "--jobs", "0"])
        assert exc.value.code == 2
