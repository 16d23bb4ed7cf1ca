import json
import subprocess
import sys

import pytest

from embolic.cli import main
from embolic.pipeline import LOCK_NAME, STAGES

ARTIFACTS = ("corpus.jsonl", "cooccurrence.json", "embeddings.json", "attention.json",
             "loss_trace.csv", "model.json", "predictions.jsonl", "report.txt")  # fmt: skip


class TestExitCodes:
    def test_missing_model(self, tmp_path, capsys):
        assert main(["evaluate", "--config", "@toy", "--out", str(tmp_path)]) == 3
        assert "model.json" in capsys.readouterr().err

    def test_missing_model_predict(self, tmp_path):
        assert main(["predict", "--text", "hi", "--out", str(tmp_path)]) == 3

    def test_bad_config(self, tmp_path):
        assert main(["preprocess", "--config", "@toy", "--out", str(tmp_path), "--discs", "0"]) == 2
        assert main(["preprocess", "--out", str(tmp_path), "--no-such-key", "1"]) == 2
        (tmp_path / "c.toml").write_text("discs = [")
        assert main(["preprocess", "--config", str(tmp_path / "c.toml")]) == 2

    def test_usage(self):
        with pytest.raises(SystemExit) as exc:
            main(["no-such-stage"])
        assert exc.value.code == 2

    def test_lock(self, tmp_path):
        (tmp_path / LOCK_NAME).write_text("1\n")
        assert main(["preprocess", "--config", "@toy", "--out", str(tmp_path)]) == 6
        assert (tmp_path / LOCK_NAME).exists()

    def test_lock_released(self, tmp_path):
        assert main(["evaluate", "--out", str(tmp_path)]) == 3
        assert not (tmp_path / LOCK_NAME).exists()

    def test_data_errors(self, tmp_path):
        bad = tmp_path / "bad.jsonl"
        bad.write_text("{oops\n")
        out = str(tmp_path / "o")
        assert main(["preprocess", "--data", str(bad), "--catalog", "joy", "--out", out]) == 4
        assert main(["preprocess", "--out", out]) == 4  # no data configured
        assert main(["preprocess", "--data", str(tmp_path / "absent.jsonl"), "--out", out]) == 3

    def test_help_lists_codes(self, capsys):
        with pytest.raises(SystemExit):
            main(["--help"])
        text = capsys.readouterr().out
        for code in range(7):
            assert f"  {code}  " in text


class TestStages:
    def test_stagewise_equals_pipeline(self, toy_run, tmp_path):
        for stage in STAGES:
            assert main([stage, "--config", "@toy", "--out", str(tmp_path)]) == 0
        for name in ARTIFACTS:
            assert (tmp_path / name).read_bytes() == (toy_run / name).read_bytes(), name
        ref = (toy_run / "plots" / "index.txt").read_text().split()
        assert (tmp_path / "plots" / "index.txt").read_text().split() == ref
        for name in ref:
            assert (tmp_path / "plots" / name).read_bytes() == (toy_run / "plots" / name).read_bytes()

    def test_artifacts(self, toy_run):
        preds = [json.loads(l) for l in (toy_run / "predictions.jsonl").read_text().splitlines()]
        assert len(preds) == 20
        for p in preds:
            assert set(p) == {"text_id", "true_label", "probs", "top5", "secure"}
            assert len(p["probs"]) == 4 and abs(sum(p["probs"]) - 1) < 1e-12
            assert len(p["top5"]) == 4
        trace = (toy_run / "loss_trace.csv").read_text().splitlines()
        assert trace[0] == "epoch,batch,loss"
        report = (toy_run / "report.txt").read_text()
        for row in ("all", "disc 1", "disc 3", "discs 1-2", "secure_correct"):
            assert row in report

    def test_predict(self, toy_run, capsys):
        assert main(["predict", "--config", "@toy", "--out", str(toy_run), "--text", "We celebrate!"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert len(lines) == 4
        probs = [float(l.split()[1]) for l in lines]
        assert probs == sorted(probs, reverse=True)
        assert abs(sum(probs) - 1) < 1e-5

    def test_console_entry(self, toy_run):
        cmd = [sys.executable, "-m", "embolic.cli", "predict", "--out", str(toy_run), "--text", "xyzzy"]
        res = subprocess.run(cmd, capture_output=True, text=True)
        assert res.returncode == 0
        assert [float(l.split()[1]) for l in res.stdout.splitlines()] == [0.25] * 4
