import csv
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from embolic import plots
from embolic.modelio import load_model, read_json

NS = {"s": "http://www.w3.org/2000/svg"}


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def svg_points(path):
    """(x, y, fill) of every filled data circle, unit circle excluded."""
    root = ET.parse(path).getroot()
    out = []
    for c in root.iterfind(".//s:g/s:circle", NS):
        out.append((float(c.get("cx")), float(c.get("cy")), c.get("fill")))
    return root, out


class TestHelpers:
    def test_palette(self):
        cols = plots.palette(28)
        assert len(set(cols)) == 28
        assert all(len(c) == 7 and c.startswith("#") for c in cols)
        assert plots.palette(3) == cols[:3]

    def test_dominant(self):
        assert plots.dominant_emotion([9.0, 1.0, 0.0], 0.8) == 0
        assert plots.dominant_emotion([1.0, 1.0, 0.0], 0.8) == -1
        assert plots.dominant_emotion([0.0, 0.0], 0.8) == -1

    def test_csv_floats_exact(self):
        text = plots.csv_text(["x"], [[0.1 + 0.2]])
        assert float(text.splitlines()[1]) == 0.1 + 0.2

    def test_screen_mapping(self):
        x, y = plots.to_screen(np.array([0j, 1j]))
        np.testing.assert_allclose(x, [plots.CX, plots.CX])
        np.testing.assert_allclose(y, [plots.CY, plots.CY - plots.RADIUS])

    def test_escape(self):
        fig = plots.DiscFigure("a < b & c")
        fig.add_legend("x<y", "#000000")
        ET.fromstring(fig.svg().split("\n", 1)[1])


class TestFigures:
    def test_index_matches_files(self, toy_run):
        pdir = toy_run / "plots"
        listed = (pdir / "index.txt").read_text().split()
        on_disk = sorted(p.name for p in pdir.iterdir() if p.name != "index.txt")
        assert listed == on_disk
        stems = {n.rsplit(".", 1)[0] for n in listed}
        for stem in stems:
            assert f"{stem}.svg" in listed and f"{stem}.csv" in listed

    def test_families_present(self, toy_run):
        names = set((toy_run / "plots" / "index.txt").read_text().split())
        for d in (1, 2, 3):
            assert f"words_disc{d}.svg" in names
            assert f"messages_joy_disc{d}.svg" in names
            assert f"test_001_disc{d}.svg" in names
        assert {"cooccurrence.svg", "emotion_map.svg"} <= names
        assert "test_009_disc1.svg" not in names

    def test_svg_frame(self, toy_run):
        for path in sorted((toy_run / "plots").glob("*.svg")):
            root = ET.parse(path).getroot()
            assert root.get("width") == "600" and root.get("height") == "600"
            assert root.get("viewBox") == "0 0 600 600"
            if path.stem == "cooccurrence":
                continue
            unit = [c for c in root.findall("s:circle", NS) if c.get("r") == f"{plots.RADIUS:.3f}"]
            assert len(unit) == 1
            assert root.findall("s:g", NS)[1].find("s:text", NS) is not None  # legend

    def test_coordinates_inside_disc(self, toy_run):
        for path in sorted((toy_run / "plots").glob("*.csv")):
            rows = read_csv(path)
            for prefix in ("", "raw_", "corrected_"):
                if rows and f"{prefix}re" in rows[0]:
                    z = np.array([complex(float(r[f"{prefix}re"]), float(r[f"{prefix}im"])) for r in rows])
                    assert np.all(np.abs(z) < 1), path.name

    def test_word_coloring(self, toy_run):
        cooc = read_json(toy_run / "cooccurrence.json")
        model = load_model(toy_run / "model.json")
        rows = dict(zip(cooc["vocab"], cooc["rows"]))
        colors = plots.palette(len(cooc["emotions"]))
        csv_rows = read_csv(toy_run / "plots" / "words_disc1.csv")
        _, pts = svg_points(toy_run / "plots" / "words_disc1.svg")
        assert [r["word"] for r in csv_rows] == model.table.vocab
        assert len(pts) == len(csv_rows)
        for row, (x, y, fill) in zip(csv_rows, pts):
            e = plots.dominant_emotion(rows[row["word"]], 0.8)
            assert row["emotion"] == (cooc["emotions"][e] if e >= 0 else "")
            assert fill == (colors[e] if e >= 0 else plots.BLACK)
            z = complex(float(row["re"]), float(row["im"]))
            assert (x, y) == pytest.approx(plots.to_screen(z), abs=1e-3)

    def test_message_panel_twin(self, toy_run):
        model = load_model(toy_run / "model.json")
        rows = read_csv(toy_run / "plots" / "messages_fear_disc2.csv")
        raw = np.array([complex(float(r["raw_re"]), float(r["raw_im"])) for r in rows])
        corr = np.array([complex(float(r["corrected_re"]), float(r["corrected_im"])) for r in rows])
        np.testing.assert_allclose(model.corrections[1](raw), corr, atol=1e-15)
        assert all(r["text_id"].startswith("toy-fear") for r in rows)

    def test_cooccurrence_twin(self, toy_run):
        rows = read_csv(toy_run / "plots" / "cooccurrence.csv")
        m = np.array([[int(r[e]) for e in ("joy", "anger", "fear", "sadness")] for r in rows])
        np.testing.assert_array_equal(m, m.T)
