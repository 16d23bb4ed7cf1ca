"""Deterministic SVG figures with CSV twins.

Every disc figure is a 600x600 SVG holding the unit circle, the plotted
points and a legend; the CSV twin next to it carries the raw coordinates.
Numbers are formatted explicitly, so identical inputs give identical bytes.
"""

from __future__ import annotations

import colorsys
import csv
import io
import logging
import math
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from .modelio import atomic_write

log = logging.getLogger(__name__)

SIZE = 600
CX, CY, RADIUS = 345.0, 300.0, 245.0
BLACK = "#000000"
GRAY = "#9a9a9a"
_BASE = (
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b",
    "#e377c2", "#17becf", "#bcbd22", "#7f7f7f",
)  # fmt: skip


def palette(n):
    """``n`` distinct colors; the first ten are fixed, the rest evenly spaced hues."""
    out = list(_BASE[:n])
    for i in range(len(out), n):
        h = ((i - len(_BASE)) * 0.61803398875) % 1.0
        r, g, b = colorsys.hls_to_rgb(h, 0.45, 0.65)
        out.append(f"#{round(r * 255):02x}{round(g * 255):02x}{round(b * 255):02x}")
    return out


def _f(x):
    return f"{x:.3f}"


def to_screen(z):
    z = np.asarray(z, dtype=np.complex128)
    return CX + RADIUS * z.real, CY - RADIUS * z.imag


class DiscFigure:
    """Minimal SVG builder for one Poincare disc panel."""

    def __init__(self, title):
        self.title = title
        self.items = []
        self.legend = []

    def points(self, z, color, r=3.0, hollow=False):
        xs, ys = to_screen(np.atleast_1d(z))
        style = f'fill="none" stroke="{color}"' if hollow else f'fill="{color}"'
        for x, y in zip(xs, ys):
            self.items.append(f'<circle cx="{_f(x)}" cy="{_f(y)}" r="{_f(r)}" {style}/>')

    def ray(self, psi, color, width=1.5, dash=False):
        x, y = to_screen(complex(math.cos(psi), math.sin(psi)))
        extra = ' stroke-dasharray="6 4"' if dash else ""
        self.items.append(
            f'<line x1="{_f(CX)}" y1="{_f(CY)}" x2="{_f(x)}" y2="{_f(y)}" '
            f'stroke="{color}" stroke-width="{_f(width)}"{extra}/>'
        )

    def label(self, z, text, color=BLACK):
        x, y = to_screen(z)
        self.items.append(
            f'<text x="{_f(x + 4)}" y="{_f(y - 4)}" font-size="9" fill="{color}">{escape(text)}</text>'
        )

    def add_legend(self, name, color):
        self.legend.append((name, color))

    def svg(self):
        out = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" '
            f'viewBox="0 0 {SIZE} {SIZE}">',
            f'<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="#ffffff"/>',
            f'<text x="{_f(SIZE / 2)}" y="24" font-size="14" text-anchor="middle" '
            f'font-family="sans-serif">{escape(self.title)}</text>',
            f'<circle cx="{_f(CX)}" cy="{_f(CY)}" r="{_f(RADIUS)}" fill="none" '
            'stroke="#000000" stroke-width="1"/>',
            '<g font-family="sans-serif">',
            *self.items,
            "</g>",
            '<g font-family="sans-serif" font-size="9">',
        ]
        for i, (name, color) in enumerate(self.legend):
            y = 44 + 12 * i
            out.append(f'<rect x="6" y="{y - 7}" width="8" height="8" fill="{color}"/>')
            out.append(f'<text x="18" y="{y}">{escape(name)}</text>')
        out += ["</g>", "</svg>", ""]
        return "\n".join(out)


def csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in row])
    return buf.getvalue()


def _emit(out_dir, stem, fig_svg, header, rows):
    atomic_write(Path(out_dir) / f"{stem}.svg", fig_svg)
    atomic_write(Path(out_dir) / f"{stem}.csv", csv_text(header, rows))
    return [f"{stem}.svg", f"{stem}.csv"]


def dominant_emotion(row, threshold):
    """Index of the emotion holding more than ``threshold`` of the row norm, else -1."""
    row = np.asarray(row, dtype=np.float64)
    norm = np.linalg.norm(row)
    if norm == 0:
        return -1
    e = int(np.argmax(row))
    return e if row[e] > threshold * norm else -1


def word_figures(out_dir, table, cooc_rows, emotions, threshold=0.8):
    """Per-disc word scatter; words dominated by one emotion in its color, others black."""
    colors = palette(len(emotions))
    dom = [dominant_emotion(r, threshold) for r in cooc_rows]
    files = []
    for d in range(table.k):
        fig = DiscFigure(f"word embeddings, disc {d + 1}")
        rows = []
        for w, z, e in zip(table.vocab, table.discs[d], dom):
            fig.points(z, colors[e] if e >= 0 else BLACK)
            rows.append([w, float(z.real), float(z.imag), emotions[e] if e >= 0 else ""])
        for name, c in zip(emotions, colors):
            fig.add_legend(name, c)
        fig.add_legend("poly-emotional", BLACK)
        files += _emit(out_dir, f"words_disc{d + 1}", fig.svg(), ["word", "re", "im", "emotion"], rows)
    return files


def message_figures(out_dir, model, pooled, labels, text_ids):
    """Per emotion and disc: raw pooled points (hollow) and corrected ones (filled)."""
    emotions = list(model.catalog.names)
    colors = palette(len(emotions))
    corrected = model.correct(pooled)
    labels = np.asarray(labels)
    files = []
    for e, name in enumerate(emotions):
        sel = np.flatnonzero(labels == e)
        for d in range(model.k):
            fig = DiscFigure(f"{name}, disc {d + 1}: before and after correction")
            fig.points(pooled[sel, d], GRAY, hollow=True)
            fig.points(corrected[sel, d], colors[e])
            fig.ray(model.directions[d, e], colors[e], dash=True)
            fig.add_legend("raw", GRAY)
            fig.add_legend("corrected", colors[e])
            rows = [
                [text_ids[i], float(pooled[i, d].real), float(pooled[i, d].imag),
                 float(corrected[i, d].real), float(corrected[i, d].imag)]
                for i in sel
            ]  # fmt: skip
            files += _emit(out_dir, f"messages_{_slug(name)}_disc{d + 1}", fig.svg(),
                           ["text_id", "raw_re", "raw_im", "corrected_re", "corrected_im"], rows)  # fmt: skip
    return files


def test_figures(out_dir, model, corrected, labels, text_ids, texts, limit=8):
    """One panel per test instance and disc with the true emotion's direction drawn."""
    emotions = list(model.catalog.names)
    colors = palette(len(emotions))
    files = []
    for i in range(min(limit, len(labels))):
        y = int(labels[i])
        for d in range(model.k):
            z = corrected[i, d]
            fig = DiscFigure(f"{texts[i][:60]} ({emotions[y]}), disc {d + 1}")
            for e, c in enumerate(colors):
                fig.ray(model.directions[d, e], c, width=0.6)
            fig.ray(model.directions[d, y], colors[y], width=2.5)
            fig.points(z, BLACK, r=5.0)
            for name, c in zip(emotions, colors):
                fig.add_legend(name, c)
            rows = [[text_ids[i], float(z.real), float(z.imag), emotions[y],
                     float(model.directions[d, y])]]  # fmt: skip
            files += _emit(out_dir, f"test_{i + 1:03d}_disc{d + 1}", fig.svg(),
                           ["text_id", "re", "im", "true_label", "true_direction"], rows)  # fmt: skip
    return files


def heatmap_figure(out_dir, counts, emotions):
    """Emotion co-occurrence heatmap (top-5 lists)."""
    counts = np.asarray(counts)
    n = len(emotions)
    left, top = 110.0, 110.0
    cell = (SIZE - left - 10.0) / max(n, 1)
    peak = max(int(counts.max()) if counts.size else 0, 1)
    items = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" '
        f'viewBox="0 0 {SIZE} {SIZE}">',
        f'<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="#ffffff"/>',
        '<g font-family="sans-serif" font-size="8">',
    ]
    for i, name in enumerate(emotions):
        y = top + (i + 0.7) * cell
        x = left + (i + 0.5) * cell
        items.append(f'<text x="{_f(left - 4)}" y="{_f(y)}" text-anchor="end">{escape(name)}</text>')
        items.append(
            f'<text x="{_f(x)}" y="{_f(top - 4)}" transform="rotate(-60 {_f(x)} {_f(top - 4)})">'
            f"{escape(name)}</text>"
        )
        for j in range(n):
            shade = 255 - round(215 * counts[i, j] / peak)
            items.append(
                f'<rect x="{_f(left + j * cell)}" y="{_f(top + i * cell)}" width="{_f(cell)}" '
                f'height="{_f(cell)}" fill="#{shade:02x}{shade:02x}ff"/>'
            )
    # legend: scale bar from 0 to the peak count
    items.append('<rect x="8" y="10" width="10" height="10" fill="#ffffff" stroke="#000000"/>')
    items.append('<text x="22" y="18">0</text>')
    items.append('<rect x="8" y="26" width="10" height="10" fill="#2828ff"/>')
    items.append(f'<text x="22" y="34">{peak} instances</text>')
    items += ["</g>", "</svg>", ""]
    rows = [[emotions[i]] + [int(c) for c in counts[i]] for i in range(n)]
    return _emit(out_dir, "cooccurrence", "\n".join(items), ["emotion"] + list(emotions), rows)


def emotion_map_figure(out_dir, points, kept, emotions):
    """Emotions re-embedded from their co-occurrence counts."""
    colors = palette(len(emotions))
    fig = DiscFigure("emotion map")
    rows = []
    for z, e in zip(points, kept):
        fig.points(z, colors[e], r=4.0)
        fig.label(z, emotions[e], colors[e])
        fig.add_legend(emotions[e], colors[e])
        rows.append([emotions[e], float(z.real), float(z.imag)])
    return _emit(out_dir, "emotion_map", fig.svg(), ["emotion", "re", "im"], rows)


def _slug(name):
    return "".join(c if c.isalnum() else "_" for c in name)
