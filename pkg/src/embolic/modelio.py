"""JSON persistence for embedding tables and trained models.

Floats are written with Python's shortest round-trip repr, so reading a file
and writing it again reproduces it byte for byte. Writes go through a
temporary file in the target directory followed by ``os.replace``.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .attention import AttentionParams
from .corpus import EmotionCatalog
from .disc import MoebiusTransform
from .errors import DataError
from .glove import WordEmbeddingTable
from .inference import TrainedModel

MODEL_FORMAT = "embolic-model/1"


def atomic_write(path, text):
    """Write ``text`` to ``path`` via a temporary sibling and a rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dumps(obj):
    return json.dumps(obj, indent=1, ensure_ascii=False, allow_nan=False) + "\n"


def write_json(path, obj):
    atomic_write(path, dumps(obj))


def read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: invalid JSON ({exc})") from exc


def _pair(z):
    return [float(z.real), float(z.imag)]


def model_to_json(model):
    return {
        "format": MODEL_FORMAT,
        "emotions": list(model.catalog.names),
        "vocab": list(model.table.vocab),
        "discs": model.table.to_json()["discs"],
        "attention": {
            "projection": [float(x) for x in model.attention.projection],
            "bias": float(model.attention.bias),
        },
        "corrections": [{"a": _pair(g.a), "theta": float(g.theta)} for g in model.corrections],
        "directions": [[float(x) for x in row] for row in model.directions],
        "temperature": float(model.temperature),
        "config_echo": model.config_echo,
    }


def model_from_json(obj):
    try:
        if obj.get("format") != MODEL_FORMAT:
            raise DataError(f"unsupported model format {obj.get('format')!r}")
        table = WordEmbeddingTable.from_json({"vocab": obj["vocab"], "discs": obj["discs"]})
        att = AttentionParams(obj["attention"]["projection"], obj["attention"]["bias"])
        corrections = [
            MoebiusTransform(complex(*c["a"]), c["theta"]) for c in obj["corrections"]
        ]
        return TrainedModel(
            table,
            att,
            corrections,
            np.array(obj["directions"], dtype=np.float64),
            EmotionCatalog(obj["emotions"]),
            float(obj["temperature"]),
            dict(obj.get("config_echo", {})),
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, DataError):
            raise
        raise DataError(f"malformed model file ({exc})") from exc


def save_model(path, model):
    write_json(path, model_to_json(model))


def load_model(path):
    return model_from_json(read_json(path))
