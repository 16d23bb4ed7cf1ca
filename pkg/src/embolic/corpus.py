"""Labeled message ingestion, text normalization and co-occurrence statistics."""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import DataError
from .sampling import make_rng

log = logging.getLogger(__name__)

GOEMOTIONS = (
    "admiration", "amusement", "anger", "annoyance", "approval", "caring",
    "confusion", "curiosity", "desire", "disappointment", "disapproval",
    "disgust", "embarrassment", "excitement", "fear", "gratitude", "grief",
    "joy", "love", "nervousness", "optimism", "pride", "realization",
    "relief", "remorse", "sadness", "surprise", "neutral",
)  # fmt: skip

LABEL_ALIASES = {"indifference": "neutral"}

URL = "<url>"
HASHTAG = "<hashtag>"
EMOJI = "<emoji>"
PLACEHOLDERS = (URL, HASHTAG, EMOJI)


class EmotionCatalog:
    """Ordered, duplicate-free list of emotion names."""

    def __init__(self, names):
        names = tuple(str(n).strip().lower() for n in names)
        if not names:
            raise DataError("an emotion catalog needs at least one label")
        if len(set(names)) != len(names):
            raise DataError("emotion names must be unique")
        self.names = names
        self._index = {n: i for i, n in enumerate(names)}

    @classmethod
    def parse(cls, text="goemotions"):
        """``"goemotions"`` for the default 28 labels, else a comma-separated list."""
        if text.strip().lower() == "goemotions":
            return cls(GOEMOTIONS)
        return cls(n for n in text.split(",") if n.strip())

    def __len__(self):
        return len(self.names)

    def __iter__(self):
        return iter(self.names)

    def __eq__(self, other):
        return isinstance(other, EmotionCatalog) and self.names == other.names

    def index(self, name):
        key = str(name).strip().lower()
        key = LABEL_ALIASES.get(key, key)
        if key not in self._index:
            raise DataError(f"unknown emotion label {name!r}")
        return self._index[key]


@dataclass(frozen=True)
class Instance:
    text: str
    label: int
    text_id: str = ""


# --------------------------------------------------------------------------
# text normalization


def _read_list(path):
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return [ln.strip() for ln in lines if ln.strip() and not ln.lstrip().startswith("#")]


def _data_path(name):
    return str(resources.files("embolic").joinpath("data").joinpath(name))


@dataclass(frozen=True)
class PreprocessConfig:
    stopwords: str = field(default_factory=lambda: _data_path("stopwords.txt"))
    retained: str = field(default_factory=lambda: _data_path("retained.txt"))
    lemma_rules: str = field(default_factory=lambda: _data_path("lemma_rules.txt"))
    lemma_exceptions: str = field(default_factory=lambda: _data_path("lemma_exceptions.txt"))


_URL_RE = re.compile(r"(?:https?://|www\.)\S+")
_HASHTAG_RE = re.compile(r"#[^\W_][\w]*")
_EMOJI_RE = re.compile(
    "["
    "\U0001f1e6-\U0001f1ff"
    "\U0001f300-\U0001f5ff"
    "\U0001f600-\U0001f64f"
    "\U0001f680-\U0001f6ff"
    "\U0001f900-\U0001f9ff"
    "\U0001fa70-\U0001faff"
    "☀-➿"
    "❤⭐⭕"
    "]+"
    r"|(?<![\w<])[:;=][\-']?[)(\]\[dp/|\\3*]+(?![\w>])"
)
_SPECIAL_NEG = {"won't": "will not", "can't": "can not", "ain't": "is not", "shan't": "shall not"}
_NEG_RE = re.compile(r"\b(" + "|".join(re.escape(k) for k in _SPECIAL_NEG) + r")\b")
_TOKEN_RE = re.compile(r"<url>|<hashtag>|<emoji>|[^\W_]+(?:'[^\W_]+)*")


class Preprocessor:
    """Compiled form of a :class:`PreprocessConfig`."""

    def __init__(self, config=None):
        config = config or PreprocessConfig()
        self.config = config
        self.retained = frozenset(w.lower() for w in _read_list(config.retained))
        self.stopwords = frozenset(w.lower() for w in _read_list(config.stopwords)) - self.retained
        self.rules = []
        for line in _read_list(config.lemma_rules):
            parts = line.split()
            if len(parts) != 3:
                raise DataError(f"bad lemma rule {line!r} in {config.lemma_rules}")
            suffix, repl, min_stem = parts
            self.rules.append((suffix, "" if repl == "-" else repl, int(min_stem)))
        self.exceptions = {}
        for line in _read_list(config.lemma_exceptions):
            parts = line.split()
            if len(parts) != 2:
                raise DataError(f"bad lemma exception {line!r} in {config.lemma_exceptions}")
            self.exceptions[parts[0]] = parts[1]

    def _lemma_step(self, word):
        if word in self.exceptions:
            return self.exceptions[word]
        for suffix, repl, min_stem in self.rules:
            if word.endswith(suffix):
                stem = word[: len(word) - len(suffix)]
                if len(stem) >= min_stem:
                    return stem + repl
        return word

    def lemmatize(self, word):
        if word in PLACEHOLDERS:
            return word
        # iterate to a fixed point so that lemmas are stable under reprocessing
        for _ in range(8):
            nxt = self._lemma_step(word)
            if nxt == word:
                break
            word = nxt
        return word

    def _is_stop(self, token):
        return token in self.stopwords

    def __call__(self, raw):
        if isinstance(raw, bytes):
            raw = raw.decode("utf-8", errors="replace")
        text = raw.replace("’", "'").lower()
        text = _URL_RE.sub(f" {URL} ", text)
        text = _HASHTAG_RE.sub(f" {HASHTAG} ", text)
        text = _EMOJI_RE.sub(f" {EMOJI} ", text)
        text = _NEG_RE.sub(lambda m: _SPECIAL_NEG[m.group(1)], text)
        text = re.sub(r"n't\b", " not", text)
        tokens = []
        for tok in _TOKEN_RE.findall(text):
            if tok not in PLACEHOLDERS:
                # drop clitics such as 's, 'm, 're
                tok = tok.split("'", 1)[0]
            if not tok or self._is_stop(tok):
                continue
            lemma = self.lemmatize(tok)
            if lemma and not self._is_stop(lemma):
                tokens.append(lemma)
        return tokens


def preprocess_text(raw, config=None):
    """Lowercased, normalized, stopword-filtered, lemmatized tokens of ``raw``."""
    return Preprocessor(config)(raw)


# --------------------------------------------------------------------------
# ingestion


def read_goemotions(path, catalog):
    """Read ``text<TAB>label-ids<TAB>id`` lines, keeping the first label id."""
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            try:
                if len(parts) != 3:
                    raise ValueError(f"expected 3 tab-separated fields, got {len(parts)}")
                label = int(parts[1].split(",")[0])
                if not 0 <= label < len(catalog):
                    raise ValueError(f"label id {label} outside catalog")
            except ValueError as exc:
                log.warning("%s:%d: skipped malformed line (%s)", path, lineno, exc)
                continue
            out.append(Instance(parts[0], label, parts[2]))
    if not out:
        raise DataError(f"{path}: no valid lines")
    return out


def read_jsonl(path, catalog):
    """Read JSON-lines objects with ``text`` and ``label`` (and optional ``id``)."""
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                text = obj["text"]
                if not isinstance(text, str):
                    raise ValueError("text is not a string")
                label = catalog.index(obj["label"])
            except (ValueError, KeyError, TypeError, DataError) as exc:
                log.warning("%s:%d: skipped malformed line (%s)", path, lineno, exc)
                continue
            out.append(Instance(text, label, str(obj.get("id", f"L{lineno}"))))
    if not out:
        raise DataError(f"{path}: no valid lines")
    return out


def load_instances(path, catalog):
    """Dispatch on file extension: ``.tsv`` is GoEmotions raw, anything else JSON-lines."""
    if str(path).endswith((".tsv", ".txt")):
        return read_goemotions(path, catalog)
    return read_jsonl(path, catalog)


def split_holdout(instances, n_emotions, per_class=5, seed=0):
    """Hold out ``per_class`` seeded random instances per emotion.

    Emotions with ``per_class`` or fewer instances keep one for training and
    hold out the rest. Both halves preserve input order.

    Returns:
        (train, test) lists.
    """
    labels = np.array([inst.label for inst in instances])
    rng = make_rng(seed)
    held = np.zeros(len(instances), dtype=bool)
    for e in range(n_emotions):
        idx = np.flatnonzero(labels == e)
        if idx.size == 0:
            continue
        take = min(per_class, idx.size - 1)
        if take < per_class:
            log.warning("emotion %d has %d instances; holding out %d", e, idx.size, take)
        if take > 0:
            held[rng.choice(idx, size=take, replace=False)] = True
    train = [inst for inst, h in zip(instances, held) if not h]
    test = [inst for inst, h in zip(instances, held) if h]
    return train, test


# --------------------------------------------------------------------------
# matrices


@dataclass
class CooccurrenceMatrix:
    vocab: list
    rows: np.ndarray

    def index(self):
        return {w: i for i, w in enumerate(self.vocab)}


def build_cooccurrence(token_lists, labels, n_emotions, min_count=2):
    """Word-emotion co-occurrence with L2-normalized rows.

    A token counts once per instance. Tokens appearing in fewer than
    ``min_count`` instances are dropped; the vocabulary is sorted.

    Raises:
        DataError: if the input is empty or no token survives.
    """
    if len(token_lists) == 0:
        raise DataError("no instances")
    if len(token_lists) != len(labels):
        raise DataError("token lists and labels differ in length")
    counts = {}
    for tokens, label in zip(token_lists, labels):
        for tok in set(tokens):
            row = counts.setdefault(tok, np.zeros(n_emotions))
            row[label] += 1.0
    vocab = sorted(t for t, row in counts.items() if row.sum() >= min_count)
    if not vocab:
        raise DataError(f"empty vocabulary after dropping tokens below min_count={min_count}")
    rows = np.array([counts[t] for t in vocab])
    rows /= np.linalg.norm(rows, axis=1, keepdims=True)
    return CooccurrenceMatrix(vocab, rows)


def normalize_rows(matrix):
    """L2-normalize rows, dropping all-zero ones; returns (rows, kept indices)."""
    m = np.asarray(matrix, dtype=np.float64)
    norms = np.linalg.norm(m, axis=1)
    keep = np.flatnonzero(norms > 0)
    return m[keep] / norms[keep, None], keep


def build_similarity(rows, tol=1e-12):
    """Similarity ``1 - |M_i - M_j|^2 / 2`` of row-normalized co-occurrences.

    Raises:
        DataError: if an entry falls outside ``[-tol, 1 + tol]`` before clamping.
    """
    M = np.asarray(getattr(rows, "rows", rows), dtype=np.float64)
    G = M @ M.T
    G = 0.5 * (G + G.T)
    sq = np.diag(G)
    S = 1.0 - 0.5 * (sq[:, None] + sq[None, :] - 2.0 * G)
    if np.any(S < -tol) or np.any(S > 1.0 + tol):
        raise DataError(
            f"similarity outside [0, 1]: range [{S.min():.3g}, {S.max():.3g}]; "
            "are the rows unit-norm and nonnegative?"
        )
    return np.clip(S, 0.0, 1.0)
