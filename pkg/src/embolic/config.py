"""Flat key/value pipeline configuration.

A config file is TOML with top-level scalar keys only::

    data = "corpus.jsonl"
    catalog = "joy,anger,fear,sadness"
    discs = 3
    glove_epochs = 300

Command-line ``--key value`` overrides win over the file; dashes and
underscores are interchangeable in keys. ``--config @toy`` loads the bundled
four-emotion toy setup.
"""

from __future__ import annotations

import sys
from dataclasses import asdict, dataclass, fields, replace

from .contrastive import TrainConfig
from .corpus import PreprocessConfig, _data_path
from .errors import EmbolicError
from .glove import GloveConfig

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib


# names the packaged toy corpus (as ``data``) or its config (as ``--config``)
BUNDLED_TOY = "@toy"


class ConfigError(EmbolicError, ValueError):
    """Unknown key, wrong type or invalid value in a configuration."""


_PRE = PreprocessConfig()


@dataclass(frozen=True)
class PipelineConfig:
    data: str = ""
    catalog: str = "goemotions"
    out: str = "embolic-out"
    stopwords: str = _PRE.stopwords
    retained: str = _PRE.retained
    lemma_rules: str = _PRE.lemma_rules
    lemma_exceptions: str = _PRE.lemma_exceptions
    min_count: int = 2
    holdout_per_class: int = 5
    discs: int = 3
    seed: int = 42
    glove_alpha: float = GloveConfig.alpha
    glove_lambda: float = GloveConfig.lambda_reg
    glove_init_concentration: float = GloveConfig.init_concentration
    glove_learning_rate: float = GloveConfig.learning_rate
    glove_epochs: int = GloveConfig.epochs
    train_batch_size: int = TrainConfig.batch_size
    train_epochs: int = TrainConfig.epochs
    train_learning_rate: float = TrainConfig.learning_rate
    train_lambda: float = TrainConfig.lambda_boundary
    train_pairs: int = TrainConfig.pairs_per_batch
    train_fd_step: float = TrainConfig.fd_step
    temperature: float = 0.05
    threshold: float = 0.20
    color_threshold: float = 0.8
    emotion_map_epochs: int = 500

    def __post_init__(self):
        if self.discs < 1:
            raise ConfigError("discs must be at least 1")
        if self.seed < 0 or self.seed >= 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if not self.temperature > 0:
            raise ConfigError("temperature must be positive")
        if not 0 <= self.threshold <= 1:
            raise ConfigError("threshold must lie in [0, 1]")
        if not 0 < self.color_threshold <= 1:
            raise ConfigError("color_threshold must lie in (0, 1]")
        if self.min_count < 1 or self.holdout_per_class < 0:
            raise ConfigError("min_count must be >= 1 and holdout_per_class >= 0")
        try:
            self.glove()
            self.training()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def preprocess(self):
        return PreprocessConfig(self.stopwords, self.retained, self.lemma_rules,
                                self.lemma_exceptions)  # fmt: skip

    def glove(self, **kw):
        cfg = GloveConfig(
            alpha=self.glove_alpha,
            lambda_reg=self.glove_lambda,
            init_concentration=self.glove_init_concentration,
            learning_rate=self.glove_learning_rate,
            epochs=self.glove_epochs,
            seed=self.seed,
        )
        return replace(cfg, **kw) if kw else cfg

    def training(self):
        return TrainConfig(
            batch_size=self.train_batch_size,
            epochs=self.train_epochs,
            learning_rate=self.train_learning_rate,
            lambda_boundary=self.train_lambda,
            pairs_per_batch=self.train_pairs,
            fd_step=self.train_fd_step,
            seed=self.seed,
        )

    def echo(self):
        """Everything that shapes the results; the output directory is excluded."""
        d = asdict(self)
        d.pop("out")
        return d


FIELD_TYPES = {f.name: f.type for f in fields(PipelineConfig)}
_CASTS = {"str": str, "int": int, "float": float}


def _coerce(key, value):
    typ = FIELD_TYPES[key]
    cast = _CASTS[typ if isinstance(typ, str) else typ.__name__]
    if isinstance(value, bool):
        raise ConfigError(f"{key}: booleans are not accepted")
    if cast is int and isinstance(value, float):
        raise ConfigError(f"{key}: expected an integer, got {value!r}")
    if cast is str and not isinstance(value, str):
        raise ConfigError(f"{key}: expected a string, got {value!r}")
    try:
        return cast(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{key}: cannot read {value!r} as {cast.__name__}") from exc


def normalize_key(key):
    key = key.lstrip("-").replace("-", "_")
    if key not in FIELD_TYPES:
        raise ConfigError(f"unknown configuration key {key!r}")
    return key


def load_config(path=None, overrides=None):
    """Merge defaults, an optional TOML file and overrides into a PipelineConfig.

    Raises:
        ConfigError: on unreadable files, unknown keys or bad values.
    """
    values = {}
    if path == BUNDLED_TOY:
        path = _data_path("toy.toml")
    if path is not None:
        try:
            with open(path, "rb") as fh:
                raw = tomllib.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
        for key, value in raw.items():
            if isinstance(value, dict):
                raise ConfigError(f"{path}: tables are not supported ([{key}])")
            key = normalize_key(key)
            values[key] = _coerce(key, value)
    for key, value in (overrides or {}).items():
        key = normalize_key(key)
        values[key] = _coerce(key, value)
    if values.get("data") == BUNDLED_TOY:
        values["data"] = _data_path("toy_corpus.jsonl")
    try:
        return PipelineConfig(**values)
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc


def parse_overrides(tokens):
    """``["--glove-epochs", "10", "--seed=3"]`` -> ``{"glove_epochs": "10", "seed": "3"}``."""
    out = {}
    it = iter(tokens)
    for tok in it:
        if not tok.startswith("--"):
            raise ConfigError(f"unexpected argument {tok!r}")
        if "=" in tok:
            key, value = tok.split("=", 1)
        else:
            key = tok
            try:
                value = next(it)
            except StopIteration:
                raise ConfigError(f"{tok} needs a value") from None
        out[normalize_key(key)] = value
    return out
