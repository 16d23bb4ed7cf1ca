"""Command-line entry point: ``embolic <stage> [options]``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from .config import ConfigError, load_config, parse_overrides
from .errors import (
    DataError,
    DimensionError,
    DomainError,
    EmbolicError,
    LockHeldError,
    MissingArtifactError,
    NonConvergenceError,
    NonFiniteError,
    UndefinedDirectionError,
)
from .modelio import load_model
from .pipeline import MODEL, predict_text, run_pipeline, run_stage

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_USAGE = 2
EXIT_MISSING = 3
EXIT_DATA = 4
EXIT_NUMERIC = 5
EXIT_LOCKED = 6

EPILOG = f"""\
exit codes:
  {EXIT_OK}  success
  {EXIT_UNEXPECTED}  unexpected error (I/O failure, bug)
  {EXIT_USAGE}  bad command line or malformed configuration
  {EXIT_MISSING}  missing artifact: an upstream stage has not been run
  {EXIT_DATA}  data error: empty, malformed or inconsistent input
  {EXIT_NUMERIC}  numerical error: domain violation, solver non-convergence,
     non-finite objective or undefined class direction
  {EXIT_LOCKED}  the output directory is locked by another run

Any configuration key can also be given as --key value (for example
--glove-epochs 100 or --data corpus.jsonl); command-line values win over
the --config file.
"""

_NUMERIC = (DomainError, DimensionError, NonConvergenceError, NonFiniteError,
            UndefinedDirectionError)  # fmt: skip


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat TOML configuration file")
    common.add_argument("--seed", type=int, help="seed for every random stream (u64)")
    common.add_argument("--discs", type=int, help="number of Poincare discs k")
    common.add_argument("--out", help="output directory")
    common.add_argument("--threshold", type=float, help="confidence threshold (default 0.20)")
    common.add_argument("--temperature", type=float, help="softmax temperature (default 0.05)")
    common.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")

    parser = argparse.ArgumentParser(
        prog="embolic",
        description="Hyperbolic emotion analysis pipeline.",
        epilog=EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"embolic {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    helps = {
        "preprocess": "tokenize the corpus, split train/test, build co-occurrences",
        "embed": "fit hyperbolic GloVe word embeddings in each disc",
        "train": "train the attention layer with the contrastive loss",
        "fit-directions": "fit corrections and class directions, write the model",
        "evaluate": "score the test split, write predictions and the report",
        "plot": "write SVG figures with CSV twins",
        "pipeline": "run all stages in order",
    }
    for name, text in helps.items():
        sub.add_parser(name, parents=[common], help=text, epilog=EPILOG,
                       formatter_class=argparse.RawDescriptionHelpFormatter)  # fmt: skip
    pred = sub.add_parser("predict", parents=[common], help="print emotion probabilities of one message",
                          epilog=EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)  # fmt: skip
    pred.add_argument("--text", required=True, help="the message to classify")
    return parser


def _config(args, extra):
    overrides = parse_overrides(extra)
    for key in ("seed", "discs", "out", "threshold", "temperature"):
        value = getattr(args, key)
        if value is not None:
            overrides[key] = value
    return load_config(args.config, overrides)


def main(argv=None):
    parser = build_parser()
    args, extra = parser.parse_known_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        cfg = _config(args, extra)
        if args.command == "pipeline":
            run_pipeline(cfg)
        elif args.command == "predict":
            path = Path(cfg.out) / MODEL
            if not path.exists():
                raise MissingArtifactError(f"missing artifact {path}; run the pipeline first")
            for name, p in predict_text(load_model(path), args.text, cfg):
                print(f"{name:<16}{p:.6f}")
        else:
            print(run_stage(args.command, cfg))
    except ConfigError as exc:
        print(f"embolic: configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MissingArtifactError as exc:
        print(f"embolic: {exc}", file=sys.stderr)
        return EXIT_MISSING
    except LockHeldError as exc:
        print(f"embolic: {exc}", file=sys.stderr)
        return EXIT_LOCKED
    except _NUMERIC as exc:
        print(f"embolic: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except DataError as exc:
        print(f"embolic: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except EmbolicError as exc:
        print(f"embolic: {exc}", file=sys.stderr)
        return EXIT_UNEXPECTED
    except OSError as exc:
        print(f"embolic: I/O error: {exc}", file=sys.stderr)
        return EXIT_UNEXPECTED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
