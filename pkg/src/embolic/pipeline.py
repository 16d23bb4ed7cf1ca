"""Pipeline stages and their on-disk artifacts.

Stages read and write files in the output directory:

=================  ==========================================  ===============================
stage              reads                                       writes
=================  ==========================================  ===============================
preprocess         ``data``                                    corpus.jsonl, cooccurrence.json
embed              cooccurrence.json                           embeddings.json
train              corpus.jsonl, embeddings.json               attention.json, loss_trace.csv
fit-directions     corpus.jsonl, embeddings.json,              model.json
                   attention.json
evaluate           corpus.jsonl, model.json                    predictions.jsonl, report.txt
plot               corpus.jsonl, cooccurrence.json,            plots/
                   model.json
=================  ==========================================  ===============================
"""

from __future__ import annotations

import json
import logging
import os
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from . import plots
from .attention import AttentionParams
from .contrastive import train_attention
from .corpus import (
    EmotionCatalog,
    Preprocessor,
    build_cooccurrence,
    build_similarity,
    load_instances,
    split_holdout,
)
from .errors import DataError, LockHeldError, MissingArtifactError
from .glove import WordEmbeddingTable, fit_embeddings
from .inference import (
    accuracy,
    assemble_model,
    confidence_report,
    emotion_cooccurrence,
    emotion_map,
    ranked,
)
from .modelio import atomic_write, load_model, read_json, save_model, write_json

log = logging.getLogger(__name__)

STAGES = ("preprocess", "embed", "train", "fit-directions", "evaluate", "plot")
LOCK_NAME = ".embolic.lock"

CORPUS = "corpus.jsonl"
COOC = "cooccurrence.json"
EMBED = "embeddings.json"
ATTN = "attention.json"
TRACE = "loss_trace.csv"
MODEL = "model.json"
PRED = "predictions.jsonl"
REPORT = "report.txt"
PLOTS = "plots"


@contextmanager
def output_lock(out_dir):
    """Hold an exclusive lock file in ``out_dir`` for the duration of the block."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / LOCK_NAME
    try:
        fd = os.open(path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        raise LockHeldError(
            f"{path} exists: another run is using this directory (delete it if stale)"
        ) from None
    try:
        os.write(fd, f"{os.getpid()}\n".encode())
        os.close(fd)
        yield
    finally:
        path.unlink(missing_ok=True)


def _need(path):
    path = Path(path)
    if not path.exists():
        raise MissingArtifactError(f"missing artifact {path}; run the upstream stage first")
    return path


def _read_corpus(out):
    catalog = EmotionCatalog(read_json(_need(out / COOC))["emotions"])
    records = []
    with open(_need(out / CORPUS), encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                records.append(json.loads(line))
    return catalog, records


def _split(records, catalog, split):
    rows = [r for r in records if r["split"] == split]
    return (
        [r["tokens"] for r in rows],
        [catalog.index(r["label"]) for r in rows],
        [r["id"] for r in rows],
        [r["text"] for r in rows],
    )


# --------------------------------------------------------------------------
# stages


def stage_preprocess(cfg):
    out = Path(cfg.out)
    if not cfg.data:
        raise DataError("no input data configured (set `data` or pass --data)")
    _need(cfg.data)
    catalog = EmotionCatalog.parse(cfg.catalog)
    instances = load_instances(cfg.data, catalog)
    train, test = split_holdout(instances, len(catalog), cfg.holdout_per_class, cfg.seed)
    pp = Preprocessor(cfg.preprocess())
    lines = []
    train_tokens = []
    for split, group in (("train", train), ("test", test)):
        for inst in group:
            tokens = pp(inst.text)
            if split == "train":
                train_tokens.append(tokens)
            lines.append(
                json.dumps(
                    {"id": inst.text_id, "split": split, "label": catalog.names[inst.label],
                     "text": inst.text, "tokens": tokens},
                    ensure_ascii=False,
                )  # fmt: skip
            )
    cooc = build_cooccurrence(train_tokens, [i.label for i in train], len(catalog), cfg.min_count)
    atomic_write(out / CORPUS, "\n".join(lines) + "\n")
    write_json(out / COOC, {
        "emotions": list(catalog.names),
        "vocab": cooc.vocab,
        "rows": [[float(x) for x in row] for row in cooc.rows],
    })  # fmt: skip
    return f"preprocess: {len(train)} train / {len(test)} test instances, vocabulary {len(cooc.vocab)}"


def stage_embed(cfg):
    out = Path(cfg.out)
    obj = read_json(_need(out / COOC))
    S = build_similarity(np.array(obj["rows"], dtype=np.float64))
    table = fit_embeddings(S, obj["vocab"], cfg.discs, cfg.glove())
    write_json(out / EMBED, table.to_json())
    return f"embed: {len(table.vocab)} words in {table.k} discs"


def _table(out):
    return WordEmbeddingTable.from_json(read_json(_need(out / EMBED)))


def stage_train(cfg):
    out = Path(cfg.out)
    catalog, records = _read_corpus(out)
    tokens, labels, _, _ = _split(records, catalog, "train")
    result = train_attention(tokens, labels, _table(out), cfg.training())
    write_json(out / ATTN, {
        "projection": [float(x) for x in result.params.projection],
        "bias": float(result.params.bias),
        "dropped": result.dropped,
    })  # fmt: skip
    atomic_write(out / TRACE, result.trace_csv())
    means = result.epoch_means()
    if means:
        return f"train: loss {means[0]:.6f} (first epoch) -> {means[-1]:.6f} (last epoch)"
    return "train: zero epochs, parameters left at initialization"


def stage_fit_directions(cfg):
    out = Path(cfg.out)
    catalog, records = _read_corpus(out)
    tokens, labels, _, _ = _split(records, catalog, "train")
    att = read_json(_need(out / ATTN))
    model = assemble_model(
        _table(out),
        AttentionParams(att["projection"], att["bias"]),
        tokens,
        labels,
        catalog,
        cfg.temperature,
        cfg.echo(),
    )
    save_model(out / MODEL, model)
    return f"fit-directions: {len(catalog)} emotions x {model.k} discs"


def _report_table(model, probs_by_discs, labels, threshold):
    lines = [f"{'discs':<12}{'n':>6}{'top1':>9}{'top3':>9}{'top5':>9}"]
    for name, probs in probs_by_discs:
        rep = accuracy(probs, labels)
        lines.append(f"{name:<12}{rep.n:>6}{rep.top1:>9.4f}{rep.top3:>9.4f}{rep.top5:>9.4f}")
    conf = confidence_report(probs_by_discs[0][1], labels, threshold)
    lines.append("")
    lines.append(f"{'threshold':<16}{'secure_correct':>16}{'secure_wrong':>14}{'insecure':>10}")
    lines.append(
        f"{threshold:<16.2f}{conf.secure_correct:>16}{conf.secure_wrong:>14}{conf.insecure:>10}"
    )
    return "\n".join(lines) + "\n"


def stage_evaluate(cfg):
    out = Path(cfg.out)
    model = load_model(_need(out / MODEL))
    catalog, records = _read_corpus(out)
    tokens, labels, ids, _ = _split(records, catalog, "test")
    names = model.catalog.names
    if not tokens:
        log.warning("empty test set: nothing to evaluate")
        atomic_write(out / PRED, "")
        atomic_write(out / REPORT, "empty test set\n")
        return "evaluate: empty test set"
    labels = np.asarray(labels)
    _, probs, _ = model.score_tokens(tokens)
    order = ranked(probs)
    lines = []
    for i in range(len(tokens)):
        lines.append(json.dumps({
            "text_id": ids[i],
            "true_label": names[labels[i]],
            "probs": [float(p) for p in probs[i]],
            "top5": [names[e] for e in order[i, :5]],
            "secure": bool(probs[i, order[i, 0]] >= cfg.threshold),
        }, ensure_ascii=False))  # fmt: skip
    atomic_write(out / PRED, "\n".join(lines) + "\n")

    rows = [("all", probs)]
    for d in range(model.k):
        rows.append((f"disc {d + 1}", model.score_tokens(tokens, [d])[1]))
    for d in range(1, model.k - 1):
        rows.append((f"discs 1-{d + 1}", model.score_tokens(tokens, range(d + 1))[1]))
    table = _report_table(model, rows, labels, cfg.threshold)
    atomic_write(out / REPORT, table)
    return table.rstrip("\n")


def stage_plot(cfg):
    out = Path(cfg.out)
    model = load_model(_need(out / MODEL))
    catalog, records = _read_corpus(out)
    cooc = read_json(_need(out / COOC))
    pdir = out / PLOTS
    pdir.mkdir(parents=True, exist_ok=True)
    emotions = list(model.catalog.names)

    rows_by_word = dict(zip(cooc["vocab"], cooc["rows"]))
    cooc_rows = [rows_by_word.get(w, [0.0] * len(emotions)) for w in model.table.vocab]
    files = plots.word_figures(pdir, model.table, cooc_rows, emotions, cfg.color_threshold)

    tokens, labels, ids, _ = _split(records, catalog, "train")
    pooled, empty = model.pool(tokens)
    keep = np.flatnonzero(~empty)
    files += plots.message_figures(
        pdir, model, pooled[keep], np.asarray(labels)[keep], [ids[i] for i in keep]
    )

    tokens, labels, ids, texts = _split(records, catalog, "test")
    if not tokens:
        log.warning("empty test set: skipping test-instance, co-occurrence and emotion-map plots")
    else:
        corrected, _ = model.represent(tokens)
        files += plots.test_figures(pdir, model, corrected, labels, ids, texts)
        probs = model.scores(corrected)
        top5 = ranked(probs)[:, :5]
        counts = emotion_cooccurrence(top5, len(emotions))
        files += plots.heatmap_figure(pdir, counts, emotions)
        points, kept = emotion_map(counts, cfg.glove(epochs=cfg.emotion_map_epochs))
        files += plots.emotion_map_figure(pdir, points, kept, emotions)
    atomic_write(pdir / "index.txt", "\n".join(sorted(files)) + "\n")
    return f"plot: {len(files)} files in {pdir}"


STAGE_FUNCS = {
    "preprocess": stage_preprocess,
    "embed": stage_embed,
    "train": stage_train,
    "fit-directions": stage_fit_directions,
    "evaluate": stage_evaluate,
    "plot": stage_plot,
}


def run_stage(stage, cfg):
    """Run one stage under the output-directory lock and return its summary."""
    if stage not in STAGE_FUNCS:
        raise ValueError(f"unknown stage {stage!r}")
    with output_lock(cfg.out):
        return STAGE_FUNCS[stage](cfg)


def run_pipeline(cfg, echo=print):
    """All six stages in order under one lock."""
    with output_lock(cfg.out):
        for stage in STAGES:
            echo(STAGE_FUNCS[stage](cfg))


def predict_text(model, text, cfg):
    """(emotion, probability) pairs for one raw message, most probable first."""
    tokens = Preprocessor(cfg.preprocess())(text)
    _, probs, empty = model.score_tokens([tokens])
    if empty[0]:
        log.warning("no in-vocabulary tokens; the message maps to the disc centers")
    order = ranked(probs[0])
    return [(model.catalog.names[e], float(probs[0, e])) for e in order]

