"""Regenerate the bundled toy corpus (4 emotions x 50 messages).

Each emotion owns a disjoint set of cue words; messages mix a few cues with
filler words shared by every emotion, so a single disc can confuse classes
while the cues still separate them.

    python3 scripts/make_toy_corpus.py src/embolic/data/toy_corpus.jsonl
"""

import json
import sys

import numpy as np

EMOTIONS = ("joy", "anger", "fear", "sadness")
CUES = {
    "joy": ["sunshine", "laugh", "delight", "cheer", "celebrate", "grin", "party", "glow"],
    "anger": ["furious", "rage", "yell", "slam", "outrage", "fume", "hostile", "snarl"],
    "fear": ["scared", "tremble", "panic", "dread", "creepy", "shiver", "terror", "flee"],
    "sadness": ["tears", "grief", "lonely", "mourn", "gloomy", "sorrow", "weep", "miss"],
}
FILLER = ["today", "thing", "people", "week", "house", "phone", "morning", "work", "friend", "city"]
PER_CLASS = 50
SEED = 1


def main(path):
    rng = np.random.Generator(np.random.PCG64(SEED))
    lines = []
    for e, emo in enumerate(EMOTIONS):
        for m in range(PER_CLASS):
            n_cue = int(rng.integers(2, 4))
            n_fill = int(rng.integers(0, 3))
            words = list(rng.choice(CUES[emo], n_cue, replace=False))
            words += list(rng.choice(FILLER, n_fill, replace=False))
            rng.shuffle(words)
            lines.append({"id": f"toy-{emo}-{m:02d}", "text": " ".join(words), "label": emo})
    with open(path, "w", encoding="utf-8") as fh:
        for obj in lines:
            fh.write(json.dumps(obj) + "\n")


if __name__ == "__main__":
    main(sys.argv[1])
