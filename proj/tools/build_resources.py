#!/usr/bin/env python3
"""Rebuilds resources/{taboo,wordle}/en/words.json.

Needs: pip install wordfreq english-words
Frequency strata come from wordfreq Zipf values:
  taboo:  tertiles of the hand-written list in taboo_words.txt
  wordle: high >= 4.0 > medium >= 3.0 > low >= 2.0, most frequent first
"""
import json
import pathlib
import re
import sys

from english_words import get_english_words_set
from wordfreq import zipf_frequency

ROOT = pathlib.Path(__file__).resolve().parent.parent
PER_BAND = {"high": 334, "medium": 333, "low": 333}
BLOCKED = {"bitch", "whore", "penis", "sperm", "horny", "slave", "nazis", "rapes", "raped", "porno", "sexes", "dicks",
           "pussy", "boobs", "titty", "fucks", "shits", "cunts"}


def write(path, entries):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps({"entries": entries}, indent=2, sort_keys=True) + "\n")
    print(f"{path.relative_to(ROOT)}: {len(entries)} entries")


def taboo():
    rows = []
    seen = set()
    for line in (ROOT / "tools" / "taboo_words.txt").read_text().splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        target, rest = line.split(":", 1)
        target = target.strip()
        related = [w for w in rest.split() if w != target]
        if target in seen:
            sys.exit(f"duplicate taboo target {target}")
        if len(related) < 3 or not re.fullmatch(r"[a-z]+", target):
            sys.exit(f"bad taboo line: {line}")
        seen.add(target)
        rows.append((zipf_frequency(target, "en"), target, related))
    rows.sort(key=lambda r: (-r[0], r[1]))
    cut = [len(rows) // 3, 2 * len(rows) // 3]
    entries = []
    for i, (_, target, related) in enumerate(rows):
        stratum = "high" if i < cut[0] else "medium" if i < cut[1] else "low"
        entries.append({"word": target, "related": related, "stratum": stratum, "lang": "en"})
    entries.sort(key=lambda e: e["word"])
    write(ROOT / "resources" / "taboo" / "en" / "words.json", entries)


def wordle():
    # web2 capitalizes proper nouns; keep only all-lowercase entries
    web2 = get_english_words_set(["web2"], lower=False, alpha=True)
    words = {w for w in web2 if len(w) == 5 and w.isascii() and w.islower()}
    words -= BLOCKED
    bands = {"high": [], "medium": [], "low": []}
    for w in words:
        z = zipf_frequency(w, "en")
        band = "high" if z >= 4.0 else "medium" if z >= 3.0 else "low" if z >= 2.0 else None
        if band:
            bands[band].append((-z, w))
    entries = []
    for band, items in bands.items():
        items.sort()
        if len(items) < PER_BAND[band]:
            sys.exit(f"only {len(items)} words in band {band}")
        entries += [{"word": w, "stratum": band, "lang": "en"} for _, w in items[: PER_BAND[band]]]
    entries.sort(key=lambda e: e["word"])
    write(ROOT / "resources" / "wordle" / "en" / "words.json", entries)


if __name__ == "__main__":
    taboo()
    wordle()
