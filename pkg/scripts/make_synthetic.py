#!/usr/bin/env python3
"""Regenerate the bundled synthetic corpora (deterministic, seeded).

Two corpora under data/synthetic/:

  two_category.txt      one play, two speakers drawing words from
                        disjoint alphabets (a-m vs n-z): maximal
                        separation for attribution/power tests.
  translation_a.txt     one play, two speakers, shared alphabet.
  translation_b.txt     the same dialogue with 10% of letters resampled:
                        a second "translator" of the same play.
"""
from __future__ import annotations

import random
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "data" / "synthetic"

CHARS_PER_SPEAKER = 3400  # comfortably above the 3000-char config minimum


def words(rng: random.Random, alphabet: str, total_chars: int) -> str:
    parts = []
    length = 0
    while length < total_chars:
        w = "".join(rng.choice(alphabet) for _ in range(rng.randint(2, 9)))
        parts.append(w)
        length += len(w) + 1
    return " ".join(parts)


def as_turns(speakers: dict[str, str], rng: random.Random, per_turn: int = 220) -> str:
    remaining = {name: text for name, text in speakers.items()}
    lines = []
    while any(remaining.values()):
        name = rng.choice([n for n, t in sorted(remaining.items()) if t])
        take, remaining[name] = remaining[name][:per_turn], remaining[name][per_turn:]
        lines.append(f"{name}. {take.strip()}")
        lines.append("")
    return "\n".join(lines) + "\n"


def noisy(text: str, rng: random.Random, alphabet: str, rate: float = 0.10) -> str:
    out = []
    for c in text:
        if c.isalpha() and rng.random() < rate:
            out.append(rng.choice(alphabet))
        else:
            out.append(c)
    return "".join(out)


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)

    rng = random.Random(2009)
    low = "abcdefghijklm"
    high = "nopqrstuvwxyz"
    two_cat = as_turns(
        {
            "ALFA": words(rng, low, CHARS_PER_SPEAKER),
            "BRAVO": words(rng, high, CHARS_PER_SPEAKER),
        },
        rng,
    )
    (OUT / "two_category.txt").write_text(two_cat, encoding="utf-8", newline="\n")

    rng = random.Random(1881)
    shared = "abcdefghijklmnopqrstuvwxyz"
    ola = words(rng, shared, CHARS_PER_SPEAKER)
    kari = words(rng, shared, CHARS_PER_SPEAKER)
    a_text = as_turns({"OLA": ola, "KARI": kari}, random.Random(5))
    b_text = as_turns(
        {"OLA": noisy(ola, random.Random(6), shared), "KARI": noisy(kari, random.Random(7), shared)},
        random.Random(5),
    )
    (OUT / "translation_a.txt").write_text(a_text, encoding="utf-8", newline="\n")
    (OUT / "translation_b.txt").write_text(b_text, encoding="utf-8", newline="\n")
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
