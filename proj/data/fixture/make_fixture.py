#!/usr/bin/env python3
# Copyright 2026 The kex Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Regenerates the bundled synthetic fixtures.

fixture.jsonl      20 documents. Half of each document's gold phrases occur
                   in the title and abstract, the other half only in the
                   reference titles (and the body).
crf_separable.tsv  labeled sequences where the attribute "cue" marks exactly
                   the key_S tokens.

Output is deterministic. Run from any directory:
    python3 data/fixture/make_fixture.py
"""

import json
import pathlib
import random

HERE = pathlib.Path(__file__).resolve().parent
SEED = 20261016
NUM_DOCS = 20

ONSETS = ["b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "t", "v", "z",
          "br", "dr", "gr", "kr", "pl", "tr", "st"]
VOWELS = ["a", "e", "o", "u"]
CODAS = ["n", "r", "t", "k", "x", "m"]

# Shared vocabulary; present in most documents, so its IDF is low.
COMMON_NOUNS = ["method", "result", "approach", "experiment", "performance",
                "system", "model", "data", "analysis", "problem"]
FILLER = [
    "We describe the {c0} and report each {c1} in detail.",
    "The {c2} is evaluated with a standard {c3}.",
    "Our {c4} follows earlier {c5} on this {c6}.",
]


def make_words(rng, count, coda_pool, used):
    words = []
    while len(words) < count:
        word = "".join(rng.choice(ONSETS) + rng.choice(VOWELS)
                       for _ in range(rng.choice([1, 2])))
        word += rng.choice(coda_pool)
        if len(word) < 4 or word in used:
            continue
        used.add(word)
        words.append(word)
    return words


def common(rng):
    picks = rng.sample(COMMON_NOUNS, 7)
    return {f"c{i}": w for i, w in enumerate(picks)}


def filler(rng):
    return " ".join(t.format(**common(rng)) for t in FILLER)


def make_document(rng, index, used):
    # Nouns end in consonants the POS rules leave alone; adjectives in -ic.
    nouns = make_words(rng, 9, CODAS, used)
    adjective = make_words(rng, 1, ["ic"], used)[0]
    n1, n2, n3, n4, n5, n6, d1, d2, d3 = nouns
    gold_ta = [f"{adjective} {n1}", f"{n2} {n3}"]
    gold_r = [f"{n4} {n5}", n6]

    title = f"{adjective.capitalize()} {n1} for {n2} {n3}"
    abstract = (
        f"This paper studies {adjective} {n1} in {n2} {n3}. "
        f"The {n2} {n3} setting is compared with {d1} and {d2}. "
        f"A {d3} baseline is also considered. {filler(rng)}")
    references = [
        f"{n4.capitalize()} {n5} in practice",
        f"A survey of {n4} {n5}",
        f"{n6.capitalize()} for {adjective} {n1}",
        f"{n6.capitalize()} and {n4} {n5} revisited",
        f"Scalable {n6}",
        f"{n6.capitalize()} with {n4} {n5}",
    ]
    introduction = (
        f"{adjective.capitalize()} {n1} is a central problem. "
        f"Prior work on {n4} {n5} and {n6} motivates the {n2} {n3} view. "
        f"{filler(rng)}")
    conclusion = (
        f"We presented {adjective} {n1} for {n2} {n3}. "
        f"Future work will combine it with {n6}.")
    first_sentences = [
        f"The {d1} setting is introduced first.",
        f"We now turn to {n4} {n5}.",
    ]
    last_sentences = [
        f"This completes the {n2} {n3} analysis.",
        f"Hence {n6} matters for the {model_word(rng)}.",
    ]
    body = (
        f"{n4.capitalize()} {n5} connects to {n6}. "
        f"The {d2} heuristic is a weak {model_word(rng)}. "
        f"We measure {adjective} {n1} against {d3}. {filler(rng)}")
    full_text = " ".join([title + ".", abstract, introduction,
                          " ".join(first_sentences), body,
                          " ".join(last_sentences), conclusion])
    return {
        "id": f"doc{index:02d}",
        "title": title,
        "abstract": abstract,
        "introduction": introduction,
        "conclusion": conclusion,
        "first_sentences": first_sentences,
        "last_sentences": last_sentences,
        "reference_titles": references,
        "full_text": full_text,
        "keyphrases": gold_ta + gold_r,
    }


def model_word(rng):
    return rng.choice(["model", "system", "approach"])


def write_documents(rng):
    used = set(COMMON_NOUNS)
    lines = [json.dumps(make_document(rng, i, used), ensure_ascii=False)
             for i in range(1, NUM_DOCS + 1)]
    (HERE / "fixture.jsonl").write_text("\n".join(lines) + "\n")


def write_crf_fixture(rng):
    # One attribute per token; "cue" occurs exactly on key_S tokens.
    out = ["# attributes<TAB>tag; blank line between sequences"]
    for _ in range(60):
        length = rng.randint(3, 9)
        for _ in range(length):
            noise = f"w{rng.randint(0, 9)}"
            if rng.random() < 0.3:
                out.append(f"cue {noise}\tkey_S")
            else:
                out.append(f"{noise}\tkey_N")
        out.append("")
    (HERE / "crf_separable.tsv").write_text("\n".join(out))


def main():
    rng = random.Random(SEED)
    write_documents(rng)
    write_crf_fixture(rng)


if __name__ == "__main__":
    main()
