#!/usr/bin/env python3
"""Writes the small word-vector file used by the fixtures and tests.

Each word is a weighted sum of a few random "concept" directions plus a little
per-word noise, so related words (flow/outflow, write/author) end up close
while unrelated ones are near-orthogonal. Output is deterministic.
"""

import argparse
import math
import random

DIM = 96
SEED = 20240611
NOISE = 0.12

# word -> {concept: weight}
WORDS = {
    # water and movement
    "flow": {"flow": 1.0},
    "flows": {"flow": 1.0},
    "outflow": {"flow": 0.85, "out": 0.45},
    "inflow": {"flow": 0.6, "in": 0.7},
    "drain": {"flow": 0.7, "out": 0.4},
    "river": {"water": 0.6, "flow": 0.5, "geo": 0.2},
    "sea": {"water": 0.7, "sea": 0.7},
    "ocean": {"water": 0.7, "sea": 0.6},
    "shore": {"water": 0.4, "prox": 0.8, "city": 0.15},
    "strait": {"water": 0.6, "passage": 0.7},
    "straits": {"water": 0.6, "passage": 0.7},
    # places
    "city": {"city": 1.0},
    "cities": {"city": 0.95, "plural": 0.2},
    "town": {"city": 0.85, "small": 0.4},
    "settlement": {"city": 0.6, "place": 0.5},
    "location": {"place": 0.85, "city": 0.15},
    "located": {"place": 0.85},
    "place": {"place": 1.0},
    "country": {"nation": 0.85, "place": 0.3},
    "nation": {"nation": 1.0},
    "danish": {"nation": 0.6, "denmark": 0.7},
    "denmark": {"denmark": 0.8, "nation": 0.5},
    "russia": {"russia": 0.8, "nation": 0.5},
    "baltic": {"geo": 0.8, "water": 0.3},
    "nearest": {"prox": 1.0},
    "near": {"prox": 0.95},
    "on": {"prox": 0.7, "func": 0.55},
    "in": {"func": 0.7, "place": 0.3},
    "of": {"func": 1.0},
    "by": {"func": 0.7, "agent": 0.4},
    "into": {"func": 0.6, "in": 0.5},
    # schema words
    "label": {"meta": 0.8, "name": 0.5},
    "name": {"name": 1.0},
    "type": {"meta": 0.8, "class": 0.5},
    "abstract": {"meta": 0.5, "text": 0.7},
    "description": {"meta": 0.5, "text": 0.6, "name": 0.2},
    "currency": {"money": 1.0},
    "krone": {"money": 0.7, "denmark": 0.4},
    # writing and people
    "write": {"write": 1.0},
    "wrote": {"write": 0.95, "past": 0.25},
    "written": {"write": 0.9, "past": 0.3},
    "writer": {"write": 0.7, "person": 0.5},
    "author": {"write": 0.75, "person": 0.45},
    "book": {"text": 0.6, "write": 0.45, "object": 0.3},
    "novel": {"text": 0.6, "write": 0.45, "story": 0.4},
    "pages": {"text": 0.55, "number": 0.5},
    "number": {"number": 1.0},
    "person": {"person": 1.0},
    "people": {"person": 0.9, "plural": 0.3},
    "human": {"person": 0.85, "life": 0.3},
    "building": {"structure": 1.0},
    "zoo": {"structure": 0.4, "animal": 0.8},
    "military": {"army": 0.9},
    "unit": {"army": 0.5, "group": 0.6},
    "fleet": {"army": 0.6, "water": 0.4},
    "birth": {"life": 0.85, "date": 0.25},
    "born": {"life": 0.9, "past": 0.2},
    "date": {"date": 1.0},
    "year": {"date": 0.85, "number": 0.2},
    "founded": {"create": 0.9, "past": 0.2},
    "founder": {"create": 0.7, "person": 0.5},
    "identifier": {"meta": 0.5, "id": 0.8},
    "id": {"id": 1.0},
}


def concept_vectors(rng):
    concepts = sorted({c for weights in WORDS.values() for c in weights})
    out = {}
    for c in concepts:
        v = [rng.gauss(0.0, 1.0) for _ in range(DIM)]
        norm = math.sqrt(sum(x * x for x in v))
        out[c] = [x / norm for x in v]
    return out


def build():
    rng = random.Random(SEED)
    concepts = concept_vectors(rng)
    vectors = {}
    for word in sorted(WORDS):
        v = [rng.gauss(0.0, NOISE / math.sqrt(DIM)) for _ in range(DIM)]
        for concept, weight in WORDS[word].items():
            v = [a + weight * b for a, b in zip(v, concepts[concept])]
        vectors[word] = v
    return vectors


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("output", help="path of the vector file to write")
    args = parser.parse_args()
    vectors = build()
    with open(args.output, "w", encoding="utf-8") as f:
        f.write(f"{len(vectors)} {DIM}\n")
        for word, v in vectors.items():
            f.write(word + " " + " ".join(f"{x:.6f}" for x in v) + "\n")


if __name__ == "__main__":
    main()
