"""Annotation persistence, dataset splits, sentence corpus, and statistics.

Annotations are flat JSON files keyed by motion id: a BPMSD file maps each
id to its ordered snippet descriptions (empties preserved), a BPMP file to
its paragraph variants. Files are UTF-8 with sorted keys, so reruns are
byte-identical.
"""

from __future__ import annotations

import csv
import io
import json
import re
import threading
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .describer import BODY_PART_TERMS
from .textgen import _stem, split_sentences


class StoreError(ValueError):
    pass


@dataclass(frozen=True)
class AnnotationRecord:
    motion_id: str
    bpmsd: tuple = ()
    bpmp: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "bpmsd", tuple(self.bpmsd))
        object.__setattr__(self, "bpmp", tuple(self.bpmp))
        if any(not p for p in self.bpmp):
            raise StoreError(f"{self.motion_id}: paragraph variants must be non-empty")


def _check_string_list(key, value):
    if not isinstance(value, list):
        raise StoreError(f'key "{key}": expected a list, got {type(value).__name__}')
    for i, item in enumerate(value):
        if not isinstance(item, str):
            raise StoreError(f'key "{key}"[{i}]: expected a string, got {type(item).__name__}')


def dumps_annotations(mapping) -> bytes:
    """Serialize {motion id -> list of strings} with sorted keys."""
    return json.dumps(dict(mapping), sort_keys=True, indent=2, ensure_ascii=False).encode("utf-8")


def loads_annotations(data) -> dict:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        raw = json.loads(data)
    except json.JSONDecodeError as exc:
        raise StoreError(f"malformed annotation JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise StoreError("annotation file must contain a JSON object")
    for key, value in raw.items():
        _check_string_list(key, value)
    return {key: list(value) for key, value in raw.items()}


def serialize_annotations(records) -> tuple:
    """Records -> (BPMSD file bytes, BPMP file bytes)."""
    bpmsd = {r.motion_id: list(r.bpmsd) for r in records}
    bpmp = {r.motion_id: list(r.bpmp) for r in records}
    return dumps_annotations(bpmsd), dumps_annotations(bpmp)


def deserialize_annotations(bpmsd_data, bpmp_data=None) -> list:
    """(BPMSD file bytes, optional BPMP file bytes) -> records."""
    bpmsd = loads_annotations(bpmsd_data)
    bpmp = loads_annotations(bpmp_data) if bpmp_data is not None else {}
    ids = sorted(set(bpmsd) | set(bpmp))
    return [
        AnnotationRecord(i, tuple(bpmsd.get(i, ())), tuple(bpmp.get(i, ()))) for i in ids
    ]


class AnnotationStore:
    """Flat-file annotation repository with single-writer exclusion.

    Reads are unrestricted; every mutation takes the store lock and
    rewrites the backing file.
    """

    def __init__(self, directory, name="all"):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self.bpmsd_path = self.directory / f"{name}.bpmsd.json"
        self.bpmp_path = self.directory / f"{name}.bpmp.json"
        self._lock = threading.Lock()

    def _read(self, path):
        if not path.exists():
            return {}
        return loads_annotations(path.read_bytes())

    def bpmsd(self):
        return self._read(self.bpmsd_path)

    def bpmp(self):
        return self._read(self.bpmp_path)

    def records(self):
        bpmsd, bpmp = self.bpmsd(), self.bpmp()
        ids = sorted(set(bpmsd) | set(bpmp))
        return [AnnotationRecord(i, tuple(bpmsd.get(i, ())), tuple(bpmp.get(i, ()))) for i in ids]

    def set_bpmsd(self, motion_id, texts):
        with self._lock:
            data = self._read(self.bpmsd_path)
            data[motion_id] = list(texts)
            self.bpmsd_path.write_bytes(dumps_annotations(data))

    def set_snippet_text(self, motion_id, index, text):
        with self._lock:
            data = self._read(self.bpmsd_path)
            if motion_id not in data:
                raise StoreError(f'key "{motion_id}": no annotations stored')
            if not 0 <= index < len(data[motion_id]):
                raise StoreError(f'key "{motion_id}": snippet index {index} out of range')
            data[motion_id][index] = text
            self.bpmsd_path.write_bytes(dumps_annotations(data))

    def set_bpmp(self, motion_id, paragraphs):
        with self._lock:
            data = self._read(self.bpmp_path)
            data[motion_id] = list(paragraphs)
            self.bpmp_path.write_bytes(dumps_annotations(data))


# ---------------------------------------------------------------------------
# Dataset splits
# ---------------------------------------------------------------------------

DEFAULT_SPLIT_RATIOS = (0.80, 0.05, 0.15)
SPLIT_NAMES = ("train", "val", "test")


@dataclass(frozen=True)
class DatasetSplit:
    train: tuple
    val: tuple
    test: tuple

    def __post_init__(self):
        sets = [set(self.train), set(self.val), set(self.test)]
        if sets[0] & sets[1] or sets[0] & sets[2] or sets[1] & sets[2]:
            raise StoreError("split subsets must be pairwise disjoint")

    def as_dict(self):
        return {"train": list(self.train), "val": list(self.val), "test": list(self.test)}


def _largest_remainder_sizes(n, ratios):
    exact = [r * n for r in ratios]
    sizes = [int(np.floor(e)) for e in exact]
    remainders = [e - s for e, s in zip(exact, sizes)]
    for _ in range(n - sum(sizes)):
        i = max(range(len(ratios)), key=lambda k: (remainders[k], -k))
        sizes[i] += 1
        remainders[i] = -1.0
    return sizes


def split_dataset(ids, ratios=DEFAULT_SPLIT_RATIOS, seed=0) -> DatasetSplit:
    """Seeded shuffle then prefix partition into train/val/test.

    Sizes follow the ratios by largest remainder, so each split is within
    one item of its exact share; ties go to the earlier split.
    """
    ids = list(ids)
    if len(ids) < 3:
        raise StoreError("need at least 3 ids to split")
    if len(ratios) != 3 or any(r <= 0 for r in ratios) or abs(sum(ratios) - 1.0) > 1e-9:
        raise StoreError("ratios must be three positive numbers summing to 1")
    order = np.random.default_rng(seed).permutation(len(ids))
    shuffled = [ids[i] for i in order]
    n_train, n_val, _ = _largest_remainder_sizes(len(ids), ratios)
    return DatasetSplit(
        tuple(shuffled[:n_train]),
        tuple(shuffled[n_train : n_train + n_val]),
        tuple(shuffled[n_train + n_val :]),
    )


def save_split(split: DatasetSplit, directory):
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for name in SPLIT_NAMES:
        ids = getattr(split, name)
        (directory / f"{name}.txt").write_text(
            "".join(f"{i}\n" for i in ids), encoding="utf-8"
        )


def load_split(directory) -> DatasetSplit:
    directory = Path(directory)
    parts = []
    for name in SPLIT_NAMES:
        path = directory / f"{name}.txt"
        if not path.exists():
            raise StoreError(f"missing split file {path}")
        parts.append(tuple(line for line in path.read_text(encoding="utf-8").splitlines() if line))
    return DatasetSplit(*parts)


# ---------------------------------------------------------------------------
# Sentence corpus
# ---------------------------------------------------------------------------

_PART_STEMS = {_stem(t) for t in BODY_PART_TERMS}


@dataclass(frozen=True)
class CorpusEntry:
    sentence: str
    frequency: int
    parts: tuple


@dataclass(frozen=True)
class Corpus:
    entries: tuple

    def __len__(self):
        return len(self.entries)


def _sentence_parts(sentence):
    found = set()
    for token in re.split(r"[^A-Za-z]+", sentence):
        if token and _stem(token) in _PART_STEMS:
            found.add(_stem(token))
    return tuple(sorted(found))


def build_corpus(records) -> Corpus:
    """All distinct description sentences with frequencies and part tags."""
    counts = Counter()
    for record in records:
        for text in record.bpmsd:
            if text:
                counts.update(split_sentences(text))
    entries = [
        CorpusEntry(sentence, counts[sentence], _sentence_parts(sentence))
        for sentence in sorted(counts)
    ]
    return Corpus(tuple(entries))


def _query_tokens(text):
    return {t.lower() for t in re.split(r"[^A-Za-z]+", text) if t}


def suggest_sentences(corpus: Corpus, query: str, k: int, include_zero=False):
    """Rank corpus sentences by query-token overlap.

    Score is |query tokens in the sentence| / |query tokens|; ties break
    by frequency (descending) then sentence text. Zero-score sentences
    are dropped unless include_zero is set.
    """
    if k < 1:
        raise StoreError("k must be at least 1")
    q = _query_tokens(query)
    if not q:
        raise StoreError("query must contain at least one word")
    scored = []
    for entry in corpus.entries:
        tokens = _query_tokens(entry.sentence)
        score = len(q & tokens) / len(q)
        if score > 0.0 or include_zero:
            scored.append((score, entry))
    scored.sort(key=lambda pair: (-pair[0], -pair[1].frequency, pair[1].sentence))
    return scored[:k]


# ---------------------------------------------------------------------------
# Statistics
# ---------------------------------------------------------------------------


def _word_count(text):
    return len(text.split())


def _normalize_word(token):
    return token.strip(".,;:!?\"'()").lower()


@dataclass(frozen=True)
class PopulationStats:
    num_texts: int
    total_words: int
    average_words: float
    median_words: float
    word_frequencies: dict = field(default_factory=dict)

    def top_words(self, n=200):
        return sorted(self.word_frequencies.items(), key=lambda kv: (-kv[1], kv[0]))[:n]


@dataclass(frozen=True)
class DatasetStats:
    bpmsd: PopulationStats
    bpmp: PopulationStats

    def to_json(self, top_n=200):
        def pop(p):
            return {
                "num_texts": p.num_texts,
                "total_words": p.total_words,
                "average_words": p.average_words,
                "median_words": p.median_words,
                "top_words": [[w, c] for w, c in p.top_words(top_n)],
            }

        return json.dumps({"bpmsd": pop(self.bpmsd), "bpmp": pop(self.bpmp)}, indent=2)

    def frequency_csv(self, population="bpmsd", top_n=200):
        stats = getattr(self, population)
        out = io.StringIO()
        writer = csv.writer(out)
        writer.writerow(["word", "count"])
        for word, count in stats.top_words(top_n):
            writer.writerow([word, count])
        return out.getvalue()


def _population_stats(texts):
    counts = [_word_count(t) for t in texts]
    freq = Counter()
    for t in texts:
        freq.update(w for w in (_normalize_word(tok) for tok in t.split()) if w)
    if not counts:
        return PopulationStats(0, 0, 0.0, 0.0, {})
    return PopulationStats(
        num_texts=len(counts),
        total_words=int(np.sum(counts)),
        average_words=float(np.mean(counts)),
        median_words=float(np.median(counts)),
        word_frequencies=dict(freq),
    )


def dataset_stats(records) -> DatasetStats:
    """Word statistics of the snippet-description and paragraph populations.

    Empty snippet descriptions are placeholders, not texts, and are
    excluded.
    """
    bpmsd_texts = [t for r in records for t in r.bpmsd if t]
    bpmp_texts = [t for r in records for t in r.bpmp]
    return DatasetStats(_population_stats(bpmsd_texts), _population_stats(bpmp_texts))
