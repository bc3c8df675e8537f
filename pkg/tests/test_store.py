import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from moscribe.fixtures import BPMP_000314, BPMSD_000314
from moscribe.store import (
    AnnotationRecord,
    AnnotationStore,
    Corpus,
    CorpusEntry,
    DatasetSplit,
    StoreError,
    build_corpus,
    dataset_stats,
    deserialize_annotations,
    dumps_annotations,
    load_split,
    loads_annotations,
    save_split,
    serialize_annotations,
    split_dataset,
    suggest_sentences,
)

RECORD_314 = AnnotationRecord("000314", BPMSD_000314, BPMP_000314)


# -- serialization ----------------------------------------------------------


def test_roundtrip_records():
    records = [
        RECORD_314,
        AnnotationRecord("000002", ("Turn to the left.", ""), ("He turns to the left.",)),
    ]
    bpmsd, bpmp = serialize_annotations(records)
    back = deserialize_annotations(bpmsd, bpmp)
    assert back == sorted(records, key=lambda r: r.motion_id)


def test_000314_fixture_shape():
    bpmsd, _ = serialize_annotations([RECORD_314])
    parsed = loads_annotations(bpmsd)
    values = parsed["000314"]
    assert len(values) == 8
    assert [i for i, t in enumerate(values) if t == ""] == [0, 2, 3, 5]
    assert values[1] == "Bend your elbows and raise your hands up to your head."


def test_wrong_value_type_names_key():
    with pytest.raises(StoreError, match='"000314"'):
        loads_annotations(json.dumps({"000314": 5}))
    with pytest.raises(StoreError, match=r'"000314"\[1\]'):
        loads_annotations(json.dumps({"000314": ["ok", 3]}))
    with pytest.raises(StoreError):
        loads_annotations(b"[1, 2]")
    with pytest.raises(StoreError):
        loads_annotations(b"{invalid")


def test_serialization_sorted_and_stable():
    records = [AnnotationRecord("b", ("x.",)), AnnotationRecord("a", ("y.",))]
    data, _ = serialize_annotations(records)
    assert list(loads_annotations(data)) == ["a", "b"]
    assert data == serialize_annotations(list(reversed(records)))[0]


@settings(max_examples=500, deadline=None)
@given(
    st.dictionaries(
        st.text(
            alphabet=st.characters(whitelist_categories=("L", "N")), min_size=1, max_size=8
        ),
        st.lists(st.text(max_size=30), max_size=6),
        max_size=6,
    )
)
def test_serialization_bijection_fuzz(mapping):
    assert loads_annotations(dumps_annotations(mapping)) == mapping


def test_empty_paragraph_variant_rejected():
    with pytest.raises(StoreError):
        AnnotationRecord("x", (), ("",))


def test_store_mutation_roundtrip(tmp_path):
    store = AnnotationStore(tmp_path)
    store.set_bpmsd("a", ["", "Turn to the left."])
    store.set_snippet_text("a", 0, "Raise your hands.")
    assert store.bpmsd()["a"] == ["Raise your hands.", "Turn to the left."]
    with pytest.raises(StoreError):
        store.set_snippet_text("a", 9, "x")
    with pytest.raises(StoreError):
        store.set_snippet_text("missing", 0, "x")


# -- splits -----------------------------------------------------------------


def test_split_100_ids():
    ids = [f"{k:06d}" for k in range(100)]
    split = split_dataset(ids, seed=1)
    assert (len(split.train), len(split.val), len(split.test)) == (80, 5, 15)


def test_split_deterministic():
    ids = [f"{k:06d}" for k in range(50)]
    assert split_dataset(ids, seed=9) == split_dataset(ids, seed=9)
    assert split_dataset(ids, seed=9) != split_dataset(ids, seed=10)


def test_split_union_disjoint_fuzz():
    rng = np.random.default_rng(123)
    for _ in range(1000):
        n = int(rng.integers(3, 200))
        ids = [f"id{k}" for k in range(n)]
        split = split_dataset(ids, seed=int(rng.integers(0, 1 << 31)))
        parts = [set(split.train), set(split.val), set(split.test)]
        assert parts[0] | parts[1] | parts[2] == set(ids)
        assert sum(len(p) for p in parts) == n
        for name, ratio in zip(("train", "val", "test"), (0.80, 0.05, 0.15)):
            assert abs(len(getattr(split, name)) - ratio * n) < 1.0


def test_split_rejects_bad_input():
    with pytest.raises(StoreError):
        split_dataset(["a", "b"])
    with pytest.raises(StoreError):
        split_dataset(["a", "b", "c"], ratios=(0.5, 0.5, 0.5))


def test_split_file_roundtrip(tmp_path):
    split = split_dataset([f"{k}" for k in range(20)], seed=3)
    save_split(split, tmp_path)
    assert load_split(tmp_path) == split
    assert (tmp_path / "train.txt").exists()


def test_split_overlap_rejected():
    with pytest.raises(StoreError):
        DatasetSplit(("a",), ("a",), ("b",))


# -- corpus -----------------------------------------------------------------


def test_corpus_dedupes_with_counts():
    records = [
        AnnotationRecord("a", ("Turn to the left.",)),
        AnnotationRecord("b", ("Turn to the left.", "Raise your hands.")),
    ]
    corpus = build_corpus(records)
    by_sentence = {e.sentence: e for e in corpus.entries}
    assert by_sentence["Turn to the left."].frequency == 2
    assert by_sentence["Raise your hands."].frequency == 1


def test_corpus_empty_dataset():
    assert len(build_corpus([])) == 0


def test_corpus_000314_fixture_tags():
    corpus = build_corpus([RECORD_314])
    assert len(corpus) == 4
    for entry in corpus.entries:
        assert set(entry.parts) & {"elbow", "hand", "body"}
    by_sentence = {e.sentence: e for e in corpus.entries}
    assert "body" in by_sentence["Turn your upper body to the right slightly."].parts


def test_corpus_frequency_sum():
    records = [RECORD_314, AnnotationRecord("x", BPMSD_000314)]
    corpus = build_corpus(records)
    from moscribe.textgen import split_sentences

    total = sum(len(split_sentences(t)) for r in records for t in r.bpmsd if t)
    assert sum(e.frequency for e in corpus.entries) == total


# -- suggestions ------------------------------------------------------------


def suggestion_corpus():
    return Corpus(
        (
            CorpusEntry("Lower your right hand.", 3, ("hand",)),
            CorpusEntry("Raise your left hand.", 5, ("hand",)),
            CorpusEntry("Raise your right hand slightly.", 1, ("hand",)),
            CorpusEntry("Turn to the left.", 9, ()),
        )
    )


def test_suggest_ranks_overlap_first():
    ranked = suggest_sentences(suggestion_corpus(), "raise right hand", 3)
    assert ranked[0][1].sentence == "Raise your right hand slightly."
    assert ranked[0][0] == 1.0


def test_suggest_no_overlap():
    assert suggest_sentences(suggestion_corpus(), "jump", 3) == []
    with_zero = suggest_sentences(suggestion_corpus(), "jump", 10, include_zero=True)
    assert len(with_zero) == 4


def test_suggest_k_larger_than_corpus():
    ranked = suggest_sentences(suggestion_corpus(), "hand", 100)
    assert len(ranked) == 3  # zero-score entries dropped


def test_suggest_total_order():
    corpus = suggestion_corpus()
    ranked = suggest_sentences(corpus, "raise hand", 4)
    keys = [(-s, -e.frequency, e.sentence) for s, e in ranked]
    assert keys == sorted(keys)
    assert len(set(keys)) == len(keys)


def test_suggest_rejects_empty_query():
    with pytest.raises(StoreError):
        suggest_sentences(suggestion_corpus(), "  ", 3)
    with pytest.raises(StoreError):
        suggest_sentences(suggestion_corpus(), "hand", 0)


# -- statistics -------------------------------------------------------------


def test_stats_single_text():
    stats = dataset_stats([AnnotationRecord("a", ("one two three four five six seven eight nine ten",))])
    assert stats.bpmsd.average_words == 10
    assert stats.bpmsd.median_words == 10
    assert stats.bpmsd.num_texts == 1


def test_stats_word_count_oracle():
    rng = np.random.default_rng(8)
    words = ["turn", "left", "right", "hand", "leg", "slightly"]
    records = []
    expected_counts = []
    for k in range(50):
        texts = []
        for _ in range(int(rng.integers(1, 4))):
            n = int(rng.integers(1, 12))
            texts.append(" ".join(words[int(rng.integers(0, len(words)))] for _ in range(n)))
            expected_counts.append(n)
        records.append(AnnotationRecord(f"m{k}", tuple(texts)))
    stats = dataset_stats(records)
    assert stats.bpmsd.average_words == pytest.approx(float(np.mean(expected_counts)))
    assert stats.bpmsd.median_words == pytest.approx(float(np.median(expected_counts)))
    assert stats.bpmsd.total_words == sum(expected_counts)


def test_stats_empty_snippets_excluded():
    stats = dataset_stats([AnnotationRecord("a", ("", "Turn to the left.", ""))])
    assert stats.bpmsd.num_texts == 1
    assert stats.bpmsd.average_words == 4


def test_stats_exports(tmp_path):
    stats = dataset_stats([RECORD_314])
    payload = json.loads(stats.to_json())
    assert payload["bpmp"]["num_texts"] == 3
    csv_text = stats.frequency_csv("bpmsd", top_n=5)
    assert csv_text.splitlines()[0] == "word,count"
    assert len(csv_text.splitlines()) <= 6
