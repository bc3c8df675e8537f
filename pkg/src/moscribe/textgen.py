"""Template assembly, paragraph prompts, descriptive rewriting, validation,
and temporal augmentation of snippet descriptions.

A motion's snippet descriptions are templated as
"<Motionless> <SEP> ... <SEP> ...", where empty entries (no significant
movement) become the motionless token. Paragraph organization ships both
an LLM prompt (an embedded, versioned resource) and a deterministic
fallback that rewrites the imperative sentences into third person and
chains them with temporal connectives.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .describer import BODY_PART_TERMS, VERB_THIRD_PERSON
from .motion import MotionSequence, crop_frames
from .segmentation import SegmentationError, snippet_step

MOTIONLESS_TOKEN = "<Motionless>"
SEP_TOKEN = "<SEP>"
EMPTY_TOKEN = "<EMPTY>"

PROMPT_SLOT = "[BPMSDs]"

CONNECTIVE_CYCLE = ("Initially,", "Then,", "Afterward,", "Next,", "Subsequently,", "Finally,")
SUBJECT_CHOICES = ("The person", "The individual")


class TextAssemblyError(ValueError):
    pass


@dataclass(frozen=True)
class BPMSDList:
    """Ordered snippet descriptions of one motion; "" means no movement."""

    motion_id: str
    texts: tuple

    def __post_init__(self):
        object.__setattr__(self, "texts", tuple(self.texts))

    def __len__(self):
        return len(self.texts)

    def non_empty(self):
        return [(i, t) for i, t in enumerate(self.texts) if t]


@dataclass(frozen=True)
class BPMP:
    """One paragraph variant describing a whole motion."""

    motion_id: str
    text: str
    variant: int = 0

    def __post_init__(self):
        if not self.text:
            raise TextAssemblyError("paragraph must be non-empty")
        if re.search(r"(?m)^\s*\d+\.\s", self.text):
            raise TextAssemblyError("paragraph must not contain numbered-list markers")


@dataclass(frozen=True)
class ValidationReport:
    coverage: float
    missing_snippets: tuple
    extra_parts: tuple

    def ok(self, min_coverage=1.0):
        return self.coverage >= min_coverage and not self.extra_parts


def assemble_template(texts: BPMSDList) -> str:
    """Join snippet descriptions with the separator token, one entry per
    snippet, empties replaced by the motionless token."""
    if not texts.texts:
        raise TextAssemblyError("cannot assemble an empty description list")
    return f" {SEP_TOKEN} ".join(t if t else MOTIONLESS_TOKEN for t in texts.texts)


def parse_template(assembled: str):
    """Inverse of assemble_template for entries free of the special tokens."""
    return [
        "" if t == MOTIONLESS_TOKEN else t for t in assembled.split(f" {SEP_TOKEN} ")
    ]


def paragraph_prompt_template() -> str:
    return (
        resources.files("moscribe.resources")
        .joinpath("paragraph_prompt.txt")
        .read_text(encoding="utf-8")
    )


def numbered_items(texts: BPMSDList) -> str:
    """Non-empty entries as a numbered block, preserving temporal order."""
    items = [t for _, t in texts.non_empty()]
    if not items:
        raise TextAssemblyError("nothing to organize: all snippet descriptions are empty")
    return "\n".join(f"{n}. {t}" for n, t in enumerate(items, start=1))


def build_paragraph_prompt(texts: BPMSDList) -> str:
    """The paragraph-organization prompt with the numbered items filled in."""
    return paragraph_prompt_template().replace(PROMPT_SLOT, numbered_items(texts))


# ---------------------------------------------------------------------------
# Imperative -> descriptive rewriting
# ---------------------------------------------------------------------------


def _conjugate_clause(clause, verb_forms, require_verb):
    stripped = clause.lstrip()
    if not stripped:
        return clause, False
    head = stripped.split(None, 1)[0]
    bare = head.rstrip(".,;:").lower()
    if bare not in verb_forms:
        if require_verb:
            raise TextAssemblyError(
                f"cannot rewrite {clause!r}: leading word {head!r} is not a lexicon verb"
            )
        return clause, False
    lead = clause[: len(clause) - len(stripped)]
    rewritten = lead + stripped.replace(head, verb_forms[bare] + head[len(bare):], 1)
    return rewritten, True


def _to_predicate(sentence, possessive="his", verb_forms=VERB_THIRD_PERSON):
    clauses = sentence.split(" and ")
    out = []
    for k, clause in enumerate(clauses):
        rewritten, _ = _conjugate_clause(clause, verb_forms, require_verb=(k == 0))
        out.append(rewritten)
    text = " and ".join(out)
    text = re.sub(r"\byour\b", possessive, text)
    text = re.sub(r"\bYour\b", possessive.capitalize(), text)
    return text


def imperative_to_descriptive(sentence: str, subject: str, possessive="his") -> str:
    """Rewrite one lexicon imperative sentence as a descriptive statement.

    The subject is prepended, each clause-leading lexicon verb is
    conjugated to third person singular, and "your" becomes the
    possessive. Sentences outside the closed lexicon grammar are
    rejected.
    """
    if not sentence or not sentence.strip():
        raise TextAssemblyError("cannot rewrite an empty sentence")
    return f"{subject} {_to_predicate(sentence.strip(), possessive)}"


def split_sentences(text: str):
    """Split on sentence boundaries (period + space, or terminal period)."""
    return [s.strip() for s in re.split(r"(?<=\.)\s+", text.strip()) if s.strip()]


def _merge_predicates(predicates):
    stripped = [p.rstrip(".") for p in predicates]
    if len(stripped) == 1:
        merged = stripped[0]
    elif len(stripped) == 2:
        merged = f"{stripped[0]} and {stripped[1]}"
    else:
        merged = ", ".join(stripped[:-1]) + f", and {stripped[-1]}"
    return merged + "."


def fallback_paragraph(texts: BPMSDList, seed=0, variant=0, possessive="his",
                       pronoun="he") -> BPMP:
    """Deterministic paragraph from the snippet descriptions.

    Non-empty items are rewritten to third person, joined with the
    temporal connective cycle; the last item takes "Finally," whenever
    there are at least two. The opening subject is a seeded choice.
    """
    items = [t for _, t in texts.non_empty()]
    if not items:
        raise TextAssemblyError("nothing to organize: all snippet descriptions are empty")
    subject = SUBJECT_CHOICES[int(seed) % len(SUBJECT_CHOICES)]
    sentences = []
    for i, item in enumerate(items):
        if i == len(items) - 1 and len(items) >= 2:
            connective = "Finally,"
        else:
            connective = CONNECTIVE_CYCLE[i % len(CONNECTIVE_CYCLE)]
        actor = subject.lower() if i == 0 else pronoun
        predicates = [_to_predicate(s, possessive) for s in split_sentences(item)]
        sentences.append(f"{connective} {actor} {_merge_predicates(predicates)}")
    return BPMP(motion_id=texts.motion_id, text=" ".join(sentences), variant=variant)


# ---------------------------------------------------------------------------
# Paragraph validation
# ---------------------------------------------------------------------------

_IRREGULAR_SINGULAR = {"feet": "foot"}

_BASE_VOCAB = set(BODY_PART_TERMS) | set(VERB_THIRD_PERSON)


def _stem(token):
    token = token.lower().strip(".,;:!?\"'()")
    if token in _IRREGULAR_SINGULAR:
        return _IRREGULAR_SINGULAR[token]
    if token.endswith("es") and token[:-2] in _BASE_VOCAB:
        return token[:-2]
    if token.endswith("s") and len(token) > 2 and not token.endswith("ss"):
        return token[:-1]
    return token


def _tokens(text):
    return [t for t in re.split(r"[^A-Za-z]+", text) if t]


_PART_STEMS = {_stem(t) for t in BODY_PART_TERMS}


def _content_stems(snippet_text):
    """Stems of the lexicon content words (part nouns + clause verbs) in a
    snippet description."""
    stems = set()
    for sentence in split_sentences(snippet_text):
        for clause in sentence.split(" and "):
            words = _tokens(clause)
            if words and words[0].lower() in VERB_THIRD_PERSON:
                stems.add(_stem(words[0]))
        for token in _tokens(sentence):
            if _stem(token) in _PART_STEMS:
                stems.add(_stem(token))
    return stems


def validate_paragraph(paragraph: str, texts: BPMSDList) -> ValidationReport:
    """Check a paragraph covers every snippet and adds no foreign body part.

    Coverage counts non-empty snippets whose content-word stems (body
    part nouns plus movement verbs, imperative or third person) all
    appear in the paragraph. The check is exact over the closed lexicon;
    for free-text paragraphs it is advisory.
    """
    paragraph_stems = {_stem(t) for t in _tokens(paragraph)}
    non_empty = texts.non_empty()
    missing = []
    for i, text in non_empty:
        if not _content_stems(text) <= paragraph_stems:
            missing.append(i)
    coverage = 1.0 if not non_empty else (len(non_empty) - len(missing)) / len(non_empty)

    input_stems = set()
    for _, text in non_empty:
        input_stems |= {_stem(t) for t in _tokens(text)}
    extras = sorted(
        {
            token.lower().strip(".,;:!?\"'()")
            for token in _tokens(paragraph)
            if _stem(token) in _PART_STEMS and _stem(token) not in input_stems
        }
    )
    return ValidationReport(coverage, tuple(missing), tuple(extras))


# ---------------------------------------------------------------------------
# Temporal augmentation
# ---------------------------------------------------------------------------


def crop_to_snippets(motion: MotionSequence, texts: BPMSDList, start_snippet, end_snippet,
                     snippet_duration_s=0.5):
    """Deterministic crop to the snippet range [start, end)."""
    step = snippet_step(motion.fps, snippet_duration_s)
    n = int(np.ceil(len(motion.frames) / step))
    if len(texts.texts) != n:
        raise SegmentationError(
            f"description list ({len(texts.texts)}) does not match snippet count ({n})"
        )
    if not (0 <= start_snippet < end_snippet <= n):
        raise SegmentationError("snippet crop range out of bounds")
    clip = crop_frames(motion, start_snippet * step, min(end_snippet * step, len(motion.frames)))
    return clip, BPMSDList(texts.motion_id, texts.texts[start_snippet:end_snippet])


def temporal_augment(motion: MotionSequence, texts: BPMSDList, rng,
                     snippet_duration_s=0.5):
    """Random crop on snippet boundaries with the matching text slice.

    The clip keeps at least one snippet; a single-snippet motion is
    returned unchanged.
    """
    step = snippet_step(motion.fps, snippet_duration_s)
    n = int(np.ceil(len(motion.frames) / step))
    if len(texts.texts) != n:
        raise SegmentationError(
            f"description list ({len(texts.texts)}) does not match snippet count ({n})"
        )
    if n == 1:
        return motion, texts
    start = int(rng.integers(0, n))
    end = int(rng.integers(start + 1, n + 1))
    return crop_to_snippets(motion, texts, start, end, snippet_duration_s)
