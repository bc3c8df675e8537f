"""End-to-end pipelines: dataset construction and the editing loop.

Construction (per motion): canonicalize, resample to 20 fps, cap at 10
seconds with a seeded random crop, segment into snippets, describe each
snippet, organize paragraph variants, then write per-split annotation
files, split id lists, and statistics.

Editing: generate an initial motion from the coarse caption alone,
extract its snippet descriptions through the construction pipeline, apply
the requested text edits, and regenerate from scratch conditioned on the
coarse caption plus the edited template.
"""

from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .describer import DEFAULT_LEXICON, DEFAULT_THRESHOLDS, ThresholdTable, load_config
from .describer import describe_snippet
from .features import EVAL_FPS
from .motion import MotionSequence, canonicalize, crop_frames, is_canonical, resample
from .motion_io import load_motion, save_motion
from .segmentation import segment
from .skeleton import Skeleton
from .store import (
    AnnotationRecord,
    DEFAULT_SPLIT_RATIOS,
    dataset_stats,
    dumps_annotations,
    save_split,
    split_dataset,
)
from .textgen import (
    BPMP,
    BPMSDList,
    EMPTY_TOKEN,
    TextAssemblyError,
    assemble_template,
    build_paragraph_prompt,
    fallback_paragraph,
    validate_paragraph,
)

logger = logging.getLogger("moscribe.pipeline")

MAX_MOTION_SECONDS = 10.0

PARAGRAPH_MODES = ("llm", "fallback", "llm-with-fallback")


class PipelineError(RuntimeError):
    pass


@dataclass(frozen=True)
class PipelineConfig:
    input_dir: str
    output_dir: str
    snippet_duration_s: float = 0.5
    threshold_path: str | None = None
    paragraph_mode: str = "fallback"
    variants: int = 3
    split_seed: int = 0
    crop_seed: int = 0
    split_ratios: tuple = DEFAULT_SPLIT_RATIOS

    def __post_init__(self):
        if self.snippet_duration_s <= 0:
            raise PipelineError("snippet duration must be positive")
        if self.variants < 1:
            raise PipelineError("variants must be at least 1")
        if self.paragraph_mode not in PARAGRAPH_MODES:
            raise PipelineError(f"paragraph mode must be one of {PARAGRAPH_MODES}")

    @staticmethod
    def from_json(path):
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
        if "split_ratios" in raw:
            raw["split_ratios"] = tuple(raw["split_ratios"])
        return PipelineConfig(**raw)


@dataclass(frozen=True)
class GeneratorRequest:
    coarse_text: str
    detailed_text: str | None = None
    target_length: int | None = None

    def __post_init__(self):
        if not self.coarse_text:
            raise PipelineError("coarse text must be non-empty")


@dataclass(frozen=True)
class EditRequest:
    coarse_text: str
    edits: tuple = ()
    backend_id: str = "stub"
    target_length: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "edits", tuple((int(i), t) for i, t in self.edits))
        indices = [i for i, _ in self.edits]
        if len(set(indices)) != len(indices):
            raise PipelineError("edit snippet indices must be unique")
        if any(i < 0 for i in indices):
            raise PipelineError("edit snippet indices must be non-negative")


def preprocess_motion(motion: MotionSequence, skeleton: Skeleton, rng=None) -> MotionSequence:
    """Canonicalize, resample to 20 fps, and cap length at 10 seconds."""
    motion = resample(canonicalize(motion, skeleton), EVAL_FPS)
    max_frames = int(MAX_MOTION_SECONDS * EVAL_FPS)
    if len(motion.frames) > max_frames:
        rng = rng or np.random.default_rng(0)
        start = int(rng.integers(0, len(motion.frames) - max_frames + 1))
        motion = canonicalize(crop_frames(motion, start, start + max_frames), skeleton)
    return motion


def describe_motion(motion: MotionSequence, skeleton: Skeleton,
                    thresholds: ThresholdTable = DEFAULT_THRESHOLDS,
                    lexicon=DEFAULT_LEXICON, snippet_duration_s=0.5) -> BPMSDList:
    """Segment a motion and describe every snippet."""
    snippets = segment(motion, snippet_duration_s)
    texts = [describe_snippet(s, skeleton, thresholds, lexicon) for s in snippets]
    return BPMSDList(motion.id, texts)


class ParagraphError(PipelineError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


def organize_paragraph(texts: BPMSDList, mode="fallback", client=None, variant=0, seed=0,
                       min_coverage=0.9, max_attempts=3, backoff_s=0.5) -> BPMP:
    """Produce one paragraph variant for a motion's snippet descriptions.

    llm mode sends the organization prompt to the completion client (up
    to max_attempts with exponential backoff) and accepts the reply only
    if it covers at least min_coverage of the snippets and adds no
    foreign body part. llm-with-fallback degrades to the deterministic
    paragraph when every attempt is rejected; fallback skips the client
    entirely.
    """
    if mode not in PARAGRAPH_MODES:
        raise PipelineError(f"unknown paragraph mode {mode!r}")
    if mode == "fallback":
        return fallback_paragraph(texts, seed=seed, variant=variant)
    if client is None:
        raise PipelineError("llm paragraph modes require a completion client")
    prompt = build_paragraph_prompt(texts)
    last_report = None
    last_error = None
    for attempt in range(max_attempts):
        if attempt and backoff_s:
            time.sleep(backoff_s * 2 ** (attempt - 1))
        try:
            candidate = client.complete(prompt).strip()
        except Exception as exc:
            last_error = exc
            logger.warning("paragraph attempt %d failed: %s", attempt + 1, exc)
            continue
        report = validate_paragraph(candidate, texts)
        if report.coverage >= min_coverage and not report.extra_parts:
            try:
                return BPMP(texts.motion_id, candidate, variant)
            except TextAssemblyError as exc:
                last_error = exc
                continue
        last_report = report
        logger.warning(
            "paragraph attempt %d rejected: coverage=%.2f extras=%s",
            attempt + 1,
            report.coverage,
            list(report.extra_parts),
        )
    if mode == "llm-with-fallback":
        return fallback_paragraph(texts, seed=seed, variant=variant)
    raise ParagraphError(
        f"no valid paragraph for {texts.motion_id} after {max_attempts} attempts"
        + (f" (last error: {last_error})" if last_error else ""),
        report=last_report,
    )


def generate_motion(request: GeneratorRequest, backend, skeleton: Skeleton) -> MotionSequence:
    """Ask a backend for a canonical 20-fps motion.

    An omitted detailed text is sent as the empty-detail token so the
    backend sees the coarse-only conditioning explicitly. Output already
    at 20 fps and within canonical tolerance passes through untouched.
    """
    detail = request.detailed_text if request.detailed_text else EMPTY_TOKEN
    motion = backend.generate(request.coarse_text, detail, request.target_length)
    motion.validate()
    if abs(motion.fps - EVAL_FPS) > 1e-9:
        motion = resample(motion, EVAL_FPS)
    if not is_canonical(motion, skeleton):
        motion = canonicalize(motion, skeleton)
    return motion


@dataclass(frozen=True)
class EditResult:
    initial: MotionSequence
    edited: MotionSequence
    texts_before: BPMSDList
    texts_after: BPMSDList


def edit_motion(request: EditRequest, backend, skeleton: Skeleton, initial=None,
                snippet_duration_s=0.5, thresholds=DEFAULT_THRESHOLDS) -> EditResult:
    """Run the zero-shot editing loop.

    Steps: generate the initial motion from the coarse caption alone
    (skipped when one is supplied), describe its snippets, apply the
    index edits, template the edited descriptions, and regenerate from
    scratch with both conditioning texts. Out-of-range indices fail
    before the regeneration call; negative or duplicate ones before any
    call.
    """
    if initial is None:
        initial = generate_motion(
            GeneratorRequest(request.coarse_text, None, request.target_length),
            backend,
            skeleton,
        )
    texts_before = describe_motion(
        initial, skeleton, thresholds, snippet_duration_s=snippet_duration_s
    )
    edited = list(texts_before.texts)
    for index, text in request.edits:
        if index >= len(edited):
            raise PipelineError(
                f"edit index {index} out of range for {len(edited)} snippets"
            )
        edited[index] = text
    texts_after = BPMSDList(texts_before.motion_id, edited)
    target = request.target_length if request.target_length else len(initial.frames)
    edited_motion = generate_motion(
        GeneratorRequest(request.coarse_text, assemble_template(texts_after), target),
        backend,
        skeleton,
    )
    return EditResult(initial, edited_motion, texts_before, texts_after)


@dataclass
class PipelineResult:
    output_dir: Path
    processed_ids: list
    skipped: dict
    counts: dict = field(default_factory=dict)


def run_pipeline(config: PipelineConfig, client=None) -> PipelineResult:
    """Build the dataset artifacts for every motion file in the input dir."""
    input_dir = Path(config.input_dir)
    output_dir = Path(config.output_dir)
    (output_dir / "motions").mkdir(parents=True, exist_ok=True)
    motion_paths = sorted(input_dir.glob("*.mofg"))
    if not motion_paths:
        raise PipelineError(f"no motion files found in {input_dir}")

    thresholds = DEFAULT_THRESHOLDS
    lexicon = DEFAULT_LEXICON
    if config.threshold_path:
        thresholds, lexicon = load_config(config.threshold_path)

    processed = {}
    skipped = {}
    counts = {"motions_in": len(motion_paths), "snippets": 0, "paragraphs": 0}
    for idx, path in enumerate(motion_paths):
        try:
            motion, skeleton = load_motion(path)
            motion = preprocess_motion(
                motion, skeleton, np.random.default_rng([config.crop_seed, idx])
            )
            texts = describe_motion(
                motion, skeleton, thresholds, lexicon, config.snippet_duration_s
            )
            paragraphs = []
            if texts.non_empty():
                for variant in range(config.variants):
                    paragraphs.append(
                        organize_paragraph(
                            texts,
                            mode=config.paragraph_mode,
                            client=client,
                            variant=variant,
                            seed=variant,
                        ).text
                    )
            save_motion(output_dir / "motions" / path.name, motion, skeleton)
            processed[motion.id] = AnnotationRecord(motion.id, texts.texts, tuple(paragraphs))
            counts["snippets"] += len(texts.texts)
            counts["paragraphs"] += len(paragraphs)
        except Exception as exc:
            logger.warning("skipping %s: %s", path.name, exc)
            skipped[path.name] = str(exc)
    if not processed:
        raise PipelineError("every input motion failed preprocessing")

    split = split_dataset(sorted(processed), config.split_ratios, config.split_seed)
    save_split(split, output_dir)
    for name in ("train", "val", "test"):
        ids = getattr(split, name)
        bpmsd = {i: list(processed[i].bpmsd) for i in ids}
        bpmp = {i: list(processed[i].bpmp) for i in ids}
        (output_dir / f"{name}.bpmsd.json").write_bytes(dumps_annotations(bpmsd))
        (output_dir / f"{name}.bpmp.json").write_bytes(dumps_annotations(bpmp))

    stats = dataset_stats(list(processed.values()))
    (output_dir / "stats.json").write_text(stats.to_json(), encoding="utf-8")
    (output_dir / "word_freq.csv").write_text(stats.frequency_csv(), encoding="utf-8")
    counts["motions_out"] = len(processed)
    (output_dir / "pipeline_log.json").write_text(
        json.dumps({"counts": counts, "skipped": skipped}, indent=2), encoding="utf-8"
    )
    return PipelineResult(output_dir, sorted(processed), skipped, counts)
