"""Command-line interface.

Subcommands: ingest, segment, describe, assemble, paragraph, augment,
split, stats, eval, edit, serve. Report paths write figures next to their
delimited outputs.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .describer import DEFAULT_LEXICON, DEFAULT_THRESHOLDS, load_config
from .motion_io import load_matrix, load_motion, save_motion
from .pipeline import (
    EditRequest,
    PipelineConfig,
    describe_motion,
    edit_motion,
    organize_paragraph,
    preprocess_motion,
    run_pipeline,
)
from .segmentation import (
    DEFAULT_DURATION_GRID,
    duration_similarity_profile,
    segment,
    select_duration,
)
from .skeleton import Skeleton
from .store import (
    DEFAULT_SPLIT_RATIOS,
    dataset_stats,
    deserialize_annotations,
    dumps_annotations,
    loads_annotations,
    save_split,
    split_dataset,
)
from .textgen import BPMSDList, assemble_template, temporal_augment


def _load_motions(directory):
    paths = sorted(Path(directory).glob("*.mofg"))
    if not paths:
        raise SystemExit(f"no .mofg motion files in {directory}")
    return [load_motion(p) for p in paths]


def _thresholds(args):
    if getattr(args, "config", None):
        return load_config(args.config)
    return DEFAULT_THRESHOLDS, DEFAULT_LEXICON


def cmd_ingest(args):
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(args.seed)
    for motion, skeleton in _load_motions(args.input):
        processed = preprocess_motion(motion, skeleton, rng)
        save_motion(out / f"{motion.id}.mofg", processed, skeleton)
        print(f"{motion.id}: {len(motion.frames)} -> {len(processed.frames)} frames @ 20 fps")


def cmd_segment(args):
    motions = _load_motions(args.input)
    if args.profile:
        profile = duration_similarity_profile(
            [m for m, _ in motions],
            motions[0][1],
            durations=args.durations,
            samples_per_duration=args.samples,
            seed=args.seed,
        )
        out = Path(args.output)
        out.mkdir(parents=True, exist_ok=True)
        (out / "duration_profile.csv").write_text(profile.to_csv(), encoding="utf-8")
        from .plotting import save_profile_figure

        save_profile_figure(profile, out / "duration_profile.png")
        chosen = select_duration(profile, cap_s=args.cap)
        (out / "selected_duration.json").write_text(
            json.dumps({"selected_duration_s": chosen, "cap_s": args.cap}), encoding="utf-8"
        )
        print(f"selected snippet duration: {chosen} s (cap {args.cap} s)")
        print(f"wrote {out / 'duration_profile.csv'} and {out / 'duration_profile.png'}")
        return
    ranges = {}
    for motion, _ in motions:
        snippets = segment(motion, args.duration)
        ranges[motion.id] = [[s.frame_range[0], s.frame_range[1]] for s in snippets]
        print(f"{motion.id}: {len(snippets)} snippets")
    Path(args.output).write_text(json.dumps(ranges, indent=2, sort_keys=True), encoding="utf-8")


def cmd_describe(args):
    thresholds, lexicon = _thresholds(args)
    out = {}
    for motion, skeleton in _load_motions(args.input):
        texts = describe_motion(motion, skeleton, thresholds, lexicon, args.duration)
        out[motion.id] = list(texts.texts)
        print(f"{motion.id}: {sum(1 for t in texts.texts if t)}/{len(texts.texts)} non-empty")
    Path(args.output).write_bytes(dumps_annotations(out))


def cmd_assemble(args):
    annotations = loads_annotations(Path(args.bpmsd).read_bytes())
    templated = {
        motion_id: assemble_template(BPMSDList(motion_id, texts))
        for motion_id, texts in sorted(annotations.items())
    }
    Path(args.output).write_text(
        json.dumps(templated, indent=2, sort_keys=True, ensure_ascii=False), encoding="utf-8"
    )
    print(f"templated {len(templated)} motions -> {args.output}")


def cmd_paragraph(args):
    annotations = loads_annotations(Path(args.bpmsd).read_bytes())
    client = None
    if args.mode in ("llm", "llm-with-fallback"):
        from .clients import HttpCompletionClient

        client = HttpCompletionClient()
    out = {}
    for motion_id, texts in sorted(annotations.items()):
        bpmsd = BPMSDList(motion_id, texts)
        if not bpmsd.non_empty():
            out[motion_id] = []
            continue
        out[motion_id] = [
            organize_paragraph(bpmsd, mode=args.mode, client=client, variant=v, seed=v).text
            for v in range(args.variants)
        ]
    Path(args.output).write_bytes(dumps_annotations(out))
    print(f"wrote {sum(len(v) for v in out.values())} paragraphs -> {args.output}")


def cmd_augment(args):
    annotations = loads_annotations(Path(args.bpmsd).read_bytes())
    out_dir = Path(args.output)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(args.seed)
    augmented = {}
    for motion, skeleton in _load_motions(args.input):
        if motion.id not in annotations:
            continue
        texts = BPMSDList(motion.id, annotations[motion.id])
        for k in range(args.count):
            clip, clip_texts = temporal_augment(motion, texts, rng, args.duration)
            clip_id = f"{motion.id}_aug{k}"
            save_motion(out_dir / f"{clip_id}.mofg", clip.with_frames(clip.frames, id=clip_id),
                        skeleton)
            augmented[clip_id] = list(clip_texts.texts)
    (out_dir / "augmented.bpmsd.json").write_bytes(dumps_annotations(augmented))
    print(f"wrote {len(augmented)} augmented clips -> {out_dir}")


def cmd_split(args):
    ids = [line for line in Path(args.ids).read_text(encoding="utf-8").splitlines() if line]
    split = split_dataset(ids, tuple(args.ratios), args.seed)
    save_split(split, args.output)
    print(
        f"train/val/test = {len(split.train)}/{len(split.val)}/{len(split.test)} -> {args.output}"
    )


def cmd_stats(args):
    bpmsd = Path(args.bpmsd).read_bytes() if args.bpmsd else None
    bpmp = Path(args.bpmp).read_bytes() if args.bpmp else None
    records = deserialize_annotations(bpmsd if bpmsd else b"{}", bpmp)
    stats = dataset_stats(records)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    (out / "stats.json").write_text(stats.to_json(), encoding="utf-8")
    (out / "word_freq.csv").write_text(stats.frequency_csv("bpmsd"), encoding="utf-8")
    from .plotting import save_word_frequency_figure

    save_word_frequency_figure(stats, out / "word_freq.png", "bpmsd")
    if bpmp:
        (out / "word_freq_bpmp.csv").write_text(stats.frequency_csv("bpmp"), encoding="utf-8")
        save_word_frequency_figure(stats, out / "word_freq_bpmp.png", "bpmp")
    print(f"bpmsd: avg {stats.bpmsd.average_words:.1f} words, median {stats.bpmsd.median_words:.1f}")
    print(f"wrote stats.json, word_freq.csv, word_freq.png -> {out}")


def cmd_eval(args):
    from .metrics import (
        MetricReport,
        diversity,
        gaussian_fit,
        frechet_distance,
        mm_dist,
        r_precision,
        repeat_with_ci,
    )

    text = load_matrix(args.text) if args.text else None
    motion = load_matrix(args.motion)
    reference = load_matrix(args.reference) if args.reference else None
    entries = {}
    reps = args.repetitions
    if reference is not None:
        entries["FID"] = repeat_with_ci(
            lambda rng: frechet_distance(
                gaussian_fit(motion[rng.choice(len(motion), size=len(motion))]),
                gaussian_fit(reference),
            ),
            repetitions=reps,
            seed=args.seed,
        )
    if text is not None:
        for k in range(3):
            entries[f"R-Top{k + 1}"] = repeat_with_ci(
                lambda rng, k=k: r_precision(
                    text, motion, seed=int(rng.integers(0, 2**32))
                )[k],
                repetitions=reps,
                seed=args.seed,
            )
        entries["MM-Dist"] = repeat_with_ci(
            lambda rng: mm_dist(text, motion), repetitions=reps, seed=args.seed
        )
    entries["Diversity"] = repeat_with_ci(
        lambda rng: diversity(
            motion,
            n_pairs=min(args.diversity_pairs, len(motion) // 2),
            seed=int(rng.integers(0, 2**32)),
        ),
        repetitions=reps,
        seed=args.seed,
    )
    report = MetricReport(entries)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(report.to_json(), encoding="utf-8")
    (out / "report.txt").write_text(report.to_table(), encoding="utf-8")
    from .plotting import save_metric_report_figure

    save_metric_report_figure(report, out / "report.png")
    print(report.to_table())
    print(f"wrote report.json, report.txt, report.png -> {out}")


def cmd_edit(args):
    from .clients import HttpT2MBackend, StubT2MBackend, load_stub_fixtures

    if args.backend == "stub":
        backend = StubT2MBackend(load_stub_fixtures(Path(args.workspace) / "stub_fixtures.json"))
    else:
        backend = HttpT2MBackend()
    request = EditRequest(
        coarse_text=args.coarse,
        edits=tuple((int(i), t) for i, t in (e.split("=", 1) for e in args.set)),
        backend_id=args.backend,
    )
    skeleton = Skeleton()
    result = edit_motion(request, backend, skeleton)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    save_motion(out / "initial.mofg", result.initial, skeleton)
    save_motion(out / "edited.mofg", result.edited, skeleton)
    (out / "texts.json").write_text(
        json.dumps(
            {
                "before": list(result.texts_before.texts),
                "after": list(result.texts_after.texts),
            },
            indent=2,
        ),
        encoding="utf-8",
    )
    print(f"initial {len(result.initial.frames)} frames, edited {len(result.edited.frames)} frames")


def cmd_serve(args):
    from .service import serve

    serve(args.workspace, host=args.host, port=args.port)


def cmd_pipeline(args):
    if args.config:
        config = PipelineConfig.from_json(args.config)
    else:
        config = PipelineConfig(input_dir=args.input, output_dir=args.output,
                                paragraph_mode=args.mode, variants=args.variants,
                                split_seed=args.seed)
    client = None
    if config.paragraph_mode in ("llm", "llm-with-fallback"):
        from .clients import HttpCompletionClient

        client = HttpCompletionClient()
    result = run_pipeline(config, client=client)
    print(json.dumps(result.counts, indent=2))


def build_parser():
    parser = argparse.ArgumentParser(prog="moscribe")
    parser.add_argument("--config", help="JSON config file (thresholds/lexicon or pipeline)")
    parser.add_argument("--seed", type=int, default=0, help="seed for randomized stages")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="canonicalize, resample to 20 fps, cap at 10 s")
    p.add_argument("input")
    p.add_argument("output")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("segment", help="snippet ranges, or the duration-selection profile")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--duration", type=float, default=0.5)
    p.add_argument("--profile", action="store_true", help="compute the similarity profile")
    p.add_argument("--durations", type=float, nargs="+", default=list(DEFAULT_DURATION_GRID))
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--cap", type=float, default=0.5)
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("describe", help="generate snippet descriptions for every motion")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--duration", type=float, default=0.5)
    p.set_defaults(func=cmd_describe)

    p = sub.add_parser("assemble", help="template descriptions with the special tokens")
    p.add_argument("bpmsd")
    p.add_argument("output")
    p.set_defaults(func=cmd_assemble)

    p = sub.add_parser("paragraph", help="organize snippet descriptions into paragraphs")
    p.add_argument("bpmsd")
    p.add_argument("output")
    p.add_argument("--mode", choices=("llm", "fallback", "llm-with-fallback"),
                   default="fallback")
    p.add_argument("--variants", type=int, default=3)
    p.set_defaults(func=cmd_paragraph)

    p = sub.add_parser("augment", help="random snippet-aligned crops with sliced texts")
    p.add_argument("input")
    p.add_argument("bpmsd")
    p.add_argument("output")
    p.add_argument("--count", type=int, default=5)
    p.add_argument("--duration", type=float, default=0.5)
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("split", help="seeded train/val/test partition of an id list")
    p.add_argument("ids")
    p.add_argument("output")
    p.add_argument("--ratios", type=float, nargs=3, default=list(DEFAULT_SPLIT_RATIOS))
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("stats", help="word statistics, frequency table, and figure")
    p.add_argument("--bpmsd")
    p.add_argument("--bpmp")
    p.add_argument("output")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("eval", help="metric report over embedding files")
    p.add_argument("--motion", required=True, help="motion embedding .memb file")
    p.add_argument("--text", help="paired text embedding .memb file")
    p.add_argument("--reference", help="reference motion embedding .memb file")
    p.add_argument("--repetitions", type=int, default=20)
    p.add_argument("--diversity-pairs", type=int, default=300)
    p.add_argument("output")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("edit", help="run the zero-shot editing loop")
    p.add_argument("--coarse", required=True)
    p.add_argument("--set", action="append", default=[],
                   metavar="INDEX=TEXT", help="replace a snippet description")
    p.add_argument("--backend", default="stub", choices=("stub", "http"))
    p.add_argument("--workspace", default=".")
    p.add_argument("output")
    p.set_defaults(func=cmd_edit)

    p = sub.add_parser("serve", help="run the annotation/editing HTTP service")
    p.add_argument("workspace")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8777)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("pipeline", help="run the full dataset-construction pipeline")
    p.add_argument("--input")
    p.add_argument("--output")
    p.add_argument("--mode", choices=("llm", "fallback", "llm-with-fallback"),
                   default="fallback")
    p.add_argument("--variants", type=int, default=3)
    p.set_defaults(func=cmd_pipeline)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args) or 0


if __name__ == "__main__":
    sys.exit(main())
