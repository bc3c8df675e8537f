"""moscribe: motion snippet segmentation, body-part-movement description,
annotation tooling, generation metrics, and a zero-shot editing loop."""

from .describer import (
    DEFAULT_LEXICON,
    DEFAULT_THRESHOLDS,
    DeltaSet,
    Lexicon,
    MovementCode,
    ThresholdTable,
    body_part_deltas,
    classify_deltas,
    describe_snippet,
    render_bpmsd,
)
from .features import FEATURE_DIM, FeatureSequence, decode_features, encode_features
from .metrics import (
    GaussianStats,
    MetricEntry,
    MetricReport,
    diversity,
    extract_eval_clips,
    fid_clips,
    frechet_distance,
    gaussian_fit,
    mm_dist,
    multimodality,
    r_precision,
    repeat_with_ci,
)
from .motion import MotionSequence, PoseFrame, canonicalize, crop_frames, resample
from .pipeline import (
    EditRequest,
    GeneratorRequest,
    PipelineConfig,
    describe_motion,
    edit_motion,
    generate_motion,
    organize_paragraph,
    run_pipeline,
)
from .segmentation import (
    DurationProfile,
    Snippet,
    duration_similarity_profile,
    pose_descriptor,
    segment,
    select_duration,
)
from .skeleton import Skeleton, forward_kinematics
from .store import (
    AnnotationRecord,
    Corpus,
    DatasetSplit,
    build_corpus,
    dataset_stats,
    deserialize_annotations,
    serialize_annotations,
    split_dataset,
    suggest_sentences,
)
from .textgen import (
    BPMP,
    BPMSDList,
    ValidationReport,
    assemble_template,
    build_paragraph_prompt,
    fallback_paragraph,
    imperative_to_descriptive,
    parse_template,
    temporal_augment,
    validate_paragraph,
)

__version__ = "0.1.0"
