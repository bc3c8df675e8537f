"""Rule-based body-part-movement description of a snippet's pose change.

The geometry between a snippet's boundary poses is reduced to per-part
delta channels, bucketed against a threshold table (below epsilon the
movement is dropped as trivial, below lambda it is "slight", otherwise
"plain"), and rendered through a closed imperative lexicon, e.g.
"Move your right leg forward slightly.".
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np

from .motion import MotionError, PoseFrame, pose_yaw
from .rotations import UP, quat_about_y, quat_rotate, wrap_angle, yaw_of_direction
from .skeleton import Skeleton, forward_kinematics


class DescriberError(MotionError):
    pass


# Tracked parts. Translating parts follow one marker joint; hinge parts
# follow the interior angle of a three-joint chain.
TRANSLATE_PART_JOINTS = {
    "root": "pelvis",
    "torso": "spine3",
    "head": "head",
    "left_hand": "left_wrist",
    "right_hand": "right_wrist",
    "left_leg": "left_ankle",
    "right_leg": "right_ankle",
}

HINGE_PART_CHAINS = {
    "left_elbow": ("left_shoulder", "left_elbow", "left_wrist"),
    "right_elbow": ("right_shoulder", "right_elbow", "right_wrist"),
    "left_knee": ("left_hip", "left_knee", "left_ankle"),
    "right_knee": ("right_hip", "right_knee", "right_ankle"),
}

YAW_PARTS = ("root", "torso")

TRANSLATE_DIRECTIONS = ("up", "down", "forward", "back", "left", "right")

# (part, kind) -> allowed directions. Every DeltaSet channel appears here,
# so an above-epsilon magnitude always yields a code (null soundness).
COMPATIBILITY = {
    ("root", "yaw"): ("turn-left", "turn-right"),
    ("root", "lean"): ("lean-left", "lean-right", "lean-forward", "lean-back"),
    ("root", "translate"): TRANSLATE_DIRECTIONS,
    ("torso", "yaw"): ("turn-left", "turn-right"),
    ("torso", "translate"): TRANSLATE_DIRECTIONS,
    ("head", "translate"): TRANSLATE_DIRECTIONS,
    ("left_hand", "translate"): TRANSLATE_DIRECTIONS,
    ("right_hand", "translate"): TRANSLATE_DIRECTIONS,
    ("left_leg", "translate"): TRANSLATE_DIRECTIONS,
    ("right_leg", "translate"): TRANSLATE_DIRECTIONS,
    ("left_elbow", "hinge"): ("bend", "straighten"),
    ("right_elbow", "hinge"): ("bend", "straighten"),
    ("left_knee", "hinge"): ("bend", "straighten"),
    ("right_knee", "hinge"): ("bend", "straighten"),
}


@dataclass(frozen=True)
class ThresholdTable:
    """Per-channel epsilon (keep) and lambda (plain) magnitudes."""

    translate_eps_m: float = 0.05
    translate_plain_m: float = 0.15
    hinge_eps_deg: float = 15.0
    hinge_plain_deg: float = 45.0
    turn_eps_deg: float = 10.0
    turn_plain_deg: float = 30.0

    def __post_init__(self):
        for eps, lam in (
            (self.translate_eps_m, self.translate_plain_m),
            (self.hinge_eps_deg, self.hinge_plain_deg),
            (self.turn_eps_deg, self.turn_plain_deg),
        ):
            if not (0.0 < eps < lam):
                raise DescriberError("thresholds must satisfy 0 < epsilon < lambda")

    def to_dict(self):
        return {
            "translate_eps_m": self.translate_eps_m,
            "translate_plain_m": self.translate_plain_m,
            "hinge_eps_deg": self.hinge_eps_deg,
            "hinge_plain_deg": self.hinge_plain_deg,
            "turn_eps_deg": self.turn_eps_deg,
            "turn_plain_deg": self.turn_plain_deg,
        }

    @staticmethod
    def from_dict(d):
        return ThresholdTable(**d)


DEFAULT_THRESHOLDS = ThresholdTable()


@dataclass(frozen=True, eq=False)
class DeltaSet:
    """Raw per-part movement channels between two poses.

    Displacements are meters in the facing-normalized, root-XZ-relative
    frame of each pose (so whole-body translation and turning do not leak
    into limb channels); the root displacement itself is the global root
    move expressed in the start pose's facing frame. Hinge entries are
    interior-angle changes in degrees (negative = bending). Yaw entries
    are heading changes in degrees, positive to the left. Lean is the
    (leftward, forward) torso-axis tilt change in degrees.
    """

    displacements: dict
    hinge_deg: dict
    yaw_deg: dict
    lean_deg: np.ndarray

    def channel_magnitudes(self):
        out = {}
        for part, vec in self.displacements.items():
            out[(part, "translate")] = float(np.linalg.norm(vec))
        for part, ang in self.hinge_deg.items():
            out[(part, "hinge")] = abs(float(ang))
        for part, ang in self.yaw_deg.items():
            out[(part, "yaw")] = abs(float(ang))
        out[("root", "lean")] = float(np.linalg.norm(self.lean_deg))
        return out


def _local_positions(positions, yaw):
    root_xz = positions[0] * np.array([1.0, 0.0, 1.0])
    return quat_rotate(quat_about_y(-yaw), positions - root_xz)


def _interior_angle_deg(positions, skeleton, chain):
    a, b, c = (skeleton.index(name) for name in chain)
    v1 = positions[b] - positions[a]
    v2 = positions[c] - positions[b]
    cosang = np.dot(v1, v2) / (np.linalg.norm(v1) * np.linalg.norm(v2))
    # Interior angle: 180 degrees when the chain is straight.
    return 180.0 - np.degrees(np.arccos(np.clip(cosang, -1.0, 1.0)))


def _torso_twist_deg(positions, skeleton, hip_yaw):
    across = positions[skeleton.index("left_shoulder")] - positions[skeleton.index("right_shoulder")]
    facing = np.cross(across, UP)
    if np.linalg.norm(facing) < 1e-9:
        return 0.0
    return np.degrees(wrap_angle(yaw_of_direction(facing) - hip_yaw))


def _lean_deg(positions, skeleton, yaw):
    axis = positions[skeleton.index("neck")] - positions[0]
    local = quat_rotate(quat_about_y(-yaw), axis)
    return np.array(
        [
            np.degrees(np.arctan2(local[0], local[1])),
            np.degrees(np.arctan2(local[2], local[1])),
        ]
    )


def body_part_deltas(start: PoseFrame, end: PoseFrame, skeleton: Skeleton) -> DeltaSet:
    """Measure how each tracked part moved between two poses."""
    expected = (skeleton.num_joints - 1, 4)
    if start.joint_rotations.shape != expected or end.joint_rotations.shape != expected:
        raise DescriberError("poses do not match the skeleton's joint count")
    pos_s = forward_kinematics(start, skeleton)
    pos_e = forward_kinematics(end, skeleton)
    yaw_s = pose_yaw(start, skeleton, pos_s)
    yaw_e = pose_yaw(end, skeleton, pos_e)
    local_s = _local_positions(pos_s, yaw_s)
    local_e = _local_positions(pos_e, yaw_e)

    displacements = {}
    for part, joint in TRANSLATE_PART_JOINTS.items():
        j = skeleton.index(joint)
        if part == "root":
            displacements[part] = quat_rotate(quat_about_y(-yaw_s), pos_e[0] - pos_s[0])
        else:
            displacements[part] = local_e[j] - local_s[j]

    hinge_deg = {
        part: _interior_angle_deg(pos_e, skeleton, chain)
        - _interior_angle_deg(pos_s, skeleton, chain)
        for part, chain in HINGE_PART_CHAINS.items()
    }

    yaw_deg = {
        "root": float(np.degrees(wrap_angle(yaw_e - yaw_s))),
        "torso": float(
            np.degrees(
                wrap_angle(
                    np.radians(
                        _torso_twist_deg(pos_e, skeleton, yaw_e)
                        - _torso_twist_deg(pos_s, skeleton, yaw_s)
                    )
                )
            )
        ),
    }

    lean = _lean_deg(pos_e, skeleton, yaw_e) - _lean_deg(pos_s, skeleton, yaw_s)
    return DeltaSet(displacements, hinge_deg, yaw_deg, lean)


@dataclass(frozen=True)
class MovementCode:
    part: str
    kind: str
    direction: str
    magnitude: str
    secondary_direction: str | None = None

    def __post_init__(self):
        allowed = COMPATIBILITY.get((self.part, self.kind))
        if allowed is None or self.direction not in allowed:
            raise DescriberError(
                f"({self.part}, {self.kind}, {self.direction}) is not in the compatibility table"
            )
        if self.secondary_direction is not None and self.secondary_direction not in allowed:
            raise DescriberError(f"invalid secondary direction {self.secondary_direction}")
        if self.magnitude not in ("slight", "plain"):
            raise DescriberError(f"invalid magnitude {self.magnitude}")


# Compound directions fire when the second-largest displacement axis holds
# at least 40% of a 60/40 split against the largest.
COMPOUND_RATIO = 2.0 / 3.0

_SIDE_OF_PART = {"left": 0, "right": 1}

# Canonical emission order: root/torso, head, arms, legs; inside a class
# the key uses kind, a side-agnostic direction rank, and magnitude before
# the body side, keeping mirrored outputs aligned sentence-for-sentence.
_CLASS_RANK = {
    "root": 0,
    "torso": 1,
    "head": 2,
    "left_elbow": 3,
    "right_elbow": 3,
    "left_hand": 3,
    "right_hand": 3,
    "left_knee": 4,
    "right_knee": 4,
    "left_leg": 4,
    "right_leg": 4,
}
_KIND_RANK = {"yaw": 0, "lean": 1, "hinge": 2, "translate": 3}
_DIRECTION_RANK = {
    "bend": 0,
    "straighten": 1,
    "up": 0,
    "down": 1,
    "forward": 2,
    "back": 3,
    "left": 4,
    "right": 4,
    "turn-left": 0,
    "turn-right": 0,
    "lean-forward": 0,
    "lean-back": 1,
    "lean-left": 2,
    "lean-right": 2,
}
_MAGNITUDE_RANK = {"plain": 0, "slight": 1}


def _part_side(part):
    head = part.split("_", 1)[0]
    return _SIDE_OF_PART.get(head, -1)


def code_sort_key(code: MovementCode):
    return (
        _CLASS_RANK[code.part],
        _KIND_RANK[code.kind],
        _DIRECTION_RANK[code.direction],
        _DIRECTION_RANK.get(code.secondary_direction, -1),
        _MAGNITUDE_RANK[code.magnitude],
        _part_side(code.part),
    )


def _axis_directions(vec):
    """Axis magnitudes with their direction words, sorted descending."""
    entries = [
        (abs(vec[1]), "up" if vec[1] >= 0 else "down"),
        (abs(vec[2]), "forward" if vec[2] >= 0 else "back"),
        (abs(vec[0]), "left" if vec[0] >= 0 else "right"),
    ]
    return sorted(entries, key=lambda e: -e[0])


def _bucket(magnitude, eps, plain):
    if magnitude < eps:
        return None
    return "slight" if magnitude < plain else "plain"


def classify_deltas(deltas: DeltaSet, thresholds: ThresholdTable = DEFAULT_THRESHOLDS):
    """Turn raw deltas into movement codes, dropping below-epsilon channels."""
    if not isinstance(thresholds, ThresholdTable):
        raise DescriberError("thresholds must be a ThresholdTable")
    codes = []

    for part, vec in deltas.displacements.items():
        magnitude = float(np.linalg.norm(vec))
        bucket = _bucket(magnitude, thresholds.translate_eps_m, thresholds.translate_plain_m)
        if bucket is None:
            continue
        axes = _axis_directions(np.asarray(vec, dtype=np.float64))
        primary = axes[0][1]
        secondary = None
        if axes[0][0] > 0 and axes[1][0] >= COMPOUND_RATIO * axes[0][0]:
            secondary = axes[1][1]
        codes.append(MovementCode(part, "translate", primary, bucket, secondary))

    for part, ang in deltas.hinge_deg.items():
        bucket = _bucket(abs(float(ang)), thresholds.hinge_eps_deg, thresholds.hinge_plain_deg)
        if bucket is None:
            continue
        codes.append(MovementCode(part, "hinge", "straighten" if ang > 0 else "bend", bucket))

    for part, ang in deltas.yaw_deg.items():
        bucket = _bucket(abs(float(ang)), thresholds.turn_eps_deg, thresholds.turn_plain_deg)
        if bucket is None:
            continue
        codes.append(MovementCode(part, "yaw", "turn-left" if ang > 0 else "turn-right", bucket))

    lean_mag = float(np.linalg.norm(deltas.lean_deg))
    bucket = _bucket(lean_mag, thresholds.turn_eps_deg, thresholds.turn_plain_deg)
    if bucket is not None:
        lx, lz = deltas.lean_deg
        if abs(lx) >= abs(lz):
            direction = "lean-left" if lx >= 0 else "lean-right"
        else:
            direction = "lean-forward" if lz >= 0 else "lean-back"
        codes.append(MovementCode("root", "lean", direction, bucket))

    return sorted(codes, key=code_sort_key)


# ---------------------------------------------------------------------------
# Lexicon
# ---------------------------------------------------------------------------

PART_PHRASE = {
    "root": "body",
    "torso": "torso",
    "head": "head",
    "left_hand": "left hand",
    "right_hand": "right hand",
    "left_leg": "left leg",
    "right_leg": "right leg",
    "left_elbow": "left elbow",
    "right_elbow": "right elbow",
    "left_knee": "left knee",
    "right_knee": "right knee",
}

# Sides merge into a plural phrase when both carry an identical code.
MERGED_PART_PHRASE = {
    ("left_hand", "right_hand"): "hands",
    ("left_leg", "right_leg"): "legs",
    ("left_elbow", "right_elbow"): "elbows",
    ("left_knee", "right_knee"): "knees",
}

DIRECTION_PHRASE = {
    "up": "up",
    "down": "down",
    "forward": "forward",
    "back": "back",
    "left": "to the left",
    "right": "to the right",
}

LEAN_PHRASE = {
    "lean-left": "to the left",
    "lean-right": "to the right",
    "lean-forward": "forward",
    "lean-back": "back",
}

# Imperative verbs the lexicon can emit, with their third-person forms;
# extended with common correctional-text verbs so descriptive rewriting
# covers the bundled annotation fixtures.
VERB_THIRD_PERSON = {
    "move": "moves",
    "raise": "raises",
    "lower": "lowers",
    "lift": "lifts",
    "bend": "bends",
    "straighten": "straightens",
    "turn": "turns",
    "lean": "leans",
    "bring": "brings",
    "keep": "keeps",
    "extend": "extends",
    "rotate": "rotates",
    "twist": "twists",
    "step": "steps",
    "spread": "spreads",
    "curl": "curls",
    "drop": "drops",
    "pull": "pulls",
    "push": "pushes",
    "swing": "swings",
    "stretch": "stretches",
    "reach": "reaches",
    "curve": "curves",
    "point": "points",
    "cross": "crosses",
    "shift": "shifts",
    "tilt": "tilts",
    "open": "opens",
    "close": "closes",
    "walk": "walks",
    "kick": "kicks",
    "kneel": "kneels",
    "squat": "squats",
    "sit": "sits",
    "stand": "stands",
    "place": "places",
    "hold": "holds",
    "put": "puts",
    "touch": "touches",
    "stay": "stays",
}

# Nouns the validator treats as body-part terms.
BODY_PART_TERMS = (
    "hand",
    "hands",
    "elbow",
    "elbows",
    "arm",
    "arms",
    "forearm",
    "forearms",
    "shoulder",
    "shoulders",
    "wrist",
    "wrists",
    "finger",
    "fingers",
    "leg",
    "legs",
    "knee",
    "knees",
    "thigh",
    "thighs",
    "foot",
    "feet",
    "ankle",
    "ankles",
    "heel",
    "heels",
    "toe",
    "toes",
    "head",
    "neck",
    "torso",
    "chest",
    "waist",
    "hip",
    "hips",
    "body",
)


@dataclass(frozen=True)
class Lexicon:
    part_phrase: dict = field(default_factory=lambda: dict(PART_PHRASE))
    merged_part_phrase: dict = field(default_factory=lambda: dict(MERGED_PART_PHRASE))
    direction_phrase: dict = field(default_factory=lambda: dict(DIRECTION_PHRASE))
    lean_phrase: dict = field(default_factory=lambda: dict(LEAN_PHRASE))
    verb_third_person: dict = field(default_factory=lambda: dict(VERB_THIRD_PERSON))
    body_part_terms: tuple = BODY_PART_TERMS


DEFAULT_LEXICON = Lexicon()


def load_config(path):
    """Load thresholds and lexicon overrides from a JSON configuration file.

    The file may contain a "thresholds" object (any subset of the
    ThresholdTable fields) and a "lexicon" object whose entries replace
    the embedded defaults wholesale.
    """
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    thresholds = ThresholdTable(**{**DEFAULT_THRESHOLDS.to_dict(), **raw.get("thresholds", {})})
    lex_raw = raw.get("lexicon", {})
    lexicon = DEFAULT_LEXICON
    if lex_raw:
        merged = {
            tuple(k.split("+")): v for k, v in lex_raw.get("merged_part_phrase", {}).items()
        } or dict(MERGED_PART_PHRASE)
        lexicon = Lexicon(
            part_phrase=lex_raw.get("part_phrase", dict(PART_PHRASE)),
            merged_part_phrase=merged,
            direction_phrase=lex_raw.get("direction_phrase", dict(DIRECTION_PHRASE)),
            lean_phrase=lex_raw.get("lean_phrase", dict(LEAN_PHRASE)),
            verb_third_person=lex_raw.get("verb_third_person", dict(VERB_THIRD_PERSON)),
            body_part_terms=tuple(lex_raw.get("body_part_terms", BODY_PART_TERMS)),
        )
    return thresholds, lexicon


def _merge_codes(codes, lexicon):
    """Replace left/right code pairs that agree in everything else with one
    plural-part code."""
    merged = []
    consumed = set()
    by_signature = {}
    for i, code in enumerate(codes):
        by_signature.setdefault(
            (code.part, code.kind, code.direction, code.secondary_direction, code.magnitude), i
        )
    for i, code in enumerate(codes):
        if i in consumed:
            continue
        partner_part = None
        for (left, right), phrase in lexicon.merged_part_phrase.items():
            if code.part == left:
                partner_part = right
                break
        if partner_part is not None:
            j = by_signature.get(
                (partner_part, code.kind, code.direction, code.secondary_direction, code.magnitude)
            )
            if j is not None and j not in consumed:
                consumed.add(j)
                merged.append((code, lexicon.merged_part_phrase[(code.part, partner_part)]))
                continue
        merged.append((code, None))
    return merged


def _direction_phrase(code, lexicon):
    phrase = lexicon.direction_phrase[code.direction]
    if code.secondary_direction is not None:
        phrase += " and " + lexicon.direction_phrase[code.secondary_direction]
    return phrase


def render_code(code: MovementCode, lexicon: Lexicon = DEFAULT_LEXICON, part_phrase=None):
    """One imperative sentence for a movement code."""
    part = part_phrase or lexicon.part_phrase[code.part]
    if code.kind == "yaw":
        side = "left" if code.direction == "turn-left" else "right"
        body = f"Turn to the {side}" if code.part == "root" else f"Turn your upper body to the {side}"
    elif code.kind == "lean":
        body = f"Lean {lexicon.lean_phrase[code.direction]}"
    elif code.kind == "hinge":
        verb = "Bend" if code.direction == "bend" else "Straighten"
        body = f"{verb} your {part}"
    elif code.direction in ("up", "down") and code.secondary_direction is None:
        verb = "Raise" if code.direction == "up" else "Lower"
        body = f"{verb} your {part}"
    elif code.part == "root":
        body = f"Move {_direction_phrase(code, lexicon)}"
    else:
        body = f"Move your {part} {_direction_phrase(code, lexicon)}"
    if code.magnitude == "slight":
        body += " slightly"
    return body + "."


def render_bpmsd(codes, lexicon: Lexicon = DEFAULT_LEXICON):
    """Render movement codes to one description string.

    Codes are rendered in the order given (classify_deltas already emits
    canonical order); identical left/right pairs merge into one plural
    sentence. An empty code list renders to the empty string.
    """
    if not codes:
        return ""
    sentences = []
    for code, merged_phrase in _merge_codes(list(codes), lexicon):
        sentences.append(render_code(code, lexicon, part_phrase=merged_phrase))
    return " ".join(sentences)


def describe_snippet(snippet, skeleton: Skeleton, thresholds: ThresholdTable = DEFAULT_THRESHOLDS,
                     lexicon: Lexicon = DEFAULT_LEXICON) -> str:
    """Deterministic description of a snippet from its boundary poses."""
    deltas = body_part_deltas(snippet.start_pose, snippet.end_pose, skeleton)
    return render_bpmsd(classify_deltas(deltas, thresholds), lexicon)


def mirror_code(code: MovementCode) -> MovementCode:
    """The code a left/right mirrored pose pair would produce."""
    part = code.part
    if part.startswith("left_"):
        part = "right_" + part[5:]
    elif part.startswith("right_"):
        part = "left_" + part[6:]
    flip = {
        "left": "right",
        "right": "left",
        "turn-left": "turn-right",
        "turn-right": "turn-left",
        "lean-left": "lean-right",
        "lean-right": "lean-left",
    }
    return replace(
        code,
        part=part,
        direction=flip.get(code.direction, code.direction),
        secondary_direction=flip.get(code.secondary_direction, code.secondary_direction),
    )
