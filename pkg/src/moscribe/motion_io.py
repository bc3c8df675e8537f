"""File formats: header-prefixed binary arrays plus a JSON skeleton sidecar.

Every binary file starts with the same 16-byte little-endian header:

    magic   4 bytes  b"MOFG"
    version u16      currently 1
    fps     f32      0 for rate-less matrices (e.g. embeddings)
    frames  u32      row count
    width   u16      joint count for motion files, channel count otherwise

Motion payloads are frame-major float32: root position (3), root
orientation quaternion in w-x-y-z order (4), then 21 joint quaternions.
Feature and embedding payloads are plain row-major float32 matrices.
A motion file `<name>.mofg` carries a sidecar `<name>.mofg.json` with the
sequence id and the skeleton (joint names, parent indices with null for
the root, offsets).
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .features import FEATURE_DIM, FeatureSequence
from .motion import MotionError, MotionSequence, PoseFrame
from .skeleton import Skeleton

MAGIC = b"MOFG"
VERSION = 1
_HEADER = struct.Struct("<4sHfIH")

MOTION_SUFFIX = ".mofg"
FEATURE_SUFFIX = ".mfeat"
EMBEDDING_SUFFIX = ".memb"


class FormatError(MotionError):
    pass


def _write_header(fh, fps, rows, width):
    fh.write(_HEADER.pack(MAGIC, VERSION, float(fps), int(rows), int(width)))


def _read_header(fh, path):
    raw = fh.read(_HEADER.size)
    if len(raw) != _HEADER.size:
        raise FormatError(f"{path}: truncated header")
    magic, version, fps, rows, width = _HEADER.unpack(raw)
    if magic != MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise FormatError(f"{path}: unsupported version {version}")
    return fps, rows, width


def _read_payload(fh, path, rows, cols):
    payload = np.frombuffer(fh.read(), dtype="<f4")
    if payload.size != rows * cols:
        raise FormatError(f"{path}: expected {rows * cols} floats, found {payload.size}")
    return payload.reshape(rows, cols).astype(np.float64)


def skeleton_to_dict(skeleton: Skeleton):
    return {
        "joint_names": list(skeleton.joint_names),
        "parent_index": [None if p < 0 else p for p in skeleton.parent_index],
        "offsets": skeleton.offsets.tolist(),
    }


def skeleton_from_dict(d):
    return Skeleton(
        joint_names=tuple(d["joint_names"]),
        parent_index=tuple(-1 if p is None else int(p) for p in d["parent_index"]),
        offsets=np.array(d["offsets"], dtype=np.float64),
    )


def save_motion(path, motion: MotionSequence, skeleton: Skeleton):
    path = Path(path)
    n_joints = skeleton.num_joints
    rows = np.empty((len(motion.frames), 3 + 4 * n_joints), dtype="<f4")
    for i, f in enumerate(motion.frames):
        rows[i, :3] = f.root_position
        rows[i, 3:7] = f.root_orientation
        rows[i, 7:] = f.joint_rotations.reshape(-1)
    with open(path, "wb") as fh:
        _write_header(fh, motion.fps, len(motion.frames), n_joints)
        fh.write(rows.tobytes())
    sidecar = {"id": motion.id, "skeleton": skeleton_to_dict(skeleton)}
    Path(str(path) + ".json").write_text(json.dumps(sidecar, indent=2), encoding="utf-8")
    return path


def load_motion(path):
    path = Path(path)
    sidecar_path = Path(str(path) + ".json")
    if not sidecar_path.exists():
        raise FormatError(f"{path}: missing sidecar {sidecar_path.name}")
    sidecar = json.loads(sidecar_path.read_text(encoding="utf-8"))
    skeleton = skeleton_from_dict(sidecar["skeleton"])
    with open(path, "rb") as fh:
        fps, n_frames, n_joints = _read_header(fh, path)
        if n_joints != skeleton.num_joints:
            raise FormatError(f"{path}: joint count {n_joints} != sidecar {skeleton.num_joints}")
        rows = _read_payload(fh, path, n_frames, 3 + 4 * n_joints)
    frames = [
        PoseFrame(rows[i, :3], rows[i, 3:7], rows[i, 7:].reshape(-1, 4))
        for i in range(n_frames)
    ]
    return MotionSequence(sidecar["id"], fps, frames), skeleton


def save_features(path, features: FeatureSequence):
    path = Path(path)
    with open(path, "wb") as fh:
        _write_header(fh, features.fps, len(features), FEATURE_DIM)
        fh.write(features.data.astype("<f4").tobytes())
    return path


def load_features(path):
    path = Path(path)
    with open(path, "rb") as fh:
        fps, rows, width = _read_header(fh, path)
        if width != FEATURE_DIM:
            raise FormatError(f"{path}: expected {FEATURE_DIM} channels, found {width}")
        return FeatureSequence(_read_payload(fh, path, rows, width), fps=fps)


def save_matrix(path, matrix):
    """Write an (N, D) float matrix, e.g. an embedding set."""
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim != 2:
        raise FormatError("matrix files hold 2-D arrays")
    path = Path(path)
    with open(path, "wb") as fh:
        _write_header(fh, 0.0, matrix.shape[0], matrix.shape[1])
        fh.write(matrix.astype("<f4").tobytes())
    return path


def load_matrix(path):
    path = Path(path)
    with open(path, "rb") as fh:
        _, rows, width = _read_header(fh, path)
        return _read_payload(fh, path, rows, width)


def motion_to_json(motion: MotionSequence):
    """JSON-friendly motion payload used by the HTTP service and backends."""
    return {
        "id": motion.id,
        "fps": motion.fps,
        "root_positions": [f.root_position.tolist() for f in motion.frames],
        "root_orientations": [f.root_orientation.tolist() for f in motion.frames],
        "joint_rotations": [f.joint_rotations.tolist() for f in motion.frames],
    }


def motion_from_json(payload):
    try:
        frames = [
            PoseFrame(np.array(p), np.array(q), np.array(j))
            for p, q, j in zip(
                payload["root_positions"],
                payload["root_orientations"],
                payload["joint_rotations"],
                strict=True,
            )
        ]
        return MotionSequence(payload["id"], float(payload["fps"]), frames)
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed motion payload: {exc}") from exc
