/** Client-side view of served motions: joint positions from the feature
 * channels (root trajectory integration plus the root-relative position
 * block), with linear interpolation for playback smoothing only. */

export type Vec3 = [number, number, number];

/** Parent index of each joint in the standard 22-joint template (root = -1). */
export const PARENT_INDEX = [
  -1, 0, 0, 0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 9, 9, 12, 13, 14, 16, 17, 18, 19,
];

export const JOINT_COUNT = 22;

const ANGULAR_VELOCITY = 0;
const LINEAR_VELOCITY_X = 1;
const LINEAR_VELOCITY_Z = 2;
const ROOT_HEIGHT = 3;
const POSITION_BLOCK = 4; // 21 joints x 3, root-relative in the facing frame

/**
 * Decode per-frame global joint positions from 263-channel feature rows.
 * Mirrors the service-side decoding, so what the viewer draws is exactly
 * what the service computed.
 */
export function positionsFromFeatures(features: number[][]): Vec3[][] {
  const frames = features.length;
  const yaws = new Array<number>(frames).fill(0);
  for (let i = 0; i + 1 < frames; i++) {
    yaws[i + 1] = yaws[i] + features[i][ANGULAR_VELOCITY];
  }
  const rootX = new Array<number>(frames).fill(0);
  const rootZ = new Array<number>(frames).fill(0);
  for (let i = 0; i + 1 < frames; i++) {
    const vx = features[i][LINEAR_VELOCITY_X];
    const vz = features[i][LINEAR_VELOCITY_Z];
    const cos = Math.cos(yaws[i]);
    const sin = Math.sin(yaws[i]);
    rootX[i + 1] = rootX[i] + vx * cos + vz * sin;
    rootZ[i + 1] = rootZ[i] - vx * sin + vz * cos;
  }
  const out: Vec3[][] = [];
  for (let i = 0; i < frames; i++) {
    const rootY = features[i][ROOT_HEIGHT];
    const cos = Math.cos(yaws[i]);
    const sin = Math.sin(yaws[i]);
    const joints: Vec3[] = [[rootX[i], rootY, rootZ[i]]];
    for (let j = 0; j < JOINT_COUNT - 1; j++) {
      const rx = features[i][POSITION_BLOCK + 3 * j];
      const ry = features[i][POSITION_BLOCK + 3 * j + 1];
      const rz = features[i][POSITION_BLOCK + 3 * j + 2];
      joints.push([
        rootX[i] + rx * cos + rz * sin,
        rootY + ry,
        rootZ[i] - rx * sin + rz * cos,
      ]);
    }
    out.push(joints);
  }
  return out;
}

/** Linear blend of two position frames (playback smoothing between frames). */
export function interpolatePositions(a: Vec3[], b: Vec3[], t: number): Vec3[] {
  return a.map((pa, j) => {
    const pb = b[j];
    return [
      pa[0] + (pb[0] - pa[0]) * t,
      pa[1] + (pb[1] - pa[1]) * t,
      pa[2] + (pb[2] - pa[2]) * t,
    ] as Vec3;
  });
}

/** Positions at a fractional frame cursor. */
export function positionsAt(frames: Vec3[][], cursor: number): Vec3[] {
  const i = Math.floor(cursor);
  const frac = cursor - i;
  if (frac === 0 || i + 1 >= frames.length) {
    return frames[Math.min(i, frames.length - 1)];
  }
  return interpolatePositions(frames[i], frames[i + 1], frac);
}
