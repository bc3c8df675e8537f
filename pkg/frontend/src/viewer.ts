import { PARENT_INDEX, positionsAt, type Vec3 } from "./motion";

export interface ViewerOptions {
  jointRadius: number;
  boneColor: string;
  jointColor: string;
  background: string;
  /** orbit angle around the vertical axis, radians */
  orbit: number;
  scale: number;
}

const DEFAULTS: ViewerOptions = {
  jointRadius: 3,
  boneColor: "#4a7dbd",
  jointColor: "#1d3d63",
  background: "#f7f8fa",
  orbit: Math.PI / 6,
  scale: 140,
};

/** Balls-and-sticks skeleton renderer onto a 2D canvas. */
export class SkeletonViewer {
  private readonly options: ViewerOptions;

  constructor(
    private readonly canvas: HTMLCanvasElement,
    private frames: Vec3[][] = [],
    options: Partial<ViewerOptions> = {},
  ) {
    this.options = { ...DEFAULTS, ...options };
  }

  setFrames(frames: Vec3[][]): void {
    this.frames = frames;
  }

  get frameCount(): number {
    return this.frames.length;
  }

  /** Simple orbit projection: rotate about Y, then drop depth. */
  project(p: Vec3): [number, number] {
    const { orbit, scale } = this.options;
    const x = p[0] * Math.cos(orbit) - p[2] * Math.sin(orbit);
    const cx = this.canvas.width / 2;
    const cy = this.canvas.height * 0.9;
    return [cx + x * scale, cy - p[1] * scale];
  }

  drawFrame(cursor: number): void {
    const ctx = this.canvas.getContext("2d");
    if (!ctx || this.frames.length === 0) return;
    const joints = positionsAt(this.frames, cursor);
    ctx.fillStyle = this.options.background;
    ctx.fillRect(0, 0, this.canvas.width, this.canvas.height);
    ctx.strokeStyle = this.options.boneColor;
    ctx.lineWidth = 2;
    for (let j = 1; j < joints.length; j++) {
      const parent = PARENT_INDEX[j];
      const [x1, y1] = this.project(joints[parent]);
      const [x2, y2] = this.project(joints[j]);
      ctx.beginPath();
      ctx.moveTo(x1, y1);
      ctx.lineTo(x2, y2);
      ctx.stroke();
    }
    ctx.fillStyle = this.options.jointColor;
    for (const joint of joints) {
      const [x, y] = this.project(joint);
      ctx.beginPath();
      ctx.arc(x, y, this.options.jointRadius, 0, 2 * Math.PI);
      ctx.fill();
    }
  }
}

/** Two viewers advancing on one clock, for before/after comparison. */
export class SideBySidePlayer {
  constructor(
    private readonly left: SkeletonViewer,
    private readonly right: SkeletonViewer,
  ) {}

  draw(cursor: number): void {
    this.left.drawFrame(cursor);
    const rightCount = this.right.frameCount;
    if (rightCount > 0) {
      // Keep both panes in lockstep; the shorter one wraps.
      this.right.drawFrame(cursor % rightCount);
    }
  }
}
