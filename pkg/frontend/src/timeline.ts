/** Snippet timeline arithmetic: frame cursor to card index and back. */

/**
 * The highlighted card for a frame cursor: floor(frame / step) clamped to
 * the last card. Total coverage means every frame maps to exactly one card.
 */
export function cardIndexForFrame(frame: number, step: number, cardCount: number): number {
  if (step <= 0 || cardCount <= 0) {
    throw new Error("step and cardCount must be positive");
  }
  const index = Math.floor(frame / step);
  return Math.min(Math.max(index, 0), cardCount - 1);
}

/** First frame of a card, for scrub-to-card navigation. */
export function frameForCard(index: number, step: number): number {
  return index * step;
}

/** Snippet step implied by served snippet ranges (all full ranges share it). */
export function stepFromRanges(ranges: { start: number; end: number }[]): number {
  if (ranges.length === 0) throw new Error("no snippet ranges");
  return ranges.length > 1 ? ranges[1].start - ranges[0].start : ranges[0].end - ranges[0].start;
}

/** Wall-clock playback cursor with speed control and wraparound. */
export class PlaybackClock {
  private playing = false;
  private cursor = 0;
  private lastTick: number | null = null;

  constructor(
    public readonly frameCount: number,
    public readonly fps: number,
    public speed = 1.0,
  ) {}

  get frame(): number {
    return this.cursor;
  }

  get isPlaying(): boolean {
    return this.playing;
  }

  play(): void {
    this.playing = true;
    this.lastTick = null;
  }

  pause(): void {
    this.playing = false;
    this.lastTick = null;
  }

  seek(frame: number): void {
    this.cursor = Math.min(Math.max(frame, 0), this.frameCount - 1);
  }

  /** Advance by wall-clock time; returns the possibly fractional cursor. */
  tick(nowMs: number): number {
    if (!this.playing) return this.cursor;
    if (this.lastTick !== null) {
      const elapsed = (nowMs - this.lastTick) / 1000;
      this.cursor = (this.cursor + elapsed * this.fps * this.speed) % this.frameCount;
    }
    this.lastTick = nowMs;
    return this.cursor;
  }
}
