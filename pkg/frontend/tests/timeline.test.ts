import { describe, expect, it } from "vitest";

import { PlaybackClock, cardIndexForFrame, frameForCard, stepFromRanges } from "../src/timeline";

describe("cardIndexForFrame", () => {
  it("maps every frame to floor(f/step) clamped to the last card", () => {
    // 73 frames, step 10 -> 8 cards, the 3-frame tail belongs to card 7
    for (let frame = 0; frame < 73; frame++) {
      const expected = Math.min(Math.floor(frame / 10), 7);
      expect(cardIndexForFrame(frame, 10, 8)).toBe(expected);
    }
  });

  it("scrubbing to frame 15 highlights card 1 with 10-frame snippets", () => {
    expect(cardIndexForFrame(15, 10, 8)).toBe(1);
  });

  it("clamps out-of-range cursors", () => {
    expect(cardIndexForFrame(999, 10, 4)).toBe(3);
    expect(cardIndexForFrame(-5, 10, 4)).toBe(0);
  });

  it("is a bijection between cards and their frame ranges", () => {
    for (let card = 0; card < 8; card++) {
      expect(cardIndexForFrame(frameForCard(card, 10), 10, 8)).toBe(card);
    }
  });

  it("rejects degenerate inputs", () => {
    expect(() => cardIndexForFrame(0, 0, 3)).toThrow();
    expect(() => cardIndexForFrame(0, 10, 0)).toThrow();
  });
});

describe("stepFromRanges", () => {
  it("derives the step from served ranges", () => {
    expect(
      stepFromRanges([
        { start: 0, end: 10 },
        { start: 10, end: 20 },
        { start: 20, end: 23 },
      ]),
    ).toBe(10);
    expect(stepFromRanges([{ start: 0, end: 7 }])).toBe(7);
  });
});

describe("PlaybackClock", () => {
  it("advances by wall-clock time at the motion frame rate", () => {
    const clock = new PlaybackClock(100, 20);
    clock.play();
    clock.tick(1000);
    const cursor = clock.tick(1500); // 0.5 s at 20 fps = 10 frames
    expect(cursor).toBeCloseTo(10, 6);
  });

  it("wraps around and respects pause/seek", () => {
    const clock = new PlaybackClock(40, 20);
    clock.play();
    clock.tick(0);
    expect(clock.tick(3000)).toBeCloseTo((3 * 20) % 40, 6);
    clock.pause();
    const paused = clock.frame;
    expect(clock.tick(9999)).toBe(paused);
    clock.seek(999);
    expect(clock.frame).toBe(39);
  });

  it("honors the speed multiplier", () => {
    const clock = new PlaybackClock(1000, 20, 2.0);
    clock.play();
    clock.tick(0);
    expect(clock.tick(1000)).toBeCloseTo(40, 6);
  });
});
