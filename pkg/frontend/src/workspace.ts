import { ServiceClient } from "./api";
import { positionsFromFeatures, type Vec3 } from "./motion";
import { cardIndexForFrame, stepFromRanges } from "./timeline";
import type { SnippetCard, Suggestion } from "./types";

export interface RegenerationResult {
  initialId: string;
  editedId: string;
  initialPositions: Vec3[][];
  editedPositions: Vec3[][];
  textsBefore: string[];
  textsAfter: string[];
  /** indices of the snippets whose text was part of the edit request */
  editedIndices: number[];
}

/** Per-motion editing session: playback state, cards, regeneration. */
export class Workspace {
  readonly cards: SnippetCard[];
  readonly step: number;
  selectedCard = 0;
  coarseText = "";
  regeneration: RegenerationResult | null = null;

  private regenerationInFlight = false;
  private regenerationQueued = false;

  constructor(
    private readonly client: ServiceClient,
    readonly motionId: string,
    readonly fps: number,
    readonly positions: Vec3[][],
    snippets: { index: number; start: number; end: number; text: string }[],
  ) {
    this.cards = snippets.map((s) => ({
      index: s.index,
      start: s.start,
      end: s.end,
      text: s.text,
      dirty: false,
      conflicted: false,
    }));
    this.step = stepFromRanges(snippets);
  }

  get frameCount(): number {
    return this.positions.length;
  }

  /** The card highlighted for a (possibly fractional) frame cursor. */
  cardForFrame(frame: number): number {
    return cardIndexForFrame(Math.floor(frame), this.step, this.cards.length);
  }

  selectFrame(frame: number): number {
    this.selectedCard = this.cardForFrame(frame);
    return this.selectedCard;
  }

  isMotionless(index: number): boolean {
    return this.cards[index].text === "";
  }

  /** Edit locally (optimistic) and persist; conflicts keep the local text. */
  async saveSnippetText(index: number, text: string): Promise<SnippetCard> {
    const card = this.cards[index];
    if (!card) throw new Error(`no snippet card ${index}`);
    card.text = text;
    card.dirty = true;
    try {
      await this.client.putSnippetText(this.motionId, index, text);
      card.dirty = false;
      card.conflicted = false;
    } catch (error) {
      card.conflicted = true;
      throw error;
    }
    return card;
  }

  suggestionsFor(text: string, k = 5): Promise<Suggestion[]> {
    return this.client.suggest(text, k).then((r) => r.suggestions);
  }

  /**
   * Regenerate with the current coarse text and the edited snippet texts.
   * A request issued while one is in flight is queued (never dropped); the
   * latest state is sent when the active request settles.
   */
  async requestRegeneration(): Promise<RegenerationResult | null> {
    if (!this.coarseText) throw new Error("coarse text is required for regeneration");
    if (this.regenerationInFlight) {
      this.regenerationQueued = true;
      return null;
    }
    this.regenerationInFlight = true;
    let failure: unknown = null;
    try {
      const edits = this.cards
        .filter((c) => c.dirty || c.conflicted)
        .map((c) => ({ index: c.index, text: c.text }));
      const response = await this.client.edit(this.coarseText, edits, this.motionId);
      const features = response as unknown as {
        initial_features: number[][];
        edited_features: number[][];
      };
      this.regeneration = {
        initialId: response.initial.id,
        editedId: response.edited.id,
        initialPositions: positionsFromFeatures(features.initial_features),
        editedPositions: positionsFromFeatures(features.edited_features),
        textsBefore: response.texts_before,
        textsAfter: response.texts_after,
        editedIndices: edits.map((e) => e.index),
      };
    } catch (error) {
      failure = error;
    } finally {
      this.regenerationInFlight = false;
    }
    if (this.regenerationQueued) {
      this.regenerationQueued = false;
      return this.requestRegeneration();
    }
    if (failure !== null) throw failure;
    return this.regeneration;
  }
}

/** Fetch a motion's features and snippets and build its workspace. */
export async function loadWorkspace(
  client: ServiceClient,
  motionId: string,
): Promise<Workspace> {
  const [motion, snippets] = await Promise.all([
    client.getMotion(motionId),
    client.getSnippets(motionId),
  ]);
  return new Workspace(
    client,
    motionId,
    motion.fps,
    positionsFromFeatures(motion.features),
    snippets.snippets,
  );
}
