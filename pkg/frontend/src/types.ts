/** Payload shapes of the moscribe HTTP API. */

export interface MotionPayload {
  id: string;
  fps: number;
  root_positions: number[][];
  root_orientations: number[][];
  joint_rotations: number[][][];
}

export interface MotionResponse {
  motion: MotionPayload;
  features: number[][];
  fps: number;
}

export interface SnippetInfo {
  index: number;
  start: number;
  end: number;
  text: string;
}

export interface SnippetsResponse {
  motion_id: string;
  snippets: SnippetInfo[];
}

export interface Suggestion {
  sentence: string;
  score: number;
  frequency: number;
}

export interface EditResponse {
  initial: MotionPayload;
  edited: MotionPayload;
  texts_before: string[];
  texts_after: string[];
}

export interface SnippetCard {
  index: number;
  start: number;
  end: number;
  text: string;
  /** true when the text differs from the last server-confirmed value */
  dirty: boolean;
  /** a save was rejected; the local text is preserved */
  conflicted: boolean;
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;
