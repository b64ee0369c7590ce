// View state and the pure reducer applying server frames to it.
//
// Rendering rules: interim transcript entries are replaced in place (at most
// one per speaker) until the matching final arrives and is appended
// permanently; suggestion cards grow append-only, newest first; the session
// timer starts at the `status connected` frame.

import type { ServerFrame, Speaker, SuggestionCard, TranscriptUpdate } from "./protocol";

export interface TranscriptEntry {
  speaker: Speaker;
  text: string;
  isFinal: boolean;
  startTime: number;
  endTime: number;
}

export interface ViewState {
  connection: "connecting" | "connected" | "error";
  finals: TranscriptEntry[];
  interim: Record<Speaker, TranscriptEntry | null>;
  cards: SuggestionCard[];
  micActive: boolean;
  demoActive: boolean;
  sessionStartedAtMs: number | null;
  lastError: string | null;
}

export const initialState: ViewState = {
  connection: "connecting",
  finals: [],
  interim: { rep: null, customer: null },
  cards: [],
  micActive: false,
  demoActive: false,
  sessionStartedAtMs: null,
  lastError: null,
};

function toEntry(frame: TranscriptUpdate): TranscriptEntry {
  return {
    speaker: frame.speaker,
    text: frame.text,
    isFinal: frame.is_final,
    startTime: frame.start_time,
    endTime: frame.end_time,
  };
}

export function applyServerFrame(
  state: ViewState,
  frame: ServerFrame | null,
  nowMs: number,
): ViewState {
  if (frame === null) {
    return state;
  }
  switch (frame.type) {
    case "transcript_update": {
      const entry = toEntry(frame);
      if (!frame.is_final) {
        return { ...state, interim: { ...state.interim, [frame.speaker]: entry } };
      }
      return {
        ...state,
        finals: [...state.finals, entry],
        interim: { ...state.interim, [frame.speaker]: null },
      };
    }
    case "suggestion_card":
      return { ...state, cards: [frame, ...state.cards] };
    case "status": {
      if (frame.state === "connected") {
        return { ...state, connection: "connected", sessionStartedAtMs: nowMs };
      }
      if (frame.state === "demo_ended") {
        return { ...state, demoActive: false };
      }
      return state;
    }
    case "error":
      return { ...state, lastError: `${frame.code}: ${frame.message}` };
    case "audio_play":
      return state; // playback is handled outside the view state
  }
}

/** Finals in arrival order, then any live interim entries (muted in the UI). */
export function transcriptLines(state: ViewState): TranscriptEntry[] {
  const lines = [...state.finals];
  for (const speaker of ["rep", "customer"] as const) {
    const interim = state.interim[speaker];
    if (interim) {
      lines.push(interim);
    }
  }
  return lines;
}

type Listener = () => void;

export class DashboardStore {
  private listeners = new Set<Listener>();
  state: ViewState = initialState;

  apply(frame: ServerFrame | null, nowMs: number = Date.now()): void {
    const next = applyServerFrame(this.state, frame, nowMs);
    if (next !== this.state) {
      this.state = next;
      this.notify();
    }
  }

  set(partial: Partial<ViewState>): void {
    this.state = { ...this.state, ...partial };
    this.notify();
  }

  subscribe = (listener: Listener): (() => void) => {
    this.listeners.add(listener);
    return () => this.listeners.delete(listener);
  };

  snapshot = (): ViewState => this.state;

  private notify(): void {
    for (const listener of this.listeners) {
      listener();
    }
  }
}
