// WebSocket message types shared with the backend, plus the frame codec.
// Malformed inbound frames are dropped with a console diagnostic, never thrown.

export type Speaker = "rep" | "customer";

export interface TranscriptUpdate {
  type: "transcript_update";
  speaker: Speaker;
  text: string;
  is_final: boolean;
  start_time: number;
  end_time: number;
}

export interface CardTimings {
  detection: number;
  retrieval: number;
  generation: number;
  total: number;
}

export interface SuggestionCard {
  type: "suggestion_card";
  card_id: string;
  question: string;
  answer: string;
  category: string;
  confidence: number;
  source: string;
  timings: CardTimings;
}

export interface AudioPlay {
  type: "audio_play";
  turn_id: number;
  audio_b64: string;
  speaker: Speaker;
}

export interface StatusMessage {
  type: "status";
  state: string;
  detail: string;
}

export interface ErrorMessage {
  type: "error";
  code: string;
  message: string;
}

export type ServerFrame =
  | TranscriptUpdate
  | SuggestionCard
  | AudioPlay
  | StatusMessage
  | ErrorMessage;

// The dashboard is a pure protocol client: these three JSON frames plus raw
// binary audio are the only things it may ever send.
export type ClientFrame =
  | { type: "text_input"; text: string; speaker?: Speaker }
  | { type: "demo_next"; turn_id: number }
  | { type: "status"; state: "demo_start" };

const REQUIRED_FIELDS: Record<ServerFrame["type"], string[]> = {
  transcript_update: ["speaker", "text", "is_final", "start_time", "end_time"],
  suggestion_card: ["card_id", "question", "answer", "category", "confidence", "source", "timings"],
  audio_play: ["turn_id", "audio_b64", "speaker"],
  status: ["state"],
  error: ["code", "message"],
};

export function parseServerFrame(raw: string): ServerFrame | null {
  let data: unknown;
  try {
    data = JSON.parse(raw);
  } catch {
    console.warn("dropping non-JSON frame", raw.slice(0, 120));
    return null;
  }
  if (typeof data !== "object" || data === null || Array.isArray(data)) {
    console.warn("dropping non-object frame");
    return null;
  }
  const frame = data as Record<string, unknown>;
  const type = frame.type as ServerFrame["type"];
  const required = REQUIRED_FIELDS[type];
  if (!required) {
    console.warn("dropping frame of unknown type", frame.type);
    return null;
  }
  for (const field of required) {
    if (!(field in frame)) {
      console.warn(`dropping ${type} frame missing '${field}'`);
      return null;
    }
  }
  return frame as unknown as ServerFrame;
}

export function encodeClientFrame(frame: ClientFrame): string {
  return JSON.stringify(frame);
}
