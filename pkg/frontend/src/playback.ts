// Demo audio playback with the lock-step handshake.
//
// Each audio_play frame is decoded from base64 MP3 and played on a standalone
// Audio element; demo_next goes out only after playback ends. Undecodable or
// empty payloads acknowledge after a 1 s grace so a bad clip cannot deadlock
// the demo. The server's lock-step guarantees at most one clip outstanding,
// but the queue serializes defensively anyway.

import type { AudioPlay } from "./protocol";

export interface PlayableAudio {
  play(): Promise<void> | void;
  onended: (() => void) | null;
  onerror: (() => void) | null;
}

export type AudioFactory = (src: string) => PlayableAudio;

// HTMLAudioElement handler props take an Event arg; zero-arg handlers are
// fine at runtime, so narrow through unknown.
const defaultFactory: AudioFactory = (src) => new Audio(src) as unknown as PlayableAudio;

export class DemoPlayback {
  private queue: AudioPlay[] = [];
  private busy = false;

  constructor(
    private sendDemoNext: (turnId: number) => void,
    private audioFactory: AudioFactory = defaultFactory,
    private graceMs = 1000,
  ) {}

  enqueue(frame: AudioPlay): void {
    this.queue.push(frame);
    this.drain();
  }

  private drain(): void {
    if (this.busy) {
      return;
    }
    const frame = this.queue.shift();
    if (!frame) {
      return;
    }
    this.busy = true;
    const done = () => {
      this.busy = false;
      this.sendDemoNext(frame.turn_id);
      this.drain();
    };
    if (!frame.audio_b64) {
      console.warn(`demo turn ${frame.turn_id} has no audio; acking after grace`);
      setTimeout(done, this.graceMs);
      return;
    }
    let audio: PlayableAudio;
    try {
      audio = this.audioFactory(`data:audio/mpeg;base64,${frame.audio_b64}`);
    } catch {
      console.warn(`demo turn ${frame.turn_id} audio failed to construct; acking after grace`);
      setTimeout(done, this.graceMs);
      return;
    }
    let settled = false;
    const settle = (viaError: boolean) => {
      if (settled) {
        return;
      }
      settled = true;
      if (viaError) {
        console.warn(`demo turn ${frame.turn_id} audio failed to decode; acking after grace`);
        setTimeout(done, this.graceMs);
      } else {
        done();
      }
    };
    audio.onended = () => settle(false);
    audio.onerror = () => settle(true);
    try {
      const result = audio.play();
      if (result && typeof result.catch === "function") {
        result.catch(() => settle(true));
      }
    } catch {
      settle(true);
    }
  }
}
