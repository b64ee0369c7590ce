// WebSocket client: dispatches inbound frames to the store and playback,
// and exposes the only four outbound actions the protocol allows the
// dashboard (text_input, demo-start status, demo_next, binary audio).

import { DemoPlayback } from "./playback";
import { encodeClientFrame, parseServerFrame, type Speaker } from "./protocol";
import { DashboardStore } from "./store";

export interface WebSocketLike {
  send(data: string | ArrayBuffer): void;
  close(): void;
  onmessage: ((event: { data: unknown }) => void) | null;
  onopen: (() => void) | null;
  onclose: (() => void) | null;
  onerror: (() => void) | null;
  binaryType: string;
}

export type SocketFactory = (url: string) => WebSocketLike;

export function defaultWsUrl(): string {
  const scheme = location.protocol === "https:" ? "wss" : "ws";
  return `${scheme}://${location.host}/ws`;
}

export class DashboardClient {
  readonly playback: DemoPlayback;
  private socket: WebSocketLike | null = null;

  constructor(
    readonly store: DashboardStore,
    private socketFactory: SocketFactory = (url) => new WebSocket(url) as unknown as WebSocketLike,
  ) {
    this.playback = new DemoPlayback((turnId) => this.sendDemoNext(turnId));
  }

  connect(url: string = defaultWsUrl()): void {
    const socket = this.socketFactory(url);
    socket.binaryType = "arraybuffer";
    socket.onmessage = (event) => {
      if (typeof event.data !== "string") {
        return; // the server never sends binary frames
      }
      const frame = parseServerFrame(event.data);
      this.store.apply(frame);
      if (frame?.type === "audio_play") {
        this.playback.enqueue(frame);
      }
    };
    socket.onclose = () => this.store.set({ connection: "error" });
    socket.onerror = () => this.store.set({ connection: "error" });
    this.socket = socket;
  }

  sendTextInput(text: string, speaker: Speaker = "customer"): void {
    this.socket?.send(encodeClientFrame({ type: "text_input", text, speaker }));
  }

  startDemo(): void {
    this.store.set({ demoActive: true });
    this.socket?.send(encodeClientFrame({ type: "status", state: "demo_start" }));
  }

  sendDemoNext(turnId: number): void {
    this.socket?.send(encodeClientFrame({ type: "demo_next", turn_id: turnId }));
  }

  sendAudioChunk(chunk: ArrayBuffer): void {
    this.socket?.send(chunk);
  }

  close(): void {
    this.socket?.close();
    this.socket = null;
  }
}
