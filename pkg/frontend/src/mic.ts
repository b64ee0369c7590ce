// Microphone capture: browser audio is downsampled client-side to the
// server's fixed format (16 kHz 16-bit LE mono PCM) and shipped in ~100 ms
// binary chunks.

export const TARGET_SAMPLE_RATE = 16000;
export const CHUNK_SAMPLES = 1600; // 100 ms at 16 kHz

export function downsampleBuffer(
  input: Float32Array,
  fromRate: number,
  toRate: number = TARGET_SAMPLE_RATE,
): Float32Array {
  if (fromRate === toRate) {
    return input;
  }
  const ratio = fromRate / toRate;
  const length = Math.floor(input.length / ratio);
  const output = new Float32Array(length);
  for (let i = 0; i < length; i++) {
    const pos = i * ratio;
    const left = Math.floor(pos);
    const right = Math.min(left + 1, input.length - 1);
    const frac = pos - left;
    output[i] = input[left] * (1 - frac) + input[right] * frac;
  }
  return output;
}

export function floatTo16BitPCM(input: Float32Array): Int16Array {
  const output = new Int16Array(input.length);
  for (let i = 0; i < input.length; i++) {
    const sample = Math.max(-1, Math.min(1, input[i]));
    output[i] = sample < 0 ? sample * 0x8000 : sample * 0x7fff;
  }
  return output;
}

export class MicCapture {
  private stream: MediaStream | null = null;
  private context: AudioContext | null = null;
  private processor: ScriptProcessorNode | null = null;
  private pending: number[] = [];

  constructor(private onChunk: (chunk: ArrayBuffer) => void) {}

  get active(): boolean {
    return this.stream !== null;
  }

  async start(): Promise<void> {
    if (this.stream) {
      return;
    }
    const stream = await navigator.mediaDevices.getUserMedia({
      audio: { channelCount: 1, echoCancellation: true, noiseSuppression: true },
    });
    const context = new AudioContext();
    const source = context.createMediaStreamSource(stream);
    const processor = context.createScriptProcessor(4096, 1, 1);
    processor.onaudioprocess = (event) => {
      const downsampled = downsampleBuffer(
        event.inputBuffer.getChannelData(0), context.sampleRate);
      for (let i = 0; i < downsampled.length; i++) {
        this.pending.push(downsampled[i]);
      }
      while (this.pending.length >= CHUNK_SAMPLES) {
        const chunk = Float32Array.from(this.pending.splice(0, CHUNK_SAMPLES));
        this.onChunk(floatTo16BitPCM(chunk).buffer as ArrayBuffer);
      }
    };
    source.connect(processor);
    processor.connect(context.destination);
    this.stream = stream;
    this.context = context;
    this.processor = processor;
  }

  stop(): void {
    this.processor?.disconnect();
    this.stream?.getTracks().forEach((track) => track.stop());
    void this.context?.close();
    this.stream = null;
    this.context = null;
    this.processor = null;
    this.pending = [];
  }
}
