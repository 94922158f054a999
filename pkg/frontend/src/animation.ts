import type { GlyphImage } from "./types";

export interface AnimationSink {
  onFrame(index: number, images: GlyphImage[]): void;
  onPlayState(playing: boolean): void;
}

/** Client-side playback over prefetched interpolation frames. */
export class AnimationController {
  private frames: GlyphImage[][] = [];
  private index = 0;
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(private readonly sink: AnimationSink, private readonly frameMs = 120) {}

  get frameCount(): number {
    return this.frames.length;
  }

  get currentIndex(): number {
    return this.index;
  }

  load(frames: GlyphImage[][]): void {
    this.stop();
    this.frames = frames;
    this.index = 0;
    if (frames.length) this.sink.onFrame(0, frames[0]);
  }

  scrub(index: number): void {
    if (!this.frames.length) return;
    this.index = Math.min(this.frames.length - 1, Math.max(0, index));
    this.sink.onFrame(this.index, this.frames[this.index]);
  }

  play(): void {
    if (this.timer !== null || this.frames.length < 2) return;
    this.sink.onPlayState(true);
    this.timer = setInterval(() => {
      this.scrub((this.index + 1) % this.frames.length);
    }, this.frameMs);
  }

  stop(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
      this.sink.onPlayState(false);
    }
  }
}
