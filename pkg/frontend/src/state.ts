import type { StyleInfo } from "./types";

export const SLIDER_MIN = -0.5;
export const SLIDER_MAX = 1.5;
export const SLIDER_STEP = 0.01;

export interface MixerState {
  chars: string;
  styles: StyleInfo[];
  weights: number[];
  animation: { from: string | null; to: string | null; steps: number; playing: boolean };
}

export function clampWeight(value: number): number {
  const clamped = Math.min(SLIDER_MAX, Math.max(SLIDER_MIN, value));
  return Math.round(clamped / SLIDER_STEP) * SLIDER_STEP;
}

export function oneHot(index: number, k: number): number[] {
  const w = new Array(k).fill(0);
  w[index] = 1;
  return w;
}

type Listener = (state: MixerState) => void;

export class MixerStore {
  private state: MixerState = {
    chars: "",
    styles: [],
    weights: [],
    animation: { from: null, to: null, steps: 11, playing: false },
  };
  private listeners: Listener[] = [];

  get(): MixerState {
    return this.state;
  }

  subscribe(fn: Listener): () => void {
    this.listeners.push(fn);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== fn);
    };
  }

  private emit(): void {
    for (const fn of this.listeners) fn(this.state);
  }

  setCatalog(styles: StyleInfo[]): void {
    // sliders start at one_hot(0)
    this.state = { ...this.state, styles, weights: oneHot(0, styles.length) };
    this.emit();
  }

  setChars(chars: string): void {
    this.state = { ...this.state, chars };
    this.emit();
  }

  setWeight(index: number, value: number): void {
    if (index < 0 || index >= this.state.weights.length) return;
    const weights = [...this.state.weights];
    weights[index] = clampWeight(value);
    this.state = { ...this.state, weights };
    this.emit();
  }

  setWeights(weights: readonly number[]): void {
    if (weights.length !== this.state.weights.length) {
      throw new Error(`expected ${this.state.weights.length} weights, got ${weights.length}`);
    }
    this.state = { ...this.state, weights: weights.map(clampWeight) };
    this.emit();
  }

  setAnimation(patch: Partial<MixerState["animation"]>): void {
    this.state = { ...this.state, animation: { ...this.state.animation, ...patch } };
    this.emit();
  }
}
