import type { FontServiceClient } from "./api";
import type { GenerateResponse } from "./types";

/** Trailing debounce: the wrapped call runs once, `ms` after the last hit. */
export function trailingDebounce<A extends unknown[]>(
  ms: number,
  fn: (...args: A) => void
): (...args: A) => void {
  let timer: ReturnType<typeof setTimeout> | null = null;
  return (...args: A) => {
    if (timer !== null) clearTimeout(timer);
    timer = setTimeout(() => {
      timer = null;
      fn(...args);
    }, ms);
  };
}

export interface PreviewSink {
  onGrid(resp: GenerateResponse): void;
  onClear(): void;
  onError(message: string): void;
}

/**
 * Live preview loop: debounced requests, at most one in flight, and
 * monotonic tokens so a superseded response is never rendered.
 */
export class PreviewController {
  private token = 0;
  private inFlight = false;
  private pending: { chars: string; weights: number[]; token: number } | null = null;
  private readonly schedule: (chars: string, weights: number[]) => void;
  requestCount = 0;

  constructor(
    private readonly api: FontServiceClient,
    private readonly k: number,
    private readonly sink: PreviewSink,
    debounceMs = 250
  ) {
    this.schedule = trailingDebounce(debounceMs, (chars: string, weights: number[]) =>
      this.dispatch(chars, weights)
    );
  }

  /** Call on every slider or text change. */
  update(chars: string, weights: readonly number[]): void {
    if (chars.length === 0) {
      this.token += 1; // anything in flight is now stale
      this.pending = null;
      this.sink.onClear();
      return;
    }
    this.schedule(chars, [...weights]);
  }

  private dispatch(chars: string, weights: number[]): void {
    this.token += 1;
    if (this.inFlight) {
      this.pending = { chars, weights, token: this.token };
      return;
    }
    void this.send(chars, weights, this.token);
  }

  private async send(chars: string, weights: number[], token: number): Promise<void> {
    this.inFlight = true;
    this.requestCount += 1;
    try {
      const resp = await this.api.generate(chars, weights, this.k);
      if (token === this.token) {
        this.sink.onGrid(resp);
      }
    } catch (err) {
      if (token === this.token) {
        this.sink.onError(err instanceof Error ? err.message : String(err));
      }
    } finally {
      this.inFlight = false;
      if (this.pending !== null) {
        const next = this.pending;
        this.pending = null;
        void this.send(next.chars, next.weights, next.token);
      }
    }
  }
}
