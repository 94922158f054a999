import type { GenerateResponse, InterpolateResponse, StylesDoc } from "./types";

export class ServiceError extends Error {
  constructor(
    public readonly code: string,
    public readonly detail: string,
    public readonly status: number
  ) {
    super(`${code}: ${detail}`);
  }
}

/** Mirrors the server's 400 rules so bad requests never leave the client. */
export function validateWeights(weights: readonly number[], k: number): void {
  if (weights.length !== k) {
    throw new ServiceError("StyleDimMismatch", `expected ${k} weights, got ${weights.length}`, 0);
  }
  if (!weights.every(Number.isFinite)) {
    throw new ServiceError("WeightsNotFinite", "style weights must be finite", 0);
  }
}

export function validateChars(chars: string, maxChars: number): void {
  if (chars.length === 0) {
    throw new ServiceError("EmptyChars", "enter at least one character", 0);
  }
  if (chars.length > maxChars) {
    throw new ServiceError("TooManyChars", `at most ${maxChars} characters`, 0);
  }
}

async function parseError(resp: Response): Promise<ServiceError> {
  try {
    const doc = await resp.json();
    return new ServiceError(doc.error ?? "HttpError", doc.detail ?? resp.statusText, resp.status);
  } catch {
    return new ServiceError("HttpError", resp.statusText, resp.status);
  }
}

export class FontServiceClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: typeof fetch = (...a) => fetch(...a),
    public maxChars = 64,
    public maxSteps = 33
  ) {}

  private async getJson<T>(path: string): Promise<T> {
    const resp = await this.fetchFn(`${this.baseUrl}${path}`);
    if (!resp.ok) throw await parseError(resp);
    return (await resp.json()) as T;
  }

  private async postJson<T>(path: string, body: unknown): Promise<T> {
    const resp = await this.fetchFn(`${this.baseUrl}${path}`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!resp.ok) throw await parseError(resp);
    return (await resp.json()) as T;
  }

  async styles(): Promise<StylesDoc> {
    return this.getJson<StylesDoc>("/styles");
  }

  async generate(chars: string, weights: readonly number[], k: number): Promise<GenerateResponse> {
    validateChars(chars, this.maxChars);
    validateWeights(weights, k);
    return this.postJson<GenerateResponse>("/generate", { chars, weights });
  }

  async interpolate(
    chars: string,
    from: readonly number[],
    to: readonly number[],
    steps: number,
    k: number
  ): Promise<InterpolateResponse> {
    validateChars(chars, this.maxChars);
    validateWeights(from, k);
    validateWeights(to, k);
    if (steps < 2 || steps > this.maxSteps) {
      throw new ServiceError("StepsOutOfRange", `steps must be in [2, ${this.maxSteps}]`, 0);
    }
    return this.postJson<InterpolateResponse>("/interpolate", { chars, from, to, steps });
  }
}
