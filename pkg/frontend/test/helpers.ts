import type { GlyphImage } from "../src/types";

export function b64(text: string): string {
  return Buffer.from(text, "utf-8").toString("base64");
}

/** Deterministic fake renderer: the "PNG" bytes encode (char, weights). */
export function fakeImage(char: string, weights: readonly number[]): GlyphImage {
  return { char, png_base64: b64(`${char}|${weights.map((w) => w.toFixed(6)).join(",")}`) };
}

function lerp(a: readonly number[], b: readonly number[], t: number): number[] {
  return a.map((v, i) => v + (b[i] - v) * t);
}

export interface StubOptions {
  k?: number;
  onGenerate?: () => void;
  delayed?: boolean;
}

/** In-memory stand-in for the font service with exact interpolation endpoints. */
export function makeStubFetch(opts: StubOptions = {}) {
  const k = opts.k ?? 4;
  const pending: Array<() => void> = [];

  const fetchFn = async (input: string | URL | Request, init?: RequestInit): Promise<Response> => {
    const url = String(input);
    if (opts.delayed) {
      await new Promise<void>((resolve) => pending.push(resolve));
    }
    if (url.endsWith("/styles")) {
      return Response.json({
        K: k,
        styles: Array.from({ length: k }, (_, i) => ({ id: i, name: `style${i}` })),
      });
    }
    const body = JSON.parse(String(init?.body ?? "{}"));
    if (url.endsWith("/generate")) {
      opts.onGenerate?.();
      if (body.weights.length !== k) {
        return Response.json({ error: "StyleDimMismatch", detail: "bad length" }, { status: 400 });
      }
      const images = [...body.chars].map((ch: string) => fakeImage(ch, body.weights));
      return Response.json({ size: 64, images, skipped: [] });
    }
    if (url.endsWith("/interpolate")) {
      const frames = [];
      for (let t = 0; t < body.steps; t++) {
        const w =
          t === 0 ? body.from : t === body.steps - 1 ? body.to : lerp(body.from, body.to, t / (body.steps - 1));
        frames.push([...body.chars].map((ch: string) => fakeImage(ch, w)));
      }
      return Response.json({ size: 64, steps: body.steps, frames, skipped: [] });
    }
    return Response.json({ error: "NotFound", detail: url }, { status: 404 });
  };

  return {
    fetchFn: fetchFn as typeof fetch,
    /** resolve the oldest delayed request */
    release(): void {
      const next = pending.shift();
      if (next) next();
    },
    pendingCount: () => pending.length,
  };
}

export function installFakeLocalStorage(): void {
  const store = new Map<string, string>();
  globalThis.localStorage = {
    getItem: (key: string) => store.get(key) ?? null,
    setItem: (key: string, value: string) => void store.set(key, value),
    removeItem: (key: string) => void store.delete(key),
    clear: () => store.clear(),
    key: (i: number) => [...store.keys()][i] ?? null,
    get length() {
      return store.size;
    },
  } as Storage;
}
