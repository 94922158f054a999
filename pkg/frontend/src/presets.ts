import type { Preset } from "./types";

const KEY = "glyphforge_presets_v1";

function loadAll(): Record<string, Preset> {
  try {
    return JSON.parse(localStorage.getItem(KEY) ?? "{}") as Record<string, Preset>;
  } catch {
    return {};
  }
}

export function listPresets(): Preset[] {
  return Object.values(loadAll()).sort((a, b) => a.createdAt - b.createdAt);
}

export function getPreset(name: string): Preset | null {
  const preset = loadAll()[name];
  return preset ? Object.freeze({ ...preset, weights: Object.freeze([...preset.weights]) }) : null;
}

/** Presets are immutable once saved: saving an existing name is rejected. */
export function savePreset(name: string, weights: readonly number[]): Preset {
  if (!name.trim()) throw new Error("preset name must not be empty");
  const all = loadAll();
  if (name in all) throw new Error(`preset "${name}" already exists`);
  const preset: Preset = Object.freeze({
    name,
    weights: Object.freeze([...weights]),
    createdAt: Date.now(),
  });
  all[name] = preset;
  localStorage.setItem(KEY, JSON.stringify(all));
  return preset;
}

export function deletePreset(name: string): void {
  const all = loadAll();
  delete all[name];
  localStorage.setItem(KEY, JSON.stringify(all));
}
