export interface StyleInfo {
  id: number;
  name: string;
}

export interface StylesDoc {
  K: number;
  styles: StyleInfo[];
}

export interface GlyphImage {
  char: string;
  png_base64: string;
}

export interface GenerateResponse {
  size: number;
  images: GlyphImage[];
  skipped: string[];
}

export interface InterpolateResponse {
  size: number;
  steps: number;
  frames: GlyphImage[][];
  skipped: string[];
}

export interface Preset {
  name: string;
  weights: readonly number[];
  createdAt: number;
}
