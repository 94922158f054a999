import { FontServiceClient, ServiceError } from "./api";
import { AnimationController } from "./animation";
import { deletePreset, getPreset, listPresets, savePreset } from "./presets";
import { PreviewController } from "./preview";
import { MixerStore, SLIDER_MAX, SLIDER_MIN, SLIDER_STEP } from "./state";
import type { GlyphImage } from "./types";

const SERVICE_URL =
  new URLSearchParams(location.search).get("service") ?? "http://127.0.0.1:8500";

const $ = <T extends HTMLElement>(sel: string): T => {
  const el = document.querySelector<T>(sel);
  if (!el) throw new Error(`missing element ${sel}`);
  return el;
};

const api = new FontServiceClient(SERVICE_URL);
const store = new MixerStore();
let k = 0;

function showBanner(message: string, withRetry: boolean): void {
  const banner = $("#banner");
  banner.textContent = message;
  banner.style.display = "block";
  $("#retry").style.display = withRetry ? "inline-block" : "none";
}

function hideBanner(): void {
  $("#banner").style.display = "none";
  $("#retry").style.display = "none";
}

function toast(message: string): void {
  const el = $("#toast");
  el.textContent = message;
  el.style.display = "block";
  setTimeout(() => (el.style.display = "none"), 2500);
}

function renderImages(target: HTMLElement, images: GlyphImage[]): void {
  target.replaceChildren(
    ...images.map((img) => {
      const el = document.createElement("img");
      el.src = `data:image/png;base64,${img.png_base64}`;
      el.title = img.char;
      el.className = "glyph";
      return el;
    })
  );
}

const preview = {
  controller: null as PreviewController | null,
  lastImages: [] as GlyphImage[],
};

const animation = new AnimationController({
  onFrame(index, images) {
    renderImages($("#anim-grid"), images);
    ($("#scrubber") as unknown as HTMLInputElement).value = String(index);
    $("#frame-label").textContent = `frame ${index + 1}/${animation.frameCount}`;
  },
  onPlayState(playing) {
    $("#play").textContent = playing ? "stop" : "play";
    store.setAnimation({ playing });
  },
});

function buildSliders(): void {
  const box = $("#sliders");
  box.replaceChildren(
    ...store.get().styles.map((style) => {
      const row = document.createElement("div");
      row.className = "slider-row";
      const label = document.createElement("label");
      label.textContent = style.name;
      const slider = document.createElement("input");
      slider.type = "range";
      slider.min = String(SLIDER_MIN);
      slider.max = String(SLIDER_MAX);
      slider.step = String(SLIDER_STEP);
      slider.value = String(store.get().weights[style.id]);
      slider.dataset.styleId = String(style.id);
      const value = document.createElement("span");
      value.textContent = Number(slider.value).toFixed(2);
      slider.addEventListener("input", () => {
        store.setWeight(style.id, Number(slider.value));
        value.textContent = Number(slider.value).toFixed(2);
      });
      row.append(label, slider, value);
      return row;
    })
  );
}

function refreshPresetList(): void {
  const sel1 = $("#preset-from") as unknown as HTMLSelectElement;
  const sel2 = $("#preset-to") as unknown as HTMLSelectElement;
  const names = listPresets().map((p) => p.name);
  for (const sel of [sel1, sel2]) {
    const current = sel.value;
    sel.replaceChildren(...names.map((n) => new Option(n, n)));
    if (names.includes(current)) sel.value = current;
  }
  $("#preset-list").textContent = names.length ? names.join(", ") : "(none)";
}

async function loadCatalog(): Promise<void> {
  hideBanner();
  try {
    const doc = await api.styles();
    k = doc.K;
    store.setCatalog(doc.styles);
    buildSliders();
    preview.controller = new PreviewController(api, k, {
      onGrid(resp) {
        preview.lastImages = resp.images;
        renderImages($("#grid"), resp.images);
        $("#skipped").textContent = resp.skipped.length
          ? `not in source font: ${resp.skipped.join(" ")}`
          : "";
      },
      onClear() {
        preview.lastImages = [];
        $("#grid").replaceChildren();
        $("#skipped").textContent = "";
      },
      onError(message) {
        toast(message); // keep the last good grid
      },
    });
  } catch (err) {
    showBanner(
      err instanceof ServiceError && err.status === 503
        ? "service is still loading its model"
        : `cannot reach the font service at ${SERVICE_URL}`,
      true
    );
  }
}

function wire(): void {
  let lastKey = "";
  store.subscribe((state) => {
    const key = `${state.chars}|${state.weights.join(",")}`;
    if (key === lastKey) return; // ignore animation/preset state changes
    lastKey = key;
    preview.controller?.update(state.chars, state.weights);
  });

  ($("#chars") as unknown as HTMLInputElement).addEventListener("input", (ev) => {
    store.setChars((ev.target as HTMLInputElement).value);
  });

  $("#retry").addEventListener("click", () => void loadCatalog());

  $("#save-preset").addEventListener("click", () => {
    const name = ($("#preset-name") as unknown as HTMLInputElement).value;
    try {
      savePreset(name, store.get().weights);
      refreshPresetList();
      toast(`saved preset "${name}"`);
    } catch (err) {
      toast(err instanceof Error ? err.message : String(err));
    }
  });

  $("#delete-preset").addEventListener("click", () => {
    deletePreset(($("#preset-name") as unknown as HTMLInputElement).value);
    refreshPresetList();
  });

  $("#animate").addEventListener("click", () => {
    void (async () => {
      const fromName = ($("#preset-from") as unknown as HTMLSelectElement).value;
      const toName = ($("#preset-to") as unknown as HTMLSelectElement).value;
      const from = fromName ? getPreset(fromName) : null;
      const to = toName ? getPreset(toName) : null;
      if (!from || !to) {
        toast("save two presets first");
        return;
      }
      const steps = Number(($("#steps") as unknown as HTMLInputElement).value);
      try {
        const resp = await api.interpolate(store.get().chars, from.weights, to.weights, steps, k);
        const scrubber = $("#scrubber") as unknown as HTMLInputElement;
        scrubber.max = String(resp.frames.length - 1);
        animation.load(resp.frames);
        animation.play();
      } catch (err) {
        toast(err instanceof Error ? err.message : String(err)); // 400s verbatim
      }
    })();
  });

  $("#play").addEventListener("click", () => {
    if (store.get().animation.playing) animation.stop();
    else animation.play();
  });

  ($("#scrubber") as unknown as HTMLInputElement).addEventListener("input", (ev) => {
    animation.stop();
    animation.scrub(Number((ev.target as HTMLInputElement).value));
  });

  refreshPresetList();
}

wire();
void loadCatalog();
