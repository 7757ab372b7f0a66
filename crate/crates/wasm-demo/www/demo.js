import init, {
  hsv_uv, binary_threshold, illumination_distance, sample_scene,
} from "./pkg/eyevis_wasm.js";

const MAX_SIDE = 480;
const $ = (id) => document.getElementById(id);
let source = null; // { rgba: Uint8Array, width, height }

function draw(canvas, rgba, width, height) {
  canvas.width = width;
  canvas.height = height;
  const data = new ImageData(new Uint8ClampedArray(rgba), width, height);
  canvas.getContext("2d").putImageData(data, 0, 0);
}

function pct(x) {
  return (100 * x).toFixed(1) + "%";
}

function config() {
  return JSON.stringify({
    blue_factor: Number($("blue").value),
    pink: {
      h_lo: Number($("pink-hlo").value),
      h_hi: Number($("pink-hhi").value),
      s_lo: Number($("pink-slo").value),
    },
    black: { v_hi: Number($("black-vhi").value) },
    colormap: $("cmap").value,
  });
}

function shifted(rgba, delta, tint) {
  const out = new Uint8Array(rgba.length);
  for (let i = 0; i < rgba.length; i += 4) {
    out[i] = Math.min(255, Math.max(0, rgba[i] + delta + tint));
    out[i + 1] = Math.min(255, Math.max(0, rgba[i + 1] + delta));
    out[i + 2] = Math.min(255, Math.max(0, rgba[i + 2] + delta - tint));
    out[i + 3] = 255;
  }
  return out;
}

function render() {
  for (const out of document.querySelectorAll("label output")) {
    out.textContent = out.previousElementSibling.value;
  }
  if (!source) return;
  const { rgba, width, height } = source;
  try {
    $("error").textContent = "";
    const uv = hsv_uv(rgba, width, height, config());
    draw($("uv"), uv.rgba, width, height);
    $("uv-stats").textContent =
      `black ${pct(uv.black_ratio)} · pink ${pct(uv.pink_ratio)}`;

    const lo = Number($("th-lo").value);
    const hi = Number($("th-hi").value);
    const th = binary_threshold(rgba, width, height, Math.min(lo, hi), Math.max(lo, hi), config());
    draw($("threshold"), th.rgba, width, height);
    $("th-stats").textContent = `in threshold ${pct(th.black_ratio)}`;

    const other = shifted(rgba, Number($("shift").value), Number($("tint").value));
    draw($("lit"), other, width, height);
    const d = JSON.parse(illumination_distance(rgba, other, width, height));
    $("lit-stats").textContent =
      `d ${d.d.toFixed(4)} · d_h ${d.d_h.toFixed(4)} · d_s ${d.d_s.toFixed(2)} · d_v ${d.d_v.toFixed(4)}`;
  } catch (e) {
    $("error").textContent = String(e);
  }
}

function setSource(rgba, width, height) {
  source = { rgba, width, height };
  draw($("source"), rgba, width, height);
  render();
}

function loadSample(painted) {
  const width = 320, height = 200;
  setSource(sample_scene(width, height, painted), width, height);
}

async function loadFile(file) {
  const bitmap = await createImageBitmap(file);
  const scale = Math.min(1, MAX_SIDE / Math.max(bitmap.width, bitmap.height));
  const width = Math.max(1, Math.round(bitmap.width * scale));
  const height = Math.max(1, Math.round(bitmap.height * scale));
  const canvas = new OffscreenCanvas(width, height);
  const ctx = canvas.getContext("2d");
  ctx.drawImage(bitmap, 0, 0, width, height);
  const data = ctx.getImageData(0, 0, width, height).data;
  setSource(new Uint8Array(data.buffer), width, height);
}

await init();
for (const input of document.querySelectorAll("input[type=range], select")) {
  input.addEventListener("input", render);
}
$("sample-painted").addEventListener("click", () => loadSample(true));
$("sample-clean").addEventListener("click", () => loadSample(false));
$("file").addEventListener("change", (e) => {
  const file = e.target.files[0];
  if (file) loadFile(file).catch((err) => { $("error").textContent = String(err); });
});
loadSample(true);
