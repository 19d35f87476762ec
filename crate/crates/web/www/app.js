import init, { Scene, noisyPhantom, denoise } from "./pkg/lkreg_web.js";

const $ = (id) => document.getElementById(id);
const SCALE = 4;

function draw(canvas, data, rows, cols, scale = SCALE) {
  let lo = Infinity, hi = -Infinity;
  for (const v of data) { if (v < lo) lo = v; if (v > hi) hi = v; }
  const span = hi > lo ? hi - lo : 1;
  const img = new ImageData(cols, rows);
  for (let i = 0; i < data.length; i++) {
    const g = Math.round(255 * (data[i] - lo) / span);
    img.data.set([g, g, g, 255], 4 * i);
  }
  const tmp = document.createElement("canvas");
  tmp.width = cols; tmp.height = rows;
  tmp.getContext("2d").putImageData(img, 0, 0);
  canvas.width = cols * scale; canvas.height = rows * scale;
  const ctx = canvas.getContext("2d");
  ctx.imageSmoothingEnabled = false;
  ctx.drawImage(tmp, 0, 0, canvas.width, canvas.height);
}

function plot(canvas, series) {
  const ctx = canvas.getContext("2d");
  const w = canvas.width, h = canvas.height, pad = 30;
  ctx.clearRect(0, 0, w, h);
  const all = series.flatMap((s) => Array.from(s.values).filter((v) => v > 0));
  if (all.length === 0) return;
  const nMax = Math.max(...series.map((s) => s.values.length - 1), 1);
  const lo = Math.log10(Math.min(...all)), hi = Math.log10(Math.max(...all));
  const span = hi > lo ? hi - lo : 1;
  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, 5, w - pad - 5, h - pad - 5);
  ctx.fillStyle = "#555";
  ctx.font = "10px sans-serif";
  ctx.fillText(`1e${hi.toFixed(1)}`, 0, 12);
  ctx.fillText(`1e${lo.toFixed(1)}`, 0, h - pad);
  ctx.fillText(`n = ${nMax}`, w - 50, h - 10);
  for (const s of series) {
    ctx.strokeStyle = s.color;
    ctx.beginPath();
    s.values.forEach((v, n) => {
      const x = pad + (w - pad - 5) * n / nMax;
      const y = 5 + (h - pad - 5) * (hi - Math.log10(v)) / span;
      n === 0 ? ctx.moveTo(x, y) : ctx.lineTo(x, y);
    });
    ctx.stroke();
  }
}

let scene = null;

function synthesize() {
  scene?.free();
  const q = Number($("scene-q").value);
  scene = new Scene(q, Number($("scene-angles").value), Number($("scene-noise").value), 1);
  const t = scene.truth();
  draw($("truth"), t.data(), t.rows, t.cols);
  const s = scene.sinogram();
  draw($("sino"), s.data(), s.rows, s.cols, 2);
  t.free(); s.free();
}

function reconstruct() {
  if (!scene) synthesize();
  const q = Number($("scene-q").value);
  const nMax = Number($("rec-n").value);
  $("rec-status").textContent = "running…";
  // Let the status text paint before the blocking solve.
  setTimeout(() => {
    const t0 = performance.now();
    const plain = scene.reconstruct(false, nMax);
    const t1 = performance.now();
    const acc = scene.reconstruct(true, nMax);
    const t2 = performance.now();
    draw($("rec-plain"), plain.image(), q, q);
    draw($("rec-acc"), acc.image(), q, q);
    plot($("rec-plot"), [
      { values: plain.relErrors(), color: "#1f77b4" },
      { values: acc.relErrors(), color: "#d62728" },
    ]);
    const last = (r) => r.relErrors().at(-1).toFixed(4);
    $("rec-status").textContent =
      `plain: n = ${plain.nFinal} (${plain.terminatedBy}), error ${last(plain)}, ${(t1 - t0).toFixed(0)} ms | ` +
      `accelerated: n = ${acc.nFinal} (${acc.terminatedBy}), error ${last(acc)}, ${(t2 - t1).toFixed(0)} ms`;
    plain.free(); acc.free();
  }, 10);
}

let noisy = null;

function makeNoisy() {
  noisy?.free();
  noisy = noisyPhantom(64, Number($("dn-noise").value), 2);
  draw($("dn-in"), noisy.data(), noisy.rows, noisy.cols);
  runDenoise();
}

function runDenoise() {
  const mu = 10 ** Number($("dn-mu").value);
  $("dn-mu-val").textContent = mu.toPrecision(3);
  const out = denoise(noisy.data(), noisy.rows, noisy.cols, mu, $("dn-nonneg").checked);
  draw($("dn-out"), out.image(), noisy.rows, noisy.cols);
  $("dn-status").textContent = `${out.iterations} PDHG steps, relative gap ${out.gapRel.toExponential(2)}, TV ${out.tv.toFixed(1)}`;
  out.free();
}

function guard(f) {
  return () => {
    try { f(); } catch (e) { alert(e.message ?? e); }
  };
}

await init();
$("load").remove();
$("scene-go").onclick = guard(synthesize);
$("rec-go").onclick = guard(reconstruct);
$("dn-noise").onchange = guard(makeNoisy);
$("dn-mu").oninput = guard(runDenoise);
$("dn-nonneg").onchange = guard(runDenoise);
guard(synthesize)();
guard(makeNoisy)();
