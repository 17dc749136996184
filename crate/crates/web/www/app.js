import init, { twoLevelSpectrum, lambdaSpectrum, twoLevelCorrelation } from "./pkg/resfluor_web.js";

const COUNT = 801;

function plot(canvas, x, series) {
  const ctx = canvas.getContext("2d");
  const w = canvas.width, h = canvas.height, pad = 36;
  ctx.clearRect(0, 0, w, h);
  const ys = series.flatMap(s => Array.from(s.y)).filter(Number.isFinite);
  let lo = Math.min(0, ...ys), hi = Math.max(...ys);
  if (!(hi > lo)) hi = lo + 1;
  const x0 = x[0], x1 = x[x.length - 1];
  const px = v => pad + (v - x0) / (x1 - x0) * (w - 2 * pad);
  const py = v => h - pad - (v - lo) / (hi - lo) * (h - 2 * pad);

  ctx.strokeStyle = "#999";
  ctx.lineWidth = 1;
  ctx.beginPath();
  ctx.moveTo(pad, py(0)); ctx.lineTo(w - pad, py(0));
  ctx.stroke();
  ctx.fillStyle = "#555";
  ctx.font = "11px sans-serif";
  ctx.fillText(x0.toFixed(1), pad, h - 12);
  ctx.fillText(x1.toFixed(1), w - pad - 24, h - 12);
  ctx.fillText(hi.toPrecision(3), 2, pad);

  for (const s of series) {
    ctx.strokeStyle = s.color;
    ctx.lineWidth = s.width ?? 1.5;
    ctx.setLineDash(s.dash ?? []);
    ctx.beginPath();
    let pen = false;
    for (let i = 0; i < x.length; i++) {
      if (!Number.isFinite(s.y[i])) { pen = false; continue; }
      if (pen) ctx.lineTo(px(x[i]), py(s.y[i])); else ctx.moveTo(px(x[i]), py(s.y[i]));
      pen = true;
    }
    ctx.stroke();
  }
  ctx.setLineDash([]);
}

function bind(section, render) {
  const inputs = [...section.querySelectorAll("input")];
  const canvas = section.querySelector("canvas");
  const stats = section.querySelector(".stats");
  const update = () => {
    const p = {};
    for (const input of inputs) {
      p[input.name] = Number(input.value);
      input.nextElementSibling.textContent = input.value;
    }
    try {
      stats.classList.remove("error");
      stats.textContent = render(canvas, p);
    } catch (e) {
      stats.classList.add("error");
      stats.textContent = String(e.message ?? e);
    }
  };
  inputs.forEach(i => i.addEventListener("input", update));
  update();
}

function spectrumText(view) {
  return `coherent weight ${view.coherentWeight.toExponential(4)} · ` +
    `⟨σ_ee⟩ − |⟨σ_eg⟩|² = ${view.fluctuation.toExponential(4)} · ` +
    `max |limit − variance| / peak = ${view.maxRelDiff.toExponential(2)}`;
}

await init();

bind(document.getElementById("two-level"), (canvas, p) => {
  const half = Math.max(p.rabi, Math.abs(p.detuning)) + 10;
  const view = twoLevelSpectrum(p.rabi, p.detuning, half, COUNT);
  const series = [
    { y: view.variance, color: "#1f77b4", width: 3 },
    { y: view.limit, color: "#ff7f0e", dash: [6, 4] },
  ];
  if (view.reference.length) series.push({ y: view.reference, color: "#2ca02c", dash: [1, 3] });
  plot(canvas, view.nu, series);
  const text = spectrumText(view);
  view.free();
  return text;
});

bind(document.getElementById("lambda"), (canvas, p) => {
  const half = Math.max(p.rabi_1, p.rabi_2) + Math.max(Math.abs(p.detuning_1), Math.abs(p.detuning_2)) + 10;
  const view = lambdaSpectrum(p.rabi_1, p.rabi_2, p.detuning_1, p.detuning_2, p.gamma_2, half, COUNT);
  plot(canvas, view.nu, [
    { y: view.variance, color: "#1f77b4", width: 3 },
    { y: view.limit, color: "#ff7f0e", dash: [6, 4] },
  ]);
  const text = spectrumText(view);
  view.free();
  return text;
});

bind(document.getElementById("correlation"), (canvas, p) => {
  const flat = twoLevelCorrelation(p.rabi, p.detuning, p.window, 1200);
  const tau = [], re = [], im = [];
  for (let i = 0; i < flat.length; i += 3) {
    tau.push(flat[i]); re.push(flat[i + 1]); im.push(flat[i + 2]);
  }
  plot(canvas, tau, [
    { y: re, color: "#1f77b4" },
    { y: im, color: "#d62728" },
  ]);
  return `C(0) = ${re[0].toExponential(4)} · RK4 samples shown: ${tau.length}`;
});
