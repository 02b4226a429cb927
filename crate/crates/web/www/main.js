import init, { zero_wait_sweep, tandem_interval, tandem_simulate, age_sawtooth } from "./pkg/aoi_lab_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => parseFloat($(id).value);
const fmt = (x) => (Number.isFinite(x) ? x.toPrecision(6) : "n/a");

function report(id, text, error = false) {
  const el = $(id);
  el.textContent = text;
  el.className = error ? "out err" : "out";
}

// Draws polylines [{xs, ys, color}] with shared axes.
function plot(canvas, series, xlabel) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = 40;
  ctx.clearRect(0, 0, w, h);
  const all = (k) => series.flatMap((s) => s[k]).filter(Number.isFinite);
  const [x0, x1] = [Math.min(...all("xs")), Math.max(...all("xs"))];
  const [y0, y1] = [Math.min(0, ...all("ys")), Math.max(...all("ys"))];
  const sx = (x) => pad + ((x - x0) / (x1 - x0 || 1)) * (w - 2 * pad);
  const sy = (y) => h - pad - ((y - y0) / (y1 - y0 || 1)) * (h - 2 * pad);
  ctx.strokeStyle = "#999";
  ctx.beginPath();
  ctx.moveTo(pad, sy(0));
  ctx.lineTo(w - pad, sy(0));
  ctx.moveTo(pad, pad);
  ctx.lineTo(pad, h - pad);
  ctx.stroke();
  ctx.fillStyle = "#444";
  ctx.fillText(fmt(y1), 2, pad);
  ctx.fillText(fmt(x0), pad, h - pad + 14);
  ctx.fillText(fmt(x1), w - pad - 30, h - pad + 14);
  ctx.fillText(xlabel, w / 2, h - 8);
  for (const s of series) {
    ctx.strokeStyle = s.color;
    ctx.setLineDash(s.dash || []);
    ctx.beginPath();
    s.xs.forEach((x, i) => (i ? ctx.lineTo(sx(x), sy(s.ys[i])) : ctx.moveTo(sx(x), sy(s.ys[i]))));
    ctx.stroke();
  }
  ctx.setLineDash([]);
}

function drawZeroWait() {
  try {
    const v = zero_wait_sweep(num("zw-mu"), num("zw-amax"), 60);
    const col = (k) => Array.from({ length: v.length / 5 }, (_, i) => v[5 * i + k]);
    const alpha = col(0);
    plot($("zw-canvas"), [
      { xs: alpha, ys: col(1), color: "#1f77b4" },
      { xs: alpha, ys: col(2), color: "#d62728", dash: [4, 3] },
      { xs: alpha, ys: col(3), color: "#d62728", dash: [4, 3] },
      { xs: alpha, ys: col(4), color: "#2ca02c" },
    ], "alpha");
    const zero = alpha.findIndex((_, i) => col(2)[i] > 0);
    report("zw-out",
      "blue: exact correction   red dashed: E[A] +- sd(A)   green: lower bound clamped at 0\n" +
      (zero >= 0 ? `lower bound turns positive near alpha = ${fmt(alpha[zero])}` : "lower bound stays negative"));
  } catch (e) {
    report("zw-out", String(e.message || e), true);
  }
}

function rates() {
  return new Float64Array($("t-rates").value.split(/[ ,;]+/).filter((s) => s).map(Number));
}

let lastSim = NaN;

function drawTandem() {
  try {
    const [d0, lb, ub, heur, exact] = tandem_interval(num("t-lambda"), rates());
    const ctx = $("t-canvas").getContext("2d");
    const { width: w, height: h } = $("t-canvas");
    const marks = [lb, ub, heur, exact, lastSim].filter(Number.isFinite);
    const lo = Math.min(...marks) * 0.95;
    const hi = Math.max(...marks) * 1.05;
    const sx = (x) => 20 + ((x - lo) / (hi - lo)) * (w - 40);
    ctx.clearRect(0, 0, w, h);
    ctx.fillStyle = "#cfe2f3";
    ctx.fillRect(sx(lb), 25, sx(ub) - sx(lb), 30);
    const tick = (x, color, label) => {
      if (!Number.isFinite(x)) return;
      ctx.fillStyle = color;
      ctx.fillRect(sx(x) - 1, 15, 2, 50);
      ctx.fillText(label, sx(x) + 3, 80);
    };
    tick(heur, "#555", "heuristic");
    tick(exact, "#2ca02c", "exact");
    tick(lastSim, "#d62728", "simulated");
    report("t-out",
      `zero-age AAoI of final queue ${fmt(d0)}\ninterval [${fmt(lb)}, ${fmt(ub)}]  heuristic ${fmt(heur)}` +
      (Number.isFinite(exact) ? `  exact ${fmt(exact)}` : "") +
      (Number.isFinite(lastSim) ? `\nsimulated ${fmt(lastSim)}` : ""));
  } catch (e) {
    report("t-out", String(e.message || e), true);
  }
}

function simulateTandem() {
  try {
    lastSim = tandem_simulate(num("t-lambda"), rates(), num("t-n"), 1);
  } catch (e) {
    lastSim = NaN;
  }
  drawTandem();
}

function drawSawtooth() {
  try {
    const v = age_sawtooth($("s-model").value, num("s-lambda"), num("s-mu"), num("s-gamma"),
      num("s-theta"), num("s-alpha"), num("s-n"), num("s-seed"));
    const n = v.length / 3;
    const col = (k) => Array.from({ length: n }, (_, i) => v[3 * i + k]);
    const t = col(0);
    plot($("s-canvas"), [
      { xs: t, ys: col(2), color: "#999", dash: [3, 3] },
      { xs: t, ys: col(1), color: "#1f77b4" },
    ], "time");
    let area = 0;
    for (let i = 1; i < n; i++) area += 0.5 * (t[i] - t[i - 1]) * (v[3 * i + 1] + v[3 * (i - 1) + 1]);
    report("s-out", `blue: age at the monitor   grey dashed: same packets taken fresh on arrival\n` +
      `time average over the window ${fmt(area / (t[n - 1] - t[0]))}`);
  } catch (e) {
    report("s-out", String(e.message || e), true);
  }
}

await init();
for (const id of ["zw-mu", "zw-amax"]) $(id).addEventListener("input", drawZeroWait);
for (const id of ["t-lambda", "t-rates"]) $(id).addEventListener("input", () => { lastSim = NaN; drawTandem(); });
$("t-sim").addEventListener("click", simulateTandem);
for (const el of document.querySelectorAll("#saw input, #saw select")) el.addEventListener("input", drawSawtooth);
drawZeroWait();
drawTandem();
drawSawtooth();
