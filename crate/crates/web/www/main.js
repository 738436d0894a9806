import init, { cbGap, dilateMatrix, pisierCurve } from "./pkg/cbnorm_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function fail(target, err) {
  target.innerHTML = "";
  const p = document.createElement("p");
  p.className = "error";
  p.textContent = String(err.message ?? err);
  target.appendChild(p);
}

function runGap() {
  const out = $("gap-out");
  out.textContent = "running...";
  setTimeout(() => {
    try {
      const r = JSON.parse(cbGap(num("gap-n"), num("gap-p"), num("gap-trials"), num("gap-restarts"), BigInt(num("gap-seed"))));
      const rows = r.trials
        .map((t) => `<tr><td>${t.trial}</td><td>${t.min_norm.toFixed(6)}</td><td>${t.max_norm.toFixed(6)}</td><td>${t.ratio.toFixed(4)}</td></tr>`)
        .join("");
      out.innerHTML =
        `<table><tr><th>trial</th><th>min</th><th>max</th><th>ratio</th></tr>${rows}</table>` +
        `<p>mean ratio ${r.summary.mean_ratio.toFixed(4)}, lower bound ${r.pisier_bound.toFixed(4)}, ${r.wall_clock_s.toFixed(2)} s</p>`;
    } catch (e) {
      fail(out, e);
    }
  }, 0);
}

function runDilate() {
  const out = $("dil-out");
  try {
    const r = JSON.parse(dilateMatrix($("dil-in").value));
    const d = r.dilation;
    const fmt = ([re, im]) => `${re.toFixed(4)}${im < 0 ? "-" : "+"}${Math.abs(im).toFixed(4)}i`;
    const lines = [];
    for (let i = 0; i < d.rows; i++) {
      lines.push(d.entries.slice(i * d.cols, (i + 1) * d.cols).map(fmt).join("  "));
    }
    out.innerHTML = "";
    const pre = document.createElement("pre");
    pre.textContent =
      `norm ${r.source_norm.toFixed(6)}, unitarity residual ${r.unitarity_residual.toExponential(2)}, ` +
      `compression exact: ${r.compression_exact}\n\n` + lines.join("\n");
    out.appendChild(pre);
  } catch (e) {
    fail(out, e);
  }
}

function runPisier() {
  const canvas = $("pis-canvas");
  const ctx = canvas.getContext("2d");
  const points = JSON.parse(pisierCurve(num("pis-n")));
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  if (points.length === 0) return;
  const pad = 30;
  const nMax = points[points.length - 1][0];
  const yMax = Math.max(...points.map((p) => p[1]));
  const x = (n) => pad + ((n - 2) / Math.max(1, nMax - 2)) * (canvas.width - 2 * pad);
  const y = (v) => canvas.height - pad - ((v - 1) / Math.max(1e-9, yMax - 1)) * (canvas.height - 2 * pad);
  ctx.strokeStyle = "#888";
  ctx.strokeRect(pad, pad, canvas.width - 2 * pad, canvas.height - 2 * pad);
  ctx.fillStyle = "#333";
  ctx.fillText(`n = ${nMax}`, canvas.width - pad - 30, canvas.height - 10);
  ctx.fillText(yMax.toFixed(3), 2, pad);
  ctx.fillText("1", 2, canvas.height - pad);
  ctx.strokeStyle = "#1565c0";
  ctx.beginPath();
  points.forEach(([n, v], i) => (i === 0 ? ctx.moveTo(x(n), y(v)) : ctx.lineTo(x(n), y(v))));
  ctx.stroke();
}

await init();
$("gap-run").addEventListener("click", runGap);
$("dil-run").addEventListener("click", runDilate);
$("pis-run").addEventListener("click", runPisier);
runPisier();
