import init, { abc_summary, abc_trajectory, abc_phase_map } from "./pkg/qqo_web.js";

const REGIMES = {
  vi: "#cfe3f7",
  v: "#9fc5e8",
  iv: "#6fa8dc",
  iii: "#3d85c6",
  silent: "#f6e3a1",
  bb5_violated: "#e6e6e6",
};
const SERIES = ["#c0392b", "#27ae60", "#2c6fbb"];
const MAP_N = 81;
const RANGE = 1.0;

const $ = (id) => document.getElementById(id);
const params = () => ["a", "b", "c"].map((k) => parseFloat($(k).value));

function showSummary() {
  const [a, b, c] = params();
  ["a", "b", "c"].forEach((k, i) => ($(`${k}-out`).textContent = [a, b, c][i].toFixed(3)));
  try {
    const s = JSON.parse(abc_summary(a, b, c));
    const fmt = (v) => (typeof v === "number" ? v.toFixed(6) : String(v));
    const rows = [
      ["max(a², b²) + c²", `${fmt(s.bb5)} (${s.bb5_holds ? "<= 1" : "> 1"})`],
      ["a² + 2 max(b², c²)", fmt(s.e14)],
      ["|a| + |b|", fmt(s.e15)],
      ["proved not Kadison-Schwarz", s.not_ks],
      ["regime", s.regime],
      ["stability certificate", s.dynamics_class],
      ["ks2 margin at f=e1, w=e2", fmt(s.ks2_at_e1_e2)],
      ["sampled worst KS margin", `${fmt(s.ks_worst_margin)} (${s.ks_worst_channel})`],
    ];
    $("summary").innerHTML = rows.map(([k, v]) => `<tr><td>${k}</td><td>${v}</td></tr>`).join("");
    $("summary-err").textContent = "";
  } catch (e) {
    $("summary").innerHTML = "";
    $("summary-err").textContent = String(e);
  }
}

let mapC = null;
let mapCells = [];

function drawMap() {
  const [a, b, c] = params();
  if (c !== mapC) {
    mapCells = JSON.parse(abc_phase_map(c, MAP_N));
    mapC = c;
  }
  const cv = $("map");
  const ctx = cv.getContext("2d");
  const cell = cv.width / MAP_N;
  mapCells.forEach((p, idx) => {
    const i = idx % MAP_N;
    const j = Math.floor(idx / MAP_N);
    const x = i * cell;
    const y = cv.height - (j + 1) * cell;
    ctx.fillStyle = REGIMES[p.regime] ?? "#fff";
    ctx.fillRect(x, y, cell + 0.5, cell + 0.5);
    if (p.not_ks) {
      ctx.fillStyle = "rgba(120, 0, 0, 0.55)";
      ctx.fillRect(x + cell / 3, y + cell / 3, cell / 3, cell / 3);
    }
  });
  const px = ((a + RANGE) / (2 * RANGE)) * cv.width;
  const py = cv.height - ((b + RANGE) / (2 * RANGE)) * cv.height;
  ctx.strokeStyle = "#000";
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  ctx.arc(px, py, 5, 0, 2 * Math.PI);
  ctx.stroke();
}

function drawLegend() {
  const items = Object.entries(REGIMES).map(
    ([k, col]) => `<span><i class="swatch" style="background:${col}"></i>${k}</span>`
  );
  items.push(`<span><i class="swatch" style="background:rgba(120,0,0,.55)"></i>proved not KS</span>`);
  $("legend").innerHTML = items.join("") + "<div>horizontal: a in [-1, 1], vertical: b in [-1, 1]</div>";
}

function drawOrbit() {
  const [a, b, c] = params();
  const f = ["f1", "f2", "f3"].map((k) => parseFloat($(k).value) || 0);
  const steps = Math.max(1, Math.min(1000, parseInt($("steps").value, 10) || 60));
  const cv = $("orbit");
  const ctx = cv.getContext("2d");
  ctx.clearRect(0, 0, cv.width, cv.height);
  let tr;
  try {
    tr = JSON.parse(abc_trajectory(a, b, c, f[0], f[1], f[2], steps));
    $("orbit-err").textContent = "";
  } catch (e) {
    $("orbit-err").textContent = String(e);
    $("terminal").textContent = "";
    return;
  }
  const pts = tr.points;
  const n = Math.max(pts.length - 1, 1);
  const pad = 24;
  const X = (i) => pad + (i / n) * (cv.width - 2 * pad);
  const Y = (v) => cv.height / 2 - v * (cv.height / 2 - pad);
  ctx.strokeStyle = "#ccc";
  ctx.lineWidth = 1;
  for (const v of [-1, 0, 1]) {
    ctx.beginPath();
    ctx.moveTo(pad, Y(v));
    ctx.lineTo(cv.width - pad, Y(v));
    ctx.stroke();
    ctx.fillStyle = "#888";
    ctx.fillText(String(v), 4, Y(v) + 4);
  }
  for (let k = 0; k < 3; k++) {
    ctx.strokeStyle = SERIES[k];
    ctx.lineWidth = 1.8;
    ctx.beginPath();
    pts.forEach((p, i) => (i ? ctx.lineTo(X(i), Y(p[k])) : ctx.moveTo(X(i), Y(p[k]))));
    ctx.stroke();
    ctx.fillStyle = SERIES[k];
    ctx.fillText(`f${k + 1}`, cv.width - pad + 4, 14 + 12 * k);
  }
  const at = tr.fixed_point ? ` at (${tr.fixed_point.map((v) => v.toFixed(4)).join(", ")})` : "";
  $("terminal").textContent = `${tr.terminal}${at} after ${pts.length - 1} steps`;
}

function refresh() {
  showSummary();
  drawMap();
  drawOrbit();
}

await init();
drawLegend();
for (const k of ["a", "b", "c"]) $(k).addEventListener("input", refresh);
for (const k of ["f1", "f2", "f3", "steps"]) $(k).addEventListener("input", drawOrbit);
$("map").addEventListener("click", (ev) => {
  const r = ev.target.getBoundingClientRect();
  const a = -RANGE + (2 * RANGE * (ev.clientX - r.left)) / r.width;
  const b = RANGE - (2 * RANGE * (ev.clientY - r.top)) / r.height;
  $("a").value = a.toFixed(2);
  $("b").value = b.toFixed(2);
  refresh();
});
refresh();
