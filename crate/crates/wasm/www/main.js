import init, { sampleGraph, layoutGraph, scorePair, encloseNodes } from "./pkg/tic_wasm.js";

const $ = (id) => document.getElementById(id);
const canvas = $("canvas");
const ctx = canvas.getContext("2d");

let text = "";        // edge list the current layout was computed from
let layout = null;    // parsed layoutGraph result
let layoutJson = "";
let selected = [];
let shown = null;     // last score or enclosure result
let yaw = 0.6, pitch = 0.35;

function report(value, isError = false) {
  $("out").textContent = typeof value === "string" ? value : JSON.stringify(value, null, 1);
  $("out").className = isError ? "err" : "";
}

function guard(f) {
  try { f(); } catch (e) { report(String(e.message ?? e), true); }
}

function center() {
  const p = layout.positions, n = p.length;
  return [0, 1, 2].map((k) => p.reduce((s, q) => s + q[k], 0) / n);
}

// Orthographic view: yaw about Y, then pitch about X; y points up on screen.
function projector() {
  const c = center();
  const w = canvas.width, h = canvas.height, s = 0.8 * Math.min(w, h);
  const cy = Math.cos(yaw), sy = Math.sin(yaw), cp = Math.cos(pitch), sp = Math.sin(pitch);
  return (p) => {
    const x = p[0] - c[0], y = p[1] - c[1], z = p[2] - c[2];
    const x1 = cy * x + sy * z, z1 = -sy * x + cy * z;
    const y2 = cp * y - sp * z1, z2 = sp * y + cp * z1;
    return [w / 2 + s * x1, h / 2 - s * y2, z2, s];
  };
}

function curve(proj, f, color) {
  ctx.strokeStyle = color;
  ctx.beginPath();
  for (let i = 0; i <= 96; i++) {
    const [x, y] = proj(f((2 * Math.PI * i) / 96));
    i ? ctx.lineTo(x, y) : ctx.moveTo(x, y);
  }
  ctx.stroke();
}

function drawRegion(proj, r) {
  ctx.lineWidth = 1.5;
  if (r.kind === "sphere") {
    const [x, y, , s] = proj(r.center);
    ctx.strokeStyle = "#2a7";
    ctx.beginPath();
    ctx.arc(x, y, s * r.radius, 0, 2 * Math.PI);
    ctx.stroke();
    return;
  }
  // Outline the three principal sections.
  const [a, b, c] = r.axes.map((e, k) => e.map((v) => v * r.semi_axes[k]));
  for (const [p, q] of [[a, b], [b, c], [a, c]]) {
    curve(proj, (t) => r.center.map((v, k) => v + Math.cos(t) * p[k] + Math.sin(t) * q[k]), "#2a7");
  }
}

function draw() {
  canvas.width = canvas.clientWidth * devicePixelRatio;
  canvas.height = canvas.clientHeight * devicePixelRatio;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  if (!layout) return;
  const proj = projector();
  const pts = layout.positions.map(proj);
  const noiseNodes = new Set(shown?.noise_nodes ?? []);
  const noiseEdges = new Set(shown?.noise_edges ?? []);
  const path = shown?.region?.path ?? [];
  const onPath = new Set(path.slice(1).map((w, i) => [path[i], w].sort((x, y) => x - y).join()));

  layout.edges.forEach(([a, b], i) => {
    const hot = noiseEdges.has(i), inPath = onPath.has([a, b].join());
    ctx.strokeStyle = hot ? "#f80" : inPath ? "#e34234" : "#9cc8e8";
    ctx.lineWidth = hot || inPath ? 2 : 1;
    ctx.beginPath();
    ctx.moveTo(pts[a][0], pts[a][1]);
    ctx.lineTo(pts[b][0], pts[b][1]);
    ctx.stroke();
  });
  const order = pts.map((_, i) => i).sort((i, j) => pts[i][2] - pts[j][2]);
  for (const i of order) {
    const [x, y] = pts[i];
    ctx.fillStyle = selected.includes(i) ? "#e34234" : noiseNodes.has(i) ? "#f80" : "#4aa3df";
    ctx.beginPath();
    ctx.arc(x, y, selected.includes(i) ? 6 : 4, 0, 2 * Math.PI);
    ctx.fill();
  }
  if (shown?.region) drawRegion(proj, shown.region);
}

function pick(ev) {
  if (!layout) return;
  const r = canvas.getBoundingClientRect();
  const x = (ev.clientX - r.left) * devicePixelRatio, y = (ev.clientY - r.top) * devicePixelRatio;
  const proj = projector();
  let best = -1, bestD = 10 * devicePixelRatio;
  layout.positions.forEach((p, i) => {
    const [px, py] = proj(p);
    const d = Math.hypot(px - x, py - y);
    if (d < bestD) { best = i; bestD = d; }
  });
  if (best < 0) return;
  const k = selected.indexOf(best);
  k >= 0 ? selected.splice(k, 1) : selected.push(best);
  report(`selected: ${selected.map((i) => layout.labels[i]).join(", ")}`);
  draw();
}

function doLayout() {
  guard(() => {
    text = $("edges").value;
    layoutJson = layoutGraph(text, BigInt($("seed").value || 0), Number($("restarts").value || 1));
    layout = JSON.parse(layoutJson);
    selected = [];
    shown = null;
    report({ nodes: layout.positions.length, edges: layout.edges.length, stress: layout.stress, iterations: layout.iterations });
    draw();
  });
}

function doScore() {
  guard(() => {
    if (!layout) throw new Error("lay out a graph first");
    if (selected.length !== 2) throw new Error("select exactly two nodes");
    const task = document.querySelector("input[name=task]:checked").value;
    shown = JSON.parse(scorePair(text, layoutJson, selected[0], selected[1], task));
    const { region, noise_nodes, noise_edges, ...summary } = shown;
    report({ ...summary, noise_elements: noise_nodes.length + noise_edges.length });
    draw();
  });
}

function doEnclose() {
  guard(() => {
    if (!layout) throw new Error("lay out a graph first");
    if (selected.length < 1) throw new Error("select some nodes");
    const region = JSON.parse(encloseNodes(JSON.stringify(selected.map((i) => layout.positions[i]))));
    shown = { region };
    report({ semi_axes: region.semi_axes, volume: region.volume });
    draw();
  });
}

let drag = null;
canvas.addEventListener("pointerdown", (ev) => { drag = { x: ev.clientX, y: ev.clientY, moved: false }; });
canvas.addEventListener("pointermove", (ev) => {
  if (!drag) return;
  const dx = ev.clientX - drag.x, dy = ev.clientY - drag.y;
  if (Math.abs(dx) + Math.abs(dy) > 2) drag.moved = true;
  if (!drag.moved) return;
  yaw += dx * 0.01;
  pitch = Math.max(-1.5, Math.min(1.5, pitch + dy * 0.01));
  drag.x = ev.clientX;
  drag.y = ev.clientY;
  draw();
});
canvas.addEventListener("pointerup", (ev) => { if (drag && !drag.moved) pick(ev); drag = null; });
window.addEventListener("resize", draw);

await init();
$("random").onclick = () => { $("edges").value = sampleGraph(40, 0.1, BigInt($("seed").value || 0)); };
$("layout").onclick = doLayout;
$("score").onclick = doScore;
$("enclose").onclick = doEnclose;
$("clear").onclick = () => { selected = []; shown = null; report(""); draw(); };
$("edges").value = sampleGraph(40, 0.1, 1n);
doLayout();
