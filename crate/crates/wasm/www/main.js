import init, { computePly, layoutGraph, refinePly } from "./pkg/plysweep_wasm.js";

const $ = (id) => document.getElementById(id);
const canvas = $("view");
const ctx = canvas.getContext("2d");

let graph = null;
let result = null;

function status(text, error = false) {
  $("status").textContent = text;
  $("status").style.color = error ? "#b00" : "";
}

function log(line) {
  $("log").textContent = line + "\n" + $("log").textContent;
}

// random recursive tree plus extra edges, so the graph is connected
function randomGraph(n, m, seed) {
  let s = seed >>> 0 || 1;
  const rnd = () => ((s = (s * 1664525 + 1013904223) >>> 0) / 2 ** 32);
  const key = (u, v) => (u < v ? `${u},${v}` : `${v},${u}`);
  const seen = new Set();
  const edges = [];
  for (let v = 1; v < n; v++) {
    const u = Math.floor(rnd() * v);
    seen.add(key(u, v));
    edges.push([u, v]);
  }
  const cap = (n * (n - 1)) / 2;
  while (edges.length < Math.min(m, cap)) {
    const u = Math.floor(rnd() * n), v = Math.floor(rnd() * n);
    if (u === v || seen.has(key(u, v))) continue;
    seen.add(key(u, v));
    edges.push([u, v]);
  }
  const vertices = Array.from({ length: n }, (_, id) => ({ id, x: rnd() * 1000, y: rnd() * 1000 }));
  return { vertices, edges };
}

function setGraph(g) {
  graph = g;
  $("graph").value = JSON.stringify(g);
  recompute();
}

function readGraph() {
  try {
    graph = JSON.parse($("graph").value);
    return true;
  } catch (e) {
    status(`bad JSON: ${e.message}`, true);
    return false;
  }
}

function recompute() {
  try {
    const t = performance.now();
    result = JSON.parse(computePly(JSON.stringify(graph)));
    const ms = (performance.now() - t).toFixed(1);
    const c = result.report.counters;
    status(`ply ${result.report.ply}`);
    log(`ply ${result.report.ply}  events ${c.events}  postponed ${c.postponed}  ${ms} ms`);
    draw();
  } catch (e) {
    status(String(e.message ?? e), true);
  }
}

function draw() {
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  if (!graph || graph.vertices.length === 0) return;
  const disks = $("showDisks").checked ? result?.disks ?? [] : [];
  let [x0, y0, x1, y1] = [Infinity, Infinity, -Infinity, -Infinity];
  for (const v of graph.vertices) {
    x0 = Math.min(x0, v.x); y0 = Math.min(y0, v.y);
    x1 = Math.max(x1, v.x); y1 = Math.max(y1, v.y);
  }
  for (const d of disks) {
    x0 = Math.min(x0, d.center.x - d.radius); y0 = Math.min(y0, d.center.y - d.radius);
    x1 = Math.max(x1, d.center.x + d.radius); y1 = Math.max(y1, d.center.y + d.radius);
  }
  const pad = 10;
  const scale = (canvas.width - 2 * pad) / Math.max(x1 - x0, y1 - y0, 1e-9);
  const sx = (x) => pad + (x - x0) * scale;
  const sy = (y) => pad + (y - y0) * scale;

  ctx.fillStyle = "rgba(40, 110, 220, 0.08)";
  ctx.strokeStyle = "rgba(40, 110, 220, 0.35)";
  for (const d of disks) {
    ctx.beginPath();
    ctx.arc(sx(d.center.x), sy(d.center.y), d.radius * scale, 0, 2 * Math.PI);
    ctx.fill();
    ctx.stroke();
  }
  ctx.strokeStyle = "#444";
  ctx.beginPath();
  for (const [u, v] of graph.edges) {
    const a = graph.vertices.find((w) => w.id === u), b = graph.vertices.find((w) => w.id === v);
    ctx.moveTo(sx(a.x), sy(a.y));
    ctx.lineTo(sx(b.x), sy(b.y));
  }
  ctx.stroke();
  ctx.fillStyle = "#222";
  for (const v of graph.vertices) {
    ctx.beginPath();
    ctx.arc(sx(v.x), sy(v.y), 2.5, 0, 2 * Math.PI);
    ctx.fill();
  }
  // deepest regions
  ctx.fillStyle = "#d22";
  for (const r of result?.report.regions ?? []) {
    if (r.ply !== result.report.ply) continue;
    ctx.beginPath();
    ctx.arc(sx(r.point.x), sy(r.point.y), 4, 0, 2 * Math.PI);
    ctx.fill();
  }
}

async function main() {
  await init();
  $("gen").onclick = () => setGraph(randomGraph(+$("n").value, +$("m").value, Date.now()));
  $("ply").onclick = () => readGraph() && recompute();
  $("showDisks").onchange = draw;
  $("layout").onclick = () => {
    if (!readGraph()) return;
    try {
      setGraph(JSON.parse(layoutGraph(JSON.stringify(graph), $("alg").value, +$("seed").value)));
    } catch (e) {
      status(String(e.message ?? e), true);
    }
  };
  $("refine").onclick = () => {
    if (!readGraph()) return;
    status("refining…");
    // let the status paint before the blocking call
    setTimeout(() => {
      try {
        const t = performance.now();
        const r = JSON.parse(refinePly(JSON.stringify(graph), +$("iters").value, +$("seed").value));
        log(`refined to ply ${r.ply}${r.fallback ? " (circular fallback)" : ""} in ${(performance.now() - t).toFixed(0)} ms`);
        setGraph(r.graph);
      } catch (e) {
        status(String(e.message ?? e), true);
      }
    }, 10);
  };
  setGraph(JSON.parse(layoutGraph(JSON.stringify(randomGraph(40, 60, 1)), "organic", 0)));
}

main();
