import init, { Model, sampleCorpus } from "./pkg/wsi_wasm.js";

const $ = (id) => document.getElementById(id);
const COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];
const SVG = "http://www.w3.org/2000/svg";
let model = null;

function svg(tag, attrs, text) {
  const el = document.createElementNS(SVG, tag);
  for (const [k, v] of Object.entries(attrs)) el.setAttribute(k, v);
  if (text !== undefined) el.textContent = text;
  return el;
}

function draw(view) {
  const g = $("graph");
  g.replaceChildren();
  const n = view.nodes.length;
  // nodes on a circle, grouped by cluster so clusters sit on one arc
  const order = view.nodes.map((node, i) => i).sort((a, b) => view.nodes[a].cluster - view.nodes[b].cluster || a - b);
  const pos = new Array(n);
  order.forEach((i, r) => {
    const angle = (2 * Math.PI * r) / n - Math.PI / 2;
    pos[i] = [200 * Math.cos(angle), 200 * Math.sin(angle)];
  });
  let maxEdge = 0;
  view.adjacency.forEach((row) => row.forEach((w) => (maxEdge = Math.max(maxEdge, w))));
  for (let i = 0; i < n; i++) {
    for (let j = i + 1; j < n; j++) {
      const w = view.adjacency[i][j];
      if (w <= 0 || maxEdge === 0) continue;
      g.append(svg("line", {
        x1: pos[i][0], y1: pos[i][1], x2: pos[j][0], y2: pos[j][1],
        stroke: "#888", "stroke-opacity": (0.1 + 0.8 * w / maxEdge).toFixed(3), "stroke-width": 1 + 3 * w / maxEdge,
      }));
    }
  }
  const maxW = Math.max(...view.nodes.map((node) => node.weight));
  view.nodes.forEach((node, i) => {
    const [x, y] = pos[i];
    const circle = svg("circle", { cx: x, cy: y, r: 5 + 12 * Math.sqrt(node.weight / maxW), fill: COLORS[node.cluster % COLORS.length] });
    circle.append(svg("title", {}, `basis ${node.basis}: ${node.words.join(", ")}`));
    g.append(circle);
    const anchor = x < -1 ? "end" : x > 1 ? "start" : "middle";
    g.append(svg("text", { x: x * 1.12, y: y * 1.12 + 4, "text-anchor": anchor, "font-size": 10 }, node.words.slice(0, 2).join(" ")));
  });
  g.append(svg("text", { x: 0, y: 5, "text-anchor": "middle", "font-weight": "bold" }, view.query));
}

function details(view) {
  const rows = [...view.nodes]
    .sort((a, b) => a.cluster - b.cluster || b.weight - a.weight)
    .map((node) => `<tr><td style="color:${COLORS[node.cluster % COLORS.length]}">${node.cluster + 1}</td>` +
      `<td>${node.basis}</td><td>${node.weight.toPrecision(3)}</td><td>${node.words.join(", ")}</td></tr>`)
    .join("");
  $("details").innerHTML =
    `<p>${view.nodes.length} relevant bases (threshold ${view.threshold.toPrecision(3)}), normalized cut ${view.normalized_cut.toFixed(3)}</p>` +
    `<table><tr><th>cluster</th><th>basis</th><th>w<sub>q</sub></th><th>top words</th></tr>${rows}</table>`;
}

function showTopics() {
  const topics = JSON.parse(model.topics(6));
  $("topics").innerHTML = topics.map((t) => `<div><b>${t.basis}</b> ${t.words.join(", ")}</div>`).join("");
}

$("train").addEventListener("click", () => {
  $("train-status").textContent = "training...";
  $("show").disabled = true;
  // let the status paint before the blocking call
  setTimeout(() => {
    try {
      const t0 = performance.now();
      const text = sampleCorpus(Number($("tokens").value), BigInt($("seed").value));
      model = new Model(text, Number($("dims").value), Number($("epochs").value), BigInt($("seed").value));
      const secs = ((performance.now() - t0) / 1000).toFixed(1);
      $("train-status").textContent = `${model.vocabSize()} words, trained in ${secs} s`;
      $("show").disabled = false;
      showTopics();
      show();
    } catch (e) {
      $("train-status").textContent = `error: ${e.message ?? e}`;
    }
  }, 20);
});

function show() {
  try {
    const view = JSON.parse(model.egoNetwork($("word").value.trim().toLowerCase(), Number($("k").value), $("exclude").checked));
    $("word-status").textContent = "";
    draw(view);
    details(view);
  } catch (e) {
    $("word-status").textContent = `error: ${e.message ?? e}`;
  }
}

$("show").addEventListener("click", show);
$("word").addEventListener("keydown", (e) => { if (e.key === "Enter" && model) show(); });

await init();
