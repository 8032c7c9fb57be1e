/** Emit a self-contained HTML page showing a GraphDocument as a network. */

import {
  GRAPH_KINDS,
  GraphDocument,
  SchemaError,
  isPlainObject,
} from "./schema.js";

function checkDocument(doc: GraphDocument): void {
  if (!isPlainObject(doc) || !Array.isArray(doc.nodes) || !Array.isArray(doc.edges)) {
    throw new SchemaError("graph document must carry nodes and edges arrays");
  }
  if (!GRAPH_KINDS.includes(doc.kind)) {
    throw new SchemaError(`unknown graph kind ${JSON.stringify(doc.kind)}`);
  }
  const ids = new Set<string>();
  for (const node of doc.nodes) {
    if (typeof node.id !== "string" || typeof node.label !== "string") {
      throw new SchemaError("graph nodes need string id and label");
    }
    if (ids.has(node.id)) {
      throw new SchemaError(`duplicate node id ${JSON.stringify(node.id)}`);
    }
    ids.add(node.id);
  }
  for (const edge of doc.edges) {
    if (!ids.has(edge.from) || !ids.has(edge.to)) {
      throw new SchemaError("edge endpoint not among the nodes");
    }
    if (typeof edge.weight !== "number" || !Number.isFinite(edge.weight) || edge.weight <= 0) {
      throw new SchemaError("edge weights must be positive finite numbers");
    }
  }
}

// Runs inside the emitted page. Kept dependency-free and ES5-flavored so the
// file works from file:// in anything remotely modern, and degrades to a
// no-op (not an exception) in DOM implementations without layout.
const RUNTIME = `
(function () {
  "use strict";
  var state = { ready: false, nodes: 0, edges: 0 };
  window.__viewer = state;
  var block = document.getElementById("graph-data");
  var doc = JSON.parse(block.textContent);
  state.nodes = doc.nodes.length;
  state.edges = doc.edges.length;
  var svg = document.getElementById("net");
  if (!svg || doc.nodes.length === 0) {
    state.ready = true;
    return;
  }

  var SVGNS = "http://www.w3.org/2000/svg";
  var n = doc.nodes.length;
  var size = 1000;
  var index = {};
  var labels = {};
  var pos = new Array(n);
  for (var i = 0; i < n; i++) {
    index[doc.nodes[i].id] = i;
    labels[doc.nodes[i].id] = doc.nodes[i].label;
    var angle = (2 * Math.PI * i) / n;
    pos[i] = {
      x: size / 2 + size * 0.38 * Math.cos(angle),
      y: size / 2 + size * 0.38 * Math.sin(angle)
    };
  }
  var links = doc.edges.map(function (e) {
    return [index[e.from], index[e.to]];
  });

  // spring relaxation; round count shrinks as the graph grows
  var k = Math.sqrt((size * size) / n);
  var rounds = Math.max(40, Math.min(250, Math.floor(24000 / n)));
  for (var r = 0; r < rounds; r++) {
    var heat = (size / 12) * (1 - r / rounds) + 1;
    var dx = new Float64Array(n);
    var dy = new Float64Array(n);
    for (var a = 0; a < n; a++) {
      for (var b = a + 1; b < n; b++) {
        var vx = pos[a].x - pos[b].x;
        var vy = pos[a].y - pos[b].y;
        var d2 = vx * vx + vy * vy || 0.01;
        var push = (k * k) / d2;
        dx[a] += vx * push; dy[a] += vy * push;
        dx[b] -= vx * push; dy[b] -= vy * push;
      }
    }
    for (var m = 0; m < links.length; m++) {
      var s = links[m][0];
      var t = links[m][1];
      var ex = pos[s].x - pos[t].x;
      var ey = pos[s].y - pos[t].y;
      var stretch = Math.sqrt(ex * ex + ey * ey) / k || 0.001;
      dx[s] -= ex * stretch; dy[s] -= ey * stretch;
      dx[t] += ex * stretch; dy[t] += ey * stretch;
    }
    for (var c = 0; c < n; c++) {
      var len = Math.sqrt(dx[c] * dx[c] + dy[c] * dy[c]) || 1;
      var step = Math.min(len, heat);
      pos[c].x += (dx[c] / len) * step;
      pos[c].y += (dy[c] / len) * step;
    }
  }

  var wmin = Infinity;
  var wmax = -Infinity;
  doc.edges.forEach(function (e) {
    wmin = Math.min(wmin, e.weight);
    wmax = Math.max(wmax, e.weight);
  });
  function thickness(w) {
    if (wmax === wmin) { return 2; }
    return 0.75 + 5.25 * ((w - wmin) / (wmax - wmin));
  }

  var edgeLayer = document.createElementNS(SVGNS, "g");
  doc.edges.forEach(function (e) {
    var pa = pos[index[e.from]];
    var pb = pos[index[e.to]];
    var line = document.createElementNS(SVGNS, "line");
    line.setAttribute("class", "edge");
    line.setAttribute("x1", pa.x.toFixed(2));
    line.setAttribute("y1", pa.y.toFixed(2));
    line.setAttribute("x2", pb.x.toFixed(2));
    line.setAttribute("y2", pb.y.toFixed(2));
    line.setAttribute("stroke-width", thickness(e.weight).toFixed(2));
    var tip = document.createElementNS(SVGNS, "title");
    tip.textContent = labels[e.from] + " - " + labels[e.to] + ": " + e.weight;
    line.appendChild(tip);
    edgeLayer.appendChild(line);
  });
  var nodeLayer = document.createElementNS(SVGNS, "g");
  doc.nodes.forEach(function (node) {
    var p = pos[index[node.id]];
    var dot = document.createElementNS(SVGNS, "circle");
    dot.setAttribute("class", "node");
    dot.setAttribute("cx", p.x.toFixed(2));
    dot.setAttribute("cy", p.y.toFixed(2));
    dot.setAttribute("r", "6");
    var tip = document.createElementNS(SVGNS, "title");
    tip.textContent = node.label;
    dot.appendChild(tip);
    nodeLayer.appendChild(dot);
    if (n <= 60) {
      var tag = document.createElementNS(SVGNS, "text");
      tag.setAttribute("class", "tag");
      tag.setAttribute("x", (p.x + 9).toFixed(2));
      tag.setAttribute("y", (p.y + 4).toFixed(2));
      tag.textContent = node.label;
      nodeLayer.appendChild(tag);
    }
  });
  svg.appendChild(edgeLayer);
  svg.appendChild(nodeLayer);

  var minX = Infinity, minY = Infinity, maxX = -Infinity, maxY = -Infinity;
  pos.forEach(function (p) {
    minX = Math.min(minX, p.x); maxX = Math.max(maxX, p.x);
    minY = Math.min(minY, p.y); maxY = Math.max(maxY, p.y);
  });
  var pad = 40;
  var vb = {
    x: minX - pad,
    y: minY - pad,
    w: Math.max(maxX - minX + 2 * pad, 1),
    h: Math.max(maxY - minY + 2 * pad, 1)
  };
  function applyView() {
    svg.setAttribute("viewBox", vb.x + " " + vb.y + " " + vb.w + " " + vb.h);
  }
  applyView();

  var drag = null;
  svg.addEventListener("mousedown", function (ev) {
    drag = { x: ev.clientX, y: ev.clientY };
  });
  window.addEventListener("mouseup", function () {
    drag = null;
  });
  window.addEventListener("mousemove", function (ev) {
    if (!drag) { return; }
    var rect = svg.getBoundingClientRect();
    var scale = vb.w / (rect.width || 1);
    vb.x -= (ev.clientX - drag.x) * scale;
    vb.y -= (ev.clientY - drag.y) * scale;
    drag = { x: ev.clientX, y: ev.clientY };
    applyView();
  });
  svg.addEventListener("wheel", function (ev) {
    ev.preventDefault();
    var rect = svg.getBoundingClientRect();
    var fx = rect.width ? (ev.clientX - rect.left) / rect.width : 0.5;
    var fy = rect.height ? (ev.clientY - rect.top) / rect.height : 0.5;
    var factor = ev.deltaY > 0 ? 1.2 : 1 / 1.2;
    var nw = vb.w * factor;
    var nh = vb.h * factor;
    vb.x += (vb.w - nw) * fx;
    vb.y += (vb.h - nh) * fy;
    vb.w = nw;
    vb.h = nh;
    applyView();
  }, { passive: false });

  state.ready = true;
})();
`;

const STYLE = `
  * { margin: 0; box-sizing: border-box; }
  body { font-family: system-ui, sans-serif; background: #fafbfc; color: #1c2330; }
  header { padding: 10px 16px; border-bottom: 1px solid #d8dde6; background: #fff; }
  header h1 { font-size: 16px; font-weight: 600; }
  header p { font-size: 12px; color: #5d6778; margin-top: 2px; }
  svg { display: block; width: 100vw; height: calc(100vh - 58px); cursor: grab; }
  svg:active { cursor: grabbing; }
  .edge { stroke: #8a93a6; stroke-opacity: 0.55; }
  .node { fill: #3b74b8; stroke: #fff; stroke-width: 1.5; }
  .node:hover { fill: #21476e; }
  .tag { font-size: 10px; fill: #333; pointer-events: none; }
  .notice { padding: 48px 16px; text-align: center; color: #5d6778; font-size: 14px; }
`;

export function renderPage(doc: GraphDocument): string {
  checkDocument(doc);
  // "<\\/" keeps a label like "</script>" from ending the data block early;
  // JSON.parse reads the escaped slash back as "/".
  const payload = JSON.stringify(doc).replace(/<\//g, "<\\/");
  const body = doc.nodes.length
    ? `<svg id="net" xmlns="http://www.w3.org/2000/svg"></svg>`
    : `<p class="notice">no data to display at this weight cutoff</p>`;
  return `<!DOCTYPE html>
<html lang="en">
<head>
<meta charset="utf-8">
<title>${doc.kind} network</title>
<style>${STYLE}</style>
</head>
<body>
<header>
<h1>${doc.kind} network</h1>
<p>${doc.nodes.length} nodes, ${doc.edges.length} edges. Drag to pan, scroll to zoom, hover for labels.</p>
</header>
${body}
<script type="application/json" id="graph-data">${payload}</script>
<script>${RUNTIME}</script>
</body>
</html>
`;
}
