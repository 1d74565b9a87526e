import init, { Demo } from "./pkg/streetlabel_web.js";

const $ = (id) => document.getElementById(id);
const canvas = $("view");
const ctx = canvas.getContext("2d");
let demo = null;

function draw(rgba) {
  const w = demo.width();
  const h = demo.height();
  canvas.width = w;
  canvas.height = h;
  ctx.putImageData(new ImageData(new Uint8ClampedArray(rgba), w, h), 0, 0);
}

function run(fn) {
  try {
    fn();
  } catch (e) {
    $("status").textContent = String(e);
  }
}

function generate() {
  run(() => {
    if (demo) demo.free();
    demo = new Demo(Number($("seed").value) >>> 0);
    draw(demo.image());
    $("status").textContent = `scene ${demo.width()} x ${demo.height()}`;
  });
}

await init();
$("generate").onclick = generate;
$("show").onclick = () =>
  run(() => {
    draw(demo.map($("layer").value, $("mode").value));
    $("status").textContent = `${$("layer").value} (${$("mode").value})`;
  });
$("place").onclick = () =>
  run(() => {
    draw(demo.place($("method").value, $("mode").value));
    $("status").textContent = demo.summary();
  });
generate();
