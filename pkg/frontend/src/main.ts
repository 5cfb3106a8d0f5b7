import { beltStripHtml, selectedColumn } from "./belt.js";
import { CockpitClient } from "./client.js";
import { CourseView } from "./course.js";
import { gridHtml } from "./gridview.js";
import { connectSession } from "./net.js";
import { Snapshot } from "./types.js";

const LAYOUTS = [
  "easy-a", "easy-b", "easy-c",
  "medium-d", "medium-e", "medium-f",
  "hard-g", "hard-h", "hard-i",
];

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

function main() {
  const canvas = el<HTMLCanvasElement>("course");
  const belt = el<HTMLDivElement>("belt");
  const grid = el<HTMLDivElement>("grid");
  const statusBar = el<HTMLDivElement>("status");
  const banner = el<HTMLDivElement>("banner");
  const picker = el<HTMLSelectElement>("layout");
  const modeBtn = el<HTMLButtonElement>("mode");
  const resetBtn = el<HTMLButtonElement>("reset");
  const speed = el<HTMLInputElement>("speed");

  for (const name of LAYOUTS) {
    const opt = document.createElement("option");
    opt.value = name;
    opt.textContent = name;
    picker.appendChild(opt);
  }

  const view = new CourseView(canvas);
  const draw = (snap: Snapshot) => {
    view.draw(snap);
    belt.innerHTML = beltStripHtml(snap.belt, selectedColumn(snap.grid));
    grid.innerHTML = gridHtml(snap.grid);
    statusBar.textContent =
      `${snap.layout}  mode=${snap.mode}  t=${(snap.t / 1000).toFixed(1)}s  ${snap.status}`;
    if (picker.value !== snap.layout) picker.value = snap.layout;
    modeBtn.textContent = snap.mode === "depth" ? "open path" : "depth";
  };

  const client = new CockpitClient({ send: (data) => net.send(data) }, draw);
  const url = `ws://${location.hostname}:${location.port || "8080"}/session`;
  const net = connectSession(url, {
    onText: (chunk) => client.feed(chunk),
    onStatus: (up) => {
      banner.textContent = up ? "" : "reconnecting...";
      banner.className = up ? "hidden" : "banner";
    },
  });

  window.addEventListener("keydown", (ev) => {
    if (ev.target instanceof HTMLSelectElement || ev.target instanceof HTMLInputElement) return;
    if (client.handleKey(ev.key)) ev.preventDefault();
  });
  picker.addEventListener("change", () => client.setLayout(picker.value));
  modeBtn.addEventListener("click", () =>
    client.send({ set_mode: client.last?.mode === "depth" ? "open_path" : "depth" })
  );
  resetBtn.addEventListener("click", () => client.send({ reset: true }));
  speed.addEventListener("change", () => client.setSpeed(Number(speed.value)));
}

window.addEventListener("load", main);
