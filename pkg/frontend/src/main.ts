/** Browser bootstrap: canvas, view switching, status banner, connection. */

import { connect, JoinRejected, SessionHandle } from "./net.js";
import { drawFrame, NoWorldYet, render } from "./render.js";
import { InputMapper, isMessage } from "./input.js";
import { ViewMode } from "./viewModel.js";

const params = new URLSearchParams(window.location.search);
const serverUrl = params.get("server") ?? "ws://localhost:8765";
const player = params.get("player") ?? `guest-${Math.floor(Math.random() * 1000)}`;
const character = params.get("character") ?? "Alice";

const root = document.querySelector<HTMLDivElement>("#app");
if (!root) throw new Error("missing #app root element");

root.innerHTML = `
  <div class="shell">
    <div class="topbar">
      <strong>chaincourier</strong>
      <span id="viewLabel">map view</span>
      <span class="keys">1 map | 2 character | 3 chain | arrows move | J+arrow jump |
        click node, T transfer | M mine</span>
      <span id="status" class="status">connecting</span>
      <button id="retry" class="hidden">reconnect</button>
    </div>
    <canvas id="game" width="960" height="640"></canvas>
    <div id="hint" class="hint"></div>
  </div>
`;

const canvas = document.querySelector<HTMLCanvasElement>("#game")!;
const ctx = canvas.getContext("2d")!;
const statusEl = document.querySelector<HTMLSpanElement>("#status")!;
const hintEl = document.querySelector<HTMLDivElement>("#hint")!;
const viewLabel = document.querySelector<HTMLSpanElement>("#viewLabel")!;
const retryButton = document.querySelector<HTMLButtonElement>("#retry")!;

let handle: SessionHandle | null = null;
let mapper = new InputMapper();
let mode: ViewMode = "map";

function repaint(): void {
  if (handle === null) return;
  const vm = handle.vm;
  statusEl.textContent = vm.status;
  retryButton.classList.toggle("hidden", vm.status !== "lost");
  try {
    const tilePx = vm.world
      ? Math.min(canvas.width / vm.world.width, canvas.height / vm.world.height)
      : 10;
    drawFrame(ctx, render(vm, mode), tilePx);
  } catch (err) {
    if (err instanceof NoWorldYet) {
      ctx.clearRect(0, 0, canvas.width, canvas.height);
      ctx.fillStyle = "#eee";
      ctx.fillText(`connecting to ${serverUrl} ...`, 20, 30);
    } else {
      throw err;
    }
  }
}

// Snapshots arrive ~10/s; one repaint per animation frame is plenty.
let dirty = true;
function frameLoop(): void {
  if (dirty) {
    dirty = false;
    repaint();
  }
  requestAnimationFrame(frameLoop);
}
requestAnimationFrame(frameLoop);

window.addEventListener("keydown", (ev) => {
  if (handle === null) return;
  if (ev.key === "1" || ev.key === "2" || ev.key === "3") {
    mode = (["map", "character", "chain"] as ViewMode[])[Number(ev.key) - 1];
    handle.vm.setMode(mode);
    viewLabel.textContent = `${mode} view`;
    dirty = true;
    return;
  }
  const outcome = mapper.handleKey(ev.key, handle.vm);
  if (outcome === null) return;
  ev.preventDefault();
  if (isMessage(outcome)) {
    handle.send(outcome.message);
    hintEl.textContent = "";
  } else {
    hintEl.textContent = outcome.hint;
  }
  dirty = true;
});

canvas.addEventListener("click", (ev) => {
  if (handle === null || handle.vm.world === null || mode !== "map") return;
  const rect = canvas.getBoundingClientRect();
  const world = handle.vm.world;
  const tilePx = Math.min(canvas.width / world.width, canvas.height / world.height);
  const tileX = Math.floor((ev.clientX - rect.left) / tilePx);
  const tileY = Math.floor((ev.clientY - rect.top) / tilePx);
  const outcome = mapper.handleMapClick(tileX, tileY, handle.vm);
  hintEl.textContent = outcome && !isMessage(outcome) ? outcome.hint : "";
  dirty = true;
});

async function start(): Promise<void> {
  try {
    handle = await connect(serverUrl, player, character, { onUpdate: () => (dirty = true) });
    mapper = new InputMapper();
    dirty = true;
  } catch (err) {
    if (err instanceof JoinRejected) {
      statusEl.textContent = `join failed: ${err.reason}`;
      retryButton.classList.remove("hidden");
    } else {
      statusEl.textContent = "server unreachable";
      retryButton.classList.remove("hidden");
    }
  }
}

retryButton.addEventListener("click", async () => {
  retryButton.classList.add("hidden");
  if (handle !== null) {
    try {
      handle = await handle.retry();
      mapper = new InputMapper();
      dirty = true;
    } catch {
      retryButton.classList.remove("hidden");
    }
  } else {
    await start();
  }
});

void start();
