/** Pure rendering: view model in, frame description out.
 *
 * Descriptions are plain data so tests can assert on them; drawFrame paints
 * a description onto a canvas.  Nothing here decides game rules, it only
 * projects what the server sent.  The one client-side computation is the
 * coverage disc radius (distance where the clear-air link margin hits
 * zero), a visual aid derived from the static radio parameters shipped in
 * the welcome message.
 */

import { ACTIVITY_MARKERS, TILE_ROAD } from "./protocol.js";
import { ClientViewModel, ViewMode } from "./viewModel.js";

export interface TileOp {
  op: "tile";
  x: number;
  y: number;
  kind: number;
}

export interface DiscOp {
  op: "coverage-disc";
  x: number;
  y: number;
  radiusTiles: number;
  tech: string;
}

export interface SpriteOp {
  op: "node-sprite";
  x: number;
  y: number;
  character: string;
  role: "full" | "half";
  self: boolean;
  active: boolean;
  selected: boolean;
  carrying: number;
}

export interface BarOp {
  op: "bar";
  label: string;
  fraction: number;
  text: string;
}

export interface FeedRowOp {
  op: "feed-row";
  marker: string;
  tick: number;
  type: string;
  text: string;
}

export interface ChainBlockOp {
  op: "chain-block";
  index: number;
  label: string;
}

export interface TextOp {
  op: "text";
  text: string;
}

export type DrawOp = TileOp | DiscOp | SpriteOp | BarOp | FeedRowOp | ChainBlockOp | TextOp;

export interface FrameDescription {
  mode: ViewMode | "connect";
  ops: DrawOp[];
}

export class NoWorldYet extends Error {}

export function coverageRadiusTiles(
  stationPowerDbm: number,
  sensitivityDbm: number,
  refLossDb: number,
  exponent: number,
): number {
  const budget = stationPowerDbm - sensitivityDbm - refLossDb;
  if (budget < 0) return 0;
  return Math.pow(10, budget / (10 * exponent));
}

export function render(vm: ClientViewModel, mode: ViewMode): FrameDescription {
  if (vm.world === null || vm.scenario === null) {
    throw new NoWorldYet("no world grid received yet");
  }
  switch (mode) {
    case "map":
      return { mode, ops: mapOps(vm) };
    case "character":
      return { mode, ops: characterOps(vm) };
    case "chain":
      return { mode, ops: chainOps(vm) };
  }
}

function mapOps(vm: ClientViewModel): DrawOp[] {
  const world = vm.world!;
  const scenario = vm.scenario!;
  const ops: DrawOp[] = [];
  for (let y = 0; y < world.height; y++) {
    for (let x = 0; x < world.width; x++) {
      ops.push({ op: "tile", x, y, kind: world.tiles[y][x] });
    }
  }
  const exponent = scenario.env.exponent[world.geography];
  for (const station of world.stations) {
    const radio = scenario.radios[station.tech];
    if (!radio) continue;
    ops.push({
      op: "coverage-disc",
      x: station.pos[0],
      y: station.pos[1],
      radiusTiles: coverageRadiusTiles(
        station.tx_power_dbm,
        radio.sensitivity_dbm,
        radio.ref_loss_db,
        exponent,
      ),
      tech: station.tech,
    });
  }
  for (const node of vm.snapshot?.nodes ?? []) {
    ops.push({
      op: "node-sprite",
      x: node.pos[0],
      y: node.pos[1],
      character: node.character,
      role: node.role,
      self: node.node === vm.ownNode,
      active: node.active,
      selected: node.node === vm.selectedTarget,
      carrying: node.carried_count,
    });
  }
  return ops;
}

function characterOps(vm: ClientViewModel): DrawOp[] {
  const me = vm.me();
  if (me === null) {
    return [{ op: "text", text: "waiting for the first snapshot" }];
  }
  const energyFraction = me.initial_energy_mu > 0 ? me.energy_mu / me.initial_energy_mu : 0;
  const ops: DrawOp[] = [
    { op: "text", text: `${me.character} (${me.role} node)` },
    {
      op: "bar",
      label: "energy",
      fraction: energyFraction,
      text: `${(me.energy_mu / 1000).toFixed(1)} / ${(me.initial_energy_mu / 1000).toFixed(0)}`,
    },
    {
      op: "bar",
      label: "connectivity",
      fraction: me.connectivity,
      text: `${(me.connectivity * 100).toFixed(1)}%`,
    },
    { op: "text", text: me.active ? `carrying ${vm.carriedBlocks().length} block(s)` : "depleted" },
  ];
  const job = vm.snapshot?.you?.job;
  if (job) {
    ops.push({ op: "text", text: `mining block ${job.block}: ${job.attempts} attempts` });
  }
  return ops;
}

function chainOps(vm: ClientViewModel): DrawOp[] {
  const ops: DrawOp[] = [];
  const chain = vm.snapshot?.chain;
  ops.push({
    op: "text",
    text: chain ? `chain length ${chain.length}, head ${chain.head}` : "chain empty",
  });
  const length = chain?.length ?? 0;
  for (let i = Math.max(0, length - 12); i < length; i++) {
    ops.push({ op: "chain-block", index: i, label: `#${i + 1}` });
  }
  for (const ev of vm.feed) {
    ops.push({
      op: "feed-row",
      marker: ACTIVITY_MARKERS[ev.type] ?? "-",
      tick: ev.tick,
      type: ev.type,
      text: feedText(ev.type, ev.data),
    });
  }
  return ops;
}

function feedText(type: string, data: Record<string, unknown>): string {
  switch (type) {
    case "block_generated":
      return `block ${data.block} generated at node ${data.creator}`;
    case "transfer_completed":
      return `block ${data.block} handed ${data.from} -> ${data.to} over ${data.tech}`;
    case "mining_started":
      return `node ${data.miner} starts mining block ${data.block}`;
    case "mining_attempted":
      return `node ${data.miner} tried ${data.attempts} hashes on block ${data.block}`;
    case "mining_result":
      return data.found
        ? `block ${data.block} validated by node ${data.miner}`
        : `block ${data.block} validation failed`;
    case "block_appended":
      return `block ${data.block} appended at height ${data.height}`;
    case "block_expired":
      return `block ${data.block} expired (${data.reason})`;
    case "energy_depleted":
      return `node ${data.node} ran out of energy`;
    case "illegal_command":
      return `node ${data.node}: ${data.command} rejected (${data.reason})`;
    default:
      return type;
  }
}

// -- canvas painting ---------------------------------------------------------

const TILE_COLORS: Record<number, string> = {
  0: "#9a9a8e", // road
  1: "#3d5a3d", // open ground
  2: "#5a4632", // building
  3: "#7a2f2f", // car
};

const TECH_COLORS: Record<string, string> = { "3g": "rgba(80,160,255,0.14)", "5g": "rgba(200,120,255,0.14)" };

export function drawFrame(
  ctx: CanvasRenderingContext2D,
  frame: FrameDescription,
  tilePx: number,
): void {
  ctx.clearRect(0, 0, ctx.canvas.width, ctx.canvas.height);
  ctx.font = `${Math.max(10, tilePx)}px monospace`;
  let textY = 24;
  let barY = 60;
  let feedY = 140;
  let chainX = 10;
  for (const op of frame.ops) {
    switch (op.op) {
      case "tile":
        ctx.fillStyle = TILE_COLORS[op.kind] ?? "#000";
        ctx.fillRect(op.x * tilePx, op.y * tilePx, tilePx, tilePx);
        if (op.kind === TILE_ROAD) {
          ctx.strokeStyle = "rgba(255,255,255,0.08)";
          ctx.strokeRect(op.x * tilePx, op.y * tilePx, tilePx, tilePx);
        }
        break;
      case "coverage-disc": {
        ctx.fillStyle = TECH_COLORS[op.tech] ?? "rgba(255,255,255,0.1)";
        ctx.beginPath();
        ctx.arc(
          (op.x + 0.5) * tilePx,
          (op.y + 0.5) * tilePx,
          op.radiusTiles * tilePx,
          0,
          Math.PI * 2,
        );
        ctx.fill();
        ctx.fillStyle = "#fff";
        ctx.fillText(op.tech, op.x * tilePx, op.y * tilePx);
        break;
      }
      case "node-sprite": {
        const cx = (op.x + 0.5) * tilePx;
        const cy = (op.y + 0.5) * tilePx;
        ctx.fillStyle = op.active ? (op.self ? "#ffd23f" : "#4fc3f7") : "#555";
        ctx.beginPath();
        ctx.arc(cx, cy, tilePx * 0.45, 0, Math.PI * 2);
        ctx.fill();
        if (op.selected) {
          ctx.strokeStyle = "#ff5252";
          ctx.stroke();
        }
        ctx.fillStyle = "#111";
        ctx.fillText(op.role === "full" ? "F" : "H", cx - tilePx * 0.25, cy + tilePx * 0.3);
        if (op.carrying > 0) {
          ctx.fillStyle = "#ff9800";
          ctx.fillRect(cx + tilePx * 0.2, cy - tilePx * 0.7, tilePx * 0.35, tilePx * 0.35);
        }
        break;
      }
      case "bar": {
        ctx.fillStyle = "#ccc";
        ctx.fillText(`${op.label}: ${op.text}`, 10, barY - 6);
        ctx.strokeStyle = "#888";
        ctx.strokeRect(10, barY, 260, 18);
        ctx.fillStyle = op.label === "energy" ? "#7cb342" : "#29b6f6";
        ctx.fillRect(10, barY, 260 * Math.max(0, Math.min(1, op.fraction)), 18);
        barY += 48;
        break;
      }
      case "feed-row":
        ctx.fillStyle = "#ddd";
        ctx.fillText(`[${op.marker}] t${op.tick} ${op.text}`, 10, feedY);
        feedY += 16;
        break;
      case "chain-block":
        ctx.fillStyle = "#6d4c41";
        ctx.fillRect(chainX, 90, 34, 24);
        ctx.fillStyle = "#fff";
        ctx.fillText(op.label, chainX + 4, 107);
        chainX += 40;
        break;
      case "text":
        ctx.fillStyle = "#eee";
        ctx.fillText(op.text, 10, textY);
        textY += 20;
        break;
    }
  }
}
