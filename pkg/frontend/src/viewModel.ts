/** Client-side state mirror.
 *
 * The view model never computes game rules: it stores whatever the server
 * said last, and the renderer draws exactly that.  It mutates only on
 * snapshot receipt or local input, and the event feed preserves server
 * order (tick, seq), capped at the newest 500 rows.
 */

import {
  EventView,
  ScenarioDoc,
  SnapshotMessage,
  WorldDoc,
} from "./protocol.js";

export type ViewMode = "map" | "character" | "chain";

export type ConnectionStatus = "connecting" | "connected" | "lost" | "closed";

export const EVENT_FEED_CAP = 500;

export class ClientViewModel {
  world: WorldDoc | null = null;
  scenario: ScenarioDoc | null = null;
  ownNode: number | null = null;
  snapshot: SnapshotMessage | null = null;
  feed: EventView[] = [];
  mode: ViewMode = "map";
  status: ConnectionStatus = "connecting";
  pickerError: string | null = null;
  selectedTarget: number | null = null;
  jumpArmed = false;

  private seenEvents = new Set<string>();

  applyWelcome(node: number, world: WorldDoc, scenario: ScenarioDoc): void {
    this.ownNode = node;
    this.world = world;
    this.scenario = scenario;
    this.status = "connected";
  }

  applySnapshot(snapshot: SnapshotMessage): void {
    this.snapshot = snapshot;
    for (const ev of snapshot.events) {
      const key = `${ev.tick}:${ev.seq}`;
      if (this.seenEvents.has(key)) continue;
      this.seenEvents.add(key);
      this.feed.push(ev);
    }
    if (this.feed.length > EVENT_FEED_CAP) {
      this.feed.splice(0, this.feed.length - EVENT_FEED_CAP);
    }
  }

  setMode(mode: ViewMode): void {
    this.mode = mode; // never blocks input; commands flow in any view
  }

  me() {
    if (this.snapshot === null || this.ownNode === null) return null;
    return this.snapshot.nodes.find((n) => n.node === this.ownNode) ?? null;
  }

  carriedBlocks(): number[] {
    return this.snapshot?.you?.carried ?? [];
  }
}
