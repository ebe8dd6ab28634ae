/** Input mapping: key or pointer gestures become client messages.
 *
 * Arrow keys move; pressing J arms a jump for the next arrow.  Clicking a
 * node on the map selects it as transfer target, T sends the first carried
 * block there, M asks to mine the first carried block.  Illegal intents
 * are still sent (and come back as illegal_command events for the feed);
 * the one client-side guard is gestures that cannot form a message at all,
 * such as transferring with empty hands.  Dead characters produce nothing.
 */

import { ClientMessage, CommandDoc, Direction } from "./protocol.js";
import { ClientViewModel } from "./viewModel.js";

export interface InputHint {
  hint: string;
}

export type InputOutcome = { message: ClientMessage } | InputHint | null;

const ARROWS: Record<string, Direction> = {
  ArrowUp: "n",
  ArrowRight: "e",
  ArrowDown: "s",
  ArrowLeft: "w",
};

export class InputMapper {
  private seq: number;

  constructor(firstSeq = 1) {
    this.seq = firstSeq;
  }

  nextSeq(): number {
    return this.seq;
  }

  private wrap(command: CommandDoc): { message: ClientMessage } {
    return { message: { v: 1, type: "input", seq: this.seq++, command } };
  }

  handleKey(key: string, vm: ClientViewModel): InputOutcome {
    const me = vm.me();
    if (me === null || !me.active) return null;
    if (key === "j" || key === "J") {
      vm.jumpArmed = true;
      return { hint: "jump armed: pick a direction" };
    }
    const dir = ARROWS[key];
    if (dir !== undefined) {
      const kind = vm.jumpArmed ? "jump" : "move";
      vm.jumpArmed = false;
      return this.wrap({ kind, dir });
    }
    if (key === "m" || key === "M") {
      const carried = vm.carriedBlocks();
      if (carried.length === 0) return { hint: "no block to mine" };
      return this.wrap({ kind: "mine", block: carried[0] });
    }
    if (key === "t" || key === "T") {
      const carried = vm.carriedBlocks();
      if (carried.length === 0) return { hint: "no block to hand over" };
      if (vm.selectedTarget === null) return { hint: "click a node to pick a target first" };
      return this.wrap({ kind: "transfer", block: carried[0], target: vm.selectedTarget });
    }
    return null;
  }

  /** Pointer click on the map: select the node on that tile, if any. */
  handleMapClick(tileX: number, tileY: number, vm: ClientViewModel): InputOutcome {
    const snapshot = vm.snapshot;
    if (snapshot === null) return null;
    const hit = snapshot.nodes.find(
      (n) => n.pos[0] === tileX && n.pos[1] === tileY && n.node !== vm.ownNode,
    );
    if (hit === undefined) {
      vm.selectedTarget = null;
      return null;
    }
    vm.selectedTarget = hit.node;
    return { hint: `target: ${hit.character} (press T to transfer)` };
  }
}

export function isMessage(outcome: InputOutcome): outcome is { message: ClientMessage } {
  return outcome !== null && "message" in outcome;
}
