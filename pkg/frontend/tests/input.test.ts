import { describe, expect, it } from "vitest";

import { InputMapper, isMessage } from "../src/input";
import { ClientViewModel } from "../src/viewModel";
import { snapshotAt, tinyScenario, tinyWorld } from "./fixtures";

function connected(): ClientViewModel {
  const vm = new ClientViewModel();
  vm.applyWelcome(0, tinyWorld(), tinyScenario());
  vm.applySnapshot(snapshotAt(1));
  return vm;
}

function message(outcome: ReturnType<InputMapper["handleKey"]>) {
  if (!isMessage(outcome)) throw new Error("expected a message");
  return outcome.message as { type: string; seq: number; command: Record<string, unknown> };
}

describe("InputMapper", () => {
  it("maps arrows to move commands with increasing sequence numbers", () => {
    const vm = connected();
    const mapper = new InputMapper();
    const up = message(mapper.handleKey("ArrowUp", vm));
    expect(up.command).toEqual({ kind: "move", dir: "n" });
    const right = message(mapper.handleKey("ArrowRight", vm));
    expect(right.command).toEqual({ kind: "move", dir: "e" });
    expect(right.seq).toBe(up.seq + 1);
  });

  it("J arms a jump for the next direction", () => {
    const vm = connected();
    const mapper = new InputMapper();
    const armed = mapper.handleKey("j", vm);
    expect(isMessage(armed)).toBe(false);
    const jump = message(mapper.handleKey("ArrowDown", vm));
    expect(jump.command).toEqual({ kind: "jump", dir: "s" });
    // the arm is consumed
    const plain = message(mapper.handleKey("ArrowDown", vm));
    expect(plain.command.kind).toBe("move");
  });

  it("M mines the first carried block; without cargo only a hint shows", () => {
    const vm = connected();
    const mapper = new InputMapper();
    const mine = message(mapper.handleKey("m", vm));
    expect(mine.command).toEqual({ kind: "mine", block: 7 });
    vm.applySnapshot(snapshotAt(2, { you: { node: 0, carried: [], job: null } }));
    const outcome = mapper.handleKey("m", vm);
    expect(isMessage(outcome)).toBe(false);
  });

  it("transfer needs a selected target and a carried block", () => {
    const vm = connected();
    const mapper = new InputMapper();
    const unselected = mapper.handleKey("t", vm);
    expect(isMessage(unselected)).toBe(false);
    const click = mapper.handleMapClick(1, 0, vm);
    expect(isMessage(click)).toBe(false);
    expect(vm.selectedTarget).toBe(1);
    const transfer = message(mapper.handleKey("t", vm));
    expect(transfer.command).toEqual({ kind: "transfer", block: 7, target: 1 });
  });

  it("illegal intents still go to the server for adjudication", () => {
    // a half-role player pressing M with cargo sends the message anyway;
    // the server answers with an illegal_command event for the feed
    const vm = connected();
    vm.ownNode = 1;
    vm.applySnapshot(snapshotAt(3, { you: { node: 1, carried: [9], job: null } }));
    const mapper = new InputMapper();
    const mine = message(mapper.handleKey("m", vm));
    expect(mine.command).toEqual({ kind: "mine", block: 9 });
  });

  it("dead characters produce no messages", () => {
    const vm = connected();
    const snap = snapshotAt(4);
    snap.nodes[0].active = false;
    vm.applySnapshot(snap);
    const mapper = new InputMapper();
    expect(mapper.handleKey("ArrowUp", vm)).toBeNull();
    expect(mapper.handleKey("m", vm)).toBeNull();
  });

  it("clicking empty ground clears the selection", () => {
    const vm = connected();
    const mapper = new InputMapper();
    mapper.handleMapClick(1, 0, vm);
    expect(vm.selectedTarget).toBe(1);
    mapper.handleMapClick(3, 2, vm);
    expect(vm.selectedTarget).toBeNull();
  });
});
