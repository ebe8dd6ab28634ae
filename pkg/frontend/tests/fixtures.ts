import { ScenarioDoc, SnapshotMessage, WorldDoc } from "../src/protocol";

export function tinyWorld(): WorldDoc {
  return {
    width: 4,
    height: 3,
    geography: "urban",
    tile_size_m: 10,
    tiles: [
      [0, 0, 0, 0],
      [1, 2, 3, 0],
      [0, 0, 0, 0],
    ],
    stations: [{ tech: "3g", pos: [3, 2], tx_power_dbm: 43 }],
  };
}

export function tinyScenario(): ScenarioDoc {
  return {
    seed: 1,
    tick_rate: 10,
    block_interval_n: 5,
    difficulty_bits: 8,
    expiry_ticks: 3000,
    env: {
      exponent: { urban: 3.5, rural: 2.7 },
      obstacle_loss: { building: 15, car: 3 },
    },
    radios: {
      bluetooth: { tx_power_dbm: 0, sensitivity_dbm: -90, ref_loss_db: 40 },
      wifi: { tx_power_dbm: 20, sensitivity_dbm: -85, ref_loss_db: 40 },
      "3g": { tx_power_dbm: 43, sensitivity_dbm: -110, ref_loss_db: 40 },
      "5g": { tx_power_dbm: 40, sensitivity_dbm: -100, ref_loss_db: 40 },
    },
    energy: { initial: 1000, idle_cost: 0.1, move_cost: 1, transmit_cost: 5, hash_cost: 0.01 },
    catalog: [
      { name: "Alice", role: "full", radios: ["wifi", "3g"] },
      { name: "Bob", role: "half", radios: ["wifi"] },
    ],
  };
}

export function snapshotAt(tick: number, extra: Partial<SnapshotMessage> = {}): SnapshotMessage {
  return {
    v: 1,
    type: "snapshot",
    tick,
    nodes: [
      {
        node: 0,
        character: "Alice",
        role: "full",
        pos: [0, 0],
        energy_mu: 1_000_000,
        initial_energy_mu: 1_000_000,
        connectivity: 2 / 3,
        carried_count: 1,
        active: true,
      },
      {
        node: 1,
        character: "Bob",
        role: "half",
        pos: [1, 0],
        energy_mu: 400_000,
        initial_energy_mu: 1_000_000,
        connectivity: 1,
        carried_count: 0,
        active: true,
      },
    ],
    chain: { length: 2, head: "ab12cd34ef567890" },
    events: [],
    you: { node: 0, carried: [7], job: null },
    ...extra,
  };
}
