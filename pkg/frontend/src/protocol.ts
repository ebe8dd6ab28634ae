/** Wire protocol v1: one JSON document per WebSocket text frame. */

export const PROTOCOL_VERSION = 1;

export type Direction = "n" | "e" | "s" | "w";

export interface CommandDoc {
  kind: "move" | "jump" | "transfer" | "mine" | "idle";
  dir?: Direction;
  block?: number;
  target?: number;
}

export interface JoinMessage {
  v: 1;
  type: "join";
  seq: number;
  player: string;
  character: string;
}

export interface InputMessage {
  v: 1;
  type: "input";
  seq: number;
  command: CommandDoc;
}

export interface LeaveMessage {
  v: 1;
  type: "leave";
  seq: number;
}

export interface PingMessage {
  v: 1;
  type: "ping";
}

export type ClientMessage = JoinMessage | InputMessage | LeaveMessage | PingMessage;

export interface StationDoc {
  tech: string;
  pos: [number, number];
  tx_power_dbm: number;
}

/** Tile codes as sent in the world grid. */
export const TILE_ROAD = 0;
export const TILE_OPEN = 1;
export const TILE_BUILDING = 2;
export const TILE_CAR = 3;

export interface WorldDoc {
  width: number;
  height: number;
  geography: "urban" | "rural";
  tile_size_m: number;
  tiles: number[][];
  stations: StationDoc[];
}

export interface RadioDoc {
  tx_power_dbm: number;
  sensitivity_dbm: number;
  ref_loss_db: number;
}

export interface ScenarioDoc {
  seed: number;
  tick_rate: number;
  block_interval_n: number;
  difficulty_bits: number;
  expiry_ticks: number;
  env: { exponent: Record<string, number>; obstacle_loss: Record<string, number> };
  radios: Record<string, RadioDoc>;
  energy: { initial: number; [cost: string]: number };
  catalog: { name: string; role: "full" | "half"; radios: string[] }[];
  [key: string]: unknown;
}

export interface NodeView {
  node: number;
  character: string;
  role: "full" | "half";
  pos: [number, number];
  energy_mu: number;
  initial_energy_mu: number;
  connectivity: number;
  carried_count: number;
  active: boolean;
}

export interface EventView {
  tick: number;
  seq: number;
  type: string;
  data: Record<string, unknown>;
}

export interface PrivateView {
  node: number;
  carried: number[];
  job: { block: number; attempts: number } | null;
}

export interface SnapshotMessage {
  v: 1;
  type: "snapshot";
  tick: number;
  nodes: NodeView[];
  chain: { length: number; head: string };
  events: EventView[];
  you?: PrivateView;
}

export interface WelcomeMessage {
  v: 1;
  type: "welcome";
  seq: number;
  node: number;
  world: WorldDoc;
  scenario: ScenarioDoc;
}

export interface AckMessage {
  v: 1;
  type: "ack";
  seq: number;
}

export interface RejectMessage {
  v: 1;
  type: "reject";
  seq: number;
  reason: string;
}

export interface PongMessage {
  v: 1;
  type: "pong";
}

export type ServerMessage =
  | SnapshotMessage
  | WelcomeMessage
  | AckMessage
  | RejectMessage
  | PongMessage;

/** The four activities the chain view must set apart visually. */
export const ACTIVITY_MARKERS: Record<string, string> = {
  block_generated: "+",
  mining_attempted: "?",
  mining_result: "!",
  block_appended: "#",
};
