/** Session networking: join handshake, snapshot subscription, heartbeat.
 *
 * connect() performs the join, resolves once the welcome (world grid) and
 * the first snapshot have arrived, and then keeps the view model fed.  A
 * ping goes out every second; if nothing is heard from the server for two
 * beats the status flips to "lost" so the UI can show the banner and offer
 * a retry, which performs a fresh join.
 */

import { ClientMessage, ServerMessage } from "./protocol.js";
import { ClientViewModel } from "./viewModel.js";

export const HEARTBEAT_MS = 1000;
export const LOST_AFTER_MS = 2000;

/** The slice of the WebSocket API the client uses; `ws` satisfies it too. */
export interface SocketLike {
  onopen: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
  send(data: string): void;
  close(): void;
}

export type SocketFactory = (url: string) => SocketLike;

export interface ConnectOptions {
  socketFactory?: SocketFactory;
  heartbeatMs?: number;
  onUpdate?: (vm: ClientViewModel) => void;
}

export class JoinRejected extends Error {
  constructor(public reason: string) {
    super(`join rejected: ${reason}`);
  }
}

export class SessionHandle {
  vm = new ClientViewModel();
  private socket: SocketLike | null = null;
  private heartbeat: ReturnType<typeof setInterval> | null = null;
  private lastHeard = 0;
  private joinSeq = 0;

  constructor(
    private url: string,
    private player: string,
    private character: string,
    private options: ConnectOptions = {},
  ) {}

  /** Join (or rejoin after a lost connection) and wait for the world. */
  open(): Promise<SessionHandle> {
    const factory =
      this.options.socketFactory ?? ((url: string) => new WebSocket(url) as unknown as SocketLike);
    this.vm.status = "connecting";
    this.vm.pickerError = null;
    return new Promise((resolve, reject) => {
      let settled = false;
      const socket = factory(this.url);
      this.socket = socket;
      socket.onopen = () => {
        socket.send(
          JSON.stringify({
            v: 1,
            type: "join",
            seq: this.joinSeq,
            player: this.player,
            character: this.character,
          }),
        );
      };
      socket.onmessage = (ev) => {
        this.lastHeard = Date.now();
        let msg: ServerMessage;
        try {
          msg = JSON.parse(String(ev.data));
        } catch {
          return;
        }
        if (msg.type === "welcome") {
          this.joinSeq = msg.seq + 1;
          this.vm.applyWelcome(msg.node, msg.world, msg.scenario);
          this.startHeartbeat();
        } else if (msg.type === "snapshot") {
          this.vm.applySnapshot(msg);
          if (!settled && this.vm.world !== null) {
            settled = true;
            resolve(this);
          }
        } else if (msg.type === "reject" && !settled) {
          settled = true;
          this.vm.status = "closed";
          this.vm.pickerError = msg.reason;
          socket.close();
          reject(new JoinRejected(msg.reason));
        }
        this.options.onUpdate?.(this.vm);
      };
      socket.onclose = () => {
        this.stopHeartbeat();
        if (this.vm.status !== "closed") {
          this.vm.status = "lost";
          this.options.onUpdate?.(this.vm);
        }
        if (!settled) {
          settled = true;
          reject(new JoinRejected("connection_closed"));
        }
      };
      socket.onerror = () => {
        /* onclose follows and carries the state change */
      };
    });
  }

  private startHeartbeat(): void {
    const period = this.options.heartbeatMs ?? HEARTBEAT_MS;
    this.lastHeard = Date.now();
    this.heartbeat = setInterval(() => {
      if (Date.now() - this.lastHeard > 2 * period) {
        this.vm.status = "lost";
        this.options.onUpdate?.(this.vm);
        return;
      }
      try {
        this.socket?.send(JSON.stringify({ v: 1, type: "ping" }));
      } catch {
        /* socket already dying; onclose will fire */
      }
    }, period);
  }

  private stopHeartbeat(): void {
    if (this.heartbeat !== null) {
      clearInterval(this.heartbeat);
      this.heartbeat = null;
    }
  }

  send(message: ClientMessage): void {
    if (this.vm.status !== "connected" || this.socket === null) return;
    this.socket.send(JSON.stringify(message));
  }

  /** Fresh join after a lost connection; the server hands out a new binding. */
  retry(): Promise<SessionHandle> {
    this.close();
    this.vm = new ClientViewModel();
    this.joinSeq = 0;
    return this.open();
  }

  close(): void {
    this.stopHeartbeat();
    this.vm.status = "closed";
    try {
      this.socket?.close();
    } catch {
      /* already closed */
    }
    this.socket = null;
  }
}

export function connect(
  url: string,
  player: string,
  character: string,
  options: ConnectOptions = {},
): Promise<SessionHandle> {
  return new SessionHandle(url, player, character, options).open();
}
