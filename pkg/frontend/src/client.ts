import { Control, Snapshot, Steer } from "./types.js";
import { LineDecoder, encodeControl, parseSnapshot } from "./wire.js";

export interface ControlSender {
  send(data: string): void;
}

const STEER_KEYS: Record<string, Steer> = {
  ArrowUp: "forward",
  ArrowDown: "stop",
  ArrowLeft: "turn_left",
  ArrowRight: "turn_right",
  " ": "stop",
};

/**
 * Socket-facing half of the cockpit: turns key presses into Control lines
 * and inbound chunks into Snapshot callbacks. Holds no state beyond the
 * last snapshot, so a reconnect reproduces the identical view.
 */
export class CockpitClient {
  last: Snapshot | null = null;
  private decoder = new LineDecoder();

  constructor(
    private sender: ControlSender,
    private onSnapshot: (snap: Snapshot) => void = () => {}
  ) {}

  send(msg: Control): void {
    this.sender.send(encodeControl(msg));
  }

  /** Keyboard map: arrows steer, m toggles mode, r resets. */
  handleKey(key: string): boolean {
    const steer = STEER_KEYS[key];
    if (steer !== undefined) {
      this.send({ steer });
      return true;
    }
    if (key === "m") {
      const mode = this.last?.mode === "depth" ? "open_path" : "depth";
      this.send({ set_mode: mode });
      return true;
    }
    if (key === "r") {
      this.send({ reset: true });
      return true;
    }
    return false;
  }

  setLayout(name: string): void {
    this.send({ load_layout: name });
  }

  setSpeed(v: number): void {
    this.send({ set_speed: v });
  }

  /** Feed raw socket text; invokes onSnapshot per complete line. */
  feed(chunk: string): void {
    for (const line of this.decoder.feed(chunk)) {
      const snap = parseSnapshot(line);
      this.last = snap;
      this.onSnapshot(snap);
    }
  }
}
