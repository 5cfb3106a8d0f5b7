import { Control, Snapshot } from "./types.js";

/** Reassembles newline-delimited messages from arbitrary chunk boundaries. */
export class LineDecoder {
  private buffer = "";

  feed(chunk: string): string[] {
    this.buffer += chunk;
    const parts = this.buffer.split("\n");
    this.buffer = parts.pop() ?? "";
    return parts.filter((line) => line.trim().length > 0);
  }

  /** Anything still waiting for its newline. */
  pending(): string {
    return this.buffer;
  }
}

export function encodeControl(msg: Control): string {
  return JSON.stringify(msg) + "\n";
}

export function parseSnapshot(line: string): Snapshot {
  const snap = JSON.parse(line) as Snapshot;
  if (!Array.isArray(snap.belt) || snap.belt.length !== 10) {
    throw new Error(`belt must have 10 entries, got ${JSON.stringify(snap.belt)}`);
  }
  for (const v of snap.belt) {
    if (!Number.isInteger(v) || v < 0 || v > 3) {
      throw new Error(`belt intensity out of range: ${v}`);
    }
  }
  if (!snap.agent || typeof snap.agent.x !== "number") {
    throw new Error("snapshot missing agent pose");
  }
  return snap;
}
