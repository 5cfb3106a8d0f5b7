import { beforeEach, describe, expect, it } from "vitest";

import { CockpitClient } from "../src/client.js";
import { snapshotLine } from "./fixtures.js";

// Recorded socket traffic: every send() lands here verbatim.
class RecordingSocket {
  sent: string[] = [];
  send(data: string): void {
    this.sent.push(data);
  }
}

describe("steering keys", () => {
  let sock: RecordingSocket;
  let client: CockpitClient;

  beforeEach(() => {
    sock = new RecordingSocket();
    client = new CockpitClient(sock);
  });

  it("ArrowLeft emits turn_left", () => {
    expect(client.handleKey("ArrowLeft")).toBe(true);
    expect(sock.sent).toEqual(['{"steer":"turn_left"}\n']);
  });

  it("maps all four arrows to the wire verbs", () => {
    for (const key of ["ArrowUp", "ArrowDown", "ArrowLeft", "ArrowRight"]) {
      client.handleKey(key);
    }
    expect(sock.sent).toEqual([
      '{"steer":"forward"}\n',
      '{"steer":"stop"}\n',
      '{"steer":"turn_left"}\n',
      '{"steer":"turn_right"}\n',
    ]);
  });

  it("space is an extra stop", () => {
    client.handleKey(" ");
    expect(sock.sent).toEqual(['{"steer":"stop"}\n']);
  });

  it("r resets, m toggles mode off the last snapshot", () => {
    client.handleKey("r");
    client.handleKey("m"); // no snapshot yet: open_path is the default view
    client.feed(snapshotLine({ mode: "depth", grid: {} }));
    client.handleKey("m");
    expect(sock.sent).toEqual([
      '{"reset":true}\n',
      '{"set_mode":"depth"}\n',
      '{"set_mode":"open_path"}\n',
    ]);
  });

  it("unmapped keys send nothing", () => {
    for (const key of ["x", "Enter", "Shift", "1"]) {
      expect(client.handleKey(key)).toBe(false);
    }
    expect(sock.sent).toEqual([]);
  });

  it("layout picker and speed slider use their own verbs", () => {
    client.setLayout("hard-g");
    client.setSpeed(0.4);
    expect(sock.sent).toEqual(['{"load_layout":"hard-g"}\n', '{"set_speed":0.4}\n']);
  });

  it("every line is one JSON object the server can parse alone", () => {
    client.handleKey("ArrowUp");
    client.handleKey("r");
    for (const line of sock.sent) {
      expect(line.endsWith("\n")).toBe(true);
      const msg = JSON.parse(line);
      expect(Object.keys(msg)).toHaveLength(1);
    }
  });
});
