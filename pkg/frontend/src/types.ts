// Wire schemas for the /session socket. One JSON object per line in both
// directions; these shapes must track src/vw/server.py exactly.

export interface AgentPose {
  x: number;
  y: number;
  heading: number;
}

export interface Obstacle {
  x: number;
  y: number;
  r: number;
}

export interface OpenPathGrid {
  kind: "open_path";
  raw: number[][]; // 3x7, row 0 = bottom
  adjusted: number[][]; // 2x5
  selected_col: number | null; // 1..5
  top_high: boolean;
}

export interface DepthCell {
  f_close: number;
  f_medium: number;
  f_far: number;
  intensity: number;
}

export interface DepthGrid {
  kind: "depth";
  cells: DepthCell[][]; // [top row, bottom row], 5 cells each
}

export type GridInfo = OpenPathGrid | DepthGrid | { kind?: undefined };

export type TrialStatus = "outbound" | "inbound" | "done";

export interface Snapshot {
  tick: number;
  t: number;
  mode: string;
  agent: AgentPose;
  obstacles: Obstacle[];
  field: { width: number; length: number };
  start: number[];
  goal: number[];
  layout: string;
  belt: number[]; // 10 intensities, client1 top first
  grid: GridInfo;
  status: TrialStatus;
}

export type Steer = "forward" | "stop" | "turn_left" | "turn_right";

export type Control =
  | { steer: Steer }
  | { set_mode: string }
  | { load_layout: string }
  | { reset: true }
  | { set_speed: number };
