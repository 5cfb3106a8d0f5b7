import { Snapshot } from "./types.js";

// Top-down course view. World y runs start -> goal; drawn with the goal at
// the top of the canvas so "forward" reads as up.

const TRAIL_MAX = 4000;

export class CourseView {
  private trail: Array<[number, number]> = [];
  private trailTick = -1;

  constructor(private canvas: HTMLCanvasElement) {}

  reset(): void {
    this.trail = [];
    this.trailTick = -1;
  }

  draw(snap: Snapshot): void {
    const ctx = this.canvas.getContext("2d");
    if (!ctx) return;
    const { width: fw, length: fl } = snap.field;
    const pad = 12;
    const sx = (this.canvas.width - 2 * pad) / fw;
    const sy = (this.canvas.height - 2 * pad) / fl;
    const toX = (x: number) => pad + x * sx;
    const toY = (y: number) => this.canvas.height - pad - y * sy;

    if (snap.tick < this.trailTick) this.reset(); // server restarted the trial
    this.trailTick = snap.tick;
    this.trail.push([snap.agent.x, snap.agent.y]);
    if (this.trail.length > TRAIL_MAX) this.trail.shift();

    ctx.fillStyle = "#10141c";
    ctx.fillRect(0, 0, this.canvas.width, this.canvas.height);
    ctx.strokeStyle = "#3b4454";
    ctx.lineWidth = 2;
    ctx.strokeRect(toX(0), toY(fl), fw * sx, fl * sy);

    // start and goal baselines
    ctx.strokeStyle = "#2e6b4f";
    ctx.beginPath();
    ctx.moveTo(toX(0), toY(snap.goal[1]));
    ctx.lineTo(toX(fw), toY(snap.goal[1]));
    ctx.stroke();
    ctx.strokeStyle = "#55606f";
    ctx.beginPath();
    ctx.moveTo(toX(0), toY(snap.start[1]));
    ctx.lineTo(toX(fw), toY(snap.start[1]));
    ctx.stroke();

    ctx.fillStyle = "#a33c3c";
    for (const ob of snap.obstacles) {
      ctx.beginPath();
      ctx.arc(toX(ob.x), toY(ob.y), Math.max(2, ob.r * sx), 0, 2 * Math.PI);
      ctx.fill();
    }

    if (this.trail.length > 1) {
      ctx.strokeStyle = "#3f6ea5";
      ctx.lineWidth = 1;
      ctx.beginPath();
      ctx.moveTo(toX(this.trail[0][0]), toY(this.trail[0][1]));
      for (const [x, y] of this.trail) ctx.lineTo(toX(x), toY(y));
      ctx.stroke();
    }

    // walker: dot plus heading tick
    const ax = toX(snap.agent.x);
    const ay = toY(snap.agent.y);
    ctx.fillStyle = snap.status === "done" ? "#58c28a" : "#e4e8ef";
    ctx.beginPath();
    ctx.arc(ax, ay, 5, 0, 2 * Math.PI);
    ctx.fill();
    ctx.strokeStyle = "#e4e8ef";
    ctx.lineWidth = 2;
    ctx.beginPath();
    ctx.moveTo(ax, ay);
    // canvas y is flipped, so the heading's sine component negates
    ctx.lineTo(ax + 14 * Math.cos(snap.agent.heading), ay - 14 * Math.sin(snap.agent.heading));
    ctx.stroke();
  }
}
