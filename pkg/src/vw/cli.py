"""Command-line entry points: score fixtures, run trials and experiments,
host the belt publisher, emulate units, and serve the cockpit bridge.

Machine-readable results go to stdout (JSON or CSV); progress and summaries
go to stderr.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import click

from . import __version__
from .beltnet import DEFAULT_TOPIC, ClientId
from .clock import RealClock
from .depthmode import depth_command, dump_depth
from .errors import NoFloor, VwError
from .grid import BeltCommand
from .openpath import command_from_scores, dump_scores, score_mask
from .pgm import load_depth_map, load_floor_mask, save_depth_map, save_floor_mask
from .pipeline import Session, SessionConfig, SyntheticBackend, run_session
from .scene import CANONICAL_LAYOUTS, CameraModel, build_course, load_course, render_views
from .sim import CSV_HEADER, SimParams, compute_metrics, metrics_csv_row, run_trial
from .stats import report_csv, report_text, summarize_experiment

ENV_TOPIC = "VW_BELT_TOPIC"
ENV_BROKER = "VW_BROKER"


def _echo_err(msg: str) -> None:
    click.echo(msg, err=True)


def _parse_hostport(value: str) -> tuple[str, int]:
    host, _, port = value.rpartition(":")
    if not host or not port.isdigit():
        raise click.BadParameter(f"expected host:port, got {value!r}")
    return host, int(port)


@click.group()
@click.version_option(version=__version__, prog_name="vw")
def main() -> None:
    """Perception-to-haptics navigation toolkit."""


@main.command("score-open-path")
@click.option("--mask", "mask_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--dump", is_flag=True, help="print the per-cell score grid to stderr")
def score_open_path(mask_path: str, dump: bool) -> None:
    """Score a floor-mask PGM and print the belt command."""
    mask = load_floor_mask(mask_path)
    try:
        scores = score_mask(mask)
    except NoFloor:
        click.echo(json.dumps({"command": [0] * 10, "selected_col": None, "top_high": False}))
        _echo_err("no floor pixels: all-zero command")
        return
    cmd = command_from_scores(scores)
    click.echo(
        json.dumps(
            {
                "command": list(cmd.intensities),
                "selected_col": scores.selected_col,
                "top_high": scores.top_high,
            }
        )
    )
    if dump:
        _echo_err(dump_scores(scores))


@main.command("score-depth")
@click.option("--depth", "depth_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--dump", is_flag=True, help="print per-cell fractions to stderr")
def score_depth(depth_path: str, dump: bool) -> None:
    """Score a 16-bit closeness PGM and print the belt command."""
    depth = load_depth_map(depth_path)
    cmd = depth_command(depth)
    click.echo(json.dumps({"command": list(cmd.intensities)}))
    if dump:
        _echo_err(dump_depth(depth))


def _layout_choice() -> click.Choice:
    return click.Choice(sorted(CANONICAL_LAYOUTS))


@main.command("run-trial")
@click.option("--layout", default="easy-a", help="canonical layout name or course JSON path")
@click.option("--mode", type=click.Choice(["open_path", "depth", "cane_only"]), default="open_path")
@click.option("--seed", type=int, default=0)
@click.option("--record", "record_path", type=click.Path(dir_okay=False), default=None,
              help="write the full trial record as JSON lines")
@click.option("--render-size", default="160x90", help="per-tick render resolution WxH")
def run_trial_cmd(layout: str, mode: str, seed: int, record_path: str | None, render_size: str) -> None:
    """Run one closed-loop trial and print its metrics as JSON."""
    scene = load_course(layout) if layout.endswith(".json") else build_course(layout)
    w, _, h = render_size.partition("x")
    params = SimParams(render_w=int(w), render_h=int(h))
    record = run_trial(scene, mode, seed, params)
    metrics = compute_metrics(record, scene)
    if record_path:
        Path(record_path).write_text(record.to_jsonl(), encoding="utf-8")
        _echo_err(f"record written to {record_path}")
    click.echo(
        json.dumps(
            {
                "layout": scene.name,
                "mode": mode,
                "seed": seed,
                "completed": metrics.completed,
                "completion_time": metrics.completion_time,
                "hesitation_pct": metrics.hesitation_pct,
                "cane_contacts": metrics.cane_contacts,
                "safety_window": metrics.safety_window,
            }
        )
    )


@main.command("run-experiment")
@click.option("--seeds", type=int, default=30, help="seeds 0..N-1 per layout and mode")
@click.option("--layouts", default=None, help="comma-separated layout names (default: all nine)")
@click.option("--modes", default="open_path,depth,cane_only")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default="results")
@click.option("--render-size", default="160x90")
def run_experiment(seeds: int, layouts: str | None, modes: str, out_dir: str, render_size: str) -> None:
    """Run the full trial grid; write metrics.csv, report.csv, report.txt."""
    layout_names = sorted(CANONICAL_LAYOUTS) if layouts is None else layouts.split(",")
    mode_names = modes.split(",")
    w, _, h = render_size.partition("x")
    params = SimParams(render_w=int(w), render_h=int(h))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    csv_lines = [CSV_HEADER]
    total = len(layout_names) * len(mode_names) * seeds
    done = 0
    for layout in layout_names:
        scene = build_course(layout)
        for mode in mode_names:
            for seed in range(seeds):
                record = run_trial(scene, mode, seed, params)
                m = compute_metrics(record, scene)
                csv_lines.append(metrics_csv_row(layout, mode, seed, m))
                rows.append(
                    {
                        "layout": layout,
                        "mode": mode,
                        "seed": seed,
                        "completion_time": m.completion_time,
                        "hesitation_pct": m.hesitation_pct,
                        "cane_contacts": m.cane_contacts,
                        "safety_window": m.safety_window,
                    }
                )
                done += 1
                if done % 25 == 0:
                    _echo_err(f"{done}/{total} trials")
    (out / "metrics.csv").write_text("\n".join(csv_lines) + "\n", encoding="utf-8")
    try:
        report = summarize_experiment(rows)
    except VwError as exc:
        _echo_err(f"no comparison report: {exc}")
        click.echo(str(out / "metrics.csv"))
        return
    (out / "report.csv").write_text(report_csv(report), encoding="utf-8")
    (out / "report.txt").write_text(report_text(report), encoding="utf-8")
    _echo_err(report_text(report))
    click.echo(str(out / "metrics.csv"))


@main.command("belt-host")
@click.option("--broker", envvar=ENV_BROKER, default="127.0.0.1:1883", show_default=True)
@click.option("--topic", envvar=ENV_TOPIC, default=DEFAULT_TOPIC, show_default=True)
@click.option("--layout", default="easy-a")
@click.option("--mode", type=click.Choice(["open_path", "depth"]), default="open_path")
@click.option("--duration", type=float, default=10.0, help="seconds to publish")
def belt_host(broker: str, topic: str, layout: str, mode: str, duration: float) -> None:
    """Publish live belt commands from a synthetic session to an MQTT broker."""
    from .mqtt import MqttClient

    host, port = _parse_hostport(broker)
    client = MqttClient(host, port, "vw-host").connect()
    try:
        scene = build_course(layout)
        cfg = SessionConfig(mode=mode, clock="real", topic=topic)
        session = Session(cfg, SyntheticBackend(scene), transport=client, clock=RealClock())
        log = run_session(session, int(duration * 1000))
        _echo_err(f"published {len(log.publishes)} commands to {topic} @ {broker}")
        click.echo(json.dumps({"publishes": len(log.publishes), "ticks": len(log.ticks)}))
    finally:
        client.close()


@main.command("unit-emulator")
@click.option("--id", "client_name", required=True, help="client1..client5")
@click.option("--broker", envvar=ENV_BROKER, default="127.0.0.1:1883", show_default=True)
@click.option("--topic", envvar=ENV_TOPIC, default=DEFAULT_TOPIC, show_default=True)
@click.option("--duration", type=float, default=0.0, help="seconds to run (0 = forever)")
def unit_emulator(client_name: str, broker: str, topic: str, duration: float) -> None:
    """Emulate one modular unit: subscribe, slice, and log motor episodes."""
    import time

    from .mqtt import MqttClient
    from .unitemu import FREQUENCY_HZ, UnitEmulator

    host, port = _parse_hostport(broker)
    unit = UnitEmulator(ClientId(client_name))
    clock = RealClock()
    printed = 0
    client = MqttClient(host, port, f"vw-{client_name}").connect()
    unit.attach(client, topic, clock)
    _echo_err(f"{client_name}: battery=ok link=ok (subscribed to {topic} @ {broker})")
    try:
        end = None if duration <= 0 else time.monotonic() + duration
        while end is None or time.monotonic() < end:
            time.sleep(0.05)
            while printed < len(unit.episode_log):
                t, motor, intensity = unit.episode_log[printed]
                printed += 1
                click.echo(
                    f"t={t}ms {client_name} {motor} -> vibrating @{FREQUENCY_HZ[intensity]}Hz "
                    f"(intensity {intensity}, 100ms on / 200ms off)"
                )
    except KeyboardInterrupt:
        pass
    finally:
        client.close()


@main.command("broker")
@click.option("--port", type=int, default=1883, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
def broker_cmd(host: str, port: int) -> None:
    """Run the bundled MQTT broker until interrupted."""
    import time

    from .mqtt import Broker

    broker = Broker(host, port).start()
    _echo_err(f"broker listening on {broker.host}:{broker.port}")
    try:
        while True:
            time.sleep(1.0)
    except KeyboardInterrupt:
        broker.stop()


@main.command("serve")
@click.option("--port", type=int, default=8080, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--layout", default="easy-a")
@click.option("--mode", type=click.Choice(["open_path", "depth"]), default="open_path")
def serve(host: str, port: int, layout: str, mode: str) -> None:
    """Serve the cockpit bridge on ws://host:port/session."""
    from .server import CockpitServer

    server = CockpitServer(layout=layout, mode=mode, host=host, port=port)
    _echo_err(f"session bridge on ws://{server.ws.host}:{server.ws.port}/session")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.stop()


@main.command("render")
@click.option("--layout", default="easy-a")
@click.option("--x", type=float, default=None)
@click.option("--y", type=float, default=None)
@click.option("--heading", type=float, default=None, help="radians; default faces the goal")
@click.option("--size", default="640x360", help="render resolution WxH")
@click.option("--mask-out", type=click.Path(dir_okay=False), default=None)
@click.option("--depth-out", type=click.Path(dir_okay=False), default=None)
def render_cmd(
    layout: str,
    x: float | None,
    y: float | None,
    heading: float | None,
    size: str,
    mask_out: str | None,
    depth_out: str | None,
) -> None:
    """Render ground-truth fixtures (floor mask and closeness map) as PGM."""
    scene = load_course(layout) if layout.endswith(".json") else build_course(layout)
    sx, sy = scene.start
    gx, gy = scene.goal
    px = sx if x is None else x
    py = sy if y is None else y
    ph = math.atan2(gy - py, gx - px) if heading is None else heading
    w, _, h = size.partition("x")
    cam = CameraModel(px, py, ph, width=int(w), height_px=int(h))
    mask, depth = render_views(scene, cam)
    written = []
    if mask_out:
        save_floor_mask(mask_out, mask)
        written.append(mask_out)
    if depth_out:
        save_depth_map(depth_out, depth)
        written.append(depth_out)
    floor_pct = float(mask.bits.mean()) * 100
    click.echo(json.dumps({"floor_pct": round(floor_pct, 2), "written": written}))


if __name__ == "__main__":
    main()
