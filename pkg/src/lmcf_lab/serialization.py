"""Deterministic artifact io: curve CSV, series CSV, events JSONL, reports.

Every writer builds the full text in memory with repr-formatted floats and
"\\n" newlines, so identical inputs yield identical bytes on any platform.
Readers are strict: malformed rows raise instead of guessing.

Snapshot directories pair one CSV per component with a manifest recording
component metadata (label, boundary handling, sample times), enough to
rebuild a trajectory for offline diagnostics.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .curves import PlanarCurve
from .diagnostics import CheckReport
from .flow import Event, FlowComponent, FlowState, TimeSeries

MANIFEST_NAME = "manifest.json"
EVENTS_NAME = "events.jsonl"


def format_float(value: float) -> str:
    """Shortest round-tripping decimal form, stable across runs."""
    return repr(float(value))


def curve_to_csv_text(curve: PlanarCurve) -> str:
    lines = [f"# closed={'true' if curve.closed else 'false'}", "index,x,y"]
    for k, z in enumerate(curve.nodes):
        lines.append(f"{k},{format_float(z.real)},{format_float(z.imag)}")
    return "\n".join(lines) + "\n"


def write_curve_csv(curve: PlanarCurve, path: Path | str) -> Path:
    path = Path(path)
    path.write_text(curve_to_csv_text(curve))
    return path


def read_curve_csv(path: Path | str) -> PlanarCurve:
    closed = False
    xs: list[float] = []
    ys: list[float] = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, _, value = line.lstrip("# ").partition("=")
            if key.strip() == "closed":
                closed = value.strip().lower() == "true"
            continue
        if line.startswith("index"):
            continue
        parts = line.split(",")
        if len(parts) != 3:
            raise ValueError(f"{path}:{lineno}: expected 'index,x,y', got {line!r}")
        xs.append(float(parts[1]))
        ys.append(float(parts[2]))
    if not xs:
        raise ValueError(f"{path}: no curve nodes found")
    return PlanarCurve(np.array(xs) + 1j * np.array(ys), closed=closed)


def series_to_csv_text(series: TimeSeries) -> str:
    lines = [f"# name={series.name}", "time,value"]
    for t, v in zip(series.times, series.values):
        lines.append(f"{format_float(t)},{format_float(v)}")
    return "\n".join(lines) + "\n"


def write_series_csv(series: TimeSeries, path: Path | str) -> Path:
    path = Path(path)
    path.write_text(series_to_csv_text(series))
    return path


def read_series_csv(path: Path | str) -> TimeSeries:
    name = Path(path).stem
    times: list[float] = []
    values: list[float] = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("time"):
            continue
        if line.startswith("#"):
            key, _, value = line.lstrip("# ").partition("=")
            if key.strip() == "name":
                name = value.strip()
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise ValueError(f"{path}:{lineno}: expected 'time,value', got {line!r}")
        times.append(float(parts[0]))
        values.append(float(parts[1]))
    return TimeSeries(name, tuple(times), tuple(values))


def events_to_jsonl_text(events: Iterable[Event]) -> str:
    lines = [
        json.dumps(
            {"kind": ev.kind, "time": ev.time, "payload": ev.payload}, sort_keys=True
        )
        for ev in events
    ]
    return "\n".join(lines) + ("\n" if lines else "")


def write_events_jsonl(events: Iterable[Event], path: Path | str) -> Path:
    path = Path(path)
    path.write_text(events_to_jsonl_text(events))
    return path


def read_events_jsonl(path: Path | str) -> tuple[Event, ...]:
    events = []
    for line in Path(path).read_text().splitlines():
        if not line.strip():
            continue
        data = json.loads(line)
        events.append(Event(kind=data["kind"], time=data["time"], payload=data["payload"]))
    return tuple(events)


def report_to_json_text(report: CheckReport) -> str:
    data = {
        "check": report.check,
        "params": report.params,
        "verdict": report.verdict,
        "details": report.details,
        "series": None
        if report.series is None
        else {
            "name": report.series.name,
            "times": list(report.series.times),
            "values": list(report.series.values),
        },
    }
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def write_report_json(report: CheckReport, path: Path | str) -> Path:
    path = Path(path)
    path.write_text(report_to_json_text(report))
    return path


def read_report_json(path: Path | str) -> CheckReport:
    data = json.loads(Path(path).read_text())
    series = data.get("series")
    return CheckReport(
        check=data["check"],
        params=data["params"],
        verdict=data["verdict"],
        details=data.get("details", {}),
        series=None
        if series is None
        else TimeSeries(series["name"], tuple(series["times"]), tuple(series["values"])),
    )


def _component_entry(index: int, comp: FlowComponent, filename: str) -> dict:
    return {
        "component": index,
        "file": filename,
        "label": comp.label,
        "closed": comp.curve.closed,
        "origin_pinned": comp.origin_pinned,
        "start_ray": comp.start_ray,
        "end_ray": comp.end_ray,
    }


def write_snapshots(states: Sequence[FlowState], directory: Path | str) -> Path:
    """One CSV per component per sample, indexed by a manifest."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    samples = []
    for k, state in enumerate(states):
        files = []
        for j, comp in enumerate(state.components):
            filename = f"{k:04d}_{comp.label}{j}.csv"
            write_curve_csv(comp.curve, directory / filename)
            files.append(_component_entry(j, comp, filename))
        samples.append({"index": k, "time": state.time, "components": files})
    manifest = {"samples": samples}
    (directory / MANIFEST_NAME).write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n")
    return directory


def read_trajectory(directory: Path | str) -> list[FlowState]:
    """Rebuild sampled states from a snapshots directory.

    Events, if a sibling events file exists (snapshot dir or its parent),
    are attached to the final state, which is where trajectory checks look
    for them.
    """
    directory = Path(directory)
    manifest = json.loads((directory / MANIFEST_NAME).read_text())
    states: list[FlowState] = []
    for sample in manifest["samples"]:
        comps = []
        for entry in sample["components"]:
            curve = read_curve_csv(directory / entry["file"])
            comps.append(
                FlowComponent(
                    curve=curve,
                    origin_pinned=entry["origin_pinned"],
                    start_ray=entry["start_ray"],
                    end_ray=entry["end_ray"],
                    label=entry["label"],
                )
            )
        states.append(FlowState(time=sample["time"], components=tuple(comps)))
    for candidate in (directory / EVENTS_NAME, directory.parent / EVENTS_NAME):
        if states and candidate.is_file():
            events = read_events_jsonl(candidate)
            states[-1] = FlowState(
                time=states[-1].time, components=states[-1].components, events=events
            )
            break
    return states
