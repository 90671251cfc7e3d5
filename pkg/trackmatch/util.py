"""Utility definitions."""

from typing import Any, Optional
from pathlib import Path
from json import dumps
import csv

import yaml
from data_plumber_http.settings import Responses
from dcm_common import Logger

from trackmatch.models import (
    RoutePath,
    Sample,
    Track,
    MatchResult,
    GroundTruth,
    SweepSpec,
)
from trackmatch.handlers import network_document_handler, sweep_spec_handler
from trackmatch.components.road_network import (
    RoadNetwork,
    network_from_document,
    network_to_document,
)
from trackmatch.components.multi_track import TrackSet


TRACK_COLUMNS = ["t", "x", "y"]


def load_document_from_string(text: str) -> Any:
    """Loads a YAML- or JSON-document from the given string."""
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError as exc_info:
        raise ValueError(f"Invalid document: {exc_info}") from exc_info


def write_json(data: Any, path: Path) -> None:
    """Writes `data` as (sorted and indented) JSON to `path`."""
    path.write_text(
        dumps(data, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )


def load_network_from_string(
    text: str,
    snap_tolerance: float = 1e-6,
    log: Optional[Logger] = None,
    **kwargs,
) -> RoadNetwork:
    """
    Loads a `RoadNetwork` from the given network document (YAML or
    JSON). Only the largest connected component is retained. `kwargs`
    (index settings) are passed to `network_from_document`.
    """
    document = load_document_from_string(text)
    output = network_document_handler.run(json=document)
    if output.last_status != Responses().GOOD.status:
        raise ValueError(f"Invalid network document: {output.last_message}")
    return network_from_document(
        output.data.value["network"], snap_tolerance, log, **kwargs
    )


def load_network_from_file(
    path: Path,
    snap_tolerance: float = 1e-6,
    log: Optional[Logger] = None,
    **kwargs,
) -> RoadNetwork:
    """Loads a `RoadNetwork` from the given `path`."""
    return load_network_from_string(
        path.read_text(encoding="utf-8"), snap_tolerance, log, **kwargs
    )


def write_network(net: RoadNetwork, path: Path) -> None:
    """Writes `net` as network document to `path`."""
    write_json(network_to_document(net).json, path)


def load_track_from_string(text: str) -> Track:
    """
    Loads a `Track` from comma-separated rows `t,x,y` (an optional
    header row `t,x,y` is skipped).
    """
    rows = [row for row in csv.reader(text.splitlines()) if row]
    if rows and [cell.strip() for cell in rows[0]] == TRACK_COLUMNS:
        rows = rows[1:]
    samples = []
    for i, row in enumerate(rows):
        if len(row) != 3:
            raise ValueError(
                f"Bad track row {i} '{','.join(row)}' (expected 't,x,y')."
            )
        try:
            samples.append(Sample(*(float(cell) for cell in row)))
        except ValueError as exc_info:
            raise ValueError(
                f"Bad track row {i} '{','.join(row)}': {exc_info}"
            ) from exc_info
    track = Track(samples)
    track.validate()
    return track


def load_track_from_file(path: Path) -> Track:
    """Loads a `Track` from the given `path`."""
    try:
        return load_track_from_string(path.read_text(encoding="utf-8"))
    except ValueError as exc_info:
        raise ValueError(f"Invalid track file '{path}': {exc_info}") from exc_info


def dump_track(track: Track) -> str:
    """Returns `track` as comma-separated rows with header."""
    return "\n".join(
        [",".join(TRACK_COLUMNS)]
        + [f"{s.t!r},{s.x!r},{s.y!r}" for s in track.samples]
    ) + "\n"


def write_track(track: Track, path: Path) -> None:
    """Writes `track` to `path`."""
    path.write_text(dump_track(track), encoding="utf-8")


def load_trackset_from_string(text: str) -> TrackSet:
    """
    Loads a `TrackSet` from a multi-section track file. Sections are
    separated by lines starting with `#`.
    """
    sections, current = [], []
    for line in text.splitlines():
        if line.startswith("#"):
            sections.append(current)
            current = []
        else:
            current.append(line)
    sections.append(current)
    tracks = [
        load_track_from_string("\n".join(section))
        for section in sections
        if any(line.strip() for line in section)
    ]
    return TrackSet(tracks)


def load_trackset(path: Path) -> TrackSet:
    """
    Loads a `TrackSet` from either a directory (all `*.csv`-files in
    name order) or a multi-section track file.
    """
    if path.is_dir():
        files = sorted(path.glob("*.csv"))
        if not files:
            raise ValueError(f"No track files in directory '{path}'.")
        return TrackSet([load_track_from_file(file) for file in files])
    if not path.is_file():
        raise ValueError(f"Missing track file '{path}'.")
    try:
        return load_trackset_from_string(path.read_text(encoding="utf-8"))
    except ValueError as exc_info:
        raise ValueError(
            f"Invalid track-set file '{path}': {exc_info}"
        ) from exc_info


def _load_json_model(path: Path, model, name: str):
    document = load_document_from_string(path.read_text(encoding="utf-8"))
    if not isinstance(document, dict):
        raise ValueError(
            f"Invalid {name} '{path}': Expected object but got "
            + f"'{type(document).__name__}'."
        )
    try:
        return model.from_json(document)
    except (KeyError, TypeError, ValueError) as exc_info:
        raise ValueError(f"Invalid {name} '{path}': {exc_info}") from exc_info


def write_match_result(result: MatchResult, path: Path) -> None:
    """Writes `result` to `path`."""
    write_json(result.json, path)


def load_match_result(path: Path) -> MatchResult:
    """Loads a `MatchResult` from `path`."""
    return _load_json_model(path, MatchResult, "match result")


def write_ground_truth(truth: GroundTruth, path: Path) -> None:
    """Writes `truth` to `path`."""
    write_json(truth.json, path)


def load_ground_truth(path: Path) -> GroundTruth:
    """Loads a `GroundTruth` from `path`."""
    return _load_json_model(path, GroundTruth, "ground truth")


def load_route_path(path: Path) -> RoutePath:
    """
    Loads a `RoutePath` from a match result (`path`), a ground truth
    (`route`) or a plain path document (`segments`).
    """
    document = load_document_from_string(path.read_text(encoding="utf-8"))
    if not isinstance(document, dict):
        raise ValueError(f"Invalid path document '{path}'.")
    for key in ("path", "route"):
        if isinstance(document.get(key), dict):
            document = document[key]
            break
    if "segments" not in document:
        raise ValueError(
            f"Invalid path document '{path}': Missing 'segments'."
        )
    try:
        return RoutePath.from_json(document)
    except (KeyError, TypeError, ValueError) as exc_info:
        raise ValueError(
            f"Invalid path document '{path}': {exc_info}"
        ) from exc_info


def load_sweep_spec_from_string(text: str) -> SweepSpec:
    """Loads a `SweepSpec` from the given YAML- or JSON-string."""
    document = load_document_from_string(text)
    try:
        output = sweep_spec_handler.run(json=document)
    except ValueError as exc_info:
        raise ValueError(f"Invalid sweep spec: {exc_info}") from exc_info
    if output.last_status != Responses().GOOD.status:
        raise ValueError(f"Invalid sweep spec: {output.last_message}")
    return output.data.value["spec"]


def load_sweep_spec_from_file(path: Path) -> SweepSpec:
    """Loads a `SweepSpec` from the given `path`."""
    return load_sweep_spec_from_string(path.read_text(encoding="utf-8"))
