"""Dataset directory layout and sidecar formats.

A dataset directory holds one JSON file per sample plus optional
sidecars and a manifest:

    <generator_id>__<seed>.json      the episode, canonical JSON
    <stem>.witness.txt               replayable rule program
    <stem>.reasoning.txt             natural-language chains
    manifest.json                    engine metadata and sample index

The witness sidecar is three header lines, a blank line, then the
program text:

    dsl-version: 1.0.0
    generator: tgi.g4.gravity
    seed: 17

    (gravity (input) bottom)

All writes go through a temp file and an atomic rename, and nothing
here embeds timestamps, so re-running a sampling command reproduces
every byte.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path

from . import dsl
from .errors import MalformedJson, MissingManifest, OrphanSidecar
from .generator import TaskSample
from .grid import Color, Episode, parse_arc_json, serialize_arc_json
from .objects import Axis, Direction
from .sampling import PRNG_ALGORITHM

MANIFEST_NAME = "manifest.json"
REPORT_NAME = "verification_report.json"
_RESERVED_FILES = {MANIFEST_NAME, REPORT_NAME}


def atomic_write(path: Path, data: bytes) -> None:
    """Write via temp file + rename so readers never see partial content."""
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(data)
    os.replace(tmp, path)


def encode_scalar(value: object) -> object:
    """JSON-safe form of a task variable value."""
    if isinstance(value, Color):
        return f"c{int(value)}"
    if isinstance(value, (Direction, Axis)):
        return value.value
    if isinstance(value, bool) or not isinstance(value, int):
        raise TypeError(f"not a task scalar: {value!r}")
    return int(value)


def witness_text(sample: TaskSample) -> str:
    header = (
        f"dsl-version: {dsl.DSL_VERSION}\n"
        f"generator: {sample.provenance.generator_id}\n"
        f"seed: {sample.provenance.seed}\n"
    )
    return header + "\n" + dsl.render_program(sample.witness) + "\n"


@dataclass(frozen=True)
class WitnessFile:
    dsl_version: str
    generator_id: str
    seed: int
    program_text: str


def parse_witness_text(text: str) -> WitnessFile:
    """Split a witness sidecar into header fields and program text."""
    lines = text.split("\n")
    if len(lines) < 5 or lines[3] != "":
        raise MalformedJson("witness sidecar must be three header lines, a blank, a program")
    fields = {}
    for i, key in enumerate(("dsl-version", "generator", "seed")):
        prefix = f"{key}: "
        if not lines[i].startswith(prefix):
            raise MalformedJson(f"witness header line {i + 1} must start with '{prefix}'")
        fields[key] = lines[i][len(prefix) :]
    try:
        seed = int(fields["seed"])
    except ValueError as e:
        raise MalformedJson(f"witness seed is not an integer: {fields['seed']!r}") from e
    return WitnessFile(
        dsl_version=fields["dsl-version"],
        generator_id=fields["generator"],
        seed=seed,
        program_text="\n".join(lines[4:]).strip("\n"),
    )


def reasoning_text(sample: TaskSample) -> str:
    parts = ["[input]"]
    parts.extend(sample.input_reasoning)
    parts.append("")
    parts.append("[transform]")
    parts.extend(sample.transform_reasoning)
    return "\n".join(parts) + "\n"


@dataclass(frozen=True)
class StoredSample:
    """One sample as read back from disk; parsing is left to consumers."""

    stem: str
    generator_id: str
    seed: int
    taskvars: dict
    episode_bytes: bytes
    witness: str | None
    reasoning: str | None

    def episode(self) -> Episode:
        return parse_arc_json(self.episode_bytes)


@dataclass(frozen=True)
class Dataset:
    root: Path
    engine_version: str
    prng_algorithm: str
    dsl_version: str
    samples: tuple[StoredSample, ...]

    def generator_ids(self) -> list[str]:
        seen: list[str] = []
        for s in self.samples:
            if s.generator_id not in seen:
                seen.append(s.generator_id)
        return seen


def write_samples(
    out_dir: Path,
    samples: list[TaskSample],
    with_witness: bool = False,
    with_reasoning: bool = False,
) -> None:
    """Write sample files and the manifest into a directory."""
    out_dir.mkdir(parents=True, exist_ok=True)
    entries = []
    for sample in samples:
        stem = sample.sample_id
        atomic_write(out_dir / f"{stem}.json", serialize_arc_json(sample.episode))
        if with_witness:
            atomic_write(out_dir / f"{stem}.witness.txt", witness_text(sample).encode())
        if with_reasoning:
            atomic_write(out_dir / f"{stem}.reasoning.txt", reasoning_text(sample).encode())
        entries.append(
            {
                "stem": stem,
                "generator": sample.provenance.generator_id,
                "seed": sample.provenance.seed,
                "taskvars": {k: encode_scalar(v) for k, v in sample.taskvars.items()},
            }
        )
    entries.sort(key=lambda e: e["stem"])
    manifest = {
        "engine_version": samples[0].provenance.engine_version if samples else "",
        "prng_algorithm": PRNG_ALGORITHM,
        "dsl_version": dsl.DSL_VERSION,
        "generators": sorted({e["generator"] for e in entries}),
        "samples": entries,
    }
    atomic_write(
        out_dir / MANIFEST_NAME,
        json.dumps(manifest, indent=2, sort_keys=True).encode() + b"\n",
    )


def load_dataset(root: Path) -> Dataset:
    """Read a dataset directory back, checking the manifest covers every file."""
    root = Path(root)
    manifest_path = root / MANIFEST_NAME
    if not manifest_path.is_file():
        raise MissingManifest(f"no {MANIFEST_NAME} in {root}")
    try:
        manifest = json.loads(manifest_path.read_text())
    except json.JSONDecodeError as e:
        raise MalformedJson(f"manifest is not valid JSON: {e}") from e
    stems = set()
    samples: list[StoredSample] = []
    for entry in manifest.get("samples", []):
        stem = entry["stem"]
        stems.add(stem)
        sample_path = root / f"{stem}.json"
        if not sample_path.is_file():
            raise MissingManifest(f"manifest lists '{stem}' but {sample_path.name} is missing")
        witness_path = root / f"{stem}.witness.txt"
        reasoning_path = root / f"{stem}.reasoning.txt"
        samples.append(
            StoredSample(
                stem=stem,
                generator_id=entry["generator"],
                seed=int(entry["seed"]),
                taskvars=dict(entry.get("taskvars", {})),
                episode_bytes=sample_path.read_bytes(),
                witness=witness_path.read_text() if witness_path.is_file() else None,
                reasoning=reasoning_path.read_text() if reasoning_path.is_file() else None,
            )
        )
    _check_orphans(root, stems)
    samples.sort(key=lambda s: s.stem)
    return Dataset(
        root=root,
        engine_version=manifest.get("engine_version", ""),
        prng_algorithm=manifest.get("prng_algorithm", ""),
        dsl_version=manifest.get("dsl_version", ""),
        samples=tuple(samples),
    )


def _check_orphans(root: Path, stems: set[str]) -> None:
    for path in sorted(root.iterdir()):
        name = path.name
        if name in _RESERVED_FILES or path.is_dir():
            continue
        stem: str | None = None
        for suffix in (".witness.txt", ".reasoning.txt"):
            if name.endswith(suffix):
                stem = name[: -len(suffix)]
                break
        else:
            if name.endswith(".json"):
                stem = name[: -len(".json")]
        if stem is not None and stem not in stems:
            raise OrphanSidecar(f"{name} has no manifest entry")
