"""Hermetic verification of stored samples.

Verification re-derives everything from serialized artifacts plus the
generator registry: it replays the witness program against each input,
re-checks the family's episode constraints and declared invariants, and
screens for degenerate shortcuts (identity or constant outputs). It
never consults the sampling path, so a bug there cannot vouch for
itself.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from . import dsl
from .dataset import Dataset, REPORT_NAME, StoredSample, atomic_write, load_dataset, parse_witness_text
from .errors import EngineError, GridBoundsViolation, UnknownGenerator
from .generator import check_constraints, registry_get
from .grid import Episode, Grid, grid_equal

PASS = "pass"
FAIL = "fail"
FLAGGED = "flagged"


@dataclass(frozen=True)
class CheckResult:
    kind: str  # witness | structural | declared_invariant | shortcut
    name: str
    status: str  # pass | fail | flagged
    detail: str = ""


@dataclass(frozen=True)
class SampleReport:
    stem: str
    generator_id: str
    checks: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(c.status != FAIL for c in self.checks)

    @property
    def flagged(self) -> bool:
        return any(c.status == FLAGGED for c in self.checks)


@dataclass(frozen=True)
class VerificationReport:
    strict: bool
    samples: tuple[SampleReport, ...]

    @property
    def total(self) -> int:
        return len(self.samples)

    @property
    def passed(self) -> int:
        return sum(1 for s in self.samples if s.passed)

    @property
    def all_passed(self) -> bool:
        return self.passed == self.total

    def to_json(self) -> bytes:
        doc = {
            "strict": self.strict,
            "total": self.total,
            "passed": self.passed,
            "failed": self.total - self.passed,
            "samples": [
                {
                    "stem": s.stem,
                    "generator": s.generator_id,
                    "status": PASS if s.passed else FAIL,
                    "checks": [
                        {"kind": c.kind, "name": c.name, "status": c.status, "detail": c.detail}
                        for c in s.checks
                    ],
                }
                for s in self.samples
            ],
        }
        return json.dumps(doc, indent=2, sort_keys=True).encode() + b"\n"


def _first_difference(a: Grid, b: Grid) -> str:
    if a.height != b.height or a.width != b.width:
        return f"dimensions differ: {a.height}x{a.width} vs {b.height}x{b.width}"
    for r in range(a.height):
        for c in range(a.width):
            if a.cells[r][c] != b.cells[r][c]:
                return f"first difference at ({r}, {c}): expected {a.cells[r][c]}, got {b.cells[r][c]}"
    return "grids are equal"


def _verify_witness(stored: StoredSample, episode: Episode) -> list[CheckResult]:
    checks: list[CheckResult] = []
    assert stored.witness is not None
    try:
        wf = parse_witness_text(stored.witness)
    except EngineError as e:
        return [CheckResult("witness", "witness_wellformed", FAIL, str(e))]
    if wf.dsl_version != dsl.DSL_VERSION:
        checks.append(
            CheckResult(
                "witness", "witness_wellformed", FAIL,
                f"dsl version {wf.dsl_version} not supported (engine speaks {dsl.DSL_VERSION})",
            )
        )
        return checks
    if wf.generator_id != stored.generator_id or wf.seed != stored.seed:
        checks.append(
            CheckResult(
                "witness", "witness_wellformed", FAIL,
                "witness header does not match the manifest entry",
            )
        )
        return checks
    try:
        program = dsl.parse_program(wf.program_text)
    except EngineError as e:
        return [CheckResult("witness", "witness_wellformed", FAIL, f"unparseable program: {e}")]
    free = dsl.free_vars(program)
    if free:
        return [
            CheckResult(
                "witness", "witness_closed", FAIL, f"witness has free variables: {sorted(free)}"
            )
        ]
    try:
        if dsl.typecheck(program) is not dsl.Ty.GRID:
            return [CheckResult("witness", "witness_typechecks", FAIL, "root type is not Grid")]
    except EngineError as e:
        return [CheckResult("witness", "witness_typechecks", FAIL, str(e))]
    for split, pairs in (("train", episode.train), ("test", episode.test)):
        for i, pair in enumerate(pairs):
            try:
                replayed = dsl.run_program(program, pair.input)
            except EngineError as e:
                return checks + [
                    CheckResult(
                        "witness", "witness_replays", FAIL, f"pair {split}[{i}]: replay error: {e}"
                    )
                ]
            if not grid_equal(replayed, pair.output):
                return checks + [
                    CheckResult(
                        "witness", "witness_replays", FAIL,
                        f"pair {split}[{i}]: {_first_difference(pair.output, replayed)}",
                    )
                ]
    checks.append(CheckResult("witness", "witness_replays", PASS))
    return checks


def _screen_shortcuts(episode: Episode, intended: frozenset[str], strict: bool) -> list[CheckResult]:
    checks: list[CheckResult] = []
    flags: list[str] = []
    if all(grid_equal(p.input, p.output) for p in episode.all_pairs()):
        flags.append("identity")
    outputs = [p.output for p in episode.all_pairs()]
    if all(grid_equal(outputs[0], o) for o in outputs[1:]):
        flags.append("constant")
    for flag in flags:
        if flag in intended:
            checks.append(CheckResult("shortcut", flag, FLAGGED, "declared as intended"))
        elif strict:
            checks.append(CheckResult("shortcut", flag, FAIL, "unintended shortcut"))
        else:
            checks.append(CheckResult("shortcut", flag, FLAGGED, "unintended shortcut"))
    if not flags:
        checks.append(CheckResult("shortcut", "shortcut_screen", PASS))
    return checks


def verify_sample(stored: StoredSample, strict: bool = False) -> SampleReport:
    """Run every applicable check against one stored sample."""
    checks: list[CheckResult] = []
    try:
        episode = stored.episode()
    except GridBoundsViolation as e:
        checks.append(CheckResult("structural", "grid_bounds", FAIL, str(e)))
        return SampleReport(stored.stem, stored.generator_id, tuple(checks))
    except EngineError as e:
        checks.append(CheckResult("structural", "episode_parses", FAIL, str(e)))
        return SampleReport(stored.stem, stored.generator_id, tuple(checks))
    checks.append(CheckResult("structural", "episode_parses", PASS))
    checks.append(CheckResult("structural", "grid_bounds", PASS))

    try:
        defn = registry_get(stored.generator_id)
    except UnknownGenerator as e:
        checks.append(CheckResult("structural", "generator_registered", FAIL, str(e)))
        return SampleReport(stored.stem, stored.generator_id, tuple(checks))

    for result in check_constraints(episode, defn.constraints):
        checks.append(
            CheckResult(
                "structural", result.name, PASS if result.passed else FAIL, result.detail
            )
        )

    for inv in defn.declared_invariants:
        try:
            ok = bool(inv.check(episode))
        except Exception as e:  # a broken invariant is a failed invariant
            ok = False
            checks.append(CheckResult("declared_invariant", inv.name, FAIL, f"raised: {e}"))
            continue
        checks.append(CheckResult("declared_invariant", inv.name, PASS if ok else FAIL))

    if stored.witness is not None:
        checks.extend(_verify_witness(stored, episode))

    checks.extend(_screen_shortcuts(episode, defn.intended_shortcuts, strict))
    return SampleReport(stored.stem, stored.generator_id, tuple(checks))


def verify_dataset(dataset: Dataset | Path | str, strict: bool = False) -> VerificationReport:
    """Verify every sample in a dataset directory (or loaded dataset)."""
    if not isinstance(dataset, Dataset):
        dataset = load_dataset(Path(dataset))
    reports = tuple(verify_sample(s, strict) for s in dataset.samples)
    return VerificationReport(strict=strict, samples=reports)


def write_report(dataset_root: Path, report: VerificationReport) -> Path:
    path = Path(dataset_root) / REPORT_NAME
    atomic_write(path, report.to_json())
    return path
