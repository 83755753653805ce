"""Task family definitions and episode assembly.

A generator definition separates three concerns: building an input grid
(free nuisance variation), applying the latent rule (a DSL program),
and assembling an episode that satisfies family-level constraints.
Constraint failures trigger resampling of grid variables and inputs
first, then of task variables, before giving up.

Task variables are fixed for a whole episode and parameterize both the
rule and the reasoning templates; grid variables are redrawn per grid.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from . import dsl
from .errors import (
    BudgetExhausted,
    DegenerateResult,
    DslTypeError,
    OutOfBounds,
    UnknownGenerator,
)
from .grid import Color, Episode, Grid, Pair
from .objects import (
    Axis,
    Connectivity,
    Direction,
    ExtractionMode,
    ModeKind,
    find_connected_objects,
)
from .sampling import RngStream
from .templates import instantiate_template

ENGINE_VERSION = "0.1.0"

TASKVAR_BUDGET = 20
EPISODE_BUDGET = 200

TaskScalar = int | Color | Direction | Axis
Env = dict[str, TaskScalar]

# Samplers draw from their own derived stream and may read variables
# sampled before them, so e.g. a palette can be built up distinct.
VarSampler = Callable[[RngStream, "Env"], TaskScalar]
VarSpec = tuple[tuple[str, VarSampler], ...]


# --- episode constraints -------------------------------------------------------

@dataclass(frozen=True)
class NoTestOnlyColors:
    """Every color appearing in a test grid must appear in some train grid."""

    name: str = "no_test_only_colors"


@dataclass(frozen=True)
class NoTestOnlyObjectSizes:
    """Every object size in a test grid must occur in some train grid."""

    name: str = "no_test_only_object_sizes"
    connectivity: Connectivity = Connectivity.FOUR
    mode: ExtractionMode = ExtractionMode(ModeKind.SAME_COLOR)


@dataclass(frozen=True)
class CoveragePredicate:
    """Named predicate over the list of train input grids."""

    name: str
    predicate: Callable[[Sequence[Grid]], bool]


@dataclass(frozen=True)
class TestDistinctness:
    """A per-grid feature whose test value must differ from every train value."""

    __test__ = False  # constraint kind, not a test-runner fixture

    name: str
    feature: Callable[[Grid], int]


@dataclass(frozen=True)
class CustomPredicate:
    """Named predicate over the full episode."""

    name: str
    predicate: Callable[[Episode], bool]


EpisodeConstraint = (
    NoTestOnlyColors | NoTestOnlyObjectSizes | CoveragePredicate | TestDistinctness | CustomPredicate
)


@dataclass(frozen=True)
class ConstraintResult:
    kind: str
    name: str
    passed: bool
    detail: str = ""


def _grid_colors(g: Grid) -> set[int]:
    return {v for row in g.cells for v in row}


def check_constraints(e: Episode, constraints: Sequence[EpisodeConstraint]) -> list[ConstraintResult]:
    """Evaluate each constraint against the episode, in order."""
    results: list[ConstraintResult] = []
    for c in constraints:
        kind = type(c).__name__
        if isinstance(c, NoTestOnlyColors):
            train_colors: set[int] = set()
            for p in e.train:
                train_colors |= _grid_colors(p.input) | _grid_colors(p.output)
            leaked: set[int] = set()
            for p in e.test:
                leaked |= (_grid_colors(p.input) | _grid_colors(p.output)) - train_colors
            results.append(
                ConstraintResult(
                    kind, c.name, not leaked,
                    "" if not leaked else f"test-only colors: {sorted(leaked)}",
                )
            )
        elif isinstance(c, NoTestOnlyObjectSizes):
            def sizes(g: Grid) -> set[int]:
                return {o.size for o in find_connected_objects(g, c.connectivity, c.mode)}

            train_sizes: set[int] = set()
            for p in e.train:
                train_sizes |= sizes(p.input) | sizes(p.output)
            leaked_sizes: set[int] = set()
            for p in e.test:
                leaked_sizes |= (sizes(p.input) | sizes(p.output)) - train_sizes
            results.append(
                ConstraintResult(
                    kind, c.name, not leaked_sizes,
                    "" if not leaked_sizes else f"test-only sizes: {sorted(leaked_sizes)}",
                )
            )
        elif isinstance(c, CoveragePredicate):
            ok = bool(c.predicate([p.input for p in e.train]))
            results.append(ConstraintResult(kind, c.name, ok, "" if ok else "coverage not met"))
        elif isinstance(c, TestDistinctness):
            train_vals = {c.feature(p.input) for p in e.train}
            collisions = [
                (i, v) for i, p in enumerate(e.test) if (v := c.feature(p.input)) in train_vals
            ]
            results.append(
                ConstraintResult(
                    kind, c.name, not collisions,
                    "" if not collisions else f"test value repeats train: {collisions}",
                )
            )
        elif isinstance(c, CustomPredicate):
            ok = bool(c.predicate(e))
            results.append(ConstraintResult(kind, c.name, ok, "" if ok else "predicate false"))
        else:
            raise TypeError(f"unknown constraint {c!r}")
    return results


# --- declared invariants -------------------------------------------------------

@dataclass(frozen=True)
class DeclaredInvariant:
    """A property of every valid episode from a family, re-checkable offline."""

    name: str
    check: Callable[[Episode], bool]
    description: str = ""


# --- generator definitions -----------------------------------------------------

@dataclass(frozen=True)
class GeneratorDefinition:
    """Everything the engine needs to sample and explain one task family."""

    id: str
    summary: str
    taskvar_spec: VarSpec
    gridvar_spec: VarSpec
    input_builder: Callable[[RngStream, Env, Env], Grid]
    transform_builder: Callable[[Env], dsl.Term]
    input_template: tuple[str, ...]
    transform_template: tuple[str, ...]
    constraints: tuple[EpisodeConstraint, ...] = ()
    declared_invariants: tuple[DeclaredInvariant, ...] = ()
    intended_shortcuts: frozenset[str] = frozenset()
    train_range: tuple[int, int] = (3, 5)
    test_range: tuple[int, int] = (1, 1)


@dataclass(frozen=True)
class Provenance:
    generator_id: str
    seed: int
    engine_version: str
    prng_algorithm: str
    taskvar_attempts: int
    episode_attempts: int


@dataclass(frozen=True)
class TaskSample:
    """A sampled episode plus everything needed to audit it."""

    episode: Episode
    taskvars: Env
    gridvars: tuple[Env, ...]  # one per pair, train first then test
    witness: dsl.Term
    input_reasoning: tuple[str, ...]
    transform_reasoning: tuple[str, ...]
    provenance: Provenance

    @property
    def sample_id(self) -> str:
        return f"{self.provenance.generator_id}__{self.provenance.seed}"


def _sample_env(spec: VarSpec, rng: RngStream) -> Env:
    env: Env = {}
    for name, sampler in spec:
        env[name] = sampler(rng.derive(name), dict(env))
    return env


_RETRYABLE = (BudgetExhausted, OutOfBounds, DegenerateResult)


def create_task(defn: GeneratorDefinition, seed: int) -> TaskSample:
    """Sample one episode from a family, deterministically in (family, seed).

    Grid-level failures and constraint misses resample grid variables up
    to EPISODE_BUDGET times per task-variable draw; task variables are
    redrawn up to TASKVAR_BUDGET times before BudgetExhausted.
    """
    root = RngStream(seed).derive(defn.id)
    episode_attempts = 0
    for outer in range(TASKVAR_BUDGET):
        taskvars = _sample_env(defn.taskvar_spec, root.derive("taskvars", outer))
        program = defn.transform_builder(taskvars)
        if dsl.typecheck(program) is not dsl.Ty.GRID:
            raise DslTypeError(f"{defn.id}: transform program must produce a grid")
        witness = dsl.partial_eval(program, taskvars)
        if dsl.typecheck(witness) is not dsl.Ty.GRID:
            raise DslTypeError(f"{defn.id}: inlined witness must produce a grid")
        shape_rng = root.derive("shape", outer)
        n_train = shape_rng.randint(*defn.train_range)
        n_test = shape_rng.randint(*defn.test_range)
        for inner in range(EPISODE_BUDGET):
            episode_attempts += 1
            grid_rng = root.derive("grids", outer, inner)
            try:
                pairs: list[Pair] = []
                gridvar_envs: list[Env] = []
                for slot in range(n_train + n_test):
                    slot_rng = grid_rng.derive(slot)
                    gridvars = _sample_env(defn.gridvar_spec, slot_rng.derive("gridvars"))
                    grid_in = defn.input_builder(slot_rng.derive("input"), taskvars, gridvars)
                    grid_out = dsl.run_program(witness, grid_in)
                    pairs.append(Pair(input=grid_in, output=grid_out))
                    gridvar_envs.append(gridvars)
                episode = Episode(train=tuple(pairs[:n_train]), test=tuple(pairs[n_train:]))
            except _RETRYABLE:
                continue
            if all(r.passed for r in check_constraints(episode, defn.constraints)):
                return TaskSample(
                    episode=episode,
                    taskvars=taskvars,
                    gridvars=tuple(gridvar_envs),
                    witness=witness,
                    input_reasoning=instantiate_template(defn.input_template, taskvars),
                    transform_reasoning=instantiate_template(defn.transform_template, taskvars),
                    provenance=Provenance(
                        generator_id=defn.id,
                        seed=seed,
                        engine_version=ENGINE_VERSION,
                        prng_algorithm=_prng_id(),
                        taskvar_attempts=outer + 1,
                        episode_attempts=episode_attempts,
                    ),
                )
    raise BudgetExhausted(
        f"{defn.id} seed {seed}: no valid episode in "
        f"{TASKVAR_BUDGET}x{EPISODE_BUDGET} attempts",
        episode_attempts,
    )


def _prng_id() -> str:
    from .sampling import PRNG_ALGORITHM

    return PRNG_ALGORITHM


# --- registry -------------------------------------------------------------------

_REGISTRY: dict[str, GeneratorDefinition] = {}


def register(defn: GeneratorDefinition) -> GeneratorDefinition:
    if defn.id in _REGISTRY:
        raise ValueError(f"generator id '{defn.id}' already registered")
    _REGISTRY[defn.id] = defn
    return defn


def registry_get(generator_id: str) -> GeneratorDefinition:
    try:
        return _REGISTRY[generator_id]
    except KeyError:
        raise UnknownGenerator(f"no generator registered as '{generator_id}'") from None


def registry_list() -> list[GeneratorDefinition]:
    """All registered definitions in registration order."""
    return list(_REGISTRY.values())
