"""arcforge: procedural generation, verification, and analysis of grid-puzzle task families.

Each task family couples a randomized input-grid sampler with a latent
transformation program written in a small typed DSL. Sampling a family
yields an episode of train/test pairs, a closed executable witness of
the rule, and natural-language reasoning sidecars, all reproducible
from (generator id, seed).
"""

from __future__ import annotations

from . import families as _families  # noqa: F401  (importing registers the catalog)
from .dataset import Dataset, StoredSample, load_dataset, write_samples
from .dsl import DSL_VERSION, parse_program, partial_eval, render_program, run_program, typecheck
from .errors import EngineError
from .generator import (
    ENGINE_VERSION,
    GeneratorDefinition,
    TaskSample,
    create_task,
    register,
    registry_get,
    registry_list,
)
from .grid import Color, Episode, Grid, Pair, parse_arc_json, serialize_arc_json
from .objects import ExtractionMode, GridObject, find_connected_objects
from .sampling import PRNG_ALGORITHM, RngStream
from .verify import verify_dataset, verify_sample

__version__ = ENGINE_VERSION

__all__ = [
    "Color",
    "DSL_VERSION",
    "Dataset",
    "ENGINE_VERSION",
    "EngineError",
    "Episode",
    "ExtractionMode",
    "GeneratorDefinition",
    "Grid",
    "GridObject",
    "PRNG_ALGORITHM",
    "Pair",
    "RngStream",
    "StoredSample",
    "TaskSample",
    "create_task",
    "find_connected_objects",
    "load_dataset",
    "parse_arc_json",
    "parse_program",
    "partial_eval",
    "register",
    "registry_get",
    "registry_list",
    "render_program",
    "run_program",
    "serialize_arc_json",
    "typecheck",
    "verify_dataset",
    "verify_sample",
    "write_samples",
    "__version__",
]
