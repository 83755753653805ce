"""Shared fixtures: in-memory stored samples and a small on-disk dataset."""

from __future__ import annotations

import pytest

from arcforge.dataset import StoredSample, encode_scalar, reasoning_text, witness_text, write_samples
from arcforge.generator import TaskSample, create_task, registry_list
from arcforge.grid import serialize_arc_json


def stored_from_sample(sample: TaskSample) -> StoredSample:
    """Build the on-disk view of a sample without touching the filesystem."""
    return StoredSample(
        stem=sample.sample_id,
        generator_id=sample.provenance.generator_id,
        seed=sample.provenance.seed,
        taskvars={k: encode_scalar(v) for k, v in sample.taskvars.items()},
        episode_bytes=serialize_arc_json(sample.episode),
        witness=witness_text(sample),
        reasoning=reasoning_text(sample),
    )


@pytest.fixture
def make_stored():
    return stored_from_sample


@pytest.fixture(scope="session")
def small_dataset_dir(tmp_path_factory):
    """Two samples per registered family, with both sidecars, on disk."""
    root = tmp_path_factory.mktemp("smallds")
    samples = [create_task(d, seed) for d in registry_list() for seed in (0, 1)]
    write_samples(root, samples, with_witness=True, with_reasoning=True)
    return root
