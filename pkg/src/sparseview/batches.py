"""Sampled-batch records and their line-delimited JSON serialization.

Each line of a batches file is one JSON object:

  {"config": {"max_components": ..., "n_views": ..., "search_depth": ...,
              "seed": ...},
   "provenance": [{"community": ..., "partition": ..., "phase": ...}, ...],
   "scene_id": ..., "truncated": ..., "views": [...]}

Keys are sorted and separators fixed, so identical batches serialize to
identical bytes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum

from .errors import MalformedLine


class Phase(Enum):
    TERMINAL = "terminal"
    STEINER = "steiner"
    GREEDY = "greedy"
    FILL = "fill"
    DFS = "dfs"


@dataclass(frozen=True)
class BatchConfig:
    """Resolved per-batch sampling parameters."""

    n_views: int
    max_components: int
    search_depth: int
    seed: int


@dataclass(frozen=True)
class ViewProvenance:
    partition: int
    community: int
    phase: Phase


@dataclass
class SampledBatch:
    scene_id: str
    config: BatchConfig
    views: list[int]
    provenance: list[ViewProvenance]
    truncated: bool = False

    def __post_init__(self):
        if len(self.views) != len(set(self.views)):
            raise ValueError("batch contains duplicate views")
        if len(self.views) != len(self.provenance):
            raise ValueError("one provenance record per view required")


def _batch_to_record(batch: SampledBatch) -> dict:
    return {
        "scene_id": batch.scene_id,
        "config": {
            "n_views": batch.config.n_views,
            "max_components": batch.config.max_components,
            "search_depth": batch.config.search_depth,
            "seed": batch.config.seed,
        },
        "views": list(batch.views),
        "provenance": [
            {"partition": p.partition, "community": p.community, "phase": p.phase.value}
            for p in batch.provenance
        ],
        "truncated": batch.truncated,
    }


def _record_to_batch(record: dict) -> SampledBatch:
    cfg = record["config"]
    return SampledBatch(
        scene_id=record["scene_id"],
        config=BatchConfig(
            n_views=cfg["n_views"],
            max_components=cfg["max_components"],
            search_depth=cfg["search_depth"],
            seed=cfg["seed"],
        ),
        views=list(record["views"]),
        provenance=[
            ViewProvenance(p["partition"], p["community"], Phase(p["phase"]))
            for p in record["provenance"]
        ],
        truncated=record.get("truncated", False),
    )


def write_batches(batches: list[SampledBatch], path: str) -> None:
    with open(path, "w") as f:
        for batch in batches:
            f.write(json.dumps(_batch_to_record(batch), sort_keys=True, separators=(",", ":")))
            f.write("\n")


def read_batches(path: str) -> list[SampledBatch]:
    batches = []
    with open(path, "r") as f:
        for line_no, raw in enumerate(f, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                batches.append(_record_to_batch(json.loads(line)))
            except (json.JSONDecodeError, KeyError, ValueError) as exc:
                raise MalformedLine(line_no, f"bad batch record: {exc}", path) from exc
    return batches
