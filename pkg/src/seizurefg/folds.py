"""Deterministic leave-k-patient-out cross-validation plans."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .blocks_io import atomic_write_text
from .errors import FoldPlanError

PROTOCOL_PATIENTS = 24
PROTOCOL_FOLDS = 6


@dataclass(frozen=True)
class Fold:
    test_patients: tuple[str, ...]
    train_patients: tuple[str, ...]


@dataclass(frozen=True)
class FoldPlan:
    folds: tuple[Fold, ...]
    seed: int

    def to_json(self) -> dict:
        return {
            "seed": self.seed,
            "folds": [
                {"test": list(f.test_patients), "train": list(f.train_patients)}
                for f in self.folds
            ],
        }

    @classmethod
    def from_json(cls, spec: dict) -> "FoldPlan":
        folds = tuple(
            Fold(tuple(entry["test"]), tuple(entry["train"])) for entry in spec["folds"]
        )
        return cls(folds=folds, seed=int(spec["seed"]))

    def save(self, path: str | Path) -> None:
        atomic_write_text(path, json.dumps(self.to_json(), indent=2) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "FoldPlan":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def make_folds(patients, seed: int, n_folds: int | None = None) -> FoldPlan:
    """Shuffle the sorted patient ids with a seeded generator and split them
    into consecutive equal test groups; train sets are the complements.

    The protocol is 24 patients in 6 folds of 4; any other patient count
    needs an explicit ``n_folds`` override that divides it evenly.
    """
    ids = sorted(patients)
    if len(set(ids)) != len(ids):
        raise FoldPlanError("patient ids must be distinct")
    if n_folds is None:
        if len(ids) != PROTOCOL_PATIENTS:
            raise FoldPlanError(
                f"protocol expects exactly {PROTOCOL_PATIENTS} patients, got "
                f"{len(ids)}; pass n_folds to override"
            )
        n_folds = PROTOCOL_FOLDS
    if n_folds < 2:
        raise FoldPlanError(f"need at least 2 folds, got {n_folds}")
    if len(ids) % n_folds != 0:
        raise FoldPlanError(
            f"{len(ids)} patients cannot be split into {n_folds} equal folds"
        )
    group = len(ids) // n_folds
    order = list(ids)
    rng = np.random.default_rng(seed)
    rng.shuffle(order)
    folds = []
    for i in range(n_folds):
        test = tuple(order[i * group:(i + 1) * group])
        train = tuple(sorted(set(ids) - set(test)))
        folds.append(Fold(test_patients=test, train_patients=train))
    return FoldPlan(folds=tuple(folds), seed=seed)
