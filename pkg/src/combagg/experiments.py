"""Group-combination experiments over a corpus of individual sessions.

Every combination of ``group_size`` sessions is aggregated as one group
examination (equal competences) by both methods and scored by the mean
relative error against the model weights.

Per-session tree data and per-(judged, rater) rating sums are cached, so a
group costs a handful of vector additions instead of a fresh enumeration.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace
from typing import Iterator, Sequence

import numpy as np

from .aggregation import METHODS, ORDINARY, gauge_vector, expert_trees, pair_contribution
from .errors import BadGroupSize, IncompleteMatrix, InputError, InvariantViolation, KindMismatch
from .pcm import Examination, ExpertJudgment
from .robustness import (
    ModelWeights,
    PerturbationSpec,
    consistent_pcm_from_weights,
    mean_relative_error,
    perturb_pcm,
    relative_errors,
)


@dataclass(frozen=True)
class SessionSet:
    object_labels: tuple[str, ...]
    truth: ModelWeights
    sessions: tuple[ExpertJudgment, ...]

    def __post_init__(self):
        object.__setattr__(self, "object_labels", tuple(self.object_labels))
        object.__setattr__(self, "sessions", tuple(self.sessions))
        if not self.sessions:
            raise InputError("a session set needs at least one session")
        for s in self.sessions:
            if s.pcm.n != self.truth.n:
                raise InputError(f"session {s.expert_id!r} has {s.pcm.n} objects, truth has {self.truth.n}")
            if s.pcm.kind is not self.truth.kind:
                raise KindMismatch(f"session {s.expert_id!r} kind differs from the truth's")
        if len(self.object_labels) != self.truth.n:
            raise InputError("label count differs from object count")

    @property
    def size(self) -> int:
        return len(self.sessions)

    def examination(self, combination: Sequence[int]) -> Examination:
        """Group examination of the given 1-based sessions, all competences 1."""
        members = [replace(self.sessions[i - 1], competence=1.0) for i in combination]
        return Examination(self.object_labels, tuple(members))


@dataclass(frozen=True)
class GroupRow:
    combination_index: int
    members: tuple[int, ...]
    member_ids: tuple[str, ...]
    method: str
    mean_error: float


@dataclass(frozen=True)
class MethodSummary:
    max_error: float
    min_error: float
    mean_error: float


@dataclass(frozen=True)
class GroupEvalSummary:
    group_size: int
    combination_count: int
    methods: dict[str, MethodSummary]
    rows: tuple[GroupRow, ...]

    def errors(self, method: str) -> np.ndarray:
        return np.array([r.mean_error for r in self.rows if r.method == method])


def enumerate_groups(S: int, group_size: int) -> Iterator[tuple[int, ...]]:
    """All 1-based combinations in lexicographic order: (1,2,3), (1,2,4), ..."""
    if not 1 <= group_size <= S:
        raise BadGroupSize(f"group size {group_size} not in 1..{S}")
    return itertools.combinations(range(1, S + 1), group_size)


class SessionCache:
    def __init__(self, session_set: SessionSet):
        self.session_set = session_set
        self._trees: dict[int, object] = {}
        self._ordinary: dict[int, tuple[np.ndarray, int]] = {}
        self._pairs: dict[tuple[int, int], tuple[np.ndarray, float]] = {}
        self._unit = [replace(s, competence=1.0) for s in session_set.sessions]

    def trees(self, i: int):
        if i not in self._trees:
            self._trees[i] = expert_trees(self._unit[i - 1].pcm)
        return self._trees[i]

    def ordinary_part(self, i: int) -> tuple[np.ndarray, int]:
        if i not in self._ordinary:
            t = self.trees(i)
            self._ordinary[i] = (t.vectors.sum(axis=0), t.count)
        return self._ordinary[i]

    def pair_part(self, k: int, l: int) -> tuple[np.ndarray, float]:
        if (k, l) not in self._pairs:
            self._pairs[(k, l)] = pair_contribution(self.trees(k), self._unit[k - 1], self._unit[l - 1])
        return self._pairs[(k, l)]

    def aggregate(self, combination: Sequence[int], method: str) -> np.ndarray:
        members = sorted(combination)
        kind = self.session_set.truth.kind
        if method == ORDINARY:
            parts = [self.ordinary_part(i) for i in members]
            acc = sum(p[0] for p in parts) / sum(p[1] for p in parts)
            return gauge_vector(acc, kind).weights
        for i in members:
            if not self._unit[i - 1].pcm.is_complete:
                raise IncompleteMatrix(f"weighted aggregation needs complete matrices; "
                                       f"session {i} is incomplete")
        num, den = 0.0, 0.0
        for k in members:
            for l in members:
                part, total = self.pair_part(k, l)
                num = num + part
                den += total
        return gauge_vector(num / den, kind).weights


def evaluate_group(session_set: SessionSet, combination: Sequence[int], method: str,
                   cache: SessionCache | None = None) -> float:
    """Mean relative error of the group's aggregate against the model weights."""
    if method not in METHODS:
        raise InputError(f"unknown method {method!r}")
    if not combination or any(not 1 <= i <= session_set.size for i in combination):
        raise BadGroupSize(f"combination {tuple(combination)} outside 1..{session_set.size}")
    if len(set(combination)) != len(combination):
        raise BadGroupSize(f"combination {tuple(combination)} repeats a session")
    cache = cache or SessionCache(session_set)
    w = cache.aggregate(combination, method)
    return mean_relative_error(relative_errors(w, session_set.truth.normalized()))


def run_group_experiment(session_set: SessionSet, group_size: int,
                         methods: Sequence[str] = METHODS) -> GroupEvalSummary:
    cache = SessionCache(session_set)
    ids = [s.expert_id for s in session_set.sessions]
    combos = list(enumerate_groups(session_set.size, group_size))
    rows = []
    for method in methods:
        for idx, combo in enumerate(combos, start=1):
            err = evaluate_group(session_set, combo, method, cache)
            rows.append(GroupRow(idx, combo, tuple(ids[i - 1] for i in combo), method, err))
    summaries = {}
    for method in methods:
        errs = np.array([r.mean_error for r in rows if r.method == method])
        summaries[method] = MethodSummary(float(errs.max()), float(errs.min()), float(errs.mean()))
    if len(combos) != math.comb(session_set.size, group_size):
        raise InvariantViolation("combination count mismatch")
    return GroupEvalSummary(group_size, len(combos), summaries, tuple(rows))


def generate_synthetic_sessions(truth: ModelWeights, S: int, noise_delta: float, seed: int,
                                labels: Sequence[str] | None = None) -> SessionSet:
    """S noisy copies of the consistent matrix of ``truth``, one RNG stream per session."""
    if S < 1:
        raise InputError("need at least one session")
    spec = PerturbationSpec(noise_delta, seed)
    base = consistent_pcm_from_weights(truth)
    streams = np.random.SeedSequence(seed).spawn(S)
    sessions = tuple(
        ExpertJudgment(f"S{i + 1:02d}", 1.0, perturb_pcm(base, spec, np.random.default_rng(ss)))
        for i, ss in enumerate(streams)
    )
    labels = tuple(labels) if labels else tuple(f"A_{i}" for i in range(1, truth.n + 1))
    return SessionSet(labels, truth, sessions)
