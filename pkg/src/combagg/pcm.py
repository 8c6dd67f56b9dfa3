"""Pairwise comparison matrices, expert judgments and priority vectors.

Objects are numbered 1..n in every public interface. A matrix stores only
its upper triangle: ``values[(u, v)]`` with ``u < v`` estimates ``w_u / w_v``
(multiplicative) or ``w_u - w_v`` (additive); the diagonal and the lower
triangle are implied.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from numbers import Real
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    BadGradeCount,
    DisconnectedGraph,
    DuplicatePair,
    IncompleteMatrix,
    InputError,
    KindMismatch,
    NonPositiveEntry,
    NonPositiveWeight,
)
from .trees import is_connected

DEFAULT_GRADE_COUNT = 9

Pair = tuple[int, int]


class Kind(str, Enum):
    MULTIPLICATIVE = "multiplicative"
    ADDITIVE = "additive"

    @classmethod
    def parse(cls, value: "Kind | str") -> "Kind":
        if isinstance(value, Kind):
            return value
        aliases = {"mult": cls.MULTIPLICATIVE, "add": cls.ADDITIVE}
        key = str(value).strip().lower()
        if key in aliases:
            return aliases[key]
        try:
            return cls(key)
        except ValueError:
            raise InputError(f"unknown comparison kind {value!r}") from None


def all_pairs(n: int) -> list[Pair]:
    """Upper-triangle pairs of 1..n in lexicographic order."""
    return [(u, v) for u in range(1, n + 1) for v in range(u + 1, n + 1)]


@dataclass(frozen=True)
class PairwiseComparisonMatrix:
    n: int
    kind: Kind
    values: Mapping[Pair, Real]
    grade_counts: Mapping[Pair, int] = field(default_factory=dict)
    default_grades: int = DEFAULT_GRADE_COUNT

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 2:
            raise InputError(f"object count must be an integer >= 2, got {self.n!r}")
        object.__setattr__(self, "kind", Kind.parse(self.kind))
        if self.default_grades < 2:
            raise BadGradeCount(f"default grade count {self.default_grades} < 2")
        values = {}
        for (u, v), x in sorted(self.values.items()):
            if not (1 <= u < v <= self.n):
                raise InputError(f"pair ({u},{v}) outside 1 <= u < v <= {self.n}")
            if not isinstance(x, Real) or not math.isfinite(x):
                raise InputError(f"value for pair ({u},{v}) is not a finite real: {x!r}")
            if self.kind is Kind.MULTIPLICATIVE and x <= 0:
                raise NonPositiveEntry(f"multiplicative value for ({u},{v}) must be > 0, got {x}")
            values[(u, v)] = x
        grades = {}
        for (u, v), g in sorted(self.grade_counts.items()):
            if (u, v) not in values:
                raise InputError(f"grade count given for pair ({u},{v}) with no value")
            if int(g) != g or g < 2:
                raise BadGradeCount(f"grade count for ({u},{v}) must be an integer >= 2, got {g}")
            grades[(u, v)] = int(g)
        object.__setattr__(self, "values", MappingProxyType(values))
        object.__setattr__(self, "grade_counts", MappingProxyType(grades))
        if not is_connected(self.n, values.keys()):
            raise DisconnectedGraph(f"comparison graph on {self.n} objects is not connected")

    @property
    def pairs(self) -> tuple[Pair, ...]:
        return tuple(self.values)

    @property
    def mask(self) -> frozenset[Pair]:
        return frozenset(self.values)

    @property
    def is_complete(self) -> bool:
        return len(self.values) == self.n * (self.n - 1) // 2

    def grade(self, u: int, v: int) -> int:
        if u > v:
            u, v = v, u
        return self.grade_counts.get((u, v), self.default_grades)

    def entry(self, i: int, j: int) -> Real:
        """Implied matrix entry a_ij (1-based), including diagonal and lower triangle."""
        mult = self.kind is Kind.MULTIPLICATIVE
        if i == j:
            return 1 if mult else 0
        if i < j:
            return self.values[(i, j)]
        x = self.values[(j, i)]
        return 1 / x if mult else -x

    def upper(self) -> np.ndarray:
        """Float upper-triangle values in ``all_pairs`` order; NaN where absent."""
        out = np.full(self.n * (self.n - 1) // 2, np.nan)
        for idx, p in enumerate(all_pairs(self.n)):
            if p in self.values:
                out[idx] = float(self.values[p])
        return out

    def grades_upper(self) -> np.ndarray:
        return np.array([self.grade(u, v) for u, v in all_pairs(self.n)], dtype=float)

    def matrix(self) -> np.ndarray:
        """Full n x n float matrix; missing judgments are NaN."""
        mult = self.kind is Kind.MULTIPLICATIVE
        A = np.full((self.n, self.n), np.nan)
        np.fill_diagonal(A, 1.0 if mult else 0.0)
        for (u, v), x in self.values.items():
            x = float(x)
            A[u - 1, v - 1] = x
            A[v - 1, u - 1] = 1.0 / x if mult else -x
        return A

    def with_values(self, upper: Sequence[float]) -> "PairwiseComparisonMatrix":
        """Same mask and grade counts, new upper-triangle values (``all_pairs`` order)."""
        index = {p: i for i, p in enumerate(all_pairs(self.n))}
        values = {p: float(upper[index[p]]) for p in self.values}
        return PairwiseComparisonMatrix(
            self.n, self.kind, values, dict(self.grade_counts), self.default_grades
        )


def make_pcm(n: int, kind: Kind | str, entries: Iterable[Sequence],
             default_grades: int = DEFAULT_GRADE_COUNT) -> PairwiseComparisonMatrix:
    """Build a validated matrix from ``(u, v, value[, grade_count])`` tuples."""
    values: dict[Pair, Real] = {}
    grades: dict[Pair, int] = {}
    for entry in entries:
        if len(entry) not in (3, 4):
            raise InputError(f"entry must be (u, v, value[, grades]), got {entry!r}")
        u, v, x = entry[:3]
        if (u, v) in values:
            raise DuplicatePair(f"pair ({u},{v}) given twice")
        values[(u, v)] = x
        if len(entry) == 4 and entry[3] is not None:
            grades[(u, v)] = entry[3]
    return PairwiseComparisonMatrix(n, kind, values, grades, default_grades)


def consistency_defect(pcm: PairwiseComparisonMatrix) -> float:
    """Largest transitivity violation over all index triples; 0 for a consistent matrix."""
    if not pcm.is_complete:
        raise IncompleteMatrix("consistency defect needs a complete matrix")
    A = pcm.matrix()
    if pcm.kind is Kind.MULTIPLICATIVE:
        A = np.log(A)
    # gap[i, k, j] = a_ik + a_kj - a_ij
    gap = A[:, :, None] + A[None, :, :] - A[:, None, :]
    return float(np.abs(gap).max())


def convert_kind(pcm: PairwiseComparisonMatrix, target: Kind | str) -> PairwiseComparisonMatrix:
    target = Kind.parse(target)
    if target is pcm.kind:
        return pcm
    if target is Kind.ADDITIVE:
        values = {p: math.log(x) for p, x in pcm.values.items()}
    else:
        values = {p: math.exp(x) for p, x in pcm.values.items()}
    return PairwiseComparisonMatrix(
        pcm.n, target, values, dict(pcm.grade_counts), pcm.default_grades
    )


@dataclass(frozen=True)
class PriorityVector:
    weights: np.ndarray
    kind: Kind

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "kind", Kind.parse(self.kind))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.weights, dtype=dtype)

    def __len__(self):
        return len(self.weights)

    def __iter__(self):
        return iter(self.weights.tolist())

    def __getitem__(self, i):
        return self.weights[i]


def normalize(weights, kind: Kind | str) -> PriorityVector:
    """Fix the gauge: unit sum (multiplicative) or zero mean (additive)."""
    kind = Kind.parse(kind)
    w = np.asarray(weights, dtype=float)
    if not np.all(np.isfinite(w)):
        raise InputError("weights must be finite")
    if kind is Kind.MULTIPLICATIVE:
        if np.any(w <= 0):
            raise NonPositiveWeight("multiplicative weights must be > 0")
        return PriorityVector(w / w.sum(), kind)
    return PriorityVector(w - w.mean(), kind)


@dataclass(frozen=True)
class ExpertJudgment:
    expert_id: str
    competence: float
    pcm: PairwiseComparisonMatrix

    def __post_init__(self):
        c = self.competence
        if not isinstance(c, Real) or not math.isfinite(c) or c <= 0:
            raise InputError(f"competence of expert {self.expert_id!r} must be finite and > 0")


@dataclass(frozen=True)
class Examination:
    object_labels: tuple[str, ...]
    judgments: tuple[ExpertJudgment, ...]

    def __post_init__(self):
        object.__setattr__(self, "object_labels", tuple(self.object_labels))
        object.__setattr__(self, "judgments", tuple(self.judgments))
        if not self.judgments:
            raise InputError("an examination needs at least one expert")
        first = self.judgments[0].pcm
        if len(self.object_labels) != first.n:
            raise InputError(f"{len(self.object_labels)} labels for {first.n} objects")
        for j in self.judgments[1:]:
            if j.pcm.n != first.n:
                raise InputError(f"expert {j.expert_id!r} compares {j.pcm.n} objects, expected {first.n}")
            if j.pcm.kind is not first.kind:
                raise KindMismatch(f"expert {j.expert_id!r} uses {j.pcm.kind.value} comparisons")

    @property
    def n(self) -> int:
        return self.judgments[0].pcm.n

    @property
    def m(self) -> int:
        return len(self.judgments)

    @property
    def kind(self) -> Kind:
        return self.judgments[0].pcm.kind

    @classmethod
    def single(cls, pcm: PairwiseComparisonMatrix, labels: Sequence[str] | None = None,
               competence: float = 1.0) -> "Examination":
        labels = labels or [f"A_{i}" for i in range(1, pcm.n + 1)]
        return cls(tuple(labels), (ExpertJudgment("E_1", competence, pcm),))

