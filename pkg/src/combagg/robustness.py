"""Error metrics and worst-case perturbation analysis.

A consistent matrix is built from known model weights, every judgment is
allowed to drift by at most ``delta`` percent, and the aggregated priorities
are compared with the model weights. ``vertex_oracle`` searches the corners
of that box exhaustively, which is affordable up to five objects.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .aggregation import METHODS, batch_single_expert
from .errors import BadConfig, GaugeMismatch, InputError, NTooLarge
from .pcm import (
    DEFAULT_GRADE_COUNT,
    Kind,
    PairwiseComparisonMatrix,
    all_pairs,
)

DEFAULT_SEED = 20190415
MIN_ADDITIVE_WEIGHT = 0.01
MAX_ORACLE_N = 5
UNIFORM = "uniform-interval"
VERTEX = "vertex-only"


@dataclass(frozen=True)
class ModelWeights:
    weights: tuple[float, ...]
    kind: Kind = Kind.MULTIPLICATIVE

    def __post_init__(self):
        w = tuple(float(x) for x in self.weights)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "kind", Kind.parse(self.kind))
        if len(w) < 2:
            raise InputError("model weights need at least 2 objects")
        if not all(math.isfinite(x) for x in w):
            raise InputError("model weights must be finite")
        if self.kind is Kind.MULTIPLICATIVE and min(w) <= 0:
            raise InputError("multiplicative model weights must be > 0")
        if self.kind is Kind.ADDITIVE and min(abs(x) for x in w) < MIN_ADDITIVE_WEIGHT:
            raise InputError(f"additive model weights must satisfy |w| >= {MIN_ADDITIVE_WEIGHT}")

    @property
    def n(self) -> int:
        return len(self.weights)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.weights)

    def normalized(self) -> "ModelWeights":
        """Unit sum for multiplicative weights; additive weights keep their own gauge."""
        if self.kind is Kind.MULTIPLICATIVE:
            s = sum(self.weights)
            return ModelWeights(tuple(x / s for x in self.weights), self.kind)
        return self


@dataclass(frozen=True)
class PerturbationSpec:
    delta: float
    seed: int = DEFAULT_SEED
    mode: str = UNIFORM

    def __post_init__(self):
        if not 0 < self.delta < 100:
            raise BadConfig(f"delta must lie in (0, 100), got {self.delta}")
        if self.mode not in (UNIFORM, VERTEX):
            raise BadConfig(f"unknown perturbation mode {self.mode!r}")


@dataclass(frozen=True)
class OracleResult:
    delta_max: float
    argmax_matrix: PairwiseComparisonMatrix
    evaluations: int


def _aligned(pv, truth) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(truth, ModelWeights):
        kind, t = truth.kind, truth.array
    else:
        kind = getattr(pv, "kind", Kind.MULTIPLICATIVE)
        t = np.asarray(truth, dtype=float)
    w = np.asarray(pv, dtype=float)
    if w.shape[-1] != t.shape[-1]:
        raise InputError(f"vector of length {w.shape[-1]} compared with {t.shape[-1]} weights")
    if Kind.parse(kind) is Kind.MULTIPLICATIVE:
        if abs(t.sum() - 1.0) > 1e-9:
            raise GaugeMismatch("multiplicative truth must be normalized to unit sum")
        if np.any(np.abs(w.sum(axis=-1) - 1.0) > 1e-9):
            raise GaugeMismatch("multiplicative priorities must be normalized to unit sum")
    else:
        # additive vectors are defined up to a shift: move w into the truth's gauge
        w = w - w.mean(axis=-1, keepdims=True) + t.mean()
    return w, t


def relative_errors(pv, truth) -> np.ndarray:
    """|w_k - w_k^true| / |w_k^true| per object."""
    w, t = _aligned(pv, truth)
    return np.abs(w - t) / np.abs(t)


def mean_relative_error(errors) -> float:
    errors = np.asarray(errors, dtype=float)
    if errors.size == 0:
        raise InputError("no errors to average")
    return float(errors.mean())


def max_relative_deviation(pv, truth) -> float:
    """Largest relative deviation from the truth, in percent."""
    return float(relative_errors(pv, truth).max(axis=-1) * 100.0)


def consistent_pcm_from_weights(truth: ModelWeights,
                                grade_count: int = DEFAULT_GRADE_COUNT) -> PairwiseComparisonMatrix:
    w = truth.weights
    if truth.kind is Kind.MULTIPLICATIVE:
        values = {(u, v): w[u - 1] / w[v - 1] for u, v in all_pairs(truth.n)}
    else:
        values = {(u, v): w[u - 1] - w[v - 1] for u, v in all_pairs(truth.n)}
    return PairwiseComparisonMatrix(truth.n, truth.kind, values, default_grades=grade_count)


def perturb_pcm(pcm: PairwiseComparisonMatrix, spec: PerturbationSpec,
                rng: np.random.Generator | None = None) -> PairwiseComparisonMatrix:
    """Scale every stored judgment by ``1 + eps`` with ``|eps| <= delta / 100``."""
    if rng is None:
        rng = np.random.default_rng(spec.seed)
    d = spec.delta / 100.0
    pairs = pcm.pairs
    if spec.mode == UNIFORM:
        eps = rng.uniform(-d, d, size=len(pairs))
    else:
        eps = rng.choice(np.array([-d, d]), size=len(pairs))
    values = {p: float(pcm.values[p]) * (1.0 + e) for p, e in zip(pairs, eps)}
    return PairwiseComparisonMatrix(pcm.n, pcm.kind, values, dict(pcm.grade_counts),
                                    pcm.default_grades)


class DeviationObjective:
    """Maximum relative deviation (percent) of one method over perturbed matrices.

    Individuals are upper triangles in ``all_pairs`` order, each entry inside
    ``[low, high]``, the +-delta box around the consistent matrix.
    """

    def __init__(self, truth: ModelWeights, delta: float, method: str,
                 grade_count: int = DEFAULT_GRADE_COUNT):
        if method not in METHODS:
            raise InputError(f"unknown method {method!r}")
        if not 0 <= delta < 100:
            raise BadConfig(f"delta must lie in [0, 100), got {delta}")
        self.truth = truth.normalized()
        self.method = method
        self.delta = delta
        self.base = consistent_pcm_from_weights(self.truth, grade_count)
        self.center = self.base.upper()
        d = delta / 100.0
        ends = np.stack([self.center * (1 - d), self.center * (1 + d)])
        self.low, self.high = ends.min(axis=0), ends.max(axis=0)
        self._grades = self.base.grades_upper()
        self.evaluations = 0

    def vectors(self, values: np.ndarray) -> np.ndarray:
        return batch_single_expert(values, self.truth.kind, self.method, self._grades)

    def __call__(self, values: np.ndarray) -> np.ndarray:
        values = np.atleast_2d(values)
        self.evaluations += values.shape[0]
        w, t = _aligned(self.vectors(values), self.truth)
        return (np.abs(w - t) / np.abs(t)).max(axis=1) * 100.0

    def vertices(self) -> np.ndarray:
        """All 2^P sign patterns; bit p of row i set means +delta on pair p."""
        P = self.center.size
        bits = (np.arange(2 ** P)[:, None] >> np.arange(P)[None, :]) & 1
        eps = np.where(bits == 1, 1.0, -1.0) * (self.delta / 100.0)
        return self.center * (1.0 + eps)

    def as_pcm(self, values) -> PairwiseComparisonMatrix:
        return self.base.with_values(values)


def vertex_oracle(truth: ModelWeights, delta: float, method: str,
                  grade_count: int = DEFAULT_GRADE_COUNT) -> OracleResult:
    """Exhaustive worst case over the corners of the +-delta box (n <= 5)."""
    if truth.n > MAX_ORACLE_N:
        raise NTooLarge(f"vertex oracle limited to n <= {MAX_ORACLE_N}, got {truth.n}")
    objective = DeviationObjective(truth, delta, method, grade_count)
    corners = objective.vertices()
    fitness = objective(corners)
    best = int(np.argmax(fitness))
    return OracleResult(float(fitness[best]), objective.as_pcm(corners[best]), len(corners))
