"""Spanning-tree aggregation of pairwise comparisons.

Each spanning tree of an expert's comparison graph determines an ideally
consistent matrix (ICPCM) and hence one priority vector. The ordinary method
averages those vectors over all trees of all experts; the weighted method
first rates every (expert k, tree q, rater l) copy by how well the ICPCM
agrees with rater l's matrix and how fine the scales behind it were, and
averages with the normalized ratings as weights. Multiplicative matrices use
geometric means, additive ones arithmetic means.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from numbers import Real
from typing import Mapping

import numpy as np

from . import _kernel
from .errors import (
    BadGradeCount,
    EdgeNotInMask,
    IncompleteMatrix,
    IncompleteRaterMatrix,
    InputError,
    KindMismatch,
)
from .pcm import (
    DEFAULT_GRADE_COUNT,
    Examination,
    ExpertJudgment,
    Kind,
    PairwiseComparisonMatrix,
    PriorityVector,
    all_pairs,
    normalize,
)
from .trees import SpanningTree

ORDINARY = "ordinary"
WEIGHTED = "weighted"
METHODS = (ORDINARY, WEIGHTED)


@dataclass(frozen=True)
class Icpcm:
    n: int
    kind: Kind
    entries: Mapping[tuple[int, int], Real]   # upper triangle, exact where inputs were exact
    expert_index: int | None = None
    tree_index: int | None = None
    tree: SpanningTree | None = None

    def entry(self, i: int, j: int) -> Real:
        mult = self.kind is Kind.MULTIPLICATIVE
        if i == j:
            return 1 if mult else 0
        if i < j:
            return self.entries[(i, j)]
        x = self.entries[(j, i)]
        return 1 / x if mult else -x

    def matrix(self) -> np.ndarray:
        return np.array([[float(self.entry(i, j)) for j in range(1, self.n + 1)]
                         for i in range(1, self.n + 1)])

    def as_pcm(self) -> PairwiseComparisonMatrix:
        return PairwiseComparisonMatrix(self.n, self.kind, dict(self.entries))


@dataclass(frozen=True)
class RatedVector:
    weights: np.ndarray
    rating: float
    provenance: tuple[int, int, int]   # (k, q, l), 0-based


def _tree_path(tree: SpanningTree, i: int, j: int) -> list[int]:
    adj: dict[int, list[int]] = {v: [] for v in range(1, tree.n + 1)}
    for u, v in tree.edges:
        adj[u].append(v)
        adj[v].append(u)
    prev = {i: None}
    stack = [i]
    while stack:
        a = stack.pop()
        for b in adj[a]:
            if b not in prev:
                prev[b] = a
                stack.append(b)
    path = [j]
    while path[-1] != i:
        path.append(prev[path[-1]])
    return path[::-1]


def reconstruct_icpcm(pcm: PairwiseComparisonMatrix, tree: SpanningTree,
                      expert_index: int | None = None,
                      tree_index: int | None = None) -> Icpcm:
    """Close the tree's judgments under transitivity.

    Entries are chained along the unique tree path in the matrix's own number
    type, so rational inputs give rational outputs; tree edges are copied.
    """
    for e in tree.edges:
        if e not in pcm.values:
            raise EdgeNotInMask(f"tree edge {e} has no judgment")
    mult = pcm.kind is Kind.MULTIPLICATIVE
    entries = {}
    for i, j in all_pairs(pcm.n):
        if (i, j) in tree.edges:
            entries[(i, j)] = pcm.values[(i, j)]
            continue
        path = _tree_path(tree, i, j)
        acc = pcm.entry(path[0], path[1])
        for a, b in zip(path[1:], path[2:]):
            acc = acc * pcm.entry(a, b) if mult else acc + pcm.entry(a, b)
        entries[(i, j)] = acc
    return Icpcm(pcm.n, pcm.kind, entries, expert_index, tree_index, tree)


def icpcm_priorities(icpcm: Icpcm, row: int = 1) -> np.ndarray:
    """Priority vector read off one row of an ideally consistent matrix.

    Multiplicative: w_j proportional to 1 / a_rj, unit sum. Additive:
    w_j = -a_rj, zero mean.
    """
    a = np.array([float(icpcm.entry(row, j)) for j in range(1, icpcm.n + 1)])
    if icpcm.kind is Kind.MULTIPLICATIVE:
        return normalize(1.0 / a, icpcm.kind).weights
    return normalize(-a, icpcm.kind).weights


def _check_grade(g) -> float:
    if g < 2:
        raise BadGradeCount(f"grade count {g} < 2")
    return math.log2(g)


def tree_scale_weight(grade_counts: Mapping, tree: SpanningTree,
                      default: int = DEFAULT_GRADE_COUNT) -> float:
    """Geometric mean of log2(N) over the tree's n-1 edges."""
    logs = [math.log(_check_grade(grade_counts.get(e, default))) for e in tree.edges]
    return math.exp(sum(logs) / len(logs))


def matrix_scale_weight(grade_counts: Mapping, n: int,
                        default: int = DEFAULT_GRADE_COUNT) -> float:
    """Geometric mean of log2(N_uv) over all n(n-1)/2 pairs."""
    logs = [math.log(_check_grade(grade_counts.get(p, default))) for p in all_pairs(n)]
    return math.exp(sum(logs) / len(logs))


def rating(icpcm: Icpcm, judged: ExpertJudgment, rater: ExpertJudgment,
           s_kq: float, s_l: float) -> float:
    """Rating of one ICPCM copy checked against the rater's matrix.

    c_k c_l s_kq s_l divided by ln(sum |a - b| + e) (additive) or
    ln(prod max(a/b, b/a) + e - 1) (multiplicative), over pairs u < v.
    """
    if icpcm.kind is not rater.pcm.kind:
        raise KindMismatch("ICPCM and rater matrix use different comparison kinds")
    if not rater.pcm.is_complete:
        raise IncompleteRaterMatrix(f"rater {rater.expert_id!r} has an incomplete matrix")
    pairs = all_pairs(icpcm.n)
    a = np.array([float(icpcm.entries[p]) for p in pairs])
    b = np.array([float(rater.pcm.values[p]) for p in pairs])
    if icpcm.kind is Kind.MULTIPLICATIVE:
        D = np.abs(np.log(a) - np.log(b)).sum()
        den = _kernel.log_divergence_denominator(np.array([D]))[0]
    else:
        den = math.log(np.abs(a - b).sum() + math.e)
    return judged.competence * rater.competence * s_kq * s_l / den


def row_geometric_mean(pcm: PairwiseComparisonMatrix) -> PriorityVector:
    if not pcm.is_complete:
        raise IncompleteMatrix("row geometric mean needs a complete matrix")
    if pcm.kind is not Kind.MULTIPLICATIVE:
        raise KindMismatch("row geometric mean is defined for multiplicative matrices")
    logs = np.log(pcm.matrix()).mean(axis=1)
    return normalize(np.exp(logs - logs.max()), pcm.kind)


@dataclass
class _ExpertTrees:
    """Per-tree data for one expert, in tree order q."""
    vectors: np.ndarray     # (T, n) log unit-sum weights, or zero-mean additive weights
    icpcm_pairs: np.ndarray  # (T, P) ICPCM upper triangle in additive/log form
    scale: np.ndarray       # (T,) s_kq

    @property
    def count(self) -> int:
        return self.vectors.shape[0]


def _to_log_form(pcm: PairwiseComparisonMatrix) -> np.ndarray:
    up = pcm.upper()
    return np.log(up) if pcm.kind is Kind.MULTIPLICATIVE else up


def expert_trees(pcm: PairwiseComparisonMatrix) -> _ExpertTrees:
    ts = _kernel.tree_set(pcm.n, None if pcm.is_complete else pcm.mask)
    y = ts.potentials(_to_log_form(pcm))
    mult = pcm.kind is Kind.MULTIPLICATIVE
    return _ExpertTrees(
        vectors=_kernel.normalize_rows(y, mult),
        icpcm_pairs=ts.pair_values(y),
        scale=ts.scale_weights(pcm.grades_upper()),
    )


def pair_contribution(trees: _ExpertTrees, judged: ExpertJudgment,
                      rater: ExpertJudgment) -> tuple[np.ndarray, float]:
    """(sum_q R_kql * w_kq, sum_q R_kql) for one ordered expert pair."""
    if not rater.pcm.is_complete:
        raise IncompleteRaterMatrix(f"rater {rater.expert_id!r} has an incomplete matrix")
    D = np.abs(trees.icpcm_pairs - _to_log_form(rater.pcm)).sum(axis=1)
    if rater.pcm.kind is Kind.MULTIPLICATIVE:
        den = _kernel.log_divergence_denominator(D)
    else:
        den = _kernel.additive_denominator(D)
    s_l = matrix_scale_weight(rater.pcm.grade_counts, rater.pcm.n, rater.pcm.default_grades)
    R = judged.competence * rater.competence * s_l * trees.scale / den
    return R @ trees.vectors, float(R.sum())


def gauge_vector(acc: np.ndarray, kind: Kind) -> PriorityVector:
    if kind is Kind.MULTIPLICATIVE:
        return normalize(np.exp(acc - acc.max()), kind)
    return normalize(acc, kind)


@dataclass(frozen=True)
class AggregationReport:
    method: str
    vector: PriorityVector
    tree_counts: tuple[int, ...]          # T_k per expert
    rated_vectors: int                    # T (ordinary) or m * sum T_k (weighted)
    rating_sum: float | None = None
    extra: dict = field(default_factory=dict)

    @property
    def total_trees(self) -> int:
        return sum(self.tree_counts)


def aggregate(exam: Examination, method: str = ORDINARY) -> AggregationReport:
    if method not in METHODS:
        raise InputError(f"unknown method {method!r}; expected one of {METHODS}")
    data = [expert_trees(j.pcm) for j in exam.judgments]
    counts = tuple(d.count for d in data)
    if method == ORDINARY:
        acc = sum(d.vectors.sum(axis=0) for d in data) / sum(counts)
        return AggregationReport(method, gauge_vector(acc, exam.kind), counts, sum(counts))
    for j in exam.judgments:
        if not j.pcm.is_complete:
            raise IncompleteMatrix(f"weighted aggregation needs complete matrices; "
                                   f"expert {j.expert_id!r} is incomplete")
    num = np.zeros(exam.n)
    den = 0.0
    for k, judged in enumerate(exam.judgments):
        for rater in exam.judgments:
            part, total = pair_contribution(data[k], judged, rater)
            num += part
            den += total
    return AggregationReport(method, gauge_vector(num / den, exam.kind), counts,
                             exam.m * sum(counts), den)


def aggregate_ordinary(exam: Examination) -> PriorityVector:
    return aggregate(exam, ORDINARY).vector


def aggregate_weighted(exam: Examination) -> PriorityVector:
    return aggregate(exam, WEIGHTED).vector


def rated_vectors(exam: Examination) -> list[RatedVector]:
    """Every (k, q, l) copy with its rating, in (k, q, l) order. For inspection only."""
    out = []
    data = [expert_trees(j.pcm) for j in exam.judgments]
    mult = exam.kind is Kind.MULTIPLICATIVE
    for k, judged in enumerate(exam.judgments):
        d = data[k]
        ratings = []
        for rater in exam.judgments:
            D = np.abs(d.icpcm_pairs - _to_log_form(rater.pcm)).sum(axis=1)
            den = (_kernel.log_divergence_denominator(D) if mult
                   else _kernel.additive_denominator(D))
            s_l = matrix_scale_weight(rater.pcm.grade_counts, exam.n, rater.pcm.default_grades)
            ratings.append(judged.competence * rater.competence * s_l * d.scale / den)
        for q in range(d.count):
            w = np.exp(d.vectors[q]) if mult else d.vectors[q]
            for l in range(exam.m):
                out.append(RatedVector(w, float(ratings[l][q]), (k, q, l)))
    return out


def batch_single_expert(values: np.ndarray, kind: Kind, method: str,
                        grades_upper: np.ndarray | None = None,
                        chunk_elems: int = 4_000_000) -> np.ndarray:
    """Aggregate many complete single-expert matrices at once.

    ``values`` is (B, P) upper triangles in ``all_pairs`` order; returns (B, n)
    normalized priority vectors. Competence cancels for one expert.
    """
    values = np.atleast_2d(np.asarray(values, dtype=float))
    P = values.shape[1]
    n = int(round((1 + math.sqrt(1 + 8 * P)) / 2))
    mult = kind is Kind.MULTIPLICATIVE
    ts = _kernel.tree_set(n)
    if grades_upper is None:
        grades_upper = np.full(P, float(DEFAULT_GRADE_COUNT))
    ell = np.log(values) if mult else values
    s_kq = ts.scale_weights(grades_upper)
    s_l = float(np.exp(np.log(np.log2(grades_upper)).mean()))
    out = np.empty((values.shape[0], n))
    step = max(1, chunk_elems // max(1, ts.count * P))
    for start in range(0, values.shape[0], step):
        e = ell[start:start + step]
        y = ts.potentials(e)
        vec = _kernel.normalize_rows(y, mult)
        if method == ORDINARY:
            acc = vec.mean(axis=1)
        else:
            D = np.abs(ts.pair_values(y) - e[:, None, :]).sum(axis=-1)
            den = (_kernel.log_divergence_denominator(D) if mult
                   else _kernel.additive_denominator(D))
            R = s_l * s_kq / den
            acc = np.einsum("bt,btn->bn", R, vec) / R.sum(axis=1, keepdims=True)
        if mult:
            w = np.exp(acc - acc.max(axis=1, keepdims=True))
            out[start:start + step] = w / w.sum(axis=1, keepdims=True)
        else:
            out[start:start + step] = acc - acc.mean(axis=1, keepdims=True)
    return out

