"""Aggregate the four-object, three-expert fixture by both methods and show the rating anchor."""

from pathlib import Path

import numpy as np

from combagg.aggregation import (
    aggregate,
    matrix_scale_weight,
    rating,
    reconstruct_icpcm,
    tree_scale_weight,
)
from combagg.fileio import parse_examination
from combagg.trees import SpanningTree

FIXTURE = Path(__file__).resolve().parents[1] / "fixtures" / "worked_example.json"


def main():
    exam = parse_examination(FIXTURE)
    np.set_printoptions(precision=9, suppress=True)
    for method in ("ordinary", "weighted"):
        report = aggregate(exam, method)
        print(f"{method:9s} {report.vector.weights}  (T={report.total_trees}, rated={report.rated_vectors})")

    e1, e2 = exam.judgments[0], exam.judgments[1]
    tree = SpanningTree(4, ((1, 2), (1, 3), (2, 4)))
    icpcm = reconstruct_icpcm(e2.pcm, tree)
    print("reconstructed from", tree)
    for (u, v), x in sorted(icpcm.entries.items()):
        print(f"  a{u}{v} = {x}")
    r = rating(icpcm, e2, e1, tree_scale_weight(e2.pcm.grade_counts, tree),
               matrix_scale_weight(e1.pcm.grade_counts, 4))
    print(f"rating against {e1.expert_id}: {r:.6f}")


if __name__ == "__main__":
    main()
