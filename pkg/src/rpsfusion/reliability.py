"""Outcome-driven reliability of evidence sources.

A source's decision contribution on a labelled sample is the transformed
probability of the true label minus the mean transformed probability of
the competing labels. Contributions are summed per source and min-max
normalised: the most helpful source gets reliability 1, the least helpful
gets 0, and everything else lands in between.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

from .dst import MassFunction, ProbabilityDistribution
from .errors import InvariantError
from .transform import DEFAULT_DISPERSION, ranked_probability_transform, rps_transform

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class DecisionContribution:
    """One source's contribution on one labelled sample."""

    source_index: int
    sample_index: int
    value: float


@dataclass
class ReliabilityReport:
    """Per-source decision totals, normalised reliabilities and fusion order."""

    per_source_dc: list
    reliabilities: list
    fusion_order: list

    def to_dict(self) -> dict:
        return {
            "dc": list(self.per_source_dc),
            "reliability": list(self.reliabilities),
            "fusion_order": list(self.fusion_order),
        }

    @classmethod
    def from_dict(cls, data) -> "ReliabilityReport":
        return cls(
            per_source_dc=[float(v) for v in data["dc"]],
            reliabilities=[float(v) for v in data["reliability"]],
            fusion_order=[int(v) for v in data["fusion_order"]],
        )

    def as_table(self) -> str:
        """Aligned text rendering, one row per source."""
        lines = [f"{'source':>8} {'dc':>12} {'reliability':>12} {'fuse rank':>10}"]
        rank = {src: pos for pos, src in enumerate(self.fusion_order)}
        for i, (dc, rel) in enumerate(zip(self.per_source_dc, self.reliabilities)):
            lines.append(f"{i:>8} {dc:>12.6g} {rel:>12.6g} {rank[i]:>10}")
        return "\n".join(lines)


def decision_contribution(rpt: ProbabilityDistribution, true_label) -> float:
    """Probability of the truth minus the mean probability of the rest."""
    n = len(rpt.frame)
    if n < 2:
        raise InvariantError("decision contribution needs at least two labels")
    correct = rpt[true_label]
    others = math.fsum(rpt[lab] for lab in rpt.frame if lab != true_label)
    return correct - others / (n - 1)


def aggregate_dc(contributions, n_sources: int) -> list:
    """Sum decision contributions per source; absent samples count as zero."""
    totals = [0.0] * n_sources
    for contrib in contributions:
        if not 0 <= contrib.source_index < n_sources:
            raise InvariantError(
                f"source index {contrib.source_index} out of range 0..{n_sources - 1}"
            )
        totals[contrib.source_index] += contrib.value
    return totals


def source_reliability(dc_totals) -> list:
    """Min-max normalise per-source totals into [0, 1].

    When every total is equal the ratio is undefined; all sources are then
    treated as fully reliable, which makes downstream discounting a no-op.
    """
    totals = [float(v) for v in dc_totals]
    if not totals:
        raise InvariantError("need at least one source")
    lo, hi = min(totals), max(totals)
    if hi == lo:
        return [1.0] * len(totals)
    return [(v - lo) / (hi - lo) for v in totals]


def compute_reliabilities(
    per_source_bpas, truths, lam: float = DEFAULT_DISPERSION
) -> ReliabilityReport:
    """Run the full reliability pipeline over a labelled training block.

    `per_source_bpas` holds one list of mass functions per source, aligned
    with `truths` (one true label per sample). A None entry marks a sample
    whose evidence generation failed for that source; it contributes zero
    rather than aborting the computation. Every (source, sample) cell is
    transformed, rank-weighted and scored, then the per-source totals are
    min-max normalised. The fusion order sorts sources by decreasing
    reliability with ascending index as the tie-break.
    """
    n_sources = len(per_source_bpas)
    if n_sources == 0:
        raise InvariantError("need at least one source")
    n_samples = len(truths)
    if n_samples == 0:
        raise InvariantError("empty training set")
    for k, samples in enumerate(per_source_bpas):
        if len(samples) != n_samples:
            raise InvariantError(
                f"source {k} has {len(samples)} samples, expected {n_samples}"
            )

    contributions = []
    frame = None
    for k, samples in enumerate(per_source_bpas):
        for j, bpa in enumerate(samples):
            if bpa is None:
                log.debug("source %d sample %d: no evidence, contributes 0", k, j)
                value = 0.0
            else:
                if not isinstance(bpa, MassFunction):
                    raise InvariantError(
                        f"source {k} sample {j}: expected a MassFunction"
                    )
                if frame is None:
                    frame = bpa.frame
                elif bpa.frame != frame:
                    raise InvariantError(
                        f"source {k} sample {j}: frame differs from the other sources"
                    )
                rpt = ranked_probability_transform(rps_transform(bpa), lam)
                value = decision_contribution(rpt, truths[j])
            contributions.append(DecisionContribution(k, j, value))

    totals = aggregate_dc(contributions, n_sources)
    rels = source_reliability(totals)
    order = sorted(range(n_sources), key=lambda i: (-rels[i], i))
    return ReliabilityReport(
        per_source_dc=totals, reliabilities=rels, fusion_order=order
    )
