"""Order-aware transformations between mass functions and permutation sets.

The pipeline implemented here turns a classical mass function into an
order-sensitive permutation mass function and back into a decision-ready
probability distribution:

  * ordered_support: the probability of drawing an event's elements in
    exactly its order, sampling without replacement with pignistic weights;
  * rps_transform: split every focal's mass across its permutations in
    proportion to their ordered support;
  * ranked_probability_transform: redistribute each event's mass over its
    elements with geometrically decaying rank weights exp(-lam/(1-lam) * r),
    which reduces to the pignistic transformation at lam = 0;
  * rpt_distance: largest per-label gap between two transformed
    distributions (Chebyshev), insensitive to how the remaining
    probability is arranged among the other labels.

DEFAULT_DISPERSION is the package-wide default for the dispersion
parameter lam, which must stay in [0, 1).
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache

from .dst import Frame, MassFunction, ProbabilityDistribution, _check_same_frame, pignistic
from .errors import InvariantError
from .rps import RandomPermutationSet, check_event

DEFAULT_DISPERSION = 0.67


def check_dispersion(lam: float) -> float:
    """Validate the dispersion parameter: a float in [0, 1)."""
    lam = float(lam)
    if not 0.0 <= lam < 1.0:
        raise InvariantError(f"dispersion must be in [0, 1), got {lam!r}")
    return lam


def internal_order_ranking(event: tuple, frame: Frame) -> tuple:
    """Fixed-length ranking slots: the event's labels in order, None-padded."""
    event = check_event(frame, event)
    return event + (None,) * (len(frame) - len(event))


def ordered_support(event, betp: ProbabilityDistribution) -> float:
    """Probability of the event's exact order under sequential sampling.

    Each position i contributes BetP(e_i) / sum(BetP(e_j) for j >= i).
    When a tail sum is zero the remaining draws are uniform over the
    remaining slots, which keeps the per-set permutation masses summing
    to the focal's mass. Singleton events always score 1.
    """
    event = check_event(betp.frame, event)
    vals = [betp[lab] for lab in event]
    size = len(vals)
    tails = [0.0] * size
    running = 0.0
    for i in range(size - 1, -1, -1):
        running += vals[i]
        tails[i] = running
    support = 1.0
    for i in range(size):
        if tails[i] > 0.0:
            support *= vals[i] / tails[i]
        else:
            support *= 1.0 / (size - i)
    return support


def rps_transform(m: MassFunction) -> RandomPermutationSet:
    """Expand a mass function into an order-aware permutation mass function.

    Every focal S of mass m(S) is split over the |S|! permutations of S,
    each permutation receiving m(S) times its ordered support under the
    pignistic distribution of m. Per focal the permutation masses sum back
    to m(S), so the result is a valid permutation mass function.
    """
    betp = pignistic(m)
    entries = {}
    for focal, mass in m.items():
        for sigma in itertools.permutations(focal):
            entries[sigma] = mass * ordered_support(sigma, betp)
    return RandomPermutationSet(m.frame, entries)


@lru_cache(maxsize=256)
def _rank_shares(size: int, lam: float) -> tuple:
    """Normalised rank weights for an event of `size` elements."""
    rate = lam / (1.0 - lam)
    weights = [math.exp(-rate * rank) for rank in range(1, size + 1)]
    total = math.fsum(weights)
    return tuple(w / total for w in weights)


def ranked_probability_transform(
    mu: RandomPermutationSet, lam: float = DEFAULT_DISPERSION
) -> ProbabilityDistribution:
    """Rank-weighted redistribution of permutation mass to labels.

    Within each event, the element at (1-based) rank r receives the share
    exp(-lam/(1-lam) * r) normalised over the event's ranks. Larger lam
    concentrates mass on the front of each event; lam = 0 splits evenly
    and therefore coincides with the pignistic transformation of the
    order-erased mass function.
    """
    lam = check_dispersion(lam)
    probs = {lab: 0.0 for lab in mu.frame}
    for event, mass in mu.items():
        shares = _rank_shares(len(event), lam)
        for pos, lab in enumerate(event):
            probs[lab] += mass * shares[pos]
    return ProbabilityDistribution(mu.frame, probs)


def rpt_distance(
    mu1: RandomPermutationSet,
    mu2: RandomPermutationSet,
    lam: float = DEFAULT_DISPERSION,
) -> float:
    """Largest per-label gap between the two transformed distributions.

    Chebyshev distance between the ranked-probability vectors: zero
    exactly when they coincide, symmetric, and obeying the triangle
    inequality. Using the maximum gap makes the comparison track the
    dominant disagreement while staying insensitive to how the remaining
    probability is shuffled among the other labels.
    """
    _check_same_frame(mu1, mu2)
    p = ranked_probability_transform(mu1, lam)
    q = ranked_probability_transform(mu2, lam)
    return max(abs(p[lab] - q[lab]) for lab in mu1.frame)
