"""Permutation algebra over ordered focal events.

A permutation event is a non-empty tuple of distinct frame labels whose
order carries meaning (earlier is more plausible). This module provides
the event space enumeration, the order-preserving left/right
intersections, the left/right orthogonal sums, the ordered probability
transformation and the order-aware discounting rule.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache

from .dst import (
    CONFLICT_EPS,
    Frame,
    ProbabilityDistribution,
    _check_same_frame,
    _settle_total,
)
from .errors import InvariantError, ParseError, TotalConflictError

# Factorial growth: Perm(9) already exceeds a million events.
MAX_PES_SIZE = 8


def perm_count(n: int) -> int:
    """Total number of permutation events over n labels, empty one included."""
    return sum(math.perm(n, i) for i in range(n + 1))


@lru_cache(maxsize=64)
def _enumerate_pes(labels: tuple) -> tuple:
    events = []
    for size in range(1, len(labels) + 1):
        events.extend(itertools.permutations(labels, size))
    return tuple(events)


def enumerate_pes(frame: Frame) -> tuple:
    """All non-empty permutation events, ordered by length then frame order.

    The count equals perm_count(n) - 1. Results are cached per frame; the
    cache never changes observable behaviour.
    """
    if len(frame) > MAX_PES_SIZE:
        raise InvariantError(
            f"frame too large: {len(frame)} labels would enumerate "
            f"{perm_count(len(frame)) - 1} events (limit {MAX_PES_SIZE} labels)"
        )
    return _enumerate_pes(frame.labels)


def left_intersect(a: tuple, b: tuple) -> tuple:
    """Keep the elements of `a` that occur in `b`, in `a`'s order."""
    keep = frozenset(b)
    return tuple(x for x in a if x in keep)


def right_intersect(a: tuple, b: tuple) -> tuple:
    """Keep the elements of `b` that occur in `a`, in `b`'s order."""
    keep = frozenset(a)
    return tuple(x for x in b if x in keep)


def check_event(frame: Frame, event) -> tuple:
    """Validate a permutation event against a frame, returning its tuple form."""
    if isinstance(event, str):
        event = (event,)
    event = tuple(event)
    if not event:
        raise InvariantError("permutation events must be non-empty")
    if len(set(event)) != len(event):
        raise InvariantError(f"repeated label in event {event!r}")
    for lab in event:
        frame.index(lab)
    return event


class RandomPermutationSet:
    """Mass assignment over permutation events, summing to one.

    Event tuples are order-significant. Entries are iterated
    deterministically by (length, frame order); zero-mass events are not
    stored and the empty event is rejected.
    """

    __slots__ = ("frame", "_entries")

    def __init__(self, frame, entries):
        if not isinstance(frame, Frame):
            frame = Frame(frame)
        acc: dict = {}
        items = entries.items() if hasattr(entries, "items") else entries
        for event, mass in items:
            key = check_event(frame, event)
            mass = float(mass)
            if mass < 0.0:
                raise InvariantError(f"negative mass {mass!r} for event {key!r}")
            if not math.isfinite(mass):
                raise InvariantError(f"non-finite mass for event {key!r}")
            acc[key] = acc.get(key, 0.0) + mass
        acc = _settle_total(acc, "permutation mass function")
        self.frame = frame
        self._entries = dict(
            sorted(acc.items(), key=lambda kv: (len(kv[0]), frame.index_key(kv[0])))
        )

    def items(self):
        return self._entries.items()

    def events(self):
        return tuple(self._entries.keys())

    def get(self, event, default=0.0) -> float:
        if isinstance(event, str):
            event = (event,)
        return self._entries.get(tuple(event), default)

    def __getitem__(self, event) -> float:
        return self.get(event)

    def __len__(self):
        return len(self._entries)

    def __eq__(self, other):
        return (
            isinstance(other, RandomPermutationSet)
            and self.frame == other.frame
            and self._entries == other._entries
        )

    def __repr__(self):
        body = ", ".join(f"{k!r}: {v:.6g}" for k, v in self._entries.items())
        return f"RandomPermutationSet({{{body}}})"

    def to_dict(self) -> dict:
        return {
            "frame": list(self.frame.labels),
            "pmf": [{"event": list(ev), "mass": mass} for ev, mass in self.items()],
        }

    @classmethod
    def from_dict(cls, data) -> "RandomPermutationSet":
        if not isinstance(data, dict):
            raise ParseError("permutation set document must be a JSON object")
        try:
            frame_labels = data["frame"]
            rows = data["pmf"]
        except (KeyError, TypeError):
            raise ParseError("permutation set document needs 'frame' and 'pmf'") from None
        if not isinstance(frame_labels, list) or not isinstance(rows, list):
            raise ParseError("'frame' and 'pmf' must be JSON arrays")
        frame = Frame(frame_labels)
        seen = set()
        entries = {}
        for i, row in enumerate(rows):
            if not isinstance(row, dict) or "event" not in row or "mass" not in row:
                raise ParseError(f"pmf[{i}] must be an object with 'event' and 'mass'")
            event = row["event"]
            if not isinstance(event, list) or not event:
                raise InvariantError(f"pmf[{i}]: events must be non-empty arrays")
            key = tuple(event)
            if key in seen:
                raise InvariantError(f"pmf[{i}]: duplicate event {key!r}")
            seen.add(key)
            entries[key] = float(row["mass"])
        return cls(frame, entries)


def _orthogonal_sum(mu1, mu2, intersect, side):
    _check_same_frame(mu1, mu2)
    acc: dict = {}
    k = 0.0
    for b, pb in mu1.items():
        for c, pc in mu2.items():
            inter = intersect(b, c)
            if inter:
                acc[inter] = acc.get(inter, 0.0) + pb * pc
            else:
                k += pb * pc
    if 1.0 - k < CONFLICT_EPS:
        raise TotalConflictError(
            f"total {side} conflict between sources (K = {k!r})", conflict=k
        )
    scale = 1.0 / (1.0 - k)
    return RandomPermutationSet(mu1.frame, {e: v * scale for e, v in acc.items()})


def left_orthogonal_sum(
    mu1: RandomPermutationSet, mu2: RandomPermutationSet
) -> RandomPermutationSet:
    """Conflict-renormalised conjunctive fusion via the left intersection.

    The left operand's internal order survives, so fusing in decreasing
    source quality keeps the most trusted ordering.
    """
    return _orthogonal_sum(mu1, mu2, left_intersect, "left")


def right_orthogonal_sum(
    mu1: RandomPermutationSet, mu2: RandomPermutationSet
) -> RandomPermutationSet:
    """Mirror of the left orthogonal sum: the right operand's order survives."""
    return _orthogonal_sum(mu1, mu2, right_intersect, "right")


def opt(mu: RandomPermutationSet) -> ProbabilityDistribution:
    """Ordered probability transformation.

    Each multi-element event splits its mass evenly over its elements
    except the last-ranked one, which receives nothing. Singleton events
    keep their whole mass.
    """
    probs = {lab: 0.0 for lab in mu.frame}
    for event, mass in mu.items():
        if len(event) == 1:
            probs[event[0]] += mass
        else:
            share = mass / (len(event) - 1)
            for lab in event[:-1]:
                probs[lab] += share
    return ProbabilityDistribution(mu.frame, probs)


def discount_rps(mu: RandomPermutationSet, alpha: float) -> RandomPermutationSet:
    """Order-aware discounting: scale by alpha, spread the rest uniformly.

    Singleton events are scaled by alpha; every multi-element event of the
    whole event space (present in `mu` or not) additionally receives
    (1 - alpha) / (perm_count(n) - n - 1). Frames need at least two labels,
    otherwise there is no multi-element event to receive the remainder.
    """
    alpha = float(alpha)
    if not 0.0 <= alpha <= 1.0:
        raise InvariantError(f"reliability must be in [0, 1], got {alpha!r}")
    n = len(mu.frame)
    if n < 2:
        raise InvariantError("discounting needs a frame with at least two labels")
    if alpha == 1.0:
        return mu
    extra = (1.0 - alpha) / (perm_count(n) - n - 1)
    entries = {}
    for event in enumerate_pes(mu.frame):
        mass = mu.get(event) * alpha
        if len(event) > 1:
            mass += extra
        if mass > 0.0:
            entries[event] = mass
    return RandomPermutationSet(mu.frame, entries)
