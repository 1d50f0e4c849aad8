"""Classical belief-function primitives.

Frames of discernment, mass functions over unordered focal sets, the
pignistic probability transformation, classical discounting, Dempster's
combination rule (kept as a fusion baseline) and the Jousselme distance.

All values are immutable after construction and every operation is a pure
function, so everything here is safe to call concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import InvariantError, ParseError, TotalConflictError

# |sum - 1| accepted untouched / repaired by renormalisation / rejected.
SUM_TOL = 1e-9
RENORM_TOL = 1e-6
# Masses below this are pruned; 1 - K below this is total conflict.
PRUNE_EPS = 1e-12
CONFLICT_EPS = 1e-12


class Frame:
    """Ordered collection of distinct class labels.

    Label order is fixed at construction and used only to canonicalise
    focal sets and break ties deterministically, never for semantics.
    """

    __slots__ = ("labels", "_index")

    def __init__(self, labels):
        labels = tuple(labels)
        if not labels:
            raise InvariantError("a frame needs at least one label")
        if len(set(labels)) != len(labels):
            raise InvariantError(f"frame labels must be distinct, got {labels!r}")
        self.labels = labels
        self._index = {lab: i for i, lab in enumerate(labels)}

    def __len__(self):
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)

    def __contains__(self, label):
        return label in self._index

    def __eq__(self, other):
        return isinstance(other, Frame) and self.labels == other.labels

    def __hash__(self):
        return hash(self.labels)

    def __repr__(self):
        return f"Frame({list(self.labels)!r})"

    def index(self, label):
        try:
            return self._index[label]
        except KeyError:
            raise InvariantError(f"label {label!r} is not in the frame") from None

    def index_key(self, labels):
        """Sort key for a collection of labels: tuple of frame indices."""
        return tuple(self.index(lab) for lab in labels)

    def canon_set(self, labels) -> tuple:
        """Canonical focal-set form: distinct labels sorted in frame order."""
        unique = set(labels)
        if not unique:
            raise InvariantError("focal sets must be non-empty")
        return tuple(sorted(unique, key=self.index))


def _settle_total(entries: dict, what: str) -> dict:
    """Prune sub-epsilon masses and enforce the sum-to-one invariant."""
    entries = {k: v for k, v in entries.items() if v >= PRUNE_EPS}
    if not entries:
        raise InvariantError(f"{what} has no support after pruning")
    total = math.fsum(entries.values())
    if abs(total - 1.0) <= SUM_TOL:
        return entries
    if abs(total - 1.0) <= RENORM_TOL:
        return {k: v / total for k, v in entries.items()}
    raise InvariantError(f"{what} masses sum to {total!r}, expected 1")


class MassFunction:
    """Mass assignment over non-empty unordered focal sets, summing to one.

    Focal sets are stored canonically (frame order) and iterated
    deterministically by (size, frame order). Zero-mass entries are never
    stored; the empty set is rejected.
    """

    __slots__ = ("frame", "_entries")

    def __init__(self, frame, entries):
        if not isinstance(frame, Frame):
            frame = Frame(frame)
        acc: dict = {}
        items = entries.items() if hasattr(entries, "items") else entries
        for focal, mass in items:
            key = frame.canon_set(focal if not isinstance(focal, str) else (focal,))
            mass = float(mass)
            if mass < 0.0:
                raise InvariantError(f"negative mass {mass!r} for focal {key!r}")
            if not math.isfinite(mass):
                raise InvariantError(f"non-finite mass for focal {key!r}")
            acc[key] = acc.get(key, 0.0) + mass
        acc = _settle_total(acc, "mass function")
        self.frame = frame
        self._entries = dict(
            sorted(acc.items(), key=lambda kv: (len(kv[0]), frame.index_key(kv[0])))
        )

    def items(self):
        return self._entries.items()

    def focals(self):
        return tuple(self._entries.keys())

    def __getitem__(self, focal) -> float:
        key = self.frame.canon_set(focal if not isinstance(focal, str) else (focal,))
        return self._entries.get(key, 0.0)

    def __len__(self):
        return len(self._entries)

    def __eq__(self, other):
        return (
            isinstance(other, MassFunction)
            and self.frame == other.frame
            and self._entries == other._entries
        )

    def __repr__(self):
        body = ", ".join(f"{set(k)!r}: {v:.6g}" for k, v in self._entries.items())
        return f"MassFunction({{{body}}})"

    def to_dict(self) -> dict:
        return {
            "frame": list(self.frame.labels),
            "masses": [
                {"focal": list(focal), "mass": mass} for focal, mass in self.items()
            ],
        }

    @classmethod
    def from_dict(cls, data) -> "MassFunction":
        if not isinstance(data, dict):
            raise ParseError("mass function document must be a JSON object")
        try:
            frame_labels = data["frame"]
            rows = data["masses"]
        except (KeyError, TypeError):
            raise ParseError("mass function document needs 'frame' and 'masses'") from None
        if not isinstance(frame_labels, list) or not isinstance(rows, list):
            raise ParseError("'frame' and 'masses' must be JSON arrays")
        frame = Frame(frame_labels)
        seen = set()
        entries = {}
        for i, row in enumerate(rows):
            if not isinstance(row, dict) or "focal" not in row or "mass" not in row:
                raise ParseError(f"masses[{i}] must be an object with 'focal' and 'mass'")
            focal = row["focal"]
            if not isinstance(focal, list) or not focal:
                raise InvariantError(f"masses[{i}]: focal sets must be non-empty arrays")
            key = frame.canon_set(focal)
            if key in seen:
                raise InvariantError(f"masses[{i}]: duplicate focal {sorted(focal)!r}")
            seen.add(key)
            entries[key] = float(row["mass"])
        return cls(frame, entries)


@dataclass(frozen=True)
class ProbabilityDistribution:
    """Probability assignment over a frame's labels, summing to one."""

    frame: Frame
    probs: dict = field(compare=True)

    def __post_init__(self):
        probs = {lab: float(self.probs.get(lab, 0.0)) for lab in self.frame}
        for lab, p in probs.items():
            if p < -SUM_TOL:
                raise InvariantError(f"negative probability {p!r} for {lab!r}")
        total = math.fsum(probs.values())
        if abs(total - 1.0) > SUM_TOL:
            raise InvariantError(f"probabilities sum to {total!r}, expected 1")
        object.__setattr__(self, "probs", probs)

    def __getitem__(self, label) -> float:
        self.frame.index(label)
        return self.probs[label]

    def as_tuple(self):
        return tuple(self.probs[lab] for lab in self.frame)

    def argmax(self):
        """Label with the highest probability, lowest frame index on ties."""
        best, best_p = None, -1.0
        for lab in self.frame:
            p = self.probs[lab]
            if p > best_p:
                best, best_p = lab, p
        return best


def _check_same_frame(a, b):
    if a.frame != b.frame:
        raise InvariantError(f"frame mismatch: {a.frame!r} vs {b.frame!r}")


def pignistic(m: MassFunction) -> ProbabilityDistribution:
    """Pignistic transformation: split each focal's mass evenly among its labels."""
    probs = {lab: 0.0 for lab in m.frame}
    for focal, mass in m.items():
        share = mass / len(focal)
        for lab in focal:
            probs[lab] += share
    return ProbabilityDistribution(m.frame, probs)


def discount_bpa(m: MassFunction, beta: float) -> MassFunction:
    """Classical discounting: scale by reliability beta, move the rest to the frame.

    m'(A) = beta * m(A) for A != frame, and the whole frame additionally
    receives 1 - beta.
    """
    beta = float(beta)
    if not 0.0 <= beta <= 1.0:
        raise InvariantError(f"reliability must be in [0, 1], got {beta!r}")
    theta = m.frame.canon_set(m.frame.labels)
    entries = {focal: mass * beta for focal, mass in m.items()}
    entries[theta] = entries.get(theta, 0.0) + (1.0 - beta)
    return MassFunction(m.frame, entries)


def conflict(m1: MassFunction, m2: MassFunction) -> float:
    """Dempster conflict mass K: total product mass on disjoint focal pairs."""
    _check_same_frame(m1, m2)
    k = 0.0
    for b, pb in m1.items():
        bset = set(b)
        for c, pc in m2.items():
            if bset.isdisjoint(c):
                k += pb * pc
    return k


def dempster_combine(m1: MassFunction, m2: MassFunction) -> MassFunction:
    """Dempster's rule: normalised conjunctive combination of two mass functions."""
    _check_same_frame(m1, m2)
    acc: dict = {}
    k = 0.0
    for b, pb in m1.items():
        bset = set(b)
        for c, pc in m2.items():
            inter = bset.intersection(c)
            if inter:
                key = m1.frame.canon_set(inter)
                acc[key] = acc.get(key, 0.0) + pb * pc
            else:
                k += pb * pc
    if 1.0 - k < CONFLICT_EPS:
        raise TotalConflictError(
            f"total conflict between sources (K = {k!r})", conflict=k
        )
    scale = 1.0 / (1.0 - k)
    return MassFunction(m1.frame, {key: v * scale for key, v in acc.items()})


def jousselme_distance(m1: MassFunction, m2: MassFunction) -> float:
    """Jaccard-weighted quadratic distance between two mass functions.

    d = sqrt(0.5 * (m1 - m2)^T D (m1 - m2)), D(A, B) = |A cap B| / |A cup B|.
    """
    _check_same_frame(m1, m2)
    frame = m1.frame
    focals = sorted(
        set(m1.focals()) | set(m2.focals()),
        key=lambda f: (len(f), frame.index_key(f)),
    )
    diff = [m1._entries.get(f, 0.0) - m2._entries.get(f, 0.0) for f in focals]
    sets = [set(f) for f in focals]
    quad = 0.0
    for i, di in enumerate(diff):
        if di == 0.0:
            continue
        for j, dj in enumerate(diff):
            if dj == 0.0:
                continue
            inter = len(sets[i] & sets[j])
            if inter:
                quad += di * dj * inter / len(sets[i] | sets[j])
    return math.sqrt(max(0.0, 0.5 * quad))
