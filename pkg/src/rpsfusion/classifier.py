"""Order-aware evidential classifier.

Each numeric feature acts as an evidence source. Per feature, a Gaussian
class model turns a sample value into normalised class memberships, which
become a nested-focal mass function (each class grouped with every class
that beat it). Training samples score each feature's decision
contribution, yielding per-feature reliabilities; at prediction time the
per-feature permutation sets are discounted by those reliabilities, fused
with the left orthogonal sum in decreasing-reliability order and reduced
to class probabilities with the ranked probability transformation.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.exceptions import NotFittedError

from .dataio import Dataset, kfold_split
from .dst import Frame, MassFunction, ProbabilityDistribution
from .errors import InvariantError, TotalConflictError
from .reliability import compute_reliabilities
from .rps import RandomPermutationSet, discount_rps, left_orthogonal_sum
from .transform import (
    DEFAULT_DISPERSION,
    check_dispersion,
    ranked_probability_transform,
    rps_transform,
)

log = logging.getLogger(__name__)

# Degenerate (constant or single-sample) features get this fraction of the
# feature's observed range as their standard deviation.
SIGMA_FLOOR_SCALE = 1e-6
# Below this total density the memberships fall back to uniform.
DENSITY_FLOOR = 1e-300


@dataclass
class GaussianClassModel:
    """Per (class, feature) mean and sample standard deviation."""

    classes: tuple
    means: np.ndarray
    stds: np.ndarray

    @property
    def n_features(self) -> int:
        return self.means.shape[1]


def _validate_features(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(1, -1)
    if X.ndim != 2 or X.shape[1] == 0:
        raise InvariantError("feature matrix must be 2-dimensional and non-empty")
    if np.isinf(X).any():
        raise InvariantError("feature values must be finite (NaN marks missing)")
    return X


def gaussian_train(X, y, classes=None) -> GaussianClassModel:
    """Fit per-class per-feature Gaussians with (N-1)-denominator deviations.

    NaN cells are excluded from the statistics. Deviations are floored at
    SIGMA_FLOOR_SCALE times the feature's observed range (or 1 if the
    range is zero), so constant features and single-sample classes stay
    usable instead of producing infinities.
    """
    X = _validate_features(X)
    y = np.asarray(y)
    if len(y) != X.shape[0]:
        raise InvariantError(f"{X.shape[0]} samples but {len(y)} labels")
    if classes is None:
        classes = np.unique(y)
    classes = tuple(classes)
    n_features = X.shape[1]

    with np.errstate(all="ignore"):
        spans = np.nanmax(X, axis=0) - np.nanmin(X, axis=0)
    spans = np.where(np.isfinite(spans) & (spans > 0.0), spans, 1.0)
    floors = SIGMA_FLOOR_SCALE * spans

    means = np.zeros((len(classes), n_features))
    stds = np.zeros((len(classes), n_features))
    for ci, cls in enumerate(classes):
        rows = X[y == cls]
        if rows.size == 0:
            raise InvariantError(f"class {cls!r} has no training samples")
        for j in range(n_features):
            col = rows[:, j]
            col = col[~np.isnan(col)]
            if col.size == 0:
                whole = X[:, j][~np.isnan(X[:, j])]
                means[ci, j] = float(whole.mean()) if whole.size else 0.0
                stds[ci, j] = floors[j]
                log.debug("class %r feature %d: no finite values, using floor", cls, j)
            elif col.size == 1:
                means[ci, j] = float(col[0])
                stds[ci, j] = floors[j]
            else:
                means[ci, j] = float(col.mean())
                stds[ci, j] = max(float(col.std(ddof=1)), floors[j])
    return GaussianClassModel(classes=classes, means=means, stds=stds)


def membership(model: GaussianClassModel, sample, feature: int) -> dict:
    """Normalised Gaussian memberships of one sample value across classes.

    If every class density underflows, the memberships fall back to
    uniform: no information beats NaN propagation.
    """
    value = float(np.asarray(sample).reshape(-1)[feature])
    if not math.isfinite(value):
        raise InvariantError(f"feature {feature} value must be finite, got {value!r}")
    dens = []
    for ci in range(len(model.classes)):
        sigma = model.stds[ci, feature]
        z = (value - model.means[ci, feature]) / sigma
        try:
            d = math.exp(-0.5 * z * z) / (sigma * math.sqrt(2.0 * math.pi))
        except OverflowError:
            d = 0.0
        dens.append(d)
    total = math.fsum(dens)
    if total < DENSITY_FLOOR:
        return {cls: 1.0 / len(model.classes) for cls in model.classes}
    return {cls: d / total for cls, d in zip(model.classes, dens)}


def generate_bpa(memberships: dict, frame: Frame) -> MassFunction:
    """Nested-focal mass function from normalised memberships.

    Each class's focal set is itself plus every class with strictly
    greater membership (equal memberships resolved by ascending frame
    index), so the top class gets a singleton and the focals grow nested
    from there. Zero memberships are pruned.
    """
    order = sorted(frame.labels, key=lambda lab: (-memberships[lab], frame.index(lab)))
    entries = {}
    prefix = []
    for lab in order:
        prefix.append(lab)
        entries[tuple(prefix)] = memberships[lab]
    return MassFunction(frame, entries)


@dataclass
class PredictionRecord:
    """Everything the pipeline produced for one sample."""

    sample_index: int
    feature_bpas: tuple
    fused: RandomPermutationSet | None
    rpt: ProbabilityDistribution | None
    predicted: object
    true_label: object = None
    failed: bool = False


@dataclass
class AccuracyReport:
    """Cross-validation outcome for one dataset."""

    dataset: str
    folds: int
    seed: int
    lam: float
    per_fold_accuracy: list
    mean: float
    std: float
    per_source_reliability: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "folds": self.folds,
            "seed": self.seed,
            "lambda": self.lam,
            "per_fold_accuracy": list(self.per_fold_accuracy),
            "mean": self.mean,
            "std": self.std,
            "per_source_reliability": [list(r) for r in self.per_source_reliability],
        }

    @classmethod
    def from_dict(cls, data) -> "AccuracyReport":
        return cls(
            dataset=str(data["dataset"]),
            folds=int(data["folds"]),
            seed=int(data["seed"]),
            lam=float(data["lambda"]),
            per_fold_accuracy=[float(v) for v in data["per_fold_accuracy"]],
            mean=float(data["mean"]),
            std=float(data["std"]),
            per_source_reliability=[
                [float(v) for v in row] for row in data["per_source_reliability"]
            ],
        )


class RPSClassifier(ClassifierMixin, BaseEstimator):
    """Evidential classifier fusing per-feature sources by learned reliability.

    Parameters
    ----------
    lam : float, default 0.67
        Dispersion of the ranked probability transformation, in [0, 1).
        Larger values concentrate probability on the front of each
        permutation event.
    """

    def __init__(self, lam: float = DEFAULT_DISPERSION):
        self.lam = lam

    def fit(self, X, y):
        lam = check_dispersion(self.lam)
        X = _validate_features(X)
        y = np.asarray(y)
        if len(y) != X.shape[0]:
            raise InvariantError(f"{X.shape[0]} samples but {len(y)} labels")
        classes = np.unique(y)
        if len(classes) < 2:
            raise InvariantError("training data must contain at least two classes")

        self.classes_ = classes
        self.frame_ = Frame(classes.tolist())
        self.n_features_in_ = X.shape[1]
        self.model_ = gaussian_train(X, y, classes=tuple(classes.tolist()))

        per_source = []
        for j in range(self.n_features_in_):
            bpas = []
            for i in range(X.shape[0]):
                if np.isnan(X[i, j]):
                    bpas.append(None)
                else:
                    bpas.append(generate_bpa(membership(self.model_, X[i], j), self.frame_))
            per_source.append(bpas)
        self.reliability_report_ = compute_reliabilities(per_source, list(y), lam)
        self.reliabilities_ = list(self.reliability_report_.reliabilities)
        return self

    def _check_fitted(self):
        if not hasattr(self, "model_"):
            raise NotFittedError("this RPSClassifier instance is not fitted yet")

    def predict_record(self, x, sample_index: int = 0, true_label=None) -> PredictionRecord:
        """Run the full pipeline on one sample and keep the intermediates.

        NaN features are skipped as vacuous sources. A totally conflicting
        fusion marks the record failed (no prediction); scoring code
        counts failed records as misclassified.
        """
        self._check_fitted()
        lam = check_dispersion(self.lam)
        x = np.asarray(x, dtype=float).reshape(-1)
        if x.shape[0] != self.n_features_in_:
            raise InvariantError(
                f"expected {self.n_features_in_} features, got {x.shape[0]}"
            )

        bpas = []
        discounted = {}
        for j in range(self.n_features_in_):
            if np.isnan(x[j]):
                bpas.append(None)
                continue
            bpa = generate_bpa(membership(self.model_, x, j), self.frame_)
            bpas.append(bpa)
            discounted[j] = discount_rps(rps_transform(bpa), self.reliabilities_[j])

        order = [j for j in self.reliability_report_.fusion_order if j in discounted]
        fused = None
        try:
            for j in order:
                fused = discounted[j] if fused is None else left_orthogonal_sum(fused, discounted[j])
        except TotalConflictError:
            log.debug("sample %d: total conflict during fusion", sample_index)
            return PredictionRecord(
                sample_index=sample_index,
                feature_bpas=tuple(bpas),
                fused=None,
                rpt=None,
                predicted=None,
                true_label=true_label,
                failed=True,
            )

        if fused is None:
            rpt = ProbabilityDistribution(
                self.frame_, {lab: 1.0 / len(self.frame_) for lab in self.frame_}
            )
        else:
            rpt = ranked_probability_transform(fused, lam)
        return PredictionRecord(
            sample_index=sample_index,
            feature_bpas=tuple(bpas),
            fused=fused,
            rpt=rpt,
            predicted=rpt.argmax(),
            true_label=true_label,
            failed=False,
        )

    def predict(self, X):
        self._check_fitted()
        X = _validate_features(X)
        out = []
        for i in range(X.shape[0]):
            record = self.predict_record(X[i], sample_index=i)
            out.append(record.predicted if not record.failed else self.classes_[0])
        return np.asarray(out)

    def predict_proba(self, X):
        """Fused class probabilities, uniform rows for failed samples."""
        self._check_fitted()
        X = _validate_features(X)
        n = len(self.classes_)
        rows = np.empty((X.shape[0], n))
        for i in range(X.shape[0]):
            record = self.predict_record(X[i], sample_index=i)
            if record.failed:
                rows[i] = 1.0 / n
            else:
                rows[i] = record.rpt.as_tuple()
        return rows


def cross_validate(
    dataset: Dataset,
    folds: int = 5,
    seed: int = 42,
    lam: float = DEFAULT_DISPERSION,
) -> AccuracyReport:
    """Stratified k-fold evaluation of the classifier on one dataset.

    Fold assignment, training and scoring are all deterministic for a
    given (dataset, folds, seed, lam), so reported figures reproduce
    bit-for-bit. Failed (totally conflicting) samples count as wrong.
    """
    assignment = kfold_split(dataset.y, folds, seed)
    per_fold = []
    per_rel = []
    for f in range(folds):
        test_mask = assignment == f
        clf = RPSClassifier(lam=lam).fit(dataset.X[~test_mask], dataset.y[~test_mask])
        per_rel.append(list(clf.reliabilities_))
        test_idx = np.flatnonzero(test_mask)
        hits = 0
        for i in test_idx:
            record = clf.predict_record(dataset.X[i], sample_index=int(i), true_label=dataset.y[i])
            if not record.failed and record.predicted == dataset.y[i]:
                hits += 1
        per_fold.append(hits / len(test_idx))
    mean = float(np.mean(per_fold))
    std = float(np.std(per_fold))
    return AccuracyReport(
        dataset=dataset.name,
        folds=folds,
        seed=seed,
        lam=lam,
        per_fold_accuracy=per_fold,
        mean=mean,
        std=std,
        per_source_reliability=per_rel,
    )
