"""Random-forest evaluation with repeated stratified splits.

One multiclass forest per repeat, scored one-vs-rest per class by
ROC AUC on a held-out 20% stratified split.  Repeats differ only in
the split seed, so the reported mean and spread reflect split
variance, not model retuning.

The shuffled-label control is a permutation test: each repeat draws a
fresh permutation of all labels, then runs the identical split, fit
and scoring protocol on it.  Against permuted labels no real
feature-label link survives, so a sound pipeline scores at chance.
Shuffling only the training side instead sits measurably below 0.5
here, because duplicated feature rows let label noise interact with
the true test labels; the full permutation has no such coupling.

Forest hyperparameters beyond the tree count are library defaults and
are recorded verbatim in the report manifest.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import sklearn
from sklearn.ensemble import RandomForestClassifier
from sklearn.metrics import roc_auc_score
from sklearn.model_selection import train_test_split

from .data import CLASSES, Dataset, HarnessError

N_TREES = 300
TEST_SHARE = 0.2


@dataclass(frozen=True)
class ClassScore:
    auc_mean: float
    auc_std: float
    aucs: tuple[float, ...]


@dataclass
class EvalResult:
    subset_columns: list[str]
    repeats: int
    seed: int
    shuffled: bool
    class_sizes: dict[str, int]
    scores: dict[str, ClassScore] = field(default_factory=dict)
    macro: ClassScore | None = None
    importances: dict[str, float] = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        out = {
            "columns": list(self.subset_columns),
            "repeats": self.repeats,
            "seed": self.seed,
            "shuffled_labels": self.shuffled,
            "class_sizes": dict(sorted(self.class_sizes.items())),
            "model": {
                "kind": "RandomForestClassifier",
                "n_estimators": N_TREES,
                "test_share": TEST_SHARE,
                "split": "stratified",
                "other_hyperparameters": "library defaults",
                "library": f"scikit-learn {sklearn.__version__}",
            },
            "scores": {
                cls: {
                    "auc_mean": score.auc_mean,
                    "auc_std": score.auc_std,
                    "aucs": list(score.aucs),
                }
                for cls, score in sorted(self.scores.items())
            },
            "importances": dict(
                sorted(self.importances.items(), key=lambda kv: (-kv[1], kv[0]))
            ),
        }
        if self.macro is not None:
            out["macro_auc"] = {
                "auc_mean": self.macro.auc_mean,
                "auc_std": self.macro.auc_std,
                "aucs": list(self.macro.aucs),
            }
        return out


def _fit_and_score(
    features: np.ndarray, labels: np.ndarray, seed: int
) -> tuple[dict[str, float], np.ndarray]:
    x_train, x_test, y_train, y_test = train_test_split(
        features,
        labels,
        test_size=TEST_SHARE,
        random_state=seed,
        stratify=labels,
    )
    forest = RandomForestClassifier(n_estimators=N_TREES, random_state=seed, n_jobs=1)
    forest.fit(x_train, y_train)
    proba = forest.predict_proba(x_test)
    aucs: dict[str, float] = {}
    for idx, cls in enumerate(forest.classes_):
        mask = (y_test == cls).astype(int)
        if mask.sum() == 0 or mask.sum() == len(mask):
            continue
        aucs[str(cls)] = float(roc_auc_score(mask, proba[:, idx]))
    return aucs, forest.feature_importances_


def evaluate(
    dataset: Dataset,
    seed: int = 7,
    repeats: int = 5,
    shuffle_labels: bool = False,
) -> EvalResult:
    """Score the dataset over repeated stratified splits.

    shuffle_labels=True turns the run into the permutation-test
    control described in the module docstring.
    """
    if repeats < 1:
        raise HarnessError("repeats must be at least 1")
    sizes = dataset.class_sizes()
    present = [c for c in CLASSES if sizes.get(c, 0) > 0]
    if len(present) < 2:
        raise HarnessError("need at least two classes to evaluate")
    for cls in present:
        if sizes[cls] < 2:
            raise HarnessError(
                f"class {cls} has only {sizes[cls]} sample(s); "
                "stratified splitting needs at least 2"
            )

    per_class: dict[str, list[float]] = {c: [] for c in present}
    macro_values: list[float] = []
    importance_sum = np.zeros(dataset.features.shape[1])
    for i in range(repeats):
        labels = dataset.labels
        if shuffle_labels:
            labels = labels.copy()
            np.random.RandomState(seed + i).shuffle(labels)
        aucs, importances = _fit_and_score(dataset.features, labels, seed + i)
        for cls, value in aucs.items():
            per_class.setdefault(cls, []).append(value)
        if aucs:
            macro_values.append(float(np.mean(list(aucs.values()))))
        importance_sum += importances

    def summarize(values: list[float]) -> ClassScore:
        arr = np.asarray(values)
        return ClassScore(
            auc_mean=float(arr.mean()),
            auc_std=float(arr.std()),
            aucs=tuple(float(v) for v in values),
        )

    result = EvalResult(
        subset_columns=dataset.columns,
        repeats=repeats,
        seed=seed,
        shuffled=shuffle_labels,
        class_sizes=sizes,
    )
    for cls, values in per_class.items():
        if values:
            result.scores[cls] = summarize(values)
    if macro_values:
        result.macro = summarize(macro_values)
    mean_importance = importance_sum / repeats
    result.importances = {
        col: float(mean_importance[i]) for i, col in enumerate(dataset.columns)
    }
    return result
