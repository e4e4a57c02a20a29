"""Synthetic linear regression data with seeded splits and train-fit scaling.

Features are scaled to [-pi, pi] and targets to [-1, 1] using ranges fitted
on the train split only; validation/test rows may fall slightly outside and
are deliberately not clipped.
"""

import csv
import json
from dataclasses import dataclass, field

import numpy as np

SPLIT_NAMES = ("train", "val", "test")


@dataclass
class Dataset:
    X: np.ndarray
    y: np.ndarray
    seed: int = 0
    noise_std: float = 0.0
    splits: dict = None
    feature_range: np.ndarray = None  # (d, 2) train min/max of the raw features
    target_range: tuple = None  # train (min, max) of the raw targets
    degenerate_features: list = field(default_factory=list)

    @property
    def num_features(self):
        return self.X.shape[1]

    def rows(self, name):
        idx = self.splits[name]
        return self.X[idx], self.y[idx]

    def inverse_scale_targets(self, y_scaled):
        lo, hi = self.target_range
        return (np.asarray(y_scaled) + 1.0) * (hi - lo) / 2.0 + lo


def make_regression(n_samples, n_features, noise_std=0.0, seed=0):
    """Linear target y = X @ w (+ noise), X and w i.i.d. standard normal."""
    if n_samples < 1 or n_features < 1:
        raise ValueError("need at least one sample and one feature")
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n_samples, n_features))
    w = rng.standard_normal(n_features)
    y = X @ w
    if noise_std > 0:
        y = y + noise_std * rng.standard_normal(n_samples)
    return Dataset(X, y, seed=seed, noise_std=noise_std)


def split(dataset, seed=0, sizes=(100, 50, 50)):
    """Seeded permutation followed by contiguous train/val/test slices."""
    n = dataset.X.shape[0]
    if sum(sizes) > n:
        raise ValueError(f"dataset has {n} rows, splits need {sum(sizes)}")
    perm = np.random.default_rng(seed).permutation(n)
    bounds = np.cumsum((0,) + tuple(sizes))
    dataset.splits = {
        name: perm[bounds[i] : bounds[i + 1]] for i, name in enumerate(SPLIT_NAMES)
    }
    return dataset


def scale(dataset):
    """Affine-map features to [-pi, pi] and targets to [-1, 1], fit on train."""
    if dataset.splits is None:
        raise ValueError("split the dataset before scaling")
    train_idx = dataset.splits["train"]
    Xt = dataset.X[train_idx]
    lo = Xt.min(axis=0)
    hi = Xt.max(axis=0)
    span = hi - lo
    degenerate = [int(j) for j in np.nonzero(span == 0)[0]]
    safe = np.where(span == 0, 1.0, span)
    X_scaled = -np.pi + 2 * np.pi * (dataset.X - lo) / safe
    X_scaled[:, degenerate] = 0.0

    yt = dataset.y[train_idx]
    ylo, yhi = float(yt.min()), float(yt.max())
    yspan = yhi - ylo if yhi > ylo else 1.0
    y_scaled = -1.0 + 2.0 * (dataset.y - ylo) / yspan

    return Dataset(
        X_scaled,
        y_scaled,
        seed=dataset.seed,
        noise_std=dataset.noise_std,
        splits=dataset.splits,
        feature_range=np.column_stack([lo, hi]),
        target_range=(ylo, yhi),
        degenerate_features=degenerate,
    )


def save_csv(dataset, path):
    """Write rows as f0,...,fd-1,y,split (UTF-8, '.' decimal)."""
    d = dataset.num_features
    label = np.empty(dataset.X.shape[0], dtype=object)
    for name in SPLIT_NAMES:
        label[dataset.splits[name]] = name
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([f"f{j}" for j in range(d)] + ["y", "split"])
        for i in range(dataset.X.shape[0]):
            writer.writerow(
                [repr(float(v)) for v in dataset.X[i]]
                + [repr(float(dataset.y[i])), label[i]]
            )


def load_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        d = len(header) - 2
        X, y, labels = [], [], []
        for row in reader:
            X.append([float(v) for v in row[:d]])
            y.append(float(row[d]))
            labels.append(row[d + 1])
    labels = np.array(labels)
    splits = {name: np.nonzero(labels == name)[0] for name in SPLIT_NAMES}
    return Dataset(np.array(X), np.array(y), splits=splits)


def save_metadata(dataset, path):
    meta = {
        "seed": dataset.seed,
        "noise_std": dataset.noise_std,
        "n_samples": int(dataset.X.shape[0]),
        "n_features": int(dataset.num_features),
        "split_sizes": {name: int(len(dataset.splits[name])) for name in SPLIT_NAMES},
        "feature_range": dataset.feature_range.tolist() if dataset.feature_range is not None else None,
        "target_range": list(dataset.target_range) if dataset.target_range else None,
        "degenerate_features": dataset.degenerate_features,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
