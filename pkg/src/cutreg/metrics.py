"""Evaluation metrics: MSE, overhead tracking, Meyer-Wallach entanglement."""

from dataclasses import dataclass

import numpy as np

from cutreg.cutting import sampling_overhead

CSV_HEADER = "epoch,train_mse,val_mse,s_total,kappa_total,meyer_wallach_q,lambda,wallclock_ms"


@dataclass
class MetricsRecord:
    epoch: int
    train_mse: float
    val_mse: float
    s_total: float
    kappa_total: float
    meyer_wallach_q: float
    lam: float
    wallclock_ms: int

    def to_csv_row(self):
        return ",".join(
            [
                str(self.epoch),
                repr(self.train_mse),
                repr(self.val_mse),
                repr(self.s_total),
                repr(self.kappa_total),
                repr(self.meyer_wallach_q),
                repr(self.lam),
                str(self.wallclock_ms),
            ]
        )


def mse(predictions, targets):
    predictions = np.asarray(predictions, dtype=float)
    targets = np.asarray(targets, dtype=float)
    if predictions.shape != targets.shape or predictions.size == 0:
        raise ValueError("predictions and targets must be equal-length, non-empty")
    return float(np.mean((predictions - targets) ** 2))


def meyer_wallach(state):
    """Q = 2 (1 - mean single-qubit purity); 0 for product states, up to 1."""
    n = state.num_qubits
    mean_purity = sum(state.qubit_purity(q) for q in range(n)) / n
    return 2.0 * (1.0 - mean_purity)


def track(epoch, model, theta, alpha, dataset, lam, wallclock_ms=0, mode="full", q_input=None):
    """Assemble a per-epoch record.

    The entanglement measure is computed on the full (uncut) state prepared
    with the first training sample's features unless `q_input` overrides it.
    """
    X_train, y_train = dataset.rows("train")
    X_val, y_val = dataset.rows("val")
    if mode == "full":
        train_mse = mse(model.forward_batch(theta, alpha, X_train), y_train)
        val_mse = mse(model.forward_batch(theta, alpha, X_val), y_val)
    else:
        train_mse = mse([model.forward(theta, alpha, x, mode) for x in X_train], y_train)
        val_mse = mse([model.forward(theta, alpha, x, mode) for x in X_val], y_val)
    s_total = sampling_overhead(alpha)
    if q_input is None:
        q_input = X_train[0]
    q_value = meyer_wallach(model.prepared_state(theta, alpha, q_input))
    return MetricsRecord(
        epoch=epoch,
        train_mse=train_mse,
        val_mse=val_mse,
        s_total=s_total,
        kappa_total=float(np.sqrt(s_total)),
        meyer_wallach_q=q_value,
        lam=lam,
        wallclock_ms=wallclock_ms,
    )
