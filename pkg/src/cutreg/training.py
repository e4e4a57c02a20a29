"""Regularized loss, gradient estimators, Amsgrad, and the training loop."""

import time
from dataclasses import dataclass, field

import numpy as np

from cutreg.metrics import mse, track

LOG_PRODUCT = "log_product"
SUM_MINUS_ONE = "sum_minus_one"


@dataclass
class LossConfig:
    lambda_initial: float = 0.01
    lambda_final: float = 0.0001
    lambda_switch_epoch: int = 10
    form: str = LOG_PRODUCT
    # 0 = abrupt step-down at the switch epoch (default); > 0 = geometric
    # decay from lambda_initial to lambda_final over that many epochs.
    lambda_anneal_epochs: int = 0

    def __post_init__(self):
        if self.lambda_initial < 0 or self.lambda_final < 0:
            raise ValueError("lambda values must be >= 0")
        if self.lambda_switch_epoch < 0:
            raise ValueError("switch epoch must be >= 0")
        if self.form not in (LOG_PRODUCT, SUM_MINUS_ONE):
            raise ValueError(f"unknown regularizer form {self.form!r}")

    def lambda_at(self, epoch):
        if self.lambda_anneal_epochs > 0:
            frac = min(epoch / self.lambda_anneal_epochs, 1.0)
            return self.lambda_initial * (self.lambda_final / self.lambda_initial) ** frac
        return self.lambda_initial if epoch < self.lambda_switch_epoch else self.lambda_final


def regularizer(alphas, form=LOG_PRODUCT):
    """Overhead penalty: log of the total overhead, or sum of (s - 1) terms."""
    a = np.abs(np.sin(np.asarray(alphas, dtype=float)))
    if form == LOG_PRODUCT:
        return float(np.sum(2.0 * np.log1p(2.0 * a)))
    if form == SUM_MINUS_ONE:
        return float(np.sum((1.0 + 2.0 * a) ** 2 - 1.0))
    raise ValueError(f"unknown regularizer form {form!r}")


def regularizer_grad(alphas, form=LOG_PRODUCT):
    """Analytic penalty gradient; subgradient 0 where sin(alpha) = 0."""
    alphas = np.asarray(alphas, dtype=float)
    s = np.sin(alphas)
    sg = np.sign(s)
    base = 4.0 * np.cos(alphas) * sg
    if form == LOG_PRODUCT:
        return base / (1.0 + 2.0 * np.abs(s))
    if form == SUM_MINUS_ONE:
        return base * (1.0 + 2.0 * np.abs(s))
    raise ValueError(f"unknown regularizer form {form!r}")


def predict(model, theta, alpha, X, mode="full", num_samples=10_000, seed=0, max_runs=1_000_000):
    """Predictions for a batch of inputs in the requested forward mode."""
    if mode == "full":
        return model.forward_batch(theta, alpha, X)
    return np.array(
        [
            model.forward(theta, alpha, x, mode, num_samples=num_samples,
                          seed=seed + i, max_runs=max_runs)
            for i, x in enumerate(X)
        ]
    )


def loss(model, theta, alpha, X, y, lam, mode="full", form=LOG_PRODUCT, **kw):
    """Batch MSE plus lambda times the overhead regularizer."""
    if len(X) == 0:
        raise ValueError("batch must be non-empty")
    return mse(predict(model, theta, alpha, X, mode, **kw), y) + lam * regularizer(alpha, form)


def parameter_shift_grad(model, theta, alpha, X, y, lam, mode="full", form=LOG_PRODUCT, **kw):
    """Exact gradient of the regularized loss via two-point shifted evaluations.

    Valid because every parameterized gate here has a +/-1/2-spectrum
    generator and each trainable index is bound to a single gate.
    """
    theta = np.asarray(theta, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    nt, na = len(theta), len(alpha)
    preds = predict(model, theta, alpha, X, mode, **kw)
    resid = preds - np.asarray(y, dtype=float)
    grad = np.zeros(nt + na)

    def shifted(j, delta):
        t, a = theta.copy(), alpha.copy()
        if j < nt:
            t[j] += delta
        else:
            a[j - nt] += delta
        return predict(model, t, a, X, mode, **kw)

    for j in range(nt + na):
        dpred = 0.5 * (shifted(j, np.pi / 2) - shifted(j, -np.pi / 2))
        grad[j] = float(np.mean(2.0 * resid * dpred))
    if na and lam:
        grad[nt:] += lam * regularizer_grad(alpha, form)
    return grad


def spsa_grad(loss_fn, params, rng, c=0.1):
    """Simultaneous-perturbation estimate with one Rademacher direction."""
    if c <= 0:
        raise ValueError("perturbation c must be > 0")
    params = np.asarray(params, dtype=float)
    delta = rng.integers(0, 2, size=params.shape) * 2.0 - 1.0
    diff = loss_fn(params + c * delta) - loss_fn(params - c * delta)
    return diff / (2.0 * c) * delta


@dataclass
class AmsgradState:
    dim: int
    learning_rate: float = 0.01
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    m: np.ndarray = None
    v: np.ndarray = None
    v_max: np.ndarray = None
    t: int = 0

    def __post_init__(self):
        if self.m is None:
            self.m = np.zeros(self.dim)
        if self.v is None:
            self.v = np.zeros(self.dim)
        if self.v_max is None:
            self.v_max = np.zeros(self.dim)


def amsgrad_step(state, params, grad):
    """One Amsgrad update; bias correction is applied before the running max."""
    grad = np.asarray(grad, dtype=float)
    if grad.shape != (state.dim,) or len(params) != state.dim:
        raise ValueError("gradient/parameter size mismatch")
    state.t += 1
    state.m = state.beta1 * state.m + (1 - state.beta1) * grad
    state.v = state.beta2 * state.v + (1 - state.beta2) * grad**2
    m_hat = state.m / (1 - state.beta1**state.t)
    v_hat = state.v / (1 - state.beta2**state.t)
    state.v_max = np.maximum(state.v_max, v_hat)
    return params - state.learning_rate * m_hat / (np.sqrt(state.v_max) + state.eps)


@dataclass
class TrainConfig:
    epochs: int = 100
    batch_size: int = 32
    learning_rate: float = 0.01
    loss: LossConfig = field(default_factory=LossConfig)
    gradient_estimator: str = "parameter_shift"
    spsa_c: float = 0.1
    forward_mode: str = "full"
    num_samples: int = 10_000
    alpha_init: object = "half_pi"
    seed_init: int = 1
    seed_train: int = 2
    seed_sampling: int = 3
    max_runs: int = 1_000_000
    track_wallclock: bool = False


def init_params(model, config):
    rng = np.random.default_rng(config.seed_init)
    theta = rng.uniform(-np.pi, np.pi, model.num_theta)
    if config.alpha_init == "half_pi":
        alpha = np.full(model.num_alpha, np.pi / 2)
    elif config.alpha_init == "small":
        alpha = np.full(model.num_alpha, 0.1)
    else:
        alpha = np.asarray(config.alpha_init, dtype=float)
        if alpha.shape != (model.num_alpha,):
            raise ValueError(f"alpha_init must have length {model.num_alpha}")
    return theta, alpha


def train(model, dataset, config, on_record=None):
    """Run the epoch loop; returns (records, theta, alpha, summary)."""
    theta, alpha = init_params(model, config)
    nt = len(theta)
    X_train, y_train = dataset.rows("train")
    X_test, y_test = dataset.rows("test")
    shuffle_rng = np.random.default_rng(np.random.SeedSequence([config.seed_train, 0]))
    spsa_rng = np.random.default_rng(np.random.SeedSequence([config.seed_train, 1]))
    opt = AmsgradState(dim=nt + len(alpha), learning_rate=config.learning_rate)
    fwd_kw = dict(mode=config.forward_mode, num_samples=config.num_samples,
                  max_runs=config.max_runs)

    initial_test_mse = mse(model.forward_batch(theta, alpha, X_test), y_test)
    records = []
    started = time.monotonic()
    sample_counter = 0

    def record_epoch(epoch, lam):
        wallclock = int(1000 * (time.monotonic() - started)) if config.track_wallclock else 0
        rec = track(epoch, model, theta, alpha, dataset, lam, wallclock)
        records.append(rec)
        if on_record is not None:
            on_record(rec)

    for epoch in range(config.epochs):
        lam = config.loss.lambda_at(epoch)
        record_epoch(epoch, lam)
        perm = shuffle_rng.permutation(len(X_train))
        for start in range(0, len(perm), config.batch_size):
            idx = perm[start : start + config.batch_size]
            Xb, yb = X_train[idx], y_train[idx]
            kw = dict(fwd_kw)
            if config.forward_mode == "cut_sampled":
                kw["seed"] = config.seed_sampling + sample_counter
                sample_counter += len(Xb)
            if config.gradient_estimator == "parameter_shift":
                grad = parameter_shift_grad(
                    model, theta, alpha, Xb, yb, lam, form=config.loss.form, **kw
                )
            elif config.gradient_estimator == "spsa":
                def loss_fn(p):
                    return loss(model, p[:nt], p[nt:], Xb, yb, lam,
                                form=config.loss.form, **kw)

                grad = spsa_grad(loss_fn, np.concatenate([theta, alpha]), spsa_rng, config.spsa_c)
            else:
                raise ValueError(f"unknown gradient estimator {config.gradient_estimator!r}")
            updated = amsgrad_step(opt, np.concatenate([theta, alpha]), grad)
            theta, alpha = updated[:nt], updated[nt:]

    record_epoch(config.epochs, config.loss.lambda_at(config.epochs))
    final_test_mse = mse(model.forward_batch(theta, alpha, X_test), y_test)
    summary = {
        "epochs": config.epochs,
        "initial_test_mse": initial_test_mse,
        "final_test_mse": final_test_mse,
        "initial_s_total": records[0].s_total,
        "final_s_total": records[-1].s_total,
    }
    return records, theta, alpha, summary
