"""Feed-forward network mapping word features to the 7-bucket tries distribution.

Hidden layers use the logistic sigmoid, the output layer a softmax. Training
minimises the cross-entropy between the normalised target distribution and
the softmax output with mini-batch gradient descent (optional momentum).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .wordfeat import Scaling, normalize_features

N_BUCKETS = 7
DEFAULT_LAYERS = (16, 32, 16, 7)


class TrainingDivergedError(RuntimeError):
    pass


@dataclass
class MlpModel:
    layer_sizes: tuple[int, ...]
    weights: list[np.ndarray]  # weights[l] has shape (fan_in, fan_out)
    biases: list[np.ndarray]
    seed: int
    epochs_trained: int = 0
    scaling: Scaling | None = None

    def __post_init__(self):
        if self.layer_sizes[-1] != N_BUCKETS:
            raise ValueError("output layer must have 7 units")
        for l, (W, b) in enumerate(zip(self.weights, self.biases)):
            if W.shape != (self.layer_sizes[l], self.layer_sizes[l + 1]) or b.shape != (self.layer_sizes[l + 1],):
                raise ValueError(f"layer {l} parameter shapes inconsistent with layer_sizes")

    @property
    def n_inputs(self) -> int:
        return self.layer_sizes[0]

    def params(self) -> list[np.ndarray]:
        out = []
        for W, b in zip(self.weights, self.biases):
            out += [W, b]
        return out

    def copy(self, **changes) -> "MlpModel":
        return replace(self, weights=[W.copy() for W in self.weights],
                       biases=[b.copy() for b in self.biases], **changes)

    def to_dict(self) -> dict:
        return {
            "layer_sizes": list(self.layer_sizes),
            "activation": {"hidden": "logistic", "output": "softmax"},
            "weights": [W.ravel().tolist() for W in self.weights],
            "biases": [b.tolist() for b in self.biases],
            "seed": self.seed,
            "epochs_trained": self.epochs_trained,
            "scaling": None if self.scaling is None else self.scaling.to_dict(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "MlpModel":
        sizes = tuple(d["layer_sizes"])
        weights = [np.array(w, dtype=float).reshape(sizes[l], sizes[l + 1])
                   for l, w in enumerate(d["weights"])]
        biases = [np.array(b, dtype=float) for b in d["biases"]]
        scaling = None if d.get("scaling") is None else Scaling.from_dict(d["scaling"])
        return cls(sizes, weights, biases, d["seed"], d.get("epochs_trained", 0), scaling)

    @classmethod
    def from_json(cls, text: str) -> "MlpModel":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class TrainingConfig:
    max_epochs: int = 1000
    learning_rate: float = 0.1
    batch_size: int = 32
    patience: int = 15
    validation_fraction: float = 0.15
    momentum: float = 0.9

    def __post_init__(self):
        if self.max_epochs < 1 or self.batch_size < 1 or self.patience < 1:
            raise ValueError("max_epochs, batch_size and patience must be positive")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if not 0 <= self.validation_fraction < 1:
            raise ValueError("validation_fraction must be in [0, 1)")
        if not 0 <= self.momentum < 1:
            raise ValueError("momentum must be in [0, 1)")


@dataclass
class TrainingLog:
    train_loss: list[float] = field(default_factory=list)
    val_loss: list[float] = field(default_factory=list)
    best_epoch: int = 0
    stopped_early: bool = False

    @property
    def epochs(self) -> int:
        return len(self.train_loss)


@dataclass(frozen=True)
class DistributionPrediction:
    pct: tuple[float, ...]
    avg_tries: float

    @classmethod
    def from_probabilities(cls, p) -> "DistributionPrediction":
        p = np.asarray(p, dtype=float)
        return cls(tuple(float(v) for v in 100.0 * p), float(np.arange(1, 8) @ p))

    def to_dict(self) -> dict:
        return {"pct": list(self.pct), "avg_tries": self.avg_tries}


@dataclass(frozen=True)
class EvalReport:
    per_word_error: tuple[float, ...]
    overall_w: float
    bucket_breakdown: tuple[float, ...]

    def to_dict(self) -> dict:
        return {"overall_w": self.overall_w, "bucket_breakdown": list(self.bucket_breakdown),
                "per_word_error": list(self.per_word_error)}


def init_mlp(layer_sizes: Sequence[int] = DEFAULT_LAYERS, seed: int = 0) -> MlpModel:
    """Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights and biases."""
    sizes = tuple(int(s) for s in layer_sizes)
    if len(sizes) < 3:
        raise ValueError("need an input layer, at least one hidden layer and an output layer")
    if min(sizes) < 1:
        raise ValueError("layer sizes must be positive")
    if sizes[-1] != N_BUCKETS:
        raise ValueError(f"output layer must have {N_BUCKETS} units, got {sizes[-1]}")
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes, sizes[1:]):
        bound = 1.0 / np.sqrt(fan_in)
        weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        biases.append(rng.uniform(-bound, bound, size=fan_out))
    return MlpModel(sizes, weights, biases, seed)


def _sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def _softmax(z):
    z = z - z.max(axis=-1, keepdims=True)
    ez = np.exp(z)
    return ez / ez.sum(axis=-1, keepdims=True)


def _activations(model: MlpModel, X: np.ndarray) -> list[np.ndarray]:
    acts = [X]
    last = len(model.weights) - 1
    for l, (W, b) in enumerate(zip(model.weights, model.biases)):
        z = acts[-1] @ W + b
        acts.append(_softmax(z) if l == last else _sigmoid(z))
    return acts


def _as_inputs(model: MlpModel, X) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != model.n_inputs:
        raise ValueError(f"expected {model.n_inputs} features, got {X.shape[1]}")
    return X


def predict_proba(model: MlpModel, X) -> np.ndarray:
    """Row-wise output probabilities for normalised feature rows."""
    return _activations(model, _as_inputs(model, X))[-1]


def forward(model: MlpModel, features) -> DistributionPrediction:
    p = predict_proba(model, features)
    if p.shape[0] != 1:
        raise ValueError("forward takes a single feature row")
    return DistributionPrediction.from_probabilities(p[0])


def normalise_targets(T) -> np.ndarray:
    """Percentages (or weights) to row-stochastic fractions."""
    T = np.atleast_2d(np.asarray(T, dtype=float))
    if T.shape[1] != N_BUCKETS or np.any(T < 0):
        raise ValueError("targets must be non-negative 7-vectors")
    s = T.sum(axis=1, keepdims=True)
    if np.any(s <= 0):
        raise ValueError("target rows must have a positive sum")
    return T / s


def cross_entropy(model: MlpModel, X, T) -> float:
    P = predict_proba(model, X)
    return float(-np.mean(np.sum(T * np.log(np.clip(P, 1e-300, None)), axis=1)))


def backprop(model: MlpModel, X, T) -> list[np.ndarray]:
    """Gradients of the mean cross-entropy, ordered like ``model.params()``."""
    acts = _activations(model, X)
    delta = (acts[-1] - T) / X.shape[0]
    grads = []
    for l in range(len(model.weights) - 1, -1, -1):
        grads.append(delta.sum(axis=0))
        grads.append(acts[l].T @ delta)
        if l:
            a = acts[l]
            delta = (delta @ model.weights[l].T) * a * (1.0 - a)
    return grads[::-1]


def train(model: MlpModel, X, T, config: TrainingConfig = TrainingConfig()
          ) -> tuple[MlpModel, TrainingLog]:
    """Train a copy of ``model`` on normalised features ``X`` and targets ``T``.

    ``T`` may be percentages; each row is rescaled to sum to one. A seeded
    ``validation_fraction`` of the rows is held out; training stops once the
    validation loss has not improved for ``patience`` epochs and the best
    weights are restored.
    """
    X = _as_inputs(model, X)
    T = normalise_targets(T)
    if X.shape[0] != T.shape[0]:
        raise ValueError("features and targets differ in row count")
    if X.shape[0] < 10:
        raise ValueError("need at least 10 training rows")

    rng = np.random.default_rng(model.seed)
    order = rng.permutation(X.shape[0])
    n_val = int(round(config.validation_fraction * X.shape[0]))
    val_idx, fit_idx = np.sort(order[:n_val]), np.sort(order[n_val:])
    Xf, Tf = X[fit_idx], T[fit_idx]
    Xv, Tv = X[val_idx], T[val_idx]

    net = model.copy()
    params = net.params()
    velocity = [np.zeros_like(p) for p in params]
    log = TrainingLog()
    best_val, best_params, since_best = np.inf, None, 0

    for epoch in range(1, config.max_epochs + 1):
        perm = rng.permutation(Xf.shape[0])
        for start in range(0, Xf.shape[0], config.batch_size):
            batch = perm[start:start + config.batch_size]
            grads = backprop(net, Xf[batch], Tf[batch])
            for p, v, g in zip(params, velocity, grads):
                v *= config.momentum
                v -= config.learning_rate * g
                p += v
        loss = cross_entropy(net, Xf, Tf)
        if not np.isfinite(loss):
            raise TrainingDivergedError(
                f"training loss became non-finite at epoch {epoch} "
                f"(learning_rate={config.learning_rate}); lower the learning rate")
        log.train_loss.append(loss)
        if n_val:
            vloss = cross_entropy(net, Xv, Tv)
            log.val_loss.append(vloss)
            if vloss < best_val - 1e-9:
                best_val, since_best, log.best_epoch = vloss, 0, epoch
                best_params = [p.copy() for p in params]
            else:
                since_best += 1
                if since_best >= config.patience:
                    log.stopped_early = True
                    break
        else:
            log.best_epoch = epoch

    if best_params is not None:
        for p, best in zip(params, best_params):
            p[...] = best
    net.epochs_trained = model.epochs_trained + log.epochs
    return net, log


def evaluate(model: MlpModel, X, targets_pct) -> EvalReport:
    """Mean relative bucket error per word, then averaged over words.

    Each bucket contributes |predicted - actual| / max(actual, 1) in
    percentage points, so empty buckets stay defined.
    """
    D = np.atleast_2d(np.asarray(targets_pct, dtype=float))
    if D.shape[0] == 0:
        raise ValueError("no test rows")
    P = 100.0 * predict_proba(model, X)
    return distribution_error(P, D)


def distribution_error(predicted_pct, actual_pct) -> EvalReport:
    P = np.atleast_2d(np.asarray(predicted_pct, dtype=float))
    D = np.atleast_2d(np.asarray(actual_pct, dtype=float))
    if P.shape != D.shape or P.shape[1] != N_BUCKETS or P.shape[0] == 0:
        raise ValueError("predicted and actual must both be (n, 7) with n >= 1")
    rel = np.abs(P - D) / np.maximum(D, 1.0)
    per_word = rel.mean(axis=1)
    return EvalReport(tuple(per_word.tolist()), float(per_word.mean()),
                      tuple(rel.mean(axis=0).tolist()))


def gradient_check(model: MlpModel, x, target, eps: float = 1e-5,
                   grad_fn: Callable = backprop) -> float:
    """Largest relative gap between ``grad_fn`` and central differences.

    The gap for one parameter is |a - n| / max(|a| + |n|, 1e-6).
    """
    X = _as_inputs(model, x)
    T = normalise_targets(target)
    net = model.copy()
    analytic = grad_fn(net, X, T)
    worst = 0.0
    for p, g in zip(net.params(), analytic):
        flat, gflat = p.reshape(-1), np.asarray(g).reshape(-1)
        for i in range(flat.size):
            keep = flat[i]
            flat[i] = keep + eps
            up = cross_entropy(net, X, T)
            flat[i] = keep - eps
            down = cross_entropy(net, X, T)
            flat[i] = keep
            num = (up - down) / (2 * eps)
            gap = abs(gflat[i] - num) / max(abs(gflat[i]) + abs(num), 1e-6)
            worst = max(worst, gap)
    return worst


@dataclass(frozen=True)
class CollapseCheck:
    """Signs that predictions have collapsed towards a single distribution."""

    stopped_epoch: int
    variance_ratio: float
    collapsed: bool


def collapse_check(log: TrainingLog, predicted_pct, actual_pct, epoch_limit: int = 100,
                   variance_limit: float = 0.5) -> CollapseCheck:
    """Early stop before ``epoch_limit`` and prediction variance below
    ``variance_limit`` times the target variance (summed over buckets)."""
    P = np.asarray(predicted_pct, dtype=float)
    D = np.asarray(actual_pct, dtype=float)
    ratio = float(P.var(axis=0).sum() / D.var(axis=0).sum())
    stopped_before = log.stopped_early and log.epochs < epoch_limit
    return CollapseCheck(log.epochs, ratio, bool(stopped_before and ratio < variance_limit))


def fit_scaled(X_raw, targets_pct, layer_sizes: Sequence[int] | None = None, seed: int = 0,
               config: TrainingConfig = TrainingConfig()) -> tuple[MlpModel, TrainingLog]:
    """Learn min-max scaling on ``X_raw`` and train a fresh network on it.

    The returned model carries its scaling, so ``predict_raw`` can be used on
    unseen feature rows.
    """
    X, scaling = normalize_features(X_raw)
    sizes = tuple(layer_sizes) if layer_sizes else (X.shape[1],) + DEFAULT_LAYERS[1:]
    model = init_mlp(sizes, seed)
    trained, log = train(model, X, targets_pct, config)
    trained.scaling = scaling
    return trained, log


def predict_raw(model: MlpModel, X_raw) -> np.ndarray:
    """Percent distributions for unscaled feature rows (out-of-range values clamp)."""
    if model.scaling is None:
        raise ValueError("model has no scaling record")
    return 100.0 * predict_proba(model, model.scaling.transform(X_raw))


@dataclass
class CrossValidation:
    forward: EvalReport
    flipped: EvalReport
    forward_model: MlpModel
    flipped_model: MlpModel
    forward_log: TrainingLog
    flipped_log: TrainingLog
    train_size: int


def split_size(n_rows: int, train_size: int = 300, reference_rows: int = 359) -> int:
    """Rows in the training arm: 300 of 359, scaled down for shorter corpora."""
    return min(train_size, int(round(n_rows * train_size / reference_rows)))


def cross_validate(X_raw, targets_pct, config: TrainingConfig = TrainingConfig(),
                   seed: int = 0, layer_sizes: Sequence[int] | None = None,
                   train_size: int = 300) -> CrossValidation:
    """Train on the first rows and test on the rest, then the same flipped.

    Rows must be in chronological order. With 359 rows the arms are
    300 / 59 and the flipped arm trains on the last 300 days.
    """
    X_raw = np.asarray(X_raw, dtype=float)
    D = np.asarray(targets_pct, dtype=float)
    n = X_raw.shape[0]
    if n < 100:
        raise ValueError(f"cross-validation needs at least 100 rows, got {n}")
    k = split_size(n, train_size)

    fwd_model, fwd_log = fit_scaled(X_raw[:k], D[:k], layer_sizes, seed, config)
    flip_model, flip_log = fit_scaled(X_raw[n - k:], D[n - k:], layer_sizes, seed, config)
    return CrossValidation(
        forward=distribution_error(predict_raw(fwd_model, X_raw[k:]), D[k:]),
        flipped=distribution_error(predict_raw(flip_model, X_raw[:n - k]), D[:n - k]),
        forward_model=fwd_model, flipped_model=flip_model,
        forward_log=fwd_log, flipped_log=flip_log, train_size=k,
    )
