"""Soft-margin SVM with an RBF kernel, trained by sequential minimal optimization.

The trainer solves the usual dual (maximize sum(alpha) - 1/2 alpha' Q alpha
subject to 0 <= alpha <= C and y'alpha = 0) by repeatedly picking the
maximal violating pair and solving the two-variable subproblem in closed
form.  Pair selection breaks ties toward the lowest sample index and the
whole procedure uses no randomness, so training is deterministic for a
fixed sample order.  Convergence is declared when the largest violation
drops to the configured tolerance; the bias is the midpoint of the final
violation interval, which puts every free support vector on its margin
to within the tolerance.

Models carry their feature scaler so prediction accepts raw block
features.  Serialization is a small versioned JSON document; floats
round-trip exactly, so a reloaded model reproduces bit-identical
decision values.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np

from .errors import ContractViolation, ModelSchemaError, TrainingError
from .features import BlockFeatures, FeatureScaler, IDENTITY_SCALER, apply_scaler

NAV = "nav"
NON_NAV = "non-nav"

MODEL_FORMAT = "navseg-model"
MODEL_VERSION = 1


@dataclass(frozen=True)
class SvmConfig:
    c: float = 1.0
    rbf_gamma: float = 0.1
    tolerance: float = 1e-3
    max_passes: int = 500_000

    def __post_init__(self):
        if self.c <= 0 or self.rbf_gamma <= 0:
            raise ContractViolation("c and rbf_gamma must be positive")
        if self.tolerance <= 0 or self.max_passes < 1:
            raise ContractViolation("tolerance and max_passes must be positive")


@dataclass(frozen=True)
class SvmModel:
    """Trained classifier: support vectors, dual coefficients, bias, scaler."""

    support_vectors: np.ndarray      # (m, 3), normalized feature space
    dual_coefs: np.ndarray           # (m,), alpha_i * y_i
    bias: float
    scaler: FeatureScaler
    config: SvmConfig


def rbf_kernel(u: np.ndarray, v: np.ndarray, gamma: float) -> np.ndarray:
    """exp(-gamma * ||u_i - v_j||^2) for all pairs of rows."""
    u = np.atleast_2d(u)
    v = np.atleast_2d(v)
    sq = ((u[:, None, :] - v[None, :, :]) ** 2).sum(axis=2)
    return np.exp(-gamma * sq)


def train(samples: Sequence[tuple[Sequence[float], str]], cfg: SvmConfig = SvmConfig(),
          scaler: FeatureScaler = IDENTITY_SCALER) -> SvmModel:
    """Train on (3-vector, label) pairs; vectors must already be normalized.

    The given scaler is stored on the model and applied to future inputs
    of predict(); pass the scaler that produced the training vectors.
    """
    if not samples:
        raise TrainingError("no training samples")
    X = np.array([np.asarray(v, dtype=float) for v, _ in samples])
    labels = [label for _, label in samples]
    unknown = sorted({l for l in labels} - {NAV, NON_NAV})
    if unknown:
        raise TrainingError(f"unknown labels: {unknown}")
    y = np.array([1.0 if l == NAV else -1.0 for l in labels])
    if len(set(labels)) < 2:
        raise TrainingError("training requires at least one sample of each class")

    alpha, grad = _smo(X, y, cfg)
    vals = -y * grad
    up_mask = ((y > 0) & (alpha < cfg.c)) | ((y < 0) & (alpha > 0))
    low_mask = ((y < 0) & (alpha < cfg.c)) | ((y > 0) & (alpha > 0))
    m = np.max(vals[up_mask]) if up_mask.any() else None
    big_m = np.min(vals[low_mask]) if low_mask.any() else None
    if m is None:
        m = big_m
    if big_m is None:
        big_m = m
    bias = float((m + big_m) / 2.0)

    sv = alpha > 0
    return SvmModel(
        support_vectors=X[sv].copy(),
        dual_coefs=(alpha * y)[sv].copy(),
        bias=bias,
        scaler=scaler,
        config=cfg,
    )


def _smo(X: np.ndarray, y: np.ndarray, cfg: SvmConfig) -> tuple[np.ndarray, np.ndarray]:
    """Maximal-violating-pair SMO; returns (alpha, gradient of the dual)."""
    n = len(y)
    K = rbf_kernel(X, X, cfg.rbf_gamma)
    Q = (y[:, None] * y[None, :]) * K
    alpha = np.zeros(n)
    grad = -np.ones(n)  # d/d alpha of (1/2 a'Qa - sum a)
    for _ in range(cfg.max_passes):
        vals = -y * grad
        up_mask = ((y > 0) & (alpha < cfg.c)) | ((y < 0) & (alpha > 0))
        low_mask = ((y < 0) & (alpha < cfg.c)) | ((y > 0) & (alpha > 0))
        up_vals = np.where(up_mask, vals, -np.inf)
        low_vals = np.where(low_mask, vals, np.inf)
        i = int(np.argmax(up_vals))   # first maximum: lowest-index tie-break
        j = int(np.argmin(low_vals))
        if up_vals[i] - low_vals[j] <= cfg.tolerance:
            return alpha, grad
        eta = K[i, i] + K[j, j] - 2.0 * K[i, j]
        if eta <= 0:
            eta = 1e-12
        new_aj = alpha[j] + y[j] * (vals[j] - vals[i]) / eta
        if y[i] == y[j]:
            lo = max(0.0, alpha[i] + alpha[j] - cfg.c)
            hi = min(cfg.c, alpha[i] + alpha[j])
        else:
            lo = max(0.0, alpha[j] - alpha[i])
            hi = min(cfg.c, cfg.c + alpha[j] - alpha[i])
        new_aj = min(max(new_aj, lo), hi)
        delta_j = new_aj - alpha[j]
        if delta_j == 0.0:
            return alpha, grad  # no progress possible within the box
        new_ai = alpha[i] + y[i] * y[j] * (alpha[j] - new_aj)
        new_ai = min(max(new_ai, 0.0), cfg.c)
        delta_i = new_ai - alpha[i]
        alpha[i] = new_ai
        alpha[j] = new_aj
        grad += Q[:, i] * delta_i + Q[:, j] * delta_j
    raise TrainingError(
        f"optimizer did not converge within {cfg.max_passes} passes")


def decision_values(model: SvmModel, vectors: np.ndarray) -> np.ndarray:
    """Decision function on already-normalized vectors."""
    vectors = np.atleast_2d(np.asarray(vectors, dtype=float))
    if len(model.dual_coefs) == 0:
        return np.full(len(vectors), model.bias)
    K = rbf_kernel(model.support_vectors, vectors, model.config.rbf_gamma)
    return model.dual_coefs @ K + model.bias


def predict(model: SvmModel, f: BlockFeatures | Sequence[float]) -> tuple[str, float]:
    """Normalize with the model's scaler and classify one block.

    Returns (label, decision value); a decision value of exactly 0 is
    classified as non-navigation.
    """
    x = apply_scaler(model.scaler, f if isinstance(f, BlockFeatures)
                     else np.asarray(f, dtype=float))
    value = float(decision_values(model, x[None, :])[0])
    return (NAV if value > 0 else NON_NAV), value


def dual_objective(model: SvmModel) -> float:
    """Value of the dual objective at the trained solution.

    Samples with alpha = 0 contribute nothing, so the support vectors
    alone determine the objective.
    """
    coefs = model.dual_coefs
    if len(coefs) == 0:
        return 0.0
    K = rbf_kernel(model.support_vectors, model.support_vectors,
                   model.config.rbf_gamma)
    return float(np.abs(coefs).sum() - 0.5 * coefs @ K @ coefs)


# -- serialization ---------------------------------------------------------


def model_to_dict(model: SvmModel) -> dict:
    return {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "config": {
            "c": model.config.c,
            "rbf_gamma": model.config.rbf_gamma,
            "tolerance": model.config.tolerance,
            "max_passes": model.config.max_passes,
        },
        "scaler": {
            "min": list(model.scaler.minimums),
            "max": list(model.scaler.maximums),
        },
        "support_vectors": [list(row) for row in model.support_vectors],
        "dual_coefs": list(model.dual_coefs),
        "bias": model.bias,
    }


def save_model(model: SvmModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model), fh, indent=1, sort_keys=True)
        fh.write("\n")


def _require(doc: dict, path: str, key: str, kind) -> object:
    where = f"{path}.{key}" if path else key
    if not isinstance(doc, dict) or key not in doc:
        raise ModelSchemaError(f"missing field: {where}")
    value = doc[key]
    if kind is float:
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ModelSchemaError(f"field {where}: expected a number")
        return float(value)
    if not isinstance(value, kind):
        raise ModelSchemaError(f"field {where}: expected {kind.__name__}")
    return value


def model_from_dict(doc: dict) -> SvmModel:
    if _require(doc, "", "format", str) != MODEL_FORMAT:
        raise ModelSchemaError("field format: not a navseg model file")
    if _require(doc, "", "version", int) != MODEL_VERSION:
        raise ModelSchemaError("field version: unsupported model version")
    cfg_doc = _require(doc, "", "config", dict)
    cfg = SvmConfig(
        c=_require(cfg_doc, "config", "c", float),
        rbf_gamma=_require(cfg_doc, "config", "rbf_gamma", float),
        tolerance=_require(cfg_doc, "config", "tolerance", float),
        max_passes=int(_require(cfg_doc, "config", "max_passes", float)),
    )
    scaler_doc = _require(doc, "", "scaler", dict)
    lo = _require(scaler_doc, "scaler", "min", list)
    hi = _require(scaler_doc, "scaler", "max", list)
    if len(lo) != 3 or len(hi) != 3:
        raise ModelSchemaError("field scaler.min/scaler.max: expected 3 entries each")
    svs = _require(doc, "", "support_vectors", list)
    coefs = _require(doc, "", "dual_coefs", list)
    if len(svs) != len(coefs):
        raise ModelSchemaError(
            "field dual_coefs: length must match support_vectors")
    for row_no, row in enumerate(svs):
        if not isinstance(row, list) or len(row) != 3:
            raise ModelSchemaError(
                f"field support_vectors[{row_no}]: expected a 3-entry row")
    return SvmModel(
        support_vectors=np.array(svs, dtype=float).reshape(len(svs), 3),
        dual_coefs=np.array(coefs, dtype=float),
        bias=_require(doc, "", "bias", float),
        scaler=FeatureScaler(tuple(float(v) for v in lo),
                             tuple(float(v) for v in hi)),
        config=cfg,
    )


def load_model(path) -> SvmModel:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ModelSchemaError(f"not valid JSON: {exc}") from exc
    return model_from_dict(doc)
