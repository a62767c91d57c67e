"""All-but-the-top correction for anisotropic embedding spaces.

Dense document embeddings concentrate around a dominant direction, which
inflates every pairwise cosine. The fix: subtract the mean, project out the
top principal direction, and z-score each dimension. The model is fitted
once per corpus window and persisted as JSON so refits are auditable.
"""

from __future__ import annotations

import base64
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..ioutil import canonical_json, read_json, sha256_text, write_json

STD_FLOOR = 1e-8
POWER_TOL = 1e-10
POWER_MAX_ITER = 1000


class PowerIterationError(RuntimeError):
    def __init__(self, residual: float, iterations: int) -> None:
        super().__init__(
            f"power iteration did not converge after {iterations} iterations "
            f"(cosine residual {residual:.3e})"
        )
        self.residual = residual
        self.iterations = iterations


@dataclass
class WhiteningModel:
    mean: np.ndarray
    top_pc: np.ndarray
    stds: np.ndarray
    explained_top_pc: float
    fitted_on: str  # digest of the (sorted) training ids + vectors

    @property
    def dim(self) -> int:
        return int(self.mean.shape[0])

    def payload(self) -> dict:
        return {
            "schema": "whitening-v1",
            "dim": self.dim,
            "mean": _b64(self.mean),
            "top_pc": _b64(self.top_pc),
            "stds": _b64(self.stds),
            "explained_top_pc": self.explained_top_pc,
            "fitted_on": self.fitted_on,
        }

    def digest(self) -> str:
        return sha256_text(canonical_json(self.payload()))

    def save(self, path: str | Path) -> None:
        write_json(path, self.payload())

    @classmethod
    def load(cls, path: str | Path) -> "WhiteningModel":
        doc = read_json(path)
        if doc.get("schema") != "whitening-v1":
            raise ValueError(f"{path}: unexpected whitening schema")
        model = cls(
            mean=_from_b64(doc["mean"]),
            top_pc=_from_b64(doc["top_pc"]),
            stds=_from_b64(doc["stds"]),
            explained_top_pc=float(doc["explained_top_pc"]),
            fitted_on=doc["fitted_on"],
        )
        if model.mean.shape != (doc["dim"],):
            raise ValueError(f"{path}: payload dimension mismatch")
        return model


def _b64(arr: np.ndarray) -> str:
    return base64.b64encode(np.ascontiguousarray(arr, dtype=np.float64).tobytes()).decode()


def _from_b64(payload: str) -> np.ndarray:
    return np.frombuffer(base64.b64decode(payload), dtype=np.float64).copy()


def _training_digest(ids: list[str], mat: np.ndarray) -> str:
    # Order-sensitive on purpose: the contract sorts by id before fitting.
    h = sha256_text("\n".join(ids))
    return sha256_text(h + base64.b64encode(mat.astype(np.float32).tobytes()).decode())


def fit_whitening(vectors: dict[str, np.ndarray]) -> WhiteningModel:
    """Fit mean, dominant principal direction, and per-dimension stds.

    The top PC comes from power iteration on the centered covariance with a
    deterministic start (the first coordinate axis projected onto the data
    span, falling back to later axes if orthogonal), tolerance 1e-10 on the
    successive cosine, at most 1000 iterations. Stds are computed after
    centering and PC removal and floored at 1e-8.
    """
    if len(vectors) < 2:
        raise ValueError("whitening needs at least 2 vectors")
    ids = sorted(vectors)
    mat = np.stack([np.asarray(vectors[k], dtype=np.float64) for k in ids])
    mean = mat.mean(axis=0)
    centered = mat - mean

    top_pc, top_eig = _power_iteration(centered)
    total_var = float((centered * centered).sum()) / centered.shape[0]
    explained = float(top_eig / total_var) if total_var > 0 else 0.0

    projected = centered - np.outer(centered @ top_pc, top_pc)
    stds = np.maximum(projected.std(axis=0), STD_FLOOR)

    return WhiteningModel(
        mean=mean,
        top_pc=top_pc,
        stds=stds,
        explained_top_pc=explained,
        fitted_on=_training_digest(ids, mat),
    )


def _power_iteration(centered: np.ndarray) -> tuple[np.ndarray, float]:
    n, dim = centered.shape

    def cov_apply(v: np.ndarray) -> np.ndarray:
        return centered.T @ (centered @ v) / n

    v = None
    for axis in range(dim):
        e = np.zeros(dim)
        e[axis] = 1.0
        candidate = cov_apply(e)  # e projected into the data span
        norm = np.linalg.norm(candidate)
        if norm > 0:
            v = candidate / norm
            break
    if v is None:
        raise PowerIterationError(residual=1.0, iterations=0)

    residual = 1.0
    for iteration in range(1, POWER_MAX_ITER + 1):
        nxt = cov_apply(v)
        norm = np.linalg.norm(nxt)
        if norm == 0:
            raise PowerIterationError(residual=residual, iterations=iteration)
        nxt /= norm
        residual = 1.0 - abs(float(nxt @ v))
        v = nxt
        if residual < POWER_TOL:
            break
    else:
        raise PowerIterationError(residual=residual, iterations=POWER_MAX_ITER)

    # Deterministic sign: largest-magnitude component is positive.
    pivot = int(np.argmax(np.abs(v)))
    if v[pivot] < 0:
        v = -v
    eig = float(v @ cov_apply(v))
    return v, eig


def apply_whitening(v: np.ndarray, model: WhiteningModel) -> np.ndarray:
    """w = ((v - mean) - <v - mean, top_pc> top_pc) / stds, elementwise."""
    v = np.asarray(v, dtype=np.float64)
    if v.shape != model.mean.shape:
        raise ValueError(f"dimension mismatch: {v.shape} vs {model.mean.shape}")
    centered = v - model.mean
    removed = centered - (centered @ model.top_pc) * model.top_pc
    return removed / model.stds


def apply_whitening_matrix(mat: np.ndarray, model: WhiteningModel) -> np.ndarray:
    mat = np.asarray(mat, dtype=np.float64)
    if mat.shape[1] != model.dim:
        raise ValueError(f"dimension mismatch: {mat.shape[1]} vs {model.dim}")
    centered = mat - model.mean
    removed = centered - np.outer(centered @ model.top_pc, model.top_pc)
    return removed / model.stds
