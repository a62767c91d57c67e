"""Vector stores: JSON Lines and binary columnar, float32 at rest.

Both readers return float64 arrays keyed by id; all downstream math runs in
float64. The columnar format is a .npz with an `ids` string column and a
2-D float32 `vectors` column.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..ioutil import write_npz


def load_vectors(path: str | Path) -> dict[str, np.ndarray]:
    """Dispatch on suffix: .jsonl / .json -> JSON Lines, .npz -> columnar."""
    path = Path(path)
    if path.suffix == ".npz":
        return _load_columnar(path)
    return _load_jsonl(path)


def _load_jsonl(path: Path) -> dict[str, np.ndarray]:
    out: dict[str, np.ndarray] = {}
    dim: int | None = None
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            row = json.loads(line)
            if "_meta" in row and len(row) == 1:
                continue
            key = row.get("id") or row.get("paper_id") or row.get("author_key")
            if key is None:
                raise ValueError(f"{path}: vector row without an id")
            vec = np.asarray(row["vector"], dtype=np.float32).astype(np.float64)
            if not np.all(np.isfinite(vec)):
                raise ValueError(f"{path}: non-finite vector for {key}")
            if dim is None:
                dim = vec.shape[0]
            elif vec.shape[0] != dim:
                raise ValueError(f"{path}: dimension {vec.shape[0]} != {dim} for {key}")
            out[key] = vec
    return out


def _load_columnar(path: Path) -> dict[str, np.ndarray]:
    with np.load(path, allow_pickle=False) as data:
        ids = [str(x) for x in data["ids"]]
        mat = data["vectors"].astype(np.float64)
    if mat.ndim != 2 or mat.shape[0] != len(ids):
        raise ValueError(f"{path}: ids/vectors shape mismatch")
    if not np.all(np.isfinite(mat)):
        raise ValueError(f"{path}: non-finite vectors")
    return {key: mat[i] for i, key in enumerate(ids)}


def save_vectors_jsonl(path: str | Path, vectors: dict[str, np.ndarray]) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        for key in sorted(vectors):
            vec = np.asarray(vectors[key], dtype=np.float32)
            row = {"id": key, "vector": [float(x) for x in vec]}
            fh.write(json.dumps(row, sort_keys=True, separators=(",", ":")) + "\n")


def save_vectors_columnar(path: str | Path, vectors: dict[str, np.ndarray]) -> None:
    keys = sorted(vectors)
    mat = np.stack([np.asarray(vectors[k], dtype=np.float32) for k in keys]) if keys else \
        np.zeros((0, 0), dtype=np.float32)
    write_npz(path, {"ids": np.array(keys), "vectors": mat})
