"""File formats: covariance-matrix JSON, per-sample CSV and JSON sidecars."""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .validation import InvariantViolation, check_covariance

__all__ = [
    "cm_to_dict",
    "cm_from_dict",
    "dump_cm",
    "load_cm",
    "write_samples_csv",
    "read_samples_csv",
    "write_json",
    "states_to_dict",
]


def cm_to_dict(sigma):
    sigma = np.asarray(sigma, dtype=float)
    n = sigma.shape[0] // 2
    # float repr is the shortest string that round-trips exactly
    return {"n": n, "ordering": "xxpp", "data": [float(v) for v in sigma.ravel()]}


def cm_from_dict(data, *, physical=True):
    if data.get("ordering", "xxpp") != "xxpp":
        raise ValueError(f"unsupported ordering {data.get('ordering')!r}")
    n = int(data["n"])
    values = np.asarray(data["data"], dtype=float)
    if values.size != 4 * n * n:
        raise InvariantViolation(f"expected {4 * n * n} entries for n={n}, got {values.size}")
    return check_covariance(values.reshape(2 * n, 2 * n), physical=physical)


def dump_cm(sigma):
    return json.dumps(cm_to_dict(sigma))


def load_cm(text, *, physical=True):
    return cm_from_dict(json.loads(text), physical=physical)


def write_samples_csv(path, result):
    """One row per sample: index, energy, ``mu^-2``, entropy, ``nu_k``, ``Delta_d``."""
    m = result.config.m
    header = (
        ["index", "total_energy", "inv_purity", "entropy"]
        + [f"nu_{k + 1}" for k in range(m)]
        + [f"delta_{d + 1}" for d in range(m)]
    )
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, quoting=csv.QUOTE_MINIMAL)
        writer.writerow(header)
        for s in result.records():
            writer.writerow(
                [s.index, repr(s.total_energy), repr(s.inv_purity), repr(s.entropy)]
                + [repr(float(v)) for v in s.nu]
                + [repr(float(v)) for v in s.invariants]
            )


def read_samples_csv(path, column="entropy"):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ValueError(f"{path}: no samples")
    return np.array([float(r[column]) for r in rows])


def write_json(path, payload):
    text = json.dumps(payload, indent=2, sort_keys=True, default=_default)
    if path is None:
        return text
    Path(path).write_text(text + "\n")
    return text


def states_to_dict(index, energies, unitary):
    """Audit record ``(E, X, Y)`` from which a sample can be rebuilt."""
    u = np.asarray(unitary)
    return {
        "index": int(index),
        "E": [float(v) for v in energies],
        "X": u.real.tolist(),
        "Y": u.imag.tolist(),
    }


def _default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    raise TypeError(f"cannot serialise {type(obj).__name__}")
