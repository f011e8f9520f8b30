"""JSON encodings: complex arrays as [re, im] pairs, polynomial vectors, solution sets."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .polyvec import Poly, PolyVector, monomials


class SchemaError(ValueError):
    pass


def encode_complex(values) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in np.asarray(values, dtype=complex).ravel()]


def decode_complex(pairs) -> np.ndarray:
    try:
        arr = np.asarray(pairs, dtype=float)
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"expected a list of [re, im] pairs: {exc}") from exc
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise SchemaError(f"expected a list of [re, im] pairs, got shape {arr.shape}")
    return arr[:, 0] + 1j * arr[:, 1]


def polyvector_to_json(f: PolyVector) -> dict:
    return {"n": f.n, "degrees": list(f.degrees), "forms": [encode_complex(p.coeffs) for p in f.forms]}


def polyvector_from_json(data: dict) -> PolyVector:
    try:
        n = int(data["n"])
        degrees = [int(a) for a in data["degrees"]]
        raw = data["forms"]
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"polynomial vector needs n, degrees, forms: {exc}") from exc
    if len(raw) != len(degrees):
        raise SchemaError(f"{len(degrees)} degrees but {len(raw)} forms")
    forms = []
    for a, coeffs in zip(degrees, raw):
        c = decode_complex(coeffs)
        if c.size != len(monomials(n, a)):
            raise SchemaError(f"a degree-{a} form in {n + 1} variables needs {len(monomials(n, a))} coefficients, got {c.size}")
        forms.append(Poly(monomials(n, a), c))
    return PolyVector(n, tuple(degrees), tuple(forms))


def load_polyvector(path) -> PolyVector:
    return polyvector_from_json(read_json(path))


def read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc


def write_json(path, payload) -> None:
    Path(path).write_text(json.dumps(payload, indent=1) + "\n")


SOLUTION_KEYS = ("preset", "seed", "base_p", "classes", "loops_run", "stabilized", "path_failures")


def load_solution_set(path) -> dict:
    data = read_json(path)
    if not isinstance(data, dict):
        raise SchemaError("solution set must be a JSON object")
    missing = [k for k in SOLUTION_KEYS if k not in data]
    if missing:
        raise SchemaError(f"solution set is missing {missing}")
    data["base_p"] = decode_complex(data["base_p"])
    classes = []
    for i, c in enumerate(data["classes"]):
        try:
            summands = np.array([decode_complex(s) for s in c["summands"]])
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"class {i} is malformed: {exc}") from exc
        classes.append(summands)
    data["summand_arrays"] = classes
    return data
