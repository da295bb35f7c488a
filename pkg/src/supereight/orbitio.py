"""Orbit files: versioned JSON holding the Fourier coefficients and run metadata.

Floats go through ``json`` which writes the shortest round-trip decimal, so
``loads(dumps(o))`` reproduces ``o`` exactly and re-exporting is byte-identical.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .pathspace import TWO_PI, FourierLoop

FORMAT_VERSION = 1


class OrbitFileError(ValueError):
    pass


@dataclass
class StoredOrbit:
    loop: FourierLoop
    quadrature: int
    action: dict
    eps_history: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)

    @property
    def truncation(self):
        return self.loop.k

    @classmethod
    def from_result(cls, result, quadrature, extra=None):
        """Build from a :class:`~supereight.minimizer.OrbitResult`."""
        diag = {
            "converged": bool(result.converged),
            "status": result.status,
            "seed": result.seed,
            "iterations": int(result.iterations),
            "grad_norm": float(result.grad_norm),
            "min_separation": float(result.min_separation),
            "omega_signs": [float(v) for v in result.omega_signs],
        }
        if extra:
            diag.update(extra)
        return cls(
            loop=result.loop,
            quadrature=int(quadrature),
            action={k: float(v) for k, v in asdict(result.action).items()},
            eps_history=[[float(e), float(v)] for e, v in result.eps_history],
            diagnostics=diag,
        )

    def to_json(self):
        doc = {
            "format_version": FORMAT_VERSION,
            "period": TWO_PI,
            "truncation": self.truncation,
            "quadrature": self.quadrature,
            "coefficients": {"xi": self.loop.xi.tolist(), "eta": self.loop.eta.tolist()},
            "action": self.action,
            "eps_history": self.eps_history,
            "diagnostics": self.diagnostics,
        }
        return json.dumps(doc, indent=1, allow_nan=True) + "\n"


def dumps(orbit: StoredOrbit) -> str:
    return orbit.to_json()


def loads(text: str) -> StoredOrbit:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise OrbitFileError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise OrbitFileError("top level must be an object")
    if doc.get("format_version") != FORMAT_VERSION:
        raise OrbitFileError(f"unsupported format_version {doc.get('format_version')!r}")
    try:
        xi = np.array(doc["coefficients"]["xi"], dtype=float)
        eta = np.array(doc["coefficients"]["eta"], dtype=float)
        k = int(doc["truncation"])
        m = int(doc["quadrature"])
        period = float(doc["period"])
    except (KeyError, TypeError, ValueError) as exc:
        raise OrbitFileError(f"malformed orbit file: {exc!r}") from exc
    if period != TWO_PI:
        raise OrbitFileError(f"period must be 2 pi, got {period}")
    if xi.shape != (k + 1, 4) or eta.shape != (k + 1, 4):
        raise OrbitFileError(f"coefficient arrays must be ({k + 1}, 4)")
    if not (np.all(np.isfinite(xi)) and np.all(np.isfinite(eta))):
        raise OrbitFileError("coefficients must be finite")
    return StoredOrbit(FourierLoop(xi, eta), m, dict(doc.get("action", {})),
                       list(doc.get("eps_history", [])), dict(doc.get("diagnostics", {})))


def write_orbit(path, orbit: StoredOrbit):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(orbit.to_json())


def read_orbit(path) -> StoredOrbit:
    try:
        with open(path, encoding="utf-8") as fh:
            return loads(fh.read())
    except OSError as exc:
        raise OrbitFileError(f"cannot read {path}: {exc}") from exc


def sample_bodies(loop: FourierLoop, n):
    """``n`` uniform samples on ``[0, 2 pi)`` of all four bodies: columns
    ``t, q1x, q1y, q2x, q2y, q3x, q3y, q4x, q4y``."""
    if n < 1:
        raise ValueError("need at least one sample")
    t = TWO_PI * np.arange(n) / n
    b = loop.bodies(t).reshape(n, 8)
    return np.column_stack([t, b])


SAMPLE_COLUMNS = ("t", "q1x", "q1y", "q2x", "q2y", "q3x", "q3y", "q4x", "q4y")
