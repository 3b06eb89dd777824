"""JSON persistence for converged circles and continuation families.

Floats are written with Python's shortest round-trip ``repr``, so reading a
file and writing it back reproduces it byte for byte.
"""
from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from . import fourier as fs
from .maps import Family, MapSpec

SCHEMA_VERSION = 1


class SchemaError(ValueError):
    pass


def _finite_or_none(x):
    return None if x is None or not math.isfinite(x) else float(x)


def _circle_payload(K: fs.FourierCircle) -> dict:
    return {"a_re": [float(v) for v in K.a.real], "a_im": [float(v) for v in K.a.imag],
            "b_re": [float(v) for v in K.b.real], "b_im": [float(v) for v in K.b.imag]}


def _circle_from_payload(p: dict, N: int) -> fs.FourierCircle:
    try:
        arrs = [np.asarray(p[k], dtype=float) for k in ("a_re", "a_im", "b_re", "b_im")]
    except KeyError as exc:
        raise SchemaError(f"circle payload lacks {exc}") from None
    if any(a.shape != (2 * N + 1,) for a in arrs):
        raise SchemaError(f"coefficient arrays must have length 2N+1 = {2 * N + 1}")
    return fs.FourierCircle(arrs[0] + 1j * arrs[1], arrs[2] + 1j * arrs[3])


@dataclass
class CircleFile:
    """A converged circle system plus enough context to re-verify it."""

    spec: MapSpec
    system: fs.CircleSystem
    unfolding: dict = field(default_factory=lambda: {"beta": 0.0, "gamma": [], "omega": []})
    final_defect: float = float("nan")
    provenance: dict = field(default_factory=dict)

    @property
    def d(self) -> int:
        return self.system.d

    @property
    def N(self) -> int:
        return self.system.N

    @property
    def rho(self) -> float:
        return self.system.rho

    @classmethod
    def from_solution(cls, spec, system, report, **provenance) -> "CircleFile":
        u = report.unfolding
        prov = {"created": time.strftime("%Y-%m-%dT%H:%M:%S%z"), "package_version": __version__}
        prov.update(provenance)
        return cls(spec, system, {"beta": float(u.beta), "gamma": [float(g) for g in u.gamma],
                                  "omega": [float(w) for w in u.omega]},
                   float(report.final_defect), prov)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "circle",
            "map": {"family": self.spec.family.value, "alpha": float(self.spec.alpha)},
            "d": self.d,
            "N": self.N,
            "rho": float(self.rho),
            "rho_per_iterate": float(self.rho / self.d),
            "unfolding": self.unfolding,
            "final_defect": _finite_or_none(self.final_defect),
            "circles": [_circle_payload(K) for K in self.system.circles],
            "provenance": self.provenance,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "CircleFile":
        _check_header(obj, "circle")
        try:
            spec = MapSpec(Family(obj["map"]["family"]), float(obj["map"]["alpha"]))
            d, N, rho = int(obj["d"]), int(obj["N"]), float(obj["rho"])
            circles = [_circle_from_payload(p, N) for p in obj["circles"]]
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, SchemaError):
                raise
            raise SchemaError(f"malformed circle file: {exc!r}") from None
        if len(circles) != d:
            raise SchemaError(f"expected {d} circles, found {len(circles)}")
        fd = obj.get("final_defect")
        return cls(spec, fs.CircleSystem(rho, circles), obj.get("unfolding", {}),
                   float("nan") if fd is None else float(fd), obj.get("provenance", {}))

    def dumps(self) -> str:
        return dumps(self.to_dict())

    @classmethod
    def loads(cls, text: str) -> "CircleFile":
        return cls.from_dict(_parse(text))

    def write(self, path) -> None:
        Path(path).write_text(self.dumps())

    @classmethod
    def read(cls, path) -> "CircleFile":
        return cls.loads(_read(path))


@dataclass
class FamilyFile:
    """Ordered continuation records with their monitored Sobolev norms."""

    spec: MapSpec
    records: list
    stop_reason: str
    direction: int = 1
    message: str = ""
    provenance: dict = field(default_factory=dict)

    @classmethod
    def from_family(cls, fam, **provenance) -> "FamilyFile":
        recs = [{"system": r.system, "defect": r.defect, "log_sobolev": list(r.log_sobolev), "step": r.step}
                for r in fam.records]
        return cls(fam.spec, recs, fam.stop_reason.value, fam.direction, fam.message, dict(provenance))

    def to_dict(self) -> dict:
        out = []
        for r in self.records:
            s = r["system"]
            out.append({"rho": float(s.rho), "N": s.N, "d": s.d, "defect": _finite_or_none(r["defect"]),
                        "step": _finite_or_none(r.get("step")),
                        "log_sobolev": [[float(d), float(v)] for d, v in r["log_sobolev"]],
                        "circles": [_circle_payload(K) for K in s.circles]})
        return {"schema_version": SCHEMA_VERSION, "kind": "family",
                "map": {"family": self.spec.family.value, "alpha": float(self.spec.alpha)},
                "direction": self.direction, "stop_reason": self.stop_reason, "message": self.message,
                "records": out, "provenance": self.provenance}

    @classmethod
    def from_dict(cls, obj: dict) -> "FamilyFile":
        _check_header(obj, "family")
        try:
            spec = MapSpec(Family(obj["map"]["family"]), float(obj["map"]["alpha"]))
            recs = []
            for r in obj["records"]:
                N = int(r["N"])
                circles = [_circle_from_payload(p, N) for p in r["circles"]]
                recs.append({"system": fs.CircleSystem(float(r["rho"]), circles),
                             "defect": float("nan") if r["defect"] is None else float(r["defect"]),
                             "step": float("nan") if r["step"] is None else float(r["step"]),
                             "log_sobolev": [(float(d), float(v)) for d, v in r["log_sobolev"]]})
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, SchemaError):
                raise
            raise SchemaError(f"malformed family file: {exc!r}") from None
        return cls(spec, recs, obj["stop_reason"], int(obj.get("direction", 1)), obj.get("message", ""),
                   obj.get("provenance", {}))

    def dumps(self) -> str:
        return dumps(self.to_dict())

    @classmethod
    def loads(cls, text: str) -> "FamilyFile":
        return cls.from_dict(_parse(text))

    def write(self, path) -> None:
        Path(path).write_text(self.dumps())

    @classmethod
    def read(cls, path) -> "FamilyFile":
        return cls.loads(_read(path))


def dumps(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True, allow_nan=False) + "\n"


def _parse(text: str) -> dict:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"not valid JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise SchemaError("top-level value must be an object")
    return obj


def _read(path) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from None


def _check_header(obj: dict, kind: str) -> None:
    if obj.get("schema_version") != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema_version {obj.get('schema_version')!r}")
    if obj.get("kind", kind) != kind:
        raise SchemaError(f"expected a {kind} file, got {obj.get('kind')!r}")
