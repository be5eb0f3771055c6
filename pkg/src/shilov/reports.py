"""Validation reports and JSON conventions shared by every module.

Complex numbers serialize as two-element ``[re, im]`` lists throughout the
package; reports are plain dataclasses that render to deterministic JSON
(sorted keys, stable float repr) so repeated runs diff cleanly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class CheckResult:
    """Outcome of a single named check: pass/fail plus the worst residual."""

    name: str
    passed: bool
    residual: float = 0.0
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": bool(self.passed),
            "residual": float(self.residual),
            "detail": self.detail,
        }


@dataclass
class ValidationReport:
    """A list of named checks against one subject.

    Failures are data, not exceptions: callers inspect ``passed`` or the
    individual checks.
    """

    subject: str
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, passed: bool, residual: float = 0.0, detail: str = "") -> None:
        self.checks.append(CheckResult(name, bool(passed), float(residual), detail))

    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def check(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "subject": self.subject,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
        }

    def __str__(self) -> str:
        lines = [f"[{'PASS' if self.passed else 'FAIL'}] {self.subject}"]
        for c in self.checks:
            mark = "ok  " if c.passed else "FAIL"
            extra = f"  {c.detail}" if c.detail else ""
            lines.append(f"  {mark} {c.name} (residual {c.residual:.3g}){extra}")
        return "\n".join(lines)


def complex_to_pair(z: complex) -> list[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def pair_to_complex(pair) -> complex:
    re, im = pair
    return complex(float(re), float(im))


def complex_array_to_pairs(a: np.ndarray):
    """Nested [re, im] lists mirroring the array's shape."""
    a = np.asarray(a)
    if a.ndim == 0:
        return complex_to_pair(complex(a))
    return [complex_array_to_pairs(sub) for sub in a]


def pairs_to_complex_array(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.shape[-1] != 2:
        raise ValueError("expected trailing [re, im] pairs")
    return (arr[..., 0] + 1j * arr[..., 1]).astype(complex)


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    raise TypeError(f"not JSON serializable: {type(obj)!r}")


def _sanitize(obj):
    # json.dumps emits bare Infinity/NaN tokens, which are not valid JSON;
    # map non-finite floats to strings before encoding.
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else repr(obj)
    if isinstance(obj, dict):
        return {k: _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    return obj


def canonical_json(data) -> str:
    """Deterministic JSON text: sorted keys, stable float repr, newline-terminated."""
    return json.dumps(_sanitize(data), sort_keys=True, indent=2, default=_json_default) + "\n"
