"""Finite-dimensional commutative unital algebras given by structure constants.

An algebra is presented by a rank-3 tensor c with

    e_i * e_j = sum_k c[i, j, k] e_k,

a unit vector in coordinates, and positive per-basis weights defining the
norm ||sum a_i e_i|| = sum w_i |a_i|.  Submultiplicativity of that norm
reduces to the finite certificate ||e_i e_j|| <= w_i w_j, which
``validate_algebra`` checks together with commutativity, associativity and
the unit law.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from .reports import (
    ValidationReport,
    complex_array_to_pairs,
    pairs_to_complex_array,
)

# Structural identities (commutativity, associativity, unit law) must hold to
# this tolerance; derived equalities get the looser bounds below.
STRUCTURE_TOL = 1e-10
INVERT_TOL = 1e-9
RANK_TOL = 1e-10  # singular values below RANK_TOL * sigma_max count as zero


class AlgebraError(ValueError):
    pass


class NotInvertibleError(AlgebraError):
    """Raised when an element has no inverse (singular multiplication map)."""


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class AlgebraSpec:
    """A commutative unital algebra over C with a weighted l1 coordinate norm.

    Fields
    ------
    dim : number of basis elements
    structure : complex (dim, dim, dim) tensor, e_i e_j = sum_k c[i,j,k] e_k
    unit : coordinates of the multiplicative identity
    weights : positive reals; ||a|| = sum_i weights[i] |a_i|
    label : display name
    """

    dim: int
    structure: np.ndarray
    unit: np.ndarray
    weights: np.ndarray
    label: str = ""

    def __post_init__(self):
        n = int(self.dim)
        structure = _freeze(np.asarray(self.structure, dtype=complex).reshape(n, n, n))
        unit = _freeze(np.asarray(self.unit, dtype=complex).reshape(n))
        weights = _freeze(np.asarray(self.weights, dtype=float).reshape(n))
        if n < 1:
            raise AlgebraError("dim must be >= 1")
        if np.any(weights <= 0):
            raise AlgebraError("norm weights must be positive")
        object.__setattr__(self, "dim", n)
        object.__setattr__(self, "structure", structure)
        object.__setattr__(self, "unit", unit)
        object.__setattr__(self, "weights", weights)

    def element(self, coords) -> "Element":
        return Element(np.asarray(coords, dtype=complex), self)

    def basis_element(self, i: int) -> "Element":
        coords = np.zeros(self.dim, dtype=complex)
        coords[i] = 1.0
        return Element(coords, self)

    def zero(self) -> "Element":
        return Element(np.zeros(self.dim, dtype=complex), self)

    def one(self) -> "Element":
        return Element(self.unit.copy(), self)

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "structure": complex_array_to_pairs(self.structure),
            "unit": complex_array_to_pairs(self.unit),
            "weights": [float(w) for w in self.weights],
            "label": self.label,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AlgebraSpec":
        return cls(
            dim=int(data["dim"]),
            structure=pairs_to_complex_array(data["structure"]),
            unit=pairs_to_complex_array(data["unit"]),
            weights=np.asarray(data["weights"], dtype=float),
            label=str(data.get("label", "")),
        )


@dataclass(frozen=True)
class Element:
    """An algebra element in basis coordinates."""

    coords: np.ndarray
    algebra: AlgebraSpec = field(repr=False)

    def __post_init__(self):
        coords = _freeze(np.asarray(self.coords, dtype=complex).reshape(-1))
        if coords.shape != (self.algebra.dim,):
            raise AlgebraError(
                f"coords length {coords.shape[0]} != algebra dim {self.algebra.dim}"
            )
        object.__setattr__(self, "coords", coords)

    def __add__(self, other: "Element") -> "Element":
        _same_algebra(self, other)
        return Element(self.coords + other.coords, self.algebra)

    def __sub__(self, other: "Element") -> "Element":
        _same_algebra(self, other)
        return Element(self.coords - other.coords, self.algebra)

    def __mul__(self, other):
        if isinstance(other, Element):
            return multiply(self.algebra, self, other)
        return Element(self.coords * complex(other), self.algebra)

    def __rmul__(self, scalar) -> "Element":
        return Element(self.coords * complex(scalar), self.algebra)

    def __neg__(self) -> "Element":
        return Element(-self.coords, self.algebra)

    def __repr__(self) -> str:
        vals = ", ".join(f"{z:.4g}" for z in self.coords)
        return f"Element([{vals}], {self.algebra.label or 'algebra'})"


def _same_algebra(a: Element, b: Element) -> None:
    if a.algebra is not b.algebra and not (
        a.algebra.dim == b.algebra.dim
        and np.array_equal(a.algebra.structure, b.algebra.structure)
    ):
        raise AlgebraError("elements belong to different algebras")


def multiply(E: AlgebraSpec, a: Element, b: Element) -> Element:
    """Product a*b via the structure tensor: (ab)_k = sum_ij a_i b_j c[i,j,k]."""
    _same_algebra(a, b)
    if a.coords.shape != (E.dim,):
        raise AlgebraError("element does not belong to this algebra")
    coords = np.einsum("i,j,ijk->k", a.coords, b.coords, E.structure)
    return Element(coords, E)


def norm(E: AlgebraSpec, a: Element) -> float:
    """Weighted l1 norm: sum_i w_i |a_i|.  Zero iff a = 0."""
    return float(np.dot(E.weights, np.abs(a.coords)))


def left_multiplication_matrix(E: AlgebraSpec, a: Element) -> np.ndarray:
    """Matrix of x -> a*x in basis coordinates: L[k, i] = sum_j a_j c[j,i,k]."""
    return np.einsum("j,jik->ki", a.coords, E.structure)


def basis_multiplication_matrices(E: AlgebraSpec) -> list[np.ndarray]:
    """L_{e_i} for each basis element; these commute when E is valid."""
    return [E.structure[i].T.copy() for i in range(E.dim)]


def validate_algebra(E: AlgebraSpec) -> ValidationReport:
    """Check commutativity, associativity, the unit law, and the norm certificate.

    Failures are reported with the offending basis indices and residual
    magnitude; they are data, not exceptions.
    """
    c = E.structure
    report = ValidationReport(subject=E.label or "algebra")

    comm = np.abs(c - c.transpose(1, 0, 2))
    worst = np.unravel_index(np.argmax(comm), comm.shape)
    report.add(
        "commutativity",
        bool(comm.max() <= STRUCTURE_TOL),
        float(comm.max()),
        f"e_{worst[0]}*e_{worst[1]}" if comm.max() > STRUCTURE_TOL else "",
    )

    # (e_i e_j) e_k vs e_i (e_j e_k), all triples at once
    left = np.einsum("ijm,mkl->ijkl", c, c)
    right = np.einsum("jkm,iml->ijkl", c, c)
    assoc = np.abs(left - right)
    worst = np.unravel_index(np.argmax(assoc), assoc.shape)
    report.add(
        "associativity",
        bool(assoc.max() <= STRUCTURE_TOL),
        float(assoc.max()),
        f"(e_{worst[0]} e_{worst[1]}) e_{worst[2]}" if assoc.max() > STRUCTURE_TOL else "",
    )

    unit_action = np.einsum("j,jik->ik", E.unit, c)  # row i: unit * e_i
    unit_res = np.abs(unit_action - np.eye(E.dim))
    worst_i = int(np.argmax(unit_res.max(axis=1)))
    report.add(
        "unit_law",
        bool(unit_res.max() <= STRUCTURE_TOL),
        float(unit_res.max()),
        f"unit*e_{worst_i} != e_{worst_i}" if unit_res.max() > STRUCTURE_TOL else "",
    )

    # ||e_i e_j|| <= w_i w_j certifies submultiplicativity of the weighted norm
    prod_norms = np.einsum("k,ijk->ij", E.weights, np.abs(c))
    bound = np.outer(E.weights, E.weights)
    excess = prod_norms - bound
    worst = np.unravel_index(np.argmax(excess), excess.shape)
    report.add(
        "submultiplicativity",
        bool(excess.max() <= STRUCTURE_TOL),
        float(max(excess.max(), 0.0)),
        f"||e_{worst[0]} e_{worst[1]}|| = {prod_norms[worst]:.6g} > "
        f"{bound[worst]:.6g}" if excess.max() > STRUCTURE_TOL else "",
    )
    return report


def invert(E: AlgebraSpec, a: Element) -> Element:
    """Solve (a * x) = unit.

    Raises NotInvertibleError when the multiplication-by-a matrix is rank
    deficient (singular values below RANK_TOL relative to the largest).
    """
    L = left_multiplication_matrix(E, a)
    u_mat, s, vh = np.linalg.svd(L)
    if s.size == 0 or s[0] == 0.0 or np.any(s < RANK_TOL * s[0]):
        raise NotInvertibleError(f"element is not invertible in {E.label or 'algebra'}")
    x = vh.conj().T @ ((u_mat.conj().T @ E.unit) / s)
    result = Element(x, E)
    residual = norm(E, multiply(E, a, result) - E.one())
    if residual > INVERT_TOL:
        raise NotInvertibleError(
            f"inverse residual {residual:.3g} exceeds {INVERT_TOL:.0e}"
        )
    return result


def is_invertible(E: AlgebraSpec, a: Element) -> bool:
    try:
        invert(E, a)
        return True
    except NotInvertibleError:
        return False


# ---------------------------------------------------------------------------
# Preset algebras


def pointwise_algebra(n: int, label: str | None = None) -> AlgebraSpec:
    """C^n with coordinatewise product: orthogonal idempotent basis."""
    if n < 1:
        raise AlgebraError("pointwise algebra needs n >= 1")
    c = np.zeros((n, n, n), dtype=complex)
    for i in range(n):
        c[i, i, i] = 1.0
    return AlgebraSpec(n, c, np.ones(n), np.ones(n), label or f"pointwise_{n}")


def dual_numbers() -> AlgebraSpec:
    """C[eps]/(eps^2): basis (1, eps), nilpotent eps."""
    c = np.zeros((2, 2, 2), dtype=complex)
    c[0, 0, 0] = 1.0
    c[0, 1, 1] = 1.0
    c[1, 0, 1] = 1.0
    return AlgebraSpec(2, c, [1.0, 0.0], [1.0, 1.0], "dual_numbers")


def truncated_polynomials(k: int) -> AlgebraSpec:
    """C[t]/(t^k): basis 1, t, ..., t^(k-1)."""
    if k < 2:
        raise AlgebraError("truncated polynomial algebra needs k >= 2")
    c = np.zeros((k, k, k), dtype=complex)
    for i in range(k):
        for j in range(k):
            if i + j < k:
                c[i, j, i + j] = 1.0
    unit = np.zeros(k)
    unit[0] = 1.0
    return AlgebraSpec(k, c, unit, np.ones(k), f"truncated_poly_{k}")


def cyclic_group_algebra(n: int) -> AlgebraSpec:
    """Group algebra of Z_n: basis g^0, ..., g^(n-1), e_i e_j = e_{(i+j) mod n}."""
    if n < 1:
        raise AlgebraError("cyclic group algebra needs n >= 1")
    c = np.zeros((n, n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            c[i, j, (i + j) % n] = 1.0
    unit = np.zeros(n)
    unit[0] = 1.0
    return AlgebraSpec(n, c, unit, np.ones(n), f"cyclic_group_{n}")


def complex_field() -> AlgebraSpec:
    """C itself (the scalar case)."""
    spec = pointwise_algebra(1, label="C")
    return spec


_PRESET_PATTERNS = [
    (re.compile(r"^pointwise_(\d+)$"), lambda n: pointwise_algebra(int(n))),
    (re.compile(r"^dual_numbers$"), lambda: dual_numbers()),
    (re.compile(r"^truncated_poly_(\d+)$"), lambda k: truncated_polynomials(int(k))),
    (re.compile(r"^cyclic_group_(\d+)$"), lambda n: cyclic_group_algebra(int(n))),
    (re.compile(r"^complex$|^C$"), lambda: complex_field()),
]


def preset_algebra(name: str) -> AlgebraSpec:
    """Look up a preset by name: pointwise_<n>, dual_numbers, truncated_poly_<k>,
    cyclic_group_<n>, or complex."""
    for pattern, builder in _PRESET_PATTERNS:
        match = pattern.match(name)
        if match:
            return builder(*match.groups())
    raise AlgebraError(f"unknown preset algebra {name!r}")
