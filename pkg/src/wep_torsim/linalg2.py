"""Closed-form algebra for 2x2 Hermitian operators and qubit density matrices.

All quantities are in SI units at the module boundary; operators here are
dimension-agnostic containers (accelerations, energies, dimensionless ratios).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

ALGEBRA_TOL = 1e-12
CLAMP_TOL = 1e-12


def _check_finite(*values: float) -> None:
    for v in values:
        if not math.isfinite(v):
            raise ValueError(f"non-finite component: {v!r}")


@dataclass(frozen=True)
class HermitianOp2:
    """Hermitian 2x2 matrix ``[[a11, a12], [conj(a12), a22]]``."""

    a11: float
    a22: float
    a12: complex = 0j

    def __post_init__(self):
        a12 = complex(self.a12)
        _check_finite(self.a11, self.a22, a12.real, a12.imag)
        object.__setattr__(self, "a11", float(self.a11))
        object.__setattr__(self, "a22", float(self.a22))
        object.__setattr__(self, "a12", a12)

    @classmethod
    def identity(cls, scale: float = 1.0) -> "HermitianOp2":
        return cls(scale, scale, 0j)

    @classmethod
    def zero(cls) -> "HermitianOp2":
        return cls(0.0, 0.0, 0j)

    @classmethod
    def from_matrix(cls, m, atol: float = ALGEBRA_TOL) -> "HermitianOp2":
        m = np.asarray(m, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError(f"expected 2x2 matrix, got shape {m.shape}")
        scale = max(1.0, float(np.max(np.abs(m))))
        if not np.allclose(m, m.conj().T, rtol=0.0, atol=atol * scale):
            raise ValueError("matrix is not Hermitian")
        return cls(m[0, 0].real, m[1, 1].real, m[0, 1])

    @property
    def a21(self) -> complex:
        return self.a12.conjugate()

    def to_matrix(self) -> np.ndarray:
        return np.array([[self.a11, self.a12], [self.a21, self.a22]], dtype=complex)

    def trace(self) -> float:
        return self.a11 + self.a22

    def eigenvalues(self) -> tuple[float, float]:
        """Eigenvalues in ascending order."""
        half_sum = 0.5 * (self.a11 + self.a22)
        radius = math.hypot(0.5 * (self.a11 - self.a22), abs(self.a12))
        return half_sum - radius, half_sum + radius

    def eigh(self) -> tuple[np.ndarray, np.ndarray]:
        """Closed-form eigen-decomposition; columns of the second array are eigenvectors."""
        lo, hi = self.eigenvalues()
        # rotation angle of the traceless part; no division, so tiny a12 cannot underflow
        t = math.atan2(abs(self.a12), 0.5 * (self.a11 - self.a22))
        ph = cmath.exp(-1j * cmath.phase(self.a12))
        c, s = math.cos(0.5 * t), math.sin(0.5 * t)
        vecs = np.array([[s, c], [-ph * c, ph * s]], dtype=complex)
        return np.array([lo, hi]), vecs
        vecs = np.empty((2, 2), dtype=complex)
        for k, lam in enumerate((lo, hi)):
            # (a11 - lam) x + a12 y = 0 -> (a12, lam - a11); the alternative row avoids cancellation
            v1 = np.array([self.a12, lam - self.a11])
            v2 = np.array([lam - self.a22, self.a21])
            v = v1 if np.linalg.norm(v1) >= np.linalg.norm(v2) else v2
            vecs[:, k] = v / np.linalg.norm(v)
        return np.array([lo, hi]), vecs

    def scale(self, alpha: float) -> "HermitianOp2":
        return HermitianOp2(alpha * self.a11, alpha * self.a22, alpha * self.a12)

    def __add__(self, other: "HermitianOp2") -> "HermitianOp2":
        return op_add(self, other)

    def __sub__(self, other: "HermitianOp2") -> "HermitianOp2":
        return op_add(self, other.scale(-1.0))

    def __mul__(self, alpha: float) -> "HermitianOp2":
        return self.scale(alpha)

    __rmul__ = __mul__


@dataclass(frozen=True)
class DensityMatrix2:
    """Qubit density matrix: unit trace, positive semidefinite."""

    rho: HermitianOp2

    def __post_init__(self):
        if abs(self.rho.trace() - 1.0) > ALGEBRA_TOL:
            raise ValueError(f"density matrix trace is {self.rho.trace()!r}, expected 1")
        lo, _ = self.rho.eigenvalues()
        if lo < -ALGEBRA_TOL:
            raise ValueError(f"density matrix has negative eigenvalue {lo!r}")

    @classmethod
    def from_bloch_vector(cls, nx: float, ny: float, nz: float) -> "DensityMatrix2":
        return cls(HermitianOp2(0.5 * (1.0 + nz), 0.5 * (1.0 - nz), 0.5 * complex(nx, -ny)))

    def bloch_vector(self) -> tuple[float, float, float]:
        a12 = self.rho.a12
        return 2.0 * a12.real, -2.0 * a12.imag, self.rho.a11 - self.rho.a22

    def purity(self) -> float:
        r = self.rho
        return r.a11**2 + r.a22**2 + 2.0 * abs(r.a12) ** 2


def op_add(a: HermitianOp2, b: HermitianOp2) -> HermitianOp2:
    return HermitianOp2(a.a11 + b.a11, a.a22 + b.a22, a.a12 + b.a12)


def op_mul(a: HermitianOp2, b: HermitianOp2) -> np.ndarray:
    """Matrix product ``a @ b``; Hermitian only when ``a`` and ``b`` commute."""
    return np.array(
        [
            [a.a11 * b.a11 + a.a12 * b.a21, a.a11 * b.a12 + a.a12 * b.a22],
            [a.a21 * b.a11 + a.a22 * b.a21, a.a21 * b.a12 + a.a22 * b.a22],
        ],
        dtype=complex,
    )


def _trace_product(m: np.ndarray, rho: HermitianOp2) -> complex:
    # tr(rho @ m) without forming the product
    return (
        rho.a11 * m[0, 0]
        + rho.a12 * m[1, 0]
        + rho.a21 * m[0, 1]
        + rho.a22 * m[1, 1]
    )


def _real_part(z: complex, scale: float) -> float:
    if abs(z.imag) > ALGEBRA_TOL * max(1.0, scale):
        raise ArithmeticError(f"expectation has imaginary residual {z.imag!r}")
    return z.real


def expectation(op: HermitianOp2, state: DensityMatrix2) -> float:
    """``tr(rho op)``."""
    if not isinstance(state, DensityMatrix2):
        raise TypeError("state must be a DensityMatrix2")
    rho = state.rho
    z = rho.a11 * op.a11 + rho.a22 * op.a22 + 2.0 * (rho.a12 * op.a21).real
    return float(z)


def variance(op: HermitianOp2, state: DensityMatrix2) -> float:
    """``tr(rho op^2) - tr(rho op)^2``, clamped to zero inside a 1e-12 window."""
    mean = expectation(op, state)
    # shifting by the mean first keeps precision when op is close to a multiple of I
    centered = HermitianOp2(op.a11 - mean, op.a22 - mean, op.a12)
    sq = _trace_product(op_mul(centered, centered), state.rho)
    scale = max(abs(op.a11), abs(op.a22), abs(op.a12)) ** 2
    var = _real_part(sq, scale)
    if var < 0.0:
        if var < -CLAMP_TOL * max(1.0, scale):
            raise ArithmeticError(f"negative variance {var!r} outside clamp window")
        var = 0.0
    return var


def pauli_x() -> HermitianOp2:
    return HermitianOp2(0.0, 0.0, 1.0)


def pauli_y() -> HermitianOp2:
    return HermitianOp2(0.0, 0.0, -1j)


def pauli_z() -> HermitianOp2:
    return HermitianOp2(1.0, -1.0, 0j)
