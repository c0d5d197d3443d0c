"""Sparse multivariate Fourier representations on the d-torus.

Functions on T^d = [0, 2pi)^d are represented by finite maps from integer
frequency vectors to complex amplitudes,

    f(x) = sum_j c_j exp(i <j, x>).

All norms follow the (2pi)^{-d/p}-normalized convention, under which the
L2 norm of f equals the plain Euclidean norm of its coefficient vector and
convolution acts diagonally, (f*g)^(j) = f^(j) g^(j).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .caps import check_values

Frequency = tuple[int, ...]


@dataclass(frozen=True)
class FourierCoefficients:
    """Finite frequency-to-amplitude map for a trigonometric polynomial.

    Invariants: every key is a length-``d`` tuple of ints, no stored amplitude
    is exactly zero, and when ``real_valued`` is set the map is Hermitian
    (amplitude at -j is the conjugate of the amplitude at j).

    Instances are immutable; build them with :meth:`make`.
    """

    d: int
    entries: dict[Frequency, complex]
    real_valued: bool = field(default=False, compare=False)

    @classmethod
    def make(
        cls,
        d: int,
        entries: dict | None = None,
        real_valued: bool = False,
    ) -> "FourierCoefficients":
        """Normalize and validate raw entries (drops exact zeros, coerces keys)."""
        if d < 1:
            raise ValueError(f"dimension must be >= 1, got {d}")
        norm: dict[Frequency, complex] = {}
        for j, v in (entries or {}).items():
            key = (int(j),) if isinstance(j, (int, np.integer)) else tuple(int(c) for c in j)
            if len(key) != d:
                raise ValueError(f"frequency {key} does not match dimension {d}")
            v = complex(v)
            if v != 0:
                norm[key] = norm.get(key, 0) + v
                if norm[key] == 0:
                    del norm[key]
        return cls(d=d, entries=norm, real_valued=real_valued)

    def is_hermitian(self, tol: float = 0.0) -> bool:
        """Scan for Hermitian symmetry: entry(-j) == conj(entry(j)) within tol."""
        for j, v in self.entries.items():
            w = self.entries.get(tuple(-c for c in j), 0.0)
            if abs(w - np.conj(v)) > tol:
                return False
        return True

    def degrees(self) -> tuple[int, ...]:
        """Per-coordinate maximal |j_l| over the support (zeros for empty)."""
        degs = [0] * self.d
        for j in self.entries:
            for l, c in enumerate(j):
                degs[l] = max(degs[l], abs(c))
        return tuple(degs)

    def abs_sum(self) -> float:
        return float(sum(abs(v) for v in self.entries.values()))

    def __add__(self, other: "FourierCoefficients") -> "FourierCoefficients":
        _check_same_dim(self, other)
        out = dict(self.entries)
        for j, v in other.entries.items():
            out[j] = out.get(j, 0) + v
        return FourierCoefficients.make(
            self.d, out, real_valued=self.real_valued and other.real_valued
        )

    def __sub__(self, other: "FourierCoefficients") -> "FourierCoefficients":
        return self + (-1.0) * other

    def __rmul__(self, scalar: complex) -> "FourierCoefficients":
        scalar = complex(scalar)
        real = self.real_valued and scalar.imag == 0
        return FourierCoefficients.make(
            self.d, {j: scalar * v for j, v in self.entries.items()}, real_valued=real
        )


@dataclass(frozen=True)
class GridSignal:
    """Dense complex samples on the tensor grid (2pi s_1/q_1, ..., 2pi s_d/q_d)."""

    shape: tuple[int, ...]
    values: np.ndarray

    def __post_init__(self):
        if tuple(self.values.shape) != tuple(self.shape):
            raise ValueError(f"value array shape {self.values.shape} != {self.shape}")


def _check_same_dim(f1: FourierCoefficients, f2: FourierCoefficients) -> None:
    if f1.d != f2.d:
        raise ValueError(f"dimension mismatch: {f1.d} vs {f2.d}")


def _as_point(x, d: int) -> np.ndarray:
    pt = np.atleast_1d(np.asarray(x, dtype=float))
    if pt.shape != (d,):
        raise ValueError(f"point of shape {pt.shape} does not match dimension {d}")
    return pt


def evaluate(coeffs: FourierCoefficients, x) -> complex:
    """Evaluate sum_j c_j exp(i <j, x>) at a single point x.

    For a coefficient map flagged ``real_valued`` the imaginary part of the
    result is floating-point noise, bounded by ~1e-12 times the coefficient
    l1 mass.
    """
    pt = _as_point(x, coeffs.d)
    if not coeffs.entries:
        return 0j
    J = np.array(list(coeffs.entries.keys()), dtype=float)
    c = np.array(list(coeffs.entries.values()), dtype=complex)
    return complex(np.sum(c * np.exp(1j * (J @ pt))))


def evaluate_many(coeffs: FourierCoefficients, points: np.ndarray) -> np.ndarray:
    """Vectorized :func:`evaluate` over an (npoints, d) array."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.shape[1] != coeffs.d:
        raise ValueError(f"points of shape {pts.shape} do not match dimension {coeffs.d}")
    if not coeffs.entries:
        return np.zeros(pts.shape[0], dtype=complex)
    J = np.array(list(coeffs.entries.keys()), dtype=float)
    c = np.array(list(coeffs.entries.values()), dtype=complex)
    return np.exp(1j * (pts @ J.T)) @ c


def convolve(f1: FourierCoefficients, f2: FourierCoefficients) -> FourierCoefficients:
    """Normalized convolution; acts diagonally on coefficients."""
    _check_same_dim(f1, f2)
    small, big = sorted((f1, f2), key=lambda f: len(f.entries))
    out = {}
    for j, v in small.entries.items():
        w = big.entries.get(j)
        if w is not None:
            out[j] = v * w
    return FourierCoefficients.make(
        f1.d, out, real_valued=f1.real_valued and f2.real_valued
    )


def dirichlet_eval(m: int, t: float) -> float:
    """Dirichlet kernel D_m(t) = sin((m + 1/2) t) / sin(t / 2).

    Equals sum_{|l| <= m} exp(i l t); the removable singularity at t = 0
    (mod 2pi) returns 2m + 1.  Near the singularity the closed form is
    ill-conditioned, so the cosine sum is used instead.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    t = float(t)
    if not math.isfinite(t):
        raise ValueError("t must be finite")
    half_sin = math.sin(t / 2.0)
    if abs(half_sin) < 1e-8:
        ls = np.arange(1, m + 1)
        return float(1.0 + 2.0 * np.sum(np.cos(ls * t)))
    return math.sin((m + 0.5) * t) / half_sin


def _box_vector(box, d: int) -> tuple[int, ...]:
    if isinstance(box, (int, np.integer)):
        box = (int(box),) * d
    box = tuple(int(b) for b in box)
    if len(box) != d:
        raise ValueError(f"per-dimension vector {box} does not match dimension {d}")
    return box


def fourier_project(coeffs: FourierCoefficients, m) -> FourierCoefficients:
    """Rectangular Fourier projection: keep entries with |j_l| <= m_l for all l.

    Idempotent; ``m`` may be a single int (applied to every coordinate) or a
    per-coordinate vector of non-negative ints.
    """
    mv = _box_vector(m, coeffs.d)
    if any(b < 0 for b in mv):
        raise ValueError(f"projection degrees must be >= 0, got {mv}")
    kept = {
        j: v
        for j, v in coeffs.entries.items()
        if all(abs(c) <= b for c, b in zip(j, mv))
    }
    return FourierCoefficients.make(coeffs.d, kept, real_valued=coeffs.real_valued)


def sample_grid(
    coeffs: FourierCoefficients, q, cap: int | None = None
) -> GridSignal:
    """Sample the trigonometric polynomial on the grid (2pi s_l / q_l).

    The aliased coefficient array (entries folded modulo q per coordinate) is
    assembled densely and inverted with an inverse DFT, which is exact for a
    finite coefficient map.
    """
    qv = _box_vector(q, coeffs.d)
    if any(qi < 1 for qi in qv):
        raise ValueError(f"grid shape must be positive, got {qv}")
    total = math.prod(qv)
    check_values(total, f"sampling grid {qv}", override=cap)
    aliased = np.zeros(qv, dtype=complex)
    for j, v in coeffs.entries.items():
        aliased[tuple(c % qi for c, qi in zip(j, qv))] += v
    values = np.fft.ifftn(aliased) * total
    return GridSignal(shape=qv, values=values)


def alias_array(signal: GridSignal) -> np.ndarray:
    """Forward DFT of grid samples: recovers the folded coefficient array."""
    return np.fft.fftn(signal.values) / math.prod(signal.shape)


def l2_norm(coeffs: FourierCoefficients) -> float:
    """Normalized L2 norm: sqrt of the sum of squared amplitude moduli."""
    return math.sqrt(sum(abs(v) ** 2 for v in coeffs.entries.values()))


def lp_norm_grid(
    coeffs: FourierCoefficients,
    p: float,
    oversample: int = 4,
    cap: int | None = None,
) -> float:
    """Discrete L_p norm over an oversampled tensor grid.

    Uses q_l = oversample * (2 D_l + 1) nodes per coordinate, D_l the support
    degree.  Exact for p = 2 (discrete Parseval); for other p this is a
    quadrature approximation that converges as ``oversample`` grows.
    """
    if not 1.0 < p < math.inf:
        raise ValueError(f"p must lie in (1, inf), got {p}")
    if oversample < 2:
        raise ValueError(f"oversample must be >= 2, got {oversample}")
    q = tuple(oversample * (2 * dl + 1) for dl in coeffs.degrees())
    sig = sample_grid(coeffs, q, cap=cap)
    return float(np.mean(np.abs(sig.values) ** p) ** (1.0 / p))


def to_json_dict(coeffs: FourierCoefficients) -> dict:
    """JSON form {"d": d, "entries": [[j_1, ..., j_d, re, im], ...]}, sorted."""
    rows = [
        [*j, float(v.real), float(v.imag)]
        for j, v in sorted(coeffs.entries.items())
    ]
    return {"d": coeffs.d, "entries": rows}


def from_json_dict(obj: dict) -> FourierCoefficients:
    d = int(obj["d"])
    entries = {}
    for row in obj["entries"]:
        j = tuple(int(c) for c in row[:d])
        entries[j] = complex(float(row[d]), float(row[d + 1]))
    return FourierCoefficients.make(d, entries)


def to_json(coeffs: FourierCoefficients) -> str:
    return json.dumps(to_json_dict(coeffs))


def from_json(text: str) -> FourierCoefficients:
    return from_json_dict(json.loads(text))


def single_mode(j, amp: complex = 1.0) -> FourierCoefficients:
    """The one-term map for exp(i <j, x>) (j an int or an int tuple)."""
    key = (int(j),) if isinstance(j, (int, np.integer)) else tuple(int(c) for c in j)
    return FourierCoefficients.make(len(key), {key: amp})
