"""The periodic kernel kappa_{r,d}, its function space, and RKHS operations.

The kernel of smoothness r > 0 in dimension d is

    kappa_{r,d}(x) = sum_{j in Z^d} w_j^{-1} exp(i <j, x>),
    w_j = prod_l max(|j_l|, 1)^r,

a tensor product of univariate kernels.  The associated space consists of
convolutions f = kappa_{r,d} * g with ||f|| := ||g||; for p = 2 and r > 1/2
it is a reproducing kernel Hilbert space with kernel kappa_{2r,d}(x - y).

Pointwise evaluation of the univariate kernel uses the polylogarithm
expansion around the cusp,

    kappa_r(t) = 1 + 2 [ Gamma(1-r) cos(pi (r-1)/2) t^{r-1}
                         + sum_{j>=0} (-1)^j zeta(r-2j) t^{2j} / (2j)! ],

valid for 0 < t <= pi (integer r carries a logarithmic correction in place
of the divergent zeta term).  The series converges geometrically with ratio
(t/2pi)^2, so sixty terms reach full double precision; direct summation of
the defining cosine series cannot reach comparable accuracy for small r at
any feasible truncation length.
"""

from __future__ import annotations

import functools
import json
import math
from dataclasses import dataclass

import numpy as np

from .caps import UnsupportedSmoothnessError
from .fourier import (
    FourierCoefficients,
    _box_vector,
    evaluate,
    from_json_dict,
    l2_norm,
    to_json_dict,
)

_SERIES_TERMS = 60  # geometric tail <= 4^-60 of the first term on t in [0, pi]
_EVAL_PRECISION = 5e-13  # certified accuracy of one univariate kernel value


@dataclass(frozen=True)
class KorobovParams:
    """Smoothness r and dimension d of a kernel space.

    r > 1/2 is required for L2 operations, r > 1 for pointwise evaluation.
    """

    r: float
    d: int

    def __post_init__(self):
        if not (self.r > 0 and math.isfinite(self.r)):
            raise ValueError(f"smoothness must be positive, got {self.r}")
        if self.d < 1:
            raise ValueError(f"dimension must be >= 1, got {self.d}")

    def require_l2(self) -> None:
        if self.r <= 0.5:
            raise UnsupportedSmoothnessError(
                f"r = {self.r} <= 1/2: the kernel is not square-integrable"
            )

    def require_pointwise(self) -> None:
        if self.r <= 1.0:
            raise UnsupportedSmoothnessError(
                f"r = {self.r} <= 1: the kernel is not continuous; "
                "work with Fourier-domain operations instead"
            )


@dataclass(frozen=True)
class KorobovElement:
    """An element f = kappa_{r,d} * g given by the coefficients of g.

    Fourier coefficients of f itself are derived on demand as w_j^{-1} g^(j);
    the element's norm is the l2 norm of g.
    """

    params: KorobovParams
    g: FourierCoefficients

    def __post_init__(self):
        if self.g.d != self.params.d:
            raise ValueError(
                f"coefficient dimension {self.g.d} != parameter dimension {self.params.d}"
            )

    @property
    def norm(self) -> float:
        return l2_norm(self.g)


def lambda_weight(j, r: float) -> float:
    """Weight prod_l max(|j_l|, 1)^r (|j_l|^r on nonzero components, 1 on zero)."""
    if r <= 0:
        raise ValueError(f"smoothness must be positive, got {r}")
    if isinstance(j, (int, np.integer)):
        j = (int(j),)
    out = 1.0
    for c in j:
        out *= max(abs(c), 1.0) ** r
    return out


def lambda_inv_array(js: np.ndarray, r: float) -> np.ndarray:
    """Vectorized w_j^{-r-inverse} for an (n, d) or (n,) integer array."""
    a = np.maximum(np.abs(np.asarray(js, dtype=float)), 1.0) ** (-r)
    return a if a.ndim == 1 else np.prod(a, axis=1)


@functools.lru_cache(maxsize=32)
def _kappa_table(r: float) -> tuple[np.ndarray, int]:
    """Series coefficients zeta(r - 2j)/(2j)! and the integer order (0 if none).

    mpmath supplies the zeta values (the reflection to negative arguments is
    needed); this runs once per smoothness and is cached.
    """
    import mpmath

    n = round(r)
    is_int = abs(r - n) < 1e-12 and n >= 2
    coefs = np.empty(_SERIES_TERMS + 1)
    fact = 1.0
    for j in range(_SERIES_TERMS + 1):
        s = r - 2 * j
        if j > 0:
            fact *= (2 * j - 1) * (2 * j)
        if is_int and abs(s - 1.0) < 0.5:
            coefs[j] = 0.0  # slot replaced by the logarithmic correction
            continue
        coefs[j] = float(mpmath.zeta(s)) / fact
    return coefs, (n if is_int else 0)


def kappa_values(x, r: float) -> np.ndarray:
    """Univariate kernel kappa_r at the points x (array), r > 1.

    Accurate to ~5e-13 in absolute terms; see the module docstring for the
    expansion used.
    """
    if r <= 1.0:
        raise UnsupportedSmoothnessError(
            f"r = {r} <= 1: pointwise kernel values are undefined (not continuous); "
            "work with Fourier-domain operations instead"
        )
    x = np.asarray(x, dtype=float)
    coefs, n_int = _kappa_table(r)
    at_zero = 1.0 + 2.0 * coefs[0]  # kappa_r(0) = 1 + 2 zeta(r)
    t = np.mod(x, 2.0 * math.pi)
    t = np.minimum(t, 2.0 * math.pi - t)  # kernel is even
    tt = -(t * t)
    series = np.full(t.shape, coefs[_SERIES_TERMS])
    for j in range(_SERIES_TERMS - 1, -1, -1):  # Horner in -t^2
        series = series * tt + coefs[j]
    safe_t = np.where(t > 0, t, 1.0)
    if n_int == 0:
        cusp = math.gamma(1.0 - r) * math.cos(math.pi * (r - 1) / 2) * safe_t ** (r - 1)
    elif n_int % 2 == 1:
        h = sum(1.0 / i for i in range(1, n_int))
        cusp = (
            (-1.0) ** ((n_int - 1) // 2)
            * safe_t ** (n_int - 1)
            * (h - np.log(safe_t))
            / math.factorial(n_int - 1)
        )
    else:
        cusp = (
            (-1.0) ** (n_int // 2)
            * (math.pi / 2.0)
            * safe_t ** (n_int - 1)
            / math.factorial(n_int - 1)
        )
    out = 1.0 + 2.0 * (series + cusp)
    return np.where(t > 0, out, at_zero)


def kappa_at(x: float, r: float) -> float:
    """Scalar convenience wrapper around :func:`kappa_values`."""
    return float(kappa_values(float(x), r))


def korobov_eval(x, params: KorobovParams, tol: float = 1e-10) -> float:
    """Pointwise kernel value kappa_{r,d}(x) = prod_l kappa_r(x_l), r > 1.

    Parameters
    ----------
    x : array_like
        Point in T^d (a scalar is accepted for d = 1).
    params : KorobovParams
        Requires smoothness r > 1.
    tol : float
        Requested absolute accuracy.  Each univariate factor is evaluated to
        tol / (d * kappa_r(0)^(d-1)), which propagates through the product;
        the evaluator's own floor is ~5e-13 per factor.

    Returns
    -------
    float
    """
    params.require_pointwise()
    floor = _EVAL_PRECISION * params.d * kappa_at(0.0, params.r) ** (params.d - 1)
    if tol < floor:
        raise ValueError(
            f"tol = {tol} is below the attainable accuracy {floor:.2e} for d = {params.d}"
        )
    pt = np.atleast_1d(np.asarray(x, dtype=float))
    if pt.shape != (params.d,):
        raise ValueError(f"point of shape {pt.shape} does not match dimension {params.d}")
    return float(np.prod(kappa_values(pt, params.r)))


# One-periodic Bernoulli polynomials B_n(t) (highest degree first).
_BERNOULLI = {
    2: [1.0, -1.0, 1.0 / 6.0],
    4: [1.0, -2.0, 1.0, 0.0, -1.0 / 30.0],
    6: [1.0, -3.0, 5.0 / 2.0, 0.0, -1.0 / 2.0, 0.0, 1.0 / 42.0],
    8: [1.0, -4.0, 14.0 / 3.0, 0.0, -7.0 / 3.0, 0.0, 2.0 / 3.0, 0.0, -1.0 / 30.0],
}


def korobov_eval_bernoulli(x: float, r: int) -> float:
    """Closed-form univariate kernel for even smoothness r in {2, 4, 6, 8}.

    Uses kappa_r(2 pi t) = 1 - (-1)^(r/2) (2 pi)^r / r! * B_r(t) with B_r the
    one-periodic Bernoulli polynomial; for r = 2 this reduces to
    1 + pi^2/3 - pi x + x^2/2 on [0, 2pi].
    """
    if r not in _BERNOULLI:
        raise UnsupportedSmoothnessError(
            f"closed-form path supports even r in {sorted(_BERNOULLI)}, got {r}"
        )
    t = (float(x) / (2.0 * math.pi)) % 1.0
    b = np.polyval(_BERNOULLI[r], t)
    return 1.0 - (-1.0) ** (r // 2) * (2.0 * math.pi) ** r / math.factorial(r) * b


def element_fourier(elem: KorobovElement, box) -> FourierCoefficients:
    """Fourier coefficients of f = kappa * g on the box |j_l| <= box_l."""
    bv = _box_vector(box, elem.params.d)
    out = {}
    for j, v in elem.g.entries.items():
        if all(abs(c) <= b for c, b in zip(j, bv)):
            out[j] = v / lambda_weight(j, elem.params.r)
    return FourierCoefficients.make(elem.params.d, out, real_valued=elem.g.real_valued)


def element_norm(elem: KorobovElement) -> float:
    return l2_norm(elem.g)


def rkhs_inner(f1: KorobovElement, f2: KorobovElement) -> complex:
    """Hilbert-space inner product sum_j g1^(j) conj(g2^(j)).

    Real for real-valued elements; complex in general (the space is treated
    over the complex scalars here).
    """
    if f1.params != f2.params:
        raise ValueError(f"parameter mismatch: {f1.params} vs {f2.params}")
    small, big = sorted((f1.g, f2.g), key=lambda c: len(c.entries))
    acc = 0j
    flip = small is not f1.g
    for j, v in small.entries.items():
        w = big.entries.get(j)
        if w is None:
            continue
        acc += v * np.conj(w) if not flip else w * np.conj(v)
    return complex(acc)


@dataclass(frozen=True)
class KernelSpec:
    """A reproducing-kernel section K(., y) = kappa_{2r,d}(. - y).

    ``params`` carries the kernel's own smoothness 2r (twice the smoothness
    of the space it reproduces).
    """

    params: KorobovParams
    center: tuple[float, ...]

    @classmethod
    def for_space(cls, space: KorobovParams, center) -> "KernelSpec":
        return cls(
            params=KorobovParams(r=2.0 * space.r, d=space.d),
            center=tuple(float(c) for c in np.atleast_1d(center)),
        )

    def element(self, box) -> KorobovElement:
        """The section as an element of the space it reproduces."""
        space = KorobovParams(r=self.params.r / 2.0, d=self.params.d)
        return kernel_element(space, self.center, box)


def kernel_element(params: KorobovParams, center, box) -> KorobovElement:
    """The kernel section K(., x) as an element of the space for ``params``.

    Its g-coefficients are w_j^{-1} exp(-i <j, x>) truncated to the box; the
    element represents kappa_{2r,d}(. - x) there.
    """
    params.require_l2()
    bv = _box_vector(box, params.d)
    center = np.atleast_1d(np.asarray(center, dtype=float))
    if center.shape != (params.d,):
        raise ValueError(f"center of shape {center.shape} does not match dimension {params.d}")
    entries = {}
    for j in np.ndindex(*(2 * b + 1 for b in bv)):
        jj = tuple(int(c - b) for c, b in zip(j, bv))
        phase = -float(np.dot(jj, center))
        entries[jj] = np.exp(1j * phase) / lambda_weight(jj, params.r)
    return KorobovElement(params, FourierCoefficients.make(params.d, entries))


@dataclass(frozen=True)
class ReproducingCheck:
    inner_value: complex
    point_value: complex
    truncated: bool  # box did not contain the support of g


def reproducing_check(f: KorobovElement, x, box) -> ReproducingCheck:
    """Compare (f, K(., x)) against the pointwise value f(x).

    Both are computed exactly from finite sums; they agree to rounding when
    the box contains the support of g.  A smaller box is reported through the
    ``truncated`` flag rather than an error.
    """
    f.params.require_l2()
    bv = _box_vector(box, f.params.d)
    truncated = any(
        any(abs(c) > b for c, b in zip(j, bv)) for j in f.g.entries
    )
    kern = kernel_element(f.params, x, bv)
    inner = rkhs_inner(f, kern)
    point = evaluate(element_fourier(f, bv), x)
    return ReproducingCheck(inner_value=inner, point_value=point, truncated=truncated)


def element_to_json_dict(elem: KorobovElement) -> dict:
    return {"r": elem.params.r, "d": elem.params.d, "g": to_json_dict(elem.g)}


def element_from_json_dict(obj: dict) -> KorobovElement:
    params = KorobovParams(r=float(obj["r"]), d=int(obj["d"]))
    return KorobovElement(params, from_json_dict(obj["g"]))


def element_to_json(elem: KorobovElement) -> str:
    return json.dumps(element_to_json_dict(elem))


def element_from_json(text: str) -> KorobovElement:
    return element_from_json_dict(json.loads(text))
