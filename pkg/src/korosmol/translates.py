"""Interpolation-type operators built from kernel translates, and their aliasing algebra.

The central univariate operator at bandwidth m sends f = kappa_r * g to

    Q_m(f) = (2m+1)^{-1} sum_{l=0}^{2m} S_m(g)(2 pi l / (2m+1)) kappa_r(. - 2 pi l / (2m+1)),

a combination of 2m+1 equispaced kernel translates weighted by samples of the
projected source S_m(g).  Sampling on 2m+1 points identifies frequencies
congruent modulo 2m+1, so the same operator has the exact Fourier expansion

    Q_m(f)^(j) = g^(alias(j, m)) * w_j^{-1}   for every j in Z,

where alias(j, m) is the unique representative of j modulo 2m+1 in [-m, m]
and only in-band source coefficients (|alias| <= m) contribute.  Both
representations are exposed; the aliased expansion is the analysis and
testing side, the translate combination the synthesis side.

Derived operator families: T_{-1} = identity, T_k = I - Q_{2^k}, and the
dyadic increments R_0 = Q_1, R_k = Q_{2^k} - Q_{2^(k-1)} (= T_{k-1} - T_k),
with tensorized versions acting coordinatewise.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import numpy as np
from scipy.special import zeta as _hurwitz

from .caps import check_values
from .fourier import FourierCoefficients, _box_vector, fourier_project, sample_grid
from .korobov import KorobovElement, KorobovParams, kappa_values

# ---------------------------------------------------------------------------
# nodes and translate combinations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RationalNode:
    """A grid point of T^d stored per coordinate as a reduced fraction of 2pi.

    The coordinate fractions are canonical (0 <= s/q < 1, gcd(s, q) = 1), so
    node equality is exact integer equality and coincident points from
    different grids deduplicate reliably.
    """

    fracs: tuple[Fraction, ...]

    @classmethod
    def from_indices(cls, svec, qvec) -> "RationalNode":
        fr = []
        for s, q in zip(svec, qvec):
            if q < 1 or not 0 <= s < q:
                raise ValueError(f"node index {s}/{q} out of range")
            fr.append(Fraction(int(s), int(q)))
        return cls(fracs=tuple(fr))

    @property
    def d(self) -> int:
        return len(self.fracs)

    def angles(self) -> np.ndarray:
        """The point 2 pi (s_1/q_1, ..., s_d/q_d) as floats."""
        return 2.0 * math.pi * np.array([float(f) for f in self.fracs])

    def pairs(self) -> list[list[int]]:
        return [[f.numerator, f.denominator] for f in self.fracs]

    def sort_key(self) -> tuple:
        # interleaved (q_1, s_1, q_2, s_2, ...)
        key = []
        for f in self.fracs:
            key.extend((f.denominator, f.numerator))
        return tuple(key)


@dataclass(frozen=True)
class TranslateCombination:
    """A combination sum_l c_l kappa_{r,d}(. - y_l) of kernel translates.

    Nodes are pairwise distinct after merging; the empty combination is the
    zero function.  Coefficients are real for real-valued sources and may be
    complex otherwise (complex combinations are not serializable).
    """

    params: KorobovParams
    terms: tuple[tuple[RationalNode, complex], ...]

    @classmethod
    def make(cls, params: KorobovParams, raw) -> "TranslateCombination":
        merged: dict[RationalNode, complex] = {}
        for node, c in raw:
            if node.d != params.d:
                raise ValueError(f"node dimension {node.d} != {params.d}")
            c = complex(c)
            if not (math.isfinite(c.real) and math.isfinite(c.imag)):
                raise ValueError("coefficients must be finite")
            merged[node] = merged.get(node, 0) + c
        terms = tuple(
            (n, merged[n])
            for n in sorted(merged, key=RationalNode.sort_key)
            if merged[n] != 0
        )
        return cls(params=params, terms=terms)

    def is_real(self, tol: float = 0.0) -> bool:
        return all(abs(c.imag) <= tol for _, c in self.terms)

    def nodes(self) -> list[RationalNode]:
        return [n for n, _ in self.terms]

    def evaluate(self, points, tol: float = 1e-10) -> np.ndarray:
        """Pointwise values at an (npoints, d) array via kernel evaluation (r > 1)."""
        self.params.require_pointwise()
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None] if self.params.d == 1 else pts[None, :]
        if not self.terms:
            return np.zeros(pts.shape[0], dtype=complex)
        ang = np.array([n.angles() for n, _ in self.terms])  # (nterm, d)
        cs = np.array([c for _, c in self.terms])
        args = pts[:, None, :] - ang[None, :, :]  # (npt, nterm, d)
        kv = kappa_values(args, self.params.r)
        return np.prod(kv, axis=2) @ cs


def combination_to_json_dict(combo: TranslateCombination) -> dict:
    if not combo.is_real(tol=0.0):
        raise ValueError("only real-coefficient combinations serialize to JSON")
    return {
        "r": combo.params.r,
        "d": combo.params.d,
        "terms": [
            {"node": node.pairs(), "c": float(c.real)} for node, c in combo.terms
        ],
    }


def combination_from_json_dict(obj: dict) -> TranslateCombination:
    params = KorobovParams(r=float(obj["r"]), d=int(obj["d"]))
    raw = []
    for t in obj["terms"]:
        node = RationalNode.from_indices(
            [p[0] for p in t["node"]], [p[1] for p in t["node"]]
        )
        raw.append((node, float(t["c"])))
    return TranslateCombination.make(params, raw)


def combination_to_json(combo: TranslateCombination) -> str:
    return json.dumps(combination_to_json_dict(combo))


def combination_from_json(text: str) -> TranslateCombination:
    return combination_from_json_dict(json.loads(text))


# ---------------------------------------------------------------------------
# aliasing arithmetic
# ---------------------------------------------------------------------------


def alias_rep(j: int, m: int) -> int:
    """The unique j' congruent to j modulo 2m+1 with |j'| <= m."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    return (j + m) % (2 * m + 1) - m


@dataclass(frozen=True)
class AliasedExpansion:
    """One period of the aliased source sequence b of a tensor operator.

    ``base[i_1, ..., i_d]`` is b at the residue class (i_1, ..., i_d) modulo
    (2m_1+1, ..., 2m_d+1); b is periodic, b_(j + 2m+1) = b_j per coordinate,
    and equals the in-band source coefficient at the aliased index.
    """

    m: tuple[int, ...]
    base: np.ndarray

    def b(self, j) -> complex:
        jv = (int(j),) if isinstance(j, (int, np.integer)) else tuple(int(c) for c in j)
        idx = tuple(c % (2 * mm + 1) for c, mm in zip(jv, self.m))
        return complex(self.base[idx])


def _mvec(m, d: int) -> tuple[int, ...]:
    mv = (int(m),) * d if isinstance(m, (int, np.integer)) else tuple(int(x) for x in m)
    if len(mv) != d:
        raise ValueError(f"bandwidth vector {mv} does not match dimension {d}")
    if any(x < 1 for x in mv):
        raise ValueError(f"bandwidths must be >= 1, got {mv}")
    return mv


def aliased_expansion(elem: KorobovElement, m) -> AliasedExpansion:
    """The periodic b-array of the tensor operator at bandwidths m."""
    mv = _mvec(m, elem.params.d)
    shape = tuple(2 * mm + 1 for mm in mv)
    base = np.zeros(shape, dtype=complex)
    for j, v in elem.g.entries.items():
        if all(abs(c) <= mm for c, mm in zip(j, mv)):
            base[tuple(c % s for c, s in zip(j, shape))] = v
    return AliasedExpansion(m=mv, base=base)


def tensor_q_translates(elem: KorobovElement, m) -> TranslateCombination:
    """Translate form of the tensor operator applied to ``elem``.

    Projects the source to the band, samples it on the (2m_l+1) tensor grid
    by exact inverse DFT, and attaches the sample values (scaled by the grid
    size) as translate coefficients.
    """
    mv = _mvec(m, elem.params.d)
    qv = tuple(2 * mm + 1 for mm in mv)
    proj = fourier_project(elem.g, mv)
    sig = sample_grid(proj, qv)
    coefs = sig.values / math.prod(qv)
    if elem.g.real_valued:
        scale = max(elem.g.abs_sum(), 1.0)
        resid = float(np.max(np.abs(coefs.imag))) if coefs.size else 0.0
        if resid > 1e-12 * scale:
            raise AssertionError(
                f"internal consistency: real source produced imaginary "
                f"coefficient residue {resid:.2e}"
            )
        coefs = coefs.real.astype(complex)
    raw = []
    for svec in np.ndindex(*qv):
        c = coefs[svec]
        if c != 0:
            raw.append((RationalNode.from_indices(svec, qv), c))
    return TranslateCombination.make(elem.params, raw)


def qm_translates(elem: KorobovElement, m: int) -> TranslateCombination:
    """Univariate translate form at bandwidth m (2m+1 equispaced nodes)."""
    if elem.params.d != 1:
        raise ValueError("qm_translates is univariate; use tensor_q_translates")
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    return tensor_q_translates(elem, (m,))


def qm_eval_exact(elem: KorobovElement, m: int, points, tol: float = 1e-12) -> np.ndarray:
    """Pointwise values of the full aliased expansion of the univariate operator.

    Sums the expansion over all of Z in closed form: the lattice of aliases
    of each in-band source resums to weighted kernel values at the 2m+1 grid
    shifts.  Weights come from direct trigonometric sums of the source
    coefficients (no FFT, no node reduction), which keeps this path
    independent of the synthesis route it is used to check.
    """
    if elem.params.d != 1:
        raise ValueError("qm_eval_exact is univariate")
    elem.params.require_pointwise()
    s = 2 * m + 1
    pts = np.atleast_1d(np.asarray(points, dtype=float)).reshape(-1)
    band = [(j[0], v) for j, v in elem.g.entries.items() if abs(j[0]) <= m]
    if not band:
        return np.zeros(pts.shape[0], dtype=complex)
    ls = np.arange(s)
    weights = np.zeros(s, dtype=complex)
    for a, v in band:
        weights += v * np.exp(2j * math.pi * ls * a / s)
    weights /= s
    kv = kappa_values(pts[:, None] - 2.0 * math.pi * ls[None, :] / s, elem.params.r)
    return kv @ weights


# ---------------------------------------------------------------------------
# exact lattice sums (Hurwitz zeta)
# ---------------------------------------------------------------------------


def lattice_l2_sum(c: int, L: int, two_r: float) -> float:
    """sum over j congruent to c modulo L of max(|j|, 1)^(-two_r), exactly."""
    if two_r <= 1.0:
        raise ValueError("lattice sums require 2r > 1")
    cp = c % L
    if cp == 0:
        return 1.0 + 2.0 * L ** (-two_r) * float(_hurwitz(two_r, 1.0))
    cn = (-c) % L
    return L ** (-two_r) * float(_hurwitz(two_r, cp / L) + _hurwitz(two_r, cn / L))


def lattice_l2_tail(c: int, L: int, two_r: float, J: int) -> float:
    """Same lattice sum restricted to |j| > J."""
    if two_r <= 1.0:
        raise ValueError("lattice sums require 2r > 1")
    tot = 0.0
    for res in (c % L, (-c) % L):
        j0 = J + 1 + ((res - (J + 1)) % L)  # least j > J with j = res (mod L)
        tot += L ** (-two_r) * float(_hurwitz(two_r, j0 / L))
    return tot


def crt_pair_l2_sum(a1: int, s1: int, a2: int, s2: int, two_r: float) -> float:
    """sum of max(|j|,1)^(-two_r) over j = a1 (mod s1) and j = a2 (mod s2)."""
    g = gcd(s1, s2)
    if (a2 - a1) % g != 0:
        return 0.0
    L = s1 // g * s2
    t = ((a2 - a1) // g * pow(s1 // g, -1, s2 // g)) % (s2 // g)
    return lattice_l2_sum((a1 + s1 * t) % L, L, two_r)


# ---------------------------------------------------------------------------
# aliased Fourier expansions on a frequency box
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CertifiedCoefficients:
    """A boxed coefficient map plus an upper bound on the omitted L2 mass."""

    coeffs: FourierCoefficients
    tail_l2: float
    box: tuple[int, ...]


def _box_tail(elem: KorobovElement, mv: tuple[int, ...], Jv: tuple[int, ...]) -> float:
    """Exact L2 mass of the tensor-operator output outside the box |j_l| <= J_l.

    Distinct in-band sources alias to disjoint frequency lattices, so their
    squared masses add; per source the inside/outside split factorizes over
    coordinates into one-dimensional lattice sums.
    """
    two_r = 2.0 * elem.params.r
    svec = tuple(2 * mm + 1 for mm in mv)
    total = 0.0
    for a, v in elem.g.entries.items():
        if any(abs(c) > mm for c, mm in zip(a, mv)):
            continue
        full, tails = [], []
        for c, L, J in zip(a, svec, Jv):
            z = lattice_l2_sum(c, L, two_r)
            full.append(z)
            tails.append(lattice_l2_tail(c, L, two_r, J))
        inside = math.prod(f - t for f, t in zip(full, tails))
        total += abs(v) ** 2 * (math.prod(full) - inside)
    return math.sqrt(max(total, 0.0))


def qm_fourier(
    elem: KorobovElement, m: int, J: int, cap: int | None = None
) -> CertifiedCoefficients:
    """Aliased Fourier expansion of the univariate operator on |j| <= J.

    Entries are g^(alias(j, m)) w_j^{-1}; ``tail_l2`` is the exact L2 mass of
    the omitted |j| > J part (computed by lattice sums, hence no larger than
    the crude envelope max|g^| sqrt(2 J^(1-2r) / (2r-1))).
    """
    if elem.params.d != 1:
        raise ValueError("qm_fourier is univariate; use apply_tensor")
    if J < m:
        raise ValueError(f"J = {J} must be at least m = {m}")
    elem.params.require_l2()
    mv = _mvec(m, 1)
    s = 2 * m + 1
    r = elem.params.r
    check_values(2 * J + 1, f"frequency box [-{J}, {J}]", override=cap)
    entries: dict[tuple[int, ...], complex] = {}
    for (a,), v in elem.g.entries.items():
        if abs(a) > m:
            continue
        js = np.arange(-((J + a) // s), (J - a) // s + 1) * s + a
        for j in js:
            entries[(int(j),)] = v * max(abs(int(j)), 1.0) ** (-r)
    coeffs = FourierCoefficients.make(1, entries, real_valued=elem.g.real_valued)
    return CertifiedCoefficients(
        coeffs=coeffs, tail_l2=_box_tail(elem, mv, (J,)), box=(J,)
    )


# descriptor tokens for per-coordinate operator factors
OP_I = ("I",)


def op_q(m: int) -> tuple:
    return ("Q", int(m))


def op_t(k: int) -> tuple:
    return ("T", int(k))


def op_r(k: int) -> tuple:
    return ("R", int(k))


def _univariate_action(op: tuple, a: int, J: int) -> tuple[np.ndarray, np.ndarray]:
    """Target indices/values of one operator factor applied to the mode at a.

    Returns (idx, val) with idx inside [-J, J]; values are the signed alias
    multiplicities of the factor.
    """
    kind = op[0]
    if kind == "I":
        if abs(a) <= J:
            return np.array([a]), np.array([1.0])
        return np.array([], dtype=int), np.array([])
    if kind == "Q":
        m = op[1]
        if abs(a) > m:
            return np.array([], dtype=int), np.array([])
        s = 2 * m + 1
        js = np.arange(-((J + a) // s), (J - a) // s + 1) * s + a
        return js, np.ones(len(js))
    if kind == "T":
        k = op[1]
        if k < -1:
            raise ValueError(f"T-level must be >= -1, got {k}")
        if k == -1:
            return _univariate_action(OP_I, a, J)
        return _combine(
            [(1.0, _univariate_action(OP_I, a, J)),
             (-1.0, _univariate_action(op_q(2**k), a, J))]
        )
    if kind == "R":
        k = op[1]
        if k < 0:
            raise ValueError(f"R-level must be >= 0, got {k}")
        if k == 0:
            return _univariate_action(op_q(1), a, J)
        return _combine(
            [(1.0, _univariate_action(op_q(2**k), a, J)),
             (-1.0, _univariate_action(op_q(2 ** (k - 1)), a, J))]
        )
    raise ValueError(f"unknown operator token {op!r}")


def _combine(parts) -> tuple[np.ndarray, np.ndarray]:
    """Signed union of (index, value) actions, coalescing duplicate indices."""
    idx = np.concatenate([p[0] for _, p in parts]).astype(int)
    val = np.concatenate([sign * p[1] for sign, p in parts])
    if len(idx) == 0:
        return idx, val
    uniq, inv = np.unique(idx, return_inverse=True)
    acc = np.zeros(len(uniq))
    np.add.at(acc, inv, val)
    keep = acc != 0
    return uniq[keep], acc[keep]


def apply_tensor(
    elem: KorobovElement, ops, J, cap: int | None = None
) -> FourierCoefficients:
    """Apply a tensor product of per-coordinate operator factors, boxed at J.

    ``ops`` is one descriptor per coordinate from {("I",), ("Q", m), ("T", k),
    ("R", k)}; the aliasing action factorizes over coordinates, mixed factors
    included.  Output frequencies are restricted to |j_l| <= J_l.
    """
    d = elem.params.d
    elem.params.require_l2()
    ops = tuple(ops)
    if len(ops) != d:
        raise ValueError(f"{len(ops)} descriptors for dimension {d}")
    from .fourier import _box_vector

    Jv = _box_vector(J, d)
    r = elem.params.r
    strides = np.array([2 * j + 1 for j in Jv], dtype=np.int64)
    keys, vals = [], []
    for a, v in elem.g.entries.items():
        parts = [_univariate_action(op, c, jl) for op, c, jl in zip(ops, a, Jv)]
        if any(len(p[0]) == 0 for p in parts):
            continue
        contrib = math.prod(len(p[0]) for p in parts)
        check_values(contrib, "tensor operator expansion", override=cap)
        grid_idx = np.meshgrid(*[p[0] for p in parts], indexing="ij")
        grid_val = np.meshgrid(*[p[1] for p in parts], indexing="ij")
        key = np.zeros(grid_idx[0].shape, dtype=np.int64)
        val = np.full(grid_idx[0].shape, v, dtype=complex)
        for l in range(d):
            key = key * strides[l] + (grid_idx[l] + Jv[l])
            val = val * grid_val[l]
            val = val * np.maximum(np.abs(grid_idx[l]), 1.0) ** (-r)
        keys.append(key.ravel())
        vals.append(val.ravel())
    if not keys:
        return FourierCoefficients.make(d, {}, real_valued=elem.g.real_valued)
    allk = np.concatenate(keys)
    allv = np.concatenate(vals)
    uniq, inv = np.unique(allk, return_inverse=True)
    acc = np.zeros(len(uniq), dtype=complex)
    np.add.at(acc, inv, allv)
    entries = {}
    for code, amp in zip(uniq, acc):
        if amp == 0:
            continue
        jj = []
        rem = int(code)
        for l in range(d - 1, -1, -1):
            rem, off = divmod(rem, int(strides[l]))
            jj.append(off - Jv[l])
        entries[tuple(reversed(jj))] = complex(amp)
    return FourierCoefficients.make(d, entries, real_valued=elem.g.real_valued)


def apply_T(elem: KorobovElement, k: int, J: int) -> FourierCoefficients:
    """T_k = I - Q_{2^k} on the box (T_{-1} is the identity)."""
    if k < -1:
        raise ValueError(f"T-level must be >= -1, got {k}")
    from .korobov import element_fourier

    if k == -1:
        return element_fourier(elem, J)
    if J < 2 ** max(k, 0):
        raise ValueError(f"J = {J} must cover the bandwidth 2^{k}")
    return element_fourier(elem, J) - qm_fourier(elem, 2**k, J).coeffs


def apply_R(elem: KorobovElement, k: int, J: int) -> FourierCoefficients:
    """Dyadic increment R_0 = Q_1, R_k = Q_{2^k} - Q_{2^(k-1)} on the box."""
    if k < 0:
        raise ValueError(f"R-level must be >= 0, got {k}")
    if J < 2**k:
        raise ValueError(f"J = {J} must cover the bandwidth 2^{k}")
    if k == 0:
        return qm_fourier(elem, 1, J).coeffs
    return qm_fourier(elem, 2**k, J).coeffs - qm_fourier(elem, 2 ** (k - 1), J).coeffs
