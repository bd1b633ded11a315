"""Univariate polynomial tools: Sturm chains, real-root isolation, small
polynomial-matrix determinants.

Coefficients are stored ascending (c[0] + c[1] x + ...).  Roots are found by
Sturm-count bisection to isolating intervals followed by a safeguarded
Newton polish; no eigenvalue machinery is involved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

TRIM_REL_TOL = 1e-14
ROOT_DEDUP_TOL = 1e-10
MAX_BISECTIONS = 60


def trim(coeffs) -> np.ndarray:
    """Drop trailing coefficients below 1e-14 of the largest magnitude."""
    c = np.atleast_1d(np.asarray(coeffs, dtype=float))
    top = np.max(np.abs(c)) if c.size else 0.0
    if top == 0.0:
        return np.zeros(1)
    keep = np.nonzero(np.abs(c) > TRIM_REL_TOL * top)[0]
    return c[: keep[-1] + 1].copy()


def polyval(coeffs, x):
    """Horner evaluation; x may be a scalar or an ndarray."""
    c = np.asarray(coeffs, dtype=float)
    if np.isscalar(x) or np.ndim(x) == 0:
        acc = 0.0
        for ck in c[::-1]:
            acc = acc * x + ck
        return acc
    acc = np.zeros(np.shape(x))
    for ck in c[::-1]:
        acc = acc * x + ck
    return acc


def polyder(coeffs) -> np.ndarray:
    c = np.asarray(coeffs, dtype=float)
    if c.size <= 1:
        return np.zeros(1)
    return c[1:] * np.arange(1, c.size)


def polymul(a, b) -> np.ndarray:
    return np.convolve(np.asarray(a, dtype=float), np.asarray(b, dtype=float))


def polyadd(a, b) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n = max(a.size, b.size)
    out = np.zeros(n)
    out[: a.size] += a
    out[: b.size] += b
    return out


def polysub(a, b) -> np.ndarray:
    return polyadd(a, -np.asarray(b, dtype=float))


def polydivmod(a, b) -> tuple[np.ndarray, np.ndarray]:
    """Long division a = q*b + r with deg r < deg b."""
    a = trim(a)
    b = trim(b)
    if b.size == 1 and b[0] == 0.0:
        raise ZeroDivisionError("polynomial division by zero")
    if a.size < b.size:
        return np.zeros(1), a.copy()
    r = a.copy()
    q = np.zeros(a.size - b.size + 1)
    lead = b[-1]
    for k in range(a.size - b.size, -1, -1):
        f = r[k + b.size - 1] / lead
        q[k] = f
        r[k : k + b.size] -= f * b
    return q, trim(r[: b.size - 1] if b.size > 1 else np.zeros(1))


def cauchy_bound(coeffs) -> float:
    """1 + max |c_i / c_lead|; all real roots lie within this radius."""
    c = trim(coeffs)
    if c.size <= 1:
        return 1.0
    return 1.0 + float(np.max(np.abs(c[:-1])) / abs(c[-1]))


@dataclass(frozen=True)
class UnivariatePolynomial:
    """Trimmed ascending-coefficient polynomial."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = trim(self.coeffs)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        if self.coeffs.size == 1 and self.coeffs[0] == 0.0:
            return -1
        return self.coeffs.size - 1

    def __call__(self, x):
        return polyval(self.coeffs, x)

    def derivative(self) -> "UnivariatePolynomial":
        return UnivariatePolynomial(polyder(self.coeffs))

    def __mul__(self, other):
        return UnivariatePolynomial(polymul(self.coeffs, _coeffs_of(other)))

    def __add__(self, other):
        return UnivariatePolynomial(polyadd(self.coeffs, _coeffs_of(other)))

    def __sub__(self, other):
        return UnivariatePolynomial(polysub(self.coeffs, _coeffs_of(other)))


def _coeffs_of(p) -> np.ndarray:
    if isinstance(p, UnivariatePolynomial):
        return p.coeffs
    return np.atleast_1d(np.asarray(p, dtype=float))


def _horner(rc, x: float) -> float:
    """Evaluate descending plain-float coefficients; scalar hot path."""
    acc = 0.0
    for c in rc:
        acc = acc * x + c
    return acc


@dataclass
class SturmChain:
    """Sturm sequence of a polynomial; sign variations count distinct real roots."""

    chain: list
    _desc: list = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self._desc is None:
            self._desc = [c[::-1].tolist() for c in self.chain]

    def variations(self, x: float) -> int:
        prev = 0
        flips = 0
        for rc in self._desc:
            acc = 0.0
            for c in rc:
                acc = acc * x + c
            if acc == 0.0:
                continue
            sign = 1 if acc > 0.0 else -1
            if prev != 0 and sign != prev:
                flips += 1
            prev = sign
        return flips


def _rem_desc(num: list, den: list) -> list:
    """Descending-coefficient polynomial remainder, plain floats."""
    r = list(num)
    dn = len(den) - 1
    lead = den[0]
    for i in range(len(r) - dn):
        f = r[i] / lead
        if f != 0.0:
            for j in range(1, dn + 1):
                r[i + j] -= f * den[j]
    rem = r[len(r) - dn:]
    top = max((abs(v) for v in rem), default=0.0)
    while rem and abs(rem[0]) <= TRIM_REL_TOL * top:
        rem = rem[1:]
    return rem


def sturm_chain(p) -> SturmChain:
    """Canonical Sturm chain p, p', -rem(...), each scaled to unit max-norm."""
    a = trim(_coeffs_of(p))[::-1].tolist()
    top = max(abs(v) for v in a)
    if top > 0.0:
        a = [v / top for v in a]
    desc = [a]
    if len(a) > 1:
        n = len(a) - 1
        b = [v * (n - i) for i, v in enumerate(a[:-1])]
        top = max(abs(v) for v in b)
        b = [v / top for v in b]
        desc.append(b)
        while len(b) > 1 and len(desc) < len(desc[0]) + 2:
            rem = _rem_desc(a, b)
            if not rem:
                break
            top = max(abs(v) for v in rem)
            if top <= 1e-13:  # remainder vanished: gcd reached
                break
            rem = [-v / top for v in rem]
            desc.append(rem)
            a, b = b, rem
    return SturmChain(desc, desc)


def count_real_roots(chain: SturmChain, a: float, b: float) -> int:
    """Number of distinct real roots in (a, b]."""
    return chain.variations(a) - chain.variations(b)


def _newton_polish(rc: list, rd: list, x: float, lo: float, hi: float) -> float:
    """Safeguarded Newton iterations for a root of rc inside [lo, hi]."""
    fx = _horner(rc, x)
    flo = _horner(rc, lo)
    for _ in range(40):
        dx = _horner(rd, x)
        if dx == 0.0:
            break
        xn = x - fx / dx
        if not (lo <= xn <= hi):
            xn = 0.5 * (lo + hi)
        fn = _horner(rc, xn)
        if abs(fn) >= abs(fx) and abs(xn - x) < 1e-16 * max(1.0, abs(x)):
            break
        # keep the sign-change bracket tight when one exists
        if flo * fn < 0.0:
            hi = xn
        else:
            lo, flo = xn, fn
        if abs(fn) >= abs(fx):
            break
        x, fx = xn, fn
    return x


def isolate_and_refine(p, bracket: tuple[float, float] | None = None) -> np.ndarray:
    """All distinct real roots of p in the bracket, ascending.

    Isolating intervals come from Sturm-count bisection; each isolated root is
    then polished (bisection plus Newton).  Roots closer than 1e-10 are merged.
    The default bracket is the Cauchy bound, which contains every real root.
    """
    c = trim(_coeffs_of(p))
    if c.size <= 1:
        return np.zeros(0)
    if c.size == 2:
        root = -c[0] / c[1]
        if bracket is not None and not (bracket[0] < root <= bracket[1]):
            return np.zeros(0)
        return np.array([root])
    if bracket is None:
        r = cauchy_bound(c)
        bracket = (-r, r)
    chain = sturm_chain(c)
    a, b = float(bracket[0]), float(bracket[1])
    va, vb = chain.variations(a), chain.variations(b)
    total = va - vb
    if total <= 0:
        return np.zeros(0)

    rc = c[::-1].tolist()
    rd = polyder(c)[::-1].tolist()
    roots = []
    work = [(a, va, b, vb)]
    while work:
        lo, vlo, hi, vhi = work.pop()
        n = vlo - vhi
        if n <= 0:
            continue
        if n == 1:
            roots.append(_refine_single(rc, rd, chain, lo, hi))
            continue
        if hi - lo < 1e-13 * max(1.0, abs(lo), abs(hi)):
            roots.append(0.5 * (lo + hi))  # unresolvable cluster
            continue
        mid = _split_point(rc, lo, hi)
        vmid = chain.variations(mid)
        work.append((lo, vlo, mid, vmid))
        work.append((mid, vmid, hi, vhi))

    roots.sort()
    out = []
    for r in roots:
        if out and abs(r - out[-1]) <= ROOT_DEDUP_TOL * max(1.0, abs(r)):
            continue
        out.append(r)
    return np.array(out)


def _split_point(rc, lo, hi) -> float:
    """Midpoint of (lo, hi), nudged off any exact root of the polynomial.

    Sign-variation counts are undefined at a root of the polynomial itself
    (every chain element can vanish there), so splitting exactly on a root
    would lose the count for one side.
    """
    mid = 0.5 * (lo + hi)
    if _horner(rc, mid) != 0.0:
        return mid
    w = hi - lo
    for f in (1.2345678901e-4, 7.7777777e-3, 3.1415926e-2):
        m2 = mid + f * w
        if m2 < hi and _horner(rc, m2) != 0.0:
            return m2
    return mid


def _refine_single(rc, rd, chain, lo, hi) -> float:
    flo = _horner(rc, lo)
    fhi = _horner(rc, hi)
    if fhi == 0.0:
        return hi
    scale = max(1.0, abs(lo), abs(hi))
    if flo * fhi < 0.0:
        # sign bisection to a short bracket, then Newton finishes the job
        stop = 1e-7 * scale
        for _ in range(MAX_BISECTIONS):
            mid = 0.5 * (lo + hi)
            fm = _horner(rc, mid)
            if fm == 0.0:
                return mid
            if flo * fm < 0.0:
                hi, fhi = mid, fm
            else:
                lo, flo = mid, fm
            if hi - lo < stop:
                break
        return _newton_polish(rc, rd, 0.5 * (lo + hi), lo, hi)
    # even multiplicity: bisect on the Sturm count instead of the sign
    vlo = chain.variations(lo)
    stop = 1e-14 * scale
    for _ in range(MAX_BISECTIONS):
        mid = 0.5 * (lo + hi)
        if vlo - chain.variations(mid) >= 1:
            hi = mid
        else:
            lo = mid
        if hi - lo < stop:
            break
    return _newton_polish(rc, rd, 0.5 * (lo + hi), lo, hi)


def polymat_det3(m) -> UnivariatePolynomial:
    """Determinant of a 3x3 matrix of polynomials by cofactor expansion."""
    c = [[_coeffs_of(m[i][j]).tolist() if not isinstance(m[i][j], list) else m[i][j]
          for j in range(3)] for i in range(3)]
    return UnivariatePolynomial(np.asarray(_det3_coeffs(c)))


def _conv_list(a: list, b: list) -> list:
    out = [0.0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0.0:
            continue
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    return out


def _sub_list(a: list, b: list) -> list:
    if len(a) < len(b):
        a = a + [0.0] * (len(b) - len(a))
    out = list(a)
    for i, bi in enumerate(b):
        out[i] -= bi
    return out


def _det3_coeffs(c) -> list:
    m00 = _sub_list(_conv_list(c[1][1], c[2][2]), _conv_list(c[1][2], c[2][1]))
    m01 = _sub_list(_conv_list(c[1][0], c[2][2]), _conv_list(c[1][2], c[2][0]))
    m02 = _sub_list(_conv_list(c[1][0], c[2][1]), _conv_list(c[1][1], c[2][0]))
    det = _sub_list(_conv_list(c[0][0], m00), _conv_list(c[0][1], m01))
    neg = _conv_list(c[0][2], m02)
    if len(det) < len(neg):
        det = det + [0.0] * (len(neg) - len(det))
    for i, v in enumerate(neg):
        det[i] += v
    return det
