"""Arithmetic in the quotient ring Z[x]/(x^n + 1) and its mod-q reductions.

Elements are coefficient vectors (c_0, ..., c_{n-1}) with x^n identified
with -1, so products wrap negacyclically.  The modulus is never stored on
the element; operations that reduce take it as an argument and return the
centered representative, which for odd m means every coefficient lies in
[-(m-1)/2, (m-1)/2].
"""

from __future__ import annotations

import numpy as np

# Dense products are accumulated in int64.  Stay well below the point
# where n * max|f| * max|g| could wrap; beyond it we fall back to exact
# object-dtype arithmetic.
_INT64_SAFE = 2**62


class Poly:
    """Immutable coefficient vector of an element of Z[x]/(x^n + 1)."""

    __slots__ = ("coeffs", "_absmax")

    def __init__(self, coeffs):
        a = np.array(coeffs, dtype=np.int64)
        if a.ndim != 1 or a.size == 0:
            raise ValueError("coefficients must be a non-empty 1-d sequence")
        a.flags.writeable = False
        self.coeffs = a
        self._absmax = None

    @classmethod
    def _wrap(cls, a: np.ndarray) -> "Poly":
        # internal fast path: takes ownership of a freshly allocated int64
        # array, skipping the defensive copy of __init__
        obj = cls.__new__(cls)
        a.flags.writeable = False
        obj.coeffs = a
        obj._absmax = None
        return obj

    @property
    def n(self) -> int:
        return len(self.coeffs)

    @classmethod
    def zero(cls, n: int) -> "Poly":
        return cls(np.zeros(n, dtype=np.int64))

    @classmethod
    def one(cls, n: int) -> "Poly":
        c = np.zeros(n, dtype=np.int64)
        c[0] = 1
        return cls(c)

    @classmethod
    def monomial(cls, n: int, j: int, c: int = 1) -> "Poly":
        """c * x^j as an element of the degree-n ring (0 <= j < n)."""
        if not 0 <= j < n:
            raise ValueError(f"monomial degree {j} outside 0..{n - 1}")
        v = np.zeros(n, dtype=np.int64)
        v[j] = c
        return cls(v)

    def as_list(self) -> list[int]:
        return self.coeffs.tolist()

    def as_tuple(self) -> tuple[int, ...]:
        return tuple(self.coeffs.tolist())

    def is_zero(self) -> bool:
        return not self.coeffs.any()

    def __eq__(self, other) -> bool:
        if not isinstance(other, Poly):
            return NotImplemented
        return self.n == other.n and bool(np.array_equal(self.coeffs, other.coeffs))

    def __repr__(self) -> str:
        body = np.array2string(self.coeffs, threshold=16, separator=", ")
        return f"Poly({body})"


def _check_same_n(f: Poly, g: Poly) -> int:
    if f.n != g.n:
        raise ValueError(f"ring degree mismatch: {f.n} vs {g.n}")
    return f.n


def _center_array(a: np.ndarray, m: int) -> np.ndarray:
    # odd m only: the centered range [-(m-1)/2, (m-1)/2] is symmetric
    if m <= 0 or m % 2 == 0:
        raise ValueError(f"modulus must be a positive odd integer, got {m}")
    h = (m - 1) // 2
    return (a + h) % m - h


def _center_inplace(a: np.ndarray, m: int) -> np.ndarray:
    # same reduction as _center_array for an int64 array the caller owns
    if m <= 0 or m % 2 == 0:
        raise ValueError(f"modulus must be a positive odd integer, got {m}")
    h = (m - 1) // 2
    np.add(a, h, out=a)
    np.remainder(a, m, out=a)
    np.subtract(a, h, out=a)
    return a


def center_mod(f: Poly, m: int) -> Poly:
    """Reduce every coefficient to its centered representative mod m."""
    return Poly._wrap(_center_array(f.coeffs, m))


def add(f: Poly, g: Poly, q: int | None = None) -> Poly:
    """f + g, centered mod q when q is given, exact over Z otherwise."""
    _check_same_n(f, g)
    s = f.coeffs + g.coeffs
    return Poly._wrap(s if q is None else _center_inplace(s, q))


def sub(f: Poly, g: Poly, q: int | None = None) -> Poly:
    _check_same_n(f, g)
    s = f.coeffs - g.coeffs
    return Poly._wrap(s if q is None else _center_inplace(s, q))


def neg(f: Poly) -> Poly:
    return Poly._wrap(-f.coeffs)


def scalar_mul(c: int, f: Poly, q: int | None = None) -> Poly:
    s = c * f.coeffs
    return Poly._wrap(s if q is None else _center_inplace(s, q))


def negacyclic_mul_schoolbook(f: Poly, g: Poly, q: int | None = None) -> Poly:
    """Reference product by the double loop over coefficient pairs.

    Runs on Python integers, so it can never overflow; the optimized
    paths below are required to match it bit for bit.
    """
    n = _check_same_n(f, g)
    fc = f.coeffs.tolist()
    gc = g.coeffs.tolist()
    out = [0] * n
    for i in range(n):
        fi = fc[i]
        if fi == 0:
            continue
        for j in range(n):
            gj = gc[j]
            if gj == 0:
                continue
            k = i + j
            if k < n:
                out[k] += fi * gj
            else:
                out[k - n] -= fi * gj  # x^n == -1
    if q is not None:
        h = (q - 1) // 2
        out = [(v + h) % q - h for v in out]
    return Poly(out)


def _fold_negacyclic(conv: np.ndarray, n: int) -> np.ndarray:
    res = conv[:n].copy()
    res[: len(conv) - n] -= conv[n:]
    return res


def negacyclic_mul_dense(f: Poly, g: Poly, q: int | None = None) -> Poly:
    """Product via full linear convolution followed by the x^n -> -1 fold."""
    n = _check_same_n(f, g)
    fa = f.coeffs
    ga = g.coeffs
    fmax = norm_inf(f)
    gmax = norm_inf(g)
    if fmax and gmax and n * fmax * gmax >= _INT64_SAFE:
        # exact big-integer fallback, exercised only for oversized inputs
        conv = np.convolve(fa.astype(object), ga.astype(object))
        res = _fold_negacyclic(conv, n)
        if q is not None:
            h = (q - 1) // 2
            res = (res + h) % q - h
        # Poly construction raises OverflowError rather than wrapping if
        # the exact result does not fit the int64 coefficient type
        return Poly(res.tolist())
    conv = np.convolve(fa, ga)
    res = _fold_negacyclic(conv, n)
    return Poly._wrap(res if q is None else _center_inplace(res, q))


def negacyclic_mul_sparse(f: Poly, g: Poly, q: int | None = None) -> Poly:
    """Product iterating only the non-zero coefficients of g.

    Intended for ternary or product-form operands; cost is
    O(n * weight(g)) shifted additions.
    """
    n = _check_same_n(f, g)
    acc = np.zeros(n, dtype=np.int64)
    fa = f.coeffs
    for j in np.flatnonzero(g.coeffs):
        j = int(j)
        c = int(g.coeffs[j])
        if j == 0:
            acc += c * fa
        else:
            acc[j:] += c * fa[: n - j]
            acc[:j] -= c * fa[n - j :]  # wrapped terms pick up the sign flip
    return Poly._wrap(acc if q is None else _center_inplace(acc, q))


def negacyclic_mul(f: Poly, g: Poly, q: int | None = None) -> Poly:
    """Negacyclic product f * g, dispatching on operand weight.

    A sparse operand (at most n/4 non-zero coefficients) is routed to the
    shifted-addition path; everything else goes through the dense
    convolution.  Both agree exactly with negacyclic_mul_schoolbook.
    """
    n = _check_same_n(f, g)
    wf = int(np.count_nonzero(f.coeffs))
    wg = int(np.count_nonzero(g.coeffs))
    threshold = max(1, n // 4)
    if min(wf, wg) <= threshold:
        if wf < wg:
            f, g = g, f
        return negacyclic_mul_sparse(f, g, q)
    return negacyclic_mul_dense(f, g, q)


def invert_mod_q(f: Poly, q: int) -> Poly | None:
    """Inverse of f in Z_q[x]/(x^n + 1) for prime q, or None.

    Extended Euclid on (f, x^n + 1) over the field Z_q: keep the Bezout
    coefficient of f and divide by the final constant remainder.  Returns
    None when gcd(f, x^n + 1) has positive degree, which KeyGen treats as
    a signal to redraw, not as a failure.
    """
    if q < 3 or q % 2 == 0:
        raise ValueError(f"modulus must be an odd prime, got {q}")
    n = f.n
    r0 = np.zeros(n + 1, dtype=np.int64)
    r0[0] = 1
    r0[n] = 1
    r1 = np.zeros(n + 1, dtype=np.int64)
    r1[:n] = f.coeffs % q
    v0 = np.zeros(n + 1, dtype=np.int64)
    v1 = np.zeros(n + 1, dtype=np.int64)
    v1[0] = 1
    vd0, vd1 = 0, 0  # degrees of v0, v1, kept to shorten slice updates

    nz = np.flatnonzero(r1[:n])
    if len(nz) == 0:
        return None
    d0, d1 = n, int(nz[-1])
    while True:
        inv_lead = pow(int(r1[d1]), q - 2, q)
        d = d0
        while d >= d1:
            c = (int(r0[d]) * inv_lead) % q
            if c:
                sh = d - d1
                r0[sh : d + 1] = (r0[sh : d + 1] - c * r1[: d1 + 1]) % q
                hi = sh + vd1
                v0[sh : hi + 1] = (v0[sh : hi + 1] - c * v1[: vd1 + 1]) % q
                if hi > vd0:
                    vd0 = hi
            d -= 1
        nz = np.flatnonzero(r0[:d1])
        if len(nz) == 0:
            break  # remainder vanished; r1 is the gcd
        r0, r1 = r1, r0
        v0, v1 = v1, v0
        vd0, vd1 = vd1, vd0
        d0, d1 = d1, int(nz[-1])
        if d1 == 0:
            break
    if d1 != 0 or r1[0] % q == 0:
        return None
    g_inv = pow(int(r1[0]), q - 2, q)
    out = (v1 * g_inv) % q
    res = out[:n].copy()
    res[0] = (res[0] - out[n]) % q  # fold the possible x^n term
    return Poly(_center_array(res, q))


def reduce_mod_p(f: Poly, p: int) -> Poly:
    """Centered reduction of every coefficient mod the small modulus p."""
    if p < 3 or p % 2 == 0:
        raise ValueError(f"small modulus must be odd and >= 3, got {p}")
    return center_mod(f, p)


def norm_inf(f: Poly) -> int:
    # memoized on the instance: the coefficient vector is immutable
    v = f._absmax
    if v is None:
        a = f.coeffs
        v = max(-int(a.min()), int(a.max()))
        f._absmax = v
    return v


def norm_l1(f: Poly) -> int:
    return int(np.abs(f.coeffs).sum())


def norm_l2_centered(f: Poly) -> float:
    """Centered Euclidean norm sqrt(sum (f_i - mean(f))^2)."""
    c = f.coeffs.astype(np.float64)
    c -= c.mean()
    return float(np.sqrt(np.dot(c, c)))
