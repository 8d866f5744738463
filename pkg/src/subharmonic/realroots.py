"""Certified real-root isolation and the Sylvester matrix toolkit.

Exact mode works over Fraction coefficients: square-free decomposition
by Yun's algorithm, Sturm sequences built from sign-safe pseudo
remainders, and bisection refinement.  Multiplicities come from the
square-free factor index, so every later branch decision in the
Newton-Puiseux process rests on exact arithmetic whenever the input is
rational.

Numeric mode (mpf coefficients) decides simple-vs-multiple through the
discriminant with threshold 10^-(bits/8) and refuses to guess below it.

Sign convention
---------------
``sylvester(P1, P2)`` builds the (n+m) x (n+m) matrix whose first m
columns are shifted copies of P1's coefficients in descending order and
whose last n columns are shifted copies of P2's, i.e. for P1 = c - 1,
P2 = c - 3 the matrix is [[1, 1], [-1, -3]].  With this layout

    det Syl(P1, P2) = a0^m * b0^n * prod_{i,j} (c1_i - c2_j)

holds with no extra sign, where a0, b0 are the leading coefficients.
Every resultant/discriminant test in the suite refers to this one
convention.
"""

from fractions import Fraction
import math

import mpmath

from .errors import PrecisionExhausted


class RealPoly:
    """Univariate polynomial with real coefficients, ascending order."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        coeffs = list(coeffs)
        while coeffs and _is_zero(coeffs[-1]):
            coeffs.pop()
        self.coeffs = coeffs

    @classmethod
    def from_roots(cls, roots, domain=Fraction):
        p = cls([domain(1)])
        for r in roots:
            p = p * cls([-domain(r), domain(1)])
        return p

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def is_zero(self):
        return not self.coeffs

    def lc(self):
        return self.coeffs[-1]

    def __getitem__(self, i):
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return Fraction(0)

    def __eq__(self, other):
        return isinstance(other, RealPoly) and self.coeffs == other.coeffs

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        return RealPoly([self[i] + other[i] for i in range(n)])

    def __sub__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        return RealPoly([self[i] - other[i] for i in range(n)])

    def __neg__(self):
        return RealPoly([-c for c in self.coeffs])

    def __mul__(self, other):
        if isinstance(other, RealPoly):
            if self.is_zero() or other.is_zero():
                return RealPoly([])
            out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
            for i, a in enumerate(self.coeffs):
                if _is_zero(a):
                    continue
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
            return RealPoly(out)
        return RealPoly([c * other for c in self.coeffs])

    __rmul__ = __mul__

    def scale(self, s):
        return RealPoly([c * s for c in self.coeffs])

    def derivative(self):
        return RealPoly([i * c for i, c in enumerate(self.coeffs)][1:])

    def eval(self, x):
        total = 0
        for c in reversed(self.coeffs):
            total = total * x + c
        return total

    def divmod(self, other):
        """Exact division with remainder (field coefficients)."""
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        q = [Fraction(0)] * max(0, self.degree - other.degree + 1)
        r = list(self.coeffs)
        d = other.degree
        lc = other.lc()
        while len(r) - 1 >= d and r:
            k = len(r) - 1 - d
            c = r[-1] / lc
            q[k] = c
            for i in range(d + 1):
                r[k + i] -= c * other.coeffs[i]
            while r and _is_zero(r[-1]):
                r.pop()
        return RealPoly(q), RealPoly(r)

    def quo(self, other):
        q, r = self.divmod(other)
        if not r.is_zero():
            raise ValueError("inexact polynomial division")
        return q

    def monic(self):
        if self.is_zero():
            return self
        lc = self.lc()
        return RealPoly([c / lc for c in self.coeffs])

    def shift_down(self, m):
        """Divide by x^m (requires the low coefficients to vanish)."""
        assert all(_is_zero(c) for c in self.coeffs[:m])
        return RealPoly(self.coeffs[m:])

    def trailing_order(self):
        for i, c in enumerate(self.coeffs):
            if not _is_zero(c):
                return i
        return None

    def __repr__(self):
        return f"RealPoly({self.coeffs})"


def _is_zero(c):
    if isinstance(c, (int, Fraction)):
        return c == 0
    return c == 0


# ---------------------------------------------------------------------------
# exact gcd / square-free machinery (integer pseudo-remainder sequences)
# ---------------------------------------------------------------------------

def _to_int_poly(p):
    """Clear denominators; returns integer coefficient list (ascending)."""
    den = 1
    for c in p.coeffs:
        den = den * Fraction(c).denominator // math.gcd(den, Fraction(c).denominator)
    return [int(Fraction(c) * den) for c in p.coeffs]


def _int_content(cs):
    g = 0
    for c in cs:
        g = math.gcd(g, abs(c))
    return g or 1


def _int_primitive(cs):
    g = _int_content(cs)
    return [c // g for c in cs]


def _int_prem_abs(f, g):
    """Pseudo-remainder of integer polys scaled by |lc(g)|^(deg f - deg g + 1).

    The positive scale keeps the sign of the true remainder, which is
    what Sturm sign-variation counting needs.
    """
    f = list(f)
    dg = len(g) - 1
    lc = g[-1]
    steps = len(f) - len(g) + 1
    if steps <= 0:
        return list(f)
    scale = abs(lc)
    sgn = 1 if lc > 0 else -1
    for _ in range(steps):
        if len(f) - 1 < dg:
            # degree dropped early; keep scaling to preserve the total factor
            f = [scale * c for c in f]
            continue
        top = f[-1]
        f = [scale * c for c in f[:-1]]
        # subtract sgn*top * x^(shift) * g without its leading term
        shift = len(f) - dg
        for i in range(dg):
            f[shift + i] -= sgn * top * g[i]
        while f and f[-1] == 0:
            f.pop()
    return f


def poly_gcd(p, q):
    """Exact gcd over the rationals, returned primitive over the integers."""
    a = _int_primitive(_to_int_poly(p))
    b = _int_primitive(_to_int_poly(q))
    if len(a) < len(b):
        a, b = b, a
    while b:
        r = _int_prem_abs(a, b)
        r = _int_primitive(r) if r else []
        a, b = b, r
    if not a:
        return RealPoly([])
    if a[-1] < 0:
        a = [-c for c in a]
    return RealPoly([Fraction(c) for c in a])


def squarefree_decomposition(p):
    """Yun's algorithm: returns [(factor, multiplicity)] with factors primitive.

    The product of factor^multiplicity equals p up to a constant.
    """
    if p.degree <= 0:
        return []
    out = []
    g = poly_gcd(p, p.derivative())
    if g.degree == 0:
        return [(p.monic(), 1)]
    w = p.quo(g)
    y = p.derivative().quo(g)
    i = 1
    while w.degree > 0:
        z = y - w.derivative()
        f = poly_gcd(w, z) if not z.is_zero() else w
        if f.degree > 0:
            out.append((f.monic(), i))
        w = w.quo(f) if f.degree > 0 else w
        y = z.quo(f) if f.degree > 0 else z
        i += 1
    return out


# ---------------------------------------------------------------------------
# Sturm sequences and isolation
# ---------------------------------------------------------------------------

def sturm_chain(p):
    """Sign-safe Sturm chain of a square-free integer polynomial."""
    a = _int_primitive(_to_int_poly(p))
    b = _int_primitive(_to_int_poly(p.derivative()))
    chain = [a]
    if b:
        chain.append(b)
    while len(chain[-1]) > 1:
        r = _int_prem_abs(chain[-2], chain[-1])
        if not r:
            break
        r = [-c for c in _int_primitive(r)]
        chain.append(r)
    return chain


def _eval_int(cs, x):
    total = Fraction(0)
    for c in reversed(cs):
        total = total * x + c
    return total


def _variations_at(chain, x):
    signs = []
    for cs in chain:
        v = _eval_int(cs, x)
        if v != 0:
            signs.append(1 if v > 0 else -1)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def sturm_count(p, lo, hi, chain=None):
    """Number of distinct real roots of square-free p in (lo, hi]."""
    if chain is None:
        chain = sturm_chain(p)
    return _variations_at(chain, lo) - _variations_at(chain, hi)


def root_bound(p):
    """Cauchy bound: all real roots lie in (-B, B)."""
    lc = abs(Fraction(p.lc()))
    m = max(abs(Fraction(c)) for c in p.coeffs[:-1]) if p.degree > 0 else 0
    b = 1 + m / lc
    n = b.numerator // b.denominator + 1
    return Fraction(n)


def _isolate_squarefree(p):
    """Disjoint isolating intervals (lo, hi) for the real roots of
    square-free p, each containing exactly one root with sign change."""
    if p.degree == 0:
        return []
    chain = sturm_chain(p)
    bound = root_bound(p)
    out = []

    def rec(lo, hi, nlo, nhi):
        count = nlo - nhi
        if count == 0:
            return
        if count == 1:
            # ensure a sign change for bisection refinement later
            flo, fhi = p.eval(lo), p.eval(hi)
            while flo == 0 or fhi == 0 or (flo > 0) == (fhi > 0):
                mid = (lo + hi) / 2
                fm = p.eval(mid)
                if fm == 0:
                    out.append((mid, mid))
                    return
                nm = _variations_at(chain, mid)
                if nlo - nm == 1:
                    hi, nhi, fhi = mid, nm, fm
                else:
                    lo, nlo, flo = mid, nm, fm
                flo, fhi = p.eval(lo), p.eval(hi)
            out.append((lo, hi))
            return
        mid = (lo + hi) / 2
        if p.eval(mid) == 0:
            out.append((mid, mid))
            # shrink an interval around the exact root before recursing
            eps = Fraction(1, 2)
            while p.eval(mid - eps) == 0 or p.eval(mid + eps) == 0 or \
                    sturm_count(p, mid - eps, mid + eps, chain) != 1:
                eps /= 2
            rec(lo, mid - eps, nlo, _variations_at(chain, mid - eps))
            rec(mid + eps, hi, _variations_at(chain, mid + eps), nhi)
            return
        nm = _variations_at(chain, mid)
        rec(lo, mid, nlo, nm)
        rec(mid, hi, nm, nhi)

    rec(-bound, bound, _variations_at(chain, -bound),
        _variations_at(chain, bound))
    return sorted(out)


def refine_root(p, lo, hi, width):
    """Bisect a sign-change interval of p down to the requested width."""
    if lo == hi:
        return lo, hi
    flo = p.eval(lo)
    while hi - lo > width:
        mid = (lo + hi) / 2
        fm = p.eval(mid)
        if fm == 0:
            return mid, mid
        if (flo > 0) != (fm > 0):
            hi = mid
        else:
            lo, flo = mid, fm
    return lo, hi


def _rational_roots(p):
    """All rational roots of an integer-coefficient polynomial, with the
    deflated cofactor.  Gives up (returns None) on huge divisor sets."""
    cs = _int_primitive(_to_int_poly(p))
    a0 = cs[0]
    an = cs[-1]
    if a0 == 0:
        return None  # caller strips zero roots first
    ps = _divisors(abs(a0))
    qs = _divisors(abs(an))
    if len(ps) * len(qs) > 4000:
        return None
    roots = []
    poly = RealPoly([Fraction(c) for c in cs])
    for q in qs:
        for pnum in ps:
            for cand in (Fraction(pnum, q), Fraction(-pnum, q)):
                while poly.degree >= 1 and poly.eval(cand) == 0:
                    roots.append(cand)
                    poly = poly.quo(RealPoly([-cand, Fraction(1)]))
    return roots, poly


def _divisors(n):
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            if d != n // d:
                out.append(n // d)
        d += 1
    return sorted(out)


class RootRecord:
    """One real root: exact rational value or a certified interval."""

    __slots__ = ("value", "interval", "multiplicity", "is_zero_root",
                 "is_rational")

    def __init__(self, value, multiplicity, interval=None, is_rational=True):
        self.value = value
        self.multiplicity = multiplicity
        self.interval = interval
        self.is_rational = is_rational
        self.is_zero_root = _is_zero(value) and is_rational

    def sort_key(self):
        if self.is_rational:
            return Fraction(self.value)
        return Fraction(self.interval[0] + self.interval[1], 2)

    def midpoint(self, prec=53):
        if self.is_rational:
            v = Fraction(self.value)
            with mpmath.workprec(prec):
                return mpmath.mpf(v.numerator) / v.denominator
        lo, hi = self.interval
        m = (lo + hi) / 2
        with mpmath.workprec(prec):
            return mpmath.mpf(m.numerator) / m.denominator

    def __repr__(self):
        if self.is_rational:
            return f"RootRecord({self.value}, m={self.multiplicity})"
        return f"RootRecord([{self.interval[0]}, {self.interval[1]}], m={self.multiplicity})"


def isolate_real_roots(p, bits=256, refine_bits=None):
    """All real roots of p with multiplicities.

    Exact path for Fraction coefficients; numeric path (see
    :func:`isolate_real_roots_numeric`) for mpf coefficients.
    """
    if p.is_zero():
        raise ValueError("cannot isolate roots of the zero polynomial")
    if p.coeffs and isinstance(p.coeffs[0], (mpmath.mpf, mpmath.mpc, float)):
        return isolate_real_roots_numeric(p, bits=bits)
    if refine_bits is None:
        refine_bits = bits
    out = []
    m = p.trailing_order()
    if m:
        out.append(RootRecord(Fraction(0), m))
        p = p.shift_down(m)
    if p.degree == 0:
        return out
    width = Fraction(1, 2 ** refine_bits)
    for factor, mult in squarefree_decomposition(p):
        rr = _rational_roots(factor)
        remaining = factor
        if rr is not None:
            roots, remaining = rr
            for r in roots:
                out.append(RootRecord(r, mult))
        if remaining.degree >= 1:
            for lo, hi in _isolate_squarefree(remaining):
                if lo == hi:
                    out.append(RootRecord(lo, mult))
                else:
                    lo, hi = refine_root(remaining, lo, hi, width)
                    if lo == hi:
                        out.append(RootRecord(lo, mult))
                    else:
                        out.append(RootRecord(None, mult, interval=(lo, hi),
                                               is_rational=False))
    out.sort(key=RootRecord.sort_key)
    return out


def isolate_real_roots_numeric(p, bits=256):
    """Numeric-mode isolation: polyroots + discriminant certification."""
    with mpmath.workprec(bits):
        coeffs = [mpmath.mpf(c) for c in p.coeffs]
        scale = max(abs(c) for c in coeffs)
        lead_tol = mpmath.mpf(2) ** (-(bits // 2)) * scale
        while coeffs and abs(coeffs[-1]) <= lead_tol:
            coeffs.pop()
        if len(coeffs) <= 1:
            return []
        out = []
        m = 0
        while abs(coeffs[0]) <= lead_tol:
            coeffs.pop(0)
            m += 1
        if m:
            out.append(RootRecord(mpmath.mpf(0), m, is_rational=False))
            out[-1].is_zero_root = True
        if len(coeffs) <= 1:
            return out
        deg = len(coeffs) - 1
        threshold = mpmath.mpf(10) ** (-(bits // 8))
        if deg >= 2:
            mono = RealPoly([c / coeffs[-1] for c in coeffs])
            disc = resultant(mono, mono.derivative())
            if abs(disc) < threshold:
                raise PrecisionExhausted(
                    f"discriminant {mpmath.nstr(abs(disc), 5)} below "
                    f"threshold 1e-{bits // 8}; cannot certify multiplicities")
        try:
            roots = mpmath.polyroots(list(reversed(coeffs)), maxsteps=200,
                                     extraprec=bits)
        except mpmath.libmp.NoConvergence as exc:
            raise PrecisionExhausted(f"polyroots failed: {exc}") from exc
        im_tol = mpmath.mpf(2) ** (-(bits // 4))
        for z in roots:
            if abs(mpmath.im(z)) <= im_tol * max(1, abs(z)):
                out.append(RootRecord(mpmath.re(z), 1, is_rational=False))
        out.sort(key=lambda r: mpmath.mpf(r.value))
        return out


# ---------------------------------------------------------------------------
# Sylvester matrix, resultant, discriminant
# ---------------------------------------------------------------------------

def sylvester(p1, p2):
    """Sylvester matrix in the column layout of the module docstring."""
    n, m = p1.degree, p2.degree
    if n < 1 or m < 1:
        raise ValueError("sylvester requires both degrees >= 1")
    a = list(reversed(p1.coeffs))  # descending: a0 leading
    b = list(reversed(p2.coeffs))
    size = n + m
    zero = p1.coeffs[0] * 0
    mat = [[zero for _ in range(size)] for _ in range(size)]
    for t in range(m):
        for i in range(n + 1):
            mat[t + i][t] = a[i]
    for t in range(n):
        for i in range(m + 1):
            mat[t + i][m + t] = b[i]
    return mat


def det(mat):
    """Determinant: fraction-free Bareiss (exact) or pivoted elimination."""
    n = len(mat)
    if n == 0:
        return 1
    if isinstance(mat[0][0], (mpmath.mpf, mpmath.mpc, float)):
        return _det_numeric(mat)
    a = [row[:] for row in mat]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return mat[0][0] * 0
        for i in range(k + 1, n):
            aik = a[i][k]
            akk = a[k][k]
            row_i = a[i]
            row_k = a[k]
            for j in range(k + 1, n):
                num = row_i[j] * akk - aik * row_k[j]
                row_i[j] = num / prev if prev != 1 else num
            row_i[k] = 0
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def _det_numeric(mat):
    n = len(mat)
    a = [[mpmath.mpf(x) if not isinstance(x, (mpmath.mpf, mpmath.mpc)) else x
          for x in row] for row in mat]
    sign = 1
    for k in range(n - 1):
        piv, pk = max(((abs(a[i][k]), i) for i in range(k, n)),
                      key=lambda t: t[0])
        if piv == 0:
            return mpmath.mpf(0)
        if pk != k:
            a[k], a[pk] = a[pk], a[k]
            sign = -sign
        for i in range(k + 1, n):
            f = a[i][k] / a[k][k]
            for j in range(k, n):
                a[i][j] -= f * a[k][j]
    out = mpmath.mpf(sign)
    for k in range(n):
        out *= a[k][k]
    return out


def resultant(p1, p2):
    return det(sylvester(p1, p2))


def discriminant(p):
    """resultant(P, P'); zero exactly when P has a multiple complex root."""
    if p.degree < 2:
        raise ValueError("discriminant requires degree >= 2")
    return resultant(p, p.derivative())
