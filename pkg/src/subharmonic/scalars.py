"""Scalar coefficient rings.

Three rings cover every computation in the package:

* ``QQi`` -- Gaussian rationals (exact mode).  Closed under +, *, and
  division by nonzero elements, so every recursion that starts from
  rational data stays bit-exact.
* ``mpmath.mpc`` -- arbitrary-precision complex floats (numeric mode).
  The mantissa size is fixed once per run through :class:`ScalarContext`.
* ``TrigPoly`` -- trigonometric polynomials in the initial phase t0 with
  coefficients in either base ring.  Used when t0 is kept symbolic.

All three are duck-compatible for the generic recursions: they support
the arithmetic operators plus ``conjugate()``.
"""

from fractions import Fraction

import mpmath


class QQi:
    """Gaussian rational a + b*i with Fraction components."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    def __add__(self, other):
        other = _as_qqi(other)
        if other is NotImplemented:
            return NotImplemented
        return QQi(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_qqi(other)
        if other is NotImplemented:
            return NotImplemented
        return QQi(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        other = _as_qqi(other)
        if other is NotImplemented:
            return NotImplemented
        return QQi(other.re - self.re, other.im - self.im)

    def __mul__(self, other):
        other = _as_qqi(other)
        if other is NotImplemented:
            return NotImplemented
        return QQi(self.re * other.re - self.im * other.im,
                   self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_qqi(other)
        if other is NotImplemented:
            return NotImplemented
        d = other.re * other.re + other.im * other.im
        if d == 0:
            raise ZeroDivisionError("division by zero QQi")
        return QQi((self.re * other.re + self.im * other.im) / d,
                   (self.im * other.re - self.re * other.im) / d)

    def __rtruediv__(self, other):
        other = _as_qqi(other)
        if other is NotImplemented:
            return NotImplemented
        return other / self

    def __neg__(self):
        return QQi(-self.re, -self.im)

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError("QQi powers must be nonnegative integers")
        out = QQi(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conjugate(self):
        return QQi(self.re, -self.im)

    def __eq__(self, other):
        other = _as_qqi(other)
        if other is NotImplemented:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __repr__(self):
        if not self.im:
            return f"QQi({self.re})"
        return f"QQi({self.re}, {self.im})"

    def __complex__(self):
        return complex(self.re) + 1j * complex(self.im)

    def to_mpc(self, prec=None):
        if prec is None:
            return mpmath.mpc(mpmath.mpf(self.re.numerator) / self.re.denominator,
                              mpmath.mpf(self.im.numerator) / self.im.denominator)
        with mpmath.workprec(prec):
            return mpmath.mpc(mpmath.mpf(self.re.numerator) / self.re.denominator,
                              mpmath.mpf(self.im.numerator) / self.im.denominator)


def _as_qqi(x):
    if isinstance(x, QQi):
        return x
    if isinstance(x, (int, Fraction)):
        return QQi(x)
    return NotImplemented


QQI_ZERO = QQi(0)
QQI_ONE = QQi(1)
QQI_I = QQi(0, 1)


class ScalarContext:
    """Per-run scalar configuration.

    mode is "exact" or "numeric"; in numeric mode every value is an
    ``mpmath.mpc`` produced under ``bits`` of precision.  Mixing two
    contexts takes the minimum precision and records a diagnostic.
    """

    def __init__(self, mode="exact", bits=256):
        if mode not in ("exact", "numeric"):
            raise ValueError(f"unknown scalar mode {mode!r}")
        self.mode = mode
        self.bits = bits
        self.diagnostics = []

    @property
    def exact(self):
        return self.mode == "exact"

    def merged_with(self, other):
        if self.mode != other.mode:
            raise ValueError("cannot merge exact and numeric contexts")
        if self.mode == "numeric" and self.bits != other.bits:
            bits = min(self.bits, other.bits)
            ctx = ScalarContext("numeric", bits)
            ctx.diagnostics.append(
                f"mixed precisions {self.bits} and {other.bits}; using {bits}")
            return ctx
        return self

    # -- constructors -------------------------------------------------

    def of(self, x):
        """Coerce a rational / int / QQi into this context's ring."""
        if self.exact:
            if isinstance(x, QQi):
                return x
            return QQi(x)
        with mpmath.workprec(self.bits):
            if isinstance(x, QQi):
                return x.to_mpc(self.bits)
            if isinstance(x, Fraction):
                return mpmath.mpc(mpmath.mpf(x.numerator) / x.denominator)
            return mpmath.mpc(x)

    def real_of(self, x):
        """Coerce a rational into the real subring (Fraction or mpf)."""
        if self.exact:
            return Fraction(x)
        with mpmath.workprec(self.bits):
            x = Fraction(x)
            return mpmath.mpf(x.numerator) / x.denominator

    @property
    def zero(self):
        return self.of(0)

    @property
    def one(self):
        return self.of(1)

    @property
    def i(self):
        if self.exact:
            return QQI_I
        with mpmath.workprec(self.bits):
            return mpmath.mpc(0, 1)

    # -- predicates ---------------------------------------------------

    def is_zero(self, x, scale=1):
        """Zero test; in numeric mode compares against 2^-(bits/2) * scale."""
        if isinstance(x, QQi):
            return not x
        if isinstance(x, Fraction) or isinstance(x, int):
            return x == 0
        tol = mpmath.mpf(2) ** (-(self.bits // 2))
        return abs(x) <= tol * max(1, abs(scale))

    def chop(self, x, scale=1):
        return self.zero if self.is_zero(x, scale) else x


def conj(x):
    """Conjugate for every supported scalar type."""
    if isinstance(x, (int, Fraction)):
        return x
    return x.conjugate()


def scalar_abs(x):
    if isinstance(x, QQi):
        return (Fraction(x.re) ** 2 + Fraction(x.im) ** 2)
    if isinstance(x, Fraction):
        return x * x
    return abs(x) ** 2


def to_mpc(x, prec=53):
    """Convert any base scalar to an mpc at the given precision."""
    if isinstance(x, QQi):
        return x.to_mpc(prec)
    if isinstance(x, (int, Fraction)):
        x = Fraction(x)
        with mpmath.workprec(prec):
            return mpmath.mpc(mpmath.mpf(x.numerator) / x.denominator)
    return mpmath.mpc(x)


class TrigPoly:
    """Trigonometric polynomial sum_m c_m e^{i m t0} over a base ring.

    Stored sparsely as harmonic -> coefficient.  Real-valued inputs keep
    the conjugate symmetry c_{-m} = conj(c_m); nothing here enforces it,
    reality checks live with the callers that require it.
    """

    __slots__ = ("h",)

    def __init__(self, h=None):
        self.h = dict(h) if h else {}

    @classmethod
    def constant(cls, c):
        return cls({0: c}) if not _is_zero_fast(c) else cls()

    @classmethod
    def harmonic(cls, m, c):
        return cls({m: c}) if not _is_zero_fast(c) else cls()

    def __add__(self, other):
        if not isinstance(other, TrigPoly):
            other = TrigPoly.constant(other)
        out = dict(self.h)
        for m, c in other.h.items():
            s = out.get(m)
            out[m] = c if s is None else s + c
        return TrigPoly({m: c for m, c in out.items() if not _is_zero_fast(c)})

    __radd__ = __add__

    def __neg__(self):
        return TrigPoly({m: -c for m, c in self.h.items()})

    def __sub__(self, other):
        if not isinstance(other, TrigPoly):
            other = TrigPoly.constant(other)
        return self + (-other)

    def __rsub__(self, other):
        return TrigPoly.constant(other) - self

    def __mul__(self, other):
        if isinstance(other, TrigPoly):
            out = {}
            for m1, c1 in self.h.items():
                for m2, c2 in other.h.items():
                    m = m1 + m2
                    v = c1 * c2
                    s = out.get(m)
                    out[m] = v if s is None else s + v
            return TrigPoly({m: c for m, c in out.items() if not _is_zero_fast(c)})
        return TrigPoly({m: c * other for m, c in self.h.items()})

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, TrigPoly):
            raise TypeError("TrigPoly division is only by base scalars")
        return TrigPoly({m: c / other for m, c in self.h.items()})

    def conjugate(self):
        return TrigPoly({-m: conj(c) for m, c in self.h.items()})

    def __bool__(self):
        return bool(self.h)

    def __eq__(self, other):
        if isinstance(other, TrigPoly):
            return (self - other).h == {}
        return (self - TrigPoly.constant(other)).h == {}

    def __hash__(self):
        return hash(frozenset(self.h.items()))

    def derivative(self):
        """d/dt0: multiplies harmonic m by i*m."""
        out = {}
        for m, c in self.h.items():
            if m:
                out[m] = c * QQi(0, m) if isinstance(c, QQi) else c * mpmath.mpc(0, m)
        return TrigPoly(out)

    def eval_z(self, z):
        """Evaluate at e^{i t0} = z (z may be QQi or mpc)."""
        total = None
        for m, c in self.h.items():
            term = c * _int_power(z, m)
            total = term if total is None else total + term
        return total if total is not None else 0

    def __repr__(self):
        if not self.h:
            return "TrigPoly(0)"
        parts = [f"{c!r}*e^({m}it0)" for m, c in sorted(self.h.items())]
        return "TrigPoly(" + " + ".join(parts) + ")"


def _int_power(z, m):
    if m >= 0:
        return z ** m
    return (1 / z) ** (-m)


def _is_zero_fast(c):
    if isinstance(c, (QQi, int, Fraction)):
        return not c
    return c == 0
