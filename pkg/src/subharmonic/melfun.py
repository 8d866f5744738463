"""Subharmonic Melnikov functions, their zeros, and the higher cascade.

The Melnikov function is the nu = 0 slot of the resonant evaluation of
G: M(t0) = sum_{p sigma + q sigma' = 0} G_{sigma,sigma'}(A0) e^{i sigma' t0},
a real trigonometric polynomial.  Zeros are located by substituting
x = cos t0, s = sin t0, writing M = C(x) + s S(x) with C, S rational
polynomials, and isolating roots of R(x) = C^2 - (1 - x^2) S^2 =
M(t0) M(-t0).  Whether a candidate (x*, sign of s) really annihilates M
and all derivative orders below n is decided exactly through gcd and
Sturm arguments whenever the input is rational; numeric mode certifies
against explicit thresholds or raises PrecisionExhausted.
"""

from fractions import Fraction

import mpmath

from .coefficients import CoefficientSolver
from .errors import PrecisionExhausted
from .phase import Phase
from .realroots import (RealPoly, poly_gcd, refine_root, squarefree_decomposition,
                        sturm_chain, sturm_count, _isolate_squarefree)
from .scalars import QQi, TrigPoly, conj
from .series import tt_eval_resonant


class IdenticallyZeroType:
    """Sentinel outcome of find_zeros_with_order."""

    def __repr__(self):
        return "IdenticallyZero"


IDENTICALLY_ZERO = IdenticallyZeroType()


class AllZeroUpTo:
    """Every higher-order Melnikov function vanished up to the cap."""

    def __init__(self, kappa_max):
        self.kappa_max = kappa_max

    def __repr__(self):
        return f"AllZeroUpTo({self.kappa_max})"


class MelnikovFn:
    """Real trig polynomial in t0; order_kappa = 0 is the plain average."""

    __slots__ = ("order_kappa", "harmonics", "ctx")

    def __init__(self, harmonics, ctx, order_kappa=0):
        self.harmonics = {m: c for m, c in harmonics.items() if not _zero(c)}
        self.ctx = ctx
        self.order_kappa = order_kappa

    def as_trigpoly(self):
        return TrigPoly(self.harmonics)

    def derivative(self, r=1):
        tp = self.as_trigpoly()
        for _ in range(r):
            tp = tp.derivative()
        return MelnikovFn(tp.h, self.ctx, self.order_kappa)

    def eval_t0(self, t0, prec=53):
        with mpmath.workprec(prec):
            z = mpmath.exp(1j * mpmath.mpf(t0))
            total = mpmath.mpc(0)
            for m, c in self.harmonics.items():
                total += _to_mpc(c, prec) * z ** m
            return mpmath.re(total)

    def is_identically_zero(self):
        if not self.harmonics:
            return True
        if self.ctx.exact:
            return False
        tol = mpmath.mpf(10) ** (-max(1, 25 * self.ctx.bits // 256))
        return all(abs(c) < tol for c in self.harmonics.values())

    def max_harmonic(self):
        return max((abs(m) for m in self.harmonics), default=0)

    def cheb_pair(self):
        """Write M = C(x) + s S(x), x = cos t0, s = sin t0; exact mode only."""
        a = {}
        b = {}
        for m, c in self.harmonics.items():
            if not isinstance(c, QQi):
                raise ValueError("cheb_pair needs exact harmonics")
            if m == 0:
                a[0] = a.get(0, Fraction(0)) + c.re
            elif m > 0:
                a[m] = a.get(m, Fraction(0)) + 2 * c.re
                b[m] = b.get(m, Fraction(0)) - 2 * c.im
        C = RealPoly([a.get(0, Fraction(0))])
        S = RealPoly([])
        for m in sorted(a):
            if m == 0:
                continue
            C = C + _cheb_T(m).scale(a[m])
            if b.get(m):
                S = S + _cheb_U(m - 1).scale(b[m])
        return C, S

    def __repr__(self):
        return f"MelnikovFn(kappa={self.order_kappa}, {len(self.harmonics)} harmonics)"


def _zero(c):
    if isinstance(c, (QQi, int, Fraction)):
        return not c
    return c == 0


def _to_mpc(c, prec):
    if isinstance(c, QQi):
        return c.to_mpc(prec)
    return mpmath.mpc(c)


_chebT_cache = [RealPoly([Fraction(1)]), RealPoly([Fraction(0), Fraction(1)])]
_chebU_cache = [RealPoly([Fraction(1)]), RealPoly([Fraction(0), Fraction(2)])]


def _cheb_T(n):
    while len(_chebT_cache) <= n:
        k = len(_chebT_cache)
        two_x = RealPoly([Fraction(0), Fraction(2)])
        _chebT_cache.append(two_x * _chebT_cache[k - 1] - _chebT_cache[k - 2])
    return _chebT_cache[n]


def _cheb_U(n):
    while len(_chebU_cache) <= n:
        k = len(_chebU_cache)
        two_x = RealPoly([Fraction(0), Fraction(2)])
        _chebU_cache.append(two_x * _chebU_cache[k - 1] - _chebU_cache[k - 2])
    return _chebU_cache[n]


def _pair_derivative(C, S):
    """(C, S) for dM/dt0 given the pair for M."""
    one_minus_x2 = RealPoly([Fraction(1), Fraction(0), Fraction(-1)])
    x = RealPoly([Fraction(0), Fraction(1)])
    return (x * S - one_minus_x2 * S.derivative(), -C.derivative())


class ZeroRecord:
    """A zero t0 of M with its order n and D = M^(n)(t0) != 0."""

    __slots__ = ("phase", "n", "D")

    def __init__(self, phase, n, D):
        self.phase = phase
        self.n = n
        self.D = D

    @property
    def t0(self):
        return self.phase.t0_value

    def __repr__(self):
        return f"ZeroRecord(t0={self.phase.describe()}, n={self.n}, D={self.D})"


def melnikov_function(sys, resonance):
    """M(t0): the time average of G along the unperturbed resonant orbit."""
    slots = tt_eval_resonant(sys.G, resonance)
    tp = slots.get(0, TrigPoly())
    return MelnikovFn(tp.h, sys.ctx, order_kappa=0)


# ---------------------------------------------------------------------------
# exact interval decisions at algebraic angles
# ---------------------------------------------------------------------------

def _interval_eval(P, lo, hi):
    """Image bounds of P over [lo, hi] by interval Horner."""
    alo = ahi = Fraction(P.coeffs[-1]) if P.coeffs else Fraction(0)
    for c in reversed(P.coeffs[:-1]):
        cands = (alo * lo, alo * hi, ahi * lo, ahi * hi)
        alo, ahi = min(cands) + c, max(cands) + c
    return alo, ahi


class AlgebraicAngle:
    """t0 with x = cos t0 an algebraic number and a fixed sign of sin t0."""

    def __init__(self, x=None, factor=None, interval=None, sgn=1):
        self.x = x                  # Fraction when rational, else None
        self.factor = factor        # square-free RealPoly with root x*
        self.interval = interval    # (lo, hi) Fractions, sign change
        self.sgn = sgn              # sign of sin t0 (+1 or -1)

    def refine(self, width):
        if self.x is None:
            lo, hi = refine_root(self.factor, *self.interval, width)
            if lo == hi:
                self.x = lo
            else:
                self.interval = (lo, hi)

    def x_bounds(self):
        if self.x is not None:
            return self.x, self.x
        return self.interval

    def vanishes(self, P):
        if P.is_zero():
            return True
        if self.x is not None:
            return P.eval(self.x) == 0
        g = poly_gcd(self.factor, P)
        if g.degree <= 0:
            return False
        lo, hi = self.interval
        return sturm_count(g, lo, hi) >= 1

    def sign_of(self, P):
        """Sign of P(x*), assuming P(x*) != 0."""
        while True:
            lo, hi = self.x_bounds()
            vlo, vhi = _interval_eval(P, lo, hi)
            if vlo > 0:
                return 1
            if vhi < 0:
                return -1
            if self.x is not None:
                v = P.eval(self.x)
                return 1 if v > 0 else -1
            self.refine((hi - lo) / 4)

    def value_is_zero(self, C, S):
        """Whether C(x*) + s* S(x*) = 0 for this angle (s* != 0)."""
        c0 = self.vanishes(C)
        s0 = self.vanishes(S)
        if c0 and s0:
            return True
        if c0 or s0:
            return False
        one_minus_x2 = RealPoly([Fraction(1), Fraction(0), Fraction(-1)])
        N = C * C - one_minus_x2 * (S * S)
        if not self.vanishes(N):
            return False
        return self.sign_of(C) == -self.sgn * self.sign_of(S)

    def t0_value(self, bits=256):
        self.refine(Fraction(1, 2 ** (bits + 16)))
        lo, hi = self.x_bounds()
        with mpmath.workprec(bits + 32):
            xm = (mpmath.mpf(lo.numerator) / lo.denominator
                  + mpmath.mpf(hi.numerator) / hi.denominator) / 2
            t = mpmath.acos(xm)
            if self.sgn < 0:
                t = 2 * mpmath.pi - t
            return t

    def phase(self, bits=256):
        if self.x is not None:
            s_sq = 1 - self.x * self.x
            root = _rational_sqrt(s_sq)
            if root is not None:
                return Phase.exact_unit(self.x, self.sgn * root)
        return Phase.numeric(self.t0_value(bits), bits=bits)


def _rational_sqrt(q):
    q = Fraction(q)
    if q < 0:
        return None
    rn = mpmath.isqrt(q.numerator)
    rd = mpmath.isqrt(q.denominator)
    if rn * rn == q.numerator and rd * rd == q.denominator:
        return Fraction(int(rn), int(rd))
    return None


# ---------------------------------------------------------------------------
# zero finding
# ---------------------------------------------------------------------------

def find_zeros_with_order(M, bits=256):
    """All zeros of M in [0, 2 pi) with orders, or IDENTICALLY_ZERO."""
    if M.is_identically_zero():
        return IDENTICALLY_ZERO
    if M.ctx.exact:
        return _find_zeros_exact(M, bits)
    return _find_zeros_numeric(M, bits)


def _max_order_bound(M):
    return 2 * M.max_harmonic() + 2


def _find_zeros_exact(M, bits):
    records = []
    # special angles z = 1 and z = -1 (sin t0 = 0)
    for zval, phase in ((QQi(1), Phase.zero()), (QQi(-1), Phase.pi())):
        tp = M.as_trigpoly()
        if _zero(tp.eval_z(zval)):
            n = 1
            d = tp.derivative()
            while _zero(d.eval_z(zval)):
                n += 1
                d = d.derivative()
                if n > _max_order_bound(M):
                    raise RuntimeError("zero order exceeds degree bound")
            D = d.eval_z(zval)
            assert isinstance(D, QQi) and D.im == 0
            records.append(ZeroRecord(phase, n, D.re))
    # interior zeros via x = cos t0
    C, S = M.cheb_pair()
    one_minus_x2 = RealPoly([Fraction(1), Fraction(0), Fraction(-1)])
    R = C * C - one_minus_x2 * (S * S)
    for xval in (Fraction(1), Fraction(-1)):
        lin = RealPoly([-xval, Fraction(1)])
        while not R.is_zero() and R.eval(xval) == 0:
            R = R.quo(lin)
    assert not R.is_zero()
    if R.degree >= 1:
        for factor, _mult in squarefree_decomposition(R):
            for lo, hi in _isolate_squarefree(factor):
                if lo == hi:
                    if not (-1 < lo < 1):
                        continue
                    angles = [AlgebraicAngle(x=lo, sgn=+1),
                              AlgebraicAngle(x=lo, sgn=-1)]
                else:
                    if hi <= -1 or lo >= 1:
                        continue
                    lo, hi = refine_root(factor, lo, hi, Fraction(1, 2 ** 40))
                    if lo == hi:
                        angles = [AlgebraicAngle(x=lo, sgn=+1),
                                  AlgebraicAngle(x=lo, sgn=-1)]
                    else:
                        if hi <= -1 or lo >= 1:
                            continue
                        angles = [AlgebraicAngle(factor=factor, interval=(lo, hi), sgn=+1),
                                  AlgebraicAngle(factor=factor, interval=(lo, hi), sgn=-1)]
                for ang in angles:
                    rec = _order_at_angle(M, C, S, ang, bits)
                    if rec is not None:
                        records.append(rec)
    records.sort(key=lambda r: mpmath.mpf(r.phase.t0_value))
    return records


def _order_at_angle(M, C, S, ang, bits):
    if not ang.value_is_zero(C, S):
        return None
    bound = _max_order_bound(M)
    Cr, Sr = C, S
    n = 0
    while True:
        Cr, Sr = _pair_derivative(Cr, Sr)
        n += 1
        if not ang.value_is_zero(Cr, Sr):
            break
        if n > bound:
            raise RuntimeError("zero order exceeds degree bound")
    ang.refine(Fraction(1, 2 ** (bits + 16)))
    lo, hi = ang.x_bounds()
    with mpmath.workprec(bits):
        xm = (mpmath.mpf(lo.numerator) / lo.denominator
              + mpmath.mpf(hi.numerator) / hi.denominator) / 2
        s = ang.sgn * mpmath.sqrt(1 - xm * xm)
        D = Cr.eval(xm) + s * Sr.eval(xm)
    return ZeroRecord(ang.phase(bits), n, D)


def _find_zeros_numeric(M, bits):
    with mpmath.workprec(bits):
        N = M.max_harmonic()
        scale = max(abs(c) for c in M.harmonics.values())
        coeffs_desc = [mpmath.mpc(M.harmonics.get(m, 0)) for m in range(N, -N - 1, -1)]
        try:
            roots = mpmath.polyroots(coeffs_desc, maxsteps=200, extraprec=bits)
        except mpmath.libmp.NoConvergence as exc:
            raise PrecisionExhausted(f"polyroots failed on M: {exc}") from exc
        circle_tol = mpmath.mpf(2) ** (-(bits // 4))
        hard_zero = mpmath.mpf(2) ** (-(3 * bits // 4)) * scale
        clear_nonzero = mpmath.mpf(2) ** (-(bits // 4)) * scale
        t0s = []
        for z in roots:
            if abs(abs(z) - 1) > circle_tol:
                continue
            t = mpmath.arg(z)
            if t < 0:
                t += 2 * mpmath.pi
            if all(abs(t - u) > mpmath.mpf(2) ** (-(bits // 8)) and
                   abs(abs(t - u) - 2 * mpmath.pi) > mpmath.mpf(2) ** (-(bits // 8))
                   for u in t0s):
                t0s.append(t)
        records = []
        for t in sorted(t0s):
            n = 0
            d = M
            while True:
                val = d.derivative(0).eval_t0(t, prec=bits) if n == 0 else d.eval_t0(t, prec=bits)
                if abs(val) > clear_nonzero:
                    break
                if abs(val) > hard_zero:
                    raise PrecisionExhausted(
                        f"derivative order {n} at t0={mpmath.nstr(t, 12)} is "
                        f"ambiguous at {bits} bits")
                n += 1
                d = M.derivative(n)
                if n > _max_order_bound(M):
                    raise PrecisionExhausted("order scan exceeded degree bound")
            if n == 0:
                continue  # spurious root (not on the real zero set)
            # polish the root of the (n-1)-th derivative
            g = M.derivative(n - 1)
            gp = M.derivative(n)
            for _ in range(80):
                gv = g.eval_t0(t, prec=bits)
                gpv = gp.eval_t0(t, prec=bits)
                step = gv / gpv
                t = t - step
                if abs(step) < mpmath.mpf(2) ** (-bits + 8):
                    break
            if t < 0:
                t += 2 * mpmath.pi
            if t >= 2 * mpmath.pi:
                t -= 2 * mpmath.pi
            D = M.derivative(n).eval_t0(t, prec=bits)
            records.append(ZeroRecord(Phase.numeric(t, bits), n, D))
        records.sort(key=lambda r: mpmath.mpf(r.phase.t0_value))
        return records


def circle_root_count(M, bits=128):
    """Independent count of unit-circle roots of the z-polynomial of M
    (with multiplicity), used to cross-check the sum of zero orders."""
    with mpmath.workprec(bits):
        N = M.max_harmonic()
        coeffs_desc = [_to_mpc(M.harmonics.get(m, 0), bits)
                       for m in range(N, -N - 1, -1)]
        while coeffs_desc and abs(coeffs_desc[0]) == 0:
            coeffs_desc.pop(0)
        while coeffs_desc and abs(coeffs_desc[-1]) == 0:
            coeffs_desc.pop()
        if len(coeffs_desc) <= 1:
            return 0
        roots = mpmath.polyroots(coeffs_desc, maxsteps=400, extraprec=2 * bits)
        tol = mpmath.mpf(2) ** (-(bits // 4))
        return sum(1 for z in roots if abs(abs(z) - 1) < tol)


# ---------------------------------------------------------------------------
# higher-order cascade
# ---------------------------------------------------------------------------

def higher_melnikov(sys, resonance, kappa_max=4, _check_jmax=2):
    """First not-identically-zero higher-order Melnikov function.

    Requires M == 0 identically.  Runs the coefficient recursion with a
    symbolic t0 and beta0 = 0, scanning Gamma-bar_0^(k)(0, t0) for
    k = 2 .. kappa_max + 1.  Returns (kappa, M_kappa) or AllZeroUpTo.
    """
    M0 = melnikov_function(sys, resonance)
    if not M0.is_identically_zero():
        raise ValueError("higher_melnikov requires an identically zero "
                         "first-order Melnikov function")
    if kappa_max < 1:
        return AllZeroUpTo(kappa_max)
    solver = CoefficientSolver(sys, resonance, Phase.symbolic(),
                               Kmax=kappa_max + 1, Jmax=_check_jmax)
    for k in range(2, kappa_max + 2):
        tp = solver.gamma_zero_mode(k, 0)
        fn = MelnikovFn(tp.h if isinstance(tp, TrigPoly) else {0: tp},
                        sys.ctx, order_kappa=k - 1)
        if not fn.is_identically_zero():
            return k - 1, fn
    return AllZeroUpTo(kappa_max)


def symbolic_gamma_zero(sys, resonance, k, j, Kmax=None, Jmax=None):
    """Gamma-bar_0^(k,j)(t0) as a TrigPoly, for derivative-identity checks."""
    solver = CoefficientSolver(sys, resonance, Phase.symbolic(),
                               Kmax=Kmax or k, Jmax=Jmax if Jmax is not None else j)
    tp = solver.gamma_zero_mode(k, j)
    if not isinstance(tp, TrigPoly):
        tp = TrigPoly.constant(tp)
    return tp
