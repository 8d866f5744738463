"""Double-Fourier series with polynomial action dependence.

A :class:`TrigTaylor` stores finitely many modes (sigma, sigma') of a
function of (alpha, t), each carrying a polynomial in x = A - A0.  The
internal basis is the complex exponential e^{i(sigma*alpha + sigma'*t)};
real sin/cos input is converted exactly on ingestion.  Coefficients are
Gaussian rationals in exact mode, mpc in numeric mode.

Reality of the represented function is the invariant

    coeff(-sigma, -sigma', s) == conj(coeff(sigma, sigma', s))

and is preserved by every operation here.
"""

from fractions import Fraction

import mpmath

from .errors import DegenerateFrequency, MixedScalarModes, NonResonant, NotReal
from .scalars import QQi, ScalarContext, TrigPoly, conj, to_mpc


class TrigTaylor:
    """Finite double-Fourier series; mode -> tuple of A-poly coefficients.

    The polynomial tuple at (sigma, sigma') lists Taylor coefficients of
    the mode function g(A) about A0: entry s equals d_A^s g(A0) / s!.
    """

    __slots__ = ("modes", "degA", "ctx")

    def __init__(self, modes, degA, ctx):
        cleaned = {}
        for key, poly in modes.items():
            poly = _trim(poly)
            if poly:
                if len(poly) - 1 > degA:
                    raise ValueError("polynomial degree exceeds degA")
                cleaned[key] = tuple(poly)
        self.modes = cleaned
        self.degA = degA
        self.ctx = ctx

    # -- constructors ---------------------------------------------------

    @classmethod
    def zero(cls, ctx, degA=0):
        return cls({}, degA, ctx)

    @classmethod
    def constant(cls, value, ctx, degA=0):
        return cls({(0, 0): (ctx.of(value),)}, degA, ctx)

    @classmethod
    def from_terms(cls, terms, ctx, degA=None):
        """Build from real-basis terms (basis, sigma, sigma', apoly).

        basis is "sin" or "cos"; apoly lists rational coefficients of
        powers of (A - A0).  sin(theta) maps to -i/2 e^{i theta} + i/2
        e^{-i theta}, cos to 1/2 both.
        """
        if degA is None:
            degA = max((len(t[3]) - 1 for t in terms), default=0)
        modes = {}
        for basis, sigma, sigma_p, apoly in terms:
            apoly = [Fraction(c) for c in apoly]
            if basis == "sin":
                w_plus, w_minus = QQi(0, Fraction(-1, 2)), QQi(0, Fraction(1, 2))
            elif basis == "cos":
                w_plus = w_minus = QQi(Fraction(1, 2))
            else:
                raise ValueError(f"unknown basis {basis!r}")
            for key, w in (((sigma, sigma_p), w_plus),
                           ((-sigma, -sigma_p), w_minus)):
                tgt = list(modes.get(key, ()))
                tgt += [ctx.zero] * (len(apoly) - len(tgt))
                for s, c in enumerate(apoly):
                    tgt[s] = tgt[s] + ctx.of(c) * ctx.of(w)
                modes[key] = tgt
        return cls(modes, degA, ctx)

    # -- bookkeeping ----------------------------------------------------

    def coeff(self, sigma, sigma_p, s=0):
        poly = self.modes.get((sigma, sigma_p))
        if poly is None or s >= len(poly):
            return self.ctx.zero
        return poly[s]

    def is_zero(self):
        return not self.modes

    def mode_radius(self):
        if not self.modes:
            return 0
        return max(max(abs(s), abs(sp)) for s, sp in self.modes)

    def max_abs_sigma(self):
        return max((abs(s) for s, _ in self.modes), default=0)

    def max_abs_sigma_prime(self):
        return max((abs(sp) for _, sp in self.modes), default=0)

    def check_reality(self, what="series"):
        for (s, sp), poly in self.modes.items():
            other = self.modes.get((-s, -sp), ())
            for k in range(max(len(poly), len(other))):
                a = poly[k] if k < len(poly) else self.ctx.zero
                b = other[k] if k < len(other) else self.ctx.zero
                if self.ctx.exact:
                    if a != conj(b):
                        raise NotReal(f"{what}: mode ({s},{sp}) power {k}")
                else:
                    if not self.ctx.is_zero(a - conj(b), scale=abs(a) + abs(b)):
                        raise NotReal(f"{what}: mode ({s},{sp}) power {k}")

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        self._check_ctx(other)
        degA = max(self.degA, other.degA)
        out = {k: list(v) for k, v in self.modes.items()}
        for k, poly in other.modes.items():
            tgt = out.setdefault(k, [])
            tgt += [self.ctx.zero] * (len(poly) - len(tgt))
            for s, c in enumerate(poly):
                tgt[s] = tgt[s] + c
        return TrigTaylor(out, degA, self.ctx)

    def scaled(self, c):
        c = self.ctx.of(c) if isinstance(c, (int, Fraction)) else c
        return TrigTaylor({k: [x * c for x in v] for k, v in self.modes.items()},
                          self.degA, self.ctx)

    def _check_ctx(self, other):
        if self.ctx.mode != other.ctx.mode:
            raise MixedScalarModes(
                "cannot combine exact and numeric TrigTaylor values")

    def deriv_A(self):
        """d/dA, dropping the top power (degA decreases by one)."""
        out = {}
        for k, poly in self.modes.items():
            out[k] = [poly[s] * s for s in range(1, len(poly))]
        return TrigTaylor(out, max(self.degA - 1, 0), self.ctx)

    def eval_numeric(self, alpha, x, tau, prec=53):
        """Numeric value at (alpha, A0 + x, tau); returns a real mpf."""
        with mpmath.workprec(prec):
            total = mpmath.mpc(0)
            ea = mpmath.exp(1j * mpmath.mpf(alpha))
            et = mpmath.exp(1j * mpmath.mpf(tau))
            for (s, sp), poly in self.modes.items():
                pv = mpmath.mpc(0)
                for c in reversed(poly):
                    pv = pv * x + to_mpc(c, prec)
                total += pv * ea ** s * et ** sp
            return mpmath.re(total)

    def __repr__(self):
        return f"TrigTaylor({len(self.modes)} modes, degA={self.degA})"


def _trim(poly):
    poly = list(poly)
    while poly and not _nonzero(poly[-1]):
        poly.pop()
    return poly


def _nonzero(c):
    if isinstance(c, (QQi, int, Fraction)):
        return bool(c)
    return c != 0


def tt_mul(a, b, degA=None):
    """Product of two TrigTaylor values, truncated at degA in (A - A0)."""
    a._check_ctx(b)
    if degA is None:
        degA = max(a.degA, b.degA)
    if degA < 0:
        raise ValueError("degA must be >= 0")
    out = {}
    for (s1, sp1), p1 in a.modes.items():
        for (s2, sp2), p2 in b.modes.items():
            key = (s1 + s2, sp1 + sp2)
            prod_len = min(len(p1) + len(p2) - 1, degA + 1)
            tgt = out.setdefault(key, [a.ctx.zero] * prod_len)
            if len(tgt) < prod_len:
                tgt += [a.ctx.zero] * (prod_len - len(tgt))
            for i, c1 in enumerate(p1):
                if i > degA:
                    break
                for j, c2 in enumerate(p2):
                    if i + j > degA:
                        break
                    tgt[i + j] = tgt[i + j] + c1 * c2
    return TrigTaylor(out, degA, a.ctx)


def tt_eval_resonant(f, r, a_power=0):
    """Collapse f(alpha_0(t), A0, t + t0) to Fourier slots in e^{i omega nu t}.

    alpha_0(t) = (p/q) t, so mode (sigma, sigma') lands in the slot
    nu = p*sigma + q*sigma' of frequency omega = 1/q, carrying its
    symbolic phase factor e^{i sigma' t0}.  Returns {nu: TrigPoly in t0}.

    a_power selects the Taylor coefficient in (A - A0) (0 is the value
    at A0; s picks d_A^s f(A0)/s!).
    """
    slots = {}
    for (s, sp), poly in f.modes.items():
        if a_power >= len(poly):
            continue
        c = poly[a_power]
        nu = r.p * s + r.q * sp
        slot = slots.get(nu, TrigPoly())
        slots[nu] = slot + TrigPoly.harmonic(sp, c)
    return {nu: tp for nu, tp in slots.items() if tp}


class Resonance:
    """A resonant action level omega(A0) = p/q with its twist omega'(A0)."""

    __slots__ = ("p", "q", "omega0", "omega1")

    def __init__(self, p, q, omega0, omega1):
        self.p = p
        self.q = q
        self.omega0 = omega0
        self.omega1 = omega1

    @property
    def freq(self):
        """Frequency 1/q of the sought T = 2 pi q periodic solutions."""
        return Fraction(1, self.q)

    def __repr__(self):
        return f"Resonance(p={self.p}, q={self.q}, omega1={self.omega1})"


class PlanarSystem:
    """dalpha/dt = omega(A) + eps F, dA/dt = eps G, expanded about A0."""

    __slots__ = ("omega", "F", "G", "A0", "ctx")

    def __init__(self, omega, F, G, A0, ctx):
        self.omega = omega
        self.F = F
        self.G = G
        self.A0 = A0
        self.ctx = ctx

    def omega_taylor(self, s):
        """Taylor coefficient of omega about A0: d_A^s omega(A0) / s!."""
        return self.omega.coeff(0, 0, s)

    def omega_degree(self):
        poly = self.omega.modes.get((0, 0), ())
        return len(poly) - 1

    def __repr__(self):
        return (f"PlanarSystem(A0={self.A0}, degF={len(self.F.modes)} modes, "
                f"degG={len(self.G.modes)} modes)")


def validate_system(sys, p, q):
    """Check Hypothesis-1 style conditions and return the Resonance.

    omega(A0) must equal p/q (exactly, or within 1e-30 numerically),
    omega'(A0) must not vanish, and omega, F, G must satisfy the
    reality invariant.
    """
    from math import gcd
    if q < 1 or gcd(p, q) != 1:
        raise ValueError("p, q must be coprime with q >= 1")
    ctx = sys.ctx
    for tt, name in ((sys.omega, "omega"), (sys.F, "F"), (sys.G, "G")):
        tt.check_reality(name)
    for (s, sp) in sys.omega.modes:
        if (s, sp) != (0, 0):
            raise NotReal("omega must depend on A only")
    w0 = sys.omega_taylor(0)
    target = ctx.of(Fraction(p, q))
    if ctx.exact:
        if w0 != target:
            raise NonResonant(f"omega(A0) = {w0!r} != {p}/{q}")
    else:
        if abs(w0 - target) > mpmath.mpf(10) ** -30:
            raise NonResonant(f"omega(A0) = {w0} != {p}/{q}")
    w1 = sys.omega_taylor(1)
    if ctx.is_zero(w1):
        raise DegenerateFrequency("omega'(A0) = 0")
    return Resonance(p, q, Fraction(p, q), w1)
