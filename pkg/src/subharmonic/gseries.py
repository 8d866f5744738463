"""Graded Fourier-series engine.

The order-by-order recursions all manipulate objects of the same shape:
a series graded by an integer order k (one slot of the epsilon or eta
power), where each layer is a sparse map (j, nu) -> coefficient, j the
free-parameter power (always 0 in the eta recursion) and nu the Fourier
index of frequency omega = 1/q.

`GSeries` holds such layers; `PowerCache` maintains powers of a growing
series layer-by-layer so the total work over a run matches a single full
power computation; `FieldComposer` assembles

    sum_{sigma, sigma'} e^{i sigma' t0} G_{sigma,sigma'}(A0 + B)
        * exp(i sigma (beta as a series))

one layer at a time, which is the right-hand side structure shared by
the Gamma and Phi assemblies.
"""

from fractions import Fraction

from .scalars import QQi, TrigPoly, conj


class CoeffRing:
    """Adapter fixing how abstract ring elements are built.

    symbolic=True keeps the initial phase t0 as a TrigPoly variable;
    otherwise phase factors are powers of the fixed unit scalar z.
    """

    def __init__(self, ctx, z=None, symbolic=False):
        self.ctx = ctx
        self.z = z
        self.symbolic = symbolic

    def of(self, x):
        return self.ctx.of(x)

    def i_sigma_pow(self, sigma, r):
        """(i sigma)^r / r! as a base scalar."""
        if self.ctx.exact:
            v = QQi(0, sigma) ** r
            return v * QQi(Fraction(1, _fact(r)))
        import mpmath
        with mpmath.workprec(self.ctx.bits):
            return mpmath.mpc(0, sigma) ** r / _fact(r)

    def phase(self, sp):
        """e^{i sigma' t0} in the working ring."""
        if self.symbolic:
            return TrigPoly.harmonic(sp, self.ctx.one)
        if sp >= 0:
            return self.z ** sp
        return conj(self.z) ** (-sp)

    def inv_i_omega_nu(self, nu, q):
        """1 / (i * (1/q) * nu)."""
        if self.ctx.exact:
            return QQi(0, Fraction(-q, nu))
        import mpmath
        with mpmath.workprec(self.ctx.bits):
            return 1 / mpmath.mpc(0, mpmath.mpf(nu) / q)


def _fact(r):
    out = 1
    for i in range(2, r + 1):
        out *= i
    return out


def slice_mul(s1, s2, jmax):
    """Convolve two (j, nu)->coeff slices, truncating j above jmax."""
    if not s1 or not s2:
        return {}
    out = {}
    for (j1, n1), v1 in s1.items():
        for (j2, n2), v2 in s2.items():
            j = j1 + j2
            if j > jmax:
                continue
            key = (j, n1 + n2)
            v = v1 * v2
            s = out.get(key)
            out[key] = v if s is None else s + v
    return {k: v for k, v in out.items() if v}


def slice_add_into(target, source, factor=None):
    for key, v in source.items():
        if factor is not None:
            v = v * factor
        s = target.get(key)
        target[key] = v if s is None else s + v


def slice_clean(s):
    return {k: v for k, v in s.items() if v}


class GSeries:
    """Layered series: order k -> slice {(j, nu): coeff}."""

    __slots__ = ("layers",)

    def __init__(self, layers=None):
        self.layers = {k: dict(v) for k, v in (layers or {}).items()}

    def layer(self, k):
        return self.layers.get(k, {})

    def set_layer(self, k, slc):
        slc = slice_clean(slc)
        if slc:
            self.layers[k] = slc
        else:
            self.layers.pop(k, None)

    def add_to_layer(self, k, slc, factor=None):
        tgt = self.layers.setdefault(k, {})
        slice_add_into(tgt, slc, factor)
        self.set_layer(k, tgt)

    def entry(self, k, j, nu):
        return self.layer(k).get((j, nu))

    def max_order(self):
        return max(self.layers, default=-1)

    def __repr__(self):
        sizes = {k: len(v) for k, v in sorted(self.layers.items())}
        return f"GSeries(layers={sizes})"


class PowerCache:
    """Lazily maintained powers of a series that grows layer by layer.

    Call discipline: `layer(r, k)` may only be requested once the base
    series is complete through order k.  Results are frozen at first
    computation, so violating the discipline gives stale layers.
    """

    def __init__(self, base, jmax, one_scalar):
        self.base = base
        self.jmax = jmax
        self._pows = [GSeries({0: {(0, 0): one_scalar}})]
        self._done = [set([0])]

    def layer(self, r, k):
        while len(self._pows) <= r:
            self._pows.append(GSeries())
            self._done.append(set())
        if r == 0:
            return self._pows[0].layer(k) if k == 0 else {}
        if k in self._done[r]:
            return self._pows[r].layer(k)
        out = {}
        for kb in range(0, k + 1):
            sb = self.base.layer(kb)
            if not sb:
                continue
            sp = self.layer(r - 1, k - kb)
            if not sp:
                continue
            slice_add_into(out, slice_mul(sb, sp, self.jmax))
        out = slice_clean(out)
        self._pows[r].set_layer(k, out)
        self._done[r].add(k)
        return out

    def nonzero_power_limit(self, k):
        """Smallest r such that powers >= r vanish through order k."""
        r = 1
        while True:
            if all(not self.layer(r, kk) for kk in range(0, k + 1)):
                return r
            r += 1


class FieldComposer:
    """Layers of sum_modes phase * (mode A-poly at A0+B) * exp(i sigma beta)."""

    def __init__(self, tt, resonance, ring, beta_pows, B_pows, jmax):
        self.r = resonance
        self.ring = ring
        self.jmax = jmax
        self.beta_pows = beta_pows
        self.B_pows = B_pows
        self.modes = [(s, sp, poly) for (s, sp), poly in sorted(tt.modes.items())]
        self._exp_cache = {}
        self._layers = {}

    def _exp_layer(self, sigma, k):
        """Layer k of exp(i sigma beta)."""
        key = (sigma, k)
        if key in self._exp_cache:
            return self._exp_cache[key]
        out = {}
        r = 0
        while True:
            pw = self.beta_pows.layer(r, k)
            if r > 0 and not pw:
                # powers above r cannot repopulate this layer once the
                # r-th vanishes at every order <= k
                if all(not self.beta_pows.layer(r, kk) for kk in range(k + 1)):
                    break
            if pw:
                slice_add_into(out, pw, self.ring.i_sigma_pow(sigma, r))
            r += 1
            if r > 4 * (k + self.jmax + 2):
                break
        out = slice_clean(out)
        self._exp_cache[key] = out
        return out

    def layer(self, k):
        if k in self._layers:
            return self._layers[k]
        total = {}
        for sigma, sp, poly in self.modes:
            shift = self.r.p * sigma + self.r.q * sp
            phase = self.ring.phase(sp)
            for kb in range(0, k + 1):
                a_slice = {}
                for s, g in enumerate(poly):
                    if not g:
                        continue
                    bs = self.B_pows.layer(s, kb)
                    if bs:
                        slice_add_into(a_slice, bs, g)
                if not a_slice:
                    continue
                e_slice = self._exp_layer(sigma, k - kb)
                if not e_slice:
                    continue
                prod = slice_mul(a_slice, e_slice, self.jmax)
                for (j, nu), v in prod.items():
                    key = (j, nu + shift)
                    v = v * phase
                    sacc = total.get(key)
                    total[key] = v if sacc is None else sacc + v
        total = slice_clean(total)
        self._layers[k] = total
        return total
