"""Order-by-order solution of the auxiliary system in (eps, beta0).

The solution of the integral equations is expanded as a double series
in eps^k beta0^j.  At each order the Fourier data of Gamma and Phi is
assembled by convolving the input fields with all lower-order solution
layers (the beta0 free parameter enters as a leaf of weight j = 1), and
the linear solve

    beta_nu = Phi_nu/(i w nu) + omega'(A0) Gamma_nu/(i w nu)^2
    B_nu    = Gamma_nu/(i w nu)                      (nu != 0)
    B_0     = -Phi_0/omega'(A0)

fills in the next layer, w = 1/q.  The zero-mode averages Gamma_0 per
order make up the bifurcation series F(eps, beta0) that the Newton
polygon machinery consumes.
"""

from fractions import Fraction

import mpmath

from .errors import MissingLowerOrder
from .gseries import CoeffRing, FieldComposer, GSeries, PowerCache, slice_add_into
from .scalars import QQi, TrigPoly, conj


class BivariateSeries:
    """Truncated double power series with real coefficients."""

    __slots__ = ("coeffs", "Kmax", "Jmax", "var_names")

    def __init__(self, coeffs, Kmax, Jmax, var_names=("eps", "beta0")):
        self.coeffs = {kj: c for kj, c in coeffs.items() if not _is_zero(c)}
        self.Kmax = Kmax
        self.Jmax = Jmax
        self.var_names = var_names

    def get(self, k, j):
        return self.coeffs.get((k, j), Fraction(0))

    def carrier(self):
        return sorted(self.coeffs)

    def general_order(self):
        row = [j for (k, j) in self.coeffs if k == 0]
        return min(row) if row else None

    def __repr__(self):
        return (f"BivariateSeries({self.var_names[0]}^k {self.var_names[1]}^j, "
                f"K<={self.Kmax}, J<={self.Jmax}, {len(self.coeffs)} terms)")


def _is_zero(c):
    if isinstance(c, (int, Fraction)):
        return c == 0
    return c == 0


class CoefficientSolver:
    """Incremental driver for the (eps, beta0) recursion.

    Layers are indexed by the eps-order k; each layer holds every
    (j, nu) entry at once.  Entries for Gamma and Phi at layer k only
    reference solution layers <= k-1, so `advance_to(k)` is a plain
    forward sweep.
    """

    def __init__(self, sys, resonance, phase, Kmax, Jmax):
        self.sys = sys
        self.r = resonance
        self.phase = phase
        self.Kmax = Kmax
        self.Jmax = Jmax
        self.ctx = sys.ctx
        self.ring = CoeffRing(sys.ctx, z=phase.z, symbolic=phase.is_symbolic)
        one = self._lift(self.ctx.one)
        self.beta = GSeries({0: {(1, 0): one}})  # the beta0 leaf
        self.B = GSeries()
        self.beta_pows = PowerCache(self.beta, Jmax, one)
        self.B_pows = PowerCache(self.B, Jmax, one)
        self.G_comp = FieldComposer(sys.G, resonance, self.ring,
                                    self.beta_pows, self.B_pows, Jmax)
        self.F_comp = FieldComposer(sys.F, resonance, self.ring,
                                    self.beta_pows, self.B_pows, Jmax)
        self.Gamma = GSeries()
        self.Phi = GSeries()
        self.solved = 0  # layers 1..solved are complete

    def _lift(self, scalar):
        if self.phase.is_symbolic and not isinstance(scalar, TrigPoly):
            return TrigPoly.constant(scalar)
        return scalar

    def _omega_tail_layer(self, k):
        out = {}
        s = 2
        while True:
            w = self.sys.omega_taylor(s)
            if s > self.sys.omega_degree():
                break
            if w:
                bs = self.B_pows.layer(s, k)
                if bs:
                    slice_add_into(out, bs, w)
            s += 1
        return out

    def advance_to(self, k_target):
        while self.solved < k_target:
            k = self.solved + 1
            gamma = dict(self.G_comp.layer(k - 1))
            phi = dict(self.F_comp.layer(k - 1))
            slice_add_into(phi, self._omega_tail_layer(k))
            self.Gamma.set_layer(k, gamma)
            self.Phi.set_layer(k, phi)
            beta_slice = {}
            B_slice = {}
            omega1 = self.r.omega1
            for (j, nu) in set(gamma) | set(phi):
                g = gamma.get((j, nu), 0)
                f = phi.get((j, nu), 0)
                if nu == 0:
                    if f:
                        B_slice[(j, 0)] = -(f / omega1)
                    continue
                inv = self.ring.inv_i_omega_nu(nu, self.r.q)
                val_beta = f * inv + (g * inv * inv) * omega1 if g else f * inv
                if g:
                    B_slice[(j, nu)] = g * inv
                if val_beta:
                    beta_slice[(j, nu)] = val_beta
            self.beta.set_layer(k, beta_slice)
            self.B.set_layer(k, B_slice)
            self.solved = k

    # -- extraction ----------------------------------------------------

    def gamma_zero_mode(self, k, j):
        """Gamma-bar_0^(k,j) (the period average at that order)."""
        self.advance_to(k)
        v = self.Gamma.entry(k, j, 0)
        if v is None:
            return self._lift(self.ctx.zero)
        return v

    def entry(self, table_name, k, j, nu):
        self.advance_to(k)
        src = {"beta": self.beta, "B": self.B,
               "Gamma": self.Gamma, "Phi": self.Phi}[table_name]
        v = src.entry(k, j, nu)
        return v if v is not None else self._lift(self.ctx.zero)


class CoeffTable:
    """Public view of the solved (eps, beta0) tables.

    beta / B / Gamma / Phi map (k, j, nu) to coefficients; beta has no
    nu = 0 entries because beta0 is the free parameter.
    """

    def __init__(self, sys, resonance, phase, Kmax, Jmax):
        self.solver = CoefficientSolver(sys, resonance, phase, Kmax, Jmax)
        self.Kmax = Kmax
        self.Jmax = Jmax
        self.beta = {}
        self.B = {}
        self.Gamma = {}
        self.Phi = {}
        self._published = set()

    def published_through(self, k, j):
        return (k, j) in self._published

    def mode_bound(self):
        sysF = self.solver.sys.F
        sysG = self.solver.sys.G
        r = self.solver.r
        big = 0
        for tt in (sysF, sysG):
            for (s, sp) in tt.modes:
                big = max(big, abs(r.p) * abs(s) + abs(r.q) * abs(sp))
        return big

    def check_invariants(self):
        """Reality and nu-support bounds on every published entry."""
        R = self.mode_bound()
        ctx = self.solver.ctx
        for name, tab in (("beta", self.beta), ("B", self.B),
                          ("Gamma", self.Gamma), ("Phi", self.Phi)):
            for (k, j, nu), v in tab.items():
                assert abs(nu) <= k * R, f"{name}[{k},{j},{nu}] out of support"
                other = tab.get((k, j, -nu), ctx.zero)
                diff = v - conj(other)
                if ctx.exact:
                    assert not diff, f"{name}[{k},{j},{nu}] reality violated"
                else:
                    assert ctx.is_zero(diff, scale=abs(v) + 1), \
                        f"{name}[{k},{j},{nu}] reality violated"
        for (k, j, nu) in self.beta:
            assert nu != 0, "beta table carries a zero mode"


def solve_order_kj(sys, resonance, phase, table, k, j):
    """Populate the (k, j) entries of the table from lower orders.

    Orders must be visited in lexicographic (k, j) order; anything else
    raises MissingLowerOrder.
    """
    if k < 1 or j < 0 or j > table.Jmax:
        raise ValueError(f"order ({k}, {j}) outside the table rectangle")
    expected_prior = [(kk, jj) for kk in range(1, k + 1)
                      for jj in range(0, table.Jmax + 1)
                      if (kk, jj) < (k, j)]
    for kj in expected_prior:
        if kj not in table._published:
            raise MissingLowerOrder(f"order {kj} must be solved before ({k}, {j})")
    s = table.solver
    s.advance_to(k)
    for nu in _layer_nus(s, k, j):
        for name, store in (("beta", table.beta), ("B", table.B),
                            ("Gamma", table.Gamma), ("Phi", table.Phi)):
            v = s.entry(name, k, j, nu)
            if (name == "beta" and nu == 0):
                continue
            if not _is_zero_ring(v):
                store[(k, j, nu)] = v
    table._published.add((k, j))
    return table


def _layer_nus(solver, k, j):
    nus = set()
    for series in (solver.beta, solver.B, solver.Gamma, solver.Phi):
        for (jj, nu) in series.layer(k):
            if jj == j:
                nus.add(nu)
    return sorted(nus)


def _is_zero_ring(v):
    if isinstance(v, TrigPoly):
        return not v
    if isinstance(v, (QQi, int, Fraction)):
        return not v
    return v == 0


def build_table(sys, resonance, phase, Kmax, Jmax):
    """Solve the full rectangle in lexicographic order."""
    table = CoeffTable(sys, resonance, phase, Kmax, Jmax)
    for k in range(1, Kmax + 1):
        for j in range(0, Jmax + 1):
            solve_order_kj(sys, resonance, phase, table, k, j)
    return table


def f0_table(sys, resonance, phase, Kmax, Jmax, kappa_shift=0):
    """Bifurcation series F(eps, beta0) with F_{k,j} = Gamma-bar_0^(k+kappa+1,j).

    kappa_shift = 0 is the plain series; kappa_shift = kappa > 0 is the
    higher-order cascade where the first kappa epsilon-orders of the
    average vanish identically and are stripped.
    """
    if phase.is_symbolic:
        raise ValueError("f0_table needs a fixed phase; symbolic tables feed "
                         "the higher-order Melnikov search instead")
    solver = CoefficientSolver(sys, resonance, phase, Kmax + kappa_shift + 1, Jmax)
    solver.advance_to(Kmax + kappa_shift + 1)
    ctx = sys.ctx
    entries = {}
    for k in range(0, Kmax + 1):
        for j in range(0, Jmax + 1):
            v = solver.gamma_zero_mode(k + kappa_shift + 1, j)
            rv = _real_part(v, ctx)
            if rv:
                entries[(k, j)] = rv
    if not ctx.exact and entries:
        scale = max(abs(v) for v in entries.values())
        tol = mpmath.mpf(2) ** (-(ctx.bits // 2)) * scale
        entries = {kj: v for kj, v in entries.items() if abs(v) > tol}
    return BivariateSeries(entries, Kmax, Jmax)


def _real_part(v, ctx):
    if isinstance(v, QQi):
        assert v.im == 0, "zero-mode average must be real"
        return v.re
    if isinstance(v, (int, Fraction)):
        return Fraction(v)
    assert abs(mpmath.im(v)) <= mpmath.mpf(2) ** (-(ctx.bits // 2)) * (1 + abs(v))
    return mpmath.re(v)


def general_order(f0):
    """Least j with F_{0,j} != 0, or None when the k = 0 row vanishes
    within truncation (the NotGeneral outcome)."""
    return f0.general_order()
