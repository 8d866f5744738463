"""Order-by-order solution in eta = |eps|^(1/p) along a chosen branch.

Once the Newton-Puiseux process ends in a simple root, the fractional
series is solved in three stages:

1. the finitely many leading coefficients beta0^[h_i] = c_i come from
   the branch itself;
2. every later coefficient of beta0 is fixed linearly by the tail
   recursion: the eta^(s_i0 + kappa) coefficient of the composed scalar
   equation reads C * beta0^[h_i0 + kappa] + (terms with lower tail
   indices), with C the derivative of the last face polynomial at its
   simple root, so each new coefficient is minus the known part over C;
   the known part is enumerated over integer compositions with exact
   multinomial weights and early pruning;
3. with beta0(eta) fixed, the Fourier coefficients beta-tilde[k]_nu and
   B[k]_nu follow from the same convolution recursion as the double
   series, with eps = sigma eta^p shifting orders by p and twisting
   each field factor by sigma = sign(eps).

The mean of Gamma must vanish at every computed order; that constraint
is asserted (exactly in exact mode) and any violation signals an
upstream branch error.
"""

import math
from fractions import Fraction

import mpmath

from .coefficients import f0_table
from .errors import NearSingularC, PeriodicityViolated
from .gseries import CoeffRing, FieldComposer, GSeries, PowerCache
from .phase import Phase
from .puiseux import BranchStatus, assemble_exponents
from .scalars import QQi, ScalarContext
from .series import PlanarSystem, TrigTaylor


class EtaSolution:
    """Truncated eta-series of one subharmonic solution.

    beta0 maps order k to the real coefficient of eta^k in beta0(eta);
    beta_tilde and B map (k, nu) to Fourier coefficients.  C is the
    tail-recursion constant; pp the Puiseux denominator.
    """

    __slots__ = ("pp", "sigma0", "beta0", "beta_tilde", "B", "C", "Kmax",
                 "exps", "kappa_shift", "phase", "_solver")

    def __init__(self, pp, sigma0, beta0, beta_tilde, B, C, Kmax, exps,
                 kappa_shift, phase, solver=None):
        self.pp = pp
        self.sigma0 = sigma0
        self.beta0 = beta0
        self.beta_tilde = beta_tilde
        self.B = B
        self.C = C
        self.Kmax = Kmax
        self.exps = exps
        self.kappa_shift = kappa_shift
        self.phase = phase
        self._solver = solver

    def __repr__(self):
        return (f"EtaSolution(pp={self.pp}, sigma0={self.sigma0:+d}, "
                f"Kmax={self.Kmax}, {len(self.beta_tilde)} beta-tilde terms)")


# ---------------------------------------------------------------------------
# stage 1 + 2: the scalar beta0(eta) series
# ---------------------------------------------------------------------------

class ScalarBranchSeries:
    """beta0(eta) along a branch: leading terms plus the tail recursion.

    Works directly on a bifurcation series (no system required), which
    is how the synthetic Newton-Puiseux exactness checks drive it.
    """

    def __init__(self, f0, branch, kappa_need, exact=True, bits=256):
        self.exps = assemble_exponents(branch)
        self.branch = branch
        self.exact = exact
        self.bits = bits
        self.kappa_need = kappa_need
        self.zero = Fraction(0) if exact else mpmath.mpf(0)
        steps = branch.steps
        if not steps:
            self.C = None
            self.Q = {}
            self.beta0_map = {}
            return
        last = steps[-1]
        C = last.face.derivative().eval(last.c)
        if exact:
            assert C != 0
            self.C = Fraction(C)
        else:
            C = _to_mpf(C, bits)
            if abs(C) < mpmath.mpf(10) ** -20:
                raise NearSingularC(f"|C| = {mpmath.nstr(abs(C), 8)}")
            self.C = C
        sig = branch.sigma0
        self.Q = {}
        for (s1, j), v in f0.coeffs.items():
            v = Fraction(v) if exact else _to_mpf(v, bits)
            self.Q[(s1, j)] = v if (sig == 1 or s1 % 2 == 0) else -v
        self.beta0_map = {}
        for h, c in self.exps.leading_terms:
            c = Fraction(c) if exact else _to_mpf(c, bits)
            self.beta0_map[h] = self.beta0_map.get(h, self.zero) + c
        for kappa in range(1, kappa_need + 1):
            rhs = self.tail_rhs(kappa)
            self.beta0_map[self.exps.h_list[-1] + kappa] = -(rhs / self.C)

    def tail_rhs(self, kappa):
        """Known part of the eta^(s_i0+kappa) scalar-equation coefficient.

        For each table entry Q_{s1,j}, fill the j beta0-slots with
        leading factors c_i (weight h_i) and already-known tail factors
        (weight h_i0 + n, n < kappa) so the eta-weights balance; the
        multinomial slot counts are exact integers.
        """
        exps = self.exps
        target = exps.s_list[-1] + kappa
        h_i0 = exps.h_list[-1]
        types = [(h, self.beta0_map[h]) for h in exps.h_list]
        types += [(h_i0 + n, self.beta0_map[h_i0 + n]) for n in range(1, kappa)]
        total = None
        for (s1, j), Qv in self.Q.items():
            rem = target - s1 * exps.pp
            if rem < 0:
                continue
            acc = _fill_slots(types, 0, j, rem, math.factorial(j))
            if acc is None:
                continue
            term = Qv * acc
            total = term if total is None else total + term
        return total if total is not None else self.zero

    def scalar_equation_coeff(self, m):
        """[eta^m] of sum Q_{s1,j} eta^{s1 p} beta0(eta)^j by truncated
        polynomial powers (the independent route the tail enumeration
        is asserted against)."""
        b = self.beta0_map
        one = Fraction(1) if self.exact else mpmath.mpf(1)
        pows = [{0: one}]
        jmax = max((j for (_, j) in self.Q), default=0)
        for _ in range(jmax):
            prev = pows[-1]
            nxt = {}
            for e1, v1 in prev.items():
                for e2, v2 in b.items():
                    e = e1 + e2
                    if e <= m:
                        nxt[e] = nxt.get(e, self.zero) + v1 * v2
            pows.append(nxt)
        total = self.zero
        for (s1, j), Qv in self.Q.items():
            base = s1 * self.exps.pp
            if base <= m:
                total = total + Qv * pows[j].get(m - base, self.zero)
        return total

    def assert_scalar_equation(self):
        """The composed scalar equation must vanish through every order
        the tail data covers (Lemma-14 content plus the tail solve)."""
        if not self.branch.steps:
            return
        for m in range(0, self.exps.s_list[-1] + self.kappa_need + 1):
            v = self.scalar_equation_coeff(m)
            if self.exact:
                if v != 0:
                    raise PeriodicityViolated(
                        f"scalar equation residual at eta^{m}: {v}")
            else:
                scale = max((abs(q) for q in self.Q.values()), default=1)
                tol = mpmath.mpf(10) ** (-max(1, 25 * self.bits // 256))
                if abs(v) > tol * scale:
                    raise PeriodicityViolated(
                        f"scalar equation residual at eta^{m}: {mpmath.nstr(v, 8)}")

    def c_from_multinomials(self):
        """C recomputed as the coefficient multiplying the top tail term
        in the scalar equation: sum over Q of j * Q * [leading powers].
        Cross-check form of the face-derivative C."""
        exps = self.exps
        lead = {h: c for h, c in zip(exps.h_list,
                                     (self.beta0_map[h] for h in exps.h_list))}
        one = Fraction(1) if self.exact else mpmath.mpf(1)
        jmax = max((j for (_, j) in self.Q), default=0)
        pows = [{0: one}]
        for _ in range(jmax):
            prev = pows[-1]
            nxt = {}
            for e1, v1 in prev.items():
                for e2, v2 in lead.items():
                    nxt[e1 + e2] = nxt.get(e1 + e2, self.zero) + v1 * v2
            pows.append(nxt)
        target_shift = exps.s_list[-1] - exps.h_list[-1]
        total = self.zero
        for (s1, j), Qv in self.Q.items():
            if j == 0:
                continue
            want = target_shift - s1 * exps.pp
            if want >= 0:
                total = total + j * Qv * pows[j - 1].get(want, self.zero)
        return total


def _fill_slots(types, idx, slots, weight, multinom):
    """Sum over ways to fill `slots` factor slots from types[idx:] with
    total weight `weight`; multinom carries j!/(counts so far)!.
    Returns None when nothing fits (early pruning)."""
    if slots == 0:
        return multinom if weight == 0 else None
    if idx == len(types) or weight < 0:
        return None
    min_w = min(w for w, _ in types[idx:])
    if min_w * slots > weight:
        return None
    w0, v0 = types[idx]
    total = None
    vpow = None
    for count in range(0, slots + 1):
        rest_w = weight - count * w0
        if rest_w < 0:
            break
        sub = _fill_slots(types, idx + 1, slots - count, rest_w,
                          multinom // math.factorial(count))
        if sub is not None:
            term = sub * vpow if count else sub
            total = term if total is None else total + term
        vpow = v0 if vpow is None else vpow * v0
    return total


def _to_mpf(x, bits):
    if isinstance(x, Fraction):
        with mpmath.workprec(bits):
            return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


def _numeric_tt(tt, bits):
    ctx = ScalarContext("numeric", bits)
    modes = {}
    for key, poly in tt.modes.items():
        modes[key] = tuple(c.to_mpc(bits) if isinstance(c, QQi)
                           else mpmath.mpc(c) for c in poly)
    return TrigTaylor(modes, tt.degA, ctx)


def numeric_system(sys, bits):
    """Copy of a system with all coefficients as mpc at the given bits."""
    ctx = ScalarContext("numeric", bits)
    return PlanarSystem(_numeric_tt(sys.omega, bits), _numeric_tt(sys.F, bits),
                        _numeric_tt(sys.G, bits), mpmath.mpf(sys.A0), ctx)


# ---------------------------------------------------------------------------
# stage 3: the eta recursion
# ---------------------------------------------------------------------------

class EtaSolver:
    """Driver for one branch; see the module docstring for the stages."""

    def __init__(self, sys, resonance, phase, branch, Kmax, kappa_shift=0,
                 table=None, bits=None):
        if branch.status not in (BranchStatus.SIMPLE_ROOT, BranchStatus.ZERO_TAIL):
            raise ValueError(
                f"full solutions require a SimpleRootFound or "
                f"IdenticallyZeroTail branch, not {branch.status.value}")
        self.branch = branch
        self.exps = assemble_exponents(branch)
        self.sigma0 = branch.sigma0
        self.Kmax = Kmax
        self.kappa_shift = kappa_shift
        self.r = resonance
        bits = bits or (sys.ctx.bits if not sys.ctx.exact else 256)
        self.bits = bits
        exact_branch = all(st.root_is_rational for st in branch.steps)
        self.exact = sys.ctx.exact and phase.kind == "exact" and exact_branch
        if self.exact:
            self.sys = sys
            self.phase = phase
        else:
            self.sys = sys if not sys.ctx.exact else numeric_system(sys, bits)
            if phase.kind == "exact":
                phase = Phase.numeric(phase.t0_value, bits)
            self.phase = phase
        self.ctx = self.sys.ctx
        self._setup_scalar(table)
        self._setup_recursion()

    def _setup_scalar(self, table):
        exps = self.exps
        if not self.branch.steps:
            self.scalar = ScalarBranchSeries(None, self.branch, 0,
                                             exact=self.exact, bits=self.bits)
            self.table = table
            return
        kappa_need = max(self.Kmax - min(exps.h_list[0], exps.pp), 0)
        s_i0 = exps.s_list[-1]
        need_k = -(-(s_i0 + kappa_need) // exps.pp)
        need_j = -(-(s_i0 + kappa_need) // exps.h_list[0])
        if table is None or table.Kmax < need_k or table.Jmax < need_j:
            table = f0_table(self.sys, self.r, self.phase, need_k, need_j,
                             kappa_shift=self.kappa_shift)
        self.table = table
        self.scalar = ScalarBranchSeries(table, self.branch, kappa_need,
                                         exact=self.exact, bits=self.bits)
        self.scalar.assert_scalar_equation()

    @property
    def C(self):
        return self.scalar.C

    @property
    def beta0_map(self):
        return self.scalar.beta0_map

    def _setup_recursion(self):
        ctx = self.ctx
        self.ring = CoeffRing(ctx, z=self.phase.z, symbolic=False)
        one = ctx.one
        self.beta = GSeries()
        for k, c in self.beta0_map.items():
            if k <= self.Kmax and c:
                self.beta.set_layer(k, {(0, 0): ctx.of(c) if self.exact
                                        else mpmath.mpc(c)})
        self.B = GSeries()
        self.beta_pows = PowerCache(self.beta, 0, one)
        self.B_pows = PowerCache(self.B, 0, one)
        self.G_comp = FieldComposer(self.sys.G, self.r, self.ring,
                                    self.beta_pows, self.B_pows, 0)
        self.F_comp = FieldComposer(self.sys.F, self.r, self.ring,
                                    self.beta_pows, self.B_pows, 0)
        self.Gamma = GSeries()
        self.Phi = GSeries()
        self.solved = 0

    def _omega_tail_layer(self, k):
        out = {}
        for s in range(2, self.sys.omega_degree() + 1):
            w = self.sys.omega_taylor(s)
            if w:
                for key, v in self.B_pows.layer(s, k).items():
                    out[key] = out.get(key, 0) + v * w
        return out

    def advance_to(self, k_target):
        pp = self.exps.pp
        sig = self.sigma0
        while self.solved < k_target:
            k = self.solved + 1
            gamma = {}
            phi = {}
            if k >= pp:
                for key, v in self.G_comp.layer(k - pp).items():
                    gamma[key] = v if sig == 1 else -v
                for key, v in self.F_comp.layer(k - pp).items():
                    phi[key] = v if sig == 1 else -v
            for key, v in self._omega_tail_layer(k).items():
                phi[key] = phi.get(key, 0) + v
            self.Gamma.set_layer(k, gamma)
            self.Phi.set_layer(k, phi)
            self._check_mean(k, gamma)
            beta_slice = dict(self.beta.layer(k))  # preset beta0 entry
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
                vb = f * inv + (g * inv * inv) * omega1 if g else f * inv
                if g:
                    B_slice[(j, nu)] = g * inv
                if vb:
                    beta_slice[(j, nu)] = vb
            self.beta.set_layer(k, beta_slice)
            self.B.set_layer(k, B_slice)
            self.solved = k

    def _check_mean(self, k, gamma):
        v = gamma.get((0, 0))
        if v is None:
            return
        if self.exact:
            if v:
                raise PeriodicityViolated(f"<Gamma> != 0 at eta-order {k}: {v!r}")
        else:
            scale = max((abs(x) for x in gamma.values()), default=1)
            tol = mpmath.mpf(10) ** (-max(1, 25 * self.bits // 256))
            if abs(v) > tol * max(1, scale):
                raise PeriodicityViolated(
                    f"<Gamma> != 0 at eta-order {k}: |{mpmath.nstr(abs(v), 8)}|")

    def gamma_mean(self, k):
        self.advance_to(k)
        v = self.Gamma.entry(k, 0, 0)
        return v if v is not None else self.ctx.zero

    def solution(self):
        self.advance_to(self.Kmax)
        beta0 = {k: c for k, c in sorted(self.beta0_map.items())
                 if k <= self.Kmax and c}
        bt = {}
        BB = {}
        for k in range(1, self.Kmax + 1):
            for (j, nu), v in self.beta.layer(k).items():
                if nu != 0 and v:
                    bt[(k, nu)] = v
            for (j, nu), v in self.B.layer(k).items():
                if v:
                    BB[(k, nu)] = v
        return EtaSolution(self.exps.pp, self.sigma0, beta0, bt, BB,
                           self.scalar.C, self.Kmax, self.exps,
                           self.kappa_shift, self.phase, solver=self)


def full_solution(sys, resonance, phase, branch, Kmax, kappa_shift=0,
                  table=None, bits=None):
    """Complete truncated eta-series along a finished branch."""
    solver = EtaSolver(sys, resonance, phase, branch, Kmax,
                       kappa_shift=kappa_shift, table=table, bits=bits)
    return solver.solution()


def eta_solve_order(sys, resonance, phase, branch, sol, k):
    """Advance the recursion behind `sol` through order k."""
    solver = sol._solver
    if solver is None:
        raise ValueError("solution carries no live solver")
    if k > solver.Kmax:
        raise ValueError(f"order {k} beyond the configured Kmax {solver.Kmax}")
    solver.advance_to(k)
    return solver.solution()


def tail_beta0(sol, k_rel):
    """Tail coefficient beta0^[h_i0 + k_rel] from the stored branch data."""
    solver = sol._solver
    if solver is None:
        raise ValueError("solution carries no live solver")
    scal = solver.scalar
    if not solver.branch.steps:
        return Fraction(0)
    h_i0 = scal.exps.h_list[-1]
    for kappa in range(1, k_rel + 1):
        if h_i0 + kappa not in scal.beta0_map:
            rhs = scal.tail_rhs(kappa)
            scal.beta0_map[h_i0 + kappa] = -(rhs / scal.C)
    return scal.beta0_map[h_i0 + k_rel]
