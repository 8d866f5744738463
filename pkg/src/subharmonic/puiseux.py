"""Newton polygon and the Newton-Puiseux branch process.

Given the bifurcation series F(eps, beta0), the carrier is the set of
exponent pairs with nonzero coefficient; the Newton polygon is the
compact lower-left part of the convex hull of carrier + positive
quadrants.  Each segment of slope -1/mu, mu = h/p in lowest terms,
carries a face polynomial whose nonzero real roots are candidate
leading coefficients; substituting one root produces a new series and
the process repeats.  A branch ends when a simple root appears (the
constructive case), when the substituted series vanishes within
truncation (an exact terminating Puiseux polynomial), when a face has
no real nonzero root (no subharmonic solution along that path), or at
the depth cap.
"""

from enum import Enum
from fractions import Fraction
from math import gcd

import mpmath

from .coefficients import BivariateSeries
from .errors import InsufficientTruncation
from .realroots import RealPoly, isolate_real_roots


class Segment:
    """One side of the Newton polygon: p*k + h*j = s on the face."""

    __slots__ = ("mu", "h", "p", "r", "s", "jproj_len", "top", "bottom")

    def __init__(self, top, bottom):
        k1, j1 = top
        k2, j2 = bottom
        mu = Fraction(k2 - k1, j1 - j2)
        self.mu = mu
        self.h = mu.numerator
        self.p = mu.denominator
        self.r = Fraction(k1) + mu * j1
        self.s = self.p * k1 + self.h * j1
        self.jproj_len = j1 - j2
        self.top = top
        self.bottom = bottom

    def on_face(self, k, j):
        return self.p * k + self.h * j == self.s

    def __repr__(self):
        return (f"Segment(mu={self.mu}, h={self.h}, p={self.p}, s={self.s}, "
                f"l={self.jproj_len}, {self.top}->{self.bottom})")


class PolygonKind(Enum):
    POLYGON = "polygon"
    JAXIS_ONLY = "jaxis_only"
    EMPTY = "empty"


class NewtonPolygon:
    __slots__ = ("kind", "segments", "vertices")

    def __init__(self, kind, segments=(), vertices=()):
        self.kind = kind
        self.segments = list(segments)
        self.vertices = list(vertices)

    def __repr__(self):
        return f"NewtonPolygon({self.kind.value}, {self.segments})"


def newton_polygon(f):
    """Newton polygon of a BivariateSeries.

    Returns kind JAXIS_ONLY when no carrier point has j = 0 (the
    beta0 = 0 solution path) and EMPTY for an empty carrier.
    """
    pts = f.carrier()
    if not pts:
        return NewtonPolygon(PolygonKind.EMPTY)
    if all(j > 0 for _, j in pts):
        return NewtonPolygon(PolygonKind.JAXIS_ONLY)
    # Pareto staircase: keep points not dominated toward the origin
    best = {}
    for k, j in pts:
        if k not in best or j < best[k]:
            best[k] = j
    stair = []
    min_j = None
    for k in sorted(best):
        j = best[k]
        if min_j is None or j < min_j:
            stair.append((k, j))
            min_j = j
    # lower-left convex hull over the staircase, dropping collinear middles
    hull = []
    for pt in stair:
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], pt) <= 0:
            hull.pop()
        hull.append(pt)
    segments = [Segment(hull[i], hull[i + 1]) for i in range(len(hull) - 1)]
    return NewtonPolygon(PolygonKind.POLYGON, segments, hull)


def _cross(o, a, b):
    return ((a[0] - o[0]) * (b[1] - o[1])
            - (a[1] - o[1]) * (b[0] - o[0]))


def apply_sign(f, sigma0):
    """Twist F_{k,j} -> F_{k,j} sigma0^k, turning F(eps, .) into the
    series in |eps| used by the process for the chosen sign of eps."""
    if sigma0 == 1:
        return f
    return BivariateSeries({(k, j): (c if k % 2 == 0 else -c)
                            for (k, j), c in f.coeffs.items()},
                           f.Kmax, f.Jmax, f.var_names)


def face_polynomial(f, seg, sigma0=1, step=0):
    """P(c) = sum of face coefficients times c^j along one segment.

    At step 0 the coefficients are twisted by sigma0^k; later steps run
    in the already sign-fixed variable and take the coefficients as is.
    """
    coeffs = {}
    for (k, j), c in f.coeffs.items():
        if seg.on_face(k, j):
            if step == 0 and sigma0 == -1 and k % 2 == 1:
                c = -c
            coeffs[j] = coeffs.get(j, 0) + c
    deg = max(coeffs, default=0)
    return RealPoly([coeffs.get(j, Fraction(0)) for j in range(deg + 1)])


def substitute_step(f, c, h, p, s, jmax=None):
    """Recenter on the root c of a face with data (h, p, s).

    Implements F(eta^p, (c + y) eta^h) = eta^s * F_next(eta, y): each
    input term (k, j) spreads binomially over j' <= j at the new order
    k' = k*p + j*h - s.  The output truncation is the largest order
    guaranteed complete given the input rectangle.
    """
    out_kmax = min((f.Kmax + 1) * p - s - 1, (f.Jmax + 1) * h - s - 1)
    if out_kmax < 0:
        raise InsufficientTruncation(
            f"substitution needs a larger input rectangle than "
            f"({f.Kmax}, {f.Jmax})", needed_kmax=f.Kmax + 1 + s)
    jmax = f.Jmax if jmax is None else jmax
    out = {}
    numeric = isinstance(c, mpmath.mpf)
    for (k, j), coeff in f.coeffs.items():
        if numeric and not isinstance(coeff, mpmath.mpf):
            coeff = _to_mpf(coeff)
        base = k * p + j * h - s
        # binomial spread of (c + y)^j; cj walks coeff * C(j, jp) * c^(j - jp)
        cj = coeff
        for jp in range(j, -1, -1):
            kp = base
            if kp <= out_kmax and jp <= jmax and cj:
                key = (kp, jp)
                out[key] = out.get(key, 0) + cj
            # step from exponent jp to jp-1: multiply by c and the
            # binomial ratio C(j, jp-1)/C(j, jp) = jp/(j - jp + 1)
            if jp > 0:
                cj = cj * c * jp / (j - jp + 1)
    out = {key: v for key, v in out.items() if v}
    if numeric and out:
        scale = max(abs(v) for v in out.values())
        tol = mpmath.mpf(2) ** (-96) * scale
        out = {key: v for key, v in out.items() if abs(v) > tol}
    return BivariateSeries(out, out_kmax, jmax,
                           var_names=("eta", "y"))


def _to_mpf(x):
    x = Fraction(x)
    return mpmath.mpf(x.numerator) / x.denominator


class BranchStatus(Enum):
    SIMPLE_ROOT = "SimpleRootFound"
    ZERO_TAIL = "IdenticallyZeroTail"
    NO_REAL_ROOT = "NoRealRoot"
    DEPTH_EXHAUSTED = "DepthExhausted"


class BranchStep:
    """One accepted (segment, root) choice of the process."""

    __slots__ = ("c", "mult", "h", "p", "s", "mu", "r", "face", "gen_order",
                 "root_is_rational")

    def __init__(self, c, mult, seg, face, gen_order, root_is_rational):
        self.c = c
        self.mult = mult
        self.h = seg.h
        self.p = seg.p
        self.s = seg.s
        self.mu = seg.mu
        self.r = seg.r
        self.face = face
        self.gen_order = gen_order  # y-generality order at this step
        self.root_is_rational = root_is_rational

    def __repr__(self):
        return (f"BranchStep(c={self.c}, mult={self.mult}, h={self.h}, "
                f"p={self.p}, s={self.s})")


class PuiseuxBranch:
    __slots__ = ("sigma0", "steps", "status", "jaxis", "note")

    def __init__(self, sigma0, steps, status, jaxis=False, note=""):
        self.sigma0 = sigma0
        self.steps = list(steps)
        self.status = status
        self.jaxis = jaxis
        self.note = note

    @property
    def depth(self):
        return len(self.steps) - 1

    def is_exact_zero_of_f(self):
        return self.status == BranchStatus.ZERO_TAIL

    def __repr__(self):
        cs = [st.c for st in self.steps]
        return (f"PuiseuxBranch(sigma0={self.sigma0:+d}, status="
                f"{self.status.value}, roots={cs})")


class BranchExponents:
    """Cumulative Puiseux data of a finished branch: see assemble_exponents."""

    __slots__ = ("pp", "h_list", "s_list", "leading_terms", "i0")

    def __init__(self, pp, h_list, s_list, leading_terms):
        self.pp = pp
        self.h_list = h_list
        self.s_list = s_list
        self.leading_terms = leading_terms
        self.i0 = len(h_list) - 1

    def __repr__(self):
        return (f"BranchExponents(pp={self.pp}, h={self.h_list}, "
                f"s={self.s_list})")


def expand_branches(f0, sigma0, max_depth=None, bits=256):
    """Depth-first exploration of every (segment, real nonzero root) choice.

    Returns one PuiseuxBranch per explored leaf, deterministically
    ordered (segments by ascending mu, roots ascending).  A JAXIS_ONLY
    polygon yields the single beta0 == 0 branch of the Lemma-2 path.
    """
    n = f0.general_order()
    poly0 = newton_polygon(f0)
    if poly0.kind == PolygonKind.EMPTY:
        return [PuiseuxBranch(sigma0, [], BranchStatus.ZERO_TAIL, jaxis=True,
                              note="empty carrier: F vanishes within truncation")]
    if poly0.kind == PolygonKind.JAXIS_ONLY:
        return [PuiseuxBranch(sigma0, [], BranchStatus.ZERO_TAIL, jaxis=True,
                              note="carrier on the j-axis: beta0 = 0 solves "
                                   "F(eps, 0) = 0 within truncation")]
    if n is None:
        raise InsufficientTruncation(
            "series has k-axis carrier but no j-axis point; raise Jmax",
            needed_jmax=f0.Jmax + 1)
    if max_depth is None:
        max_depth = n + 2
    twisted = apply_sign(f0, sigma0)
    out = []
    _dfs(twisted, sigma0, n, 0, max_depth, [], out, bits)
    return out


def _dfs(series, sigma0, gen_order, depth, max_depth, steps, out, bits):
    polygon = newton_polygon(series)
    if polygon.kind != PolygonKind.POLYGON:
        out.append(PuiseuxBranch(sigma0, steps, BranchStatus.ZERO_TAIL,
                                 note="substituted series vanishes on the "
                                      "k-axis within truncation"))
        return
    for seg in polygon.segments:
        face = face_polynomial(series, seg)
        roots = [rec for rec in isolate_real_roots(face, bits=bits)
                 if not rec.is_zero_root]
        roots.sort(key=lambda rec: rec.sort_key() if rec.is_rational
                   else Fraction(rec.interval[0] + rec.interval[1], 2)
                   if rec.interval else 0)
        if not roots:
            out.append(PuiseuxBranch(
                sigma0, steps + [BranchStep(None, 0, seg, face, gen_order, True)],
                BranchStatus.NO_REAL_ROOT,
                note=f"face polynomial of segment mu={seg.mu} has no real "
                     f"nonzero root"))
            continue
        for rec in roots:
            if rec.is_rational:
                c = rec.value
                rational = True
            else:
                c = rec.midpoint(prec=bits)
                rational = False
            step = BranchStep(c, rec.multiplicity, seg, face, gen_order, rational)
            if rec.multiplicity == 1:
                out.append(PuiseuxBranch(sigma0, steps + [step],
                                         BranchStatus.SIMPLE_ROOT))
                continue
            sub = substitute_step(series, c, seg.h, seg.p, seg.s)
            if not sub.coeffs:
                out.append(PuiseuxBranch(sigma0, steps + [step],
                                         BranchStatus.ZERO_TAIL,
                                         note="substituted series is zero "
                                              "within truncation"))
                continue
            if depth + 1 > max_depth:
                out.append(PuiseuxBranch(sigma0, steps + [step],
                                         BranchStatus.DEPTH_EXHAUSTED))
                continue
            _dfs(sub, sigma0, rec.multiplicity, depth + 1, max_depth,
                 steps + [step], out, bits)


def assemble_exponents(branch):
    """Cumulative Puiseux exponents of a finished branch.

    pp is the product of the per-step denominators; h_list and s_list
    are the cumulative exponents so that

        beta0(eta) = sum_i c_i eta^{h_i} + tail,  eta = |eps|^{1/pp}.

    Also asserts the descending-order chain, the per-step bound
    p_i <= n_i, and pp <= n0 * ... * n_{i0} <= n0!.
    """
    if branch.status not in (BranchStatus.SIMPLE_ROOT, BranchStatus.ZERO_TAIL):
        raise ValueError(f"cannot assemble exponents of a {branch.status.value} branch")
    steps = branch.steps
    if not steps:
        return BranchExponents(1, [], [], [])
    ps = [st.p for st in steps]
    pp = 1
    for p in ps:
        pp *= p
    h_list = []
    s_list = []
    h_acc = 0
    s_acc = 0
    for i, st in enumerate(steps):
        suffix = 1
        for p in ps[i + 1:]:
            suffix *= p
        h_acc += st.h * suffix
        s_acc += st.s * suffix
        h_list.append(h_acc)
        s_list.append(s_acc)
    # order chain and denominator bounds; a denominator p_i > 1 forces a
    # strict multiplicity drop (integer-slope criterion), so pp divides a
    # product over a strictly decreasing chain below n0 and pp <= n0!
    prod_n = 1
    n_prev = None
    for st in steps:
        n_i = st.gen_order
        d_i = st.face.degree
        assert st.p <= n_i, "per-step denominator exceeds the generality order"
        if n_prev is not None:
            assert n_i <= n_prev, "generality orders must descend"
        assert d_i <= n_i, "face degree exceeds the generality order"
        if st.mult == d_i:
            assert st.mu.denominator == 1, \
                "full-multiplicity face must have integer slope"
        n_prev = st.mult
        prod_n *= n_i
    fact = 1
    for i in range(2, steps[0].gen_order + 1):
        fact *= i
    assert pp <= prod_n, "Puiseux denominator bound violated"
    assert pp <= fact, "Puiseux denominator exceeds n!"
    leading = [(h_list[i], steps[i].c) for i in range(len(steps))]
    return BranchExponents(pp, h_list, s_list, leading)
