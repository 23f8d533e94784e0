"""Exact case analysis for the m = 2|G| classification.

The unknown tensor b^{r,s}_{t,u}(g) with |Lambda| = 2 splits into four cases
according to (chi_1, chi_2, eps, J):

    Case I.   chi_1 = chi_2 = 1, eps = +1, J e_t = e_t
    Case II.  chi_1 = chi_2 = 1, eps = -1, J e_1 = e_2, J e_2 = -e_1
    Case III. chi_1 = 1, chi_2 of order 2, eps = +1, J e_t = e_t
    Case IV.  chi_2 = chi_1^{-1}, chi_1^2 != 1   (never occurs)

``case_feasibility`` reproduces the refutation lemmas in exact arithmetic and
returns either a refutation naming the violated constraint or a feasibility
certificate with the surviving parameter branches.  All numbers live in a
cyclotomic field Q(zeta_N) chosen large enough to contain the bicharacter and
form values, the cube-root scalar c, sqrt(n) and the quadratic irrationality
of d; elements are sympy ANP values, so every zero test is exact.  The checks
are the closed-form g = 0 values, the eigenspace dimension preconditions, the
norm identities on pinned eigenspaces, the order-2 element relations, and a
per-point decision tree on order-2 elements for the one stubborn Case II
configuration.  A refutation is only reported on an exact contradiction, so
zero-counts derived from these certificates do not rest on numerical search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
import numpy as np
import sympy as sp
from sympy.polys.domains import QQ

from .abelian import Bicharacter, FiniteAbelianGroup, Phase, QuadraticForm

__all__ = [
    "CaseTag",
    "Feasibility",
    "case_tags",
    "case_feasibility",
    "all_case_feasibilities",
    "ExactContext",
]


@dataclass(frozen=True)
class CaseTag:
    kind: str  # "I", "II", "III", "IV"
    omegas: tuple[int, int] | None = None  # exponents of zeta3 (Case I)
    omega: int | None = None  # exponent of zeta3 (Case II)
    chi: tuple[int, ...] | None = None  # order-2 character as g_chi (Case III)

    def __str__(self):
        if self.kind == "I":
            return f"I(z3^{self.omegas[0]}, z3^{self.omegas[1]})"
        if self.kind == "II":
            return f"II(z3^{self.omega})"
        if self.kind == "III":
            return f"III(chi=<.,{self.chi}>)"
        return "IV"


@dataclass
class Feasibility:
    tag: CaseTag
    feasible: bool
    refuted_by: str | None = None
    details: str = ""
    witnesses: list = field(default_factory=list)
    inconclusive: bool = False

    def __str__(self):
        if self.feasible:
            extra = " (inconclusive)" if self.inconclusive else ""
            return f"{self.tag}: feasible{extra} {self.details}"
        return f"{self.tag}: refuted by {self.refuted_by} {self.details}"


def case_tags(G: FiniteAbelianGroup, b: Bicharacter | None = None) -> list[CaseTag]:
    tags = [CaseTag("I", omegas=(i, j)) for i in range(3) for j in range(i, 3)]
    tags += [CaseTag("II", omega=j) for j in range(3)]
    for g in G:
        if G.element_order(g) == 2:
            tags.append(CaseTag("III", chi=g))
    tags.append(CaseTag("IV"))
    return tags


# ---------------------------------------------------------------------------
# the exact cyclotomic context


def _squarefree(n: int) -> int:
    out, d = 1, 2
    while d * d <= n:
        e = 0
        while n % d == 0:
            n //= d
            e += 1
        if e % 2:
            out *= d
        d += 1
    return out * n


def _odd_primes(n: int) -> set[int]:
    out, d = set(), 3
    while n % 2 == 0:
        n //= 2
    while d * d <= n:
        while n % d == 0:
            out.add(d)
            n //= d
        d += 2
    if n > 1:
        out.add(n)
    return out


class ExactContext:
    """Exact rotation/eigen data for one (bicharacter, form) pair at m = 2n."""

    def __init__(self, G: FiniteAbelianGroup, b: Bicharacter, a: QuadraticForm):
        self.G = G
        self.n = n = G.order
        self.m = 2 * n
        self.bichar = b
        self.form = a
        els = G.elements()
        self.els = els

        dens = {24, 4}
        for row in b.gram:
            for p in row:
                dens.add(p.den)
        for p in a.values:
            dens.add(p.den)
        D0 = _squarefree(self.m * self.m + 4 * n)
        sq_args = {_squarefree(n), D0}
        primes = set()
        for s in sq_args:
            primes |= _odd_primes(s)
            if s % 2 == 0:
                dens.add(8)
        N = 1
        for x in dens | primes:
            N = math.lcm(N, x)
        self.N = N
        self._build_field()

        self.sqrt_n = self._sqrt_int(_squarefree(n)) * self.int(math.isqrt(n // _squarefree(n)))
        # d = (m + sqrt(m^2 + 4n)) / 2 as a field element
        Dfull = self.m * self.m + 4 * n
        s0 = int(math.isqrt(Dfull // D0))
        self.d = self._mul_q(self.int(self.m) + self.int(s0) * self._sqrt_int(D0),
                             Fraction(1, 2))
        self.inv_d = self.inv(self.d)

        self.B = [[self.phase(b.phase(g, h)) for h in els] for g in els]
        self.a = [self.phase(a.phase(g)) for g in els]
        # c with c^3 a_hat(0) = 1
        asum = self.zero
        for x in self.a:
            asum = asum + x
        ahat0 = asum * self.inv(self.sqrt_n)
        c = None
        for k in range(self.N):
            if (self.zpow(3 * k) * ahat0) == self.one:
                c = self.zpow(k)
                self.c_exponent = k
                break
        if c is None:
            raise ValueError("no cube-root scalar c in the chosen field")
        self.c = c
        inv_sqrt_n = self.inv(self.sqrt_n)
        self.R = [
            [self.conj(self.c * self.a[i]) * self.B[i][j] * inv_sqrt_n
             for j in range(n)]
            for i in range(n)
        ]
        self.zeta3 = self.zpow(self.N // 3)
        self._eig: dict[int, dict] = {}

    # -- field plumbing ------------------------------------------------------

    def _build_field(self):
        N = self.N
        zeta = sp.exp(2 * sp.pi * sp.I / N)
        self.K = QQ.algebraic_field(zeta)
        self.one = self.K.one
        self.zero = self.K.zero
        gen = self.K.from_sympy(zeta)
        self._zpows = [self.one]
        for _ in range(N - 1):
            self._zpows.append(self._zpows[-1] * gen)
        deg = len(self._zpows[1].to_list()) if N > 1 else 1
        self.deg = self.K.mod.degree() if hasattr(self.K, "mod") else deg
        self._conj_basis = [self.zpow((N - j) % N) for j in range(self.deg)]
        self._numeric_pows = np.exp(2j * np.pi * np.arange(self.deg) / N)
        self.K_two = self.int(2)

    def zpow(self, j: int):
        return self._zpows[j % self.N]

    def int(self, k: int):
        return self.K.convert(k)

    def q(self, fr: Fraction):
        return self.K.convert(QQ(fr.numerator, fr.denominator))

    def _mul_q(self, a, fr: Fraction):
        return a * self.q(fr)

    def phase(self, p: Phase):
        return self.zpow(p.num * self.N // p.den)

    def _coeffs(self, a) -> list[Fraction]:
        lst = [Fraction(int(x.numerator), int(x.denominator)) for x in a.to_list()]
        lst = lst[::-1]  # ascending powers of the generator
        lst += [Fraction(0)] * (self.deg - len(lst))
        return lst

    def conj(self, a):
        out = self.zero
        for j, cj in enumerate(self._coeffs(a)):
            if cj:
                out = out + self.q(cj) * self._conj_basis[j]
        return out

    def re(self, a):
        return (a + self.conj(a)) * self.q(Fraction(1, 2))

    def im(self, a):
        i_unit = self.zpow(self.N // 4)
        return (a - self.conj(a)) * self.inv(self.K_two * i_unit)

    def inv(self, a):
        return a ** (-1)

    def numeric(self, a) -> complex:
        cs = np.array([float(c) for c in self._coeffs(a)])
        return complex(np.dot(cs, self._numeric_pows))

    def numeric_hp(self, a, dps: int = 60) -> complex:
        import mpmath

        with mpmath.workdps(dps):
            tot = mpmath.mpc(0)
            for j, cj in enumerate(self._coeffs(a)):
                if cj:
                    tot += mpmath.mpf(cj.numerator) / mpmath.mpf(cj.denominator) \
                        * mpmath.e ** (2j * mpmath.pi * j / self.N)
            return complex(tot)

    def is_zero(self, a) -> bool:
        return a == self.zero

    def sign(self, a) -> int:
        """Certified sign of an exactly real field element."""
        if self.is_zero(a):
            return 0
        v = self.numeric(a)
        if abs(v.real) > 1e-8 and abs(v.imag) < abs(v.real) * 1e-6:
            return 1 if v.real > 0 else -1
        v = self.numeric_hp(a)
        if abs(v.real) < 1e-40:
            raise ArithmeticError("cannot certify sign")
        return 1 if v.real > 0 else -1

    def _sqrt_int(self, s: int):
        """sqrt of a squarefree positive integer as a field element."""
        if s == 1:
            return self.one
        out = self.one
        rem = s
        if rem % 2 == 0:
            out = out * (self.zpow(self.N // 8) + self.zpow(self.N - self.N // 8))
            rem //= 2
        p = 3
        while p * p <= rem or rem > 1:
            if rem % p == 0:
                g = self.zero
                for k in range(1, p):
                    leg = pow(k, (p - 1) // 2, p)
                    sgn = 1 if leg == 1 else -1
                    g = g + self.int(sgn) * self.zpow(k * self.N // p)
                if p % 4 == 3:
                    # g = i sqrt(p); divide by i
                    g = g * self.inv(self.zpow(self.N // 4))
                out = out * g
                rem //= p
            if rem == 1:
                break
            p += 2
        approx = self.numeric(out)
        if abs(approx - math.sqrt(s)) > 1e-6:
            out = -out
            approx = self.numeric(out)
        if abs(approx - math.sqrt(s)) > 1e-6:
            raise ArithmeticError(f"sqrt({s}) construction failed")
        return out

    # -- the anti-unitary J f(g) = conj(a(g) f(-g)) ---------------------------

    def J_apply(self, v: list):
        G, els = self.G, self.els
        out = [self.zero] * self.n
        for i, g in enumerate(els):
            j = G.index_of(G.neg(g))
            out[i] = self.conj(self.a[i] * v[j])
        return out

    # -- exact eigenspaces -----------------------------------------------------

    def eig(self, k: int) -> dict:
        k = k % 3
        if k in self._eig:
            return self._eig[k]
        n = self.n
        w = self.zeta3 ** k
        M = [[self.R[i][j] - (w if i == j else self.zero) for j in range(n)]
             for i in range(n)]
        basis = self._nullspace(M)
        data: dict = {"dim": len(basis), "basis": basis}
        jfixed = self._j_fixed_basis(basis)
        data["jfixed"] = jfixed
        data["eval0_zero"] = all(self.is_zero(v[0]) for v in basis) if basis else True
        f0 = f0p = None
        if jfixed:
            vals0 = [v[0] for v in jfixed]
            nz = [i for i, x in enumerate(vals0) if not self.is_zero(x)]
            if nz:
                i0 = nz[0]
                inv0 = self.inv(vals0[i0])
                f0 = [x * inv0 for x in jfixed[i0]]
                others = []
                for i, v in enumerate(jfixed):
                    if i == i0:
                        continue
                    cand = [v[c] * vals0[i0] - jfixed[i0][c] * vals0[i] for c in range(n)]
                    if not all(self.is_zero(x) for x in cand):
                        others.append(cand)
                if others:
                    f0p = others[0]
            else:
                f0p = jfixed[0]
        data["f0"] = f0
        data["f0p"] = f0p
        data["norm_f0"] = self.vec_norm2(f0) if f0 is not None else None
        data["norm_f0p"] = self.vec_norm2(f0p) if f0p is not None else None
        self._eig[k] = data
        return data

    def vec_norm2(self, v: list):
        out = self.zero
        for x in v:
            out = out + x * self.conj(x)
        return out

    def _nullspace(self, M: list[list]) -> list[list]:
        rows = len(M)
        cols = len(M[0]) if rows else 0
        A = [row[:] for row in M]
        pivots: list[int] = []
        r = 0
        for c in range(cols):
            pr = None
            for rr in range(r, rows):
                if not self.is_zero(A[rr][c]):
                    pr = rr
                    break
            if pr is None:
                continue
            A[r], A[pr] = A[pr], A[r]
            inv = self.inv(A[r][c])
            A[r] = [x * inv for x in A[r]]
            for rr in range(rows):
                if rr != r and not self.is_zero(A[rr][c]):
                    f = A[rr][c]
                    A[rr] = [x - f * y for x, y in zip(A[rr], A[r])]
            pivots.append(c)
            r += 1
            if r == rows:
                break
        free = [c for c in range(cols) if c not in pivots]
        out = []
        for fc in free:
            v = [self.zero] * cols
            v[fc] = self.one
            for i, pc in enumerate(pivots):
                v[pc] = -A[i][fc]
            out.append(v)
        return out

    def _j_fixed_basis(self, basis: list[list]) -> list[list]:
        """Real basis of {u in span(basis): J u = u}, via the real-linear
        kernel of u - J u in coordinates u = sum (x_{2i} + i x_{2i+1}) v_i."""
        if not basis:
            return []
        imgs = [self.J_apply(v) for v in basis]
        k = len(basis)
        n = self.n
        i_unit = self.zpow(self.N // 4)
        cols = []
        for i in range(k):
            cols.append([imgs[i][c] - basis[i][c] for c in range(n)])
            cols.append([-i_unit * (imgs[i][c] + basis[i][c]) for c in range(n)])
        A = [[self.zero] * (2 * k) for _ in range(2 * n)]
        for j, col in enumerate(cols):
            for c in range(n):
                A[2 * c][j] = self.re(col[c])
                A[2 * c + 1][j] = self.im(col[c])
        out = []
        for coeffs in self._nullspace(A):
            vec = [self.zero] * n
            for i in range(k):
                coef = coeffs[2 * i] + i_unit * coeffs[2 * i + 1]
                for c in range(n):
                    vec[c] = vec[c] + coef * basis[i][c]
            if not all(self.is_zero(x) for x in vec):
                out.append(vec)
        return out


# ---------------------------------------------------------------------------
# polynomials in the branch parameter t


class KPoly:
    """Polynomial in one real variable with exact field coefficients."""

    def __init__(self, ctx: ExactContext, coeffs: list):
        while len(coeffs) > 1 and ctx.is_zero(coeffs[-1]):
            coeffs = coeffs[:-1]
        self.ctx = ctx
        self.coeffs = coeffs

    @staticmethod
    def const(ctx, a):
        return KPoly(ctx, [a])

    @staticmethod
    def tvar(ctx):
        return KPoly(ctx, [ctx.zero, ctx.one])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return all(self.ctx.is_zero(c) for c in self.coeffs)

    def __add__(self, other):
        other = self._lift(other)
        n = max(len(self.coeffs), len(other.coeffs))
        cs = []
        for i in range(n):
            a = self.coeffs[i] if i < len(self.coeffs) else self.ctx.zero
            b = other.coeffs[i] if i < len(other.coeffs) else self.ctx.zero
            cs.append(a + b)
        return KPoly(self.ctx, cs)

    def __neg__(self):
        return KPoly(self.ctx, [-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __mul__(self, other):
        other = self._lift(other)
        cs = [self.ctx.zero] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if self.ctx.is_zero(a):
                continue
            for j, b in enumerate(other.coeffs):
                cs[i + j] = cs[i + j] + a * b
        return KPoly(self.ctx, cs)

    def _lift(self, other):
        if isinstance(other, KPoly):
            return other
        return KPoly.const(self.ctx, other)

    def conj(self):
        return KPoly(self.ctx, [self.ctx.conj(c) for c in self.coeffs])

    def re(self):
        return KPoly(self.ctx, [self.ctx.re(c) for c in self.coeffs])

    def im(self):
        return KPoly(self.ctx, [self.ctx.im(c) for c in self.coeffs])

    def abs2(self):
        return self * self.conj()

    def eval(self, x):
        out = self.ctx.zero
        for c in reversed(self.coeffs):
            out = out * x + c
        return out

    def monic(self):
        lead = self.coeffs[-1]
        inv = self.ctx.inv(lead)
        return KPoly(self.ctx, [c * inv for c in self.coeffs])

    def rem(self, other: "KPoly") -> "KPoly":
        a = self.coeffs[:]
        b = other.coeffs
        invlead = self.ctx.inv(b[-1])
        while len(a) >= len(b) and not all(self.ctx.is_zero(c) for c in a):
            while len(a) > 1 and self.ctx.is_zero(a[-1]):
                a.pop()
            if len(a) < len(b):
                break
            f = a[-1] * invlead
            shift = len(a) - len(b)
            for i, cb in enumerate(b):
                a[shift + i] = a[shift + i] - f * cb
            a.pop()
        return KPoly(self.ctx, a if a else [self.ctx.zero])


def _poly_gcd(ps: list[KPoly]) -> KPoly:
    ctx = ps[0].ctx
    g = ps[0]
    for p in ps[1:]:
        a, b = g, p
        while not b.is_zero():
            a, b = b, a.rem(b)
        g = a.monic() if a.degree > 0 or not ctx.is_zero(a.coeffs[0]) else a
    return g


def _resolve_t_system(ctx: ExactContext, equations: list[KPoly],
                      domain_bound: bool = True):
    """Decide {p(t) = 0, t real, |t| <= 1}: returns (status, witnesses)."""
    consts, lins, quads, higher = [], [], [], []
    reals: list[KPoly] = []
    for e in equations:
        reals.append(e.re())
        reals.append(e.im())
    for p in reals:
        if p.is_zero():
            continue
        if p.degree == 0:
            consts.append(p)
        elif p.degree == 1:
            lins.append(p)
        elif p.degree == 2:
            quads.append(p)
        else:
            higher.append(p)
    for p in consts:
        if not ctx.is_zero(p.coeffs[0]):
            return "refuted", []
    if lins:
        t0 = -lins[0].coeffs[0] * ctx.inv(lins[0].coeffs[1])
        for p in lins[1:] + quads + higher:
            if not ctx.is_zero(p.eval(t0)):
                return "refuted", []
        if domain_bound:
            v = ctx.numeric(t0).real
            if abs(v) > 1 + 1e-12:
                one_minus = ctx.one - t0 * t0
                if ctx.sign(one_minus) < 0:
                    return "refuted", []
        return "feasible", [t0]
    if not quads and not higher:
        return "feasible", [None]
    if higher:
        # not needed for the implemented lemmas; stay conservative
        return "feasible", [None]
    g = _poly_gcd(quads)
    if g.degree == 0:
        if ctx.is_zero(g.coeffs[0]):
            return "feasible", [None]
        return "refuted", []
    if g.degree == 1:
        t0 = -g.coeffs[0] * ctx.inv(g.coeffs[1])
        for p in quads:
            if not ctx.is_zero(p.eval(t0)):
                return "refuted", []
        if domain_bound:
            one_minus = ctx.one - t0 * t0
            if ctx.sign(one_minus) < 0:
                return "refuted", []
        return "feasible", [t0]
    # all quadratics proportional to g: decide a real root in [-1, 1]
    a2, a1, a0 = g.coeffs[2], g.coeffs[1], g.coeffs[0]
    disc = a1 * a1 - ctx.int(4) * a2 * a0
    sd = ctx.sign(disc)
    if sd < 0:
        return "refuted", []
    if not domain_bound:
        return "feasible", [None]
    pm1 = g.eval(-ctx.one)
    pp1 = g.eval(ctx.one)
    s_m1, s_p1 = ctx.sign(pm1), ctx.sign(pp1)
    if s_m1 == 0 or s_p1 == 0 or s_m1 != s_p1:
        return "feasible", [None]
    # both endpoint values have the same sign: a root lies inside iff the
    # vertex is inside and the parabola crosses
    vertex_in = ctx.sign(ctx.int(4) * a2 * a2 - a1 * a1)  # |(-a1/2a2)| <= 1
    s_a2 = ctx.sign(a2)
    if sd > 0 and vertex_in >= 0 and s_m1 == s_a2:
        return "feasible", [None]
    if sd == 0 and vertex_in >= 0:
        return "feasible", [None]
    return "refuted", []


# ---------------------------------------------------------------------------
# Cases I and II


def _mu_components(ctx, mu0: KPoly, Rmu0: KPoly, R2mu0: KPoly) -> list[KPoly]:
    third = ctx.q(Fraction(1, 3))
    out = []
    for k in range(3):
        zk = ctx.zeta3 ** ((-k) % 3)
        zk2 = ctx.zeta3 ** k
        out.append((mu0 + Rmu0 * zk + R2mu0 * zk2) * KPoly.const(ctx, third))
    return out


def _case_I(ctx: ExactContext, tag: CaseTag) -> Feasibility:
    n = ctx.n
    w1 = ctx.zeta3 ** tag.omegas[0]
    w2 = ctx.zeta3 ** tag.omegas[1]
    if tag.omegas[0] == tag.omegas[1]:
        if ctx.eig(tag.omegas[0])["dim"] < 2:
            return Feasibility(tag, False, "CaseI3 eigenspace dimension",
                               f"dim ker(R - z3^{tag.omegas[0]}) < 2")
    s_exp = (tag.omegas[0] + tag.omegas[1]) % 3
    k_excl = (-s_exp) % 3
    included = [k for k in range(3) if k != k_excl]
    inv2rn = ctx.inv(ctx.K_two * ctx.sqrt_n)
    half_d = ctx.inv_d * ctx.q(Fraction(1, 2))
    i_unit = ctx.zpow(ctx.N // 4)
    T = KPoly.tvar(ctx)
    C = lambda a: KPoly.const(ctx, a)

    branches = []
    for kappa2 in (1, -1):
        xi0 = C(-half_d) - T * C(inv2rn)
        eta_sq = (C(ctx.one) - T * T) * C(ctx.q(Fraction(1, 4 * n)))
        mu0 = C(-half_d) + T * C(inv2rn)
        Rmu0 = (T + C(ctx.int(kappa2) * i_unit)) * C(ctx.conj(w1 * w2) * inv2rn)
        R2mu0 = (T - C(ctx.int(kappa2) * i_unit)) * C(w1 * w2 * inv2rn)
        branches.append(("branch1", {"kappa2": kappa2},
                         xi0, eta_sq, mu0, Rmu0, R2mu0, True))
    for kappa1 in (1, -1):
        for kappa2 in (1, -1):
            k1 = ctx.int(kappa1)
            xi0 = C(-half_d - k1 * inv2rn)
            mu0 = C(-half_d + k1 * inv2rn)
            Rmu0 = C(ctx.conj(w1 * w2) * (-k1 + ctx.int(kappa2) * i_unit) * inv2rn)
            R2mu0 = C(w1 * w2 * (-k1 - ctx.int(kappa2) * i_unit) * inv2rn)
            branches.append(("branch2", {"kappa1": kappa1, "kappa2": kappa2},
                             xi0, C(ctx.zero), mu0, Rmu0, R2mu0, False))

    surviving = []
    for name, params, xi0, eta_sq, mu0, Rmu0, R2mu0, has_t in branches:
        mu_k = _mu_components(ctx, mu0, Rmu0, R2mu0)
        eqs: list[KPoly] = []
        for k in range(3):
            eqs.append(mu_k[k].im())  # J-fixed values at the unit are real
        pin_norm = {}
        for k in range(3):
            e = ctx.eig(k)
            if e["dim"] == 0 or e["eval0_zero"]:
                eqs.append(mu_k[k])
                pin_norm[k] = KPoly.const(ctx, ctx.zero) if e["dim"] == 0 else None
            elif e["dim"] == 1 and e["f0"] is not None:
                pin_norm[k] = mu_k[k].abs2() * C(e["norm_f0"])
            else:
                pin_norm[k] = None
        for omega_exp in set(tag.omegas):
            e = ctx.eig(omega_exp)
            if e["dim"] == 0 or e["eval0_zero"]:
                eqs.append(xi0)
                eqs.append(eta_sq)
        if all(pin_norm[k] is not None for k in included):
            tot = pin_norm[included[0]] + pin_norm[included[1]]
            eqs.append(tot - C(ctx.q(Fraction(1, 3))))
        if tag.omegas[0] != tag.omegas[1]:
            for small_exp in set(tag.omegas):
                e_small = ctx.eig(small_exp)
                if (e_small["dim"] == 1 and e_small["f0"] is not None
                        and pin_norm[k_excl] is not None):
                    eqs.append((xi0 * xi0 - eta_sq - eta_sq) * C(e_small["norm_f0"])
                               - pin_norm[k_excl] * C(ctx.int(3)) + C(ctx.inv_d))
            dims = {exp: ctx.eig(exp)["dim"] for exp in tag.omegas}
            big = [exp for exp in set(tag.omegas) if dims[exp] == 2]
            small = [exp for exp in set(tag.omegas) if dims[exp] == 1]
            if big and small:
                ebig, esmall = ctx.eig(big[0]), ctx.eig(small[0])
                if (ebig["f0"] is not None and ebig["f0p"] is not None
                        and esmall["f0"] is not None):
                    for gi, g in enumerate(ctx.els):
                        if ctx.G.element_order(g) != 2:
                            continue
                        if not ctx.is_zero(ebig["f0p"][gi]):
                            continue
                        diff = (ebig["f0"][gi] * ctx.conj(ebig["f0"][gi])
                                - esmall["f0"][gi] * ctx.conj(esmall["f0"][gi]))
                        if not ctx.is_zero(diff):
                            eqs.append(xi0 * xi0 - eta_sq - eta_sq)
                            break
        status, wit = _resolve_t_system(ctx, eqs, domain_bound=has_t)
        if status == "feasible":
            surviving.append((name, params, wit))
    if surviving:
        det = "; ".join(
            f"{nm}{pr}" + (f" t={ctx.numeric(w[0]).real:.6f}" if w and w[0] is not None else "")
            for nm, pr, w in surviving)
        return Feasibility(tag, True, details=det, witnesses=surviving,
                           inconclusive=True)
    return Feasibility(tag, False,
                       "CaseI g=0 values / norm identities (I51, I52, order-2 relation)",
                       "all kappa branches exactly contradicted")


def _case_II(ctx: ExactContext, tag: CaseTag) -> Feasibility:
    n = ctx.n
    j = tag.omega % 3
    w = ctx.zeta3 ** j
    e_j = ctx.eig(j)
    if e_j["dim"] < 2:
        return Feasibility(tag, False, "CaseII3 eigenspace dimension",
                           f"dim ker(R - z3^{j}) = {e_j['dim']} < 2")
    k_excl = j
    included = [k for k in range(3) if k != k_excl]
    inv2rn = ctx.inv(ctx.K_two * ctx.sqrt_n)
    half_d = ctx.inv_d * ctx.q(Fraction(1, 2))
    i_unit = ctx.zpow(ctx.N // 4)
    T = KPoly.tvar(ctx)
    C = lambda a: KPoly.const(ctx, a)

    branches = []
    for kappa1 in (1, -1):
        mu0 = (C(ctx.int(kappa1)) - T) * C(i_unit * inv2rn)
        Rmu0 = C(-w * half_d) - T * C(w * i_unit * inv2rn)
        R2mu0 = C(ctx.conj(w) * half_d) - T * C(ctx.conj(w) * i_unit * inv2rn)
        absxi0_sq = (C(ctx.int(kappa1)) + T) * (C(ctx.int(kappa1)) + T) \
            * C(ctx.q(Fraction(1, 4 * n)))
        abseta_sq = (C(ctx.one) - T * T) * C(ctx.q(Fraction(1, 4 * n)))
        branches.append(("branch1", {"kappa1": kappa1}, mu0, Rmu0, R2mu0,
                         absxi0_sq, abseta_sq, True))
    for kappa in (1, -1):
        mu0 = C(ctx.int(kappa) * i_unit * ctx.inv(ctx.sqrt_n))
        Rmu0 = C(w * (-half_d - ctx.int(kappa) * i_unit * inv2rn))
        R2mu0 = C(ctx.conj(w) * (half_d - ctx.int(kappa) * i_unit * inv2rn))
        branches.append(("branch2", {"kappa": kappa}, mu0, Rmu0, R2mu0,
                         C(ctx.zero), C(ctx.zero), False))

    surviving = []
    for name, params, mu0, Rmu0, R2mu0, absxi0_sq, abseta_sq, has_t in branches:
        if name == "branch2":
            zero_at_0 = sum(1 for v in e_j["jfixed"] if ctx.is_zero(v[0]))
            if zero_at_0 < 2:
                continue
        mu_k = _mu_components(ctx, mu0, Rmu0, R2mu0)
        eqs: list[KPoly] = []
        for k in range(3):
            eqs.append(mu_k[k].re())  # J-odd values at the unit are imaginary
        pin_norm = {}
        for k in range(3):
            e = ctx.eig(k)
            if e["dim"] == 0 or e["eval0_zero"]:
                eqs.append(mu_k[k])
                pin_norm[k] = KPoly.const(ctx, ctx.zero) if e["dim"] == 0 else None
            elif e["dim"] == 1 and e["f0"] is not None:
                pin_norm[k] = mu_k[k].abs2() * C(e["norm_f0"])
            else:
                pin_norm[k] = None
        if e_j["eval0_zero"]:
            eqs.append(absxi0_sq)
            eqs.append(abseta_sq)
        if all(pin_norm[k] is not None for k in included):
            tot = pin_norm[included[0]] + pin_norm[included[1]]
            target = ctx.q(Fraction(1, 3)) - ctx.inv_d * ctx.q(Fraction(2, 3))
            eqs.append(tot - C(target))
        status, wit = _resolve_t_system(ctx, eqs, domain_bound=has_t)
        if status == "feasible":
            surviving.append((name, params, wit, mu_k))
    if not surviving:
        return Feasibility(tag, False, "CaseII g=0 values / norm identity",
                           "all kappa branches exactly contradicted")
    still = []
    for name, params, wit, mu_k in surviving:
        if not _case_II_order2_refutation(ctx, tag, wit, mu_k):
            still.append((name, params, wit))
    if still:
        det = "; ".join(f"{nm}{pr}" for nm, pr, _ in still)
        return Feasibility(tag, True, details=det, witnesses=still,
                           inconclusive=True)
    return Feasibility(tag, False, "CaseII order-2 element relations",
                       "per-point decision tree exactly contradicted")


def _case_II_order2_refutation(ctx: ExactContext, tag: CaseTag, wit,
                               mu_k: list[KPoly]) -> bool:
    """Exact per-point decision tree on order-2 elements.

    Preconditions: every nonzero element has order 2, a = -1 off the unit,
    the omega eigenspace has dimension 2 and kills evaluation at 0, the other
    two eigenspaces are pinned lines.  In the relative components
    mu_rel_i in ker(R - zeta3^i omega) the omega factors cancel from the
    pointwise identities, so the tree is the same for every omega.  Returns
    True only when every branch ends in an exact contradiction.
    """
    j = tag.omega % 3
    G = ctx.G
    if any(G.element_order(g) != 2 for g in ctx.els if g != G.zero()):
        return False
    for i, g in enumerate(ctx.els):
        if g != G.zero() and not ctx.is_zero(ctx.a[i] + ctx.one):
            return False
    ebig = ctx.eig(j)
    k1, k2 = (j + 1) % 3, (j + 2) % 3
    e1, e2 = ctx.eig(k1), ctx.eig(k2)
    if not (ebig["eval0_zero"] and ebig["dim"] == 2):
        return False
    if not (e1["dim"] == 1 and e1["f0"] is not None
            and e2["dim"] == 1 and e2["f0"] is not None):
        return False
    witnesses = wit if wit else [None]
    for witness in witnesses:
        if witness is None:
            if mu_k[k1].degree > 0 or mu_k[k2].degree > 0:
                return False
            mu1_0 = mu_k[k1].coeffs[0]
            mu2_0 = mu_k[k2].coeffs[0]
        else:
            mu1_0 = mu_k[k1].eval(witness)
            mu2_0 = mu_k[k2].eval(witness)
        for gi, g in enumerate(ctx.els):
            if g == G.zero():
                continue
            w1 = mu1_0 * e1["f0"][gi]
            w2 = mu2_0 * e2["f0"][gi]
            if not (ctx.is_zero(ctx.im(w1)) and ctx.is_zero(ctx.im(w2))):
                return False
            A = ctx.re(w1 + w2)
            Bv = ctx.zeta3 * w1 + ctx.zeta3 ** 2 * w2
            if not _point_candidates_empty(ctx, A, ctx.re(Bv), ctx.im(Bv)):
                return False
    return True


def _point_candidates_empty(ctx: ExactContext, A, ReB, ImB) -> bool:
    """Emptiness of the per-point system at an order-2 element.

    Unknowns P real, X, H complex with mu = P + A, R mu = P + ReB + i ImB,
    S = 2P + 2 ReB; the equations are the pointwise m=2n identities.  H != 0
    forces the P-free condition (2 ReB - 2A)^2 = 1/n; H = 0 leaves finitely
    many P candidates, each checked exactly.
    """
    n = ctx.n
    quarter = ctx.q(Fraction(1, n))
    if ctx.is_zero((ctx.K_two * ReB - ctx.K_two * A) ** 2 - quarter):
        return False  # H != 0 not excluded; no refutation attempted
    inv_sqrt_n = ctx.inv(ctx.sqrt_n)
    half2n = ctx.q(Fraction(1, 2 * n))
    # H = 0, X = 0: (P + A)^2 = 1/n, then |R mu|^2 = 1/(2n), Re[(R mu)^2] = 0
    for sgn in (1, -1):
        Pval = ctx.int(sgn) * inv_sqrt_n - A
        e1 = (Pval + ReB) ** 2 + ImB ** 2 - half2n
        e3 = (Pval + ReB) ** 2 - ImB ** 2
        if ctx.is_zero(e1) and ctx.is_zero(e3):
            return False
    # H = 0, mu = 0: P = -A
    Pval = -A
    e1 = (Pval + ReB) ** 2 + ImB ** 2 - half2n
    e3 = (Pval + ReB) ** 2 - ImB ** 2
    if ctx.is_zero(e1) and ctx.is_zero(e3):
        return False
    return True


# ---------------------------------------------------------------------------
# Case III


def _case_III(ctx: ExactContext, tag: CaseTag) -> Feasibility:
    n = ctx.n
    G = ctx.G
    g_chi = tag.chi
    if G.element_order(g_chi) != 2:
        return Feasibility(tag, False, "chi must have order 2", "")
    perp = [g for g in ctx.els if ctx.bichar.phase(g, g_chi).is_one()]
    half_d = ctx.inv_d * ctx.q(Fraction(1, 2))
    inv2rn = ctx.inv(ctx.K_two * ctx.sqrt_n)
    half = ctx.q(Fraction(1, 2))
    if n == 2:
        for kappa in (1, -1):
            mu0 = -half_d + ctx.int(kappa) * inv2rn
            if ctx.is_zero(mu0 * mu0 - half):
                return Feasibility(tag, True, details="norm identity satisfied",
                                   inconclusive=True)
        return Feasibility(tag, False, "CaseIII support/norm at |G|=2",
                           "mu(0)^2 = 1/2 fails exactly")
    if n == 4:
        gperp = [g for g in perp if g != G.zero()]
        if len(gperp) != 1:
            return Feasibility(tag, True, details="unexpected chi-annihilator",
                               inconclusive=True)
        gp_idx = G.index_of(gperp[0])
        a_gp = ctx.a[gp_idx]
        if not ctx.is_zero(a_gp + ctx.one):
            return Feasibility(tag, False, "CaseIII |G|=4: a(g_perp) != -1",
                               "Re mu(g_perp) = 0 forces a(g_perp) = -1")
        sqrt2 = ctx._sqrt_int(2)
        c24 = ctx.conj(ctx.c) ** 24
        target = ctx.inv(c24)
        re_t, im_t = ctx.re(target), ctx.im(target)
        for kappa in (1, -1):
            mu0 = -half_d + ctx.int(kappa) * inv2rn
            if ctx.is_zero(mu0 * mu0 - half) or ctx.is_zero(mu0):
                return Feasibility(tag, True, details="degenerate support",
                                   inconclusive=True)
            cos_th = sqrt2 * mu0
            y2two = ctx.one - ctx.K_two * mu0 * mu0  # = 2 y^2 = sin^2(theta)
            if ctx.sign(y2two) <= 0:
                continue
            T24 = _cheb_eval(ctx, 24, cos_th, kind="t")
            U23 = _cheb_eval(ctx, 23, cos_th, kind="u")
            cond_re = ctx.is_zero(T24 - re_t)
            cond_im = ctx.is_zero(y2two * U23 * U23 - im_t * im_t)
            if cond_re and cond_im:
                return Feasibility(tag, True, inconclusive=True,
                                   details=f"kappa={kappa} passes the 24th-power test")
        return Feasibility(tag, False, "CaseIII |G|=4: 24th-power test",
                           "(sqrt(2n) R mu(0))^12 is not a sign for any branch")
    return Feasibility(tag, True, details=f"|G| = {n} >= 8 not analyzed",
                       inconclusive=True)


def _cheb_eval(ctx: ExactContext, deg: int, x, kind: str):
    a, b = ctx.one, x  # T0, T1  /  U0 = 1, U1 = 2x
    if kind == "u":
        b = ctx.K_two * x
    if deg == 0:
        return a
    for _ in range(deg - 1):
        a, b = b, ctx.K_two * x * b - a
    return b


# ---------------------------------------------------------------------------
# entry points


def case_feasibility(G: FiniteAbelianGroup, b: Bicharacter, a: QuadraticForm,
                     tag: CaseTag, ctx: ExactContext | None = None) -> Feasibility:
    if tag.kind == "IV":
        return Feasibility(tag, False, "Case IV never occurs",
                           "norm bookkeeping on the B(g) support pattern")
    if ctx is None:
        ctx = ExactContext(G, b, a)
    if tag.kind == "I":
        return _case_I(ctx, tag)
    if tag.kind == "II":
        return _case_II(ctx, tag)
    if tag.kind == "III":
        return _case_III(ctx, tag)
    raise ValueError(f"unknown case kind {tag.kind}")


def all_case_feasibilities(G: FiniteAbelianGroup, b: Bicharacter,
                           a: QuadraticForm) -> list[Feasibility]:
    ctx = ExactContext(G, b, a)
    return [case_feasibility(G, b, a, tag, ctx=ctx) for tag in case_tags(G)]
