"""Solution data for the classification systems and their residual checks.

Two regimes are covered:

* ``MNSolution`` (m = |G|): the tuple (<.,.>, a, b, c) of the m=n theorem,
  checked against both the Galois-form system (Gal1)-(Gal8), written with
  c' = conj(c)/sqrt(n), and the original five m=n equations.  The two systems
  are redundant on purpose; they cross-check each other's transcription.
* ``GeneralSolution`` (m a multiple of |G|, d irrational): the normal form
  (eps, <.,.>, Lambda, chi_t, c_t, eps_t, a, b^{r,s}_{t,u}(g)) together with
  the ten tensor equations (p1)-(p10), the derived (p11), and the unitarity
  of the matrices B(g).

Residual evaluation never raises on a math failure; it returns a
:class:`ResidualReport` with one maximum absolute residual per equation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .abelian import (
    Bicharacter,
    FiniteAbelianGroup,
    GroupAutomorphism,
    QuadraticForm,
)

__all__ = [
    "QuadraticIrrational",
    "dimension_d",
    "ResidualReport",
    "MNSolution",
    "ACJData",
    "GeneralSolution",
    "residual_mn",
    "residual_general",
    "mn_to_general",
    "gauge_act",
    "aut_act",
    "gauge_group_basis",
    "sample_gauge",
    "equivalent",
    "fingerprint",
]

DEFAULT_TOL = 1e-10


def _squarefree_split(D: int) -> tuple[int, int]:
    """D = s^2 * D0 with D0 squarefree; returns (s, D0)."""
    s, rest, d = 1, D, 2
    while d * d <= rest:
        while rest % (d * d) == 0:
            rest //= d * d
            s *= d
        d += 1
    return s, rest


@dataclass(frozen=True)
class QuadraticIrrational:
    """Exact (p + q*sqrt(D))/r with D squarefree (rational iff D == 1)."""

    p: int
    q: int
    D: int
    r: int = 1

    @property
    def value(self) -> float:
        return (self.p + self.q * math.sqrt(self.D)) / self.r

    @property
    def is_rational(self) -> bool:
        return self.D == 1 or self.q == 0

    def sympy(self):
        import sympy as sp

        return (sp.Integer(self.p) + sp.Integer(self.q) * sp.sqrt(self.D)) / sp.Integer(self.r)

    def __float__(self) -> float:
        return self.value


def dimension_d(n: int, m: int) -> QuadraticIrrational:
    """d = (m + sqrt(m^2 + 4n)) / 2, the dimension solving d^2 = n + m d."""
    import math as _math

    s, D0 = _squarefree_split(m * m + 4 * n)
    if D0 == 1:
        p, q, r = m + s, 0, 2
    else:
        p, q, r = m, s, 2
    g = _math.gcd(_math.gcd(p, q), r)
    return QuadraticIrrational(p // g, q // g, D0, r // g)


@dataclass
class ResidualReport:
    per_equation: dict[str, float]
    tolerance: float = DEFAULT_TOL
    errors: list[str] = field(default_factory=list)

    @property
    def max_residual(self) -> float:
        return max(self.per_equation.values()) if self.per_equation else 0.0

    @property
    def passed(self) -> bool:
        return not self.errors and self.max_residual < self.tolerance

    def worst(self, k: int = 3) -> list[tuple[str, float]]:
        return sorted(self.per_equation.items(), key=lambda kv: -kv[1])[:k]

    def __str__(self):
        status = "pass" if self.passed else "FAIL"
        lines = [f"[{status}] max residual {self.max_residual:.3e} (tol {self.tolerance:.1e})"]
        for name, val in sorted(self.per_equation.items()):
            lines.append(f"  {name:16s} {val:.3e}")
        lines.extend(f"  error: {e}" for e in self.errors)
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# index tables


class GroupTables:
    """Dense index tables for one group, shared by the residual evaluators."""

    def __init__(self, G: FiniteAbelianGroup):
        self.G = G
        els = G.elements()
        self.n = G.order
        self.add = np.empty((self.n, self.n), dtype=int)
        self.neg = np.empty(self.n, dtype=int)
        for g in els:
            ig = G.index_of(g)
            self.neg[ig] = G.index_of(G.neg(g))
            for h in els:
                self.add[ig, G.index_of(h)] = G.index_of(G.add(g, h))
        self.zero = G.index_of(G.zero())


_TABLE_CACHE: dict[tuple[int, ...], GroupTables] = {}


def tables(G: FiniteAbelianGroup) -> GroupTables:
    key = G.factors
    if key not in _TABLE_CACHE:
        _TABLE_CACHE[key] = GroupTables(G)
    return _TABLE_CACHE[key]


# ---------------------------------------------------------------------------
# m = n solutions


@dataclass(frozen=True)
class MNSolution:
    """Data (<.,.>, a, b, c) for m = |G|; d is pinned by d^2 = n + n d."""

    group: FiniteAbelianGroup
    bichar: Bicharacter
    form: QuadraticForm
    b: np.ndarray  # complex, indexed like group.elements()
    c: complex
    provenance: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "b", np.asarray(self.b, dtype=complex))

    @property
    def n(self) -> int:
        return self.group.order

    @property
    def m(self) -> int:
        return self.group.order

    @cached_property
    def d_exact(self) -> QuadraticIrrational:
        return dimension_d(self.n, self.m)

    @property
    def d(self) -> float:
        return self.d_exact.value

    @property
    def c_prime(self) -> complex:
        return np.conj(self.c) / math.sqrt(self.n)

    def conj(self) -> "MNSolution":
        return MNSolution(self.group, self.bichar.conj(), self.form.conj(),
                          np.conj(self.b), np.conj(self.c))


def residual_mn(s: MNSolution, tolerance: float = DEFAULT_TOL) -> ResidualReport:
    """All eight Galois-form equations plus the five original m=n equations."""
    G, n, d = s.group, s.n, s.d
    T = tables(G)
    B = s.bichar.matrix()
    a = s.form.table()
    b = s.b
    cp = s.c_prime
    cc = s.c
    out: dict[str, float] = {}

    delta0 = np.zeros(n)
    delta0[T.zero] = 1.0

    out["gal1"] = abs(cp**3 - a.sum() / n**2)
    out["gal2"] = abs(d * d - d * n - n)
    Rb = cp * np.conj(a) * (B @ b)
    out["gal3"] = float(np.max(np.abs(Rb - b)))
    out["gal4"] = abs(b[T.zero] + 1 / d)
    out["gal5"] = float(np.max(np.abs(a * b * b[T.neg] - (1 / n - delta0 / d))))
    lhs6 = np.einsum("g,g,gh,gk->hk", a, b[T.neg], b[T.add], b[T.add])
    rhs6 = np.conj(B) * np.outer(b, b) - 1 / (cp * d * n)
    out["gal6"] = float(np.max(np.abs(lhs6 - rhs6)))
    Jb = np.conj(a * b[T.neg])
    out["gal7"] = float(np.max(np.abs(Jb - b)))
    out["gal8"] = 0.0 if d > 0 else float(abs(d))

    bhat = np.conj(B) @ b / math.sqrt(n)
    out["mn1"] = float(np.max(np.abs(bhat - cc * a * b[T.neg])))
    out["mn2"] = out["gal4"]
    out["mn3"] = float(np.max(np.abs(np.abs(b) ** 2 - (1 / n - delta0 / d))))
    out["mn4"] = float(np.max(np.abs(np.conj(b) - a * b[T.neg])))
    lhs5 = np.einsum("gh,gk,g->hk", b[T.add], b[T.add], np.conj(b))
    rhs5 = np.conj(B) * np.outer(b, b) - cc / (d * math.sqrt(n))
    out["mn5"] = float(np.max(np.abs(lhs5 - rhs5)))
    return ResidualReport(out, tolerance)


# ---------------------------------------------------------------------------
# general irrational solutions


@dataclass(frozen=True)
class ACJData:
    """Normal-form data on K0: involution on Lambda, characters chi_t (stored
    through the group elements g_t with chi_t = <., g_t>), cube-root scalars
    c_t, signs eps_t, global sign eps, and the base form a."""

    bichar: Bicharacter
    form: QuadraticForm
    bar: tuple[int, ...]  # involution on range(L)
    g_t: tuple[tuple[int, ...], ...]  # chi_t = <., g_t>
    c_t: tuple[complex, ...]
    eps_t: tuple[int, ...]
    eps: int

    @property
    def group(self) -> FiniteAbelianGroup:
        return self.bichar.group

    @property
    def L(self) -> int:
        return len(self.bar)

    def chi(self) -> np.ndarray:
        """chi[t, g]-value table."""
        G = self.group
        return np.array([[self.bichar(g, gt) for g in G] for gt in self.g_t])

    def validate(self) -> list[str]:
        errs = []
        L, G = self.L, self.group
        if sorted((len(self.g_t), len(self.c_t), len(self.eps_t))) != [L, L, L]:
            return ["index-set tables have inconsistent sizes"]
        if any(self.bar[self.bar[t]] != t for t in range(L)):
            errs.append("bar is not an involution")
        for t in range(L):
            if self.g_t[self.bar[t]] != G.neg(self.g_t[t]):
                errs.append(f"chi_bar(t) != chi_t^-1 at t={t}")
            if abs(self.c_t[self.bar[t]] - self.c_t[t]) > 1e-9:
                errs.append(f"c_bar(t) != c_t at t={t}")
            if self.eps_t[t] * self.eps_t[self.bar[t]] != self.eps:
                errs.append(f"eps_t*eps_tbar != eps at t={t}")
        return errs


@dataclass(frozen=True)
class GeneralSolution:
    """(eps, <.,.>, ACJ data, b^{r,s}_{t,u}(g)) for m = L * |G| irrational."""

    group: FiniteAbelianGroup
    acj: ACJData
    btensor: np.ndarray  # shape (L, L, L, L, n)
    provenance: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "btensor", np.asarray(self.btensor, dtype=complex))

    @property
    def n(self) -> int:
        return self.group.order

    @property
    def L(self) -> int:
        return self.acj.L

    @property
    def m(self) -> int:
        return self.L * self.n

    @cached_property
    def d_exact(self) -> QuadraticIrrational:
        return dimension_d(self.n, self.m)

    @property
    def d(self) -> float:
        return self.d_exact.value

    def bmatrix(self, gi: int) -> np.ndarray:
        """B(g) with ((r,t),(s,u)) entries b^{r,s}_{t,u}(g), lexicographic."""
        L = self.L
        M = np.empty((L * L, L * L), dtype=complex)
        for r in range(L):
            for t in range(L):
                for ss in range(L):
                    for u in range(L):
                        M[r * L + t, ss * L + u] = self.btensor[r, ss, t, u, gi]
        return M

    def conj(self) -> "GeneralSolution":
        acj = self.acj
        new_acj = ACJData(
            acj.bichar.conj(),
            acj.form.conj(),
            acj.bar,
            acj.g_t,
            tuple(np.conj(c) for c in acj.c_t),
            acj.eps_t,
            acj.eps,
        )
        return GeneralSolution(self.group, new_acj, np.conj(self.btensor))


def mn_to_general(s: MNSolution) -> GeneralSolution:
    """View an m=n solution as the L=1 case of the general normal form."""
    acj = ACJData(
        bichar=s.bichar,
        form=s.form,
        bar=(0,),
        g_t=(s.group.zero(),),
        c_t=(complex(s.c),),
        eps_t=(1,),
        eps=1,
    )
    bt = s.b.reshape(1, 1, 1, 1, s.n)
    return GeneralSolution(s.group, acj, bt, provenance=dict(s.provenance))


def residual_general(
    s: GeneralSolution, tolerance: float = DEFAULT_TOL, include_p10: bool = True
) -> ResidualReport:
    errs = s.acj.validate()
    if errs:
        raise ValueError("; ".join(errs))
    G, n, L, d = s.group, s.n, s.L, s.d
    T = tables(G)
    acj = s.acj
    B = acj.bichar.matrix()
    a = acj.form.table()
    chi = acj.chi()  # (L, n)
    eps_t = np.array(acj.eps_t, dtype=float)
    c_t = np.array(acj.c_t, dtype=complex)
    eps = acj.eps
    bar = np.array(acj.bar, dtype=int)
    b = s.btensor
    out: dict[str, float] = {}

    # acj scalar relation: sum_g a(g) chi_t(g) = sqrt(n) c_t^{-3}
    gsum = np.einsum("g,tg->t", a, chi)
    out["acj3"] = float(np.max(np.abs(gsum - math.sqrt(n) * c_t ** (-3.0))))

    # p1
    lhs = np.einsum("gh,rstuh->rstug", B, b) / math.sqrt(n)
    rhs = np.empty_like(b)
    for r in range(L):
        for ss in range(L):
            for t in range(L):
                for u in range(L):
                    rhs[r, ss, t, u] = (
                        eps * eps_t[r] * eps_t[t] * c_t[u] * a * chi[u]
                        * b[ss, bar[t], bar[r], u]
                    )
    out["p1"] = float(np.max(np.abs(lhs - rhs)))

    # p2, p3
    eye = np.eye(L)
    out["p2"] = float(np.max(np.abs(np.einsum("rsru->su", b[..., T.zero]) + eye / d)))
    out["p3"] = float(np.max(np.abs(np.einsum("rsts->rt", b[..., T.zero]) + eye / d)))

    # p4, p5 (B(g) column/row orthogonality)
    delta0 = np.zeros(n)
    delta0[T.zero] = 1.0
    lhs4 = np.einsum("rbtag,rstug->sbuag", np.conj(b), b)  # (s,s',u,u',g)
    rhs4 = (np.einsum("sb,ua->sbua", eye, eye)[..., None] / n
            - np.einsum("su,ba->sbua", eye, eye)[..., None] * delta0 / d)
    out["p4"] = float(np.max(np.abs(lhs4 - rhs4)))
    lhs5 = np.einsum("rstug,asbug->ratbg", b, np.conj(b))  # (r,r',t,t',g)
    rhs5 = (np.einsum("ra,tb->ratb", eye, eye)[..., None] / n
            - np.einsum("rt,ab->ratb", eye, eye)[..., None] * delta0 / d)
    out["p5"] = float(np.max(np.abs(lhs5 - rhs5)))

    # p6: support condition chi_r chi_s = chi_t chi_u
    worst = 0.0
    for r in range(L):
        for ss in range(L):
            for t in range(L):
                for u in range(L):
                    prod_rs = G.add(acj.g_t[r], acj.g_t[ss])
                    prod_tu = G.add(acj.g_t[t], acj.g_t[u])
                    if prod_rs != prod_tu:
                        worst = max(worst, float(np.max(np.abs(b[r, ss, t, u]))))
    out["p6"] = worst

    # p7, p8, p9
    res7 = res8 = res9 = 0.0
    for r in range(L):
        for ss in range(L):
            for t in range(L):
                for u in range(L):
                    lhs = np.conj(b[r, ss, t, u])
                    rhs7 = eps_t[ss] * eps_t[u] * a * chi[u] * b[t, bar[ss], r, bar[u]][T.neg]
                    res7 = max(res7, float(np.max(np.abs(lhs - rhs7))))
                    rhs8 = (eps_t[t] * eps_t[r] * c_t[r] * np.conj(c_t[t]) * a * chi[r]
                            * b[bar[r], u, bar[t], ss][T.neg])
                    res8 = max(res8, float(np.max(np.abs(lhs - rhs8))))
                    rhs9 = (eps_t[r] * eps_t[ss] * eps_t[t] * eps_t[u]
                            * c_t[t] * np.conj(c_t[r]) * np.conj(chi[r] * chi[ss])
                            * b[bar[t], bar[u], bar[r], bar[ss]])
                    res9 = max(res9, float(np.max(np.abs(b[r, ss, t, u] - rhs9))))
    out["p7"], out["p8"], out["p9"] = res7, res8, res9

    # p11 (implied by p1, p9; checked as transcription cross-check)
    res11 = 0.0
    for r in range(L):
        for ss in range(L):
            for t in range(L):
                for u in range(L):
                    shift = G.index_of(G.sub(acj.g_t[ss], acj.g_t[u]))
                    rhs11 = (c_t[r] * c_t[u] * np.conj(c_t[ss] * c_t[t])
                             * b[ss, r, u, t][T.add[:, shift]])
                    res11 = max(res11, float(np.max(np.abs(b[r, ss, t, u] - rhs11))))
    out["p11"] = res11

    # B(g) unitarity: B(g)* B(g) = (1/n) I - (delta_{g,0}/d) delta delta*
    delta_vec = np.array([1.0 if r == t else 0.0 for r in range(L) for t in range(L)])
    worst = 0.0
    for gi in range(n):
        M = s.bmatrix(gi)
        target = np.eye(L * L) / n
        if gi == T.zero:
            target = target - np.outer(delta_vec, delta_vec) / d
        worst = max(worst, float(np.max(np.abs(M.conj().T @ M - target))))
        worst = max(worst, float(np.max(np.abs(M @ M.conj().T - target))))
    out["bg_unitary"] = worst

    # p10
    if include_p10:
        res10 = 0.0
        for r in range(L):
            for u in range(L):
                base2 = b[bar[r], u][bar][:, :, T.add]  # [t, s, g, h] = b[rb,u,tb,s,g+h]
                for v in range(L):
                    for w in range(L):
                        A1 = np.conj(b[v, w])  # [q, s, g]
                        for p in range(L):
                            for x in range(L):
                                A3 = b[p, x][:, :, T.add]  # [q, t, g, k] = b[p,x,q,t,g+k]
                                lhs = c_t[r] * eps_t[r] * np.einsum(
                                    "t,qsg,tsgh,qtgk->hk",
                                    eps_t * np.conj(c_t), A1, base2, A3,
                                    optimize=True,
                                )
                                rhs = (
                                    eps_t[u] * eps_t[w]
                                    * (chi[r] * np.conj(chi[u]))[:, None]
                                    * np.conj(B)
                                    * np.einsum("yk,yh->hk", b[p, :, v, r, :],
                                                b[x, bar[w], :, bar[u], :])
                                )
                                if r == u and w == bar[v] and x == bar[p]:
                                    rhs = rhs - c_t[u] * eps_t[bar[p]] * eps_t[v] / (d * math.sqrt(n))
                                res10 = max(res10, float(np.max(np.abs(lhs - rhs))))
        out["p10"] = res10

    return ResidualReport(out, tolerance)


# ---------------------------------------------------------------------------
# gauge and automorphism actions


def gauge_act(u: np.ndarray, s: GeneralSolution, check: bool = True) -> GeneralSolution:
    """b'[r',s',t',u'] = sum u[r'r] u[s's] conj(u[t't] u[u'u]) b[r,s,t,u]."""
    u = np.asarray(u, dtype=complex)
    if check and not in_gauge_group(u, s.acj):
        raise ValueError("u is not in the gauge group G(A,C,J)")
    bt = np.einsum("ar,bs,ct,du,rstug->abcdg", u, u, np.conj(u), np.conj(u),
                   s.btensor, optimize=True)
    return GeneralSolution(s.group, s.acj, bt, provenance=dict(s.provenance))


def in_gauge_group(u: np.ndarray, acj: ACJData, tol: float = 1e-9) -> bool:
    """Membership in G(A,C,J): unitary, commutes with every A(g), C and J."""
    L = acj.L
    u = np.asarray(u, dtype=complex)
    if u.shape != (L, L) or np.linalg.norm(u.conj().T @ u - np.eye(L)) > tol:
        return False
    chi = acj.chi()
    a = acj.form.table()
    for gi in range(acj.group.order):
        A = np.diag(a[gi] * chi[:, gi])
        if np.linalg.norm(u @ A - A @ u) > tol:
            return False
    C = np.diag(acj.c_t)
    if np.linalg.norm(u @ C - C @ u) > tol:
        return False
    # J e_t = eps_t e_{bar t}: anti-linear with matrix Jm
    Jm = np.zeros((L, L), dtype=complex)
    for t in range(L):
        Jm[acj.bar[t], t] = acj.eps_t[t]
    # u J = J u  <=>  u Jm = Jm conj(u)
    if np.linalg.norm(u @ Jm - Jm @ np.conj(u)) > tol:
        return False
    return True


_GAUGE_CACHE: dict = {}


def gauge_group_basis(acj: ACJData) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """(Lie algebra basis, finite component representatives) of G(A,C,J).

    The algebra consists of anti-Hermitian matrices commuting with all A(g),
    C and J; representatives of extra components are searched among signed
    permutation matrices compatible with the same constraints.
    """
    if acj in _GAUGE_CACHE:
        return _GAUGE_CACHE[acj]
    L = acj.L
    # linear constraints on X (L x L complex, 2L^2 real unknowns)
    chi = acj.chi()
    a = acj.form.table()
    mats = [np.diag(a[gi] * chi[:, gi]) for gi in range(acj.group.order)]
    mats.append(np.diag(acj.c_t))
    Jm = np.zeros((L, L), dtype=complex)
    for t in range(L):
        Jm[acj.bar[t], t] = acj.eps_t[t]

    def real_flat(X):
        return np.concatenate([X.real.ravel(), X.imag.ravel()])

    rows = []
    basis_real = []
    for i in range(L):
        for j in range(L):
            for im in (0, 1):
                X = np.zeros((L, L), dtype=complex)
                X[i, j] = 1j if im else 1.0
                basis_real.append(X)
    for X in basis_real:
        row = []
        for M in mats:
            row.append(real_flat(X @ M - M @ X))
        row.append(real_flat(X @ Jm - Jm @ np.conj(X)))
        # anti-hermitian
        row.append(real_flat(X + X.conj().T))
        rows.append(np.concatenate(row))
    A = np.array(rows).T  # constraints as columns act on coefficient vector
    # kernel of A (coefficients over the real basis)
    _, sv, vt = np.linalg.svd(A if A.size else np.zeros((1, len(basis_real))))
    null = [vt[k] for k in range(len(sv), len(basis_real))] + [
        vt[k] for k in range(len(sv)) if sv[k] < 1e-10
    ]
    algebra = []
    for coeffs in null:
        X = sum(c * Xb for c, Xb in zip(coeffs, basis_real))
        if np.linalg.norm(X) > 1e-10:
            algebra.append(X)
    # finite components: signed permutations preserving the structure
    comps = [np.eye(L)]
    import itertools as _it

    for perm in _it.permutations(range(L)):
        for signs in _it.product((1.0, -1.0), repeat=L):
            P = np.zeros((L, L))
            for i, j in enumerate(perm):
                P[j, i] = signs[i]
            if in_gauge_group(P, acj) and not any(
                np.allclose(P, Q) for Q in comps
            ):
                comps.append(P)
    _GAUGE_CACHE[acj] = (algebra, comps)
    return algebra, comps


def sample_gauge(acj: ACJData, rng: np.random.Generator) -> np.ndarray:
    """A random element of G(A,C,J)."""
    from scipy.linalg import expm

    algebra, comps = gauge_group_basis(acj)
    X = sum(rng.normal() * Xb for Xb in algebra) if algebra else np.zeros((acj.L, acj.L))
    u = comps[rng.integers(len(comps))] @ expm(X)
    return u


def aut_act(theta: GroupAutomorphism, s):
    """Pull a solution back along a group automorphism; residual status is
    invariant.  The transformed solution lives over (<theta.,theta.>, a∘theta)."""
    G = s.group
    perm = theta.permutation()  # perm[index(g)] = index(theta(g))
    if isinstance(s, MNSolution):
        return MNSolution(G, s.bichar.pullback(theta), s.form.pullback(theta),
                          s.b[perm], s.c, provenance=dict(s.provenance))
    acj = s.acj
    thinv = theta.inverse()
    new_acj = ACJData(
        acj.bichar.pullback(theta),
        acj.form.pullback(theta),
        acj.bar,
        tuple(thinv(gt) for gt in acj.g_t),
        acj.c_t,
        acj.eps_t,
        acj.eps,
    )
    return GeneralSolution(G, new_acj, s.btensor[..., perm], provenance=dict(s.provenance))


# ---------------------------------------------------------------------------
# equivalence and fingerprints


def fs_nu31_from_data(s) -> complex:
    """tr(j1 o j2) evaluated from the normal form: for K = l^2(G) (x) K0 the
    map j1 j2 sends T_h(xi) to n^{-1/2} sum_k conj(<h,k>) T_k(C A(k) xi)."""
    if isinstance(s, MNSolution):
        g = mn_to_general(s)
    else:
        g = s
    G = g.group
    n = G.order
    a = g.acj.form.table()
    chi = g.acj.chi()
    c_t = np.array(g.acj.c_t)
    B = g.acj.bichar.matrix()
    tot = 0.0 + 0.0j
    for gi in range(n):
        diag_phase = np.conj(B[gi, gi])
        tot += diag_phase * np.sum(c_t * a[gi] * chi[:, gi]) / math.sqrt(n)
    return complex(tot)


def fingerprint(s, digits: int = 7) -> tuple:
    """Gauge/automorphism-invariant signature used for deduplication."""

    def r(x):
        return round(float(np.real(x)), digits) + 0.0, round(float(np.imag(x)), digits) + 0.0

    if isinstance(s, MNSolution):
        mags = tuple(sorted(round(float(v), digits) + 0.0 for v in np.abs(s.b)))
        return ("mn", s.group.factors, mags, r(s.c), r(fs_nu31_from_data(s)))
    G, L = s.group, s.L
    T = tables(G)
    traces = []
    for gi in range(s.n):
        Mg = s.bmatrix(gi)
        for hi in range(s.n):
            Mh = s.bmatrix(hi)
            traces.append(r(np.trace(Mg @ Mh.conj().T)))
    return (
        "general",
        G.factors,
        s.m,
        s.acj.eps,
        tuple(sorted(traces)),
        r(fs_nu31_from_data(s)),
    )


def _mn_equivalent(s1: MNSolution, s2: MNSolution, tol: float = 1e-7) -> bool:
    from .abelian import automorphisms

    if s1.group.factors != s2.group.factors:
        return False
    for th in automorphisms(s1.group):
        t = aut_act(th, s1)
        if (t.bichar.gram_exponents() == s2.bichar.gram_exponents()
                and all(p == q for p, q in zip(t.form.values, s2.form.values))
                and abs(t.c - s2.c) < tol
                and np.max(np.abs(t.b - s2.b)) < tol):
            return True
    return False


def equivalent(s1, s2, equal_tol: float = 1e-7, distinct_tol: float = 1e-3,
               grid: int = 1000, rng: np.random.Generator | None = None) -> bool:
    """Equivalence up to Aut(G) x gauge.  For m=n the gauge group is {+-1} and
    the test is exact over Aut(G); otherwise the gauge orbit is searched on a
    grid with local refinement.  Raises if the best distance falls in the
    inconclusive gap (equal_tol, distinct_tol)."""
    if isinstance(s1, MNSolution) and isinstance(s2, MNSolution):
        return _mn_equivalent(s1, s2, tol=equal_tol)
    if isinstance(s1, MNSolution):
        s1 = mn_to_general(s1)
    if isinstance(s2, MNSolution):
        s2 = mn_to_general(s2)
    if s1.group.factors != s2.group.factors or s1.L != s2.L:
        return False
    from scipy.linalg import expm
    from scipy.optimize import minimize
    from .abelian import automorphisms

    best = np.inf
    for th in automorphisms(s1.group):
        t = aut_act(th, s1)
        if t.acj.bichar.gram_exponents() != s2.acj.bichar.gram_exponents():
            continue
        if any(p != q for p, q in zip(t.acj.form.values, s2.acj.form.values)):
            continue
        if sorted(map(tuple, t.acj.g_t)) != sorted(map(tuple, s2.acj.g_t)):
            continue
        algebra, comps = gauge_group_basis(t.acj)
        kdim = len(algebra)

        def dist(coeffs, comp):
            u = comp @ expm(sum(c * X for c, X in zip(coeffs, algebra))) if kdim else comp
            moved = gauge_act(u, t, check=False)
            return float(np.max(np.abs(moved.btensor - s2.btensor)))

        for comp in comps:
            if kdim == 0:
                best = min(best, dist((), comp))
                continue
            npts = max(3, int(round(grid ** (1.0 / kdim))))
            axes = [np.linspace(0.0, 2 * np.pi, npts, endpoint=False)] * kdim
            pts = np.stack(np.meshgrid(*axes), -1).reshape(-1, kdim)
            vals = [dist(p, comp) for p in pts]
            i0 = int(np.argmin(vals))
            best = min(best, vals[i0])
            res = minimize(lambda p: dist(p, comp), pts[i0], method="Nelder-Mead",
                           options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 400})
            best = min(best, float(res.fun))
        if best < equal_tol:
            return True
    if best < equal_tol:
        return True
    if best > distinct_tol:
        return False
    raise ArithmeticError(
        f"equivalence search inconclusive: best distance {best:.3e} in gap zone"
    )
