"""Finite abelian group arithmetic: characters, bicharacters, quadratic forms.

Conventions used throughout the package:

* A group ``G = Z_{n_1} x ... x Z_{n_k}`` is held as its factor list; elements
  are tuples of residues ``(g_1, ..., g_k)`` with ``0 <= g_i < n_i`` and
  additive notation.
* Roots of unity are kept exact as :class:`Phase` objects, ``exp(2*pi*i*p/q)``
  with a reduced fraction ``p/q``; complex doubles only appear when a phase is
  evaluated.
* A bicharacter ``<.,.>`` is stored through its Gram matrix of phases on the
  standard generators and evaluated by bilinearity.  It is *symmetric* when
  ``<g,h> = <h,g>`` and *nondegenerate* when ``g -> <g,.>`` is injective.
* A quadratic form ``a`` satisfies ``a(g+h) <g,h> = a(g) a(h)``; it is *even*
  when ``a(-g) = a(g)``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

__all__ = [
    "Phase",
    "FiniteAbelianGroup",
    "Bicharacter",
    "QuadraticForm",
    "GroupAutomorphism",
    "Subgroup",
    "ResourceError",
    "enumerate_bicharacters",
    "bicharacter_classes",
    "enumerate_quadratic_forms",
    "even_quadratic_forms",
    "lagrangian_subgroups",
    "fourier",
    "reflection",
    "automorphisms",
    "subgroups",
    "subgroup_generated_by",
    "orthogonal_and_lagrangian",
]


class ResourceError(Exception):
    """Raised when a brute-force enumeration would exceed its resource bound."""


Element = tuple[int, ...]


@dataclass(frozen=True, order=True)
class Phase:
    """Exact root of unity ``exp(2*pi*i*num/den)``, reduced, ``den >= 1``."""

    num: int
    den: int = 1

    def __post_init__(self):
        num, den = self.num, self.den
        if den <= 0:
            raise ValueError("denominator must be positive")
        num %= den
        g = math.gcd(num, den)
        object.__setattr__(self, "num", num // g)
        object.__setattr__(self, "den", den // g)

    @staticmethod
    def from_fraction(q: Fraction | int) -> "Phase":
        q = Fraction(q)
        return Phase(q.numerator, q.denominator)

    @property
    def exponent(self) -> Fraction:
        return Fraction(self.num, self.den)

    def __mul__(self, other: "Phase") -> "Phase":
        return Phase.from_fraction(self.exponent + other.exponent)

    def __pow__(self, k: int) -> "Phase":
        return Phase.from_fraction(k * self.exponent)

    def conj(self) -> "Phase":
        return Phase.from_fraction(-self.exponent)

    def inv(self) -> "Phase":
        return self.conj()

    @property
    def order(self) -> int:
        return self.den

    def is_one(self) -> bool:
        return self.num == 0

    def value(self) -> complex:
        return complex(np.exp(2j * np.pi * self.num / self.den))

    def __complex__(self) -> complex:
        return self.value()

    def __repr__(self):
        return f"Phase({self.num}/{self.den})"


@dataclass(frozen=True)
class FiniteAbelianGroup:
    """Product of cyclic groups Z_{n_1} x ... x Z_{n_k} in fixed coordinates."""

    factors: tuple[int, ...]

    def __post_init__(self):
        factors = tuple(int(n) for n in self.factors)
        if not factors or any(n < 2 for n in factors):
            raise ValueError("factors must be integers >= 2")
        object.__setattr__(self, "factors", factors)

    @property
    def order(self) -> int:
        return reduce(lambda a, b: a * b, self.factors, 1)

    @property
    def rank(self) -> int:
        return len(self.factors)

    @property
    def is_canonical(self) -> bool:
        return all(a % b == 0 for a, b in zip(self.factors[1:], self.factors))

    def canonicalized(self) -> tuple["FiniteAbelianGroup", Callable[[Element], Element]]:
        """Canonical invariant-factor form and the CRT isomorphism onto it.

        Each source prime power is assigned its own slot among the invariant
        factors (k-th largest p-power goes to the k-th largest factor), which
        keeps the linear extension of the generator images bijective.
        """
        primary: dict[int, list[tuple[int, int]]] = {}
        for j, n in enumerate(self.factors):
            for p, e in _factorize(n).items():
                primary.setdefault(p, []).append((p**e, j))
        for p in primary:
            primary[p].sort(key=lambda t: -t[0])
        depth = max(len(v) for v in primary.values())
        slot_val = []
        slot_parts: list[list[tuple[int, int]]] = []  # (prime_power, source index)
        for i in range(depth):
            q_total = 1
            parts = []
            for lst in primary.values():
                if i < len(lst):
                    q, j = lst[i]
                    q_total *= q
                    parts.append((q, j))
            slot_val.append(q_total)
            slot_parts.append(parts)
        order = list(range(depth))[::-1]  # ascending invariant factors
        invariant = [slot_val[i] for i in order]
        target = FiniteAbelianGroup(tuple(invariant))
        gen_images = [[0] * depth for _ in self.factors]
        for pos, i in enumerate(order):
            ni = invariant[pos]
            for q, j in slot_parts[i]:
                cof = ni // q
                gen_images[j][pos] = (gen_images[j][pos] + cof * pow(cof, -1, q)) % ni

        def iso(g: Element) -> Element:
            out = [0] * depth
            for j, gj in enumerate(g):
                if gj:
                    for i, x in enumerate(gen_images[j]):
                        out[i] = (out[i] + gj * x) % invariant[i]
            return tuple(out)

        return target, iso

    # --- element arithmetic -------------------------------------------------

    def zero(self) -> Element:
        return (0,) * self.rank

    def reduce(self, g: Sequence[int]) -> Element:
        return tuple(int(x) % n for x, n in zip(g, self.factors))

    def add(self, g: Element, h: Element) -> Element:
        return tuple((a + b) % n for a, b, n in zip(g, h, self.factors))

    def neg(self, g: Element) -> Element:
        return tuple((-a) % n for a, n in zip(g, self.factors))

    def sub(self, g: Element, h: Element) -> Element:
        return self.add(g, self.neg(h))

    def smul(self, k: int, g: Element) -> Element:
        return tuple((k * a) % n for a, n in zip(g, self.factors))

    def element_order(self, g: Element) -> int:
        return reduce(math.lcm, (n // math.gcd(a, n) for a, n in zip(g, self.factors)), 1)

    def elements(self) -> list[Element]:
        return list(itertools.product(*(range(n) for n in self.factors)))

    def index_of(self, g: Element) -> int:
        idx = 0
        for a, n in zip(g, self.factors):
            idx = idx * n + (a % n)
        return idx

    def generators(self) -> list[Element]:
        gens = []
        for i in range(self.rank):
            e = [0] * self.rank
            e[i] = 1
            gens.append(tuple(e))
        return gens

    def __iter__(self) -> Iterator[Element]:
        return iter(self.elements())

    def __repr__(self):
        return "Z" + "xZ".join(str(n) for n in self.factors)


def _factorize(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


@dataclass(frozen=True)
class Bicharacter:
    """Symmetric bicharacter given by its Gram matrix of phases on generators."""

    group: FiniteAbelianGroup
    gram: tuple[tuple[Phase, ...], ...]

    def __post_init__(self):
        k = self.group.rank
        if len(self.gram) != k or any(len(row) != k for row in self.gram):
            raise ValueError("gram must be k x k")
        for i in range(k):
            for j in range(k):
                if self.gram[i][j] != self.gram[j][i]:
                    raise ValueError("gram must be symmetric")
                g = math.gcd(self.group.factors[i], self.group.factors[j])
                if g % self.gram[i][j].order != 0:
                    raise ValueError("gram entry order must divide gcd of factor orders")

    def phase(self, g: Element, h: Element) -> Phase:
        q = Fraction(0)
        for i, gi in enumerate(g):
            if gi == 0:
                continue
            for j, hj in enumerate(h):
                if hj:
                    q += gi * hj * self.gram[i][j].exponent
        return Phase.from_fraction(q)

    def __call__(self, g: Element, h: Element) -> complex:
        return self.phase(g, h).value()

    def matrix(self) -> np.ndarray:
        """Dense ``<g,h>`` table over the element order of ``group.elements()``."""
        els = self.group.elements()
        return np.array([[self(g, h) for h in els] for g in els])

    def radical(self) -> list[Element]:
        """Elements g with <g,h>=1 for all h (trivial iff nondegenerate)."""
        gens = self.group.generators()
        return [g for g in self.group if all(self.phase(g, e).is_one() for e in gens)]

    def is_nondegenerate(self) -> bool:
        return len(self.radical()) == 1

    def conj(self) -> "Bicharacter":
        return Bicharacter(self.group, tuple(tuple(p.conj() for p in row) for row in self.gram))

    def pullback(self, theta: "GroupAutomorphism") -> "Bicharacter":
        """The bicharacter (g,h) -> <theta(g), theta(h)>."""
        gens = self.group.generators()
        gram = tuple(
            tuple(self.phase(theta(gens[i]), theta(gens[j])) for j in range(self.group.rank))
            for i in range(self.group.rank)
        )
        return Bicharacter(self.group, gram)

    def gram_exponents(self) -> tuple[tuple[Fraction, ...], ...]:
        return tuple(tuple(p.exponent for p in row) for row in self.gram)


@dataclass(frozen=True)
class QuadraticForm:
    """Phase-valued a(g) with a(g+h)<g,h> = a(g)a(h) for a fixed bicharacter."""

    bichar: Bicharacter
    values: tuple[Phase, ...]  # indexed by group.index_of

    @property
    def group(self) -> FiniteAbelianGroup:
        return self.bichar.group

    def phase(self, g: Element) -> Phase:
        return self.values[self.group.index_of(g)]

    def __call__(self, g: Element) -> complex:
        return self.phase(g).value()

    def table(self) -> np.ndarray:
        return np.array([p.value() for p in self.values])

    def is_valid(self) -> bool:
        G = self.group
        for g in G:
            for h in G:
                if self.phase(G.add(g, h)) * self.bichar.phase(g, h) != self.phase(g) * self.phase(h):
                    return False
        return True

    def is_even(self) -> bool:
        G = self.group
        return all(self.phase(G.neg(g)) == self.phase(g) for g in G)

    def conj(self) -> "QuadraticForm":
        return QuadraticForm(self.bichar.conj(), tuple(p.conj() for p in self.values))

    def pullback(self, theta: "GroupAutomorphism") -> "QuadraticForm":
        """The form g -> a(theta(g)), living over the pulled-back bicharacter."""
        G = self.group
        vals = [None] * G.order
        for g in G:
            vals[G.index_of(g)] = self.phase(theta(g))
        return QuadraticForm(self.bichar.pullback(theta), tuple(vals))

    def gauss_sum(self) -> complex:
        """The normalized Gauss sum ``a_hat(0) = sum_g a(g) / sqrt(n)``."""
        return sum(p.value() for p in self.values) / math.sqrt(self.group.order)


@dataclass(frozen=True)
class GroupAutomorphism:
    group: FiniteAbelianGroup
    images: tuple[Element, ...]  # image of each standard generator

    def __call__(self, g: Element) -> Element:
        G = self.group
        out = G.zero()
        for gi, img in zip(g, self.images):
            if gi:
                out = G.add(out, G.smul(gi, img))
        return out

    def compose(self, other: "GroupAutomorphism") -> "GroupAutomorphism":
        return GroupAutomorphism(self.group, tuple(self(other(e)) for e in self.group.generators()))

    def inverse(self) -> "GroupAutomorphism":
        table = {self(g): g for g in self.group}
        return GroupAutomorphism(self.group, tuple(table[e] for e in self.group.generators()))

    def is_identity(self) -> bool:
        return all(self(e) == e for e in self.group.generators())

    def permutation(self) -> np.ndarray:
        """index permutation p with p[index(g)] = index(theta(g))."""
        G = self.group
        return np.array([G.index_of(self(g)) for g in G])


@dataclass(frozen=True)
class Subgroup:
    """Subgroup as a sorted element list with a generating certificate."""

    group: FiniteAbelianGroup
    elements: tuple[Element, ...]
    generators: tuple[Element, ...]

    @property
    def order(self) -> int:
        return len(self.elements)

    def contains(self, g: Element) -> bool:
        return g in set(self.elements)

    def is_closed(self) -> bool:
        s = set(self.elements)
        return self.group.zero() in s and all(
            self.group.add(a, b) in s for a in s for b in s
        )


def subgroup_generated_by(G: FiniteAbelianGroup, gens: Iterable[Element]) -> Subgroup:
    gens = [G.reduce(g) for g in gens]
    seen = {G.zero()}
    frontier = [G.zero()]
    while frontier:
        new = []
        for x in frontier:
            for g in gens:
                y = G.add(x, g)
                if y not in seen:
                    seen.add(y)
                    new.append(y)
        frontier = new
    return Subgroup(G, tuple(sorted(seen)), tuple(gens))


def subgroups(G: FiniteAbelianGroup) -> list[Subgroup]:
    """All subgroups, found by closing generator sets (fine for small G)."""
    found: dict[tuple[Element, ...], Subgroup] = {}
    trivial = subgroup_generated_by(G, [])
    found[trivial.elements] = trivial
    frontier = [trivial]
    while frontier:
        nxt = []
        for H in frontier:
            for g in G:
                if g in set(H.elements):
                    continue
                K = subgroup_generated_by(G, list(H.generators) + [g])
                if K.elements not in found:
                    found[K.elements] = K
                    nxt.append(K)
        frontier = nxt
    return sorted(found.values(), key=lambda H: (H.order, H.elements))


# ---------------------------------------------------------------------------
# enumeration


def enumerate_bicharacters(
    G: FiniteAbelianGroup, nondegenerate_only: bool = False, bound: int = 64
) -> list[Bicharacter]:
    """All symmetric bicharacters of G (optionally only nondegenerate ones)."""
    if G.order > bound:
        raise ResourceError(f"|G|={G.order} exceeds bound {bound}")
    k = G.rank
    slots = [(i, j) for i in range(k) for j in range(i, k)]
    ranges = [math.gcd(G.factors[i], G.factors[j]) for i, j in slots]
    out = []
    for choice in itertools.product(*(range(r) for r in ranges)):
        gram = [[Phase(0, 1)] * k for _ in range(k)]
        for (i, j), c, r in zip(slots, choice, ranges):
            gram[i][j] = gram[j][i] = Phase(c, r)
        b = Bicharacter(G, tuple(tuple(row) for row in gram))
        if nondegenerate_only and not b.is_nondegenerate():
            continue
        out.append(b)
    return out


def bicharacter_classes(
    bichars: Sequence[Bicharacter], auts: Sequence[GroupAutomorphism] | None = None
) -> list[list[Bicharacter]]:
    """Orbits of bicharacters under Aut(G); representatives are the
    lexicographically minimal Gram exponent matrices in each orbit."""
    if not bichars:
        return []
    G = bichars[0].group
    if auts is None:
        auts = automorphisms(G)
    seen: set[tuple] = set()
    classes = []
    for b in bichars:
        key = b.gram_exponents()
        if key in seen:
            continue
        orbit = {}
        for th in auts:
            bb = b.pullback(th)
            orbit[bb.gram_exponents()] = bb
        seen |= set(orbit)
        members = [orbit[k] for k in sorted(orbit)]
        classes.append(members)
    # canonical representative first
    return [sorted(cls, key=lambda b: b.gram_exponents()) for cls in classes]


def enumerate_quadratic_forms(b: Bicharacter) -> list[QuadraticForm]:
    """All solutions a of a(g+h)<g,h>=a(g)a(h); exactly |G| of them."""
    G = b.group
    base = _base_quadratic_form(b)
    forms = []
    for chi_idx in G:
        # multiply the base solution by the character <., chi_idx>-like twist:
        # characters of G are exactly g -> prod zeta_{n_i}^{c_i g_i}
        vals = []
        for g in G:
            tw = Fraction(0)
            for gi, ci, n in zip(g, chi_idx, G.factors):
                tw += Fraction(gi * ci, n)
            vals.append(base[G.index_of(g)] * Phase.from_fraction(tw))
        forms.append(QuadraticForm(b, tuple(vals)))
    return forms


def even_quadratic_forms(b: Bicharacter) -> list[QuadraticForm]:
    return [a for a in enumerate_quadratic_forms(b) if a.is_even()]


def _base_quadratic_form(b: Bicharacter) -> list[Phase]:
    """One particular solution of the coboundary equation (a symmetric
    2-cocycle on a finite abelian group is always a coboundary)."""
    G = b.group
    k = G.rank
    gens = G.generators()
    # per-generator seed: x^{n_i} = <e_i,e_i>^{n_i(n_i-1)/2}
    seeds = []
    for i, n in enumerate(G.factors):
        rhs = b.gram[i][i].exponent * (n * (n - 1) // 2)
        seeds.append(Phase.from_fraction(Fraction(rhs, n)))
    vals: list[Phase] = [Phase(0, 1)] * G.order
    for g in G:
        q = Fraction(0)
        for i, gi in enumerate(g):
            q += gi * seeds[i].exponent - b.gram[i][i].exponent * (gi * (gi - 1) // 2)
        for i in range(k):
            for j in range(i + 1, k):
                q -= g[i] * g[j] * b.gram[i][j].exponent
        vals[G.index_of(g)] = Phase.from_fraction(q)
    return vals


# ---------------------------------------------------------------------------
# Fourier analysis


def fourier(f: np.ndarray, b: Bicharacter) -> np.ndarray:
    """f_hat(g) = n^{-1/2} sum_h conj(<g,h>) f(h), indexed like G.elements()."""
    B = b.matrix()
    n = b.group.order
    return (np.conj(B) @ np.asarray(f, dtype=complex)) / math.sqrt(n)


def reflection(G: FiniteAbelianGroup) -> np.ndarray:
    """Permutation matrix of g -> -g in the element order."""
    els = G.elements()
    P = np.zeros((G.order, G.order))
    for g in els:
        P[G.index_of(G.neg(g)), G.index_of(g)] = 1.0
    return P


# ---------------------------------------------------------------------------
# automorphisms


def automorphisms(
    G: FiniteAbelianGroup, bound: int = 64, max_results: int = 10**6
) -> list[GroupAutomorphism]:
    """Complete Aut(G) by pruned brute force over generator images.

    An automorphism preserves element orders, so the image of the i-th
    standard generator ranges over elements of order exactly ``n_i``; partial
    choices are pruned by requiring the span of the chosen images to grow by
    the full factor ``n_i`` at each step (injectivity), which also makes the
    final linear extension bijective.
    """
    if G.order > bound:
        raise ResourceError(f"|G|={G.order} exceeds bound {bound}")
    els = G.elements()
    candidates = [
        [g for g in els if G.element_order(g) == n] for n in G.factors
    ]
    out: list[GroupAutomorphism] = []

    def extend(chosen: list[Element], span: set[Element]):
        if len(out) >= max_results:
            raise ResourceError("automorphism count exceeds resource bound")
        i = len(chosen)
        if i == G.rank:
            out.append(GroupAutomorphism(G, tuple(chosen)))
            return
        n = G.factors[i]
        for g in candidates[i]:
            new_span = _span_with(G, span, g, n)
            if len(new_span) == len(span) * n:
                extend(chosen + [g], new_span)

    extend([], {G.zero()})
    return out


def _span_with(G, span: set[Element], g: Element, n: int) -> set[Element]:
    out = set()
    kg = G.zero()
    for _ in range(n):
        out |= {G.add(s, kg) for s in span}
        kg = G.add(kg, g)
    return out


# ---------------------------------------------------------------------------
# orthogonality / Lagrangians


def orthogonal_and_lagrangian(
    G: FiniteAbelianGroup, b: Bicharacter, a: QuadraticForm | None, H: Subgroup
) -> tuple[Subgroup, bool, bool]:
    """H_perp, whether H is isotropic (H within H_perp), whether Lagrangian.

    Lagrangian means H = H_perp and a restricted to H is identically 1; when
    no form is supplied the Lagrangian flag only checks H = H_perp.
    """
    if not H.is_closed():
        raise ValueError("H is not closed under addition")
    perp_els = [
        g for g in G if all(b.phase(g, h).is_one() for h in H.generators)
    ]
    perp = Subgroup(G, tuple(sorted(perp_els)), _generating_set(G, perp_els))
    hset = set(H.elements)
    isotropic = hset <= set(perp.elements)
    lagrangian = hset == set(perp.elements)
    if lagrangian and a is not None:
        lagrangian = all(a.phase(h).is_one() for h in H.elements)
    return perp, isotropic, lagrangian


def _generating_set(G: FiniteAbelianGroup, els: Sequence[Element]) -> tuple[Element, ...]:
    gens: list[Element] = []
    span = {G.zero()}
    for g in sorted(els, key=G.element_order, reverse=True):
        if g not in span:
            gens.append(g)
            span = set(subgroup_generated_by(G, gens).elements)
        if len(span) == len(els):
            break
    return tuple(gens)


def lagrangian_subgroups(
    G: FiniteAbelianGroup, b: Bicharacter, a: QuadraticForm
) -> list[Subgroup]:
    return [
        H
        for H in subgroups(G)
        if orthogonal_and_lagrangian(G, b, a, H)[2]
    ]
