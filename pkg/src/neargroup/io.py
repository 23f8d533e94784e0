"""Versioned JSON serialization for solutions and the solution archive.

Schema ``neargroup-solution/1``: groups as {"factors": [n1, ...]}, elements
as residue arrays, exact phases as {"num": p, "den": q}, complex doubles as
[re, im] pairs.  Phases round-trip bit-exactly; doubles round-trip through
Python's repr (exact for binary64).  Every stored solution re-verifies on
load.
"""

from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path

import numpy as np

from .abelian import Bicharacter, FiniteAbelianGroup, Phase, QuadraticForm
from .solutions import (
    ACJData,
    GeneralSolution,
    MNSolution,
    fingerprint,
    residual_general,
    residual_mn,
)

__all__ = [
    "SCHEMA",
    "solution_to_json",
    "solution_from_json",
    "save_solution",
    "load_solution",
    "Archive",
    "bundled_path",
    "load_bundled",
]

SCHEMA = "neargroup-solution/1"


def _phase(p: Phase) -> dict:
    return {"num": p.num, "den": p.den}


def _unphase(d: dict) -> Phase:
    return Phase(d["num"], d["den"])


def _c(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _phase_of(z: complex, max_den: int = 240) -> dict | None:
    """Optional exact-phase form of a unimodular complex number."""
    import math

    z = complex(z)
    if abs(abs(z) - 1.0) > 1e-13:
        return None
    ang = math.atan2(z.imag, z.real) / (2 * math.pi) % 1.0
    for den in range(1, max_den + 1):
        num = round(ang * den)
        cand = complex(np.exp(2j * np.pi * num / den))
        if abs(cand - z) < 1e-13:
            p = Phase(num % den, den)
            return {"num": p.num, "den": p.den}
    return None


def _unc(v) -> complex:
    return complex(v[0], v[1])


def _group_json(G: FiniteAbelianGroup) -> dict:
    return {"factors": list(G.factors)}


def _bichar_json(b: Bicharacter) -> dict:
    return {"gram": [[_phase(p) for p in row] for row in b.gram]}


def _form_json(a: QuadraticForm) -> dict:
    return {"values": [_phase(p) for p in a.values]}


def solution_to_json(s: MNSolution | GeneralSolution) -> dict:
    G = s.group
    base = {
        "schema": SCHEMA,
        "group": _group_json(G),
        "provenance": dict(s.provenance),
    }
    if isinstance(s, MNSolution):
        base.update({
            "kind": "mn",
            "bicharacter": _bichar_json(s.bichar),
            "form": _form_json(s.form),
            "b": [_c(z) for z in s.b],
            "c": _c(s.c),
            "c_phase": _phase_of(s.c),
            "d_exact": {"p": s.d_exact.p, "q": s.d_exact.q,
                        "D": s.d_exact.D, "r": s.d_exact.r},
        })
        return base
    acj = s.acj
    sparse = []
    L, n = s.L, s.n
    for r in range(L):
        for ss in range(L):
            for t in range(L):
                for u in range(L):
                    for gi in range(n):
                        v = s.btensor[r, ss, t, u, gi]
                        if v != 0:
                            sparse.append({"idx": [r, ss, t, u], "g": gi,
                                           "v": _c(v)})
    base.update({
        "kind": "general",
        "bicharacter": _bichar_json(acj.bichar),
        "form": _form_json(acj.form),
        "acj": {
            "bar": list(acj.bar),
            "g_t": [list(g) for g in acj.g_t],
            "c_t": [_c(z) for z in acj.c_t],
            "eps_t": list(acj.eps_t),
            "eps": acj.eps,
        },
        "btensor": sparse,
        "d_exact": {"p": s.d_exact.p, "q": s.d_exact.q,
                    "D": s.d_exact.D, "r": s.d_exact.r},
    })
    return base


def solution_from_json(data: dict) -> MNSolution | GeneralSolution:
    if data.get("schema") != SCHEMA:
        raise ValueError(f"unknown schema {data.get('schema')!r}")
    G = FiniteAbelianGroup(tuple(data["group"]["factors"]))
    gram = tuple(tuple(_unphase(p) for p in row) for row in data["bicharacter"]["gram"])
    b = Bicharacter(G, gram)
    a = QuadraticForm(b, tuple(_unphase(p) for p in data["form"]["values"]))
    prov = data.get("provenance", {})
    if data["kind"] == "mn":
        bvec = np.array([_unc(v) for v in data["b"]])
        return MNSolution(G, b, a, bvec, _unc(data["c"]), provenance=prov)
    acj_d = data["acj"]
    acj = ACJData(
        bichar=b, form=a,
        bar=tuple(acj_d["bar"]),
        g_t=tuple(tuple(g) for g in acj_d["g_t"]),
        c_t=tuple(_unc(z) for z in acj_d["c_t"]),
        eps_t=tuple(acj_d["eps_t"]),
        eps=acj_d["eps"],
    )
    L = len(acj.bar)
    bt = np.zeros((L, L, L, L, G.order), dtype=complex)
    for entry in data["btensor"]:
        r, ss, t, u = entry["idx"]
        bt[r, ss, t, u, entry["g"]] = _unc(entry["v"])
    return GeneralSolution(G, acj, bt, provenance=prov)


def save_solution(s, path: str | Path):
    Path(path).write_text(json.dumps(solution_to_json(s), indent=1))


def load_solution(path: str | Path):
    return solution_from_json(json.loads(Path(path).read_text()))


def bundled_path(name: str) -> Path:
    """Resolve a name like 'z5_m5.json' inside the packaged corpus."""
    from importlib import resources

    base = resources.files("neargroup") / "bundled"
    p = Path(str(base / name))
    if not p.exists():
        raise FileNotFoundError(f"no bundled file {name!r}")
    return p


def load_bundled(name: str):
    if not name.endswith(".json"):
        name += ".json"
    return load_solution(bundled_path(name))


class Archive:
    """Directory store of verified solutions keyed by (group, m, fingerprint)."""

    def __init__(self, root: str | Path, tolerance: float = 1e-10):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.tolerance = tolerance

    def _key(self, s) -> str:
        fp = fingerprint(s)
        h = hashlib.sha256(repr(fp).encode()).hexdigest()[:12]
        gname = "x".join(str(f) for f in s.group.factors)
        return f"Z{gname}_m{s.m}_{h}.json"

    def store(self, s) -> Path:
        rep = (residual_mn(s, self.tolerance) if isinstance(s, MNSolution)
               else residual_general(s, self.tolerance))
        if not rep.passed:
            raise ValueError("refusing to archive a failing solution")
        path = self.root / self._key(s)
        save_solution(s, path)
        return path

    def load(self, name: str):
        s = load_solution(self.root / name)
        rep = (residual_mn(s, self.tolerance) if isinstance(s, MNSolution)
               else residual_general(s, self.tolerance))
        if not rep.passed:
            raise ValueError(f"archived solution {name} fails re-verification")
        return s

    def entries(self) -> list[str]:
        return sorted(p.name for p in self.root.glob("*.json"))

    def load_all(self) -> list:
        return [self.load(name) for name in self.entries()]
