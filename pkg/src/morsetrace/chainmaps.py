"""Chain maps, simplicial maps, subdivision operators and the Hopf trace identity."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional

from .complex import (
    Chain,
    Simplex,
    SimplicialComplex,
    Subdivision,
    barycentric_subdivision,
    boundary,
    simplex,
    sort_sign,
)
from .errors import DomainError, Verdict
from .morse import BasisQ, DiscreteVectorField, co_critical_chain, critical_chain, critical_simplices, is_gradient


class SimplicialMap:
    """Vertex map ``source -> target`` sending simplices to simplices."""

    def __init__(self, source: SimplicialComplex, target: SimplicialComplex, vertex_map: Mapping[int, int]):
        vm = {int(a): int(b) for a, b in vertex_map.items()}
        missing = [v for v in source.vertices if v not in vm]
        if missing:
            raise DomainError(f"vertex map is undefined on {missing}")
        extra = [v for v in vm if (v,) not in source]
        if extra:
            raise DomainError(f"vertex map mentions unknown source vertices {extra}")
        for m in source.maximal_simplices():
            img = simplex(set(vm[v] for v in m))
            if img not in target:
                raise DomainError(f"image {list(img)} of {list(m)} is not a simplex of the target")
        self.source = source
        self.target = target
        self.vertex_map: Dict[int, int] = vm

    def __call__(self, v: int) -> int:
        return self.vertex_map[v]

    def image(self, s: Simplex) -> Simplex:
        return simplex(set(self.vertex_map[v] for v in s))

    def signed_image(self, s: Simplex):
        """``(sign, image)``; the sign is 0 when the image drops dimension."""
        return sort_sign(self.vertex_map[v] for v in s)

    def compose(self, inner: "SimplicialMap") -> "SimplicialMap":
        """``self`` after ``inner``."""
        if inner.target != self.source:
            raise DomainError("maps are not composable")
        return SimplicialMap(inner.source, self.target,
                             {v: self.vertex_map[w] for v, w in inner.vertex_map.items()})


class ChainMap:
    """Per-dimension sparse matrices stored as column chains.

    ``columns[q][s]`` is the image of the q-simplex ``s``; zero columns are
    omitted.
    """

    def __init__(self, source: SimplicialComplex, target: SimplicialComplex,
                 columns: Mapping[int, Mapping[Simplex, Chain]]):
        self.source = source
        self.target = target
        cols: Dict[int, Dict[Simplex, Chain]] = {}
        for q, colq in columns.items():
            kept = {}
            for s, c in colq.items():
                if len(s) != q + 1 or s not in source:
                    raise DomainError(f"column {list(s)} is not a {q}-simplex of the source")
                if c:
                    if c.dim != q:
                        raise DomainError(f"column {list(s)} has dimension {c.dim}, expected {q}")
                    kept[s] = c
            cols[q] = kept
        self.columns = cols

    def column(self, s: Simplex) -> Chain:
        return self.columns.get(len(s) - 1, {}).get(s) or Chain.zero(len(s) - 1)

    def apply(self, c: Chain) -> Chain:
        out: Dict[Simplex, int] = {}
        colq = self.columns.get(c.dim, {})
        for s, v in c.items():
            col = colq.get(s)
            if col is None:
                continue
            for t, w in col.items():
                out[t] = out.get(t, 0) + v * w
        return Chain._trusted(c.dim, out)

    @property
    def is_endomorphism(self) -> bool:
        return self.source == self.target

    def entries(self):
        """Nonzero entries ``(q, column simplex, row simplex, value)`` in canonical order."""
        for q in sorted(self.columns):
            for s in sorted(self.columns[q]):
                for t, v in sorted(self.columns[q][s].items()):
                    yield q, s, t, v


def identity_map(k: SimplicialComplex) -> ChainMap:
    return ChainMap(k, k, {q: {s: Chain.of(s) for s in k.simplices(q)} for q in range(k.dim + 1)})


def zero_map(k: SimplicialComplex, target: Optional[SimplicialComplex] = None) -> ChainMap:
    return ChainMap(k, target if target is not None else k, {})


def induced_chain_map(f: SimplicialMap) -> ChainMap:
    cols: Dict[int, Dict[Simplex, Chain]] = {}
    for q in range(f.source.dim + 1):
        colq = {}
        for s in f.source.simplices(q):
            sign, img = f.signed_image(s)
            if sign:
                colq[s] = Chain._trusted(q, {img: sign})
        cols[q] = colq
    return ChainMap(f.source, f.target, cols)


def verify_chain_map(phi: ChainMap) -> Verdict:
    """Exact check of ``d phi = phi d`` on every simplex of the source."""
    for q in range(1, phi.source.dim + 1):
        for s in phi.source.simplices(q):
            lhs = boundary(phi.column(s))
            rhs = phi.apply(boundary(Chain.of(s)))
            if lhs != rhs:
                return Verdict.failed(f"boundary does not commute on {list(s)}", s)
    for q, colq in phi.columns.items():
        for s, c in colq.items():
            for t in c:
                if t not in phi.target:
                    return Verdict.failed(f"image of {list(s)} leaves the target", s)
    return Verdict.passed()


def _subdivision_step(sd: Subdivision) -> ChainMap:
    k, bary = sd.parent, sd.barycenter
    memo: Dict[Simplex, Chain] = {}

    def g(s: Simplex) -> Chain:
        hit = memo.get(s)
        if hit is not None:
            return hit
        if len(s) == 1:
            out = Chain.of((bary[s],))
        else:
            apex = bary[s]
            acc: Dict[Simplex, int] = {}
            for t, c in boundary(Chain.of(s)).items():
                for u, w in g(t).items():
                    sign, cell = sort_sign((apex,) + u)
                    acc[cell] = acc.get(cell, 0) + sign * c * w
            out = Chain._trusted(len(s) - 1, acc)
        memo[s] = out
        return out

    cols = {q: {s: g(s) for s in k.simplices(q)} for q in range(k.dim + 1)}
    return ChainMap(k, sd.complex, cols)


def subdivision_chain_map(k: SimplicialComplex, iterations: int = 1) -> ChainMap:
    """``C(K) -> C(Bd^n K)``: each simplex goes to the signed sum of its pieces.

    One step is ``g([v]) = [b_v]`` and ``g(s) = b_s * g(ds)``, the cone placing
    the barycenter first and re-sorting with the permutation sign.
    """
    if iterations < 1:
        raise DomainError("iterations must be at least 1")
    phi = None
    cur = k
    for _ in range(iterations):
        sd = barycentric_subdivision(cur)
        step = _subdivision_step(sd)
        phi = step if phi is None else compose(step, phi)
        cur = sd.complex
    return phi


def compose(phi: ChainMap, psi: ChainMap) -> ChainMap:
    """``phi`` after ``psi``."""
    if psi.target != phi.source:
        raise DomainError("chain maps are not composable: target of the inner map differs")
    cols = {q: {s: phi.apply(c) for s, c in colq.items()} for q, colq in psi.columns.items()}
    return ChainMap(psi.source, phi.target, cols)


def _require_endo(phi: ChainMap) -> None:
    if not phi.is_endomorphism:
        raise DomainError("chain map is not an endomorphism")


def alternating_trace(phi: ChainMap) -> int:
    """``sum_q (-1)^q tr(phi_q)`` in the standard simplex basis."""
    _require_endo(phi)
    total = 0
    for q, colq in phi.columns.items():
        tr = sum(c[s] for s, c in colq.items())
        total += -tr if q % 2 else tr
    return total


def trace_in_basis(phi: ChainMap, basis: BasisQ) -> int:
    """Trace of ``phi_q`` computed in the coordinates of ``basis``."""
    _require_endo(phi)
    return sum(basis.coordinates(phi.apply(e))[j] for j, e in enumerate(basis.elements))


def hopf_rhs(phi: ChainMap, v: DiscreteVectorField) -> int:
    """``sum_q (-1)^q sum_{crit s} <s<-, phi(s->)>`` in the standard basis."""
    _require_endo(phi)
    if phi.source != v.complex:
        raise DomainError("chain map and vector field live on different complexes")
    cert = is_gradient(v)
    if not cert:
        raise DomainError("vector field is not gradient")
    total = 0
    for q, crit in critical_simplices(v).crit.items():
        part = 0
        for s in crit:
            image = phi.apply(critical_chain(v, s))
            if image:
                part += co_critical_chain(v, s).dot(image)
        total += -part if q % 2 else part
    return total


@dataclass(frozen=True)
class HopfReport:
    lhs: int
    rhs: int

    @property
    def equal(self) -> bool:
        return self.lhs == self.rhs

    def to_json(self) -> dict:
        return {"lhs": self.lhs, "rhs": self.rhs, "equal": self.equal}


def verify_hopf(phi: ChainMap, v: DiscreteVectorField) -> HopfReport:
    return HopfReport(alternating_trace(phi), hopf_rhs(phi, v))


def simplicial_approximation(sd: Subdivision, choice: Mapping[Simplex, int]) -> SimplicialMap:
    """``Bd(K) -> K`` sending each barycenter ``b_s`` to the chosen vertex of ``s``."""
    vm = {}
    for s, b in sd.barycenter.items():
        v = choice[s]
        if v not in s:
            raise DomainError(f"chosen vertex {v} does not belong to {list(s)}")
        vm[b] = v
    return SimplicialMap(sd.complex, sd.parent, vm)


def last_vertex_map(k: SimplicialComplex) -> SimplicialMap:
    sd = barycentric_subdivision(k)
    return simplicial_approximation(sd, {s: s[-1] for s in sd.barycenter})
