"""Discrete vector fields, trajectories and the modified chain basis.

Critical and co-critical chains are sums of trajectory weights.  They are
computed by dynamic programming along a topological order of the
per-dimension trajectory digraph rather than by listing trajectories.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from graphlib import CycleError, TopologicalSorter
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

from .complex import (
    EMPTY,
    Chain,
    Simplex,
    SimplicialComplex,
    barycentric_subdivision,
    boundary,
    cone,
    cone_embedding,
    incidence_number,
    join,
    join_offset,
    simplex,
    skeleton_of_simplex,
)
from .errors import CollapseError, DomainError, Verdict
from .linalg import Elimination

Pair = Tuple[Simplex, Simplex]


class DiscreteVectorField:
    """A set of pairs ``(alpha, beta)`` with ``alpha`` a facet of ``beta``.

    The raw pair list is kept as given so that malformed fields can still be
    inspected by :func:`validate_dvf`.  ``up`` maps alpha to beta and
    ``down`` maps beta to alpha.
    """

    def __init__(self, complex: SimplicialComplex, pairs: Iterable[Tuple[Iterable[int], Iterable[int]]]):
        self.complex = complex
        self.pairs: Tuple[Pair, ...] = tuple(sorted(
            (simplex(a), simplex(b)) for a, b in pairs))
        self.up: Dict[Simplex, Simplex] = {a: b for a, b in self.pairs}
        self.down: Dict[Simplex, Simplex] = {b: a for a, b in self.pairs}
        self._cache: dict = {}

    def __len__(self) -> int:
        return len(self.pairs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DiscreteVectorField):
            return NotImplemented
        return self.complex == other.complex and self.pairs == other.pairs

    def __hash__(self) -> int:
        return hash((self.complex, self.pairs))

    def __repr__(self) -> str:
        return f"DiscreteVectorField({len(self.pairs)} pairs on {self.complex!r})"

    def with_complex(self, k: SimplicialComplex) -> "DiscreteVectorField":
        return DiscreteVectorField(k, self.pairs)

    def empty_partner(self) -> Optional[Simplex]:
        """The vertex paired with the empty simplex, if any."""
        return self.up.get(EMPTY)


def validate_dvf(v: DiscreteVectorField) -> Verdict:
    k = v.complex
    seen: Set[Simplex] = set()
    for a, b in v.pairs:
        for s in (a, b):
            if s not in k:
                return Verdict.failed(f"simplex {list(s)} is not in the complex", s)
        if len(b) != len(a) + 1 or not set(a) <= set(b):
            return Verdict.failed(f"{list(a)} is not a facet of {list(b)}", (a, b))
        for s in (a, b):
            if s in seen:
                return Verdict.failed(f"simplex {list(s)} occurs in more than one pair", s)
            seen.add(s)
    return Verdict.passed()


def _require_valid(v: DiscreteVectorField) -> None:
    verdict = validate_dvf(v)
    if not verdict:
        raise DomainError(f"invalid discrete vector field: {verdict.reason}")


@dataclass(frozen=True)
class Trajectory:
    """Alternating face sequence; ``direction`` is 'down' (V) or 'up' (co-V)."""

    direction: str
    faces: Tuple[Simplex, ...]
    weight: int

    @property
    def initial(self) -> Simplex:
        return self.faces[0]

    @property
    def terminal(self) -> Simplex:
        return self.faces[-1]

    @property
    def closed(self) -> bool:
        return len(self.faces) > 1 and self.faces[0] == self.faces[-1]

    def to_json(self) -> dict:
        return {"direction": self.direction, "faces": [list(s) for s in self.faces],
                "weight": self.weight}


def trajectory_weight(faces: Sequence[Simplex], direction: str = "down") -> int:
    """Weight of a face sequence ``b0, a1, b1, ...`` (or ``b0, t1, b1, ...`` going up)."""
    w = 1
    for i in range(1, len(faces) - 1, 2):
        prev, mid, nxt = faces[i - 1], faces[i], faces[i + 1]
        if direction == "down":
            w *= -incidence_number(prev, mid) * incidence_number(nxt, mid)
        else:
            w *= -incidence_number(mid, prev) * incidence_number(mid, nxt)
    return w


@dataclass(frozen=True)
class GradientCertificate:
    """Per-dimension topological orders, or a closed trajectory when cyclic."""

    orders: Mapping[int, Tuple[Simplex, ...]] = field(default_factory=dict)
    cycle: Optional[Trajectory] = None

    def __bool__(self) -> bool:
        return self.cycle is None


class _Digraph:
    __slots__ = ("succ", "pos", "order")

    def __init__(self, succ: Dict[Simplex, List[Tuple[Simplex, int]]], order: Tuple[Simplex, ...]):
        self.succ = succ
        self.order = order
        self.pos = {s: i for i, s in enumerate(order)}


def _trajectory_edges(v: DiscreteVectorField, q: int) -> Dict[Simplex, List[Tuple[Simplex, int]]]:
    """Edges ``b -> b'`` (with weights) of the V-trajectory digraph on q-simplices."""
    up = v.up
    succ: Dict[Simplex, List[Tuple[Simplex, int]]] = {}
    if q < 1:
        return succ
    for b in v.complex.simplices(q):
        out = []
        for i in range(len(b)):
            a = b[:i] + b[i + 1:]
            b2 = up.get(a)
            if b2 is None or b2 == b:
                continue
            out.append((b2, -(1 if i % 2 == 0 else -1) * incidence_number(b2, a)))
        if out:
            succ[b] = out
    return succ


def _co_trajectory_edges(v: DiscreteVectorField, q: int) -> Dict[Simplex, List[Tuple[Simplex, int]]]:
    """Edges ``b -> b'`` of the co-V-trajectory digraph on q-simplices."""
    down = v.down
    k = v.complex
    succ: Dict[Simplex, List[Tuple[Simplex, int]]] = {}
    if q < 0:
        return succ
    for b in k.simplices(q):
        out = []
        for t in k.cofacets(b):
            b2 = down.get(t)
            if b2 is None or b2 == b:
                continue
            out.append((b2, -incidence_number(t, b) * incidence_number(t, b2)))
        if out:
            succ[b] = out
    return succ


def _toposort(nodes: Iterable[Simplex], succ: Mapping[Simplex, List[Tuple[Simplex, int]]]):
    ts: TopologicalSorter = TopologicalSorter()
    for n in nodes:
        ts.add(n)
    for a, outs in succ.items():
        for b, _ in outs:
            ts.add(b, a)
    try:
        ts.prepare()
    except CycleError as exc:
        return None, exc.args[1]
    order: List[Simplex] = []
    while ts.is_active():
        ready = sorted(ts.get_ready())
        order.extend(ready)
        ts.done(*ready)
    return tuple(order), None


def _digraph(v: DiscreteVectorField, q: int, co: bool = False) -> _Digraph:
    key = ("co" if co else "tr", q)
    g = v._cache.get(key)
    if g is None:
        succ = (_co_trajectory_edges if co else _trajectory_edges)(v, q)
        order, cycle = _toposort(v.complex.simplices(q), succ)
        if order is None:
            raise DomainError(f"field is not gradient: closed trajectory in dimension {q}")
        g = _Digraph(succ, order)
        v._cache[key] = g
    return g


def _closed_trajectory(v: DiscreteVectorField, cycle: Sequence[Simplex]) -> Trajectory:
    # graphlib lists the cycle so that each node precedes the next; rotate to its minimum
    nodes = list(cycle[:-1])
    start = nodes.index(min(nodes))
    nodes = nodes[start:] + nodes[:start] + [nodes[start]]
    faces: List[Simplex] = [nodes[0]]
    for b in nodes[1:]:
        faces.append(v.down[b])
        faces.append(b)
    return Trajectory("down", tuple(faces), trajectory_weight(faces))


def is_gradient(v: DiscreteVectorField) -> GradientCertificate:
    """Topological orders for every dimension, or a closed V-trajectory."""
    _require_valid(v)
    if "cert" in v._cache:
        return v._cache["cert"]
    orders = {}
    result = None
    for q in range(1, v.complex.dim + 1):
        succ = _trajectory_edges(v, q)
        order, cycle = _toposort(v.complex.simplices(q), succ)
        if order is None:
            result = GradientCertificate({}, _closed_trajectory(v, cycle))
            break
        orders[q] = order
        v._cache[("tr", q)] = _Digraph(succ, order)
    if result is None:
        result = GradientCertificate(orders)
    v._cache["cert"] = result
    return result


def _require_gradient(v: DiscreteVectorField) -> None:
    cert = is_gradient(v)
    if not cert:
        faces = " ".join(str(list(s)) for s in cert.cycle.faces)
        raise DomainError(f"field is not gradient; closed trajectory {faces}")


@dataclass(frozen=True)
class CriticalPartition:
    """``S_q = Crit_q + U_q + D_q`` for every dimension q >= 0."""

    crit: Mapping[int, Tuple[Simplex, ...]]
    up: Mapping[int, Tuple[Simplex, ...]]
    down: Mapping[int, Tuple[Simplex, ...]]

    def all_critical(self) -> List[Simplex]:
        return [s for q in sorted(self.crit) for s in self.crit[q]]

    def census(self) -> Dict[int, int]:
        return {q: len(c) for q, c in sorted(self.crit.items()) if c}


def critical_simplices(v: DiscreteVectorField) -> CriticalPartition:
    hit = v._cache.get("crit")
    if hit is not None:
        return hit
    k = v.complex
    crit, up, down = {}, {}, {}
    zero_partner = v.empty_partner()
    for q in range(0, k.dim + 1):
        c, u, d = [], [], []
        for s in k.simplices(q):
            if s in v.up:
                u.append(s)
            elif s in v.down and s != zero_partner:
                d.append(s)
            else:
                c.append(s)
        crit[q], up[q], down[q] = tuple(c), tuple(u), tuple(d)
    part = CriticalPartition(crit, up, down)
    v._cache["crit"] = part
    return part


def _is_critical(v: DiscreteVectorField, s: Simplex) -> bool:
    if s not in v.complex or s == EMPTY:
        return False
    return s in critical_simplices(v).crit.get(len(s) - 1, ())


def _path_sum(g: _Digraph, source: Simplex) -> Dict[Simplex, int]:
    """Sum of path weights from ``source`` to every reachable node."""
    reach = {source}
    stack = [source]
    succ = g.succ
    while stack:
        x = stack.pop()
        for y, _ in succ.get(x, ()):
            if y not in reach:
                reach.add(y)
                stack.append(y)
    val: Dict[Simplex, int] = {source: 1}
    for x in sorted(reach, key=g.pos.__getitem__):
        vx = val.get(x, 0)
        if not vx:
            continue
        for y, w in succ.get(x, ()):
            val[y] = val.get(y, 0) + vx * w
    return val


def critical_chain(v: DiscreteVectorField, sigma: Iterable[int]) -> Chain:
    """The critical chain of ``sigma``: sum of ``w(P) t(P)`` over V-trajectories from it."""
    sigma = simplex(sigma)
    _require_gradient(v)
    if not _is_critical(v, sigma):
        raise DomainError(f"{list(sigma)} is not a critical simplex")
    key = ("cc", sigma)
    if key not in v._cache:
        q = len(sigma) - 1
        v._cache[key] = Chain._trusted(q, _path_sum(_digraph(v, q), sigma))
    return v._cache[key]


def co_critical_chain(v: DiscreteVectorField, sigma: Iterable[int]) -> Chain:
    """The co-critical chain of ``sigma``: sum of ``w(Q) t(Q)`` over co-V-trajectories."""
    sigma = simplex(sigma)
    _require_gradient(v)
    if not _is_critical(v, sigma):
        raise DomainError(f"{list(sigma)} is not a critical simplex")
    key = ("co", sigma)
    if key not in v._cache:
        q = len(sigma) - 1
        v._cache[key] = Chain._trusted(q, _path_sum(_digraph(v, q, co=True), sigma))
    return v._cache[key]


@dataclass(frozen=True)
class BasisQ:
    """An ordered basis of ``C_q`` with a provenance tag per element.

    Tags are ``("simplex", s)``, ``("critical", sigma)``, ``("boundary", alpha)``
    for ``d(V(alpha))`` and ``("down", beta)``.
    """

    dim: int
    elements: Tuple[Chain, ...]
    tags: Tuple[Tuple[str, Simplex], ...]
    rows: Tuple[Simplex, ...]

    def __len__(self) -> int:
        return len(self.elements)

    def _elim(self) -> Elimination:
        e = self.__dict__.get("_elim_cache")
        if e is None:
            e = Elimination([el.as_dict() for el in self.elements], self.rows, inverse=True)
            object.__setattr__(self, "_elim_cache", e)
        return e

    def determinant(self) -> int:
        """Determinant of the change of basis from the standard simplex basis."""
        return self._elim().determinant()

    def coordinates(self, c: Chain) -> List[int]:
        if c and c.dim != self.dim:
            raise DomainError(f"chain of dimension {c.dim} in a basis of dimension {self.dim}")
        e = self._elim()
        if e.singular:
            raise DomainError("basis is not invertible")
        x = e.solve(c.as_dict())
        for t in x:
            if not isinstance(t, int):
                raise DomainError("chain has non-integral coordinates in this basis")
        return x

    def inner(self, c1: Chain, c2: Chain) -> int:
        return sum(a * b for a, b in zip(self.coordinates(c1), self.coordinates(c2)))

    def index_of(self, tag: Tuple[str, Simplex]) -> int:
        return self.tags.index(tag)


def standard_basis(k: SimplicialComplex, q: int) -> BasisQ:
    ss = k.simplices(q)
    return BasisQ(q, tuple(Chain.of(s) for s in ss), tuple(("simplex", s) for s in ss), ss)


def inner_product(c1: Chain, c2: Chain, basis: Optional[BasisQ] = None) -> int:
    """Inner product in the standard basis, or in ``basis`` coordinates."""
    if c1 and c2 and c1.dim != c2.dim:
        raise DomainError(f"dimension mismatch: {c1.dim} vs {c2.dim}")
    if basis is None:
        return c1.dot(c2)
    return basis.inner(c1, c2)


def modified_basis(v: DiscreteVectorField, q: int) -> BasisQ:
    """Critical chains, then ``d V(alpha)`` in topological order, then ``D_q``."""
    _require_gradient(v)
    k = v.complex
    part = critical_simplices(v)
    elems: List[Chain] = []
    tags: List[Tuple[str, Simplex]] = []
    for s in part.crit.get(q, ()):
        elems.append(critical_chain(v, s))
        tags.append(("critical", s))
    for a in _u_order(v, q):
        elems.append(boundary(Chain.of(v.up[a])))
        tags.append(("boundary", a))
    for b in part.down.get(q, ()):
        elems.append(Chain.of(b))
        tags.append(("down", b))
    return BasisQ(q, tuple(elems), tuple(tags), k.simplices(q))


def _u_order(v: DiscreteVectorField, q: int) -> List[Simplex]:
    """``U_q`` ordered so that ``a_i`` precedes ``a_j`` whenever ``a_i`` is a face of ``V(a_j)``."""
    us = critical_simplices(v).up.get(q, ())
    uset = set(us)
    ts: TopologicalSorter = TopologicalSorter()
    for a in us:
        ts.add(a)
        b = v.up[a]
        for i in range(len(b)):
            f = b[:i] + b[i + 1:]
            if f != a and f in uset:
                ts.add(a, f)
    try:
        return list(ts.static_order())
    except CycleError as exc:  # pragma: no cover - excluded by the gradient check
        raise DomainError(f"U_{q} ordering is cyclic: {exc.args[1]}")


# -- constructors ----------------------------------------------------------

def gvf_skeleton_minus_facet(n: int) -> Tuple[SimplicialComplex, DiscreteVectorField]:
    """Collapsing field on the boundary of the n-simplex minus the facet ``[0..n-1]``.

    Every simplex ``a`` avoiding vertex ``n`` (including the empty one) is
    paired with ``a + [n]``; the only critical simplex is ``[n]``.
    """
    if n < 1:
        raise DomainError("n must be at least 1")
    sk = skeleton_of_simplex(n, n - 1)
    facet = tuple(range(n))
    k = sk.without(facet)
    pairs = [(a, a + (n,)) for a in k.simplices() if n not in a]
    return k, DiscreteVectorField(k, pairs)


def skeleton_sphere_witness(n: int) -> DiscreteVectorField:
    """The skeleton field extended to the whole boundary sphere; ``[0..n-1]`` stays critical."""
    _, v = gvf_skeleton_minus_facet(n)
    return DiscreteVectorField(skeleton_of_simplex(n, n - 1), v.pairs)


def is_collapsibility_witness(v: DiscreteVectorField) -> Verdict:
    verdict = validate_dvf(v)
    if not verdict:
        return verdict
    cert = is_gradient(v)
    if not cert:
        return Verdict.failed("field is not gradient", cert.cycle)
    crit = critical_simplices(v).all_critical()
    zero = v.empty_partner()
    if len(crit) != 1 or zero is None or crit[0] != zero:
        return Verdict.failed("expected a single critical vertex paired with the empty simplex", crit)
    return Verdict.passed()


def gvf_cone_transfer(v: DiscreteVectorField, apex="x", with_base: bool = False
                      ) -> Tuple[SimplicialComplex, DiscreteVectorField]:
    """Lift a collapsing field on K to ``apex * K`` by adding the apex to each pair.

    The apex has id 0 in the cone.  With ``with_base`` the original pairs are
    kept on the base as well, which makes the cone collapsible.
    """
    ok = is_collapsibility_witness(v)
    if not ok:
        raise DomainError(f"not a collapsibility witness: {ok.reason}")
    ck = cone(v.complex, apex)
    pairs = [((0,) + cone_embedding(a), (0,) + cone_embedding(b)) for a, b in v.pairs]
    if with_base:
        pairs += [(cone_embedding(a), cone_embedding(b)) for a, b in v.pairs]
    return ck, DiscreteVectorField(ck, pairs)


@dataclass
class CollapseResult:
    ok: bool
    field: Optional[DiscreteVectorField]
    pairs: List[Pair]
    remaining: List[Simplex]

    def __bool__(self) -> bool:
        return self.ok


def greedy_collapse(k: SimplicialComplex, keep: Iterable[Iterable[int]] = ((),),
                    backtrack_depth: int = 0) -> CollapseResult:
    """Collapse ``k`` onto the subcomplex ``keep`` through elementary collapses.

    Free faces are taken lexicographically smallest first.  When ``keep`` is
    just the empty simplex the last vertex is paired with it.  At most
    ``backtrack_depth`` choices are revisited when the greedy run gets stuck.
    """
    keepset = {simplex(s) for s in keep} | {EMPTY}
    for s in keepset:
        if s not in k:
            raise DomainError(f"keep simplex {list(s)} is not in the complex")
    count = {s: len(k.cofacets(s)) for s in k.simplices()}
    best = _collapse(k, keepset, set(k.simplices()), count, [], backtrack_depth)
    pairs, remaining = best
    if remaining == keepset:
        return CollapseResult(True, DiscreteVectorField(k, pairs), pairs, sorted(remaining))
    if keepset == {EMPTY} and len(remaining) == 2:
        v = next(s for s in remaining if s)
        pairs = pairs + [(EMPTY, v)]
        return CollapseResult(True, DiscreteVectorField(k, pairs), pairs, [EMPTY])
    return CollapseResult(False, None, pairs, sorted(remaining, key=lambda s: (len(s), s)))


def _done(remaining: Set[Simplex], keepset: Set[Simplex]) -> bool:
    return remaining == keepset or (keepset == {EMPTY} and len(remaining) == 2)


def _collapse(k, keepset, remaining, count, pairs, depth):
    remaining = set(remaining)
    count = dict(count)
    pairs = list(pairs)

    def is_free(s):
        return s in remaining and s not in keepset and s and count[s] == 1

    heap = [s for s in remaining if is_free(s)]
    heapq.heapify(heap)
    while heap:
        if depth > 0 and len(heap) > 1:
            # branch: try every currently free face in order
            options = sorted({s for s in heap if is_free(s)})
            best = None
            for s in options:
                res = _apply_and_recurse(k, keepset, remaining, count, pairs, s, depth - 1)
                if _done(res[1], keepset):
                    return res
                if best is None or len(res[1]) < len(best[1]):
                    best = res
            return best
        s = heapq.heappop(heap)
        if not is_free(s):
            continue
        t = next(c for c in k.cofacets(s) if c in remaining)
        pairs.append((s, t))
        _remove(k, remaining, count, s, t, heap, is_free)
    return pairs, remaining


def _apply_and_recurse(k, keepset, remaining, count, pairs, s, depth):
    remaining = set(remaining)
    count = dict(count)
    t = next(c for c in k.cofacets(s) if c in remaining)
    _remove(k, remaining, count, s, t, [], lambda x: False)
    return _collapse(k, keepset, remaining, count, pairs + [(s, t)], depth)


def _remove(k, remaining, count, s, t, heap, is_free):
    remaining.discard(s)
    remaining.discard(t)
    for i in range(len(t)):
        f = t[:i] + t[i + 1:]
        count[f] -= 1
        if is_free(f):
            heapq.heappush(heap, f)
    for i in range(len(s)):
        f = s[:i] + s[i + 1:]
        count[f] -= 1
        if is_free(f):
            heapq.heappush(heap, f)


def split_witness(v: DiscreteVectorField) -> Tuple[Simplex, Simplex]:
    """``(base_vertex, top_cell)`` of a field with exactly two critical cells.

    For 0-dimensional spheres the vertex paired with the empty simplex (or
    else the smaller vertex) is taken as the base.
    """
    _require_gradient(v)
    crit = critical_simplices(v).all_critical()
    if len(crit) != 2:
        raise DomainError(f"expected two critical simplices, found {len(crit)}")
    a, b = sorted(crit, key=lambda s: (len(s), s))
    d = v.complex.dim
    if len(a) != 1 or len(b) != d + 1:
        raise DomainError("critical simplices must be one vertex and one top simplex")
    if d == 0:
        zero = v.empty_partner()
        if zero == b:
            a, b = b, a
    return a, b


def gvf_join(vc: DiscreteVectorField, vd: DiscreteVectorField
             ) -> Tuple[SimplicialComplex, DiscreteVectorField]:
    """Two-critical field on ``C * D`` assembled from witnesses on C and D."""
    c0, cm = split_witness(vc)
    d0, dn = split_witness(vd)
    kc, kd = vc.complex, vd.complex
    jk = join(kc, kd)
    off = join_offset(kc)

    def sh(t: Simplex) -> Simplex:
        return tuple(x + off for x in t)

    crit_c = critical_simplices(vc).all_critical()
    uc = [a for a in vc.up if a]
    ud = [a for a in vd.up if a]
    dd0 = sh(d0)
    pairs: List[Pair] = []
    for s in kc.simplices():                                   # W1
        pairs.append((s, s + dd0))
    for t in ud:                                               # W2
        pairs.append((sh(t), sh(vd.up[t])))
    for s in uc:                                               # W3
        for t in kd.simplices():
            if t and t != d0:
                pairs.append((s + sh(t), vc.up[s] + sh(t)))
    for s in crit_c:                                           # W4
        for t in ud:
            pairs.append((s + sh(t), s + sh(vd.up[t])))
    pairs.append((sh(dn), c0 + sh(dn)))                        # W5
    return jk, DiscreteVectorField(jk, pairs)


def sphere_witness_bd(v: DiscreteVectorField, backtrack_depth: int = 0
                      ) -> Tuple[SimplicialComplex, DiscreteVectorField]:
    """Two-critical field on ``Bd(S)`` from a two-critical field on S.

    A top simplex ``tau`` of ``Bd(S)`` through the barycenter of the critical
    top cell is removed, the rest is collapsed greedily to a point and
    ``tau`` is left critical.
    """
    _, top = split_witness(v)
    sd = barycentric_subdivision(v.complex)
    bd = sd.complex
    bc = sd.barycenter[top]
    d = bd.dim
    tau = next(s for s in bd.simplices(d) if bc in s)
    res = greedy_collapse(bd.without(tau), ((),), backtrack_depth)
    if not res:
        raise CollapseError(
            f"greedy collapse of Bd minus {list(tau)} got stuck with "
            f"{len(res.remaining)} simplices left", res.remaining)
    return bd, DiscreteVectorField(bd, res.pairs)
