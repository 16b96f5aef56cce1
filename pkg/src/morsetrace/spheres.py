"""Combinatorial spheres, orientations, degrees and cyclic group actions."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .chainmaps import (
    ChainMap,
    SimplicialMap,
    compose,
    identity_map,
    induced_chain_map,
    subdivision_chain_map,
)
from .complex import (
    Chain,
    Simplex,
    SimplicialComplex,
    barycentric_subdivision,
    boundary,
    cone_embedding,
    cycle_graph,
    incidence_number,
    is_pseudomanifold,
    iterated_subdivision,
    join,
    join_offset,
    simplex,
)
from .errors import DomainError, IntegrityError, Verdict
from .morse import DiscreteVectorField, critical_chain, critical_simplices, is_gradient, split_witness


@dataclass(frozen=True)
class SphereWitness:
    """A gradient field whose only critical cells are a vertex and a top simplex."""

    field: DiscreteVectorField

    @property
    def complex(self) -> SimplicialComplex:
        return self.field.complex

    @property
    def dim(self) -> int:
        return self.field.complex.dim

    @property
    def base_vertex(self) -> Simplex:
        return split_witness(self.field)[0]

    @property
    def top_cell(self) -> Simplex:
        return split_witness(self.field)[1]

    def validate(self) -> Verdict:
        pm = is_pseudomanifold(self.complex)
        if not pm:
            return Verdict.failed(f"not a pseudomanifold: {pm.reason}", pm.witness)
        cert = is_gradient(self.field)
        if not cert:
            return Verdict.failed("field is not gradient", cert.cycle)
        try:
            _, top = split_witness(self.field)
        except DomainError as exc:
            return Verdict.failed(str(exc), critical_simplices(self.field).all_critical())
        bd = boundary(critical_chain(self.field, top))
        if bd:
            return Verdict.failed("critical chain of the top cell is not a cycle", bd)
        return Verdict.passed()

    @classmethod
    def checked(cls, field: DiscreteVectorField) -> "SphereWitness":
        w = cls(field)
        ok = w.validate()
        if not ok:
            raise DomainError(f"invalid sphere witness: {ok.reason}")
        return w


@dataclass(frozen=True)
class OrientationVector:
    """Signs on the top simplices, indexed by canonical order."""

    complex: SimplicialComplex
    signs: Tuple[int, ...]

    def cycle(self) -> Chain:
        d = self.complex.dim
        return Chain(d, dict(zip(self.complex.simplices(d), self.signs)))

    def __neg__(self) -> "OrientationVector":
        return OrientationVector(self.complex, tuple(-s for s in self.signs))

    def is_orientation(self) -> bool:
        return all(s in (1, -1) for s in self.signs) and not boundary(self.cycle())


def _require_positive_dim(k: SimplicialComplex) -> None:
    if k.dim < 1:
        raise DomainError("orientations are only meaningful in dimension at least 1")


def orientation_from_witness(w: SphereWitness) -> OrientationVector:
    """Signs read off the critical chain of the top cell."""
    _require_positive_dim(w.complex)
    cc = critical_chain(w.field, w.top_cell)
    tops = w.complex.simplices(w.dim)
    signs = tuple(cc[s] for s in tops)
    bad = [s for s, x in zip(tops, signs) if x not in (1, -1)]
    if bad:
        raise IntegrityError(f"critical chain has coefficient {cc[bad[0]]} on {list(bad[0])}")
    out = OrientationVector(w.complex, signs)
    if boundary(out.cycle()):
        raise IntegrityError("critical chain of the top cell is not a cycle")
    return out


def orientations(k: SimplicialComplex) -> List[OrientationVector]:
    """All orientations of a pseudomanifold, by sign propagation across shared facets.

    Returns ``[xi, -xi]`` or ``[]`` when the complex is not orientable.
    """
    _require_positive_dim(k)
    pm = is_pseudomanifold(k)
    if not pm:
        raise DomainError(f"not a pseudomanifold: {pm.reason}")
    d = k.dim
    tops = k.simplices(d)
    sign: Dict[Simplex, int] = {tops[0]: 1}
    todo = deque([tops[0]])
    while todo:
        a = todo.popleft()
        for i in range(len(a)):
            f = a[:i] + a[i + 1:]
            b = next(c for c in k.cofacets(f) if c != a)
            want = -incidence_number(a, f) * incidence_number(b, f) * sign[a]
            got = sign.get(b)
            if got is None:
                sign[b] = want
                todo.append(b)
            elif got != want:
                return []
    xi = OrientationVector(k, tuple(sign[s] for s in tops))
    return [xi, -xi]


def degree_of_chain_map(phi: ChainMap, w: SphereWitness,
                        orientation: Optional[OrientationVector] = None) -> int:
    """The integer m with ``phi([S]) = m [S]``, checked on every top simplex."""
    if not phi.is_endomorphism or phi.source != w.complex:
        raise DomainError("chain map must be an endomorphism of the witness complex")
    xi = orientation if orientation is not None else orientation_from_witness(w)
    fc = xi.cycle()
    img = phi.apply(fc)
    top = w.top_cell
    m = img[top] * fc[top]
    if img != fc * m:
        raise IntegrityError("image of the fundamental cycle is not a multiple of it")
    return m


def subdivision_source(target: SimplicialComplex, k: int) -> SimplicialComplex:
    if k < 0:
        raise DomainError("k must be non-negative")
    return iterated_subdivision(target, k)[-1].complex if k else target


def combinatorial_degree(f: SimplicialMap, w_bd: SphereWitness, k: int) -> int:
    """Degree of ``g^k f_#`` on the chains of ``Bd^k(S)`` for ``f: Bd^k(S) -> S``."""
    if f.source != subdivision_source(f.target, k):
        raise DomainError(f"source of the map is not the {k}-fold subdivision of its target")
    if w_bd.complex != f.source:
        raise DomainError("witness does not live on the source of the map")
    g = subdivision_chain_map(f.target, k) if k else identity_map(f.target)
    return degree_of_chain_map(compose(g, induced_chain_map(f)), w_bd)


def _flag_sign(flag: Sequence[Simplex]) -> int:
    """Coefficient of the flag simplex in the subdivision of its largest member."""
    sign = 1
    for j in range(1, len(flag)):
        added = next(x for x in flag[j] if x not in flag[j - 1])
        if (j + flag[j].index(added)) % 2:
            sign = -sign
    return sign


def pushforward_orientation(xi: OrientationVector, times: int) -> OrientationVector:
    """Orientation of ``Bd^times`` whose cycle is the subdivision of ``xi``'s cycle."""
    for sd in iterated_subdivision(xi.complex, times):
        d = sd.complex.dim
        parent_sign = dict(zip(sd.parent.simplices(d), xi.signs))
        signs = []
        for s in sd.complex.simplices(d):
            flag = sd.flag(s)
            signs.append(_flag_sign(flag) * parent_sign[flag[-1]])
        xi = OrientationVector(sd.complex, tuple(signs))
    return xi


def degree_oracle_preimage(f: SimplicialMap, k: int, eta: Optional[OrientationVector] = None) -> int:
    """Signed count of top simplices mapping onto each target top simplex."""
    if f.source != subdivision_source(f.target, k):
        raise DomainError(f"source of the map is not the {k}-fold subdivision of its target")
    eta = eta if eta is not None else orientations(f.target)[0]
    xi = pushforward_orientation(eta, k)
    d = f.target.dim
    counts = {s: 0 for s in f.target.simplices(d)}
    for s, x in zip(f.source.simplices(d), xi.signs):
        sign, img = f.signed_image(s)
        if sign:
            counts[img] += x * sign
    eta_sign = dict(zip(f.target.simplices(d), eta.signs))
    values = {counts[s] * eta_sign[s] for s in counts}
    if len(values) != 1:
        raise IntegrityError(f"preimage counts disagree across target simplices: {sorted(values)}")
    return values.pop()


# -- group actions -----------------------------------------------------------

def is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


class GroupAction:
    """Action of Z_p on a complex through a vertex permutation with ``g^p = id``."""

    def __init__(self, complex: SimplicialComplex, p: int, generator: Mapping[int, int]):
        if not is_prime(p):
            raise DomainError(f"p = {p} is not prime")
        gen = {int(a): int(b) for a, b in generator.items()}
        if sorted(gen) != list(complex.vertices) or sorted(gen.values()) != list(complex.vertices):
            raise DomainError("generator is not a permutation of the vertices")
        for m in complex.maximal_simplices():
            if simplex(gen[v] for v in m) not in complex:
                raise DomainError(f"generator does not map {list(m)} to a simplex")
        powers = [{v: v for v in gen}]
        for _ in range(p):
            powers.append({v: gen[w] for v, w in powers[-1].items()})
        if any(powers[p][v] != v for v in gen):
            raise DomainError(f"generator does not have order dividing {p}")
        self.complex = complex
        self.p = p
        self.generator = gen
        self._powers = powers[:p]

    def power(self, j: int) -> Dict[int, int]:
        return self._powers[j % self.p]

    def act(self, s: Simplex, j: int = 1) -> Simplex:
        g = self.power(j)
        return simplex(g[v] for v in s)

    def is_free(self) -> Verdict:
        for j in range(1, self.p):
            for s in self.complex.simplices():
                if s and self.act(s, j) == s:
                    return Verdict.failed(f"g^{j} fixes {list(s)}", (j, s))
        return Verdict.passed()

    def to_json(self) -> dict:
        return {"p": self.p, "generator": {str(v): self.generator[v] for v in sorted(self.generator)}}


def join_action(a1: GroupAction, a2: GroupAction) -> GroupAction:
    if a1.p != a2.p:
        raise DomainError(f"orders differ: {a1.p} vs {a2.p}")
    off = join_offset(a1.complex)
    gen = dict(a1.generator)
    gen.update({v + off: w + off for v, w in a2.generator.items()})
    return GroupAction(join(a1.complex, a2.complex), a1.p, gen)


def induced_action_on_bd(a: GroupAction) -> GroupAction:
    """``b_s -> b_{g s}`` on the barycentric subdivision."""
    sd = barycentric_subdivision(a.complex)
    gen = {b: sd.barycenter[a.act(s)] for s, b in sd.barycenter.items()}
    return GroupAction(sd.complex, a.p, gen)


def iterated_action(a: GroupAction, k: int) -> GroupAction:
    for _ in range(k):
        a = induced_action_on_bd(a)
    return a


def verify_equivariance(f: SimplicialMap, a_src: GroupAction, a_tgt: GroupAction) -> Verdict:
    if a_src.p != a_tgt.p:
        raise DomainError(f"orders differ: {a_src.p} vs {a_tgt.p}")
    if a_src.complex != f.source or a_tgt.complex != f.target:
        raise DomainError("actions do not live on the source and target of the map")
    for v in f.source.vertices:
        lhs = f(a_src.generator[v])
        rhs = a_tgt.generator[f(v)]
        if lhs != rhs:
            return Verdict.failed(f"f(g.{v}) = {lhs} but g.f({v}) = {rhs}", v)
    return Verdict.passed()


@dataclass(frozen=True)
class DegreeReport:
    degree: int
    p: int

    @property
    def residue(self) -> int:
        return self.degree % self.p

    @property
    def passed(self) -> bool:
        return self.residue == 1 % self.p

    def to_json(self) -> dict:
        return {"degree": self.degree, "p": self.p, "residue": self.residue, "pass": self.passed}


def verify_degree_mod_p(f: SimplicialMap, w_bd: SphereWitness, k: int,
                        a_src: GroupAction, a_tgt: GroupAction) -> DegreeReport:
    """Check that the degree of an equivariant map between free Z_p spheres is 1 mod p."""
    eq = verify_equivariance(f, a_src, a_tgt)
    if not eq:
        raise DomainError(f"map is not equivariant: {eq.reason}")
    for name, a in (("source", a_src), ("target", a_tgt)):
        fr = a.is_free()
        if not fr:
            raise DomainError(f"{name} action is not free: {fr.reason}")
    ok = w_bd.validate()
    if not ok:
        raise DomainError(f"witness is invalid: {ok.reason}")
    return DegreeReport(combinatorial_degree(f, w_bd, k), a_src.p)


def cone_lemma_check(f: SimplicialMap, w: SphereWitness) -> Verdict:
    """Whether ``f_#`` kills the fundamental cycle of S inside the cone ``x * S``.

    The cone is expected in the layout of :func:`complex.cone` (apex 0,
    base vertex ``v`` at ``v + 1``).
    """
    if f.target.dim > w.dim:
        raise DomainError("target dimension exceeds the sphere dimension")
    xi = orientation_from_witness(w)
    fc = Chain(w.dim, {cone_embedding(s): c for s, c in xi.cycle().items()})
    for s in fc:
        if s not in f.source:
            raise DomainError("map source is not the cone over the witness complex")
    img = induced_chain_map(f).apply(fc)
    if img:
        return Verdict.failed("fundamental cycle survives", img)
    return Verdict.passed()


def odd_dimension_check(w: SphereWitness, a: GroupAction) -> bool:
    """A free Z_p action with p > 2 forces odd dimension."""
    if a.complex != w.complex:
        raise DomainError("action and witness live on different complexes")
    fr = a.is_free()
    if not fr:
        raise DomainError(f"action is not free: {fr.reason}")
    return a.p == 2 or w.dim % 2 == 1


# -- builders ----------------------------------------------------------------

def circle_field(n: int) -> DiscreteVectorField:
    """Field on the n-gon with critical vertex 0 and critical edge ``[j, j+1]``, ``j = n//2 - 1``."""
    k = cycle_graph(n)
    j = n // 2 - 1
    pairs = [((i,), (i - 1, i)) for i in range(1, j + 1)]
    pairs += [((i,), simplex((i, (i + 1) % n))) for i in range(j + 1, n)]
    return DiscreteVectorField(k, pairs)


def build_zp_circle(p: int, m: int) -> Tuple[SphereWitness, GroupAction]:
    """The (m p)-gon with Z_p rotating it by m vertices."""
    n = m * p
    if n < 3:
        raise DomainError("the cycle needs at least 3 vertices")
    w = SphereWitness.checked(circle_field(n))
    a = GroupAction(w.complex, p, {i: (i + m) % n for i in range(n)})
    return w, a


def build_sphere0() -> Tuple[SphereWitness, GroupAction]:
    """S^0 on vertices 0, 1 with the antipodal swap."""
    k = SimplicialComplex.from_maximal([(0,), (1,)])
    w = SphereWitness.checked(DiscreteVectorField(k, [((), (0,))]))
    return w, GroupAction(k, 2, {0: 1, 1: 0})


def cyclic_order(k: SimplicialComplex, start: int, toward: int) -> List[int]:
    """Vertices of a cycle graph listed from ``start`` in the direction of ``toward``."""
    if (start, toward) not in k and (toward, start) not in k:
        raise DomainError(f"{start} and {toward} are not adjacent")
    order = [start, toward]
    while True:
        prev, cur = order[-2], order[-1]
        nbrs = [v for e in k.cofacets((cur,)) for v in e if v != cur]
        if len(nbrs) != 2:
            raise DomainError("complex is not a cycle")
        nxt = nbrs[0] if nbrs[1] == prev else nbrs[1]
        if nxt == start:
            break
        order.append(nxt)
    if len(order) != len(k.vertices):
        raise DomainError("complex is not a single cycle")
    return order


def lift_vertex(target: SimplicialComplex, k: int, v: int) -> int:
    """Id of an original vertex after ``k`` subdivisions."""
    for sd in iterated_subdivision(target, k):
        v = sd.barycenter[(v,)]
    return v


def lift_edge_neighbor(target: SimplicialComplex, k: int, v: int, w: int) -> int:
    """Neighbour of the lifted ``v`` in ``Bd^k`` on the way to ``w``."""
    if k == 0:
        return w
    subs = iterated_subdivision(target, k)
    a, b = v, w
    for sd in subs:
        e = simplex((a, b))
        a, b = sd.barycenter[(a,)], sd.barycenter[e]
    return b


def wrap_map(n: int, k: int, winding_target: Optional[SimplicialComplex] = None) -> SimplicialMap:
    """``Bd^k(C_n) -> C_n`` sending the vertex at cyclic position i to ``i mod n``."""
    target = winding_target if winding_target is not None else cycle_graph(n)
    src = subdivision_source(target, k)
    order = cyclic_order(src, lift_vertex(target, k, 0), lift_edge_neighbor(target, k, 0, 1))
    return SimplicialMap(src, target, {v: i % n for i, v in enumerate(order)})
