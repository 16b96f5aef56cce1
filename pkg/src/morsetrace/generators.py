"""Random instances and the named fixture set used by tests and the CLI."""

from __future__ import annotations

import itertools
import random
from typing import Dict, List, Optional, Tuple

from .chainmaps import (
    ChainMap,
    SimplicialMap,
    compose,
    identity_map,
    induced_chain_map,
    simplicial_approximation,
    subdivision_chain_map,
    zero_map,
)
from .complex import EMPTY, Simplex, SimplicialComplex, barycentric_subdivision, simplex
from .errors import DomainError
from .morse import DiscreteVectorField, gvf_join, skeleton_sphere_witness, sphere_witness_bd
from .spheres import (
    GroupAction,
    SphereWitness,
    build_sphere0,
    build_zp_circle,
    circle_field,
    induced_action_on_bd,
    join_action,
)

MAP_KINDS = ("identity", "zero", "induced", "subdivision")


def random_complex(rng: random.Random, max_simplices: int = 300, max_dim: int = 3,
                   n_vertices: Optional[int] = None) -> SimplicialComplex:
    """Closure of random simplices; at most ``max_simplices`` simplices counting the empty one."""
    n = n_vertices if n_vertices is not None else rng.randint(4, 14)
    target = rng.randint(min(8, max_simplices), max_simplices)
    pool = {EMPTY}
    misses = 0
    while len(pool) < target and misses < 80:
        d = rng.randint(0, min(max_dim, n - 1))
        top = tuple(sorted(rng.sample(range(n), d + 1)))
        new = [f for r in range(1, d + 2) for f in itertools.combinations(top, r) if f not in pool]
        if not new or len(pool) + len(new) > max_simplices:
            misses += 1
            continue
        pool.update(new)
    if len(pool) == 1:
        pool.add((0,))
    used = sorted({v for s in pool for v in s})
    relabel = {v: i for i, v in enumerate(used)}
    return SimplicialComplex(simplex(relabel[v] for v in s) for s in pool)


def random_gradient_field(k: SimplicialComplex, rng: random.Random,
                          empty_pair: Optional[bool] = None) -> DiscreteVectorField:
    """Maximal acyclic matching built greedily from randomly ordered face pairs."""
    up: Dict[Simplex, Simplex] = {}
    matched = set()
    if empty_pair is None:
        empty_pair = rng.random() < 0.5
    if empty_pair and k.vertices:
        v = (rng.choice(k.vertices),)
        up[EMPTY] = v
        matched.update((EMPTY, v))
    cands = [(s[:i] + s[i + 1:], s) for s in k.simplices() if len(s) >= 2 for i in range(len(s))]
    rng.shuffle(cands)
    for a, b in cands:
        if a in matched or b in matched:
            continue
        targets = set(k.cofacets(a)) - {b}
        if targets and _reaches(b, targets, up):
            continue
        up[a] = b
        matched.add(a)
        matched.add(b)
    return DiscreteVectorField(k, list(up.items()))


def _reaches(start: Simplex, targets, up) -> bool:
    seen = {start}
    stack = [start]
    while stack:
        x = stack.pop()
        for i in range(len(x)):
            y = up.get(x[:i] + x[i + 1:])
            if y is None or y == x or y in seen or len(y) != len(x):
                continue
            if y in targets:
                return True
            seen.add(y)
            stack.append(y)
    return False


def random_simplicial_map(source: SimplicialComplex, target: SimplicialComplex,
                          rng: random.Random, restarts: int = 20, budget: int = 2000) -> SimplicialMap:
    """Random simplicial vertex map found by backtracking with random restarts.

    Falls back to a constant map, which is always simplicial, if every
    attempt runs out of budget.
    """
    maximal_of: Dict[int, List[Simplex]] = {v: [] for v in source.vertices}
    for m in source.maximal_simplices():
        for v in m:
            maximal_of[v].append(m)
    tverts = list(target.vertices)
    if not tverts:
        raise DomainError("target has no vertices")
    for _ in range(restarts):
        found = _search_map(source, target, tverts, maximal_of, rng, budget)
        if found is not None:
            return SimplicialMap(source, target, found)
    w = rng.choice(tverts)
    return SimplicialMap(source, target, {v: w for v in source.vertices})


def _search_map(source, target, tverts, maximal_of, rng, budget):
    order = list(source.vertices)
    rng.shuffle(order)
    assign: Dict[int, int] = {}
    steps = 0

    def ok(v: int) -> bool:
        for m in maximal_of[v]:
            if simplex({assign[u] for u in m if u in assign}) not in target:
                return False
        return True

    def go(i: int) -> bool:
        nonlocal steps
        if i == len(order):
            return True
        v = order[i]
        opts = tverts[:]
        rng.shuffle(opts)
        for w in opts:
            steps += 1
            if steps > budget:
                return False
            assign[v] = w
            if ok(v) and go(i + 1):
                return True
            del assign[v]
        return False

    return dict(assign) if go(0) else None


def random_bd_approximation(k: SimplicialComplex, rng: random.Random) -> SimplicialMap:
    """``Bd(K) -> K`` sending each barycenter to a random vertex of its simplex."""
    sd = barycentric_subdivision(k)
    return simplicial_approximation(sd, {s: rng.choice(s) for s in sd.barycenter})


def random_chain_map(k: SimplicialComplex, rng: random.Random, kind: Optional[str] = None
                     ) -> Tuple[str, ChainMap]:
    kind = kind or rng.choice(MAP_KINDS)
    if kind == "identity":
        return kind, identity_map(k)
    if kind == "zero":
        return kind, zero_map(k)
    if kind == "induced":
        return kind, induced_chain_map(random_simplicial_map(k, k, rng))
    if kind == "subdivision":
        f = random_bd_approximation(k, rng)
        return kind, compose(induced_chain_map(f), subdivision_chain_map(k))
    raise DomainError(f"unknown map kind {kind!r}")


# -- fixtures ---------------------------------------------------------------

def octahedron_witness() -> SphereWitness:
    s0 = build_sphere0()[0].field
    _, v = gvf_join(s0, s0)
    _, v = gvf_join(v, s0)
    return SphereWitness.checked(v)


def sphere_fixtures() -> Dict[str, SphereWitness]:
    """Named two-critical spheres of dimensions 0 to 3."""
    out: Dict[str, SphereWitness] = {}
    out["S0"] = build_sphere0()[0]
    out["C3"] = SphereWitness.checked(circle_field(3))
    out["C6"] = SphereWitness.checked(circle_field(6))
    out["octahedron"] = octahedron_witness()
    out["boundary_simplex_3"] = SphereWitness.checked(skeleton_sphere_witness(3))
    out["boundary_simplex_4"] = SphereWitness.checked(skeleton_sphere_witness(4))
    c6 = out["C6"].field
    out["join_C6_C6"] = SphereWitness.checked(gvf_join(c6, c6)[1])
    out["Bd_C6"] = SphereWitness.checked(sphere_witness_bd(c6)[1])
    out["Bd_octahedron"] = SphereWitness.checked(sphere_witness_bd(out["octahedron"].field)[1])
    return out


def zp_fixtures() -> Dict[str, Tuple[SphereWitness, GroupAction]]:
    """Free Z_p spheres built from circles, S^0, joins and subdivisions."""
    out: Dict[str, Tuple[SphereWitness, GroupAction]] = {}
    out["S0_Z2"] = build_sphere0()
    for p, m in ((2, 2), (2, 3), (3, 1), (3, 2), (5, 1), (5, 2), (7, 1)):
        out[f"C{p * m}_Z{p}"] = build_zp_circle(p, m)
    w0, a0 = out["S0_Z2"]
    _, v = gvf_join(w0.field, w0.field)
    out["C4join_Z2"] = (SphereWitness.checked(v), join_action(a0, a0))
    w3, a3 = out["C3_Z3"]
    _, v = gvf_join(w3.field, w3.field)
    out["C3*C3_Z3"] = (SphereWitness.checked(v), join_action(a3, a3))
    w5, a5 = out["C5_Z5"]
    _, v = gvf_join(w5.field, w5.field)
    out["C5*C5_Z5"] = (SphereWitness.checked(v), join_action(a5, a5))
    w6, a6 = out["C6_Z3"]
    _, v = sphere_witness_bd(w6.field)
    out["Bd_C6_Z3"] = (SphereWitness.checked(v), induced_action_on_bd(a6))
    wo = octahedron_witness()
    ao = join_action(join_action(a0, a0), a0)
    out["octahedron_Z2"] = (wo, GroupAction(wo.complex, 2, ao.generator))
    return out
