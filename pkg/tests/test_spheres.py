from __future__ import annotations

import random

import pytest
import sympy

from morsetrace.chainmaps import SimplicialMap, identity_map, induced_chain_map, simplicial_approximation
from morsetrace.complex import (
    Chain,
    SimplicialComplex,
    barycentric_subdivision,
    boundary,
    cone,
    cycle_graph,
    full_simplex,
    iterated_subdivision,
)
from morsetrace.errors import DomainError, IntegrityError
from morsetrace.generators import random_simplicial_map
from morsetrace.morse import sphere_witness_bd
from morsetrace.spheres import (
    GroupAction,
    SphereWitness,
    build_sphere0,
    build_zp_circle,
    circle_field,
    combinatorial_degree,
    cone_lemma_check,
    cyclic_order,
    degree_of_chain_map,
    degree_oracle_preimage,
    induced_action_on_bd,
    is_prime,
    iterated_action,
    join_action,
    lift_edge_neighbor,
    lift_vertex,
    odd_dimension_check,
    orientation_from_witness,
    orientations,
    pushforward_orientation,
    verify_degree_mod_p,
    verify_equivariance,
    wrap_map,
)

import oracles

RP2 = SimplicialComplex.from_maximal([
    (0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 1, 5),
    (1, 2, 4), (2, 3, 5), (1, 3, 4), (1, 3, 5), (2, 4, 5),
])


def sign_cycles(k: SimplicialComplex):
    d = k.dim
    tops = k.simplices(d)

    def bd(s):
        return list(boundary(Chain.of(s)).items())

    return {tuple(v) for v in oracles.all_sign_cycles(tops, bd)}


def bd_witness(w: SphereWitness, times: int) -> SphereWitness:
    v = w.field
    for _ in range(times):
        _, v = sphere_witness_bd(v)
    return SphereWitness.checked(v)


def equivariant_approximation(a: GroupAction, rng: random.Random) -> SimplicialMap:
    """Bd(S) -> S approximating the identity, chosen on orbit representatives and transported."""
    sd = barycentric_subdivision(a.complex)
    choice = {}
    for s in sd.barycenter:
        if s in choice or not s:
            continue
        v = rng.choice(s)
        for j in range(a.p):
            choice[a.act(s, j)] = a.power(j)[v]
    return simplicial_approximation(sd, choice)


class TestOrientations:
    @pytest.mark.parametrize("name", ["C3", "C6", "octahedron", "boundary_simplex_3", "boundary_simplex_4", "Bd_C6"])
    def test_exactly_two(self, spheres, name):
        k = spheres[name].complex
        found = {o.signs for o in orientations(k)}
        assert len(found) == 2
        assert found == sign_cycles(k)

    def test_non_orientable(self):
        assert orientations(RP2) == []
        assert sign_cycles(RP2) == set()

    def test_witness_orientation_is_one_of_them(self, spheres):
        for name, w in spheres.items():
            if w.dim < 1:
                continue
            xi = orientation_from_witness(w)
            assert xi.is_orientation(), name
            assert xi.signs in {o.signs for o in orientations(w.complex)}, name
            assert xi.cycle()[w.top_cell] == 1

    def test_dimension_zero_rejected(self, spheres):
        with pytest.raises(DomainError):
            orientations(spheres["S0"].complex)
        with pytest.raises(DomainError):
            orientation_from_witness(spheres["S0"])

    def test_not_a_pseudomanifold(self):
        with pytest.raises(DomainError):
            orientations(SimplicialComplex.from_maximal([(0, 1), (0, 2), (0, 3)]))

    @pytest.mark.parametrize("name", ["C6", "octahedron", "boundary_simplex_4", "join_C6_C6"])
    def test_top_cycles_are_multiples(self, spheres, name):
        w = spheres[name]
        d, k = w.dim, w.complex
        tops, rows = k.simplices(d), k.simplices(d - 1)
        idx = {r: i for i, r in enumerate(rows)}
        m = sympy.zeros(len(rows), len(tops))
        for j, s in enumerate(tops):
            for f, c in boundary(Chain.of(s)).items():
                m[idx[f], j] = c
        null = m.nullspace()
        assert len(null) == 1
        xi = orientation_from_witness(w).signs
        vec = null[0]
        ratio = vec[0] / xi[0]
        assert all(vec[i] == ratio * xi[i] for i in range(len(tops)))

    def test_pushforward_is_subdivided_cycle(self, spheres):
        from morsetrace.chainmaps import subdivision_chain_map
        for name in ("C6", "octahedron"):
            xi = orientation_from_witness(spheres[name])
            for times in (1, 2):
                pushed = pushforward_orientation(xi, times)
                assert pushed.is_orientation()
                assert subdivision_chain_map(xi.complex, times).apply(xi.cycle()) == pushed.cycle()


class TestDegree:
    def test_identity(self, spheres):
        for name, w in spheres.items():
            if w.dim >= 1:
                assert degree_of_chain_map(identity_map(w.complex), w) == 1, name

    def test_orientation_does_not_matter(self, spheres):
        w = spheres["C6"]
        c = w.complex
        phi = induced_chain_map(SimplicialMap(c, c, {i: (-i) % 6 for i in range(6)}))
        xi = orientation_from_witness(w)
        assert degree_of_chain_map(phi, w, xi) == degree_of_chain_map(phi, w, -xi) == -1

    def test_zero_on_collapsed(self, spheres):
        w = spheres["C6"]
        c = w.complex
        phi = induced_chain_map(SimplicialMap(c, c, {i: 0 if i % 2 else 1 for i in range(6)}))
        assert degree_of_chain_map(phi, w) == 0

    def test_not_a_multiple(self, spheres):
        from morsetrace.chainmaps import ChainMap
        w = spheres["C6"]
        c = w.complex
        cols = {q: {s: Chain.of(s) for s in c.simplices(q)} for q in (0, 1)}
        cols[1][(0, 1)] = Chain.zero(1)
        with pytest.raises(IntegrityError):
            degree_of_chain_map(ChainMap(c, c, cols), w)

    @pytest.mark.parametrize("n,k", [(3, 1), (6, 1), (6, 2), (5, 3)])
    def test_wrap(self, n, k):
        f = wrap_map(n, k)
        w = bd_witness(SphereWitness.checked(circle_field(n)), k)
        assert combinatorial_degree(f, w, k) == 2 ** k
        assert degree_oracle_preimage(f, k) == 2 ** k

    def test_identity_at_level_zero(self, spheres):
        for name in ("C6", "octahedron", "boundary_simplex_4"):
            w = spheres[name]
            f = SimplicialMap(w.complex, w.complex, {v: v for v in w.complex.vertices})
            assert combinatorial_degree(f, w, 0) == degree_oracle_preimage(f, 0) == 1

    def test_fold_has_degree_zero(self):
        # walk around Bd(C6) and fold back along the path 0-1-...-5
        c6 = cycle_graph(6)
        src = iterated_subdivision(c6, 1)[-1].complex
        order = cyclic_order(src, lift_vertex(c6, 1, 0), lift_edge_neighbor(c6, 1, 0, 1))
        f = SimplicialMap(src, c6, {v: min(i, 12 - i, 5) for i, v in enumerate(order)})
        w = bd_witness(SphereWitness.checked(circle_field(6)), 1)
        assert combinatorial_degree(f, w, 1) == degree_oracle_preimage(f, 1) == 0

    def test_approximations_have_degree_one(self, spheres, rng):
        for name in ("C6", "octahedron"):
            w = spheres[name]
            wbd = bd_witness(w, 1)
            for _ in range(5):
                sd = barycentric_subdivision(w.complex)
                f = simplicial_approximation(sd, {s: rng.choice(s) for s in sd.barycenter})
                assert combinatorial_degree(f, wbd, 1) == 1
                assert degree_oracle_preimage(f, 1) == 1

    def test_constant_map(self, spheres):
        w = spheres["octahedron"]
        wbd = bd_witness(w, 1)
        f = SimplicialMap(wbd.complex, w.complex, {v: 0 for v in wbd.complex.vertices})
        assert combinatorial_degree(f, wbd, 1) == degree_oracle_preimage(f, 1) == 0

    def test_wrong_source(self, spheres):
        w = spheres["C6"]
        f = SimplicialMap(w.complex, w.complex, {v: v for v in w.complex.vertices})
        with pytest.raises(DomainError):
            combinatorial_degree(f, w, 1)


class TestGroupActions:
    def test_is_prime(self):
        assert [p for p in range(20) if is_prime(p)] == [2, 3, 5, 7, 11, 13, 17, 19]

    def test_zp_circle(self):
        w, a = build_zp_circle(3, 2)
        assert w.complex.f_vector() == (6, 6)
        assert a.generator == {0: 2, 1: 3, 2: 4, 3: 5, 4: 0, 5: 1}
        assert a.is_free()

    def test_zp_circle_errors(self):
        with pytest.raises(DomainError):
            build_zp_circle(4, 1)
        with pytest.raises(DomainError):
            build_zp_circle(2, 1)

    def test_not_a_permutation(self):
        with pytest.raises(DomainError):
            GroupAction(cycle_graph(4), 2, {0: 0, 1: 0, 2: 2, 3: 3})

    def test_wrong_order(self):
        with pytest.raises(DomainError):
            GroupAction(cycle_graph(6), 2, {i: (i + 1) % 6 for i in range(6)})

    def test_not_free(self):
        c = cycle_graph(4)
        a = GroupAction(c, 2, {0: 0, 1: 3, 2: 2, 3: 1})
        verdict = a.is_free()
        assert not verdict and verdict.witness == (1, (0,))

    def test_edge_flip_is_not_free(self):
        c = cycle_graph(4)
        a = GroupAction(c, 2, {0: 1, 1: 0, 2: 3, 3: 2})
        assert not a.is_free()

    def test_sphere0(self):
        w, a = build_sphere0()
        assert a.is_free() and w.dim == 0

    def test_join_action(self, zp_spheres):
        w, a = zp_spheres["C3*C3_Z3"]
        assert a.is_free()
        assert a.complex == w.complex
        assert a.generator[3] == 4 and a.generator[0] == 1

    def test_join_orders_differ(self, zp_spheres):
        with pytest.raises(DomainError):
            join_action(zp_spheres["S0_Z2"][1], zp_spheres["C3_Z3"][1])

    def test_subdivided_rotation(self):
        _, a = build_zp_circle(3, 2)
        b = induced_action_on_bd(a)
        k = b.complex
        order = cyclic_order(k, lift_vertex(a.complex, 1, 0), sorted(
            v for e in k.cofacets((lift_vertex(a.complex, 1, 0),)) for v in e)[-1])
        pos = {v: i for i, v in enumerate(order)}
        shifts = {(pos[b.generator[v]] - pos[v]) % 12 for v in order}
        assert shifts == {4} or shifts == {8}
        assert b.is_free()

    def test_all_fixtures_free(self, zp_spheres):
        for name, (w, a) in zp_spheres.items():
            assert a.is_free(), name
            assert w.validate(), name

    def test_equivariance_failure(self):
        _, a2 = build_zp_circle(2, 6)
        _, a3 = build_zp_circle(3, 4)
        c = a2.complex
        f = SimplicialMap(c, c, {v: v for v in c.vertices})
        with pytest.raises(DomainError):
            verify_equivariance(f, a2, a3)
        a2b = GroupAction(c, 2, {i: (i + 6) % 12 for i in range(12)})
        assert verify_equivariance(f, a2, a2b)
        rot = SimplicialMap(c, c, {i: (i + 1) % 12 for i in range(12)})
        assert verify_equivariance(rot, a2, a2b)
        swap = SimplicialMap(c, c, {i: (-i) % 12 for i in range(12)})
        assert verify_equivariance(swap, a2, a2b)
        fold = SimplicialMap(c, c, {i: min(i, 12 - i) % 12 for i in range(12)})
        assert not verify_equivariance(fold, a2, a2b)


class TestDegreeModP:
    @pytest.mark.parametrize("p,m,k", [(3, 1, 2), (3, 2, 2), (7, 1, 3), (5, 1, 4)])
    def test_wrap_maps(self, p, m, k):
        w, a = build_zp_circle(p, m)
        f = wrap_map(p * m, k)
        src = iterated_action(a, k)
        assert f.source == src.complex
        rep = verify_degree_mod_p(f, bd_witness(w, k), k, src, a)
        assert rep.degree == 2 ** k and rep.passed and rep.residue == 1

    def test_wrap_not_equivariant(self):
        w, a = build_zp_circle(5, 1)
        with pytest.raises(DomainError):
            verify_degree_mod_p(wrap_map(5, 1), bd_witness(w, 1), 1, iterated_action(a, 1), a)

    @pytest.mark.parametrize("name", ["C4_Z2", "C6_Z3", "C5_Z5", "C4join_Z2", "C3*C3_Z3", "octahedron_Z2"])
    def test_equivariant_approximations(self, zp_spheres, name, rng):
        w, a = zp_spheres[name]
        wbd = bd_witness(w, 1)
        src = induced_action_on_bd(a)
        for _ in range(3):
            f = equivariant_approximation(a, rng)
            rep = verify_degree_mod_p(f, wbd, 1, src, a)
            assert rep.degree == 1 and rep.passed

    def test_level_zero_rotation(self, zp_spheres):
        w, a = zp_spheres["C10_Z5"]
        f = SimplicialMap(w.complex, w.complex, a.power(3))
        rep = verify_degree_mod_p(f, w, 0, a, a)
        assert rep.degree == 1 and rep.to_json() == {"degree": 1, "p": 5, "residue": 1, "pass": True}

    def test_not_free_rejected(self):
        c = cycle_graph(4)
        a = GroupAction(c, 2, {0: 0, 1: 3, 2: 2, 3: 1})
        w = SphereWitness.checked(circle_field(4))
        f = SimplicialMap(c, c, {v: v for v in c.vertices})
        with pytest.raises(DomainError, match="not free"):
            verify_degree_mod_p(f, w, 0, a, a)


class TestConeAnnihilation:
    @pytest.mark.parametrize("name", ["C3", "C6", "octahedron", "boundary_simplex_3"])
    def test_random_maps(self, spheres, name):
        rng = random.Random(hash(name) % 1000)
        w = spheres[name]
        ck = cone(w.complex)
        for _ in range(50):
            f = random_simplicial_map(ck, w.complex, rng)
            assert cone_lemma_check(f, w)

    def test_into_lower_dimension(self, spheres, rng):
        w = spheres["octahedron"]
        ck = cone(w.complex)
        target = cycle_graph(5)
        for _ in range(20):
            assert cone_lemma_check(random_simplicial_map(ck, target, rng), w)

    def test_target_too_big(self, spheres):
        w = spheres["C6"]
        ck = cone(w.complex)
        f = SimplicialMap(ck, full_simplex(range(3)), {v: 0 for v in ck.vertices})
        with pytest.raises(DomainError):
            cone_lemma_check(f, w)

    def test_wrong_source(self, spheres):
        w = spheres["C6"]
        f = SimplicialMap(w.complex, w.complex, {v: v for v in w.complex.vertices})
        with pytest.raises(DomainError):
            cone_lemma_check(f, w)


class TestOddDimension:
    def test_fixtures(self, zp_spheres):
        for name, (w, a) in zp_spheres.items():
            assert odd_dimension_check(w, a), name

    def test_even_sphere_with_odd_prime(self, spheres):
        # the identity permutation is a Z_3 action, but not a free one
        w = spheres["octahedron"]
        a = GroupAction(w.complex, 3, {v: v for v in w.complex.vertices})
        with pytest.raises(DomainError):
            odd_dimension_check(w, a)
