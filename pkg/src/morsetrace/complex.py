"""Abstract simplicial complexes, oriented simplices and integer chains.

Vertices are non-negative integers and the canonical orientation of a
simplex is its strictly increasing vertex tuple.  The empty simplex ``()``
is a member of every complex; chains of dimension -1 are always zero.
"""

from __future__ import annotations

import itertools
from collections import defaultdict, deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Dict, Iterable, Iterator, List, Mapping, Optional, Tuple

from .errors import DomainError, Verdict

Simplex = Tuple[int, ...]
EMPTY: Simplex = ()


def simplex(vertices: Iterable[int]) -> Simplex:
    """Canonical form of a vertex collection; duplicates are rejected."""
    s = tuple(sorted(vertices))
    for a, b in zip(s, s[1:]):
        if a == b:
            raise DomainError(f"repeated vertex {a} in simplex {s}")
    return s


def dim(s: Simplex) -> int:
    return len(s) - 1


def facets(s: Simplex) -> List[Simplex]:
    """Facets of ``s``; the i-th entry omits the i-th vertex."""
    return [s[:i] + s[i + 1:] for i in range(len(s))]


def incidence_number(sigma: Simplex, tau: Simplex) -> int:
    """Incidence number ``[sigma, tau]``.

    ``(-1)**i`` when ``tau`` is ``sigma`` with its i-th vertex deleted, else 0.
    """
    if len(tau) != len(sigma) - 1:
        return 0
    i = 0
    n = len(tau)
    while i < n and sigma[i] == tau[i]:
        i += 1
    if sigma[i + 1:] != tau[i:]:
        return 0
    return -1 if i % 2 else 1


def sort_sign(vertices: Iterable[int]) -> Tuple[int, Simplex]:
    """Sign of the permutation sorting ``vertices`` and the sorted simplex.

    The sign is 0 when a vertex repeats (a degenerate image).
    """
    seq = list(vertices)
    n = len(seq)
    if len(set(seq)) < n:
        return 0, simplex(set(seq))
    # parity through cycle decomposition of the sorting permutation
    order = sorted(range(n), key=seq.__getitem__)
    seen = [False] * n
    parity = 0
    for start in range(n):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = order[j]
            length += 1
        parity += length - 1
    return (-1 if parity % 2 else 1), tuple(seq[i] for i in order)


class Chain:
    """Sparse integer q-chain; zero coefficients are never stored."""

    __slots__ = ("dim", "_c")

    def __init__(self, dim: int, coeffs: Optional[Mapping[Simplex, int]] = None):
        self.dim = dim
        c: Dict[Simplex, int] = {}
        if coeffs:
            for s, v in coeffs.items():
                if len(s) != dim + 1:
                    raise DomainError(f"simplex {s} does not have dimension {dim}")
                if v:
                    c[s] = int(v)
        self._c = c

    @classmethod
    def zero(cls, dim: int) -> "Chain":
        return cls(dim)

    @classmethod
    def of(cls, s: Simplex, coeff: int = 1) -> "Chain":
        return cls(len(s) - 1, {s: coeff})

    @classmethod
    def _trusted(cls, dim: int, coeffs: Dict[Simplex, int]) -> "Chain":
        out = cls.__new__(cls)
        out.dim = dim
        out._c = {s: v for s, v in coeffs.items() if v}
        return out

    def __getitem__(self, s: Simplex) -> int:
        return self._c.get(s, 0)

    def __iter__(self) -> Iterator[Simplex]:
        return iter(self._c)

    def __len__(self) -> int:
        return len(self._c)

    def __bool__(self) -> bool:
        return bool(self._c)

    def items(self):
        return self._c.items()

    def support(self) -> List[Simplex]:
        return sorted(self._c)

    def as_dict(self) -> Dict[Simplex, int]:
        return dict(self._c)

    def _check(self, other: "Chain") -> None:
        if not isinstance(other, Chain):
            raise TypeError(f"expected Chain, got {type(other).__name__}")
        if other.dim != self.dim and self._c and other._c:
            raise DomainError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other: "Chain") -> "Chain":
        self._check(other)
        out = dict(self._c)
        for s, v in other._c.items():
            out[s] = out.get(s, 0) + v
        return Chain._trusted(max(self.dim, other.dim) if not self._c else self.dim, out)

    def __neg__(self) -> "Chain":
        return Chain._trusted(self.dim, {s: -v for s, v in self._c.items()})

    def __sub__(self, other: "Chain") -> "Chain":
        return self + (-other)

    def __mul__(self, k: int) -> "Chain":
        if not isinstance(k, int):
            return NotImplemented
        return Chain._trusted(self.dim, {s: k * v for s, v in self._c.items()})

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Chain):
            return NotImplemented
        if not self._c and not other._c:
            return True
        return self.dim == other.dim and self._c == other._c

    def __hash__(self) -> int:
        return hash((self.dim, frozenset(self._c.items())))

    def dot(self, other: "Chain") -> int:
        """Inner product in the standard simplex basis."""
        self._check(other)
        a, b = (self._c, other._c) if len(self._c) <= len(other._c) else (other._c, self._c)
        return sum(v * b.get(s, 0) for s, v in a.items())

    def __repr__(self) -> str:
        if not self._c:
            return f"Chain({self.dim}, 0)"
        terms = " ".join(f"{v:+d}{list(s)}" for s, v in sorted(self._c.items()))
        return f"Chain({self.dim}, {terms})"


def boundary(c: Chain) -> Chain:
    """Simplicial boundary; 0-chains go to the zero (-1)-chain."""
    if c.dim <= 0:
        return Chain.zero(c.dim - 1)
    out: Dict[Simplex, int] = defaultdict(int)
    for s, v in c.items():
        sign = v
        for i in range(len(s)):
            out[s[:i] + s[i + 1:]] += sign if i % 2 == 0 else -sign
    return Chain._trusted(c.dim - 1, out)


def linear_combination(dim: int, terms: Iterable[Tuple[int, Chain]]) -> Chain:
    out: Dict[Simplex, int] = defaultdict(int)
    for k, ch in terms:
        if not k:
            continue
        for s, v in ch.items():
            out[s] += k * v
    return Chain._trusted(dim, out)


class SimplicialComplex:
    """A finite, downward-closed family of simplices (always containing ``()``).

    Instances are immutable.  ``labels`` maps vertex ids to arbitrary
    display labels; it plays no role in equality or orientation.
    """

    def __init__(self, simplices: Iterable[Iterable[int]], labels: Optional[Mapping[int, Any]] = None):
        pool = {simplex(s) for s in simplices}
        pool.add(EMPTY)
        for s in pool:
            for f in facets(s):
                if f not in pool:
                    raise DomainError(f"not downward closed: facet {f} of {s} is missing")
        self._init(pool, labels)

    @classmethod
    def from_maximal(cls, maximal: Iterable[Iterable[int]], labels: Optional[Mapping[int, Any]] = None
                     ) -> "SimplicialComplex":
        pool = {EMPTY}
        for m in maximal:
            m = simplex(m)
            if m in pool:
                continue
            for r in range(len(m), 0, -1):
                pool.update(itertools.combinations(m, r))
        obj = cls.__new__(cls)
        obj._init(pool, labels)
        return obj

    def _init(self, pool: set, labels: Optional[Mapping[int, Any]]) -> None:
        self._set = frozenset(pool)
        by_dim: Dict[int, List[Simplex]] = defaultdict(list)
        for s in pool:
            by_dim[len(s) - 1].append(s)
        self._by_dim = {q: tuple(sorted(v)) for q, v in by_dim.items()}
        self.dim = max(self._by_dim)
        self._index = {s: i for ss in self._by_dim.values() for i, s in enumerate(ss)}
        cof: Dict[Simplex, List[Simplex]] = defaultdict(list)
        for q in range(0, self.dim + 1):
            for s in self._by_dim[q]:
                for f in facets(s):
                    cof[f].append(s)
        self._cofacets = {s: tuple(v) for s, v in cof.items()}
        verts = tuple(s[0] for s in self._by_dim.get(0, ()))
        self.vertices = verts
        lab = dict(labels) if labels else {}
        unknown = set(lab) - set(verts)
        if unknown:
            raise DomainError(f"labels given for unknown vertices {sorted(unknown)}")
        self._labels = lab
        self._hash = hash(self._set)

    # -- queries -----------------------------------------------------------
    def simplices(self, q: Optional[int] = None) -> Tuple[Simplex, ...]:
        """q-simplices in canonical order, or every simplex dimension-major."""
        if q is None:
            return tuple(s for d in range(-1, self.dim + 1) for s in self._by_dim.get(d, ()))
        return self._by_dim.get(q, ())

    def __contains__(self, s: object) -> bool:
        return s in self._set

    def __len__(self) -> int:
        return len(self._set)

    def __iter__(self) -> Iterator[Simplex]:
        return iter(self.simplices())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SimplicialComplex):
            return NotImplemented
        return self._hash == other._hash and self._set == other._set

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"SimplicialComplex(dim={self.dim}, f={self.f_vector()})"

    def index(self, s: Simplex) -> int:
        """Position of ``s`` among the simplices of its dimension."""
        return self._index[s]

    def cofacets(self, s: Simplex) -> Tuple[Simplex, ...]:
        return self._cofacets.get(s, ())

    def maximal_simplices(self) -> List[Simplex]:
        return [s for s in self.simplices() if s and not self._cofacets.get(s)]

    def f_vector(self) -> Tuple[int, ...]:
        return tuple(len(self._by_dim.get(q, ())) for q in range(self.dim + 1))

    def euler_characteristic(self) -> int:
        return sum((-1) ** q * n for q, n in enumerate(self.f_vector()))

    def label(self, v: int) -> Any:
        return self._labels.get(v, v)

    @property
    def labels(self) -> Dict[int, Any]:
        return dict(self._labels)

    @property
    def id_bound(self) -> int:
        """One more than the largest vertex id (0 for the void complex)."""
        return self.vertices[-1] + 1 if self.vertices else 0

    def chain(self, coeffs: Mapping[Iterable[int], int]) -> Chain:
        """Build a chain, checking that every simplex belongs to this complex."""
        norm = {}
        for s, v in coeffs.items():
            s = simplex(s)
            if s not in self._set:
                raise DomainError(f"simplex {s} is not in the complex")
            norm[s] = norm.get(s, 0) + v
        dims = {len(s) - 1 for s in norm}
        if len(dims) > 1:
            raise DomainError(f"mixed dimensions {sorted(dims)} in one chain")
        return Chain(dims.pop() if dims else 0, norm)

    def boundary(self, c: Chain) -> Chain:
        for s in c:
            if s not in self._set:
                raise DomainError(f"simplex {s} is not in the complex")
        return boundary(c)

    def without(self, s: Simplex) -> "SimplicialComplex":
        """The complex with the maximal simplex ``s`` removed."""
        if s not in self._set or self._cofacets.get(s):
            raise DomainError(f"{s} is not a maximal simplex")
        obj = SimplicialComplex.__new__(SimplicialComplex)
        obj._init(set(self._set) - {s}, self._labels)
        return obj

    def subcomplex(self, keep: Iterable[Simplex]) -> "SimplicialComplex":
        return SimplicialComplex(keep, {v: l for v, l in self._labels.items()
                                        if (v,) in set(keep)})

    def relabel(self, mapping: Mapping[int, int]) -> "SimplicialComplex":
        """Rename vertex ids through the injective ``mapping``."""
        if len(set(mapping.values())) != len(mapping):
            raise DomainError("relabelling is not injective")
        pool = {simplex(mapping[v] for v in s) for s in self._set}
        labels = {mapping[v]: l for v, l in self._labels.items()}
        obj = SimplicialComplex.__new__(SimplicialComplex)
        obj._init(pool, labels)
        return obj


def full_simplex(vertices: Iterable[int]) -> SimplicialComplex:
    return SimplicialComplex.from_maximal([tuple(vertices)])


def skeleton_of_simplex(n: int, q: int) -> SimplicialComplex:
    """The q-skeleton of the full simplex on vertices ``0..n``."""
    if n < 0 or q < 0 or q > n:
        raise DomainError(f"need 0 <= q <= n, got n={n}, q={q}")
    return SimplicialComplex.from_maximal(itertools.combinations(range(n + 1), q + 1))


def cycle_graph(n: int) -> SimplicialComplex:
    """The n-gon with vertices ``0..n-1`` in cyclic order."""
    if n < 3:
        raise DomainError("a cycle needs at least 3 vertices")
    return SimplicialComplex.from_maximal((i, (i + 1) % n) for i in range(n))


def _merge_labels(left: SimplicialComplex, right: SimplicialComplex, offset: int) -> Dict[int, Any]:
    ll = {v: left.label(v) for v in left.vertices}
    rl = {v + offset: right.label(v) for v in right.vertices}
    if set(map(_hashable, ll.values())) & set(map(_hashable, rl.values())):
        ll = {v: (0, l) for v, l in ll.items()}
        rl = {v: (1, l) for v, l in rl.items()}
    merged = {**ll, **rl}
    return {v: l for v, l in merged.items() if l != v}


def _hashable(x: Any) -> Any:
    if isinstance(x, list):
        return tuple(_hashable(y) for y in x)
    return x


def join_offset(left: SimplicialComplex) -> int:
    """Shift applied to the right factor's vertex ids by :func:`join`."""
    return left.id_bound


def join(k1: SimplicialComplex, k2: SimplicialComplex) -> SimplicialComplex:
    """Join ``k1 * k2``; right vertices are renamed ``v + join_offset(k1)``."""
    off = join_offset(k1)
    left = k1.simplices()
    right = [tuple(v + off for v in t) for t in k2.simplices()]
    pool = {s + t for s in left for t in right}
    if len(pool) != len(left) * len(right):
        raise AssertionError("vertex collision while joining")
    obj = SimplicialComplex.__new__(SimplicialComplex)
    obj._init(pool, _merge_labels(k1, k2, off))
    return obj


def cone(k: SimplicialComplex, apex: Any = "x") -> SimplicialComplex:
    """Cone ``apex * k``.

    The apex gets id 0 and every vertex ``v`` of ``k`` becomes ``v + 1``, so
    the apex is first in the canonical order of every simplex containing it.
    """
    if any(_hashable(k.label(v)) == _hashable(apex) for v in k.vertices):
        raise DomainError(f"apex {apex!r} is already a vertex of the complex")
    base = [tuple(v + 1 for v in s) for s in k.simplices()]
    pool = set(base) | {(0,) + s for s in base}
    labels = {v + 1: k.label(v) for v in k.vertices}
    labels[0] = apex
    obj = SimplicialComplex.__new__(SimplicialComplex)
    obj._init(pool, {v: l for v, l in labels.items() if l != v})
    return obj


def cone_embedding(s: Simplex) -> Simplex:
    """Image of a simplex of ``k`` inside :func:`cone` of ``k``."""
    return tuple(v + 1 for v in s)


@dataclass(frozen=True)
class Subdivision:
    """``Bd(parent)`` together with the barycenter bookkeeping."""

    parent: SimplicialComplex
    complex: SimplicialComplex
    barycenter: Mapping[Simplex, int]   # nonempty simplex of parent -> vertex id
    carrier: Tuple[Simplex, ...]        # vertex id -> originating simplex

    def flag(self, s: Simplex) -> Tuple[Simplex, ...]:
        """Chain of parent simplices spanned by the subdivision simplex ``s``."""
        return tuple(self.carrier[v] for v in s)


@lru_cache(maxsize=64)
def barycentric_subdivision(k: SimplicialComplex) -> Subdivision:
    """First barycentric subdivision.

    Barycenters are numbered by (dimension, lexicographic vertex list) of
    the originating simplex, so every flag is already in canonical order.
    """
    carrier = tuple(s for s in k.simplices() if s)
    bary = {s: i for i, s in enumerate(carrier)}
    maximal = []
    for m in k.maximal_simplices():
        for perm in itertools.permutations(m):
            maximal.append(tuple(bary[simplex(perm[: i + 1])] for i in range(len(perm))))
    bd = SimplicialComplex.from_maximal(maximal, {i: list(s) for i, s in enumerate(carrier)})
    return Subdivision(k, bd, bary, carrier)


def iterated_subdivision(k: SimplicialComplex, times: int) -> List[Subdivision]:
    out = []
    cur = k
    for _ in range(times):
        sd = barycentric_subdivision(cur)
        out.append(sd)
        cur = sd.complex
    return out


def is_pseudomanifold(k: SimplicialComplex) -> Verdict:
    """Pure, every codimension-one face in exactly two top simplices, strongly connected."""
    if not k.vertices:
        return Verdict.failed("complex has no vertices")
    d = k.dim
    for m in k.maximal_simplices():
        if len(m) != d + 1:
            return Verdict.failed("not pure", m)
    for t in k.simplices(d - 1):
        n = len(k.cofacets(t))
        if n != 2:
            return Verdict.failed(f"({d - 1})-simplex lies in {n} top simplices", t)
    tops = k.simplices(d)
    adj: Dict[Simplex, List[Simplex]] = defaultdict(list)
    for t in k.simplices(d - 1):
        a, b = k.cofacets(t)
        adj[a].append(b)
        adj[b].append(a)
    seen = {tops[0]}
    todo = deque([tops[0]])
    while todo:
        s = todo.popleft()
        for nb in adj[s]:
            if nb not in seen:
                seen.add(nb)
                todo.append(nb)
    if len(seen) != len(tops):
        other = next(s for s in tops if s not in seen)
        return Verdict.failed("top simplices are not facet-connected", (tops[0], other))
    return Verdict.passed()
