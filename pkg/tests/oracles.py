"""Slow, independent reference implementations used only by the tests."""

from __future__ import annotations

import itertools
from collections import defaultdict
from typing import Dict, Iterator, List, Sequence, Tuple

import sympy

Simplex = Tuple[int, ...]


def incidence(sigma: Simplex, tau: Simplex) -> int:
    for i in range(len(sigma)):
        if sigma[:i] + sigma[i + 1:] == tau:
            return (-1) ** i
    return 0


def permutation_sign(seq: Sequence[int]) -> int:
    """Sign by counting inversions."""
    inv = sum(1 for i, j in itertools.combinations(range(len(seq)), 2) if seq[i] > seq[j])
    return -1 if inv % 2 else 1


def down_trajectories(pairs, sigma: Simplex) -> Iterator[List[Simplex]]:
    """Every V-trajectory starting at ``sigma``, listed explicitly."""
    up = {a: b for a, b in pairs if a}

    def walk(path):
        yield path
        b = path[-1]
        for i in range(len(b)):
            a = b[:i] + b[i + 1:]
            b2 = up.get(a)
            if b2 is not None and b2 != b:
                yield from walk(path + [a, b2])

    yield from walk([sigma])


def up_trajectories(complex_simplices, pairs, sigma: Simplex) -> Iterator[List[Simplex]]:
    down = {b: a for a, b in pairs if a}
    by_len = defaultdict(list)
    for s in complex_simplices:
        by_len[len(s)].append(s)

    def walk(path):
        yield path
        b = path[-1]
        for t in by_len[len(b) + 1]:
            if not set(b) <= set(t):
                continue
            b2 = down.get(t)
            if b2 is not None and b2 != b:
                yield from walk(path + [t, b2])

    yield from walk([sigma])


def path_weight(path: List[Simplex], direction: str) -> int:
    w = 1
    for i in range(1, len(path) - 1, 2):
        p, m, n = path[i - 1], path[i], path[i + 1]
        if direction == "down":
            w *= -incidence(p, m) * incidence(n, m)
        else:
            w *= -incidence(m, p) * incidence(m, n)
    return w


def enumerate_chain(complex_simplices, pairs, sigma: Simplex, direction: str) -> Dict[Simplex, int]:
    acc: Dict[Simplex, int] = defaultdict(int)
    gen = (down_trajectories(pairs, sigma) if direction == "down"
           else up_trajectories(complex_simplices, pairs, sigma))
    for path in gen:
        acc[path[-1]] += path_weight(path, direction)
    return {s: c for s, c in acc.items() if c}


def sympy_det(columns, rows) -> int:
    idx = {r: i for i, r in enumerate(rows)}
    m = sympy.zeros(len(rows), len(columns))
    for j, col in enumerate(columns):
        for s, v in col.items():
            m[idx[s], j] = v
    return int(m.det())


def flag_coefficient(flag: Sequence[Simplex]) -> int:
    """Coefficient of a flag in the subdivision of its last member, from the closed form."""
    sign = 1
    for j in range(1, len(flag)):
        (added,) = set(flag[j]) - set(flag[j - 1])
        sign *= (-1) ** j * (-1) ** flag[j].index(added)
    return sign


def all_sign_cycles(top_simplices, boundary_of) -> List[Tuple[int, ...]]:
    """Every +-1 vector on the top simplices whose boundary vanishes (brute force)."""
    out = []
    for signs in itertools.product((1, -1), repeat=len(top_simplices)):
        acc: Dict[Simplex, int] = defaultdict(int)
        for s, x in zip(top_simplices, signs):
            for f, c in boundary_of(s):
                acc[f] += x * c
        if not any(acc.values()):
            out.append(signs)
    return out
