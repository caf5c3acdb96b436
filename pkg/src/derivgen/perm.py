"""Permutation groups via deterministic Schreier-Sims.

Permutations are tuples ``p`` of length ``degree`` with ``p[x]`` the image of
``x``. ``compose(a, b)`` applies ``b`` first, then ``a``.
"""
from __future__ import annotations

import random
from typing import Iterable, Iterator, Sequence

Perm = tuple[int, ...]

DEFAULT_ELEMENT_CAP = 10**6


class InvalidPermutation(ValueError):
    pass


def identity(n: int) -> Perm:
    return tuple(range(n))


def compose(a: Perm, b: Perm) -> Perm:
    return tuple(map(a.__getitem__, b))


def inverse(p: Perm) -> Perm:
    out = [0] * len(p)
    for i, x in enumerate(p):
        out[x] = i
    return tuple(out)


def is_identity(p: Sequence[int]) -> bool:
    return all(i == x for i, x in enumerate(p))


def check_perm(p: Sequence[int], degree: int) -> Perm:
    p = tuple(p)
    if len(p) != degree or sorted(p) != list(range(degree)):
        raise InvalidPermutation(f"not a permutation of {degree} points: {p}")
    return p


def orbit_transversal(gens: Sequence[Perm], point: int) -> dict[int, Perm]:
    """Map each orbit point to a group element sending ``point`` there.

    Breadth-first over ``gens``; the result is deterministic.
    """
    n = len(gens[0]) if gens else point + 1
    trans = {point: identity(n)}
    queue = [point]
    for x in queue:
        ux = trans[x]
        for g in gens:
            y = g[x]
            if y not in trans:
                trans[y] = compose(g, ux)
                queue.append(y)
    return trans


def orbit(gens: Sequence[Perm], point: int) -> list[int]:
    seen = {point}
    out = [point]
    for x in out:
        for g in gens:
            y = g[x]
            if y not in seen:
                seen.add(y)
                out.append(y)
    return out


def orbits(gens: Sequence[Perm], degree: int) -> list[list[int]]:
    seen: set[int] = set()
    out = []
    for x in range(degree):
        if x not in seen:
            orb = sorted(orbit(gens, x))
            seen.update(orb)
            out.append(orb)
    return out


class PermGroup:
    """A permutation group stored as a base and strong generating set.

    ``levels[i]`` holds the strong generators fixing ``base[:i]`` and
    ``transversals[i]`` maps each point of the basic orbit of ``base[i]`` to
    an element of that stabilizer sending ``base[i]`` there.
    """

    def __init__(self, degree: int, base: list[int], levels: list[list[Perm]],
                 transversals: list[dict[int, Perm]], generators: list[Perm]):
        self.degree = degree
        self.base = base
        self.levels = levels
        self.transversals = transversals
        self.generators = generators
        self._rebased: dict[tuple[int, ...], PermGroup] = {}
        self._stab_cache: dict[tuple[int, ...], PermGroup] = {}

    @property
    def strong_generators(self) -> list[Perm]:
        return self.levels[0] if self.levels else []

    def order(self) -> int:
        out = 1
        for t in self.transversals:
            out *= len(t)
        return out

    def is_trivial(self) -> bool:
        return all(len(t) == 1 for t in self.transversals)

    def sift(self, g: Perm) -> tuple[Perm, int]:
        for i, b in enumerate(self.base):
            beta = g[b]
            t = self.transversals[i]
            if beta not in t:
                return g, i
            g = compose(inverse(t[beta]), g)
        return g, len(self.base)

    def contains(self, g: Sequence[int]) -> bool:
        g = tuple(g)
        if len(g) != self.degree:
            return False
        h, _ = self.sift(g)
        return is_identity(h)

    __contains__ = contains

    def elements(self, cap: int = DEFAULT_ELEMENT_CAP) -> tuple[list[Perm], bool]:
        """Enumerate up to ``cap`` distinct elements; second value flags truncation."""
        out: list[Perm] = []
        truncated = False

        def rec(level: int, acc: Perm) -> bool:
            nonlocal truncated
            if level == len(self.base):
                if len(out) >= cap:
                    truncated = True
                    return False
                out.append(acc)
                return True
            for beta in sorted(self.transversals[level]):
                if not rec(level + 1, compose(acc, self.transversals[level][beta])):
                    return False
            return True

        rec(0, identity(self.degree))
        return out, truncated

    def orbit_of(self, point: int) -> list[int]:
        return orbit(self.strong_generators, point) if self.strong_generators else [point]

    def stabilizer(self, points: Sequence[int]) -> "PermGroup":
        return pointwise_stabilizer(self, points)

    def with_base(self, prefix: Sequence[int]) -> "PermGroup":
        """The same group with a stabilizer chain whose base starts with ``prefix``."""
        pts = tuple(dict.fromkeys(prefix))
        if tuple(self.base[:len(pts)]) == pts:
            return self
        cached = self._rebased.get(pts)
        if cached is None:
            cached = _rebase(self, pts)
            self._rebased[pts] = cached
        return cached

    def __repr__(self) -> str:
        return f"<PermGroup degree={self.degree} order={self.order()}>"


class _Chain:
    """Mutable stabilizer chain used while building a group."""

    def __init__(self, degree: int, base: list[int]):
        self.degree = degree
        self.base = base
        self.levels: list[list[Perm]] = [[] for _ in base]
        self.trans: list[dict[int, Perm]] = [{b: identity(degree)} for b in base]
        self.inv: list[dict[int, Perm]] = [{b: identity(degree)} for b in base]
        self.orbit: list[list[int]] = [[b] for b in base]

    def add_level(self, h: Perm) -> None:
        b = next(x for x in range(self.degree) if h[x] != x)
        self.base.append(b)
        self.levels.append([])
        self.trans.append({b: identity(self.degree)})
        self.inv.append({b: identity(self.degree)})
        self.orbit.append([b])

    def extend_orbit(self, lvl: int) -> None:
        """Grow the basic orbit; existing transversal entries never change."""
        trans, inv, orb, gens = self.trans[lvl], self.inv[lvl], self.orbit[lvl], self.levels[lvl]
        pos = 0
        while pos < len(orb):
            x = orb[pos]
            ux = trans[x]
            for g in gens:
                y = g[x]
                if y not in trans:
                    u = compose(g, ux)
                    trans[y] = u
                    inv[y] = inverse(u)
                    orb.append(y)
            pos += 1

    def add_generator(self, h: Perm, upto: int, start: int = 0) -> None:
        for lvl in range(start, upto + 1):
            self.levels[lvl].append(h)
            self.extend_orbit(lvl)

    def sift(self, g: Perm, start: int = 0) -> tuple[Perm, int]:
        for j in range(start, len(self.base)):
            beta = g[self.base[j]]
            inv = self.inv[j].get(beta)
            if inv is None:
                return g, j
            g = compose(inv, g)
        return g, len(self.base)

    def order(self) -> int:
        out = 1
        for t in self.trans:
            out *= len(t)
        return out

    def freeze(self, generators: list[Perm]) -> PermGroup:
        return PermGroup(self.degree, list(self.base), [list(l) for l in self.levels],
                         [dict(t) for t in self.trans], generators)


def build_group(degree: int, generators: Iterable[Sequence[int]] = (),
                base_prefix: Sequence[int] = ()) -> PermGroup:
    """Deterministic Schreier-Sims. The base starts with ``base_prefix``.

    Transversals only ever grow, so a Schreier generator that sifted through
    once never needs checking again.
    """
    gens = []
    seen = set()
    for g in generators:
        g = check_perm(g, degree)
        if not is_identity(g) and g not in seen:
            seen.add(g)
            gens.append(g)
    base = list(dict.fromkeys(base_prefix))
    for b in base:
        if not 0 <= b < degree:
            raise InvalidPermutation(f"base point {b} out of range")
    chain = _Chain(degree, base)
    for g in gens:
        if all(g[b] == b for b in chain.base):
            chain.add_level(g)
    for lvl in range(len(chain.base)):
        chain.levels[lvl] = [g for g in gens if all(g[b] == b for b in chain.base[:lvl])]
        chain.extend_orbit(lvl)

    checked: list[set[tuple[int, int]]] = [set() for _ in chain.base]
    i = len(chain.base) - 1
    while i >= 0:
        grew = False
        orb = chain.orbit[i]
        trans, inv = chain.trans[i], chain.inv[i]
        pos = 0
        while pos < len(orb) and not grew:
            beta = orb[pos]
            u_beta = trans[beta]
            for si, s in enumerate(chain.levels[i]):
                if (beta, si) in checked[i]:
                    continue
                checked[i].add((beta, si))
                sg = compose(inv[s[beta]], compose(s, u_beta))
                h, j = chain.sift(sg, i + 1)
                if j < len(chain.base) or not is_identity(h):
                    if j == len(chain.base):
                        chain.add_level(h)
                        checked.append(set())
                    chain.add_generator(h, j, i + 1)
                    i = j
                    grew = True
                    break
            pos += 1
        if not grew:
            i -= 1
    return chain.freeze(gens)


def _rebase(group: PermGroup, prefix: tuple[int, ...]) -> PermGroup:
    """Randomized Schreier-Sims that stops once the known group order is reached.

    The random source is seeded, so results are reproducible; correctness
    does not depend on it because the order check is exact.
    """
    target = group.order()
    chain = _Chain(group.degree, list(prefix))
    gens = group.strong_generators
    if target == 1 or not gens:
        return chain.freeze(list(group.generators))

    def absorb(g: Perm) -> None:
        h, j = chain.sift(g)
        if j < len(chain.base) or not is_identity(h):
            if j == len(chain.base):
                chain.add_level(h)
            chain.add_generator(h, j)

    for g in gens:
        absorb(g)
        if chain.order() == target:
            return chain.freeze(list(group.generators))
    rng = random.Random(0x5EED)
    pool = list(gens) * max(1, 10 // len(gens) + 1)
    while chain.order() < target:
        a, b = rng.sample(range(len(pool)), 2)
        pool[a] = compose(pool[a], pool[b])
        absorb(pool[a])
    return chain.freeze(list(group.generators))


def pointwise_stabilizer(group: PermGroup, points: Sequence[int]) -> PermGroup:
    """Subgroup fixing every point in ``points``."""
    pts = tuple(dict.fromkeys(points))
    if not pts:
        return group
    cached = group._stab_cache.get(pts)
    if cached is not None:
        return cached
    full = group.with_base(pts)
    k = len(pts)
    if k < len(full.levels):
        sub = PermGroup(group.degree, full.base[k:], [list(l) for l in full.levels[k:]],
                        full.transversals[k:], list(full.levels[k]))
    else:
        sub = PermGroup(group.degree, [], [], [], [])
    group._stab_cache[pts] = sub
    return sub


def closure(degree: int, generators: Iterable[Sequence[int]]) -> set[Perm]:
    """All elements generated by ``generators`` via breadth-first closure (for testing)."""
    gens = [tuple(g) for g in generators]
    e = identity(degree)
    seen = {e}
    frontier = [e]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = compose(g, x)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return seen


def min_image(group: PermGroup, seq: Sequence[int]) -> tuple[int, ...]:
    """Lexicographically least image of the point sequence ``seq`` under ``group``.

    With a base starting with ``seq``, the elements agreeing on the first t
    images form a coset ``h G_t``; the least next image is the least ``h(u)``
    over the basic orbit of ``G_t``.
    """
    if not seq or group.is_trivial():
        return tuple(seq)
    chain = group.with_base(seq)
    h = identity(group.degree)
    result = []
    level = {b: i for i, b in enumerate(chain.base)}
    for s in seq:
        if result and s in seq[:len(result)]:
            result.append(h[s])
            continue
        t = chain.transversals[level[s]]
        if len(t) == 1:
            result.append(h[s])
            continue
        u = min(t, key=h.__getitem__)
        h = compose(h, t[u])
        result.append(h[s])
    return tuple(result)
