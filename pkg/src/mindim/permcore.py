"""Permutations, generated groups, stabilizer chains, orbits, coset actions.

Composition convention: (p * q) applies p first, then q, i.e.
(p * q).images[x] = q.images[p.images[x]].  All algorithms are
deterministic for fixed input: base points follow the smallest-moved-point
rule and orbits are breadth-first in generator order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .errors import Budget, DEFAULT_BUDGET, InputError
from .kernels import min_block_reps, orbit_schreier

_REP_CACHE_DEGREE = 4096  # cache full transversal reps below this degree


def _key_dtype(degree):
    if degree <= 0x100:
        return np.uint8
    if degree <= 0x10000:
        return np.uint16
    return np.uint32


class Permutation:
    """A permutation of {0, ..., degree-1} stored as an image array."""

    __slots__ = ("images",)

    def __init__(self, images, validate=True):
        arr = np.asarray(images, dtype=np.int32)
        if validate:
            n = arr.shape[0]
            if arr.ndim != 1 or n == 0:
                raise InputError("permutation images must be a nonempty 1-d sequence")
            seen = np.zeros(n, dtype=bool)
            if arr.min(initial=0) < 0 or arr.max(initial=-1) >= n:
                raise InputError("permutation images out of range")
            seen[arr] = True
            if not seen.all():
                raise InputError("images do not form a bijection")
        self.images = arr

    # -- constructors ------------------------------------------------------

    @staticmethod
    def identity(degree):
        return Permutation(np.arange(degree, dtype=np.int32), validate=False)

    @staticmethod
    def from_cycles(degree, cycles):
        """Build from a list of cycles, e.g. [(0, 1, 2), (3, 4)]."""
        images = np.arange(degree, dtype=np.int32)
        for cyc in cycles:
            for a, b in zip(cyc, cyc[1:]):
                images[a] = b
            if cyc:
                images[cyc[-1]] = cyc[0]
        return Permutation(images)

    # -- basic protocol ----------------------------------------------------

    @property
    def degree(self):
        return self.images.shape[0]

    def __mul__(self, other):
        return Permutation(other.images[self.images], validate=False)

    def inverse(self):
        inv = np.empty_like(self.images)
        inv[self.images] = np.arange(self.degree, dtype=np.int32)
        return Permutation(inv, validate=False)

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        result = Permutation.identity(self.degree)
        sq = self
        while n:
            if n & 1:
                result = result * sq
            sq = sq * sq
            n >>= 1
        return result

    def conjugate(self, g):
        """g^-1 * self * g."""
        return Permutation(g.images[self.images[g.inverse().images]], validate=False)

    def __call__(self, point):
        return int(self.images[point])

    def __eq__(self, other):
        return isinstance(other, Permutation) and np.array_equal(self.images, other.images)

    def __hash__(self):
        return hash(self.key())

    def key(self):
        """Canonical byte-string key: image array in the minimal dtype."""
        return self.images.astype(_key_dtype(self.degree)).tobytes()

    # -- structure ---------------------------------------------------------

    def is_identity(self):
        return bool((self.images == np.arange(self.degree, dtype=np.int32)).all())

    def cycles(self):
        seen = np.zeros(self.degree, dtype=bool)
        out = []
        for start in range(self.degree):
            if seen[start] or self.images[start] == start:
                seen[start] = True
                continue
            cyc = [start]
            seen[start] = True
            p = int(self.images[start])
            while p != start:
                cyc.append(p)
                seen[p] = True
                p = int(self.images[p])
            out.append(tuple(cyc))
        return out

    def cycle_type(self):
        """Sorted tuple of cycle lengths >= 2."""
        return tuple(sorted(len(c) for c in self.cycles()))

    def order(self):
        return math.lcm(1, *(len(c) for c in self.cycles()))

    def moved_points(self):
        return np.nonzero(self.images != np.arange(self.degree, dtype=np.int32))[0]

    def smallest_moved(self):
        moved = self.moved_points()
        return int(moved[0]) if moved.size else None

    def __repr__(self):
        cycs = self.cycles()
        if not cycs:
            return "()"
        return "".join("(" + " ".join(map(str, c)) + ")" for c in cycs)


@dataclass
class GeneratedGroup:
    """A group given by permutation generators of a common degree."""

    degree: int
    generators: list
    label: Optional[str] = None

    def __post_init__(self):
        if self.degree < 1:
            raise InputError("degree must be >= 1")
        if not self.generators:
            raise InputError("generator list must be nonempty")
        for g in self.generators:
            if g.degree != self.degree:
                raise InputError("all generators must share the group degree")

    @staticmethod
    def from_images(rows, label=None):
        gens = [Permutation(row) for row in rows]
        return GeneratedGroup(gens[0].degree, gens, label=label)

    def generator_matrix(self):
        return np.array([g.images for g in self.generators], dtype=np.int32)


@dataclass
class OrbitResult:
    """Orbit in discovery order plus its Schreier vector."""

    group: GeneratedGroup
    start: int
    points: np.ndarray
    sv_gen: np.ndarray
    sv_parent: np.ndarray

    def __len__(self):
        return int(self.points.shape[0])

    def __contains__(self, point):
        return self.sv_gen[point] != -1

    def witness(self, point):
        """An element of the group mapping start to `point`."""
        if self.sv_gen[point] == -1:
            raise InputError(f"point {point} is not in the orbit")
        word = []
        p = point
        while self.sv_gen[p] != -2:
            word.append(int(self.sv_gen[p]))
            p = int(self.sv_parent[p])
        images = np.arange(self.group.degree, dtype=np.int32)
        for g in reversed(word):
            images = self.group.generators[g].images[images]
        return Permutation(images, validate=False)


def orbit(group: GeneratedGroup, point: int) -> OrbitResult:
    """Orbit of `point` in discovery order, first element = point."""
    if not 0 <= point < group.degree:
        raise InputError(f"point {point} out of range for degree {group.degree}")
    pts, sv_gen, sv_parent = orbit_schreier(group.generator_matrix(), point)
    return OrbitResult(group, point, pts, sv_gen, sv_parent)


class _Level:
    """One level of a stabilizer chain.

    The orbit only ever grows (breadth-first extension), which keeps the
    Schreier vector of already-discovered points stable; `processed[pos]`
    counts how many generators have had their Schreier generator at orbit
    position `pos` checked, so completed work is never redone.
    """

    __slots__ = ("base_point", "gens", "gen_invs", "orbit", "sv_gen", "sv_parent",
                 "in_orbit", "processed", "_rep_cache", "_rep_inv_cache", "degree")

    def __init__(self, base_point, degree):
        self.base_point = base_point
        self.degree = degree
        self.gens = []          # image arrays fixing all earlier base points
        self.gen_invs = []
        self.orbit = [base_point]
        self.sv_gen = np.full(degree, -1, dtype=np.int32)
        self.sv_parent = np.full(degree, -1, dtype=np.int32)
        self.sv_gen[base_point] = -2
        self.in_orbit = self.sv_gen != -1
        self.processed = [0]
        self._rep_cache = {}
        self._rep_inv_cache = {}

    def add_gen(self, images):
        inv = np.empty_like(images)
        inv[images] = np.arange(self.degree, dtype=np.int32)
        gidx = len(self.gens)
        self.gens.append(images)
        self.gen_invs.append(inv)
        # extend the orbit: the new generator may open new points from any
        # existing one, then close under all generators breadth-first
        frontier = []
        for p in self.orbit:
            q = int(images[p])
            if self.sv_gen[q] == -1:
                self.sv_gen[q] = gidx
                self.sv_parent[q] = p
                self.orbit.append(q)
                self.processed.append(0)
                frontier.append(q)
        while frontier:
            nxt = []
            for p in frontier:
                for g, gen in enumerate(self.gens):
                    q = int(gen[p])
                    if self.sv_gen[q] == -1:
                        self.sv_gen[q] = g
                        self.sv_parent[q] = p
                        self.orbit.append(q)
                        self.processed.append(0)
                        nxt.append(q)
            frontier = nxt
        self.in_orbit = self.sv_gen != -1

    def _walk(self, point):
        word = []
        p = point
        while self.sv_gen[p] != -2:
            word.append(int(self.sv_gen[p]))
            p = int(self.sv_parent[p])
        word.reverse()
        return word

    def rep(self, point):
        """Transversal element u with u(base_point) = point, as images."""
        cached = self._rep_cache.get(point)
        if cached is not None:
            return cached
        images = np.arange(self.degree, dtype=np.int32)
        for g in self._walk(point):
            images = self.gens[g][images]
        if self.degree <= _REP_CACHE_DEGREE:
            self._rep_cache[point] = images
        return images

    def rep_inv(self, point):
        cached = self._rep_inv_cache.get(point)
        if cached is not None:
            return cached
        images = np.arange(self.degree, dtype=np.int32)
        for g in reversed(self._walk(point)):
            images = self.gen_invs[g][images]
        if self.degree <= _REP_CACHE_DEGREE:
            self._rep_inv_cache[point] = images
        return images


class StabilizerChain:
    """Base, strong generating set and transversals for a generated group.

    Built by deterministic Schreier-Sims; `order` is exact.  Immutable
    after construction.
    """

    def __init__(self, group: GeneratedGroup, base_prefix=(), budget: Budget = DEFAULT_BUDGET):
        budget.check_degree(group.degree, "permutation degree")
        self.group = group
        self.degree = group.degree
        self.levels = [_Level(int(b), self.degree) for b in base_prefix]
        self._build()
        for lv in self.levels:
            lv.orbit = np.asarray(lv.orbit, dtype=np.int32)
        self.order = math.prod(len(lv.orbit) for lv in self.levels) if self.levels else 1
        self.base_points = [lv.base_point for lv in self.levels]

    # -- construction ------------------------------------------------------

    def _first_unfixed_level(self, images, start=0):
        """First level index >= start whose base point `images` moves.

        Returns len(levels) if images fixes every base point from start on.
        """
        for i in range(start, len(self.levels)):
            if images[self.levels[i].base_point] != self.levels[i].base_point:
                return i
        return len(self.levels)

    def _place(self, images):
        """Insert a strong generator, extending the base if necessary.

        A strong generator whose first moved base point sits at level i
        belongs to the generating set of every level 0..i (it fixes all
        earlier base points), keeping the inclusion S_0 >= S_1 >= ... exact.
        """
        i = self._first_unfixed_level(images)
        if i == len(self.levels):
            moved = np.nonzero(images != np.arange(self.degree, dtype=np.int32))[0]
            self.levels.append(_Level(int(moved[0]), self.degree))
        for j in range(i + 1):
            self.levels[j].add_gen(images)
        return i

    def _sift_from(self, images, start):
        """Strip `images` through levels >= start; return (level, residue)."""
        h = images
        for i in range(start, len(self.levels)):
            lv = self.levels[i]
            p = int(h[lv.base_point])
            if p == lv.base_point:
                continue
            if not lv.in_orbit[p]:
                return i, h
            h = lv.rep_inv(p)[h]
        return len(self.levels), h

    def _complete_level(self, i):
        """Process all pending Schreier pairs at level i.

        A pair (orbit point, generator) is done for good once processed:
        either its Schreier generator already lay in the span below, or its
        sift residue was added there, which settles membership permanently
        since generating sets only grow.  Returns True if anything was
        placed (deeper levels then have new pending pairs).
        """
        identity = np.arange(self.degree, dtype=np.int32)
        lv = self.levels[i]
        placed_any = False
        pos = 0
        while pos < len(lv.orbit):
            p = lv.orbit[pos]
            while lv.processed[pos] < len(lv.gens):
                gidx = lv.processed[pos]
                lv.processed[pos] = gidx + 1
                s = lv.gens[gidx]
                q = int(s[p])
                # Schreier generator u_p * s * u_q^{-1}
                schreier = lv.rep_inv(q)[s[lv.rep(p)]]
                if np.array_equal(schreier, identity):
                    continue
                _, res = self._sift_from(schreier, i + 1)
                if not np.array_equal(res, identity):
                    self._place(res)  # lands strictly below level i
                    placed_any = True
            pos += 1
        return placed_any

    def _build(self):
        identity = np.arange(self.degree, dtype=np.int32)
        for g in self.group.generators:
            if not np.array_equal(g.images, identity):
                self._place(g.images.copy())
        dirty = True
        while dirty:
            dirty = False
            for i in reversed(range(len(self.levels))):
                if self._complete_level(i):
                    dirty = True

    # -- queries -----------------------------------------------------------

    def strong_generators(self):
        seen = {}
        for lv in self.levels:
            for g in lv.gens:
                seen.setdefault(g.tobytes(), g)
        return [Permutation(g, validate=False) for g in seen.values()]

    def sift(self, perm: Permutation):
        """Residue after stripping through the chain (identity iff member)."""
        if perm.degree != self.degree:
            raise InputError("degree mismatch in sift")
        _, res = self._sift_from(perm.images, 0)
        return Permutation(res, validate=False)

    def contains(self, perm: Permutation) -> bool:
        return self.sift(perm).is_identity()

    def stabilizer_generators(self, depth):
        """Generators of the pointwise stabilizer of base_points[:depth]."""
        if depth >= len(self.levels):
            return [Permutation.identity(self.degree)]
        gens = self.levels[depth].gens
        if not gens:
            return [Permutation.identity(self.degree)]
        return [Permutation(g, validate=False) for g in gens]

    def verify(self):
        """Re-check every Schreier generator sifts to the identity."""
        identity = np.arange(self.degree, dtype=np.int32)
        for i, lv in enumerate(self.levels):
            for p in lv.orbit:
                u_p = lv.rep(int(p))
                for s in lv.gens:
                    q = int(s[p])
                    schreier = lv.rep_inv(q)[s[u_p]]
                    _, res = self._sift_from(schreier, i + 1)
                    if not np.array_equal(res, identity):
                        return False
        return True

    def coset_key(self, images):
        """Canonical key of the right coset (chain group)*g.

        At each level pick the transversal point whose g-image is minimal;
        the resulting canonical representative's key identifies the coset.
        """
        g = images
        for lv in self.levels:
            pts = lv.orbit
            vals = g[pts]
            p = int(pts[int(np.argmin(vals))])
            g = g[lv.rep(p)]  # u_p * g
        return g.astype(_key_dtype(self.degree)).tobytes()

    def coset_canonical_rep(self, images):
        """Canonical representative of the right coset, as an image array."""
        g = images
        for lv in self.levels:
            pts = lv.orbit
            vals = g[pts]
            p = int(pts[int(np.argmin(vals))])
            g = g[lv.rep(p)]
        return g


def stabilizer_chain(group: GeneratedGroup, budget: Budget = DEFAULT_BUDGET) -> StabilizerChain:
    """Deterministic stabilizer chain with exact order."""
    return StabilizerChain(group, budget=budget)


@dataclass
class CosetAction:
    """Permutation action of G on the right cosets of a subgroup H.

    Point 0 is the coset H itself; representative_of_point[i] maps coset H
    to coset number i by right multiplication.
    """

    source: GeneratedGroup
    point_count: int
    generator_images: list          # Permutation objects of degree point_count
    representative_of_point: list   # Permutation objects of source degree
    subgroup_chain: StabilizerChain = field(repr=False)
    _point_of_key: dict = field(repr=False, default_factory=dict)

    def action_group(self, label=None):
        return GeneratedGroup(self.point_count, self.generator_images, label=label)

    def point_of(self, element: Permutation) -> int:
        """Coset point containing `element`."""
        key = self.subgroup_chain.coset_key(element.images)
        try:
            return self._point_of_key[key]
        except KeyError:
            raise InputError("element does not lie in the source group") from None

    def action_of(self, element: Permutation) -> Permutation:
        """Image of an arbitrary source-group element in the action."""
        images = np.empty(self.point_count, dtype=np.int32)
        for i, rep in enumerate(self.representative_of_point):
            images[i] = self.point_of(rep * element)
        return Permutation(images, validate=False)


def coset_action(
    group: GeneratedGroup,
    group_chain: StabilizerChain,
    subgroup_chain: StabilizerChain,
    budget: Budget = DEFAULT_BUDGET,
    check_subgroup: bool = True,
) -> CosetAction:
    """Action of `group` on right cosets of the subgroup with given chain."""
    if subgroup_chain.degree != group.degree:
        raise InputError("subgroup degree mismatch")
    if check_subgroup:
        for g in subgroup_chain.group.generators:
            if not group_chain.contains(g):
                raise InputError("H is not a subgroup: generator fails membership")
    index, rem = divmod(group_chain.order, subgroup_chain.order)
    if rem:
        raise InputError("subgroup order does not divide group order")
    budget.check_degree(index, "coset action degree")

    identity = Permutation.identity(group.degree)
    reps = [identity]
    point_of_key = {subgroup_chain.coset_key(identity.images): 0}
    images_per_gen = [[] for _ in group.generators]
    head = 0
    while head < len(reps):
        r = reps[head]
        for gi, g in enumerate(group.generators):
            t = r * g
            key = subgroup_chain.coset_key(t.images)
            pt = point_of_key.get(key)
            if pt is None:
                pt = len(reps)
                point_of_key[key] = pt
                reps.append(Permutation(subgroup_chain.coset_canonical_rep(t.images), validate=False))
            images_per_gen[gi].append(pt)
        head += 1
    if len(reps) != index:
        raise InputError("coset enumeration did not match the index")
    gen_perms = [Permutation(np.array(imgs, dtype=np.int32), validate=False) for imgs in images_per_gen]
    return CosetAction(
        source=group,
        point_count=index,
        generator_images=gen_perms,
        representative_of_point=reps,
        subgroup_chain=subgroup_chain,
        _point_of_key=point_of_key,
    )


def is_transitive(degree, generator_images: Iterable[Permutation]) -> bool:
    mat = np.array([g.images for g in generator_images], dtype=np.int32)
    pts, _, _ = orbit_schreier(mat, 0)
    return pts.shape[0] == degree


def is_primitive(action) -> tuple[bool, Optional[list]]:
    """Primitivity of a transitive action; on failure returns a block.

    `action` may be a CosetAction or a GeneratedGroup acting naturally.
    Returns (True, None) or (False, minimal nontrivial block containing 0).
    """
    if isinstance(action, CosetAction):
        degree = action.point_count
        gens = action.generator_images
    else:
        degree = action.degree
        gens = action.generators
    mat = np.array([g.images for g in gens], dtype=np.int32)
    pts, _, _ = orbit_schreier(mat, 0)
    if pts.shape[0] != degree:
        raise InputError("primitivity test requires a transitive action")
    if degree == 1:
        return True, None
    best_block = None
    for w in range(1, degree):
        reps = min_block_reps(mat, w)
        block = np.nonzero(reps == reps[0])[0]
        if block.shape[0] < degree:
            if best_block is None or block.shape[0] < len(best_block):
                best_block = [int(x) for x in block]
    if best_block is not None:
        return False, best_block
    return True, None
