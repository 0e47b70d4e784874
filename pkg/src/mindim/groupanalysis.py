"""Element enumeration, prime-order classes, subgroup element-set calculus.

Subgroups of a fixed parent group are handled through sorted arrays of
element ranks: the parent's elements are enumerated once, sorted by
canonical key, and a subgroup becomes a sorted uint32 array.  Intersections
are then exact sorted-array merges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np

from .errors import Budget, DEFAULT_BUDGET, BudgetError, InputError
from .kernels import orbit_schreier
from .permcore import (
    CosetAction,
    GeneratedGroup,
    Permutation,
    StabilizerChain,
    coset_action,
    stabilizer_chain,
)

_TABLE_BYTES_CAP = 768 * 1024 * 1024


@lru_cache(maxsize=4096)
def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def _key_dtype(degree):
    if degree <= 0x100:
        return np.uint8
    if degree <= 0x10000:
        return np.uint16
    return np.uint32


def _enumerate_rows(chain: StabilizerChain, budget: Budget) -> np.ndarray:
    """All group elements as image rows, transversal-product order."""
    budget.check_elements(chain.order, "group order")
    degree = chain.degree
    dtype = _key_dtype(degree)
    if chain.order * degree * np.dtype(dtype).itemsize > _TABLE_BYTES_CAP:
        raise BudgetError("element table would exceed the memory cap")
    rows = np.arange(degree, dtype=dtype)[None, :]
    for lv in reversed(chain.levels):
        reps = np.empty((len(lv.orbit), degree), dtype=dtype)
        for i, p in enumerate(lv.orbit):
            reps[i] = lv.rep(int(p))
        # element = (deeper part) * u, i.e. u applied last
        blocks = [reps[i][rows] for i in range(reps.shape[0])]
        rows = np.vstack(blocks)
    return rows


def enumerate_elements(chain: StabilizerChain, budget: Budget = DEFAULT_BUDGET):
    """Yield each group element exactly once, in a deterministic order."""
    rows = _enumerate_rows(chain, budget)
    for r in rows:
        yield Permutation(r.astype(np.int32), validate=False)


class ElementTable:
    """Sorted canonical-key table of all elements of one group."""

    def __init__(self, chain: StabilizerChain, budget: Budget = DEFAULT_BUDGET):
        self.chain = chain
        self.degree = chain.degree
        rows = _enumerate_rows(chain, budget)
        void = rows.view(np.dtype((np.void, rows.dtype.itemsize * self.degree))).ravel()
        order = np.argsort(void, kind="stable")
        self.elements = np.ascontiguousarray(rows[order])
        self._void = self.elements.view(
            np.dtype((np.void, self.elements.dtype.itemsize * self.degree))
        ).ravel()
        self.order = self.elements.shape[0]
        ident = np.arange(self.degree, dtype=self.elements.dtype)
        self.identity_rank = int(self._rank_rows(ident[None, :])[0])

    def _as_void(self, rows):
        rows = np.ascontiguousarray(rows, dtype=self.elements.dtype)
        return rows.view(np.dtype((np.void, rows.dtype.itemsize * self.degree))).ravel()

    def _rank_rows(self, rows):
        idx = np.searchsorted(self._void, self._as_void(rows))
        return idx

    def rank_rows(self, rows) -> np.ndarray:
        """Ranks of image rows; raises if any row is not a group element."""
        idx = self._rank_rows(rows)
        bad = idx >= self.order
        if bad.any():
            raise InputError("row is not an element of the group")
        if (self._as_void(rows) != self._void[idx]).any():
            raise InputError("row is not an element of the group")
        return idx.astype(np.uint32)

    def contains_rows(self, rows) -> np.ndarray:
        idx = self._rank_rows(rows)
        ok = idx < self.order
        sub = self._as_void(rows)[ok] == self._void[idx[ok]]
        out = np.zeros(rows.shape[0], dtype=bool)
        out[np.nonzero(ok)[0][sub]] = True
        return out

    def rank_of(self, perm: Permutation) -> int:
        return int(self.rank_rows(perm.images[None, :])[0])

    def perm(self, rank: int) -> Permutation:
        return Permutation(self.elements[rank].astype(np.int32), validate=False)

    def rows_of(self, ranks) -> np.ndarray:
        return self.elements[np.asarray(ranks, dtype=np.int64)]

    def conjugate_ranks(self, ranks, g: Permutation) -> np.ndarray:
        """Sorted ranks of { g^-1 x g : x in ranks }."""
        rows = self.elements[np.asarray(ranks, dtype=np.int64)]
        ginv = g.inverse().images
        conj = g.images.astype(self.elements.dtype)[rows[:, ginv]]
        out = self.rank_rows(conj)
        out.sort()
        return out

    def orders_and_fingerprints(self):
        """Element orders and a cycle-type fingerprint hash, per rank."""
        return _orders_fingerprints(self.elements.astype(np.int64))


def _orders_fingerprints(rows):
    # fingerprint must be a commutative fold over cycle lengths so equal
    # cycle types always collide (hash collisions across types are harmless)
    m, n = rows.shape
    orders = np.empty(m, dtype=np.int64)
    fhash = np.empty(m, dtype=np.uint64)
    seen = np.zeros(n, dtype=np.int64)
    for i in range(m):
        row = rows[i]
        stamp = i + 1
        order = 1
        h = 0
        for start in range(n):
            if seen[start] == stamp:
                continue
            length = 0
            p = start
            while seen[p] != stamp:
                seen[p] = stamp
                p = row[p]
                length += 1
            order = order // math.gcd(order, length) * length
            h = (h + (length * length * 2654435761 + length)) % (1 << 64)
        orders[i] = order
        fhash[i] = np.uint64(h)
    return orders, fhash


try:  # pragma: no cover - exercised via the kernels backend switch
    from .kernels import USING_NUMBA

    if USING_NUMBA:
        import numba

        @numba.njit(cache=True)
        def _orders_fingerprints_nb(rows):
            m, n = rows.shape
            orders = np.empty(m, dtype=np.int64)
            fhash = np.empty(m, dtype=np.uint64)
            seen = np.zeros(n, dtype=np.int64)
            for i in range(m):
                stamp = i + 1
                order = 1
                h = np.uint64(0)
                for start in range(n):
                    if seen[start] == stamp:
                        continue
                    length = 0
                    p = start
                    while seen[p] != stamp:
                        seen[p] = stamp
                        p = rows[i, p]
                        length += 1
                    g = order
                    b = length
                    while b:
                        g, b = b, g % b
                    order = order // g * length
                    lu = np.uint64(length)
                    h = h + (lu * lu * np.uint64(2654435761) + lu)
                orders[i] = order
                fhash[i] = h
            return orders, fhash

        _orders_fingerprints = _orders_fingerprints_nb
except ImportError:  # pragma: no cover
    pass


class GroupContext:
    """A parent group with its chain and (lazily) its element table."""

    def __init__(self, group: GeneratedGroup, chain: Optional[StabilizerChain] = None,
                 budget: Budget = DEFAULT_BUDGET):
        self.group = group
        self.budget = budget
        self.chain = chain if chain is not None else stabilizer_chain(group, budget=budget)
        self.order = self.chain.order
        self._table = None
        self._classes = None

    @property
    def label(self):
        return self.group.label

    @property
    def table(self) -> ElementTable:
        if self._table is None:
            self._table = ElementTable(self.chain, self.budget)
        return self._table

    def subgroup(self, generators, tags=(), order=None, with_ranks=True) -> "SubgroupRecord":
        gens = list(generators)
        sub = GeneratedGroup(self.group.degree, gens)
        chain = stabilizer_chain(sub, budget=self.budget)
        if order is not None and chain.order != order:
            raise InputError(f"subgroup order {chain.order} != declared {order}")
        if self.order % chain.order:
            raise InputError("subgroup order does not divide parent order (Lagrange)")
        record = SubgroupRecord(self, gens, chain.order, tags=list(tags))
        record._chain = chain
        if with_ranks and chain.order <= self.budget.max_elements and self._table_possible():
            record.ranks  # materialize
        return record

    def _table_possible(self):
        return self.order <= self.budget.max_elements

    def subgroup_from_ranks(self, ranks, tags=()) -> "SubgroupRecord":
        ranks = np.asarray(ranks, dtype=np.uint32)
        record = SubgroupRecord(self, None, int(ranks.shape[0]), tags=list(tags))
        record._ranks = ranks
        return record

    def trivial_subgroup(self) -> "SubgroupRecord":
        record = SubgroupRecord(self, [Permutation.identity(self.group.degree)], 1)
        if self._table_possible():
            record._ranks = np.array([self.table.identity_rank], dtype=np.uint32)
        return record


@dataclass
class SubgroupRecord:
    """A subgroup of a parent group, with cached element-rank set."""

    context: GroupContext
    _generators: Optional[list]
    order: int
    tags: list = field(default_factory=list)
    _chain: Optional[StabilizerChain] = field(default=None, repr=False)
    _ranks: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def parent(self) -> GeneratedGroup:
        return self.context.group

    @property
    def generators(self) -> list:
        if self._generators is None:
            self._generators = self._generators_from_ranks()
        return self._generators

    def _generators_from_ranks(self):
        table = self.context.table
        degree = self.parent.degree
        gens = []
        chain = None
        for rank in self._ranks:
            p = table.perm(int(rank))
            if p.is_identity():
                continue
            if chain is not None and chain.contains(p):
                continue
            gens.append(p)
            chain = stabilizer_chain(GeneratedGroup(degree, gens), budget=self.context.budget)
            if chain.order == self.order:
                break
        if not gens:
            gens = [Permutation.identity(degree)]
            chain = stabilizer_chain(GeneratedGroup(degree, gens))
        if chain.order != self.order:
            raise InputError("rank set is not closed: generated order mismatch")
        self._chain = chain
        return gens

    @property
    def chain(self) -> StabilizerChain:
        if self._chain is None:
            sub = GeneratedGroup(self.parent.degree, self.generators)
            self._chain = stabilizer_chain(sub, budget=self.context.budget)
        return self._chain

    @property
    def ranks(self) -> np.ndarray:
        """Sorted element ranks in the parent table (the element-key set)."""
        if self._ranks is None:
            self.context.budget.check_elements(self.order, "subgroup order")
            rows = _enumerate_rows(self.chain, self.context.budget)
            out = self.context.table.rank_rows(rows)
            out.sort()
            self._ranks = out
        return self._ranks

    @property
    def has_ranks(self):
        return self._ranks is not None

    def key_hash(self) -> bytes:
        """Canonical identity of the subgroup inside its parent."""
        return self.ranks.tobytes()

    def contains(self, perm: Permutation) -> bool:
        if self._chain is not None or self._generators is not None:
            return self.chain.contains(perm)
        rank = self.context.table.rank_of(perm)
        i = int(np.searchsorted(self._ranks, rank))
        return i < self._ranks.shape[0] and self._ranks[i] == rank

    def conjugate(self, g: Permutation) -> "SubgroupRecord":
        if self.has_ranks or self._generators is None:
            rec = self.context.subgroup_from_ranks(
                self.context.table.conjugate_ranks(self.ranks, g), tags=list(self.tags)
            )
            return rec
        gens = [p.conjugate(g) for p in self.generators]
        return self.context.subgroup(gens, tags=list(self.tags), with_ranks=False)

    def index(self) -> int:
        return self.context.order // self.order

    def coset_action(self) -> CosetAction:
        return coset_action(self.parent, self.context.chain, self.chain,
                            budget=self.context.budget)

    def is_normal(self) -> bool:
        return all(
            self.contains(h.conjugate(g))
            for g in self.context.group.generators
            for h in self.generators
        )


@dataclass
class ConjClass:
    """A conjugacy class of prime-order elements."""

    representative: Permutation
    element_order: int
    size: int
    ranks: np.ndarray = field(repr=False)


def prime_order_classes(ctx: GroupContext) -> list:
    """Conjugacy classes of prime-order elements, deterministically ordered.

    Elements are grouped by (order, cycle-type fingerprint) and each group
    is split into conjugation orbits under the parent generators.
    """
    if ctx._classes is not None:
        return ctx._classes
    table = ctx.table
    orders, fhash = table.orders_and_fingerprints()
    prime_mask = np.array([is_prime(int(o)) for o in np.unique(orders)])
    prime_orders = set(np.unique(orders)[prime_mask].tolist())
    classes = []
    gens = ctx.group.generators
    gens_inv = [g.inverse() for g in gens]
    mask = np.isin(orders, list(prime_orders))
    cand = np.nonzero(mask)[0]
    combo = orders[cand] * np.int64(1 << 32) ^ fhash[cand].astype(np.int64)
    for value in np.unique(combo):
        group_ranks = cand[combo == value]
        unassigned = np.ones(group_ranks.shape[0], dtype=bool)
        pos_of = {int(r): i for i, r in enumerate(group_ranks)}
        while unassigned.any():
            start = int(group_ranks[np.nonzero(unassigned)[0][0]])
            members = {start}
            frontier = np.array([start], dtype=np.int64)
            unassigned[pos_of[start]] = False
            while frontier.size:
                rows = table.elements[frontier]
                new = []
                for g, ginv in zip(gens, gens_inv):
                    conj = g.images.astype(table.elements.dtype)[rows[:, ginv.images]]
                    rk = table.rank_rows(conj)
                    for r in rk.tolist():
                        if r not in members:
                            members.add(r)
                            unassigned[pos_of[r]] = False
                            new.append(r)
                frontier = np.array(new, dtype=np.int64)
            member_arr = np.array(sorted(members), dtype=np.uint32)
            rep_rank = int(member_arr[0])
            classes.append(
                ConjClass(
                    representative=table.perm(rep_rank),
                    element_order=int(orders[rep_rank]),
                    size=int(member_arr.shape[0]),
                    ranks=member_arr,
                )
            )
    classes.sort(key=lambda c: (c.element_order, c.size, int(c.ranks[0])))
    ctx._classes = classes
    return classes


def subgroup_intersection(h: SubgroupRecord, k: SubgroupRecord) -> SubgroupRecord:
    """Exact intersection via sorted rank-set merge."""
    if h.context is not k.context:
        raise InputError("intersection requires a common parent context")
    ranks = np.intersect1d(h.ranks, k.ranks, assume_unique=True)
    return h.context.subgroup_from_ranks(ranks)


def intersect_rank_sets(rank_sets) -> np.ndarray:
    out = None
    for r in rank_sets:
        out = r if out is None else np.intersect1d(out, r, assume_unique=True)
    return out


def core(ctx: GroupContext, h: SubgroupRecord) -> SubgroupRecord:
    """Largest normal subgroup of the parent inside h (coset-action kernel)."""
    action = h.coset_action()
    image_order = stabilizer_chain(action.action_group(), budget=ctx.budget).order
    expected = ctx.order // image_order
    if expected == 1:
        return ctx.trivial_subgroup()
    # intersect h with its conjugates by the coset representatives
    table = ctx.table
    current = h.ranks
    for x in range(1, action.point_count):
        g = action.representative_of_point[x]
        rows = table.rows_of(current)
        ginv = g.inverse()
        # e in h^g  iff  g e g^-1 in h
        conj = ginv.images.astype(table.elements.dtype)[rows[:, g.images]]
        rk = table.rank_rows(conj)
        keep = np.isin(rk, h.ranks, assume_unique=False)
        current = current[keep]
        if current.shape[0] == expected:
            break
    if current.shape[0] != expected:
        raise InputError("core computation mismatch with action kernel order")
    return ctx.subgroup_from_ranks(current)


def frattini(ctx: GroupContext, maximals, complete: bool) -> SubgroupRecord:
    """Intersection of all maximal subgroups; refuses incomplete lists."""
    if not complete:
        raise InputError("frattini requires a complete list of maximal subgroups")
    if not maximals:
        raise InputError("frattini requires at least one maximal subgroup")
    current = None
    for m in maximals:
        current = m.ranks if current is None else np.intersect1d(current, m.ranks, assume_unique=True)
        if current.shape[0] == 1:
            break
    return ctx.subgroup_from_ranks(current)


def double_cosets(ctx: GroupContext, h: SubgroupRecord, k: SubgroupRecord):
    """(H,K) double cosets as (representative, |HgK|) pairs.

    Computed as K-orbits on G/H; representatives come from the coset
    enumeration's Schreier structure.
    """
    action = h.coset_action()
    k_images = np.array([action.action_of(g).images for g in k.generators], dtype=np.int32)
    n = action.point_count
    assigned = np.full(n, -1, dtype=np.int64)
    out = []
    for start in range(n):
        if assigned[start] != -1:
            continue
        pts, _, _ = orbit_schreier(k_images, start)
        assigned[pts] = len(out)
        rep = action.representative_of_point[start]
        out.append((rep, h.order * int(pts.shape[0])))
    total = sum(size for _, size in out)
    if total != ctx.order:
        raise InputError("double coset sizes do not sum to the group order")
    return out
