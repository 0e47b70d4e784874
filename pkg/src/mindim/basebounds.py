"""Base sizes b(G,H), regular orbits, intersection criteria, fpr and Q-hat.

All probability-flavored quantities are exact rationals; the Monte Carlo
estimator is the only sampled quantity and is reproducible from its seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import BudgetError, InputError
from .groupanalysis import GroupContext, SubgroupRecord, intersect_rank_sets, prime_order_classes
from .kernels import mc_nonbase_count, orbit_schreier
from .permcore import Permutation


class ActionContext:
    """Coset action of G on G/H plus cached per-point stabilizer rank sets."""

    def __init__(self, ctx: GroupContext, h: SubgroupRecord):
        self.ctx = ctx
        self.h = h
        self.action = h.coset_action()
        self.n = self.action.point_count
        self._stab = {0: h.ranks}

    def stab_ranks(self, x: int) -> np.ndarray:
        cached = self._stab.get(x)
        if cached is None:
            g = self.action.representative_of_point[x]
            cached = self.ctx.table.conjugate_ranks(self.h.ranks, g)
            self._stab[x] = cached
        return cached

    def action_perm(self, element: Permutation) -> Permutation:
        return self.action.action_of(element)

    def core_ranks(self) -> np.ndarray:
        current = self.h.ranks
        for x in range(1, self.n):
            current = np.intersect1d(current, self.stab_ranks(x), assume_unique=True)
            if current.shape[0] == 1:
                break
        return current


@dataclass
class BaseWitness:
    """Conjugators realizing a minimal base: H cap H^g2 cap ... = core(H)."""

    subgroup_order: int
    conjugators: list
    intersection_order: int
    core_order: int

    def replay(self, ctx: GroupContext, h: SubgroupRecord) -> bool:
        """Recompute the intersection from scratch and compare orders."""
        sets = [h.ranks] + [ctx.table.conjugate_ranks(h.ranks, g) for g in self.conjugators]
        meet = intersect_rank_sets(sets)
        return meet.shape[0] == self.intersection_order == self.core_order


def regular_orbit_witness(ctx: GroupContext, h: SubgroupRecord, k: SubgroupRecord):
    """(conjugator g with K cap H^g = 1, orbit-length multiset evidence).

    Returns (None, lengths) when K has no regular orbit on G/H.
    """
    action = h.coset_action()
    k_images = np.array([action.action_of(g).images for g in k.generators], dtype=np.int32)
    n = action.point_count
    seen = np.zeros(n, dtype=bool)
    lengths = []
    witness = None
    for start in range(n):
        if seen[start]:
            continue
        pts, _, _ = orbit_schreier(k_images, start)
        seen[pts] = True
        lengths.append(int(pts.shape[0]))
        if witness is None and pts.shape[0] == k.order:
            witness = action.representative_of_point[start]
    return witness, sorted(lengths)


def base_size(ctx: GroupContext, h: SubgroupRecord, max_levels: int = 64):
    """Exact minimal c with H cap H^g2 cap ... cap H^gc = core(H).

    Level-wise breadth-first search over distinct intersection subgroups;
    states are deduplicated by their exact element-rank sets.
    """
    if h.order == ctx.order:
        raise InputError("base size requires a proper subgroup")
    act = ActionContext(ctx, h)
    core = act.core_ranks()
    core_order = int(core.shape[0])
    if h.order == core_order:
        witness = BaseWitness(h.order, [], h.order, core_order)
        return 1, witness
    # frontier: key -> (ranks, point list); explored in canonical order
    start_key = h.ranks.tobytes()
    frontier = {start_key: (h.ranks, [])}
    seen = {start_key}
    for level in range(2, max_levels + 1):
        nxt = {}
        items = sorted(frontier.values(), key=lambda sp: (-sp[0].shape[0], sp[0].tobytes()))
        for ranks, points in items:
            for x in range(1, act.n):
                meet = np.intersect1d(ranks, act.stab_ranks(x), assume_unique=True)
                if meet.shape[0] == ranks.shape[0]:
                    continue  # no progress: point already fixed
                if meet.shape[0] == core_order:
                    conj = [act.action.representative_of_point[p] for p in points + [x]]
                    witness = BaseWitness(h.order, conj, core_order, core_order)
                    if not witness.replay(ctx, h):
                        raise InputError("base witness failed replay")
                    return level, witness
                key = meet.tobytes()
                if key not in seen:
                    seen.add(key)
                    nxt[key] = (meet, points + [x])
        if not nxt:
            raise InputError("base search exhausted without reaching the core")
        if len(seen) > ctx.budget.search_nodes:
            raise BudgetError(
                f"base search state budget exceeded at level {level}",
                partial={"lower_bound": level + 1},
            )
        frontier = nxt
    raise BudgetError("base search level limit reached", partial={"lower_bound": max_levels})


def brute_force_base_size(ctx: GroupContext, h: SubgroupRecord):
    """Oracle: minimal-base search over all conjugator tuples (|G| small).

    Independent of the coset-action path: conjugates H by every group
    element, dedupes the conjugate sets, and breadth-first searches
    intersections level by level.
    """
    if ctx.order > 2000:
        raise BudgetError("brute-force base oracle limited to |G| <= 2000")
    table = ctx.table
    conj_sets = {}
    for rank in range(ctx.order):
        g = table.perm(rank)
        cs = table.conjugate_ranks(h.ranks, g)
        conj_sets.setdefault(cs.tobytes(), cs)
    conj_list = list(conj_sets.values())
    core = intersect_rank_sets(conj_list)
    core_order = int(core.shape[0])
    if h.order == core_order:
        return 1
    frontier = {h.ranks.tobytes(): h.ranks}
    seen = set(frontier)
    level = 1
    while True:
        level += 1
        nxt = {}
        for ranks in frontier.values():
            for cs in conj_list:
                meet = np.intersect1d(ranks, cs, assume_unique=True)
                if meet.shape[0] == core_order:
                    return level
                key = meet.tobytes()
                if key not in seen:
                    seen.add(key)
                    nxt[key] = meet
        frontier = nxt
        if not frontier:
            raise InputError("brute-force base search exhausted")


@dataclass
class CriteriaCertificate:
    mode: str
    verdict: bool
    group_order: int
    h_order: int
    k_order: int
    double_coset_sizes: Optional[list] = None


def intersection_criteria(ctx: GroupContext, h: SubgroupRecord, k: SubgroupRecord,
                          mode: str = "order", reps: Optional[list] = None):
    """Order criterion and double-coset criterion for H^g cap K != 1.

    order mode: true iff |H||K| > |G|.
    double_coset mode: true iff every rep satisfies |HxK| < |H||K| and the
    listed double cosets cover more than |G| - |H||K| of the group.
    """
    if mode == "order":
        verdict = h.order * k.order > ctx.order
        return CriteriaCertificate("order", verdict, ctx.order, h.order, k.order)
    if mode != "double_coset":
        raise InputError(f"unknown criteria mode {mode!r}")
    if reps is None:
        raise InputError("double_coset mode requires representatives")
    action = h.coset_action()
    k_images = np.array([action.action_of(g).images for g in k.generators], dtype=np.int32)
    points = []
    for rep in reps:
        points.append(action.point_of(rep))
    orbit_ids = np.full(action.point_count, -1, dtype=np.int64)
    sizes = []
    for i, pt in enumerate(points):
        if orbit_ids[pt] != -1:
            raise InputError("representatives are not in distinct double cosets")
        pts, _, _ = orbit_schreier(k_images, pt)
        if (orbit_ids[pts] != -1).any():
            raise InputError("representatives are not in distinct double cosets")
        orbit_ids[pts] = i
        sizes.append(h.order * int(pts.shape[0]))
    cond_i = all(s < h.order * k.order for s in sizes)
    cond_ii = sum(sizes) > ctx.order - h.order * k.order
    return CriteriaCertificate(
        "double_coset", cond_i and cond_ii, ctx.order, h.order, k.order, sizes
    )


@dataclass
class FprValue:
    value: Fraction
    fixed_points: int
    class_size: int
    class_meet_h: Optional[int]
    dual_route: bool


def fpr(ctx: GroupContext, h: SubgroupRecord, x: Permutation,
        act: Optional[ActionContext] = None) -> FprValue:
    """Fixed point ratio of x on G/H, computed two ways and compared.

    Route (a): fixed points of x in the coset action over the index.
    Route (b): |x^G cap H| / |x^G| from class and subgroup rank sets.
    """
    from .groupanalysis import is_prime

    order = x.order()
    if not is_prime(order):
        raise InputError("fpr is defined here for prime-order elements")
    if act is None:
        act = ActionContext(ctx, h)
    ax = act.action_perm(x)
    fixed = int(np.sum(ax.images == np.arange(act.n, dtype=np.int32)))
    route_a = Fraction(fixed, act.n)
    classes = prime_order_classes(ctx)
    rank = ctx.table.rank_of(x)
    cls = None
    for c in classes:
        i = int(np.searchsorted(c.ranks, rank))
        if i < c.ranks.shape[0] and c.ranks[i] == rank:
            cls = c
            break
    if cls is None:
        raise InputError("element not found in the prime-order classes")
    meet = int(np.intersect1d(cls.ranks, h.ranks, assume_unique=True).shape[0])
    route_b = Fraction(meet, cls.size)
    if route_a != route_b:
        raise InputError("fixed point ratio routes disagree (internal error)")
    return FprValue(route_a, fixed, cls.size, meet, dual_route=True)


def qhat(ctx: GroupContext, h: SubgroupRecord, c: int,
         act: Optional[ActionContext] = None) -> Fraction:
    """Exact class sum bounding the non-base probability for c-tuples.

    When the value is < 1 the base size is at most c.
    """
    if c < 1:
        raise InputError("qhat requires c >= 1")
    if h.order == ctx.order:
        raise InputError("qhat requires a proper subgroup")
    if act is None:
        act = ActionContext(ctx, h)
    total = Fraction(0)
    for cls in prime_order_classes(ctx):
        meet = int(np.intersect1d(cls.ranks, h.ranks, assume_unique=True).shape[0])
        if meet == 0:
            continue
        ratio = Fraction(meet, cls.size)
        # cross-check against the fixed-point route for the representative
        check = fpr(ctx, h, cls.representative, act)
        if check.value != ratio:
            raise InputError("class fpr mismatch between routes")
        total += cls.size * ratio**c
    return total


@dataclass
class MonteCarloEstimate:
    trials: int
    hits: int
    seed: int
    c: int

    @property
    def frequency(self) -> Fraction:
        return Fraction(self.hits, self.trials)


def _witness_ranks(ctx: GroupContext, core: np.ndarray) -> np.ndarray:
    """Elements outside the core whose p-th power lies in it, some prime p.

    A pointwise stabilizer strictly containing the core always contains such
    an element (prime order in the quotient); with a trivial core this is
    exactly the set of prime-order elements.
    """
    from .groupanalysis import is_prime

    classes = prime_order_classes(ctx)
    prime_ranks = np.concatenate([c.ranks for c in classes]) if classes else np.empty(0, np.uint32)
    if core.shape[0] == 1:
        return np.unique(prime_ranks)
    table = ctx.table
    orders, _ = table.orders_and_fingerprints()
    out = []
    core_set = set(core.tolist())
    for rank in range(ctx.order):
        if rank in core_set:
            continue
        o = int(orders[rank])
        for p in set(_prime_divisors(o)):
            power = table.perm(rank) ** p
            if table.rank_of(power) in core_set:
                out.append(rank)
                break
    return np.array(sorted(out), dtype=np.uint32)


def _prime_divisors(n):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _prime_order_fix_data(ctx: GroupContext, act: ActionContext):
    """Fixed-point sets of the non-base witness elements on the action."""
    core = act.core_ranks()
    prime_ranks = _witness_ranks(ctx, core)
    n = act.n
    fix_lists = {}
    for x in range(n):
        stab = act.stab_ranks(x)
        present = np.intersect1d(stab, prime_ranks, assume_unique=True)
        for r in present.tolist():
            fix_lists.setdefault(r, []).append(x)
    sets = {}
    for pts in fix_lists.values():
        sets.setdefault(tuple(pts), None)
    unique_sets = list(sets.keys())
    words = (n + 63) // 64
    bits = np.zeros((max(len(unique_sets), 1), words), dtype=np.uint64)
    point_lists = [[] for _ in range(n)]
    for sid, pts in enumerate(unique_sets):
        for p in pts:
            bits[sid, p >> 6] |= np.uint64(1) << np.uint64(p & 63)
            point_lists[p].append(sid)
    indptr = np.zeros(n + 1, dtype=np.int64)
    ids = []
    for p in range(n):
        indptr[p + 1] = indptr[p] + len(point_lists[p])
        ids.extend(point_lists[p])
    return indptr, np.array(ids if ids else [0], dtype=np.int32), bits


def monte_carlo_nonbase_estimate(ctx: GroupContext, h: SubgroupRecord, c: int,
                                 trials: int, seed: int,
                                 act: Optional[ActionContext] = None) -> MonteCarloEstimate:
    """Sampled frequency of c-tuples whose pointwise stabilizer exceeds the core.

    Reproducible: trial i draws from a stream keyed by (seed, i).
    """
    if act is None:
        act = ActionContext(ctx, h)
    n = act.n
    samples = np.empty((trials, c), dtype=np.int32)
    for i in range(trials):
        rng = np.random.default_rng([seed, i])
        samples[i] = rng.integers(0, n, size=c)
    indptr, ids, bits = _prime_order_fix_data(ctx, act)
    hits = mc_nonbase_count(samples, indptr, ids, bits)
    return MonteCarloEstimate(trials=trials, hits=hits, seed=seed, c=c)
