"""Mindim, alpha, beta, Maxdim and the irredundancy calculus.

Search internals run on packed element bitsets (one bit per element rank of
the parent group); witnesses are reported as indices into the expanded
collection and always replay from the original rank sets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .basebounds import BaseWitness, base_size, regular_orbit_witness
from .errors import BudgetError, InputError
from .groupanalysis import GroupContext, SubgroupRecord, frattini, intersect_rank_sets
from .permcore import is_primitive


def ranks_to_bits(ranks: np.ndarray, order: int) -> np.ndarray:
    words = (order + 63) // 64
    bits = np.zeros(words, dtype=np.uint64)
    np.bitwise_or.at(bits, ranks >> 6, np.uint64(1) << (ranks.astype(np.uint64) & np.uint64(63)))
    return bits


def popcount(bits: np.ndarray) -> int:
    return int(np.bitwise_count(bits).sum())


def _subset_bits(a: np.ndarray, b: np.ndarray) -> bool:
    return bool(((a & b) == a).all())


@dataclass
class MaximalCollection:
    """Maximal subgroup class representatives plus their conjugate expansion."""

    ctx: GroupContext
    class_reps: list
    complete: bool
    self_normalizing: bool = True
    _expanded: Optional[list] = field(default=None, repr=False)
    _class_of: Optional[list] = field(default=None, repr=False)
    _bits: Optional[np.ndarray] = field(default=None, repr=False)
    _orders: Optional[np.ndarray] = field(default=None, repr=False)
    _frat: Optional[SubgroupRecord] = field(default=None, repr=False)

    def verify_primitivity(self):
        """Certify maximality: each representative's coset action is primitive."""
        for i, rep in enumerate(self.class_reps):
            action = rep.coset_action()
            ok, block = is_primitive(action)
            if not ok:
                raise InputError(f"class {i} is not maximal: coset action has block {block}")
        return True

    def expand(self):
        """All conjugates of all class representatives, in a canonical order."""
        if self._expanded is not None:
            return self._expanded
        table = self.ctx.table
        gens = self.ctx.group.generators
        expanded = []
        class_of = []
        for ci, rep in enumerate(self.class_reps):
            seen = {rep.ranks.tobytes(): rep.ranks}
            queue = [rep.ranks]
            while queue:
                cur = queue.pop()
                for g in gens:
                    conj = table.conjugate_ranks(cur, g)
                    key = conj.tobytes()
                    if key not in seen:
                        seen[key] = conj
                        queue.append(conj)
            conjugates = sorted(seen.values(), key=lambda r: r.tobytes())
            if self.self_normalizing:
                expected = self.ctx.order // rep.order
                if len(conjugates) != expected:
                    raise InputError(
                        f"class {ci}: {len(conjugates)} conjugates, expected index {expected}"
                    )
            for ranks in conjugates:
                expanded.append(self.ctx.subgroup_from_ranks(ranks, tags=list(rep.tags)))
                class_of.append(ci)
        self._expanded = expanded
        self._class_of = class_of
        return expanded

    @property
    def class_of(self):
        self.expand()
        return self._class_of

    @property
    def bits(self) -> np.ndarray:
        """Bitset matrix of the expanded collection (row i = subgroup i)."""
        if self._bits is None:
            expanded = self.expand()
            words = (self.ctx.order + 63) // 64
            mat = np.zeros((len(expanded), words), dtype=np.uint64)
            for i, m in enumerate(expanded):
                mat[i] = ranks_to_bits(m.ranks, self.ctx.order)
            self._bits = mat
            self._orders = np.array([m.order for m in expanded], dtype=np.int64)
        return self._bits

    @property
    def orders(self) -> np.ndarray:
        self.bits
        return self._orders

    def anchors(self):
        """One canonical expanded index per class."""
        out = []
        seen = set()
        for idx, ci in enumerate(self.class_of):
            if ci not in seen:
                seen.add(ci)
                out.append(idx)
        return out

    def frattini_subgroup(self) -> SubgroupRecord:
        if self._frat is None:
            self._frat = frattini(self.ctx, self.expand(), complete=self.complete)
        return self._frat


def is_irredundant(records) -> bool:
    """True iff dropping any single member strictly enlarges the intersection."""
    if len(records) == 0:
        raise InputError("irredundancy of the empty set is not defined here")
    sets = [r.ranks for r in records]
    keys = {s.tobytes() for s in sets}
    if len(keys) != len(sets):
        return False  # repeated subgroup
    full = intersect_rank_sets(sets)
    for i in range(len(sets)):
        rest = intersect_rank_sets([s for j, s in enumerate(sets) if j != i])
        if rest.shape[0] == full.shape[0]:
            return False
    return True


@dataclass
class SearchResult:
    value: Optional[int]
    interval: Optional[tuple]
    witness_indices: list
    note: str = ""

    @property
    def exact(self):
        return self.value is not None

    def lower_bound(self):
        if self.exact:
            return self.value
        return self.interval[0] if self.interval else None


def alpha(ctx: GroupContext, coll: MaximalCollection, max_size: int = 12) -> SearchResult:
    """Minimal number of maximal subgroups intersecting to the Frattini subgroup.

    Depth-first search anchored at class representatives; candidates in
    ascending subgroup order; branches pruned by |J meet C| >= |J||C|/|G|.
    """
    if not coll.complete:
        raise InputError("alpha requires a complete maximal collection")
    bits = coll.bits
    orders = coll.orders
    frat = coll.frattini_subgroup()
    target = frat.order
    g_order = ctx.order
    if g_order == target:
        raise InputError("degenerate group: Frattini subgroup is everything")
    order_iter = sorted(range(bits.shape[0]), key=lambda i: (orders[i], i))
    max_index = int(max(g_order // o for o in orders))
    anchors = coll.anchors()

    for size in range(2, max_size + 1):
        for anchor in anchors:
            found = _alpha_dfs(
                bits, orders, order_iter, bits[anchor], int(orders[anchor]), [anchor],
                size - 1, target, g_order, max_index,
            )
            if found is not None:
                return SearchResult(size, None, found)
    return SearchResult(None, (max_size + 1, None), [], note="alpha exceeded size cap")


def _alpha_dfs(bits, orders, order_iter, meet, meet_order, chosen, depth_left,
               target, g_order, max_index):
    if meet_order == target:
        return list(chosen)
    if depth_left == 0:
        return None
    if meet_order > target * (max_index ** depth_left):
        return None
    for pos, idx in enumerate(order_iter):
        if idx in chosen:
            continue
        if meet_order * int(orders[idx]) > g_order * target * (max_index ** (depth_left - 1)):
            continue
        new = meet & bits[idx]
        new_order = popcount(new)
        if new_order == meet_order:
            continue
        result = _alpha_dfs(bits, orders, order_iter, new, new_order, chosen + [idx],
                            depth_left - 1, target, g_order, max_index)
        if result is not None:
            return result
    return None


def beta(ctx: GroupContext, coll: MaximalCollection):
    """min b(G,H) over maximal H with core equal to the Frattini subgroup.

    Returns (value, class index, BaseWitness); (None, None, None) is the
    infinity marker for an empty eligible set.
    """
    from .basebounds import ActionContext

    frat = coll.frattini_subgroup()
    best = None
    for ci, rep in enumerate(coll.class_reps):
        act = ActionContext(ctx, rep)
        core = act.core_ranks()
        if core.shape[0] != frat.order or not np.array_equal(core, frat.ranks):
            continue  # not in M*
        witness_g, lengths = regular_orbit_witness(ctx, rep, rep)
        if rep.order == core.shape[0]:
            b, witness = 1, BaseWitness(rep.order, [], rep.order, rep.order)
        elif witness_g is not None and max(lengths) == rep.order // core.shape[0]:
            witness = BaseWitness(rep.order, [witness_g], core.shape[0], core.shape[0])
            if not witness.replay(ctx, rep):
                raise InputError("regular-orbit witness failed replay")
            b = 2
        else:
            b, witness = base_size(ctx, rep)
        if best is None or b < best[0]:
            best = (b, ci, witness)
    if best is None:
        return None, None, None
    return best


def _pair_nonextendable(bits, a_idx, b_idx):
    """True iff no third subgroup makes {a, b} irredundant (vectorized)."""
    a = bits[a_idx]
    b = bits[b_idx]
    j = a & b
    n = bits.shape[0]
    cond1 = (np.bitwise_and(bits, j) != j).any(axis=1)       # J not<= C
    ac = np.bitwise_and(bits, a)
    cond2 = (np.bitwise_and(ac, b) != ac).any(axis=1)        # A^C not<= B
    bc = np.bitwise_and(bits, b)
    cond3 = (np.bitwise_and(bc, a) != bc).any(axis=1)        # B^C not<= A
    ok = cond1 & cond2 & cond3
    ok[a_idx] = False
    ok[b_idx] = False
    return not bool(ok.any())


def _anchor_orbit_reps(ctx: GroupContext, coll: MaximalCollection, anchor_idx: int):
    """Orbit representatives of the anchor's conjugation action on the list.

    Conjugation by elements of the anchor fixes it and permutes the other
    subgroups, so pair checks only need one member per orbit.
    """
    expanded = coll.expand()
    anchor = expanded[anchor_idx]
    table = ctx.table
    key_to_idx = {m.ranks.tobytes(): i for i, m in enumerate(expanded)}
    gens = anchor.generators
    unseen = set(range(len(expanded)))
    reps = []
    while unseen:
        start = min(unseen)
        reps.append(start)
        unseen.discard(start)
        queue = [expanded[start].ranks]
        seen_keys = {expanded[start].ranks.tobytes()}
        while queue:
            cur = queue.pop()
            for g in gens:
                conj = table.conjugate_ranks(cur, g)
                key = conj.tobytes()
                if key not in seen_keys:
                    seen_keys.add(key)
                    idx = key_to_idx.get(key)
                    if idx is not None:
                        unseen.discard(idx)
                    queue.append(conj)
    return reps


def mindim(ctx: GroupContext, coll: MaximalCollection, exhaustive_limit: int = 64) -> SearchResult:
    """Minimal size of a maximal irredundant set of maximal subgroups.

    An alpha-pair (intersection = Frattini) settles Mindim = 2 outright;
    otherwise the pair-extension scan decides 2 versus >= 3, an irredundant
    alpha-triple settles 3, and small collections fall through to an
    exhaustive level search.
    """
    if not coll.complete:
        raise InputError("mindim requires a complete maximal collection")
    expanded = coll.expand()
    bits = coll.bits
    if len(expanded) == 1:
        return SearchResult(1, None, [0], note="unique maximal subgroup")

    res_alpha = alpha(ctx, coll)
    if res_alpha.exact and res_alpha.value == 2:
        return SearchResult(2, None, res_alpha.witness_indices,
                            note="alpha pair is maximal irredundant")

    # pair-extension scan: every pair extendable proves Mindim >= 3
    for anchor in coll.anchors():
        for b_idx in _anchor_orbit_reps(ctx, coll, anchor):
            if b_idx == anchor:
                continue
            if _pair_nonextendable(bits, anchor, b_idx):
                return SearchResult(2, None, [anchor, b_idx], note="non-extendable pair")

    if res_alpha.exact and res_alpha.value == 3:
        triple = [expanded[i] for i in res_alpha.witness_indices]
        if is_irredundant(triple):
            return SearchResult(3, None, res_alpha.witness_indices,
                                note="irredundant alpha triple")

    if len(expanded) > exhaustive_limit:
        return SearchResult(None, (3, None), [],
                            note="pair extension proves >= 3; exhaustive search skipped")
    return _mindim_exhaustive(bits, start_size=3)


def _mindim_exhaustive(bits, start_size):
    n = bits.shape[0]
    for size in range(start_size, n + 1):
        hit = _mindim_dfs(bits, size, 0, [], None, [])
        if hit is not None:
            return SearchResult(size, None, hit, note="exhaustive level search")
    raise InputError("no maximal irredundant set found (impossible)")


def _mindim_dfs(bits, size, start, chosen, full, drop):
    """Enumerate irredundant sets of exactly `size`, return a maximal one."""
    if len(chosen) == size:
        if _is_maximal_irredundant_bits(bits, chosen, full, drop):
            return list(chosen)
        return None
    n = bits.shape[0]
    remaining = size - len(chosen)
    for d in range(start, n - remaining + 1):
        s = bits[d]
        if full is None:
            hit = _mindim_dfs(bits, size, d + 1, [d], s, [None])
            if hit is not None:
                return hit
            continue
        if _subset_bits(full, s):
            continue
        new_full = full & s
        new_drop = []
        ok = True
        for rest in drop:
            meet = s if rest is None else rest & s
            if (meet == new_full).all():
                ok = False
                break
            new_drop.append(meet)
        if not ok:
            continue
        new_drop.append(full)
        hit = _mindim_dfs(bits, size, d + 1, chosen + [d], new_full, new_drop)
        if hit is not None:
            return hit
    return None


def _is_maximal_irredundant_bits(bits, chosen, full, drop):
    chosen_set = set(chosen)
    cond1 = (np.bitwise_and(bits, full) != full).any(axis=1)
    candidates = np.nonzero(cond1)[0]
    for d in candidates:
        if int(d) in chosen_set:
            continue
        s = bits[d]
        new_full = full & s
        ok = True
        for rest in drop:
            meet = s if rest is None else rest & s
            if (meet == new_full).all():
                ok = False
                break
        if ok:
            return False  # extends to a larger irredundant set
    return True


def maxdim(ctx: GroupContext, coll: MaximalCollection, node_budget: int = 2_000_000) -> SearchResult:
    """Maximal size of an irredundant set (exhaustive growth, budgeted).

    On budget exhaustion the best size found is returned as a lower bound.
    """
    if not coll.complete:
        raise InputError("maxdim requires a complete maximal collection")
    bits = coll.bits
    n = bits.shape[0]
    best = {"size": 0, "witness": [], "nodes": 0, "exhausted": False}

    def dfs(start, chosen, full, drop):
        best["nodes"] += 1
        if best["nodes"] > node_budget:
            best["exhausted"] = True
            return
        if len(chosen) > best["size"]:
            best["size"] = len(chosen)
            best["witness"] = list(chosen)
        for d in range(start, n):
            if best["exhausted"]:
                return
            s = bits[d]
            if full is None:
                dfs(d + 1, chosen + [d], s, [None])
                continue
            if _subset_bits(full, s):
                continue
            new_full = full & s
            new_drop = []
            ok = True
            for rest in drop:
                meet = s if rest is None else rest & s
                if (meet == new_full).all():
                    ok = False
                    break
                new_drop.append(meet)
            if not ok:
                continue
            new_drop.append(full)
            dfs(d + 1, chosen + [d], new_full, new_drop)

    dfs(0, [], None, [])
    if best["exhausted"]:
        return SearchResult(None, (best["size"], None), best["witness"], note="node budget hit")
    return SearchResult(best["size"], None, best["witness"])


def maxdim_lower_bound_from_base_witness(ctx: GroupContext, h: SubgroupRecord,
                                         witness: BaseWitness) -> int:
    """A minimal base of size c yields an irredundant set of c conjugates."""
    sets = [h.ranks] + [ctx.table.conjugate_ranks(h.ranks, g) for g in witness.conjugators]
    full = intersect_rank_sets(sets)
    for i in range(len(sets)):
        rest = intersect_rank_sets([s for j, s in enumerate(sets) if j != i])
        if rest.shape[0] == full.shape[0]:
            raise InputError("base witness conjugates are not irredundant")
    return len(sets)


@dataclass
class InvariantReport:
    """Results of the Mindim/alpha/beta computation for one group."""

    label: str
    mindim: SearchResult
    alpha: SearchResult
    beta_value: Optional[int]
    beta_class: Optional[int]
    beta_witness: Optional[BaseWitness]
    frattini_order: int
    maxdim: Optional[SearchResult] = None
    notes: list = field(default_factory=list)

    def check_chain(self):
        """Mindim <= alpha <= beta whenever all are exact."""
        if self.mindim.exact and self.alpha.exact:
            if not self.mindim.value <= self.alpha.value:
                raise InputError("invariant chain violated: Mindim > alpha")
            if self.beta_value is not None and not self.alpha.value <= self.beta_value:
                raise InputError("invariant chain violated: alpha > beta")
        return True


def compute_invariants(ctx: GroupContext, coll: MaximalCollection,
                       with_maxdim: bool = False) -> InvariantReport:
    a = alpha(ctx, coll)
    b_val, b_class, b_wit = beta(ctx, coll)
    m = mindim(ctx, coll)
    md = maxdim(ctx, coll) if with_maxdim else None
    report = InvariantReport(
        label=ctx.label or "?",
        mindim=m,
        alpha=a,
        beta_value=b_val,
        beta_class=b_class,
        beta_witness=b_wit,
        frattini_order=coll.frattini_subgroup().order,
        maxdim=md,
    )
    report.check_chain()
    return report


def minmax_compare(mindim_result: SearchResult, maxdim_result: SearchResult) -> str:
    """'holds' / 'fails' / 'inconclusive' for Mindim < Maxdim."""
    if mindim_result.exact:
        hi = mindim_result.value
    elif mindim_result.interval and mindim_result.interval[1] is not None:
        hi = mindim_result.interval[1]
    else:
        return "inconclusive"
    mlo = maxdim_result.lower_bound()
    if mlo is None:
        return "inconclusive"
    if hi < mlo:
        return "holds"
    if maxdim_result.exact and mindim_result.exact and mindim_result.value >= maxdim_result.value:
        return "fails"
    return "inconclusive"
