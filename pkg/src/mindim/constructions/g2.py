"""The exceptional group G2(q) in characteristic 2 and its base-2 witness.

Root subgroup matrices come from the shipped data file (7-dimensional
representation on trace-zero split octonions over Z); reducing mod 2 and
quotienting the radical gives the 6-dimensional symplectic representation.
Loading re-verifies the Chevalley commutator relations from the shipped
table before any group is built.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Optional

import numpy as np

from ..errors import Budget, DEFAULT_BUDGET, InputError, InternalCheckError
from ..gfq import FieldContext, field_of_order, matrix_to_perm, minv, mmul, mmul_batch, mmul_pair, eye
from ..groupanalysis import GroupContext, SubgroupRecord, enumerate_elements
from ..permcore import GeneratedGroup, Permutation, stabilizer_chain
from .certificate import WitnessCertificate

H_ROOTS = ("3a+2b", "-(3a+2b)", "a", "-a")
SIMPLE_ROOTS = ("a", "-a", "b", "-b")


@lru_cache(maxsize=1)
def _load_data():
    text = resources.files("mindim.data").joinpath("g2_roots.txt").read_text()
    mats = {}
    commutators = []
    lines = text.splitlines()
    i = 0
    while i < len(lines):
        line = lines[i]
        if line.startswith("root "):
            label = line[5:].strip()
            rows = []
            for _ in range(7):
                i += 1
                rows.append([[int(c) for c in entry.split(",")] for entry in lines[i].split()])
            mats[label] = np.array(rows, dtype=np.int64)  # (7, 7, 3)
        elif line.startswith("commutator "):
            body = line[len("commutator "):]
            r, s, parts = [p.strip() for p in body.split(";")]
            factors = []
            toks = parts.split()
            for j in range(0, len(toks), 4):
                factors.append((int(toks[j]), int(toks[j + 1]), toks[j + 2], int(toks[j + 3])))
            commutators.append((r, s, factors))
        i += 1
    if len(mats) != 12:
        raise InternalCheckError("g2 data file must define 12 root subgroups")
    return mats, commutators


def root_element(ctx: FieldContext, label: str, tcode: int) -> np.ndarray:
    """x_label(t) as a 6x6 matrix over GF(q), q even."""
    if ctx.p != 2:
        raise InputError("the shipped 6-dimensional reduction is for characteristic 2")
    mats, _ = _load_data()
    poly = mats[label]
    t2 = int(ctx.mul(tcode, tcode))
    out = np.zeros((7, 7), dtype=np.uint16)
    powers = (1, tcode, t2)
    for r in range(7):
        for c in range(7):
            val = 0
            for k in range(3):
                if poly[r, c, k] % 2:
                    val = int(ctx.add(val, powers[k]))
            out[r, c] = val
    if out[6, 6] != 1 or out[6, :6].any():
        raise InternalCheckError("radical line is not preserved mod 2")
    return np.ascontiguousarray(out[:6, :6])


@lru_cache(maxsize=8)
def _verify_commutator_relations(q: int) -> bool:
    """Check every shipped commutator relation over GF(q), all t, u."""
    ctx = field_of_order(q)
    _, commutators = _load_data()
    cache = {}

    def elem(label, tcode):
        key = (label, tcode)
        if key not in cache:
            cache[key] = root_element(ctx, label, tcode)
        return cache[key]

    for r, s, factors in commutators:
        for t in range(q):
            for u in range(q):
                xr = elem(r, t)
                xs = elem(s, u)
                lhs = mmul(ctx, mmul(ctx, mmul(ctx, minv(ctx, xr), minv(ctx, xs)), xr), xs)
                rhs = eye(ctx, 6)
                for i, j, name, const in factors:
                    if const % 2 == 0:
                        continue
                    arg = int(ctx.mul(ctx.pow(t, i), ctx.pow(u, j)))
                    rhs = mmul(ctx, rhs, elem(name, arg))
                if not np.array_equal(lhs, rhs):
                    raise InternalCheckError(
                        f"commutator relation [{r}, {s}] fails over GF({q}) at t={t}, u={u}"
                    )
    return True


def _root_subgroup_gens(ctx, labels):
    gens = []
    for label in labels:
        for k in range(ctx.f):
            gens.append(root_element(ctx, label, k + 1))  # t = x^k
    return gens


def _matrix_closure(ctx, gens, limit):
    """All products of the generators (byte-keyed breadth-first closure)."""
    ident = eye(ctx, gens[0].shape[0])
    seen = {ident.tobytes(): ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = mmul(ctx, x, g)
                key = y.tobytes()
                if key not in seen:
                    if len(seen) >= limit:
                        raise InputError("matrix closure exceeded its limit")
                    seen[key] = y
                    nxt.append(y)
        frontier = nxt
    return list(seen.values())


@dataclass
class G2Result:
    q: int
    group: Optional[GeneratedGroup]
    group_order: Optional[int]
    h_record: Optional[SubgroupRecord]
    h_order: int
    g_matrix: np.ndarray
    g_perm: Optional[Permutation]
    intersection_order: int
    certificate: WitnessCertificate


def g2_group(q: int, budget: Budget = DEFAULT_BUDGET) -> G2Result:
    """Build G2(q), the L2(q) x L2(q) subgroup H and the conjugator g.

    Verifies the commutator self-check, the factor structure of H, and
    H cap H^g = 1.  For q in {2, 4} the check runs both at matrix level and
    through a permutation stabilizer chain for H^g; at q = 8 the permutation
    degree 8^6 - 1 exceeds the default budget and the exhaustive matrix
    route alone is used.
    """
    if q not in (2, 4, 8):
        raise InputError("g2_group supports q in {2, 4, 8}")
    ctx = field_of_order(q)
    cert = WitnessCertificate("g2", {"q": q}, {})
    cert.require("chevalley commutator relations", _verify_commutator_relations(q))

    factor1 = _root_subgroup_gens(ctx, ("3a+2b", "-(3a+2b)"))
    factor2 = _root_subgroup_gens(ctx, ("a", "-a"))
    sl2_order = q * (q * q - 1)
    f1 = _matrix_closure(ctx, factor1, sl2_order + 1)
    f2 = _matrix_closure(ctx, factor2, sl2_order + 1)
    cert.require("long-root factor has order q(q^2-1)", len(f1) == sl2_order)
    cert.require("short-root factor has order q(q^2-1)", len(f2) == sl2_order)
    commute = all(
        np.array_equal(mmul(ctx, a, b), mmul(ctx, b, a)) for a in factor1 for b in factor2
    )
    cert.require("the two factors commute elementwise", commute)

    # g = x_b(1) x_{a+b}(1) x_{-b}(1), composed left to right
    g_mat = mmul(ctx, mmul(ctx, root_element(ctx, "b", 1), root_element(ctx, "a+b", 1)),
                 root_element(ctx, "-b", 1))

    # exhaustive matrix-level intersection: enumerate H = f1 * f2 (the
    # factors commute and meet trivially), conjugate, intersect key sets
    f1_arr = np.stack(f1)
    f2_arr = np.stack(f2)
    h_count = len(f1) * len(f2)
    budget.check_enumeration(h_count, "H enumeration")
    blocks = []
    for i in range(f1_arr.shape[0]):
        blocks.append(mmul_batch(ctx, f2_arr, f1_arr[i]))
    h_all = np.concatenate(blocks)
    cert.require("|H| = (q(q^2-1))^2", h_all.shape[0] == sl2_order**2)
    h_keys = np.sort(
        h_all.reshape(h_count, -1).view(np.dtype((np.void, h_all.dtype.itemsize * 36))).ravel()
    )
    cert.require("H elements are pairwise distinct", np.unique(h_keys).shape[0] == h_count)
    ginv = minv(ctx, g_mat)
    conj = mmul_batch(ctx, _left_mul_batch(ctx, ginv, h_all), g_mat)  # g^-1 h g
    conj_keys = np.sort(
        conj.reshape(h_count, -1).view(np.dtype((np.void, conj.dtype.itemsize * 36))).ravel()
    )
    inter = np.intersect1d(h_keys, conj_keys)
    matrix_meet = int(inter.shape[0])
    cert.record("matrix route: H cap H^g trivial", matrix_meet == 1)

    group = None
    group_order = None
    h_record = None
    g_perm = None
    perm_meet = None
    if q**6 - 1 <= budget.max_degree:
        gens = _root_subgroup_gens(ctx, SIMPLE_ROOTS)
        group = matrix_to_perm(gens, ctx, budget=budget, label=f"G2({q})")
        chain = stabilizer_chain(group, budget=budget)
        group_order = chain.order
        expected = q**6 * (q**6 - 1) * (q**2 - 1)
        cert.require("|G| = q^6 (q^6-1)(q^2-1)", group_order == expected)
        h_group = matrix_to_perm(factor1 + factor2, ctx, budget=budget, label=f"H({q})")
        h_chain = stabilizer_chain(h_group, budget=budget)
        cert.require("|H| as permutation group", h_chain.order == sl2_order**2)
        gctx = GroupContext(group, chain, budget=budget)
        g_perm = matrix_to_perm([g_mat], ctx, budget=budget).generators[0]
        cert.require("g lies in G", chain.contains(g_perm))
        # chain for H^g, then membership-test every element of H
        hg_gens = [h.conjugate(g_perm) for h in h_group.generators]
        hg_chain = stabilizer_chain(GeneratedGroup(group.degree, hg_gens), budget=budget)
        count = 0
        for el in enumerate_elements(h_chain, budget):
            if hg_chain.contains(el):
                count += 1
        perm_meet = count
        cert.record("perm route: H cap H^g trivial", perm_meet == 1)
        cert.require("matrix and permutation routes agree", perm_meet == matrix_meet)
        if group_order <= budget.max_elements:
            h_record = SubgroupRecord(
                GroupContext(group, chain, budget=budget), h_group.generators,
                h_chain.order, tags=["L2(q) x L2(q)"],
            )
            h_record._chain = h_chain

    cert.payload = {
        "q": q,
        "group_order": group_order,
        "h_order": sl2_order**2,
        "g_matrix": g_mat.astype(int).tolist(),
        "intersection_order": matrix_meet,
        "perm_route_used": perm_meet is not None,
    }
    cert.require("H cap H^g = 1", matrix_meet == 1)
    return G2Result(
        q=q,
        group=group,
        group_order=group_order,
        h_record=h_record,
        h_order=sl2_order**2,
        g_matrix=g_mat,
        g_perm=g_perm,
        intersection_order=matrix_meet,
        certificate=cert,
    )


def _left_mul_batch(ctx, left, batch):
    """out[i] = left @ batch[i]."""
    out = mmul_pair(ctx, np.broadcast_to(left, batch.shape).copy(), batch)
    return out
