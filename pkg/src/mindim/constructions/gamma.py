"""The soluble group with alpha - Mindim >= 1: (A1 x A2 x A3) : X.

X is the 2-generated subgroup of D8^3 generated by (a,b,b) and (b,ab,a);
each A_i is a 2-dimensional module over GF(3) on which X acts through
X/N_i, a dihedral group of order 8 inside GL_2(3).  The semidirect product
acts faithfully on the 729 points of A1 + A2 + A3.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from ..errors import Budget, DEFAULT_BUDGET, InputError
from ..groupanalysis import GroupContext, SubgroupRecord, enumerate_elements, subgroup_intersection
from ..invariants import MaximalCollection, SearchResult, alpha, is_irredundant, mindim
from ..permcore import GeneratedGroup, Permutation, stabilizer_chain
from .certificate import WitnessCertificate


def _d8_perms():
    a = Permutation.from_cycles(4, [(0, 1, 2, 3)])
    b = Permutation.from_cycles(4, [(1, 3)])
    return a, b


def _triple_perm(parts):
    """Permutation of 12 points from a (D8, D8, D8) triple on 4 points each."""
    images = np.empty(12, dtype=np.int32)
    for blk, p in enumerate(parts):
        images[blk * 4 : blk * 4 + 4] = p.images + blk * 4
    return Permutation(images, validate=False)


def _quotient_iso_to_gl23(x_elements, n_elements, x_gens):
    """Images of the X generators under an isomorphism X/N -> D8 < GL_2(3).

    Brute force over generator image pairs in the matrix dihedral group,
    verified on the full multiplication table.
    """
    n_keys = {p.key() for p in n_elements}
    cosets = {}
    for p in x_elements:
        found = None
        for q_key, members in cosets.items():
            if (p * members[0].inverse()).key() in n_keys:
                found = q_key
                break
        if found is None:
            cosets[p.key()] = [p]
        else:
            cosets[found].append(p)
    coset_of = {}
    for rep_key, members in cosets.items():
        for m in members:
            coset_of[m.key()] = rep_key
    if len(cosets) != 8:
        raise InputError("quotient does not have order 8")

    # matrix D8 = <r, s> inside GL_2(3); elements as 2x2 integer matrices mod 3
    r = np.array([[0, 2], [1, 0]])
    s = np.array([[1, 0], [0, 2]])
    d8 = []
    seen = set()
    frontier = [np.eye(2, dtype=np.int64)]
    seen.add(frontier[0].tobytes())
    d8.append(frontier[0])
    while frontier:
        nxt = []
        for mcur in frontier:
            for g in (r, s):
                y = (mcur @ g) % 3
                if y.tobytes() not in seen:
                    seen.add(y.tobytes())
                    d8.append(y)
                    nxt.append(y)
        frontier = nxt
    if len(d8) != 8:
        raise InputError("matrix dihedral group has wrong order")

    reps = {}
    for rep_key, members in cosets.items():
        reps[rep_key] = members[0]
    for img1, img2 in itertools.product(d8, repeat=2):
        # map x1 -> img1, x2 -> img2; extend over words and check consistency
        assign = {coset_of[Permutation.identity(12).key()]: np.eye(2, dtype=np.int64)}
        ok = True
        frontier = [(Permutation.identity(12), np.eye(2, dtype=np.int64))]
        while frontier and ok:
            nxt = []
            for word, matrix in frontier:
                for gen, img in zip(x_gens, (img1, img2)):
                    w2 = word * gen
                    m2 = (matrix @ img) % 3
                    ckey = coset_of[w2.key()]
                    if ckey in assign:
                        if not np.array_equal(assign[ckey], m2):
                            ok = False
                            break
                    else:
                        assign[ckey] = m2
                        nxt.append((w2, m2))
                if not ok:
                    break
            frontier = nxt
        if ok and len(assign) == 8:
            images = {tuple(map(tuple, m)) for m in assign.values()}
            if len(images) == 8:
                return img1, img2
    raise InputError("no isomorphism onto the matrix dihedral group found")


def _vector_index(v):
    return int(v[0]) * 243 + int(v[1]) * 81 + int(v[2]) * 27 + int(v[3]) * 9 + int(v[4]) * 3 + int(v[5])


def _linear_perm(block_mats):
    """Permutation of 729 points from three 2x2 matrices acting blockwise."""
    images = np.empty(729, dtype=np.int32)
    coords = np.empty((729, 6), dtype=np.int64)
    r = np.arange(729)
    for i in range(6):
        coords[:, i] = (r // 3 ** (5 - i)) % 3
    out = np.empty_like(coords)
    for blk in range(3):
        m = block_mats[blk]
        seg = coords[:, 2 * blk : 2 * blk + 2]
        out[:, 2 * blk : 2 * blk + 2] = (seg @ np.asarray(m).T) % 3
    for i in range(729):
        images[i] = _vector_index(out[i])
    return Permutation(images, validate=True)


def _translation_perm(vec):
    images = np.empty(729, dtype=np.int32)
    coords = np.empty((729, 6), dtype=np.int64)
    r = np.arange(729)
    for i in range(6):
        coords[:, i] = (r // 3 ** (5 - i)) % 3
    shifted = (coords + np.asarray(vec)) % 3
    for i in range(729):
        images[i] = _vector_index(shifted[i])
    return Permutation(images, validate=True)


@dataclass
class GammaResult:
    ctx: GroupContext
    collection: MaximalCollection
    five_set: list
    alpha_result: SearchResult
    mindim_result: SearchResult
    certificate: WitnessCertificate


def soluble_gamma(budget: Budget = DEFAULT_BUDGET) -> GammaResult:
    """Build the order-23328 group, its 30 maximal subgroups, and run the
    alpha / Mindim computations with the explicit five-set certificate."""
    cert = WitnessCertificate("soluble-gamma", {}, {})
    a, b = _d8_perms()
    ab = a * b
    x1 = _triple_perm((a, b, b))
    x2 = _triple_perm((b, ab, a))
    x_group = GeneratedGroup(12, [x1, x2], label="X")
    x_chain = stabilizer_chain(x_group)
    cert.require("|X| = 32", x_chain.order == 32)

    y1 = x1 * x1
    y2 = x2 * x2
    y3 = x1.inverse() * x2.inverse() * x1 * x2
    a2 = a * a
    ident4 = Permutation.identity(4)
    cert.require("y1 = (a^2, 1, 1)", y1 == _triple_perm((a2, ident4, ident4)))
    cert.require("y2 = (1, 1, a^2)", y2 == _triple_perm((ident4, ident4, a2)))
    cert.require("y3 = (a^2, a^2, a^2)", y3 == _triple_perm((a2, a2, a2)))
    frat_x_chain = stabilizer_chain(GeneratedGroup(12, [y1, y2, y3]))
    cert.require("|Frat(X)| = 8", frat_x_chain.order == 8)

    x_elements = list(enumerate_elements(x_chain))
    n_groups = []
    for gens in ([y1, y2], [y1, y1 * y2 * y3], [y2, y1 * y2 * y3]):
        n_chain = stabilizer_chain(GeneratedGroup(12, gens))
        cert.require("|N_i| = 4", n_chain.order == 4)
        normal = all(
            n_chain.contains(h.conjugate(g)) for g in (x1, x2) for h in gens
        )
        cert.require("N_i normal in X", normal)
        n_groups.append([p for p in x_elements if n_chain.contains(p)])

    # module actions: X -> GL_2(3) with kernel N_i
    phis = []
    for n_elements in n_groups:
        img1, img2 = _quotient_iso_to_gl23(x_elements, n_elements, (x1, x2))
        phis.append((img1, img2))

    gx1 = _linear_perm([phis[i][0] for i in range(3)])
    gx2 = _linear_perm([phis[i][1] for i in range(3)])
    trans = [_translation_perm([1 if j == i else 0 for j in range(6)]) for i in range(6)]
    gamma_group = GeneratedGroup(729, trans + [gx1, gx2], label="Gamma")
    gamma_chain = stabilizer_chain(gamma_group)
    cert.require("|Gamma| = 23328", gamma_chain.order == 23328)
    ctx = GroupContext(gamma_group, gamma_chain, budget=budget)

    # lift the X elements to 729 points by closing over the lifted generators
    pairs = [(Permutation.identity(12), Permutation.identity(729))]
    x_lift = {Permutation.identity(12).key(): Permutation.identity(729)}
    frontier = pairs
    while frontier:
        nxt = []
        for word, img in frontier:
            for gen12, gen729 in ((x1, gx1), (x2, gx2)):
                w2 = word * gen12
                if w2.key() not in x_lift:
                    m2 = img * gen729
                    x_lift[w2.key()] = m2
                    nxt.append((w2, m2))
        frontier = nxt
    cert.require("X lifts faithfully to 729 points", len(x_lift) == 32)

    k_subgroups = []
    frat_gens_12 = [y1, y2, y3]
    for extra in (x1, x2, x1 * x2):
        gens12 = frat_gens_12 + [extra]
        k_chain = stabilizer_chain(GeneratedGroup(12, gens12))
        cert.require("|K| = 16", k_chain.order == 16)
        k_subgroups.append([x_lift[p.key()] for p in x_elements if k_chain.contains(p)])

    # class representatives of the four maximal families
    reps = []
    tags = []
    for j, k_elems in enumerate(k_subgroups):
        gens = trans + k_elems
        reps.append(ctx.subgroup(gens, tags=[f"B.K{j+1}"]))
        tags.append(f"B.K{j+1}")
    x_gens_729 = [gx1, gx2]
    for i in range(3):
        b_i_trans = [trans[k] for k in range(6) if k // 2 != i]
        gens = b_i_trans + x_gens_729
        reps.append(ctx.subgroup(gens, tags=[f"B{i+1}.X"]))
        tags.append(f"B{i+1}.X")
    for rec in reps[:3]:
        cert.require("M0-family subgroup has order 11664", rec.order == 11664)
    for rec in reps[3:]:
        cert.require("Mi-family subgroup has order 2592", rec.order == 2592)

    coll = MaximalCollection(ctx, reps, complete=True, self_normalizing=False)
    expanded = coll.expand()
    cert.require("30 maximal subgroups in total", len(expanded) == 30)

    # primitivity certificate for every one of the 30 subgroups
    all_primitive = True
    from ..permcore import is_primitive

    for mrec in expanded:
        ok, _ = is_primitive(mrec.coset_action())
        if not ok:
            all_primitive = False
            break
    cert.require("all 30 coset actions are primitive", all_primitive)
    cert.require("Frat(Gamma) = 1", coll.frattini_subgroup().order == 1)

    # the explicit five-set: B1X, B2X, B3X, B K1, B K2
    five = [reps[3], reps[4], reps[5], reps[0], reps[1]]
    meet45 = subgroup_intersection(reps[0], reps[1])
    cert.require("M4 cap M5 has order 9^3 * 8 = 5832", meet45.order == 5832)
    cert.require("five-set irredundant", is_irredundant(five))
    five_idx = [_index_of(expanded, rec) for rec in five]
    bits = coll.bits
    from ..invariants import _is_maximal_irredundant_bits, ranks_to_bits

    full_bits = None
    drop = []
    sets_bits = [bits[i] for i in five_idx]
    full_bits = sets_bits[0]
    for sb in sets_bits[1:]:
        full_bits = full_bits & sb
    for i in range(5):
        rest = None
        for j, sb in enumerate(sets_bits):
            if j == i:
                continue
            rest = sb if rest is None else rest & sb
        drop.append(rest)
    cert.require(
        "five-set is maximal irredundant",
        _is_maximal_irredundant_bits(bits, five_idx, full_bits, drop),
    )

    alpha_res = alpha(ctx, coll)
    cert.require("alpha >= 6", alpha_res.exact and alpha_res.value >= 6)
    mindim_res = mindim(ctx, coll)
    cert.require("Mindim <= 5", mindim_res.exact and mindim_res.value <= 5)
    cert.require("alpha - Mindim >= 1", alpha_res.value - mindim_res.value >= 1)

    cert.payload = {
        "order": 23328,
        "maximal_count": 30,
        "alpha": alpha_res.value,
        "mindim": mindim_res.value,
        "five_set_orders": [rec.order for rec in five],
    }
    return GammaResult(
        ctx=ctx,
        collection=coll,
        five_set=five,
        alpha_result=alpha_res,
        mindim_result=mindim_res,
        certificate=cert,
    )


def _index_of(expanded, rec):
    key = rec.ranks.tobytes()
    for i, m in enumerate(expanded):
        if m.ranks.tobytes() == key:
            return i
    raise InputError("subgroup not found in the expanded collection")
