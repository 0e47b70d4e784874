"""Generate data/g2_roots.txt: root-subgroup matrices and commutator table.

Construction: the split octonion algebra in Zorn vector-matrix form over Z,
basis (E1, E2, u1, u2, u3, w1, w2, w3).  Root subgroups of the automorphism
group (type G2) are written down as explicit one-parameter automorphism
families; every map is verified symbolically to preserve the algebra
product.  The trace-zero part (basis u1..u3, w1..w3, d = E1 - E2) carries
the 7-dimensional representation whose matrices (entries polynomial in t)
are shipped, together with the Chevalley commutator table solved over
Q(t, u) and verified symbolically.

Root naming: simple roots a (short), b (long); the identification with the
sl3 weight model is eps1 = a, eps2 = a+b, eps3 = -(2a+b); long roots are
eps_i - eps_j.  The sign convention is the one induced by this octonion
model.

Run from the repository root:  python3 tools/make_g2_data.py
"""

from __future__ import annotations

import itertools
from pathlib import Path

import sympy as sp

t, u = sp.symbols("t u")

# basis indices
E1, E2, U1, U2, U3, W1, W2, W3 = range(8)
BASIS_NAMES = ["E1", "E2", "u1", "u2", "u3", "w1", "w2", "w3"]


def _cross(a, b):
    return (
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def octonion_mult(x, y):
    """Zorn vector-matrix product of two coordinate 8-vectors."""
    a1, b1 = x[0], x[1]
    v1, w1 = x[2:5], x[5:8]
    a2, b2 = y[0], y[1]
    v2, w2 = y[2:5], y[5:8]
    alpha = a1 * a2 + _dot(v1, w2)
    beta = b1 * b2 + _dot(w1, v2)
    cr_w = _cross(w1, w2)
    v = tuple(a1 * v2[i] + b2 * v1[i] - cr_w[i] for i in range(3))
    cr_v = _cross(v1, v2)
    w = tuple(a2 * w1[i] + b1 * w2[i] + cr_v[i] for i in range(3))
    return (alpha, beta) + v + w


def mat_vec(m, x):
    """Row convention: image of coordinate row-vector x under the map m."""
    return tuple(
        sp.expand(sum(x[i] * m[i][j] for i in range(len(x)))) for j in range(len(m[0]))
    )


def mat_mul(a, b):
    n = len(a)
    return [
        [sp.expand(sum(a[i][k] * b[k][j] for k in range(n))) for j in range(n)]
        for i in range(n)
    ]


def check_automorphism(m):
    """Verify the linear map with row matrix m preserves the Zorn product."""
    basis = [tuple(sp.Integer(i == j) for j in range(8)) for i in range(8)]
    images = [mat_vec(m, e) for e in basis]
    for i in range(8):
        for j in range(8):
            prod = octonion_mult(basis[i], basis[j])
            lhs = mat_vec(m, prod)
            rhs = octonion_mult(images[i], images[j])
            for c in range(8):
                if sp.expand(lhs[c] - rhs[c]) != 0:
                    raise AssertionError(f"not an automorphism at ({i},{j},{c})")


def identity8():
    return [[sp.Integer(i == j) for j in range(8)] for i in range(8)]


EPS = {1: (U1, W1), 2: (U2, W2), 3: (U3, W3)}
CROSS_SIGN = {}
for k, l in itertools.permutations((1, 2, 3), 2):
    ek = [0, 0, 0]
    ek[k - 1] = 1
    el = [0, 0, 0]
    el[l - 1] = 1
    cr = _cross(ek, el)
    m = next(i for i, c in enumerate(cr) if c != 0)
    CROSS_SIGN[(k, l)] = (m + 1, cr[m])


def short_positive(k, param):
    """x_{eps_k}(t): the short-root automorphism raising weights by eps_k."""
    m = identity8()
    uk, wk = EPS[k]
    m[E1][uk] += -param
    m[E2][uk] += param
    m[wk][E1] += param
    m[wk][E2] += -param
    m[wk][uk] += -param * param
    for l in (1, 2, 3):
        if l == k:
            continue
        midx, sign = CROSS_SIGN[(k, l)]
        ul = EPS[l][0]
        wm = EPS[midx][1]
        m[ul][wm] += -sign * param
    return m


TAU = identity8()
TAU[E1][E1] = TAU[E2][E2] = sp.Integer(0)
TAU[E1][E2] = TAU[E2][E1] = sp.Integer(1)
for k in (1, 2, 3):
    uk, wk = EPS[k]
    TAU[uk][uk] = TAU[wk][wk] = sp.Integer(0)
    TAU[uk][wk] = sp.Integer(-1)
    TAU[wk][uk] = sp.Integer(-1)


def short_negative(k, param):
    return mat_mul(mat_mul(TAU, short_positive(k, param)), TAU)


def long_root(i, j, param):
    """x_{eps_i - eps_j}(t): the sl3 elementary map u -> A u, w -> A^-T w."""
    a = sp.eye(3)
    a[i - 1, j - 1] = param
    a_inv_t = sp.eye(3)
    a_inv_t[j - 1, i - 1] = -param
    m = identity8()
    for col in (1, 2, 3):
        for row in (1, 2, 3):
            m[EPS[col][0]][EPS[row][0]] = a[row - 1, col - 1]
            m[EPS[col][1]][EPS[row][1]] = a_inv_t[row - 1, col - 1]
    return m


# root labels in terms of (coef_a, coef_b); eps1=a, eps2=a+b, eps3=-(2a+b)
ROOTS = {
    "a": ("short+", 1),
    "a+b": ("short+", 2),
    "-(2a+b)": ("short+", 3),
    "-a": ("short-", 1),
    "-(a+b)": ("short-", 2),
    "2a+b": ("short-", 3),
    "b": ("long", (2, 1)),
    "-b": ("long", (1, 2)),
    "3a+b": ("long", (1, 3)),
    "-(3a+b)": ("long", (3, 1)),
    "3a+2b": ("long", (2, 3)),
    "-(3a+2b)": ("long", (3, 2)),
}

ROOT_COORDS = {
    "a": (1, 0), "-a": (-1, 0), "b": (0, 1), "-b": (0, -1),
    "a+b": (1, 1), "-(a+b)": (-1, -1), "2a+b": (2, 1), "-(2a+b)": (-2, -1),
    "3a+b": (3, 1), "-(3a+b)": (-3, -1), "3a+2b": (3, 2), "-(3a+2b)": (-3, -2),
}


def root_matrix(label, param):
    kind, arg = ROOTS[label]
    if kind == "short+":
        return short_positive(arg, param)
    if kind == "short-":
        return short_negative(arg, param)
    return long_root(arg[0], arg[1], param)


def restrict_trace_zero(m):
    """7-dim restriction to (u1,u2,u3,w1,w2,w3,d), d = E1 - E2."""
    idx = [U1, U2, U3, W1, W2, W3]
    out = []
    basis7 = []
    for i in idx:
        e = [sp.Integer(0)] * 8
        e[i] = sp.Integer(1)
        basis7.append(tuple(e))
    d = [sp.Integer(0)] * 8
    d[E1], d[E2] = sp.Integer(1), sp.Integer(-1)
    basis7.append(tuple(d))
    for vec in basis7:
        img = mat_vec(m, vec)
        if sp.expand(img[E1] + img[E2]) != 0:
            raise AssertionError("image leaves the trace-zero subspace")
        row = [img[i] for i in idx] + [img[E1]]
        out.append([sp.expand(x) for x in row])
    return out


def poly_coeffs(expr, var, deg=2):
    p = sp.Poly(expr, var)
    out = [0] * (deg + 1)
    for (e,), c in p.terms():
        if e > deg:
            raise AssertionError("degree too large")
        out[e] = int(c)
    return out


def root_sum_chain(r, s):
    """Positive integer combinations i*r + j*s that are roots, Chevalley order."""
    out = []
    for i in range(1, 4):
        for j in range(1, 4):
            combo = (i * ROOT_COORDS[r][0] + j * ROOT_COORDS[s][0],
                     i * ROOT_COORDS[r][1] + j * ROOT_COORDS[s][1])
            for name, co in ROOT_COORDS.items():
                if co == combo:
                    out.append((i, j, name))
    out.sort(key=lambda x: (x[0] + x[1], x[0]))
    return out


def matrices_equal(a, b):
    return all(sp.expand(a[i][j] - b[i][j]) == 0 for i in range(7) for j in range(7))


def solve_commutator(r, s, seven):
    """[x_r(t), x_s(u)] = prod x_{ir+js}(C t^i u^j); find integer constants."""
    chain = root_sum_chain(r, s)
    com = mat_mul(
        mat_mul(seven(r, -t), seven(s, -u)),
        mat_mul(seven(r, t), seven(s, u)),
    )
    if not chain:
        if not matrices_equal(com, [[sp.Integer(i == j) for j in range(7)] for i in range(7)]):
            raise AssertionError(f"expected commuting pair {r}, {s}")
        return []
    for consts in itertools.product(range(-3, 4), repeat=len(chain)):
        prod = [[sp.Integer(i == j) for j in range(7)] for i in range(7)]
        for (i, j, name), c in zip(chain, consts):
            prod = mat_mul(prod, seven(name, sp.Integer(c) * t**i * u**j))
        if matrices_equal(com, prod):
            return [(i, j, name, c) for (i, j, name), c in zip(chain, consts)]
    raise AssertionError(f"no commutator constants found for {r}, {s}")


def main():
    print("verifying automorphism property of all 12 root maps ...")
    seven_cache = {}

    def seven(label, param):
        key = (label, sp.srepr(param))
        if key not in seven_cache:
            m8 = root_matrix(label, param)
            seven_cache[key] = restrict_trace_zero(m8)
        return seven_cache[key]

    s_extra = sp.Symbol("s")
    for label in ROOTS:
        m = root_matrix(label, t)
        check_automorphism(m)
        # one-parameter subgroup: x(t) x(s) = x(t+s)
        prod = mat_mul(root_matrix(label, t), root_matrix(label, s_extra))
        expected = root_matrix(label, t + s_extra)
        assert all(
            sp.expand(prod[i][j] - expected[i][j]) == 0 for i in range(8) for j in range(8)
        ), label
        print(f"  {label}: automorphism + one-parameter checks pass")

    print("solving commutator relations ...")
    lines = []
    pairs_done = 0
    for r in ROOTS:
        for s in ROOTS:
            if r == s:
                continue
            cr, cs = ROOT_COORDS[r], ROOT_COORDS[s]
            if cr[0] == -cs[0] and cr[1] == -cs[1]:
                continue  # opposite roots generate an SL2, no commutator line
            rel = solve_commutator(r, s, seven)
            parts = " ".join(f"{i} {j} {name} {c}" for i, j, name, c in rel)
            lines.append(f"commutator {r} ; {s} ; {parts}".rstrip())
            pairs_done += 1
    print(f"  {pairs_done} ordered pairs done")

    out = [
        "# G2 root-subgroup data: 7-dim representation on trace-zero split octonions",
        "# basis order: u1 u2 u3 w1 w2 w3 d   (d spans the characteristic-2 radical)",
        "# matrix rows are basis images; entries are t-polynomials 'c0,c1,c2'",
        "# sign convention: the split octonion (Zorn) model; one valid Chevalley choice",
    ]
    for label in ROOTS:
        m = seven(label, t)
        out.append(f"root {label}")
        for row in m:
            out.append(" ".join(",".join(map(str, poly_coeffs(e, t))) for e in row))
    out.extend(lines)
    path = Path(__file__).resolve().parent.parent / "src" / "mindim" / "data" / "g2_roots.txt"
    path.write_text("\n".join(out) + "\n")
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
