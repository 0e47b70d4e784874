"""GF(q) arithmetic, matrices, forms, subspaces and linear solvers.

Field elements are codes: 0 is zero and code k+1 is x^k for the fixed
primitive root x, so code order is the discrete-log order with 0 first.
Tables come from the shipped primitive-polynomial file, making the
arithmetic bit-identical across runs and machines.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Optional

import numpy as np

from .errors import Budget, DEFAULT_BUDGET, InputError
from .permcore import GeneratedGroup, Permutation

_DENSE_TABLE_Q = 1024  # dense q x q add/mul tables below this size


@lru_cache(maxsize=1)
def _poly_table():
    text = resources.files("mindim.data").joinpath("primitive_polys.txt").read_text()
    table = {}
    for line in text.splitlines():
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        p, f = int(parts[0]), int(parts[1])
        table[(p, f)] = [int(c) for c in parts[2:]]
    return table


@lru_cache(maxsize=64)
def field(p: int, f: int = 1) -> "FieldContext":
    return FieldContext(p, f)


@lru_cache(maxsize=64)
def field_of_order(q: int) -> "FieldContext":
    p, f = _split_prime_power(q)
    return field(p, f)


def _split_prime_power(q):
    if q < 2:
        raise InputError(f"{q} is not a prime power")
    for p in range(2, q + 1):
        if q % p == 0:
            f = 0
            m = q
            while m % p == 0:
                m //= p
                f += 1
            if m != 1:
                raise InputError(f"{q} is not a prime power")
            return p, f
    raise InputError(f"{q} is not a prime power")


class FieldContext:
    """GF(p^f) with exp/log tables over a fixed primitive polynomial."""

    def __init__(self, p: int, f: int):
        if f < 1:
            raise InputError("extension degree must be >= 1")
        poly = _poly_table().get((p, f))
        if poly is None:
            raise InputError(f"no shipped primitive polynomial for p={p}, f={f}")
        self.p = p
        self.f = f
        self.q = p**f
        self.poly = poly
        # exp[k] = base-p digit encoding of x^k, k in [0, q-2]
        exp = np.zeros(self.q - 1, dtype=np.int64)
        cur = [1] + [0] * (f - 1)
        for k in range(self.q - 1):
            exp[k] = sum(c * p**i for i, c in enumerate(cur))
            # multiply by x modulo the primitive polynomial
            carry = cur[-1]
            cur = [0] + cur[:-1]
            if carry:
                for i in range(f):
                    cur[i] = (cur[i] - carry * poly[i]) % p
        self._exp_encoding = exp
        log = np.full(self.q, -1, dtype=np.int64)
        log[exp] = np.arange(self.q - 1)
        self._log_encoding = log
        self.zero = 0
        self.one = 1
        self._build_tables()

    def _build_tables(self):
        q = self.q
        if q <= _DENSE_TABLE_Q:
            enc = np.zeros(q, dtype=np.int64)
            enc[1:] = self._exp_encoding
            dec = np.zeros(self.p**self.f, dtype=np.int64)
            dec[self._exp_encoding] = np.arange(1, q)
            a = enc[:, None]
            b = enc[None, :]
            # digitwise addition in base p
            total = np.zeros_like(a + b)
            pa, pb = a.copy(), b.copy()
            scale = 1
            for _ in range(self.f):
                total += scale * ((pa % self.p + pb % self.p) % self.p)
                pa //= self.p
                pb //= self.p
                scale *= self.p
            self.add_table = dec[total].astype(np.uint16)
            mul = np.zeros((q, q), dtype=np.uint16)
            ks = np.arange(q - 1)
            mul[1:, 1:] = ((ks[:, None] + ks[None, :]) % (q - 1) + 1).astype(np.uint16)
            self.mul_table = mul
            self.neg_table = self.add_table[0] if self.p == 2 else None
            if self.p != 2:
                half = (q - 1) // 2
                neg = np.zeros(q, dtype=np.uint16)
                neg[1:] = ((ks + half) % (q - 1) + 1).astype(np.uint16)
                self.neg_table = neg
        else:
            # Zech logarithms: zech[k] = log(1 + x^k), -1 when 1 + x^k = 0
            enc = self._exp_encoding
            dec = self._log_encoding
            one_plus = np.zeros(self.q - 1, dtype=np.int64)
            # add 1 digitwise
            vals = enc.copy()
            low = vals % self.p
            one_plus = vals - low + (low + 1) % self.p
            self.zech = dec[one_plus]  # -1 where sum is zero
            self.add_table = None
            self.mul_table = None
            half = (self.q - 1) // 2
            ks = np.arange(self.q - 1)
            neg = np.zeros(self.q, dtype=np.uint16)
            if self.p == 2:
                neg[1:] = ks + 1
            else:
                neg[1:] = ((ks + half) % (self.q - 1) + 1).astype(np.uint16)
            self.neg_table = neg

    # -- scalar/array operations (codes) ------------------------------------

    def add(self, a, b):
        if self.add_table is not None:
            return self.add_table[a, b]
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        out = np.where(a == 0, b, 0) + np.where(b == 0, a, 0)
        both = (a != 0) & (b != 0)
        if np.any(both):
            i = a[both] - 1
            j = b[both] - 1
            lo = np.minimum(i, j)
            d = np.maximum(i, j) - lo
            z = self.zech[d]
            res = np.where(z < 0, 0, (lo + z) % (self.q - 1) + 1)
            out = np.asarray(out)
            out[both] = res
        return out

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def neg(self, a):
        return self.neg_table[a]

    def mul(self, a, b):
        if self.mul_table is not None:
            return self.mul_table[a, b]
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        nz = (a != 0) & (b != 0)
        out = np.zeros(np.broadcast(a, b).shape, dtype=np.int64)
        out[nz] = (a[nz] - 1 + b[nz] - 1) % (self.q - 1) + 1
        return out

    def inv(self, a):
        a = int(a)
        if a == 0:
            raise InputError("division by zero in GF(q)")
        return (self.q - 1 - (a - 1)) % (self.q - 1) + 1

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, n):
        a = int(a)
        if a == 0:
            return 0 if n else 1
        return (a - 1) * n % (self.q - 1) + 1

    def frobenius(self, a):
        return self.pow(a, self.p)

    def is_square(self, a):
        if self.p == 2 or a == 0:
            return True
        return (int(a) - 1) % 2 == 0

    def element_order(self, a):
        a = int(a)
        if a == 0:
            raise InputError("zero has no multiplicative order")
        return (self.q - 1) // math.gcd(a - 1, self.q - 1)

    def elements(self):
        return range(self.q)

    def __repr__(self):
        return f"GF({self.q})"


# ---------------------------------------------------------------------------
# matrices (numpy uint16 code arrays, row vectors act on the right: v -> v M)


def zeros(ctx, r, c):
    return np.zeros((r, c), dtype=np.uint16)


def eye(ctx, n):
    m = np.zeros((n, n), dtype=np.uint16)
    np.fill_diagonal(m, 1)
    return m


def mat(ctx, rows):
    return np.array(rows, dtype=np.uint16)


def madd(ctx, a, b):
    return ctx.add(a, b).astype(np.uint16)


def mneg(ctx, a):
    return ctx.neg(a).astype(np.uint16)


def msub(ctx, a, b):
    return ctx.add(a, ctx.neg(b)).astype(np.uint16)


def mmul(ctx, a, b):
    """Matrix product over GF(q); also handles vector @ matrix."""
    a = np.asarray(a, dtype=np.uint16)
    b = np.asarray(b, dtype=np.uint16)
    a2 = a[None, :] if a.ndim == 1 else a
    b2 = b[:, None] if b.ndim == 1 else b
    out = np.zeros((a2.shape[0], b2.shape[1]), dtype=np.uint16)
    for k in range(a2.shape[1]):
        term = ctx.mul(a2[:, k][:, None], b2[k, :][None, :]).astype(np.uint16)
        out = ctx.add(out, term).astype(np.uint16)
    if a.ndim == 1 and b.ndim == 1:
        return out[0, 0]
    if a.ndim == 1:
        return out[0]
    if b.ndim == 1:
        return out[:, 0]
    return out


def mmul_batch(ctx, batch, b):
    """out[i] = batch[i] @ b for a 3-d batch of code matrices."""
    from .kernels import gf_matmul_batch

    if ctx.mul_table is None:
        raise InputError("batched products need dense field tables (q too large)")
    return gf_matmul_batch(batch, b, ctx.mul_table, ctx.add_table)


def mmul_pair(ctx, a_batch, b_batch):
    """out[i] = a_batch[i] @ b_batch[i]."""
    from .kernels import gf_matmul_pair

    if ctx.mul_table is None:
        raise InputError("batched products need dense field tables (q too large)")
    return gf_matmul_pair(a_batch, b_batch, ctx.mul_table, ctx.add_table)


def quadratic_preservers_mask(space: FormSpace, batch):
    """Boolean mask of batch matrices preserving the space's form."""
    ctx = space.ctx
    t = space.quad if space.kind == "quadratic" else None
    if t is None:
        g = space.gram
        s = mmul_pair(ctx, mmul_batch(ctx, batch, g), np.swapaxes(batch, 1, 2).copy())
        return (s == g[None, :, :]).all(axis=(1, 2))
    s = mmul_pair(ctx, mmul_batch(ctx, batch, t), np.swapaxes(batch, 1, 2).copy())
    d = ctx.add(s, ctx.neg(t)[None, :, :])
    diag_ok = ~np.any(d[:, np.arange(space.n), np.arange(space.n)], axis=1)
    skew_ok = (d == ctx.neg(np.swapaxes(d, 1, 2))).all(axis=(1, 2))
    return diag_ok & skew_ok


def mpow(ctx, a, n):
    result = eye(ctx, a.shape[0])
    sq = a
    while n:
        if n & 1:
            result = mmul(ctx, result, sq)
        sq = mmul(ctx, sq, sq)
        n >>= 1
    return result


def rref(ctx, m):
    """Reduced row echelon form; returns (rref matrix, pivot columns)."""
    m = np.array(m, dtype=np.uint16)
    rows, cols = m.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        nz = np.nonzero(m[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            m[[r, i]] = m[[i, r]]
        inv = ctx.inv(int(m[r, c]))
        m[r] = ctx.mul(m[r], inv).astype(np.uint16)
        for j in range(rows):
            if j != r and m[j, c]:
                factor = ctx.neg(int(m[j, c]))
                m[j] = ctx.add(m[j], ctx.mul(m[r], factor)).astype(np.uint16)
        pivots.append(c)
        r += 1
    return m[:r], pivots


def nullspace(ctx, m):
    """Basis (rows) of {v : v m^T = 0}, i.e. right-null of m^T...

    Concretely: rows v of the returned matrix satisfy m @ v^T = 0 when m is
    treated as a stack of constraint rows over the same coordinates.
    """
    m = np.asarray(m, dtype=np.uint16)
    rows, cols = m.shape
    r, pivots = rref(ctx, m)
    free = [c for c in range(cols) if c not in pivots]
    basis = np.zeros((len(free), cols), dtype=np.uint16)
    for i, c in enumerate(free):
        basis[i, c] = 1
        for j, pc in enumerate(pivots):
            basis[i, pc] = ctx.neg(int(r[j, c]))
    return basis


def rank(ctx, m):
    return rref(ctx, m)[0].shape[0]


def det(ctx, m):
    m = np.array(m, dtype=np.uint16)
    n = m.shape[0]
    result = 1
    for c in range(n):
        nz = np.nonzero(m[c:, c])[0]
        if nz.size == 0:
            return 0
        i = c + int(nz[0])
        if i != c:
            m[[c, i]] = m[[i, c]]
            result = ctx.neg(result)
        result = ctx.mul(result, int(m[c, c]))
        inv = ctx.inv(int(m[c, c]))
        for j in range(c + 1, n):
            if m[j, c]:
                factor = ctx.neg(ctx.mul(int(m[j, c]), inv))
                m[j] = ctx.add(m[j], ctx.mul(m[c], factor)).astype(np.uint16)
    return int(result)


def minv(ctx, m):
    n = m.shape[0]
    aug = np.hstack([np.asarray(m, dtype=np.uint16), eye(ctx, n)])
    r, pivots = rref(ctx, aug)
    if pivots[: n] != list(range(n)) or r.shape[0] < n:
        raise InputError("matrix is not invertible")
    return np.ascontiguousarray(r[:, n:])


def row_space_contains(ctx, basis, v):
    stacked = np.vstack([basis, v])
    return rank(ctx, stacked) == basis.shape[0]


# ---------------------------------------------------------------------------
# forms and subspaces


@dataclass
class FormSpace:
    """A vector space with a symplectic, symmetric or quadratic form.

    Quadratic forms are stored as an upper-triangular matrix `quad` with
    Q(v) = v quad v^T; the polarization gram = quad + quad^T works in every
    characteristic (alternating with zero diagonal in characteristic 2).
    """

    ctx: FieldContext
    n: int
    kind: str                      # "symplectic" | "symmetric" | "quadratic"
    gram: np.ndarray
    quad: Optional[np.ndarray] = None
    labels: Optional[list] = None

    def __post_init__(self):
        if self.kind not in ("symplectic", "symmetric", "quadratic"):
            raise InputError(f"unknown form kind {self.kind!r}")
        if self.kind == "quadratic" and self.quad is None:
            raise InputError("quadratic form requires the triangular matrix")
        if self.kind == "symplectic":
            if det(self.ctx, self.gram) == 0:
                raise InputError("symplectic form must be nondegenerate")
            if not np.array_equal(self.gram, mneg(self.ctx, self.gram.T)) or np.any(np.diag(self.gram)):
                raise InputError("symplectic form must be alternating")

    def bilinear(self, u, v):
        return int(mmul(self.ctx, mmul(self.ctx, u, self.gram), np.asarray(v, dtype=np.uint16)))

    def quadratic(self, v):
        if self.kind == "quadratic":
            return int(mmul(self.ctx, mmul(self.ctx, v, self.quad), np.asarray(v, dtype=np.uint16)))
        if self.kind == "symmetric":
            if self.ctx.p == 2:
                raise InputError("characteristic 2 needs an explicit quadratic form")
            b = self.bilinear(v, v)
            two = int(self.ctx.add(1, 1))
            return int(self.ctx.div(b, two)) if b else 0
        raise InputError("no quadratic form on a symplectic space")

    def quadratic_batch(self, vs):
        """Q values for a batch of row vectors."""
        m = self.quad if self.kind == "quadratic" else self.gram
        prods = mmul(self.ctx, vs, m)
        vals = self.ctx.mul(prods, vs)
        total = np.zeros(vs.shape[0], dtype=np.uint16)
        for k in range(vs.shape[1]):
            total = self.ctx.add(total, vals[:, k]).astype(np.uint16)
        if self.kind == "quadratic":
            return total
        two_inv = self.ctx.inv(self.ctx.add(1, 1))
        return self.ctx.mul(total, two_inv).astype(np.uint16)

    def preserves_bilinear(self, g):
        lhs = mmul(self.ctx, mmul(self.ctx, g, self.gram), g.T)
        return np.array_equal(lhs, self.gram)

    def preserves_quadratic(self, g):
        if self.kind != "quadratic":
            return self.preserves_bilinear(g)
        s = mmul(self.ctx, mmul(self.ctx, g, self.quad), g.T)
        d = msub(self.ctx, s, self.quad)
        if np.any(np.diag(d)):
            return False
        return np.array_equal(d, mneg(self.ctx, d.T))

    def subspace(self, rows) -> "Subspace":
        return Subspace(self, rows)


def symplectic_space(ctx, m, labels=None) -> FormSpace:
    """Standard symplectic 2m-space: basis e_1..e_m, f_1..f_m, (e_i,f_i)=1."""
    n = 2 * m
    gram = np.zeros((n, n), dtype=np.uint16)
    one = 1
    for i in range(m):
        gram[i, m + i] = one
        gram[m + i, i] = ctx.neg(one)
    if labels is None:
        labels = [f"e{i+1}" for i in range(m)] + [f"f{i+1}" for i in range(m)]
    return FormSpace(ctx, n, "symplectic", gram, labels=labels)


def quadratic_space(ctx, n, quad, labels=None) -> FormSpace:
    quad = np.asarray(quad, dtype=np.uint16)
    gram = madd(ctx, quad, quad.T)
    return FormSpace(ctx, n, "quadratic", gram, quad=quad, labels=labels)


class Subspace:
    """Row space in canonical reduced-row-echelon form."""

    def __init__(self, space: FormSpace, rows):
        self.space = space
        self.ctx = space.ctx
        rows = np.asarray(rows, dtype=np.uint16)
        if rows.ndim == 1:
            rows = rows[None, :]
        if rows.size and rows.shape[1] != space.n:
            raise InputError("subspace vectors must match the ambient dimension")
        if rows.size == 0:
            self.basis = np.zeros((0, space.n), dtype=np.uint16)
        else:
            self.basis, _ = rref(self.ctx, rows)

    @property
    def dim(self):
        return self.basis.shape[0]

    def key(self):
        return self.basis.tobytes()

    def __eq__(self, other):
        return isinstance(other, Subspace) and self.space is other.space and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def contains(self, v):
        if self.dim == 0:
            return not np.any(v)
        return row_space_contains(self.ctx, self.basis, np.asarray(v, dtype=np.uint16))

    def contains_subspace(self, other):
        return all(self.contains(r) for r in other.basis)

    def sum(self, other):
        self._check(other)
        return Subspace(self.space, np.vstack([self.basis, other.basis]))

    def intersection(self, other):
        self._check(other)
        if self.dim == 0 or other.dim == 0:
            return Subspace(self.space, np.zeros((0, self.space.n), dtype=np.uint16))
        stacked = np.vstack([self.basis, other.basis])
        # left-null vectors y of `stacked` give intersection vectors y[:k] @ basis
        combos = nullspace(self.ctx, stacked.T)
        vecs = mmul(self.ctx, combos[:, : self.dim], self.basis)
        return Subspace(self.space, vecs)

    def perp(self):
        """{v : B(u, v) = 0 for all u in self}."""
        if self.dim == 0:
            return Subspace(self.space, eye(self.ctx, self.space.n))
        constraints = mmul(self.ctx, self.basis, self.space.gram)
        return Subspace(self.space, nullspace(self.ctx, constraints))

    def radical(self):
        return self.intersection(self.perp())

    def is_nondegenerate(self):
        return self.radical().dim == 0

    def is_totally_singular(self):
        if self.space.kind != "symplectic":
            for r in self.basis:
                if self.space.quadratic(r):
                    return False
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                if self.space.bilinear(self.basis[i], self.basis[j]):
                    return False
        return True

    def restricted_gram(self):
        return mmul(self.ctx, mmul(self.ctx, self.basis, self.space.gram), self.basis.T)

    def restricted_quad(self):
        m = self.space.quad if self.space.kind == "quadratic" else None
        if m is None:
            raise InputError("ambient space has no quadratic form")
        return mmul(self.ctx, mmul(self.ctx, self.basis, m), self.basis.T)

    def type_sign(self):
        """'+' or '-' for a nondegenerate even-dimensional quadratic space."""
        if not self.is_nondegenerate():
            raise InputError("type sign requires a nondegenerate subspace")
        if self.dim % 2:
            raise InputError("type sign requires even dimension")
        witt = self.witt_index()
        return "+" if witt == self.dim // 2 else "-"

    def witt_index(self):
        ctx = self.ctx
        if self.space.kind == "quadratic":
            qm = self.restricted_quad()
        else:
            gram = self.restricted_gram()
            two_inv = ctx.inv(int(ctx.add(1, 1)))
            qm = np.triu(gram).astype(np.uint16)
            for i in range(qm.shape[0]):
                qm[i, i] = ctx.mul(int(gram[i, i]), two_inv)
        gram = madd(ctx, qm, qm.T)
        return _witt_index(ctx, qm, gram)

    def _check(self, other):
        if self.space is not other.space:
            raise InputError("subspace operation requires a common ambient space")

    def __repr__(self):
        return f"Subspace(dim={self.dim})"


def _quad_value(ctx, qm, v):
    return int(mmul(ctx, mmul(ctx, v, qm), v))


def _witt_index(ctx, qm, gram):
    """Number of hyperbolic pairs split off a (possibly degenerate) form."""
    n = qm.shape[0]
    if n == 0:
        return 0
    # find a singular vector (exhaustive over the row space; n stays small)
    for coeffs in itertools.product(range(ctx.q), repeat=n):
        if not any(coeffs):
            continue
        v = np.array(coeffs, dtype=np.uint16)
        if _quad_value(ctx, qm, v) == 0:
            break
    else:
        return 0
    # find u with B(v, u) != 0
    bv = mmul(ctx, v, gram)
    nz = np.nonzero(bv)[0]
    if nz.size == 0:
        raise InputError("witt index on a degenerate form")
    u = np.zeros(n, dtype=np.uint16)
    u[nz[0]] = ctx.inv(int(bv[nz[0]]))
    # make u singular: u' = u + t v with t = -Q(u) (B(v,u) normalized to 1)
    t = ctx.neg(_quad_value(ctx, qm, u))
    u = ctx.add(u, ctx.mul(t, v)).astype(np.uint16)
    # restrict to the perp of <v, u>
    pair = np.vstack([v, u])
    constraints = mmul(ctx, pair, gram)
    comp = nullspace(ctx, constraints)
    if comp.shape[0] != n - 2:
        raise InputError("hyperbolic splitting failed")
    qm2 = mmul(ctx, mmul(ctx, comp, qm), comp.T)
    gram2 = mmul(ctx, mmul(ctx, comp, gram), comp.T)
    return 1 + _witt_index(ctx, qm2, gram2)


# ---------------------------------------------------------------------------
# linear systems on matrix entries


class LinearSystem:
    """Homogeneous/affine linear constraints on the entries of an n x n matrix."""

    def __init__(self, ctx: FieldContext, n: int):
        self.ctx = ctx
        self.n = n
        self.rows = []
        self.rhs = []

    def add_vector_in_subspace(self, v, target: Subspace):
        """Constrain v @ g to lie in the row space of `target`."""
        ctx = self.ctx
        n = self.n
        # complement: rows c with target @ c^T = 0; then (v g) c^T = 0
        comp = nullspace(ctx, target.basis) if target.dim else eye(ctx, n)
        v = np.asarray(v, dtype=np.uint16)
        for c in comp:
            row = np.zeros(n * n, dtype=np.uint16)
            # coefficient of g[j, k] is v_j * c_k
            coeff = ctx.mul(v[:, None], c[None, :]).astype(np.uint16)
            row[:] = coeff.reshape(-1)
            self.rows.append(row)
            self.rhs.append(0)

    def add_subspace_stabilization(self, sub: Subspace, target: Optional[Subspace] = None):
        if target is None:
            target = sub
        for r in sub.basis:
            self.add_vector_in_subspace(r, target)

    def add_entry_equation(self, coeff_matrix, rhs=0):
        self.rows.append(np.asarray(coeff_matrix, dtype=np.uint16).reshape(-1))
        self.rhs.append(int(rhs))

    def solve(self):
        """(particular, basis of homogeneous solutions); None if inconsistent.

        Solutions are n x n matrices; for a homogeneous system the
        particular solution is the zero matrix.
        """
        ctx = self.ctx
        n2 = self.n * self.n
        if not self.rows:
            basis = eye(ctx, n2)
            return np.zeros((self.n, self.n), dtype=np.uint16), [
                basis[i].reshape(self.n, self.n) for i in range(n2)
            ]
        m = np.array(self.rows, dtype=np.uint16)
        b = np.array(self.rhs, dtype=np.uint16)
        if not b.any():
            hom = nullspace(ctx, m)
            return (
                np.zeros((self.n, self.n), dtype=np.uint16),
                [h.reshape(self.n, self.n) for h in hom],
            )
        aug = np.hstack([m, b[:, None]])
        r, pivots = rref(ctx, aug)
        if n2 in pivots:
            return None  # inconsistent affine system: empty solution signal
        particular = np.zeros(n2, dtype=np.uint16)
        for j, pc in enumerate(pivots):
            particular[pc] = r[j, n2]
        hom = nullspace(ctx, m)
        return particular.reshape(self.n, self.n), [h.reshape(self.n, self.n) for h in hom]


def enumerate_solution_space(ctx, particular, basis, budget: Budget = DEFAULT_BUDGET):
    """All matrices particular + span(basis); earlier basis vectors vary fastest."""
    d = len(basis)
    count = ctx.q**d
    budget.check_enumeration(count, "solution space")
    n = particular.shape[0]
    flat = particular.reshape(1, -1).astype(np.uint16)
    for b in basis:
        bflat = b.reshape(-1).astype(np.uint16)
        blocks = [flat]
        for c in range(1, ctx.q):
            shift = ctx.mul(c, bflat).astype(np.uint16)
            blocks.append(ctx.add(flat, shift[None, :]).astype(np.uint16))
        flat = np.vstack(blocks)
    return flat.reshape(count, n, n)


# ---------------------------------------------------------------------------
# orthogonal group membership tests


def dickson_invariant(ctx, g):
    """Dickson invariant of an orthogonal matrix in characteristic 2."""
    if ctx.p != 2:
        raise InputError("Dickson invariant applies in characteristic 2")
    n = g.shape[0]
    return rank(ctx, msub(ctx, g, eye(ctx, n))) % 2


def reflection_matrix(space: FormSpace, v):
    """Reflection x -> x - (B(x,v)/Q(v)) v for anisotropic v."""
    ctx = space.ctx
    qv = space.quadratic(v)
    if qv == 0:
        raise InputError("reflection requires an anisotropic vector")
    n = space.n
    r = eye(ctx, n)
    coeffs = mmul(ctx, space.gram, np.asarray(v, dtype=np.uint16))  # B(e_i, v)
    factor = ctx.inv(qv)
    for i in range(n):
        if coeffs[i]:
            c = ctx.neg(ctx.mul(ctx.mul(int(coeffs[i]), factor), 1))
            r[i] = ctx.add(r[i], ctx.mul(c, np.asarray(v, dtype=np.uint16))).astype(np.uint16)
    return r


def spinor_norm_is_trivial(space: FormSpace, g):
    """Spinor norm test (odd characteristic): True iff g lies in Omega.

    Factors g into reflections and multiplies the square classes of the
    reflected vectors' Q values; g must lie in SO.
    """
    ctx = space.ctx
    if ctx.p == 2:
        raise InputError("use the Dickson invariant in characteristic 2")
    n = space.n
    if det(ctx, g) != 1:
        raise InputError("spinor norm test requires determinant 1")
    h = np.array(g, dtype=np.uint16)
    parity = 0
    guard = 0
    ident = eye(ctx, n)
    while not np.array_equal(h, ident):
        guard += 1
        if guard > 4 * n + 8:
            raise InputError("reflection factorization did not terminate")
        v = _reducing_vector(space, h)
        if v is None:
            # multiply by an arbitrary anisotropic reflection and retry
            v = _any_anisotropic(space)
            r = reflection_matrix(space, v)
            h = mmul(ctx, h, r)
            parity ^= 0 if ctx.is_square(space.quadratic(v)) else 1
            continue
        r = reflection_matrix(space, v)
        h = mmul(ctx, h, r)
        parity ^= 0 if ctx.is_square(space.quadratic(v)) else 1
    return parity == 0


def _reducing_vector(space, h):
    """A vector v = h(u) - u with Q(v) != 0, if one exists (small q^n scan)."""
    ctx = space.ctx
    n = space.n
    ident = eye(ctx, n)
    diff = msub(ctx, h, ident)
    # try basis vectors first, then short combinations
    for u in ident:
        v = mmul(ctx, u, diff)
        if np.any(v) and space.quadratic(v):
            return v
    if ctx.q**n <= 200000:
        for coeffs in itertools.product(range(ctx.q), repeat=n):
            u = np.array(coeffs, dtype=np.uint16)
            v = mmul(ctx, u, diff)
            if np.any(v) and space.quadratic(v):
                return v
    return None


def _any_anisotropic(space):
    ctx = space.ctx
    for i in range(space.n):
        v = np.zeros(space.n, dtype=np.uint16)
        v[i] = 1
        if space.quadratic(v):
            return v
    for i in range(space.n):
        for j in range(i + 1, space.n):
            v = np.zeros(space.n, dtype=np.uint16)
            v[i] = 1
            v[j] = 1
            if space.quadratic(v):
                return v
    raise InputError("no anisotropic vector found")


# ---------------------------------------------------------------------------
# matrix groups to permutation groups


def vector_index_table(ctx, n):
    """All q^n - 1 nonzero vectors in lexicographic code order."""
    q = ctx.q
    count = q**n
    vecs = np.empty((count, n), dtype=np.uint16)
    r = np.arange(count)
    for i in range(n):
        vecs[:, i] = (r // q ** (n - 1 - i)) % q
    return vecs[1:]


def matrix_to_perm(generators, ctx, budget: Budget = DEFAULT_BUDGET, label=None) -> GeneratedGroup:
    """Permutation action of invertible matrices on nonzero row vectors."""
    gens = [np.asarray(g, dtype=np.uint16) for g in generators]
    if not gens:
        raise InputError("matrix_to_perm requires at least one generator")
    n = gens[0].shape[0]
    degree = ctx.q**n - 1
    budget.check_degree(degree, "vector-action degree")
    for g in gens:
        if det(ctx, g) == 0:
            raise InputError("matrix generator is not invertible")
    vecs = vector_index_table(ctx, n)
    weights = (ctx.q ** np.arange(n - 1, -1, -1, dtype=np.int64))
    perms = []
    for g in gens:
        imgs = mmul(ctx, vecs, g).astype(np.int64)
        codes = imgs @ weights - 1
        perms.append(Permutation(codes.astype(np.int32), validate=True))
    return GeneratedGroup(degree, perms, label=label)
