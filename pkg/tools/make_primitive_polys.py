"""Generate data/primitive_polys.txt: one primitive polynomial per (p, f).

Rule: the lexicographically smallest monic primitive polynomial of degree f
over F_p, where candidates are ordered by the integer whose base-p digits
are the coefficients c_0, c_1, ..., c_{f-1} (low to high).  Covers every
prime power p^f <= 65536.

Run from the repository root:  python3 tools/make_primitive_polys.py
"""

from __future__ import annotations

import sys
from pathlib import Path


def primes_up_to(n):
    sieve = bytearray([1]) * (n + 1)
    sieve[0:2] = b"\x00\x00"
    for i in range(2, int(n**0.5) + 1):
        if sieve[i]:
            sieve[i * i :: i] = b"\x00" * len(sieve[i * i :: i])
    return [i for i in range(2, n + 1) if sieve[i]]


def prime_factors(n):
    out = set()
    d = 2
    while d * d <= n:
        while n % d == 0:
            out.add(d)
            n //= d
        d += 1
    if n > 1:
        out.add(n)
    return sorted(out)


def polymulmod(a, b, mod, p):
    """Product of coefficient lists (low-to-high) modulo monic `mod`."""
    out = [0] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca:
            for j, cb in enumerate(b):
                out[i + j] = (out[i + j] + ca * cb) % p
    f = len(mod) - 1
    for i in range(len(out) - 1, f - 1, -1):
        c = out[i]
        if c:
            out[i] = 0
            for j in range(f):
                out[i - f + j] = (out[i - f + j] - c * mod[j]) % p
    out = out[:f]
    while len(out) < f:
        out.append(0)
    return out


def polypowmod(base, e, mod, p):
    result = [1] + [0] * (len(mod) - 2)
    b = list(base)
    while e:
        if e & 1:
            result = polymulmod(result, b, mod, p)
        b = polymulmod(b, b, mod, p)
        e >>= 1
    return result


def is_primitive(coeffs_low, p, f):
    """coeffs_low: c_0..c_{f-1}; polynomial x^f + sum c_i x^i."""
    mod = coeffs_low + [1]
    q1 = p**f - 1
    x = [0, 1] + [0] * (f - 2) if f >= 2 else [(-coeffs_low[0]) % p]
    one = [1] + [0] * (f - 1)
    if polypowmod(x, q1, mod, p) != one:
        return False
    for r in prime_factors(q1):
        if polypowmod(x, q1 // r, mod, p) == one:
            return False
    return True


def smallest_primitive(p, f):
    for code in range(p**f):
        coeffs = []
        c = code
        for _ in range(f):
            coeffs.append(c % p)
            c //= p
        if coeffs[0] == 0:
            continue  # constant term 0 means x divides the polynomial
        if is_primitive(coeffs, p, f):
            return coeffs
    raise AssertionError(f"no primitive polynomial found for p={p} f={f}")


def main():
    out_path = Path(__file__).resolve().parent.parent / "src" / "mindim" / "data" / "primitive_polys.txt"
    out_path.parent.mkdir(parents=True, exist_ok=True)
    lines = [
        "# primitive polynomials: p f c_0 c_1 ... c_{f-1} (monic x^f + sum c_i x^i)",
        "# rule: lexicographically smallest primitive polynomial, digits low-to-high",
    ]
    for p in primes_up_to(65536):
        f = 1
        while p**f <= 65536:
            coeffs = smallest_primitive(p, f)
            lines.append(f"{p} {f} " + " ".join(map(str, coeffs)))
            f += 1
    out_path.write_text("\n".join(lines) + "\n")
    print(f"wrote {out_path} ({len(lines) - 2} entries)")


if __name__ == "__main__":
    sys.exit(main())
