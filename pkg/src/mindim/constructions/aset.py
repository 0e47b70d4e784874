"""The set of degrees 2p with p prime, p != 11, 2p-1 not a prime power."""

from __future__ import annotations

from ..groupanalysis import is_prime


def _integer_root(n: int, k: int) -> int:
    """Largest r with r^k <= n."""
    if n < 1:
        return 0
    r = int(round(n ** (1.0 / k)))
    while r > 0 and r**k > n:
        r -= 1
    while (r + 1) ** k <= n:
        r += 1
    return r


def is_prime_power(n: int) -> bool:
    """True iff n = p^k for a prime p and k >= 1."""
    if n < 2:
        return False
    for k in range(1, n.bit_length() + 1):
        r = _integer_root(n, k)
        if r < 2:
            break
        if r**k == n and is_prime(r):
            return True
    return False


def aset_contains(n: int) -> bool:
    """Membership test: n = 2p, p prime, p != 11, and 2p - 1 not a prime power."""
    if n < 1:
        return False
    if n % 2:
        return False
    p = n // 2
    if p == 11 or not is_prime(p):
        return False
    return not is_prime_power(n - 1)


def aset_members_upto(limit: int) -> list:
    return [n for n in range(1, limit + 1) if aset_contains(n)]


# -- independent naive oracle ------------------------------------------------


def _naive_is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, n))


def _naive_is_prime_power(n: int) -> bool:
    if n < 2:
        return False
    for p in range(2, n + 1):
        if not _naive_is_prime(p):
            continue
        m = n
        while m % p == 0:
            m //= p
        if m == 1:
            return True
        if p > n:
            break
    return False


def naive_aset_contains(n: int) -> bool:
    """Trial-division-only reimplementation used as the acceptance oracle."""
    if n < 1 or n % 2:
        return False
    p = n // 2
    return _naive_is_prime(p) and p != 11 and not _naive_is_prime_power(n - 1)
