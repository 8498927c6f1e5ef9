"""Exact Gaussian-integer arithmetic: gcd, factorisation, divisor enumeration.

Backs the Q(i) root search.  By the rational-root theorem over the Euclidean
domain Z[i], any root g/h (in lowest terms) of a polynomial with
Gaussian-integer coefficients has g dividing the constant term and h dividing
the leading one, so enumerating divisors of those two coefficients (times the
four units) yields a complete, finite candidate set.
"""

from __future__ import annotations

Gint = tuple[int, int]

UNITS: tuple[Gint, ...] = ((1, 0), (0, 1), (-1, 0), (0, -1))


def gnorm(z: Gint) -> int:
    return z[0] * z[0] + z[1] * z[1]


def gmul(z: Gint, w: Gint) -> Gint:
    a, b = z
    c, d = w
    return (a * c - b * d, a * d + b * c)


def gsub(z: Gint, w: Gint) -> Gint:
    return (z[0] - w[0], z[1] - w[1])


def gconj(z: Gint) -> Gint:
    return (z[0], -z[1])


def _round_div(num: int, den: int) -> int:
    # nearest integer to num/den, den > 0
    return (2 * num + den) // (2 * den)


def gdivmod(z: Gint, w: Gint) -> tuple[Gint, Gint]:
    """Euclidean division with N(remainder) <= N(w)/2."""
    n = gnorm(w)
    num = gmul(z, gconj(w))
    q = (_round_div(num[0], n), _round_div(num[1], n))
    r = gsub(z, gmul(q, w))
    return q, r


def gdivexact(z: Gint, w: Gint) -> Gint | None:
    """z / w if w divides z exactly, else None."""
    n = gnorm(w)
    num = gmul(z, gconj(w))
    if num[0] % n or num[1] % n:
        return None
    return (num[0] // n, num[1] // n)


def ggcd(z: Gint, w: Gint) -> Gint:
    while w != (0, 0):
        _, r = gdivmod(z, w)
        z, w = w, r
    return canonical_associate(z)


def canonical_associate(z: Gint) -> Gint:
    """Rotate by a unit into the half-quadrant a > 0, b >= 0 (or zero)."""
    a, b = z
    if (a, b) == (0, 0):
        return z
    for _ in range(4):
        if a > 0 and b >= 0:
            return (a, b)
        a, b = -b, a
    raise AssertionError("unreachable")


def factor_int(n: int) -> dict[int, int]:
    """Trial-division factorisation of n >= 1."""
    out: dict[int, int] = {}
    for p in (2, 3):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    f = 5
    while f * f <= n:
        for p in (f, f + 2):
            while n % p == 0:
                out[p] = out.get(p, 0) + 1
                n //= p
        f += 6
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def gaussian_prime_over(p: int) -> Gint:
    """A Gaussian prime above the rational prime p."""
    if p == 2:
        return (1, 1)
    if p % 4 == 3:
        return (p, 0)
    # p = 1 mod 4: find c with c^2 = -1 mod p, then gcd(p, c + i)
    t = 2
    while pow(t, (p - 1) // 2, p) != p - 1:
        t += 1
    c = pow(t, (p - 1) // 4, p)
    pi = ggcd((p, 0), (c, 1))
    assert gnorm(pi) == p
    return pi


def gaussian_factor(z: Gint) -> list[tuple[Gint, int]]:
    """Gaussian prime factorisation of z != 0, exponents by exact division."""
    if z == (0, 0):
        raise ValueError("cannot factor zero")
    factors: list[tuple[Gint, int]] = []
    rest = z
    for p in sorted(factor_int(gnorm(z))):
        candidates = [gaussian_prime_over(p)]
        if p % 4 == 1:
            candidates.append(canonical_associate(gconj(candidates[0])))
        for pi in candidates:
            e = 0
            while True:
                nxt = gdivexact(rest, pi)
                if nxt is None:
                    break
                rest = nxt
                e += 1
            if e:
                factors.append((pi, e))
    assert gnorm(rest) == 1, "non-unit residue after factoring"
    return factors


def gaussian_divisors(z: Gint) -> list[Gint]:
    """All divisors of z != 0 up to unit multiples (includes 1 and z/unit)."""
    divs: list[Gint] = [(1, 0)]
    for pi, e in gaussian_factor(z):
        grown: list[Gint] = []
        power: Gint = (1, 0)
        for _ in range(e + 1):
            grown.extend(gmul(d, power) for d in divs)
            power = gmul(power, pi)
        divs = grown
    return divs
