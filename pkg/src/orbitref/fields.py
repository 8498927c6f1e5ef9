"""Exact scalars over Q, Q(i) and GF(p^k), plus tolerance-tagged complex floats.

Scalar text syntax (shared by the matrix file format and every report):

    Q        "-3/4"
    Q(i)     "-3/4+1/2i"        coefficient form: "1/2i" means (1/2)*i
    GF(p)    "3"
    GF(p^k)  "x+1"              polynomial in x, coefficients reduced mod p
    complex  "1.25-0.5i"        IEEE doubles; all comparisons go through tol

Unicode minus signs are accepted on input and normalised to ASCII.  Q and
Q(i) payloads ride on arbitrary-precision ``Fraction``s, so the fraction
blow-up from conjugated matrices cannot overflow.  Exact payloads are
immutable and hashable; equality is exact for exact kinds.  Floating
complex scalars are never compared with ``==`` in decision paths -- the
field's ``close`` predicate is the only comparison surface.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, ClassVar, Optional

from .errors import DivisionByZero, MixedFields, NotPrime, ParseError, WrongField

KIND_RATIONALS = "q"
KIND_GAUSSIAN = "qi"
KIND_FINITE = "gf"
KIND_COMPLEX = "c64"

DEFAULT_TOL = 1e-9

# Fixed published irreducible (Conway) polynomials per (p, k), little-endian
# coefficient tuples including the leading 1.  Recorded in reports so runs
# against extension fields are reproducible.
CONWAY_POLYNOMIALS: dict[tuple[int, int], tuple[int, ...]] = {
    (2, 2): (1, 1, 1),        # x^2 + x + 1
    (2, 3): (1, 1, 0, 1),     # x^3 + x + 1
    (2, 4): (1, 1, 0, 0, 1),  # x^4 + x + 1
    (3, 2): (2, 2, 1),        # x^2 + 2x + 2
    (3, 3): (1, 2, 0, 1),     # x^3 + 2x + 1
    (5, 2): (2, 4, 1),        # x^2 + 4x + 2
    (7, 2): (3, 6, 1),        # x^2 + 6x + 3
    (11, 2): (2, 7, 1),       # x^2 + 7x + 2
    (13, 2): (2, 12, 1),      # x^2 + 12x + 2
}


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def _normalize_text(text: str) -> str:
    return text.replace("−", "-").replace(" ", "")


# ---------------------------------------------------------------------------
# polynomial helpers over GF(p), little-endian integer coefficient tuples
# ---------------------------------------------------------------------------

def _ptrim(c: list[int]) -> tuple[int, ...]:
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def _pmul_modp(a, b, p):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _ptrim(out)


def _prem_modp(a, m, p):
    """Remainder of a mod m over GF(p); m need not be monic."""
    a = list(a)
    dm = len(m) - 1
    lead_inv = pow(m[-1], p - 2, p)
    while len(a) - 1 >= dm and a:
        if a[-1] == 0:
            a.pop()
            continue
        factor = (a[-1] * lead_inv) % p
        shift = len(a) - 1 - dm
        for i, mi in enumerate(m):
            a[shift + i] = (a[shift + i] - factor * mi) % p
        a.pop()
    return _ptrim(a)


def _is_irreducible_modp(m: tuple[int, ...], p: int) -> bool:
    """Brute-force irreducibility: no monic divisor of degree 1..deg//2."""
    deg = len(m) - 1
    if deg < 1 or m[-1] % p == 0:
        return False
    for dd in range(1, deg // 2 + 1):
        # all monic divisor candidates of degree dd
        for idx in range(p ** dd):
            cand = []
            v = idx
            for _ in range(dd):
                cand.append(v % p)
                v //= p
            cand.append(1)
            if not _prem_modp(m, tuple(cand), p):
                return False
    return True


# ---------------------------------------------------------------------------
# field descriptors
# ---------------------------------------------------------------------------

class Field:
    """Common surface of the scalar-field descriptors."""

    kind: ClassVar[str]

    def scalar(self, payload) -> "Scalar":
        return Scalar(self, payload)

    def zero(self) -> "Scalar":
        return self.scalar(self._zero())

    def one(self) -> "Scalar":
        return self.scalar(self._one())

    def from_int(self, n: int) -> "Scalar":
        return self.scalar(self._from_int(n))

    def parse(self, text: str) -> "Scalar":
        return self.scalar(self._parse(_normalize_text(str(text))))

    def describe(self) -> dict:
        return {"field": self.kind}


@dataclass(frozen=True)
class Rationals(Field):
    kind: ClassVar[str] = KIND_RATIONALS
    name: ClassVar[str] = "Q"

    def _zero(self):
        return Fraction(0)

    def _one(self):
        return Fraction(1)

    def _from_int(self, n):
        return Fraction(n)

    def _add(self, x, y):
        return x + y

    def _sub(self, x, y):
        return x - y

    def _mul(self, x, y):
        return x * y

    def _div(self, x, y):
        if y == 0:
            raise DivisionByZero("division by zero in Q")
        return x / y

    def _neg(self, x):
        return -x

    def _is_zero(self, x):
        return x == 0

    def _parse(self, text):
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"bad rational scalar {text!r}") from exc

    def format(self, x) -> str:
        return str(x)


def _split_real_imag(body: str, float_mode: bool) -> tuple[str, str]:
    """Split "<re><+-im>" at the last sign that is not a leading sign or an
    exponent sign.  Either part may come back empty."""
    cut = None
    for idx in range(1, len(body)):
        if body[idx] in "+-" and (not float_mode or body[idx - 1] not in "eE"):
            cut = idx
    if cut is None:
        return "", body
    return body[:cut], body[cut:]


def _frac_or_unit(text: str) -> Fraction:
    if text in ("", "+"):
        return Fraction(1)
    if text == "-":
        return Fraction(-1)
    return Fraction(text)


@dataclass(frozen=True)
class GaussianRationals(Field):
    kind: ClassVar[str] = KIND_GAUSSIAN
    name: ClassVar[str] = "Q(i)"

    def _zero(self):
        return (Fraction(0), Fraction(0))

    def _one(self):
        return (Fraction(1), Fraction(0))

    def _from_int(self, n):
        return (Fraction(n), Fraction(0))

    def _add(self, x, y):
        return (x[0] + y[0], x[1] + y[1])

    def _sub(self, x, y):
        return (x[0] - y[0], x[1] - y[1])

    def _mul(self, x, y):
        a, b = x
        c, d = y
        return (a * c - b * d, a * d + b * c)

    def _div(self, x, y):
        c, d = y
        n = c * c + d * d
        if n == 0:
            raise DivisionByZero("division by zero in Q(i)")
        a, b = x
        return ((a * c + b * d) / n, (b * c - a * d) / n)

    def _neg(self, x):
        return (-x[0], -x[1])

    def _is_zero(self, x):
        return x[0] == 0 and x[1] == 0

    def _parse(self, text):
        try:
            if text.endswith("i"):
                body = text[:-1]
                re_s, im_s = _split_real_imag(body, float_mode=False)
                real = Fraction(re_s) if re_s else Fraction(0)
                return (real, _frac_or_unit(im_s))
            return (Fraction(text), Fraction(0))
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"bad Gaussian-rational scalar {text!r}") from exc

    def format(self, x) -> str:
        a, b = x
        if b == 0:
            return str(a)
        if b == 1:
            imag = "i"
        elif b == -1:
            imag = "-i"
        else:
            imag = f"{b}i"
        if a == 0:
            return imag
        return f"{a}+{imag}" if b > 0 else f"{a}{imag}"


_GF_TERM = re.compile(r"^(-?\d+|-)?\*?x(?:\^(\d+))?$")


@dataclass(frozen=True)
class FiniteField(Field):
    p: int
    k: int = 1
    modulus: Optional[tuple[int, ...]] = None

    kind: ClassVar[str] = KIND_FINITE

    def __post_init__(self):
        if not is_prime(self.p):
            raise NotPrime(f"GF characteristic {self.p} is not prime")
        if self.k < 1:
            raise ValueError("extension degree must be >= 1")
        if self.k == 1:
            object.__setattr__(self, "modulus", None)
            return
        m = self.modulus
        if m is None:
            m = CONWAY_POLYNOMIALS.get((self.p, self.k))
            if m is None:
                raise ValueError(
                    f"no stock irreducible polynomial for GF({self.p}^{self.k}); "
                    "pass modulus= explicitly"
                )
        m = tuple(int(c) % self.p for c in m)
        if len(m) != self.k + 1 or m[-1] != 1:
            raise ValueError("modulus must be monic of degree k")
        if not _is_irreducible_modp(m, self.p):
            raise ValueError(f"modulus {m} is reducible over GF({self.p})")
        object.__setattr__(self, "modulus", m)

    @property
    def q(self) -> int:
        return self.p ** self.k

    @property
    def name(self) -> str:
        return f"GF({self.p})" if self.k == 1 else f"GF({self.p}^{self.k})"

    def describe(self) -> dict:
        out = {"field": self.kind, "p": self.p, "k": self.k}
        if self.k > 1:
            out["modulus"] = format_gf_poly(self.modulus)
        return out

    # payload: tuple of k ints in [0, p)

    def _zero(self):
        return (0,) * self.k

    def _one(self):
        return (1,) + (0,) * (self.k - 1)

    def _from_int(self, n):
        return (n % self.p,) + (0,) * (self.k - 1)

    def _add(self, x, y):
        p = self.p
        return tuple((a + b) % p for a, b in zip(x, y))

    def _sub(self, x, y):
        p = self.p
        return tuple((a - b) % p for a, b in zip(x, y))

    def _neg(self, x):
        p = self.p
        return tuple((-a) % p for a in x)

    def _mul(self, x, y):
        if self.k == 1:
            return ((x[0] * y[0]) % self.p,)
        prod = _pmul_modp(x, y, self.p)
        red = _prem_modp(prod, self.modulus, self.p)
        return red + (0,) * (self.k - len(red))

    def _inv(self, x):
        if self._is_zero(x):
            raise DivisionByZero(f"division by zero in {self.name}")
        if self.k == 1:
            return (pow(x[0], self.p - 2, self.p),)
        # extended Euclid in GF(p)[x]
        p = self.p
        r0, r1 = list(self.modulus), [c for c in x]
        s0, s1 = [0], [1]
        while _ptrim(list(r1)):
            r1t = _ptrim(list(r1))
            q, r = self._polydivmod(_ptrim(list(r0)), r1t)
            r0, r1 = list(r1t), list(r)
            s0, s1 = s1, self._polysub(s0, _pmul_modp(tuple(q), tuple(s1), p))
            s1 = list(s1)
        g = _ptrim(list(r0))
        # g is a nonzero constant since modulus is irreducible
        ginv = pow(g[0], p - 2, p)
        res = [(c * ginv) % p for c in s0]
        res = _prem_modp(tuple(res), self.modulus, p)
        return res + (0,) * (self.k - len(res))

    def _polydivmod(self, a, b):
        p = self.p
        a = list(a)
        binv = pow(b[-1], p - 2, p)
        q = [0] * max(len(a) - len(b) + 1, 0)
        while len(a) >= len(b) and _ptrim(list(a)):
            if a[-1] == 0:
                a.pop()
                continue
            f = (a[-1] * binv) % p
            shift = len(a) - len(b)
            q[shift] = f
            for i, bi in enumerate(b):
                a[shift + i] = (a[shift + i] - f * bi) % p
            a.pop()
        return _ptrim(q), _ptrim(a)

    def _polysub(self, a, b):
        p = self.p
        out = [0] * max(len(a), len(b))
        for i, c in enumerate(a):
            out[i] = c % p
        for i, c in enumerate(b):
            out[i] = (out[i] - c) % p
        return out

    def _div(self, x, y):
        return self._mul(x, self._inv(y))

    def _is_zero(self, x):
        return all(c == 0 for c in x)

    def _parse(self, text):
        if self.k == 1:
            try:
                return (int(text) % self.p,)
            except ValueError as exc:
                raise ParseError(f"bad GF({self.p}) scalar {text!r}") from exc
        coeffs = [0] * self.k
        body = text.replace("-", "+-")
        if body.startswith("+"):
            body = body[1:]
        if body == "":
            raise ParseError(f"bad {self.name} scalar {text!r}")
        for term in body.split("+"):
            if term == "":
                raise ParseError(f"bad {self.name} scalar {text!r}")
            m = _GF_TERM.match(term)
            if m:
                coeff = int(m.group(1)) if m.group(1) not in (None, "-") else (
                    -1 if m.group(1) == "-" else 1)
                exp = int(m.group(2)) if m.group(2) else 1
            else:
                try:
                    coeff = int(term)
                except ValueError as exc:
                    raise ParseError(f"bad {self.name} scalar {text!r}") from exc
                exp = 0
            if exp >= self.k:
                raise ParseError(
                    f"term degree {exp} too large for {self.name} scalar {text!r}")
            coeffs[exp] = (coeffs[exp] + coeff) % self.p
        return tuple(coeffs)

    def format(self, x) -> str:
        if self.k == 1:
            return str(x[0])
        return format_gf_poly(x)

    def elements(self) -> list["Scalar"]:
        """All q field elements in index order (little-endian base-p digits)."""
        out = []
        for idx in range(self.q):
            v = idx
            digits = []
            for _ in range(self.k):
                digits.append(v % self.p)
                v //= self.p
            out.append(self.scalar(tuple(digits)))
        return out

    def element_index(self, payload) -> int:
        idx = 0
        for c in reversed(payload):
            idx = idx * self.p + c
        return idx


def format_gf_poly(coeffs) -> str:
    terms = []
    for e in range(len(coeffs) - 1, -1, -1):
        c = coeffs[e]
        if c == 0:
            continue
        if e == 0:
            terms.append(str(c))
        else:
            xpart = "x" if e == 1 else f"x^{e}"
            terms.append(xpart if c == 1 else f"{c}{xpart}")
    return "+".join(terms) if terms else "0"


def parse_gf_modulus(p: int, text: str) -> tuple[int, ...]:
    """Parse a monic modulus polynomial string like "x^2+2x+2" over GF(p)."""
    text = _normalize_text(text)
    body = text.replace("-", "+-")
    if body.startswith("+"):
        body = body[1:]
    terms = body.split("+")
    coeffs: dict[int, int] = {}
    for term in terms:
        m = _GF_TERM.match(term)
        if m:
            coeff = int(m.group(1)) if m.group(1) not in (None, "-") else (
                -1 if m.group(1) == "-" else 1)
            exp = int(m.group(2)) if m.group(2) else 1
        else:
            try:
                coeff = int(term)
            except ValueError as exc:
                raise ParseError(f"bad modulus polynomial {text!r}") from exc
            exp = 0
        coeffs[exp] = (coeffs.get(exp, 0) + coeff) % p
    deg = max(coeffs) if coeffs else 0
    return tuple(coeffs.get(e, 0) for e in range(deg + 1))


_FLOAT_RE = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"


@dataclass(frozen=True)
class ComplexFloats(Field):
    tol: float = DEFAULT_TOL

    kind: ClassVar[str] = KIND_COMPLEX

    def __post_init__(self):
        if not (self.tol > 0):
            raise ValueError("tol must be positive")

    @property
    def name(self) -> str:
        return f"C[tol={self.tol:g}]"

    def describe(self) -> dict:
        return {"field": self.kind, "tol": self.tol}

    def _zero(self):
        return complex(0)

    def _one(self):
        return complex(1)

    def _from_int(self, n):
        return complex(n)

    def _add(self, x, y):
        return x + y

    def _sub(self, x, y):
        return x - y

    def _mul(self, x, y):
        return x * y

    def _div(self, x, y):
        if y == 0:
            raise DivisionByZero("division by zero in C")
        return x / y

    def _neg(self, x):
        return -x

    def _is_zero(self, x):
        # structural zero test; decision paths use close()
        return x == 0

    def close(self, x, y) -> bool:
        return abs(x - y) <= self.tol * max(1.0, abs(x), abs(y))

    def _parse(self, text):
        try:
            if text.endswith("i"):
                body = text[:-1]
                re_s, im_s = _split_real_imag(body, float_mode=True)
                real = float(re_s) if re_s else 0.0
                if im_s in ("", "+"):
                    imag = 1.0
                elif im_s == "-":
                    imag = -1.0
                else:
                    imag = float(im_s)
                return complex(real, imag)
            return complex(float(text), 0.0)
        except ValueError as exc:
            raise ParseError(f"bad complex scalar {text!r}") from exc

    def format(self, x) -> str:
        re_part = repr(float(x.real))
        im = float(x.imag)
        sign = "+" if im >= 0 else "-"
        return f"{re_part}{sign}{repr(abs(im))}i"


QQ = Rationals()
QI = GaussianRationals()


# ---------------------------------------------------------------------------
# scalars
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Scalar:
    """Immutable field element: a payload tagged with its field descriptor."""

    field: Field
    value: Any

    def _other(self, other) -> "Scalar":
        if isinstance(other, Scalar):
            if other.field != self.field:
                raise MixedFields(
                    f"cannot mix {self.field.name} and {other.field.name} scalars")
            return other
        if isinstance(other, int):
            return self.field.from_int(other)
        return NotImplemented

    def __add__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return NotImplemented
        return Scalar(self.field, self.field._add(self.value, o.value))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return NotImplemented
        return Scalar(self.field, self.field._sub(self.value, o.value))

    def __rsub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return NotImplemented
        return Scalar(self.field, self.field._sub(o.value, self.value))

    def __mul__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return NotImplemented
        return Scalar(self.field, self.field._mul(self.value, o.value))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return NotImplemented
        return Scalar(self.field, self.field._div(self.value, o.value))

    def __rtruediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return NotImplemented
        return Scalar(self.field, self.field._div(o.value, self.value))

    def __neg__(self):
        return Scalar(self.field, self.field._neg(self.value))

    @property
    def is_zero(self) -> bool:
        return self.field._is_zero(self.value)

    @property
    def is_one(self) -> bool:
        return self.field._is_zero(self.field._sub(self.value, self.field._one()))

    def __str__(self) -> str:
        return self.field.format(self.value)

    def __repr__(self) -> str:
        return f"Scalar({self.field.name}, {self})"


def scalar_arith(a: Scalar, b: Scalar, op: str) -> Scalar:
    """Field arithmetic dispatch: op is one of add, sub, mul, div."""
    if not isinstance(a, Scalar) or not isinstance(b, Scalar):
        raise TypeError("scalar_arith expects Scalar operands")
    if a.field != b.field:
        raise MixedFields(
            f"cannot mix {a.field.name} and {b.field.name} scalars")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown op {op!r}")


def norm_sq(a: Scalar) -> Scalar:
    """|a|^2 of a Gaussian rational, exactly, as a Q scalar.

    Ordering of norm_sq values decides modulus ties with no rounding.
    """
    if not isinstance(a, Scalar) or a.field.kind != KIND_GAUSSIAN:
        raise WrongField("norm_sq expects a Q(i) scalar")
    x, y = a.value
    return Scalar(QQ, x * x + y * y)


def embed(a: Scalar, target: Field) -> Scalar:
    """Value-preserving embedding along Q -> Q(i) -> C."""
    if a.field == target:
        return a
    src = a.field.kind
    dst = target.kind
    if src == KIND_RATIONALS and dst == KIND_GAUSSIAN:
        return Scalar(target, (a.value, Fraction(0)))
    if src == KIND_RATIONALS and dst == KIND_COMPLEX:
        return Scalar(target, complex(float(a.value), 0.0))
    if src == KIND_GAUSSIAN and dst == KIND_COMPLEX:
        re_part, im_part = a.value
        return Scalar(target, complex(float(re_part), float(im_part)))
    raise WrongField(f"no embedding from {a.field.name} into {target.name}")


def as_gaussian_pair(a: Scalar) -> tuple[Fraction, Fraction]:
    """(re, im) of an exact rational or Gaussian-rational scalar."""
    if a.field.kind == KIND_RATIONALS:
        return (a.value, Fraction(0))
    if a.field.kind == KIND_GAUSSIAN:
        return a.value
    raise WrongField(f"{a.field.name} scalar has no exact Gaussian form")
