"""Exact coefficient fields: the rationals and prime fields F_p.

Every computation in the toolkit is exact.  A field object carries the
arithmetic; elements are plain Python values (`Fraction` for Q, ints in
``range(p)`` for F_p) so that tight loops stay cheap.
"""

from __future__ import annotations

from fractions import Fraction


class FieldError(ValueError):
    """Raised for malformed field names or non-field moduli."""


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


class Rationals:
    """The field Q.  Elements are `fractions.Fraction` in lowest terms."""

    name = "Q"
    char = 0

    zero = Fraction(0)
    one = Fraction(1)

    def __call__(self, value):
        if isinstance(value, Fraction):
            return value
        if isinstance(value, int):
            return Fraction(value)
        if isinstance(value, str):
            return Fraction(value)
        raise FieldError(f"cannot coerce {value!r} into Q")

    @staticmethod
    def add(a, b):
        return a + b

    @staticmethod
    def sub(a, b):
        return a - b

    @staticmethod
    def mul(a, b):
        return a * b

    @staticmethod
    def neg(a):
        return -a

    @staticmethod
    def inv(a):
        return 1 / a

    @staticmethod
    def div(a, b):
        return a / b

    @staticmethod
    def is_zero(a) -> bool:
        return a == 0

    def format(self, a) -> str:
        return str(a)

    def __repr__(self):
        return "QQ"

    def __eq__(self, other):
        return isinstance(other, Rationals)

    def __hash__(self):
        return hash("Q")


class PrimeField:
    """The field F_p for a prime p.  Elements are ints in ``range(p)``."""

    char: int

    def __init__(self, p: int):
        if not _is_prime(p):
            raise FieldError(f"modulus {p} is not prime")
        self.p = p
        self.char = p
        self.name = f"F{p}"
        self.zero = 0
        self.one = 1 % p
        # inverse table for word-size primes keeps reductions branch-free
        self._inv = [0] * p if p <= 1 << 16 else None
        if self._inv is not None:
            for x in range(1, p):
                self._inv[x] = pow(x, p - 2, p)

    def __call__(self, value):
        if isinstance(value, int):
            return value % self.p
        if isinstance(value, Fraction):
            den = value.denominator % self.p
            if den == 0:
                raise ZeroDivisionError(
                    f"denominator {value.denominator} vanishes in F_{self.p}"
                )
            return value.numerator * self.inv(den) % self.p
        if isinstance(value, str):
            return self(Fraction(value))
        raise FieldError(f"cannot coerce {value!r} into F_{self.p}")

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return a * b % self.p

    def neg(self, a):
        return -a % self.p

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        if self._inv is not None:
            return self._inv[a]
        return pow(a, self.p - 2, self.p)

    def div(self, a, b):
        return a * self.inv(b) % self.p

    @staticmethod
    def is_zero(a) -> bool:
        return a == 0

    def format(self, a) -> str:
        return str(a)

    def __repr__(self):
        return f"GF({self.p})"

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("F", self.p))


QQ = Rationals()


def GF(p: int) -> PrimeField:
    return PrimeField(p)


def parse_field(name: str):
    """Parse a field tag as used in arrangement files: ``Q`` or ``F<p>``."""
    name = name.strip()
    if name == "Q":
        return QQ
    if name.startswith("F") and name[1:].isdigit():
        return PrimeField(int(name[1:]))
    raise FieldError(f"unknown field {name!r} (expected 'Q' or 'F<p>')")
