"""Exact arithmetic in cyclotomic fields Q(zeta_N).

Elements are stored on the power basis 1, zeta, ..., zeta^(phi(N)-1) with
rational coefficients, reduced modulo the N-th cyclotomic polynomial.  The
representation is canonical: two elements are equal iff their coefficient
vectors are equal, so hashing and exact comparison are cheap.
"""

from __future__ import annotations

import functools
from fractions import Fraction
from math import gcd
from typing import Iterable, Optional, Sequence, Union

import mpmath

from .errors import DivisionByZero, IncompatibleFieldOrders

RationalLike = Union[int, Fraction]


def _poly_divmod(num: list[int], den: list[int]) -> tuple[list[int], list[int]]:
    # num, den: integer coefficient lists, lowest degree first, den monic.
    num = list(num)
    out = [0] * (max(len(num) - len(den) + 1, 0))
    for i in range(len(num) - len(den), -1, -1):
        c = num[i + len(den) - 1]
        out[i] = c
        if c:
            for j, d in enumerate(den):
                num[i + j] -= c * d
    while num and num[-1] == 0:
        num.pop()
    return out, num


@functools.lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Integer coefficients of the n-th cyclotomic polynomial, lowest degree first."""
    if n < 1:
        raise ValueError("order must be positive")
    poly = [-1] + [0] * (n - 1) + [1]  # x^n - 1
    for d in range(1, n):
        if n % d == 0:
            q, r = _poly_divmod(poly, list(cyclotomic_polynomial(d)))
            assert not r
            poly = q
    return tuple(poly)


def euler_phi(n: int) -> int:
    return len(cyclotomic_polynomial(n)) - 1


class CycloField:
    """Q(zeta_N) together with precomputed reduction and conjugation tables."""

    _instances: dict[int, "CycloField"] = {}

    def __new__(cls, order: int):
        inst = cls._instances.get(order)
        if inst is None:
            inst = super().__new__(cls)
            inst._init(order)
            cls._instances[order] = inst
        return inst

    def _init(self, order: int) -> None:
        if order < 1:
            raise ValueError("field order must be positive")
        self.order = order
        poly = cyclotomic_polynomial(order)
        self.degree = len(poly) - 1
        # power_table[k] = coefficients of zeta^k on the basis, 0 <= k < order
        phi = self.degree
        table: list[tuple[int, ...]] = []
        for k in range(phi):
            row = [0] * phi
            row[k] = 1
            table.append(tuple(row))
        head = [-c for c in poly[:phi]]  # zeta^phi = head on the basis
        for k in range(phi, order):
            prev = table[k - 1]
            row = [0] * phi
            # multiply prev by zeta
            for i in range(phi - 1):
                row[i + 1] += prev[i]
            top = prev[phi - 1]
            if top:
                for i in range(phi):
                    row[i] += top * head[i]
            table.append(tuple(row))
        self.power_table = table
        # conj_table[k] = coefficients of zeta^(-k)
        self.conj_table = [table[(-k) % order] for k in range(phi)]
        self.zero = CycloNum(self, (Fraction(0),) * phi)
        self.one = CycloNum(self, tuple([Fraction(1)] + [Fraction(0)] * (phi - 1)))

    def zeta(self, power: int = 1) -> "CycloNum":
        row = self.power_table[power % self.order]
        return CycloNum(self, tuple(Fraction(c) for c in row))

    def from_rational(self, value: RationalLike) -> "CycloNum":
        coeffs = [Fraction(value)] + [Fraction(0)] * (self.degree - 1)
        return CycloNum(self, tuple(coeffs))

    def element(self, terms: Iterable[tuple[int, RationalLike]]) -> "CycloNum":
        """Sum of (exponent, coefficient) terms coeff * zeta^exponent."""
        acc = [Fraction(0)] * self.degree
        for expo, coeff in terms:
            row = self.power_table[expo % self.order]
            q = Fraction(coeff)
            if q:
                for i, c in enumerate(row):
                    if c:
                        acc[i] += q * c
        return CycloNum(self, tuple(acc))

    def __repr__(self) -> str:
        return f"CycloField({self.order})"


class CycloNum:
    """An exact element of Q(zeta_N)."""

    __slots__ = ("field", "coeffs", "_hash")

    def __init__(self, field: CycloField, coeffs: tuple[Fraction, ...]):
        assert len(coeffs) == field.degree
        self.field = field
        self.coeffs = coeffs
        self._hash: Optional[int] = None

    # -- coercion ---------------------------------------------------------

    def _coerce(self, other) -> Optional[tuple["CycloNum", "CycloNum"]]:
        if isinstance(other, CycloNum):
            if other.field is self.field:
                return self, other
            a, b = self.field.order, other.field.order
            if b % a == 0:
                return self.embed(b), other
            if a % b == 0:
                return self, other.embed(a)
            raise IncompatibleFieldOrders(
                f"no configured embedding between Q(zeta_{a}) and Q(zeta_{b})"
            )
        if isinstance(other, (int, Fraction)):
            return self, self.field.from_rational(other)
        return None

    def embed(self, order: int) -> "CycloNum":
        """Image of this element in Q(zeta_order); requires field order | order."""
        if order == self.field.order:
            return self
        if order % self.field.order != 0:
            raise IncompatibleFieldOrders(
                f"Q(zeta_{self.field.order}) does not embed in Q(zeta_{order})"
            )
        big = CycloField(order)
        step = order // self.field.order
        return big.element(
            (k * step, c) for k, c in enumerate(self.coeffs) if c
        )

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return CycloNum(a.field, tuple(x + y for x, y in zip(a.coeffs, b.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return CycloNum(self.field, tuple(-x for x in self.coeffs))

    def __sub__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return CycloNum(a.field, tuple(x - y for x, y in zip(a.coeffs, b.coeffs)))

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        field = a.field
        phi = field.degree
        prod = [Fraction(0)] * (2 * phi - 1)
        ac, bc = a.coeffs, b.coeffs
        for i, x in enumerate(ac):
            if x:
                for j, y in enumerate(bc):
                    if y:
                        prod[i + j] += x * y
        out = list(prod[:phi])
        table = field.power_table
        for k in range(phi, 2 * phi - 1):
            c = prod[k]
            if c:
                row = table[k % field.order] if k < field.order else None
                if row is None:
                    row = table[k % field.order]
                for i, t in enumerate(row):
                    if t:
                        out[i] += c * t
        return CycloNum(field, tuple(out))

    __rmul__ = __mul__

    def inverse(self) -> "CycloNum":
        """Multiplicative inverse, via Gaussian elimination on the multiplication map."""
        if self.is_zero():
            raise DivisionByZero("division by zero in cyclotomic field")
        field = self.field
        phi = field.degree
        # Solve (self * x) = 1 for the coefficient vector of x.
        cols = []
        for k in range(phi):
            cols.append((self * field.zeta(k)).coeffs)
        # rows of the augmented system: sum_k x_k * cols[k][i] = delta_{i0}
        aug = [[cols[k][i] for k in range(phi)] + [Fraction(1 if i == 0 else 0)]
               for i in range(phi)]
        n = phi
        for col in range(n):
            piv = next(r for r in range(col, n) if aug[r][col] != 0)
            aug[col], aug[piv] = aug[piv], aug[col]
            inv = 1 / aug[col][col]
            aug[col] = [v * inv for v in aug[col]]
            for r in range(n):
                if r != col and aug[r][col]:
                    f = aug[r][col]
                    aug[r] = [v - f * w for v, w in zip(aug[r], aug[col])]
        return CycloNum(field, tuple(aug[i][n] for i in range(n)))

    def __truediv__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return a * b.inverse()

    def __rtruediv__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return b * a.inverse()

    def __pow__(self, k: int) -> "CycloNum":
        if k < 0:
            return self.inverse() ** (-k)
        result = self.field.one
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- structure --------------------------------------------------------

    def conj(self) -> "CycloNum":
        """Complex conjugate (zeta -> zeta^-1 extended Q-linearly)."""
        field = self.field
        acc = [Fraction(0)] * field.degree
        for k, c in enumerate(self.coeffs):
            if c:
                for i, t in enumerate(field.conj_table[k]):
                    if t:
                        acc[i] += c * t
        return CycloNum(field, tuple(acc))

    def norm_sq(self) -> "CycloNum":
        """z * conj(z); always real, nonnegative under the complex embedding."""
        return self * self.conj()

    def as_rational(self) -> Optional[Fraction]:
        """The element as a Fraction if it is rational, else None."""
        if any(self.coeffs[1:]):
            return None
        return self.coeffs[0]

    def re_twice(self) -> "CycloNum":
        """2 Re z = z + conj z, computed symbolically."""
        return self + self.conj()

    def is_real(self) -> bool:
        return self.conj() == self

    def is_imag_quadratic_integer(self) -> bool:
        """True iff |z|^2 and 2 Re z are both rational integers.

        This is the exact criterion for z to be an algebraic integer of some
        purely imaginary quadratic extension of Q (or of Q itself).
        """
        n = self.norm_sq().as_rational()
        if n is None or n.denominator != 1:
            return False
        t = self.re_twice().as_rational()
        return t is not None and t.denominator == 1

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    # -- comparisons / hashing --------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            r = self.as_rational()
            return r is not None and r == other
        if isinstance(other, CycloNum):
            if other.field is self.field:
                return self.coeffs == other.coeffs
            a, b = self._coerce(other)
            return a.coeffs == b.coeffs
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.field.order, self.coeffs))
        return self._hash

    def __bool__(self) -> bool:
        return not self.is_zero()

    # -- numeric / display --------------------------------------------------

    def to_complex(self, prec: int = 53) -> complex:
        with mpmath.workprec(prec):
            z = mpmath.mpc(0)
            for k, c in enumerate(self.coeffs):
                if c:
                    z += mpmath.mpc(c.numerator) / c.denominator * mpmath.root(1, self.field.order, k)
            return complex(z)

    def __repr__(self) -> str:
        return f"Cyclo({self.field.order}; {self.text()})"

    def text(self) -> str:
        terms = []
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            if k == 0:
                terms.append(str(c))
            else:
                z = f"z^{k}" if k > 1 else "z"
                terms.append(f"{c}*{z}" if c != 1 else z)
        return " + ".join(terms) if terms else "0"

    # -- text encoding (CLI scalar schema) ----------------------------------

    def encode(self) -> Union[str, list]:
        """Scalar text form: "p/q" for rationals, else [[exponent, "p/q"], ...]."""
        r = self.as_rational()
        if r is not None:
            return _encode_fraction(r)
        return [[k, _encode_fraction(c)] for k, c in enumerate(self.coeffs) if c]


def _encode_fraction(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def parse_rational(text: str) -> Fraction:
    return Fraction(text.strip())


def parse_scalar(data, field: CycloField) -> CycloNum:
    """Decode the CLI scalar schema: "p/q" or [[exponent, "p/q"], ...]."""
    if isinstance(data, str):
        return field.from_rational(parse_rational(data))
    if isinstance(data, int):
        return field.from_rational(data)
    if isinstance(data, (list, tuple)):
        terms = []
        for item in data:
            if not (isinstance(item, (list, tuple)) and len(item) == 2):
                raise ValueError(f"bad scalar term {item!r}")
            expo, coeff = item
            terms.append((int(expo), parse_rational(str(coeff))))
        return field.element(terms)
    raise ValueError(f"bad scalar encoding {data!r}")


# -- exact sign of real elements ------------------------------------------


def sign_of_real(z: CycloNum) -> int:
    """Sign (-1, 0, +1) of a real cyclotomic number under the standard embedding.

    Zero is detected exactly on the coefficient vector; the sign of a nonzero
    value is read off a high-precision evaluation, escalating precision until
    two rounds agree with a safe margin.
    """
    if not z.is_real():
        raise ValueError("sign_of_real on a non-real element")
    if z.is_zero():
        return 0
    n = z.field.order
    for prec in (80, 200, 800, 3200):
        with mpmath.workprec(prec):
            val = mpmath.mpf(0)
            for k, c in enumerate(z.coeffs):
                if c:
                    val += mpmath.mpf(c.numerator) / c.denominator * mpmath.cos(
                        2 * mpmath.pi * k / n
                    )
            if abs(val) > mpmath.mpf(2) ** (-prec // 2):
                return 1 if val > 0 else -1
    raise ArithmeticError(f"could not certify sign of {z!r}")


def compare_real(a: CycloNum, b) -> int:
    """Sign of a - b for real cyclotomic a and rational/cyclotomic b."""
    if isinstance(b, (int, Fraction)):
        b = a.field.from_rational(b)
    return sign_of_real(a - b)


def lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def zeta_in_field(field: CycloField, m: int) -> CycloNum:
    """A primitive m-th root of unity e^(2 pi i / m) inside Q(zeta_N).

    Exists iff m | N, or N is odd and m = 2d with d | N (since
    Q(zeta_N) = Q(zeta_2N) for odd N).
    """
    n = field.order
    if m < 1:
        raise ValueError("m must be positive")
    if n % m == 0:
        return field.zeta(n // m)
    if n % 2 == 1 and m % 2 == 0 and n % (m // 2) == 0:
        d = m // 2
        # e^(2 pi i / 2d) = -e^(2 pi i (d+1)/2d) = -zeta_d^((d+1)/2) for odd d
        return -(field.zeta((n // d) * ((d + 1) // 2)))
    raise IncompatibleFieldOrders(f"zeta_{m} is not in Q(zeta_{n})")


def common_field(*nums: CycloNum) -> CycloField:
    order = 1
    for z in nums:
        order = lcm(order, z.field.order)
    return CycloField(order)
