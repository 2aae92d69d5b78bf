"""Finite fields GF(p^m) with elements encoded as integers.

An element of GF(p^m) is the integer whose base-p digits are the coefficients
of its polynomial representative, lowest degree first. For prime fields this is
plain arithmetic modulo p. Extension fields reduce modulo the smallest monic
irreducible polynomial of degree m, where "smallest" compares the same integer
encoding.
"""

from __future__ import annotations

import functools
from typing import Final

from slimkit import errors

_MAX_ORDER: Final[int] = 1 << 9


def factor_prime_power(value: int) -> tuple[int, int] | None:
    """Return ``(p, m)`` with ``value == p**m``; None if value is no prime power."""
    if value < 2:  # noqa: PLR2004
        return None
    for divisor in range(2, value + 1):
        if divisor * divisor > value:
            return value, 1
        if value % divisor:
            continue
        exponent = 0
        rest = value
        while rest % divisor == 0:
            rest //= divisor
            exponent += 1
        return (divisor, exponent) if rest == 1 else None
    return None


def is_prime_power(value: int) -> bool:
    """Return True if value is p**m for a prime p and m >= 1."""
    return factor_prime_power(value) is not None


def _digits(value: int, base: int, width: int) -> list[int]:
    out = []
    for _ in range(width):
        value, digit = divmod(value, base)
        out.append(digit)
    return out


def _from_digits(digits: list[int], base: int) -> int:
    value = 0
    for digit in reversed(digits):
        value = value * base + digit
    return value


def _poly_rem(dividend: list[int], divisor: list[int], prime: int) -> list[int]:
    """Remainder of dividend / divisor over GF(prime); divisor must be monic."""
    rem = list(dividend)
    div_deg = len(divisor) - 1
    for shift in range(len(rem) - 1 - div_deg, -1, -1):
        coef = rem[shift + div_deg]
        if coef == 0:
            continue
        for idx, div_coef in enumerate(divisor):
            rem[shift + idx] = (rem[shift + idx] - coef * div_coef) % prime
    return rem[:div_deg]


def _is_irreducible(poly: list[int], prime: int) -> bool:
    degree = len(poly) - 1
    for div_deg in range(1, degree // 2 + 1):
        for encoded in range(prime**div_deg, 2 * prime**div_deg):
            divisor = _digits(encoded, prime, div_deg + 1)
            if not any(_poly_rem(poly, divisor, prime)):
                return False
    return True


@functools.cache
def smallest_irreducible(prime: int, degree: int) -> tuple[int, ...]:
    """Return the smallest monic irreducible polynomial, lowest coefficient first.

    Raises:
        ConstructionError: If no irreducible polynomial of that degree exists.
    """
    for encoded in range(prime**degree, 2 * prime**degree):
        poly = _digits(encoded, prime, degree + 1)
        if _is_irreducible(poly, prime):
            return tuple(poly)
    msg = f"no irreducible polynomial of degree {degree} over GF({prime})"
    raise errors.ConstructionError(msg)


class GaloisField:
    """Arithmetic in GF(q) for a prime power q, backed by lookup tables."""

    def __init__(self, order: int) -> None:
        """Build addition and multiplication tables for GF(order).

        Args:
            order: The field size q; must be a prime power.

        Raises:
            ConstructionError: If order is not a prime power or is too large
                for table-based arithmetic.
        """
        factored = factor_prime_power(order)
        if factored is None:
            msg = f"GF({order}) does not exist: {order} is not a prime power"
            raise errors.ConstructionError(msg)
        if order > _MAX_ORDER:
            msg = f"GF({order}) exceeds the supported order {_MAX_ORDER}"
            raise errors.ConstructionError(msg)
        self.order = order
        self.characteristic, self.degree = factored
        self.modulus: tuple[int, ...] | None = (
            smallest_irreducible(self.characteristic, self.degree)
            if self.degree > 1
            else None
        )
        self._add = [
            [self._slow_add(left, right) for right in range(order)]
            for left in range(order)
        ]
        self._mul = [
            [self._slow_mul(left, right) for right in range(order)]
            for left in range(order)
        ]
        self._neg = [row.index(0) for row in self._add]

    def _slow_add(self, left: int, right: int) -> int:
        prime, width = self.characteristic, self.degree
        return _from_digits(
            [
                (lhs + rhs) % prime
                for lhs, rhs in zip(
                    _digits(left, prime, width),
                    _digits(right, prime, width),
                    strict=True,
                )
            ],
            prime,
        )

    def _slow_mul(self, left: int, right: int) -> int:
        prime, width = self.characteristic, self.degree
        if self.modulus is None:
            return (left * right) % prime
        lhs = _digits(left, prime, width)
        rhs = _digits(right, prime, width)
        product = [0] * (2 * width - 1)
        for idx, lcoef in enumerate(lhs):
            for jdx, rcoef in enumerate(rhs):
                product[idx + jdx] = (product[idx + jdx] + lcoef * rcoef) % prime
        return _from_digits(_poly_rem(product, list(self.modulus), prime), prime)

    def add(self, left: int, right: int) -> int:
        """Return left + right."""
        return self._add[left][right]

    def neg(self, value: int) -> int:
        """Return -value."""
        return self._neg[value]

    def sub(self, left: int, right: int) -> int:
        """Return left - right."""
        return self._add[left][self._neg[right]]

    def mul(self, left: int, right: int) -> int:
        """Return left * right."""
        return self._mul[left][right]

    def power(self, base: int, exponent: int) -> int:
        """Return base ** exponent for exponent >= 0."""
        result = 1
        for _ in range(exponent):
            result = self._mul[result][base]
        return result

    def multiplicative_order(self, value: int) -> int:
        """Return the smallest k >= 1 with value**k == 1; value must be nonzero."""
        current = value
        steps = 1
        while current != 1:
            current = self._mul[current][value]
            steps += 1
        return steps

    def is_primitive(self, value: int) -> bool:
        """Return True if value generates the multiplicative group."""
        return value != 0 and self.multiplicative_order(value) == self.order - 1

    @functools.cached_property
    def primitive_element(self) -> int:
        """The smallest element (by integer encoding) that generates GF(q)*."""
        return next(val for val in range(1, self.order) if self.is_primitive(val))
