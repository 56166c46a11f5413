"""Arithmetic over a prime field Z_p and over truncated polynomials F[X]/<X^h>.

Scalars are plain Python ints in ``[0, p)``; vectors and matrices are ``int64`` numpy arrays. The vectorised
kernels (:func:`mulmod`, :func:`matmul_mod`) split operands into 21-bit limbs whenever a direct product could leave
the signed 64-bit range, so every prime below 2^62 is exact.
"""

from typing import Callable, Final, List, Optional, Sequence

import numpy as np
import numpy.typing as npt

from .errors import BadForm, ConfigError, DegreeMismatch, NonUnit, ZeroInverse


DEFAULT_PRIME: Final[int] = (1 << 61) - 1
MAX_PRIME_BITS: Final[int] = 62
LIMB_BITS: Final[int] = 21
LIMB_MASK: Final[int] = (1 << LIMB_BITS) - 1
INNER_CHUNK: Final[int] = 1 << 18
SCHWARTZ_ZIPPEL_MARGIN: Final[int] = 1 << 20

_WORD: Final[int] = 1 << 63
_MILLER_RABIN_BASES: Final = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


class OpCounter:
    """Running count of field multiplications issued through the vectorised kernels."""

    count: int

    def __init__(self):
        """Create a counter at zero."""
        self.count = 0

    def add(self, amount: int):
        """Add ``amount`` multiplications."""
        self.count += int(amount)

    def reset(self) -> int:
        """Zero the counter and return the previous value."""
        previous = self.count
        self.count = 0
        return previous


ops: Final[OpCounter] = OpCounter()


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for every n below 3.3 * 10^24."""
    if n < 2:
        return False
    for q in _MILLER_RABIN_BASES:
        if n % q == 0:
            return n == q
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MILLER_RABIN_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def make_rng(seed: Optional[int] = 0) -> np.random.Generator:
    """Create the counter-based generator all sampling in the engine draws from.

    Args:
        seed (int, optional): Philox key. Defaults to 0.

    Returns:
        np.random.Generator: A generator over :class:`numpy.random.Philox`.
    """
    return np.random.Generator(np.random.Philox(seed))


def _limb_count(p: int) -> int:
    return -(-(p - 1).bit_length() // LIMB_BITS) or 1


def _limbs(x: npt.NDArray[np.int64], count: int) -> List[npt.NDArray[np.int64]]:
    return [(x >> (LIMB_BITS * k)) & LIMB_MASK for k in range(count)]


def _shift_mod(x: npt.NDArray[np.int64], bits: int, p: int) -> npt.NDArray[np.int64]:
    room = 63 - p.bit_length()
    while bits > 0:
        step = min(room, bits)
        x = (x << step) % p
        bits -= step
    return x


def _combine(partials: List[npt.NDArray[np.int64]], p: int) -> npt.NDArray[np.int64]:
    # Horner over the limb base 2^21
    result = partials[-1] % p
    for part in reversed(partials[:-1]):
        result = (_shift_mod(result, LIMB_BITS, p) + part % p) % p
    return result


def _limb_product(
    a: npt.NDArray[np.int64],
    b: npt.NDArray[np.int64],
    p: int,
    product: Callable[[npt.NDArray[np.int64], npt.NDArray[np.int64]], npt.NDArray[np.int64]],
) -> npt.NDArray[np.int64]:
    count = _limb_count(p)
    la = _limbs(a, count)
    lb = _limbs(b, count)
    partials = []
    for k in range(2 * count - 1):
        total = None
        for s in range(max(0, k - count + 1), min(k, count - 1) + 1):
            term = product(la[s], lb[k - s])
            total = term if total is None else total + term
        partials.append(total % p)  # type: ignore[operator]
    return _combine(partials, p)


def addmod(a, b, p: int) -> npt.NDArray[np.int64]:
    """Elementwise ``(a + b) mod p`` for operands already reduced."""
    return (np.asarray(a, dtype=np.int64) + np.asarray(b, dtype=np.int64)) % p


def submod(a, b, p: int) -> npt.NDArray[np.int64]:
    """Elementwise ``(a - b) mod p`` for operands already reduced."""
    return (np.asarray(a, dtype=np.int64) - np.asarray(b, dtype=np.int64)) % p


def mulmod(a, b, p: int) -> npt.NDArray[np.int64]:
    """Elementwise ``(a * b) mod p`` without leaving the int64 range.

    Args:
        a (array-like): Reduced operand.
        b (array-like): Reduced operand, broadcast against ``a``.
        p (int): Prime modulus below 2^62.

    Returns:
        np.ndarray: Reduced products.
    """
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    ops.add(np.broadcast(a, b).size)
    if (p - 1) ** 2 < _WORD:
        return (a * b) % p
    return _limb_product(a, b, p, np.multiply)


def matmul_mod(a, b, p: int) -> npt.NDArray[np.int64]:
    """Exact matrix product over Z_p, with numpy ``@`` broadcasting over leading axes.

    The inner dimension is processed in chunks of at most 2^18 so that the grouped limb sums stay below 2^63.

    Args:
        a (array-like): Left operand, shape ``(..., r, k)``.
        b (array-like): Right operand, shape ``(..., k, c)``.
        p (int): Prime modulus below 2^62.

    Returns:
        np.ndarray: The reduced product, shape ``(..., r, c)``.
    """
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    inner = a.shape[-1]
    batch = np.broadcast_shapes(a.shape[:-2], b.shape[:-2])
    ops.add(int(np.prod(batch, dtype=np.int64)) * a.shape[-2] * inner * b.shape[-1])
    if inner == 0:
        return np.zeros(batch + (a.shape[-2], b.shape[-1]), dtype=np.int64)
    if inner * (p - 1) ** 2 < _WORD:
        return (a @ b) % p

    result = None
    for start in range(0, inner, INNER_CHUNK):
        stop = min(inner, start + INNER_CHUNK)
        chunk = _limb_product(a[..., start:stop], b[..., start:stop, :], p, np.matmul)
        result = chunk if result is None else (result + chunk) % p
    return result  # type: ignore[return-value]


class FieldConfig:
    """The prime field Z_p all algebra of one oracle lives in."""

    p: Final[int]

    def __init__(self, p: int = DEFAULT_PRIME):
        """Create the field.

        Args:
            p (int, optional): Prime modulus below 2^62. Defaults to 2^61 - 1.

        Raises:
            ConfigError: If ``p`` is too large or not prime.
        """
        if p.bit_length() > MAX_PRIME_BITS:
            raise ConfigError(f"Prime {p} does not fit in {MAX_PRIME_BITS} bits")
        if not is_prime(p):
            raise ConfigError(f"Modulus {p} is not prime")
        self.p = p

    def add(self, a: int, b: int) -> int:
        """Field addition."""
        return (int(a) + int(b)) % self.p

    def sub(self, a: int, b: int) -> int:
        """Field subtraction."""
        return (int(a) - int(b)) % self.p

    def mul(self, a: int, b: int) -> int:
        """Field multiplication."""
        return int(a) * int(b) % self.p

    def inv(self, a: int) -> int:
        """Multiplicative inverse.

        Raises:
            ZeroInverse: If ``a`` is zero in the field.
        """
        if int(a) % self.p == 0:
            raise ZeroInverse("Zero has no inverse")
        return pow(int(a), -1, self.p)

    def sample(self, rng: np.random.Generator, size: Optional[int | Sequence[int]] = None):
        """Draw uniform field elements by rejection sampling on masked raw 64-bit words.

        Args:
            rng (np.random.Generator): Source generator; its bit generator's raw stream is consumed.
            size (int or tuple, optional): Output shape, or None for a single int. Defaults to None.

        Returns:
            int or np.ndarray: Uniform values in ``[0, p)``.
        """
        count = 1 if size is None else int(np.prod(size))
        mask = np.uint64((1 << self.p.bit_length()) - 1)
        values = np.empty(0, dtype=np.int64)
        while values.size < count:
            raw = np.asarray(rng.bit_generator.random_raw(count - values.size), dtype=np.uint64) & mask
            values = np.concatenate((values, raw[raw < self.p].astype(np.int64)))
        if values.size and int(values.max()) >= self.p:
            raise BadForm("Sampled value outside the field")
        if size is None:
            return int(values[0])
        return values.reshape(size)

    def check_budget(self, h: int, n: int):
        """Require p to exceed the Schwartz-Zippel budget h*n^2 by a factor 2^20.

        Raises:
            ConfigError: If the prime is too small for an oracle of this size.
        """
        if self.p < h * n * n * SCHWARTZ_ZIPPEL_MARGIN:
            raise ConfigError(f"Prime {self.p} too small for h={h}, n={n}")

    def __eq__(self, other) -> bool:
        """Fields are equal when their moduli are."""
        return isinstance(other, FieldConfig) and other.p == self.p

    def __hash__(self) -> int:
        """Hash by modulus."""
        return hash(self.p)

    def __repr__(self) -> str:
        """Get a string representation of the field."""
        return f"FieldConfig(p={self.p})"


def convolve_trunc(a, b, p: int, length: Optional[int] = None) -> npt.NDArray[np.int64]:
    """Schoolbook convolution of two coefficient vectors, keeping degrees below ``length``.

    This is the polynomial multiplication kernel; an FFT backend would replace this function.
    """
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    length = len(a) if length is None else length
    out = np.zeros(length, dtype=np.int64)
    for i in range(min(len(a), length)):
        if a[i] == 0:
            continue
        span = min(len(b), length - i)
        out[i : i + span] = addmod(out[i : i + span], mulmod(a[i], b[:span], p), p)
    return out


class TruncPoly:
    """Polynomial over Z_p truncated modulo X^h, stored as exactly h coefficients."""

    coeffs: npt.NDArray[np.int64]
    field: Final[FieldConfig]

    def __init__(self, coeffs, field: FieldConfig):
        """Create a truncated polynomial.

        Args:
            coeffs (array-like): Coefficients, lowest degree first; reduced modulo p on construction.
            field (FieldConfig): The coefficient field.
        """
        if isinstance(coeffs, np.ndarray) and coeffs.dtype != object:
            values = coeffs.astype(np.int64) % field.p
        else:
            values = np.array([int(c) % field.p for c in coeffs], dtype=np.int64)
        self.coeffs = values.reshape(-1)
        if self.coeffs.size == 0:
            raise DegreeMismatch("A truncated polynomial needs h >= 1")
        self.field = field

    @staticmethod
    def zero(h: int, field: FieldConfig) -> "TruncPoly":
        """The zero polynomial."""
        return TruncPoly(np.zeros(h, dtype=np.int64), field)

    @staticmethod
    def one(h: int, field: FieldConfig) -> "TruncPoly":
        """The constant polynomial 1."""
        return TruncPoly.monomial(1, 0, h, field)

    @staticmethod
    def monomial(coefficient: int, degree: int, h: int, field: FieldConfig) -> "TruncPoly":
        """``coefficient * X^degree``, which is zero when ``degree >= h``."""
        coeffs = np.zeros(h, dtype=np.int64)
        if degree < h:
            coeffs[degree] = int(coefficient) % field.p
        return TruncPoly(coeffs, field)

    @property
    def h(self) -> int:
        """Degree bound."""
        return len(self.coeffs)

    @property
    def constant(self) -> int:
        """Constant coefficient."""
        return int(self.coeffs[0])

    def is_zero(self) -> bool:
        """Check whether all coefficients vanish."""
        return not self.coeffs.any()

    def __getitem__(self, degree: int) -> int:
        """Coefficient of ``X^degree``."""
        return int(self.coeffs[degree])

    def __add__(self, other: "TruncPoly") -> "TruncPoly":
        """See :func:`poly_add`."""
        return poly_add(self, other)

    def __neg__(self) -> "TruncPoly":
        """Additive inverse."""
        return TruncPoly((-self.coeffs) % self.field.p, self.field)

    def __sub__(self, other: "TruncPoly") -> "TruncPoly":
        """Difference of two polynomials."""
        return poly_add(self, -other)

    def __mul__(self, other: "TruncPoly | int") -> "TruncPoly":
        """See :func:`poly_mul`; ints scale every coefficient."""
        if isinstance(other, TruncPoly):
            return poly_mul(self, other)
        return TruncPoly(mulmod(self.coeffs, int(other) % self.field.p, self.field.p), self.field)

    def __eq__(self, other) -> bool:
        """Polynomials are equal when degree bound, field and coefficients agree."""
        return (
            isinstance(other, TruncPoly)
            and other.field == self.field
            and other.h == self.h
            and bool(np.array_equal(other.coeffs, self.coeffs))
        )

    def __repr__(self) -> str:
        """Get a string representation of the polynomial."""
        terms = [f"{c}X^{k}" if k else f"{c}" for k, c in enumerate(self.coeffs.tolist()) if c]
        return f"TruncPoly({' + '.join(terms) or '0'} mod X^{self.h}, p={self.field.p})"


def _check_compatible(f: TruncPoly, g: TruncPoly):
    if f.h != g.h:
        raise DegreeMismatch(f"Degree bounds differ: {f.h} and {g.h}")
    if f.field != g.field:
        raise ValueError(f"Fields differ: {f.field} and {g.field}")


def poly_add(f: TruncPoly, g: TruncPoly) -> TruncPoly:
    """Coefficient-wise sum.

    Raises:
        DegreeMismatch: If the degree bounds differ.
    """
    _check_compatible(f, g)
    return TruncPoly(addmod(f.coeffs, g.coeffs, f.field.p), f.field)


def poly_mul(f: TruncPoly, g: TruncPoly) -> TruncPoly:
    """Product truncated to degrees below h.

    Raises:
        DegreeMismatch: If the degree bounds differ.
    """
    _check_compatible(f, g)
    return TruncPoly(convolve_trunc(f.coeffs, g.coeffs, f.field.p, f.h), f.field)


def poly_inv_unit(q: TruncPoly) -> TruncPoly:
    """Inverse of a unit of F[X]/<X^h> by Newton iteration, doubling the precision each round.

    Args:
        q (TruncPoly): Polynomial with nonzero constant term.

    Raises:
        NonUnit: If the constant term is zero.

    Returns:
        TruncPoly: ``g`` with ``q * g = 1``.
    """
    p = q.field.p
    if q.constant == 0:
        raise NonUnit(f"{q} has no inverse")
    inverse = np.array([q.field.inv(q.constant)], dtype=np.int64)
    precision = 1
    while precision < q.h:
        precision = min(2 * precision, q.h)
        residual = (-convolve_trunc(q.coeffs[:precision], inverse, p, precision)) % p
        residual[0] = (residual[0] + 2) % p
        inverse = convolve_trunc(inverse, residual, p, precision)
    return TruncPoly(inverse, q.field)
