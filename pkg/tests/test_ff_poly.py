import numpy as np
from pytest import raises

from dyndist import ConfigError, FieldConfig, NonUnit, TruncPoly, ZeroInverse, make_rng, poly_add, poly_inv_unit
from dyndist.errors import DegreeMismatch
from dyndist.ff_poly import (
    DEFAULT_PRIME,
    addmod,
    convolve_trunc,
    is_prime,
    matmul_mod,
    mulmod,
    ops,
    poly_mul,
    submod,
)


def test_is_prime():
    assert is_prime(2)
    assert is_prime(DEFAULT_PRIME)
    assert is_prime(10007)
    assert not is_prime(1)
    assert not is_prime(10007 * 10009)
    assert not is_prime((1 << 61) + 1)


def test_field_arithmetic():
    field = FieldConfig(7)
    assert field.add(3, 5) == 1
    assert field.sub(3, 5) == 5
    assert field.mul(6, 6) == 1
    assert field.inv(3) == 5
    big = FieldConfig()
    assert big.inv(2) == (DEFAULT_PRIME + 1) // 2
    assert big.mul(big.inv(123456789), 123456789) == 1
    with raises(ZeroInverse, match="no inverse"):
        field.inv(0)
    with raises(ZeroInverse):
        field.inv(14)


def test_field_config_errors():
    with raises(ConfigError, match="not prime"):
        FieldConfig(15)
    with raises(ConfigError, match="bits"):
        FieldConfig((1 << 62) + 1)
    field = FieldConfig(10007)
    with raises(ConfigError, match="too small"):
        field.check_budget(8, 8)
    FieldConfig().check_budget(65, 64)


def test_field_sample():
    field = FieldConfig(10007)
    values = field.sample(make_rng(3), 1000)
    assert values.shape == (1000,)
    assert values.min() >= 0 and values.max() < 10007
    assert isinstance(field.sample(make_rng(3)), int)
    again = field.sample(make_rng(3), (10, 100))
    assert np.array_equal(again.ravel(), values)
    assert not np.array_equal(field.sample(make_rng(4), 1000), values)


def test_vector_kernels():
    p = DEFAULT_PRIME
    rng = make_rng(1)
    a = FieldConfig().sample(rng, 200)
    b = FieldConfig().sample(rng, 200)
    expected = [int(x) * int(y) % p for x, y in zip(a, b)]
    assert mulmod(a, b, p).tolist() == expected
    assert addmod(a, b, p).tolist() == [(int(x) + int(y)) % p for x, y in zip(a, b)]
    assert submod(a, b, p).tolist() == [(int(x) - int(y)) % p for x, y in zip(a, b)]


def test_matmul_mod_matches_python_ints():
    p = DEFAULT_PRIME
    field = FieldConfig()
    rng = make_rng(2)
    a = field.sample(rng, (5, 7))
    b = field.sample(rng, (7, 4))
    expected = [[sum(int(a[i, k]) * int(b[k, j]) for k in range(7)) % p for j in range(4)] for i in range(5)]
    assert matmul_mod(a, b, p).tolist() == expected

    small = matmul_mod(a % 101, b % 101, 101)
    assert small.tolist() == [[sum(int(a[i, k] % 101) * int(b[k, j] % 101) for k in range(7)) % 101
                               for j in range(4)] for i in range(5)]


def test_op_counter():
    ops.reset()
    matmul_mod(np.ones((3, 4), dtype=np.int64), np.ones((4, 5), dtype=np.int64), 7)
    assert ops.count == 60
    mulmod(np.ones(10, dtype=np.int64), 3, 7)
    assert ops.count == 70
    ops.reset()
    assert ops.count == 0


def test_trunc_poly_basics():
    field = FieldConfig(7)
    f = TruncPoly([1, 2, 3], field)
    g = TruncPoly([6, 5, 4], field)
    assert (f + g).is_zero()
    assert f - f == TruncPoly.zero(3, field)
    assert (-f)[1] == 5
    assert f * 2 == TruncPoly([2, 4, 6], field)
    assert TruncPoly([8, -1], field).coeffs.tolist() == [1, 6]
    assert TruncPoly.monomial(3, 2, 3, field)[2] == 3
    assert TruncPoly.monomial(3, 5, 3, field).is_zero()
    assert TruncPoly.one(4, field).constant == 1
    assert "X^2" in repr(f)
    with raises(DegreeMismatch):
        TruncPoly([], field)
    with raises(DegreeMismatch, match="differ"):
        poly_add(f, TruncPoly([1, 2], field))
    with raises(ValueError, match="Fields differ"):
        poly_add(f, TruncPoly([1, 2, 3], FieldConfig(11)))


def test_poly_mul_truncates():
    field = FieldConfig(101)
    f = TruncPoly([1, 1, 0, 0], field)
    assert poly_mul(f, f) == TruncPoly([1, 2, 1, 0], field)
    assert poly_mul(poly_mul(f, f), f) == TruncPoly([1, 3, 3, 1], field)
    g = TruncPoly([0, 0, 1, 1], field)
    assert poly_mul(g, g).is_zero()
    assert convolve_trunc([1, 2], [3, 4], 101, 3).tolist() == [3, 10, 8]


def test_poly_inv_unit():
    field = FieldConfig()
    rng = make_rng(5)
    for h in (1, 2, 5, 16, 33):
        coeffs = field.sample(rng, h)
        coeffs[0] = coeffs[0] or 1
        q = TruncPoly(coeffs, field)
        assert q * poly_inv_unit(q) == TruncPoly.one(h, field)

    # 1 / (1 - X) = 1 + X + X^2 + ...
    geometric = poly_inv_unit(TruncPoly([1, -1, 0, 0, 0], field))
    assert geometric.coeffs.tolist() == [1, 1, 1, 1, 1]
    with raises(NonUnit):
        poly_inv_unit(TruncPoly([0, 1, 2], field))
