from pytest import approx, raises

from dyndist import (
    ConfigError,
    EXPRESSIONS,
    Mode,
    OmegaTable,
    balance,
    default_parameters,
    exponent_report,
    make_rng,
    omega_abc,
)
from dyndist.complexity import OMEGA, TABLE, dual_exponent

TOLERANCE = 0.005


def _balanced(name: str):
    return balance(EXPRESSIONS[name])


def test_omega_table():
    assert OMEGA == approx(2.3729, abs=1e-4)
    assert TABLE(0.0) == 2.0
    assert TABLE(0.2) == 2.0
    assert TABLE(0.5) == approx(2.044183)
    assert TABLE(0.525) == approx(2.044183 + (0.055322 - 0.044183) * (0.025 / 0.027661))
    assert TABLE(3.0) == approx(3.256689 + 1.0)
    ks = [i / 20 for i in range(61)]
    values = [TABLE(k) for k in ks]
    assert all(b >= a for a, b in zip(values, values[1:]))
    assert all(TABLE(k) >= max(2.0, 1.0 + k) for k in ks)


def test_omega_table_validation(tmp_path):
    with raises(ConfigError):
        OmegaTable([0.0, 1.0], [2.0])
    with raises(ConfigError):
        OmegaTable([1.0, 0.5], [2.0, 2.1])
    with raises(ConfigError):
        OmegaTable([0.0, 1.0], [2.4, 2.0])
    good = tmp_path / "table.txt"
    good.write_text("# k omega\n0 2\n\n1 2.5 # top\n")
    table = OmegaTable.load(str(good))
    assert table(0.5) == approx(2.25)
    bad = tmp_path / "bad.txt"
    bad.write_text("0 2 3\n")
    with raises(ConfigError, match="Malformed"):
        OmegaTable.load(str(bad))


def test_omega_abc():
    assert omega_abc(1, 1, 1) == approx(2.3729, abs=1e-4)
    assert omega_abc(1, 1, 0) == 2.0
    assert omega_abc(0.5, 0.5, 0.5) == approx(0.5 * OMEGA)
    assert omega_abc(1, 0, 1) == 2.0
    assert omega_abc(1, 1, 0.5) == approx(TABLE(0.5))
    rng = make_rng(1)
    for _ in range(50):
        a, b, c = (float(x) for x in rng.uniform(0.05, 1.0, size=3))
        expected = omega_abc(a, b, c)
        for permuted in ((a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)):
            assert omega_abc(*permuted) == approx(expected)
        assert expected >= a + b + c - min(a, b, c) - 1e-12


def test_omega_splitting_rule():
    rng = make_rng(2)
    for _ in range(50):
        c, d = (float(x) for x in rng.uniform(0.0, 1.0, size=2))
        assert omega_abc(1, 1, c + d) <= omega_abc(1, 1, c) + d + 1e-12


def test_dual_exponent():
    values, exponent = _balanced("dual")
    assert exponent == approx(1.5286, abs=TOLERANCE)
    assert values["nu"] == approx(0.5285, abs=TOLERANCE)
    assert dual_exponent() == exponent


def test_sssp_exponents():
    values, exponent = _balanced("sssp")
    assert exponent == approx(1.823, abs=TOLERANCE)
    assert values["s"] == approx(0.248, abs=TOLERANCE)
    assert values["mu"] == approx(0.202, abs=TOLERANCE)
    assert EXPRESSIONS["sssp"].preprocessing(values) == approx(2.621, abs=TOLERANCE)


def test_apsp_exponents():
    values, exponent = _balanced("apsp")
    expr = EXPRESSIONS["apsp"]
    assert exponent == approx(1.863, abs=TOLERANCE)
    assert expr.query(values) == approx(0.666, abs=TOLERANCE)
    assert expr.preprocessing(values) == approx(2.708, abs=TOLERANCE)


def test_explicit_apsp_exponents():
    values, exponent = _balanced("apsp-explicit")
    assert exponent == approx(2.0442, abs=TOLERANCE)
    assert exponent == approx(2.045, abs=TOLERANCE)
    assert EXPRESSIONS["apsp-explicit"].preprocessing(values) == approx(2.873, abs=TOLERANCE)


def test_undirected_explicit_exponents():
    values, exponent = _balanced("undirected-explicit")
    assert exponent == approx(2.0, abs=TOLERANCE)
    assert EXPRESSIONS["undirected-explicit"].preprocessing(values) == approx(2.53, abs=TOLERANCE)


def test_diameter_exponents():
    values, exponent = _balanced("diameter")
    assert exponent == approx(1.779, abs=TOLERANCE)
    assert EXPRESSIONS["diameter"].preprocessing(values) == approx(2.624, abs=TOLERANCE)


def test_exact_diameter_exponent():
    _, exponent = _balanced("exact-diameter")
    assert exponent == approx(2.3452, abs=TOLERANCE)


def test_balance_with_fixed_parameter():
    values, exponent = balance(EXPRESSIONS["sssp"], {"s": 0.5})
    assert values["s"] == 0.5
    assert exponent >= _balanced("sssp")[1]


def test_default_parameters():
    values = default_parameters(Mode.apsp)
    assert set(values) == {"s", "mu", "nu"}
    assert values["nu"] == values["mu"]
    assert 0 <= values["s"] <= 1
    assert default_parameters(Mode.complexity) == {}
    assert default_parameters(Mode.diameter15) == default_parameters(Mode.radius)


def test_exponent_report():
    report = exponent_report()
    assert list(report["expression"]) == list(EXPRESSIONS)
    assert {"s", "mu", "nu", "update", "query", "preprocessing"} <= set(report.columns)
    apsp = report[report["expression"] == "apsp"].iloc[0]
    assert apsp["query"] == approx(0.666, abs=TOLERANCE)
