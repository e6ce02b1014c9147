import json
import math
import os
from pathlib import Path

import pytest

import volterra

DATA = Path(os.environ.get("VOLTERRA_DATA", Path(__file__).resolve().parents[2] / "data"))
C0 = 1.0 / math.sqrt(4.0 * math.pi)


def load(name):
    return json.loads((DATA / name).read_text())


def test_expressions():
    ctx = volterra.context(1, 2)
    q = volterra.SymExpr("THETA^(-1)", ctx)
    assert q.degree() == -2
    assert q.d_tau() == volterra.SymExpr("-i*THETA^(-2)", ctx)
    assert abs(q([0.3], [1.2], -0.5j) - 1.0 / (1.44 + 0.5)) < 1e-14
    with pytest.raises(volterra.ParseError):
        volterra.SymExpr("THETA^(", ctx)


def test_parametrix_and_positivity():
    out = volterra.parametrix(load("oscillator1d.json"), 4)
    assert out["compose_check"]["exact"]
    assert out["components"][2]["expr"] == str(volterra.SymExpr("-x1^2*THETA^(-2)", volterra.context(1, 2)))
    with pytest.raises(volterra.PositivityError):
        volterra.parametrix(load("backward1d.json"), 2)
    assert issubclass(volterra.PositivityError, volterra.CertificationError)


def test_heat_coefficients():
    h = volterra.heat_coefficients(load("oscillator1d.json"), J=2, x=[1.0])
    rows = {r["j"]: r for r in h["table"]}
    assert abs(rows[0]["c_j"]["re"] - C0) < 1e-6
    assert abs(rows[2]["c_j"]["re"] + C0) < 1e-6
    a = volterra.mehler_taylor(1.0, 1)
    assert abs(a[1] + 1.0) < 1e-12
    assert volterra.mehler_oracle(0.1, 0.5) == volterra.mehler_oracle(0.1, -0.5)


def test_realize_and_kernel():
    q = volterra.realize(load("heads.json"), method="analytic")
    assert q["certified"]
    k = volterra.kernel(q, t=[-1.0, 0.1])
    neg, pos = (complex(s["re"], s["im"]) for s in k["samples"])
    assert abs(pos) > 0.1
    assert abs(neg) <= 1e-5 * abs(pos)
    with pytest.raises(volterra.InvalidArgument):
        volterra.realize(load("heads.json"), method="borel")


def test_numeric_helpers():
    assert volterra.pseudo_norm([0.0], 0.25, 2) == pytest.approx(0.5)
    r = volterra.rho([1.0], 0.0, 2)
    assert r == pytest.approx(1.0)
    assert abs(volterra.a_epsilon(1.0, [1.0], 0.0, 2) - math.exp(-1.0)) < 1e-14
