"""Smoke test for the entcost Python extension.

Run with `python python/smoke_test.py` or `pytest python/smoke_test.py`
after installing the wheel built from crates/py.
"""

import json
import math
from pathlib import Path

import entcost

FIXTURES = Path(__file__).resolve().parent.parent / "crates" / "core" / "fixtures"


def test_bell_eof_is_one_bit():
    rho = entcost.read_state(FIXTURES / "bell.json")
    assert isinstance(rho, entcost.DensityMatrix)
    assert abs(entcost.eof_two_qubit(rho) - math.log(2)) < 1e-12
    report = entcost.eof_minimize(rho, restarts=4, seed=1)
    assert abs(report.value_bits - 1.0) < 1e-6
    assert isinstance(report.witness, entcost.Ensemble)
    assert json.loads(report.to_json())["witness"]["kind"] == "ensemble"


def test_werner_matches_wootters():
    rho = entcost.fixture("werner", p=0.8)
    opt = entcost.eof_minimize(rho, restarts=10, seed=3).value_nats
    assert abs(opt - entcost.eof_two_qubit(rho)) < 1e-3


def test_density_roundtrip_and_partial_trace():
    rho = entcost.DensityMatrix([[0.5, 0.5], [0.5, 0.5]])
    assert rho.rank() == 1
    assert abs(rho.entropy()) < 1e-12
    back = entcost.DensityMatrix.from_json(rho.to_json())
    assert max(abs(a - b) for ra, rb in zip(rho.matrix(), back.matrix()) for a, b in zip(ra, rb)) < 1e-15
    bell = entcost.fixture("bell")
    red = bell.partial_trace("A")
    assert abs(red.entropy() - math.log(2)) < 1e-12


def test_dilution_simulation_within_bounds():
    psi = entcost.PureState.from_schmidt([0.9, 0.1])
    ens = entcost.Ensemble([1.0], [psi])
    assert abs(entcost.dilution_fidelity(ens, 1) ** 2 - 0.9) < 1e-12
    for variant in ("orthogonal-flag", "weyl-teleport"):
        r = entcost.simulate_dilution(ens, 1, variant)
        assert abs(r.fidelity_sim ** 2 - 0.81) < 1e-9
        assert r.lower_bound - 1e-9 <= r.fidelity_sim ** 2 <= r.upper_bound + 1e-9
        assert abs(r.fidelity_formula ** 2 - 0.9) < 1e-12
        assert r.variant == variant


def test_curve_and_converse():
    ens = entcost.Ensemble.from_json((FIXTURES / "qubit_schmidt_0.9_0.1.json").read_text())
    s = -(0.9 * math.log(0.9) + 0.1 * math.log(0.1))
    rows = entcost.achievability_curve(ens, [s + 0.1], [4, 8])
    assert [r["n"] for r in rows] == [4, 8]
    for r in rows:
        r_eff = entcost.effective_rate(r["n"], r["m_rank"])
        assert r["m_rank"] == entcost.rate_to_rank(r["n"], s + 0.1)
        bound = min(entcost.converse_bound(ens, g / 10, r_eff, r["n"]) for g in range(-20, 21))
        assert bound >= r["f2"] - 1e-9


def test_spectral_sweep_midpoint():
    rho = entcost.DensityMatrix([[0.9, 0], [0, 0.1]])
    omega = entcost.DensityMatrix([[0.5, 0], [0, 0.5]])
    sweep = entcost.spectral_sweep(rho, omega, [24])
    est = sweep.estimates(0.1)[0]
    d = entcost.relative_entropy(rho, omega)
    assert abs(est["midpoint"] - d) < 0.05
    assert sweep.to_csv().startswith("n,gamma_nats,f_value\n")
    cond = entcost.conditional_sweep(entcost.Ensemble([1.0], [entcost.PureState.from_schmidt([0.9, 0.1])]), [1, 4])
    assert all(b >= a - 1e-12 for row in cond.f_values for a, b in zip(row, row[1:]))


def test_errors_raise():
    try:
        entcost.fixture("werner", p=1.5)
    except entcost.EntcostError as e:
        assert str(e).startswith("invalid_parameter")
    else:
        raise AssertionError("expected EntcostError")


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_") and callable(fn):
            fn()
            print(f"ok {name}")
