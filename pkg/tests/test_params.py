import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import constants
from scipy.optimize import brentq

from ptomech import DomainError, RegimeTag, SystemParams, classify, j_ep, supermodes, thermal_occupation, validate
from ptomech.params import conventional, params_from_json

rates = st.floats(0.0, 3.0, allow_nan=False)


def test_defaults_valid():
    p = validate(SystemParams())
    assert (p.omega_m, p.gamma, p.gamma_m, p.g) == (23.0, 1.0, 1.63e-3, 7.4e-5)
    assert p.delta == p.omega_m


@pytest.mark.parametrize(
    "field,value",
    [("delta", -1.0), ("delta", 0.0), ("n_th", -1.0), ("n_a", -0.1), ("J", -0.2), ("alpha_in", -1.0),
     ("gamma_m", 0.0), ("omega_m", -2.0), ("g", -1e-5), ("kappa", math.nan)],
)
def test_validate_rejects(field, value):
    with pytest.raises(DomainError) as err:
        validate(SystemParams(**{field: value}))
    assert err.value.field == field


def test_loss_loss_kappa_valid():
    assert validate(SystemParams(kappa=-0.1)).kappa == -0.1


def test_delta_zero_allowed_without_blue_requirement():
    assert validate(SystemParams(delta=0.0), require_blue=False).delta == 0.0


def test_validate_normalizes_gamma():
    p = validate(SystemParams(gamma=2.0, kappa=0.2, J=0.4, omega_m=46.0, alpha_in=10.0))
    assert p.gamma == 1.0
    assert p.kappa == pytest.approx(0.1)
    assert p.J == pytest.approx(0.2)
    assert p.alpha_in == pytest.approx(10.0 / math.sqrt(2.0))


def test_supermodes_at_ep():
    sm = supermodes(SystemParams(kappa=0.1, delta=1.0, J=0.275))
    assert sm.omega_plus == pytest.approx(1j - 0.225, abs=1e-12)
    assert sm.omega_minus == pytest.approx(1j - 0.225, abs=1e-12)


def test_supermodes_balanced_ep_vanish():
    sm = supermodes(SystemParams(kappa=1.0, delta=0.0, J=0.5))
    assert abs(sm.omega_plus) < 1e-15 and abs(sm.omega_minus) < 1e-15


def test_supermodes_uncoupled():
    sm = supermodes(SystemParams(kappa=0.8, delta=0.0, J=0.0))
    assert sm.omega_plus == pytest.approx(0.4, abs=1e-15)
    assert sm.omega_minus == pytest.approx(-0.5, abs=1e-15)


@pytest.mark.parametrize(
    "kappa,J,tag",
    [(0.1, 0.2, RegimeTag.BROKEN), (0.8, 0.45, RegimeTag.EP), (0.8, 0.8, RegimeTag.UNBROKEN)],
)
def test_classify_examples(kappa, J, tag):
    reg = classify(SystemParams(kappa=kappa, J=J))
    assert reg.tag is tag
    assert reg.j_ep == pytest.approx((1 + kappa) / 4, abs=1e-15)


@given(kappa=st.floats(-0.9, 2.0), J=rates, delta=st.floats(0.0, 30.0))
def test_trace_identity(kappa, J, delta):
    p = SystemParams(kappa=kappa, J=J, delta=delta)
    sm = supermodes(p)
    expected = 2j * delta - (1 - kappa) / 2
    assert abs(sm.omega_plus + sm.omega_minus - expected) <= 1e-12 * max(1.0, abs(expected))


@given(kappa=st.floats(-0.9, 2.0), J=rates, delta=st.floats(0.0, 30.0))
def test_split_is_either_frequency_or_linewidth(kappa, J, delta):
    s = supermodes(SystemParams(kappa=kappa, J=J, delta=delta)).splitting
    assert min(abs(s.real), abs(s.imag)) < 1e-12


@given(kappa=st.floats(-0.9, 2.0), delta=st.floats(0.0, 30.0))
def test_coalescence_and_growth_near_ep(kappa, delta):
    p = SystemParams(kappa=kappa, delta=delta)
    jep = j_ep(p)
    assert abs(supermodes(p.replace(J=jep)).splitting) < 1e-12
    for sign in (-1, 1):
        gaps = [abs(supermodes(p.replace(J=jep + sign * h)).splitting) for h in (1e-4, 1e-3, 1e-2)]
        if jep - 1e-2 > 0 or sign > 0:
            assert gaps[0] < gaps[1] < gaps[2]


@given(kappa=st.floats(-0.9, 2.0), J=rates, c=st.floats(0.01, 100.0))
def test_classify_scale_invariant(kappa, J, c):
    p = SystemParams(kappa=kappa, J=J)
    q = SystemParams(gamma=c, kappa=c * kappa, J=c * J)
    assert classify(p).tag is classify(validate(q, require_blue=False)).tag


def test_thermal_occupation_limits():
    assert thermal_occupation(23e6, 0.0) == 0.0
    f = constants.k * 1.0 * math.log(2.0) / constants.h
    assert thermal_occupation(f, 1.0) == pytest.approx(1.0, rel=1e-12)


def test_thermal_occupation_fig4_scale():
    # independent inversion of the Bose law for n = 300 at 23 MHz
    t300 = brentq(lambda t: 1.0 / math.expm1(constants.h * 23e6 / (constants.k * t)) - 300.0, 0.01, 10.0)
    assert t300 == pytest.approx(0.33, abs=0.005)
    assert thermal_occupation(23e6, t300) == pytest.approx(300.0, rel=1e-9)
    assert thermal_occupation(23e6, 0.33) == pytest.approx(300.0, rel=0.01)


def test_from_si_normalizes():
    gamma = 2 * math.pi * 1e6
    p = SystemParams.from_si(gamma, omega_m=23 * gamma, kappa=0.1 * gamma, J=0.8 * gamma,
                             gamma_m=1.63e-3 * gamma, g=7.4e-5 * gamma, alpha_in=3e3 * math.sqrt(gamma))
    ref = SystemParams()
    for name in ("omega_m", "kappa", "J", "gamma_m", "g", "alpha_in", "delta"):
        assert getattr(p, name) == pytest.approx(getattr(ref, name), rel=1e-12)


def test_conventional():
    p = conventional(SystemParams())
    assert p.J == 0.0 and p.kappa == -1.0


def test_params_json(tmp_path):
    path = tmp_path / "p.json"
    path.write_text(json.dumps({"kappa": 0.8, "J": 0.42}))
    p = params_from_json(str(path), J=0.5, chi=None)
    assert (p.kappa, p.J, p.chi) == (0.8, 0.5, 0.0)
    path.write_text(json.dumps({"kappa": 0.8, "bogus": 1}))
    with pytest.raises(DomainError):
        params_from_json(str(path))


def test_replace_keeps_immutability():
    p = SystemParams()
    with pytest.raises(Exception):
        p.kappa = 3.0
    assert p.replace(kappa=0.3).kappa == 0.3 and p.kappa == 0.1
    assert np.isclose(SystemParams(delta=None, omega_m=10.0).delta, 10.0)
