import math

import numpy as np
import pytest
from scipy.linalg import fractional_matrix_power

from qdecoupling.channels import generalized_dephasing, identity_channel
from qdecoupling.exponents import (
    channel_coding_exponent,
    comparator_exponent,
    critical_rate,
    decoupling_achievable_exponent,
    distillation_exponent,
    is_maximally_correlated,
    merging_exponents,
    standard_decoupling_exponents,
    sup_on_interval,
)
from qdecoupling.linalg import tensor
from qdecoupling.states import (
    State,
    make_rng,
    max_entangled,
    maximally_correlated,
    random_density,
    random_pure,
    random_state,
)


def test_sup_on_interval_examples():
    # linear objective: supremum at the right endpoint
    c = sup_on_interval(lambda s: 2 * 0.3 * s, 1e-4, 1.0)
    assert c.sup_value == pytest.approx(0.6, abs=1e-8)
    assert c.argmax_s == pytest.approx(1.0, abs=1e-6)
    # concave objective with an interior maximum
    c = sup_on_interval(lambda s: s * (1 - s), 1e-4, 1.0)
    assert c.sup_value == pytest.approx(0.25, abs=1e-10)
    assert c.argmax_s == pytest.approx(0.5, abs=1e-5)
    # refinement never loses to the raw grid
    assert c.sup_value >= max(v for _, v in c.grid)


def test_sup_on_interval_rejects_nonfinite():
    with pytest.raises(ValueError):
        sup_on_interval(lambda s: math.inf, 1e-4, 1.0)


def product_rho_ae(rng, da=4, de=2):
    sig = random_density(de, de, rng)
    return State(tensor(np.eye(da) / da, sig), (("A", da), ("E", de)))


def test_product_instance_closed_form(rng):
    rho = product_rho_ae(rng)
    # H(A|E) = log|A| for the maximally mixed product, so f(s) = 2rs
    for r in (0.2, 0.5, 0.9):
        res = standard_decoupling_exponents(rho, 2.0, r)
        assert res.achievable == pytest.approx(2 * r, abs=1e-8)
        assert res.converse == math.inf
        assert res.converse_diverges
    assert critical_rate(rho) == pytest.approx(-1.0, abs=1e-6)


def test_max_entangled_instance_closed_form():
    for d in (2, 3):
        phi = max_entangled(d, ("A", "E"))
        # H(A|E) = -log d at every order, so f(s) = s(2r - 2 log d)
        for r in (0.3, d * 0.7, 2.0 * d):
            res = standard_decoupling_exponents(phi, math.log2(d), r)
            assert res.achievable == pytest.approx(max(0.0, 2 * r - 2 * math.log2(d)), abs=1e-8)
        assert critical_rate(phi) == pytest.approx(0.5 * math.log2(d), abs=1e-6)


def test_rate_validation(rng):
    rho = product_rho_ae(rng)
    with pytest.raises(ValueError):
        standard_decoupling_exponents(rho, 2.0, -0.1)
    with pytest.raises(ValueError):
        comparator_exponent(rho, 2.0, 0.0)


def exactness_cases():
    out = []
    seed = 0
    while len(out) < 6 and seed < 60:
        rng = make_rng(seed)
        rho = random_pure((("A", 4), ("E", int(rng.integers(2, 5)))), rng)
        if critical_rate(rho) > 0.05:
            out.append(rho)
        seed += 1
    return out


def test_exactness_mechanism():
    for rho in exactness_cases():
        rc = critical_rate(rho)
        lo = standard_decoupling_exponents(rho, 2.0, 0.9 * rc)
        assert lo.exact
        assert abs(lo.achievable - lo.converse) <= 1e-6
        hi = standard_decoupling_exponents(rho, 1.5 * rc if 1.5 * rc > 0 else 0.1, 1.5 * rc)
        assert not hi.exact
        assert hi.achievable <= hi.converse + 1e-6


def test_comparator_never_exceeds_achievable():
    for seed in range(4):
        rng = make_rng(seed + 100)
        rho = random_state((("A", 4), ("E", 2)), int(rng.integers(1, 5)), rng)
        for r in (0.4, 1.1):
            res = standard_decoupling_exponents(rho, 2.0, r)
            comp = comparator_exponent(rho, 2.0, r, n_grid=10)
            assert comp <= res.achievable + 1e-6


def test_decoupling_achievable_exponent_matches_partial_trace_route(rng):
    from qdecoupling.decoupling import standard_instance

    rho = random_pure((("A", 4), ("E", 2)), rng)
    inst = standard_instance(rho, 2, 2)
    val = decoupling_achievable_exponent(rho, inst.channel)
    assert val >= 0.0
    assert math.isfinite(val)


def test_merging_max_entangled_closed_forms():
    # Phi_AR x spectator B: H(A|R) = -log d, so only cost mode applies
    d = 2
    psi = max_entangled(d, ("A", "R")).tensor_with(
        State(np.diag([1.0, 0.0]).astype(complex), (("B", 2),))
    )
    for r in (1.4, 2.0, 3.0):
        res = merging_exponents(psi, ["A"], ["B"], ["R"], r, "cost")
        # H_{1+s}(A|R) = -log d at every order: f(s) = (s/2)(r - log d)
        assert res.achievable == pytest.approx(0.5 * (r - math.log2(d)), abs=1e-6)
        # flat spectrum: the s > 0 supremum of the linear objective diverges
        assert res.converse_diverges and res.converse == math.inf
        assert res.duality_gap <= 1e-6
    # Phi_AB x spectator R: H(A|R) = log d, distill mode
    psi2 = max_entangled(d, ("A", "B")).tensor_with(
        State(np.diag([1.0, 0.0]).astype(complex), (("R", 2),))
    )
    for r in (0.2, 0.7):
        res = merging_exponents(psi2, ["A"], ["B"], ["R"], r, "distill")
        assert res.achievable == pytest.approx(0.5 * (math.log2(d) - r), abs=1e-6)
        assert res.duality_gap <= 1e-6


def test_merging_preconditions(rng):
    psi = random_pure((("A", 2), ("B", 2), ("R", 3)), rng)
    with pytest.raises(ValueError):
        merging_exponents(psi, ["A"], ["B"], ["R"], 0.5, "teleport")
    mixed = random_state((("A", 2), ("B", 2), ("R", 2)), 3, rng)
    with pytest.raises(ValueError):
        merging_exponents(mixed, ["A"], ["B"], ["R"], 0.5, "distill")


def test_is_maximally_correlated(rng):
    phi = max_entangled(3, ("C", "D"))
    assert is_maximally_correlated(phi)
    assert not is_maximally_correlated(random_state((("C", 2), ("D", 2)), 2, rng))
    assert not is_maximally_correlated(random_state((("C", 2), ("D", 3)), 2, rng))


def test_distillation_max_entangled_closed_form():
    phi = max_entangled(3, ("C", "D"))
    for r in (0.2, 0.8, 1.3):
        res = distillation_exponent(phi, ["C"], ["D"], r)
        # I(C>D) = log 3 at every order: f(s) = (s/2)(log 3 - r)
        assert res.achievable == pytest.approx(max(0.0, 0.5 * (math.log2(3) - r)), abs=1e-6)
        assert math.isfinite(res.converse)
    generic = random_state((("C", 2), ("D", 2)), 2, make_rng(3))
    res = distillation_exponent(generic, ["C"], ["D"], 0.3)
    assert res.converse == math.inf
    assert not res.exact
    with pytest.raises(ValueError):
        distillation_exponent(phi, ["C"], ["D"], -0.2)


def classical_dephasing_oracle(gram: np.ndarray, r: float) -> float:
    """Independent route: closed scalar formula for a maximally correlated Choi."""
    d = gram.shape[0]
    c = gram.T / d

    def coh(s):
        alpha = 1.0 / (1.0 + s)
        ca = fractional_matrix_power(c, alpha)
        total = float(np.sum(np.real(np.diag(ca)) ** (1.0 / alpha)))
        return (alpha / (alpha - 1.0)) * math.log2(total)

    from scipy.optimize import minimize_scalar

    res = minimize_scalar(lambda s: -0.5 * s * (coh(s) - r), bounds=(1e-6, 1 - 1e-9),
                          method="bounded", options={"xatol": 1e-12})
    return max(0.0, float(-res.fun))


def test_channel_coding_identity():
    for r in (0.2, 0.5, 0.9):
        res = channel_coding_exponent(identity_channel(2), r, restarts=3)
        assert res.achievable == pytest.approx(0.5 * (1.0 - r), abs=1e-4)
        assert res.converse == math.inf


def test_channel_coding_dephasing_matches_classical_oracle():
    g = np.array([[1.0, 0.5], [0.5, 1.0]], dtype=complex)
    ch = generalized_dephasing(g)
    for r in (0.05, 0.2, 0.5):
        res = channel_coding_exponent(ch, r, dephasing=True)
        assert res.achievable == pytest.approx(classical_dephasing_oracle(g, r), abs=1e-8)
        assert math.isfinite(res.converse)
