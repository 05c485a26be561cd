import pytest

from hmquintic import heisenberg as hb
from hmquintic.ff import BadPrime
from hmquintic.heisenberg import (
    NoFifthRoot,
    PairPoint,
    ProjectivePoint,
    generator,
    orbit,
    pair_generators,
    verify_relations,
    verify_twist_isomorphism,
)
from hmquintic.hmq import CENSUS_REPS, Y


def test_generator_matrices():
    sigma = generator("sigma", 13)
    assert hb.mat_vec(sigma.matrix, (1, 2, 3, 4, 5), 13) == (2, 3, 4, 5, 1)
    iota = generator("iota", 13)
    assert hb.mat_vec(iota.matrix, (0, 1, 2, 3, 4), 13) == (0, 4, 3, 2, 1)
    tau = generator("tau", 31)
    assert tau.matrix[0][0] == 1
    assert tau.matrix[1][1] == 2  # eps = 2 at p = 31


def test_generator_errors():
    for label in ("tau", "delta"):
        with pytest.raises(NoFifthRoot):
            generator(label, 13)
        with pytest.raises(NoFifthRoot):
            generator(label, 37)
    with pytest.raises(ValueError):
        generator("rho", 13)
    with pytest.raises(BadPrime):
        generator("sigma", 5)


def test_relations_with_fifth_root():
    rel = verify_relations(31)
    assert rel["sigma5"] and rel["iota2"] and rel["mu4"]
    assert rel["iota_sigma_iota"]
    assert rel["tau5"] is True
    assert rel["commutator_scalar_exponent"] == 1


def test_relations_without_fifth_root():
    rel = verify_relations(13)
    assert rel["sigma5"] and rel["iota2"] and rel["mu4"]
    assert rel["tau5"] is None
    assert rel["commutator_scalar_exponent"] is None


def test_normalize_scale_invariance():
    v = (0, 3, 7, 1, 9)
    for c in range(1, 13):
        scaled = tuple(c * x % 13 for x in v)
        assert hb.normalize(scaled, 13) == hb.normalize(v, 13)


def test_point_orbit_under_sigma():
    e0 = ProjectivePoint.of((1, 0, 0, 0, 0), 31)
    orb = orbit(e0, [generator("sigma", 31)])
    assert len(orb) == 5
    # deterministic ordering
    assert orb == sorted(orb, key=lambda s: s.coords)


def test_pair_generators_shape():
    assert len(pair_generators(31)) == 2
    assert len(pair_generators(37)) == 1  # no fifth root, sigma only


def test_pair_orbit_sizes_p31():
    gens = pair_generators(31)
    expected = {"regular1": 25, "regular2": 25, "sigma1": 5, "sigma2": 5, "tau": 5}
    for name, (x, z) in CENSUS_REPS.items():
        seed = PairPoint.of(x, z, 31)
        assert len(orbit(seed, gens)) == expected[name], name


def test_pair_orbit_sizes_p37():
    gens = pair_generators(37)
    seed = PairPoint.of(*CENSUS_REPS["regular1"], 37)
    assert len(orbit(seed, gens)) == 5


def test_zero_set_invariance_p31():
    """The y-quintic's F_p zero set is stable under sigma and tau."""
    S = hb._det0_set(Y, 31)
    for label in ("sigma", "tau"):
        g = generator(label, 31)
        image = {hb.normalize(hb.mat_vec(g.matrix, v, 31), 31) for v in S}
        assert image == S


def test_twist_isomorphism_p31():
    rep = verify_twist_isomorphism(31)
    assert rep["ok"] is True
    assert rep["n_target"] == 38710
    assert rep["n_source"] == 38710
    assert rep["matched_sign"] == 1
    assert rep["delta_bijection"] and rep["delta_inverse_bijection"]
    assert rep["epsilon"] == 2 and rep["sqrt5"] == 6


def test_twist_isomorphism_p41():
    rep = verify_twist_isomorphism(41)
    assert rep["ok"] is True
    assert rep["n_target"] == 85185
    assert rep["sqrt5"] == 13


def test_twist_needs_fifth_root():
    with pytest.raises(NoFifthRoot):
        verify_twist_isomorphism(13)
