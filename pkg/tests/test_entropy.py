import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_mac
from macap import (DomainError, Mac, ValidationError, beta_I_modulus, effective_channel,
                   h_n_max, modified_binary_entropy, mutual_information, shannon_entropy)
from macap.entropy import Modulus

LN2 = math.log(2)


def mi_joint(mac, p, q):
    # oracle: I = H(Z) - H(Z | B1 B2) from the joint distribution directly
    t = mac.transition
    joint = np.einsum("zab,a,b->zab", t, p, q)
    pz = joint.sum(axis=(1, 2))
    hz = -sum(v * math.log(v) for v in pz if v > 0)
    hcond = 0.0
    for a in range(mac.d1):
        for b in range(mac.d2):
            for z in range(mac.dout):
                if t[z, a, b] > 0:
                    hcond -= p[a] * q[b] * t[z, a, b] * math.log(t[z, a, b])
    return hz - hcond


def rand_simplex(rng, d):
    return rng.dirichlet(np.ones(d) * 0.7)


class TestEntropy:
    def test_examples(self):
        assert shannon_entropy([0.25] * 4, "bits") == pytest.approx(2.0)
        assert shannon_entropy([1, 0, 0]) == 0.0
        assert shannon_entropy([0.8, 0.2]) == pytest.approx(0.5004, abs=1e-4)

    def test_rejects_unnormalized(self):
        with pytest.raises(ValidationError):
            shannon_entropy([0.5, 0.4])
        with pytest.raises(ValidationError):
            shannon_entropy([1.1, -0.1])

    def test_tolerance_edge(self):
        shannon_entropy([0.5, 0.5 + 5e-10])
        with pytest.raises(ValidationError):
            shannon_entropy([0.5, 0.5 + 5e-9])

    def test_modified_binary_entropy(self):
        assert modified_binary_entropy(0) == 0
        assert modified_binary_entropy(0.5) == pytest.approx(LN2)
        assert modified_binary_entropy(0.75) == pytest.approx(LN2)
        assert modified_binary_entropy(0.2) == pytest.approx(shannon_entropy([0.2, 0.8]))
        with pytest.raises(DomainError):
            modified_binary_entropy(-0.1)


class TestMac:
    def test_rejects_bad_column(self):
        t = np.array([[[1, 0.5], [0.5, 0.5]], [[0, 0.4], [0.5, 0.5]]])
        with pytest.raises(ValidationError, match=r"b1=0, b2=1"):
            Mac(t)

    def test_zero_output_row_accepted(self):
        t = np.zeros((3, 2, 2))
        t[0] = 1
        assert Mac(t).dout == 3

    def test_immutable(self, nf1):
        with pytest.raises(ValueError):
            nf1.transition[0, 0, 0] = 0.3


class TestEffectiveChannel:
    def test_nf1_point_mass(self, nf1):
        ch = effective_channel(nf1, [1, 0])
        assert ch.aq[:, 0] == pytest.approx([1, 0])
        assert ch.bq[0] == 0

    def test_point_mass_marginalizes(self):
        mac = random_mac(np.random.default_rng(1), 3, 4, 5)
        for b2 in range(4):
            ch = effective_channel(mac, np.eye(4)[b2])
            assert np.allclose(ch.aq, mac.transition[:, :, b2])

    def test_nf2_bq(self, nf2):
        ch = effective_channel(nf2, [0.5, 0.5])
        assert ch.bq == pytest.approx([LN2 / 2, LN2 / 2])

    def test_dimension_mismatch(self, nf1):
        with pytest.raises(ValidationError):
            effective_channel(nf1, [1 / 3] * 3)


class TestMutualInformation:
    def test_noise_free_values(self, nf1, nf2):
        assert mutual_information(nf2, [0.5, 0.5], [0.5, 0.5]) == pytest.approx(0.5 * LN2)
        want = shannon_entropy([0.8, 0.2]) - 0.4 * LN2
        assert mutual_information(nf1, [1, 0], [0.6, 0.4]) == pytest.approx(want)
        assert want == pytest.approx(0.2231, abs=1e-4)

    def test_point_masses_give_zero(self):
        mac = random_mac(np.random.default_rng(2), 3, 3, 4)
        assert mutual_information(mac, [0, 1, 0], [0, 0, 1]) == pytest.approx(0, abs=1e-12)

    @pytest.mark.property
    def test_matches_joint_oracle(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            d1, d2, do = rng.integers(1, 5, size=3) + 1
            mac = random_mac(rng, d1, d2, do, sparsity=0.3)
            p, q = rand_simplex(rng, d1), rand_simplex(rng, d2)
            assert mutual_information(mac, p, q) == pytest.approx(mi_joint(mac, p, q), abs=1e-10)

    @pytest.mark.property
    def test_range_and_swap(self):
        rng = np.random.default_rng(4)
        for _ in range(100):
            d1, d2, do = rng.integers(1, 5, size=3) + 1
            mac = random_mac(rng, d1, d2, do, sparsity=0.2)
            p, q = rand_simplex(rng, d1), rand_simplex(rng, d2)
            v = mutual_information(mac, p, q)
            assert -1e-9 <= v <= min(math.log(do), math.log(d1 * d2)) + 1e-9
            assert mutual_information(mac.swapped(), q, p) == pytest.approx(v, abs=1e-12)

    @pytest.mark.property
    def test_aq_left_stochastic(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            mac = random_mac(rng, 3, 4, 5, sparsity=0.3)
            ch = effective_channel(mac, rand_simplex(rng, 4))
            assert np.allclose(ch.aq.sum(axis=0), 1, atol=1e-9)
            assert np.all(ch.aq >= 0)
            assert np.all(ch.bq >= 0) and np.all(ch.bq <= h_n_max(mac) + 1e-12)


class TestBetaI:
    def test_h_n_max(self, nf1):
        assert h_n_max(nf1) == pytest.approx(LN2)
        ident = np.zeros((4, 2, 2))
        for a in range(2):
            for b in range(2):
                ident[2 * a + b, a, b] = 1
        assert h_n_max(Mac(ident)) == 0
        assert h_n_max(Mac(np.full((5, 2, 3), 0.2))) == pytest.approx(math.log(5))

    def test_values(self, nf1):
        beta = beta_I_modulus(nf1)
        assert beta(0) == 0
        assert beta(1) == pytest.approx(2 * LN2)

    def test_monotone(self):
        beta = beta_I_modulus(random_mac(np.random.default_rng(6), 3, 3, 6))
        xs = np.linspace(0, 2, 401)
        vals = [beta(x) for x in xs]
        assert np.all(np.diff(vals) >= 0)

    @pytest.mark.property
    def test_lipschitz_like_mi(self):
        # |I(p,q) - I(p,q')| <= beta_I(||q - q'||_1) for fixed p
        rng = np.random.default_rng(8)
        for _ in range(100):
            d1, d2, do = rng.integers(1, 5, size=3) + 1
            mac = random_mac(rng, d1, d2, do, sparsity=0.3)
            beta = beta_I_modulus(mac)
            p = rand_simplex(rng, d1)
            for _ in range(5):
                q, q2 = rand_simplex(rng, d2), rand_simplex(rng, d2)
                if rng.random() < 0.5:  # also probe small steps, where h-bar dominates
                    q2 = q + 1e-3 * (q2 - q)
                diff = abs(mutual_information(mac, p, q) - mutual_information(mac, p, q2))
                assert diff <= beta(np.abs(q - q2).sum()) + 1e-9


class TestModulus:
    def test_linear_algebra(self):
        m = Modulus.linear(2.0).compose(Modulus.linear(1.0, cap=2.0))
        assert m.is_linear and m.slope == 2.0 and m.cap == 2.0
        assert m(5.0) == 4.0
        s = Modulus.linear(1.0).scaled(3.0) + Modulus.linear(2.0)
        assert s.slope == 5.0

    @given(st.floats(0, 10), st.floats(0, 10))
    @settings(max_examples=200, deadline=None)
    def test_composed_monotone(self, x, y):
        m = beta_I_modulus(Mac([[[1.0, 0.5]], [[0.0, 0.5]]])).compose(Modulus.linear(1.0, cap=2.0))
        lo, hi = sorted((x, y))
        assert m(lo) <= m(hi) + 1e-15
