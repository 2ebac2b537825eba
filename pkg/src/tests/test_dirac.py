"""
Tests for the Clifford matrices, the finite-difference Dirac operator (polar,
factored and Cartesian) and the 2x2 operator norm.
"""

import math
import os
import sys

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

sys.path.append(os.path.join(os.path.dirname(__file__), '..', '..'))

from src.verifier.dirac import (
    FDStencil,
    apply_dirac_cartesian,
    apply_dirac_fd,
    clifford,
    dirac_local,
    dirac_residual,
    dirac_squared_residual,
    local_residual_terms,
    opnorm2,
    relative_residual,
)
from src.verifier.errors import ConfigurationError, StencilError
from src.verifier.extrange import xc_from_complex, xc_to_complex
from src.verifier.kelvin import gaussian_spinor, polynomial_spinor
from src.verifier.radii import band_coordinate, log_rho
from src.verifier.spinor_fields import (
    PolarPoint,
    PotentialValue,
    Region,
    bigE_field,
    build_counterexample,
    local_u_in,
    plain_field,
)


parts = st.floats(min_value=-10.0, max_value=10.0)
matrices = st.lists(parts, min_size=8, max_size=8).map(
    lambda p: np.array([[complex(p[0], p[1]), complex(p[2], p[3])], [complex(p[4], p[5]), complex(p[6], p[7])]])
)


def as_potential(m: np.ndarray, scale: float = 0.0) -> PotentialValue:
    return PotentialValue(tuple(tuple(xc_from_complex(complex(x)) for x in row) for row in m), scale)


def random_unitary(rng: np.random.Generator) -> np.ndarray:
    q, _ = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))
    return q


@pytest.fixture(scope="module")
def mild():
    return build_counterexample(0.1, preset="mild")


@pytest.fixture(scope="module")
def paper():
    return build_counterexample(0.1)


class TestClifford:
    @pytest.mark.parametrize("n", [2, 3])
    def test_anticommutation(self, n):
        cl = clifford(n)
        eye = np.eye(cl.size)
        for i, a in enumerate(cl.matrices):
            for j, b in enumerate(cl.matrices):
                expected = 2.0 * eye if i == j else 0.0 * eye
                assert np.allclose(a @ b + b @ a, expected), (i, j)
            assert np.allclose(a, a.conj().T)

    def test_sizes(self):
        assert clifford(2).size == 2
        assert clifford(3).size == 4
        with pytest.raises(ConfigurationError):
            clifford(4)


class TestStencil:
    @pytest.mark.parametrize("h,order", [(0.0, 2), (-1e-3, 2), (1e-13, 2), (1e-3, 3)])
    def test_invalid(self, h, order):
        with pytest.raises(StencilError):
            FDStencil(h, order)

    def test_constant_is_exact_zero(self):
        for order in (2, 4):
            assert FDStencil(1e-3, order).derivative(lambda h: 2.5 + 1j) == 0

    def test_exponential(self):
        assert abs(FDStencil(1e-5, 2).derivative(math.exp) - 1.0) < 1e-9
        assert abs(FDStencil(1e-3, 4).derivative(math.exp) - 1.0) < 1e-11
        assert FDStencil(1e-3, 4).reach == pytest.approx(2e-3)


class TestPolarDirac:
    @pytest.mark.parametrize("k", [1, 2, 5, 10])
    def test_homogeneous_spinors_are_annihilated(self, k):
        field = bigE_field(k)
        for p in (PolarPoint(0.2, 0.5), PolarPoint(-40.0, -2.0)):
            du, vu, u_over_r = local_residual_terms(field(p), PotentialValue.zero(-p.t), FDStencil())
            assert all(v is None for v in vu)
            assert relative_residual(du, vu, u_over_r) < 1e-7

    def test_polar_matches_cartesian(self):
        def cartesian(x):
            return np.array([x[0] ** 2 + 1j * x[1], x[0] * x[1] - 0.5], dtype=complex)

        def polar(t, theta):
            r = math.exp(t)
            return tuple(cartesian(np.array([r * math.cos(theta), r * math.sin(theta)])))

        p = PolarPoint(0.1, 0.7)
        got = apply_dirac_fd(plain_field(polar), p)
        x = np.array([math.exp(0.1) * math.cos(0.7), math.exp(0.1) * math.sin(0.7)])
        ref = apply_dirac_cartesian(cartesian, x)
        for a, b in zip(got.components, ref):
            assert abs(xc_to_complex(a) - b) < 1e-6 * max(1.0, abs(b))

    def test_factored_frames_at_paper_scale(self, paper):
        p = PolarPoint(band_coordinate(paper.schedule, 9, 0, 0.5), 0.3)
        out = dirac_local(local_u_in(paper, Region.band(9, 0), p), FDStencil())
        # u = z^9 sits in the upper slot, so only the lower output is present, one frame down
        assert out[0] is None
        assert out[1] is not None and out[1][0] == 9 * p.t - p.t


class TestResidual:
    @pytest.mark.parametrize("j", range(6))
    def test_identity_mild_bands(self, mild, j):
        s = mild.schedule
        for k in (8, 9, 10):
            for u in (0.15, 0.5, 0.85):
                for theta in (-2.0, 0.4, 3.0):
                    p = PolarPoint(band_coordinate(s, k, j, u), theta)
                    assert dirac_residual(mild, p, region=Region.band(k, j)) < 1e-6, (k, j, u)

    @pytest.mark.parametrize("j", range(6))
    def test_identity_paper_bands(self, paper, j):
        s = paper.schedule
        for k in (8, 9, 10):
            for u in (0.2, 0.5, 0.8):
                p = PolarPoint(band_coordinate(s, k, j, u), 1.0)
                assert dirac_residual(paper, p, region=Region.band(k, j)) < 1e-5, (k, j, u)

    def test_classifies_when_region_omitted(self, mild):
        p = PolarPoint(band_coordinate(mild.schedule, 9, 2, 0.5), 0.0)
        assert dirac_residual(mild, p) == dirac_residual(mild, p, region=Region.band(9, 2))

    def test_zero_beyond_support(self, paper):
        assert dirac_residual(paper, PolarPoint(0.5, 1.0)) == 0.0

    def test_outer_cap_defect(self, mild):
        # the stated outer potential omits the 1/eta factor, so the identity fails where 0 < eta < 1
        t = 0.5 * log_rho(mild.schedule, mild.k0, 0)
        assert dirac_residual(mild, PolarPoint(t, 0.2), region=Region.outer()) > 1e-3

    def test_stencil_crossing_seam(self, mild):
        lo = log_rho(mild.schedule, 8, 1)
        with pytest.raises(StencilError):
            dirac_residual(mild, PolarPoint(lo + 1e-6, 0.0), region=Region.band(8, 0))


class TestOpnorm:
    @given(st.lists(st.floats(min_value=-10.0, max_value=10.0), min_size=8, max_size=8),
           st.floats(min_value=-50.0, max_value=50.0))
    @settings(max_examples=100)
    def test_matches_svd(self, parts, scale):
        m = np.array([[complex(parts[0], parts[1]), complex(parts[2], parts[3])],
                      [complex(parts[4], parts[5]), complex(parts[6], parts[7])]])
        ref = np.linalg.svd(m, compute_uv=False)[0]
        v = PotentialValue(tuple(tuple(xc_from_complex(x) for x in row) for row in m), scale)
        got = opnorm2(v)
        if ref < 1e-300:
            assert got.is_zero or got.logmag - scale < -600
        else:
            assert abs(got.logmag - (scale + math.log(ref))) < 1e-9

    def test_zero_matrix(self):
        assert opnorm2(PotentialValue.zero(3.0)).is_zero

    @given(matrices, matrices)
    @settings(max_examples=200)
    def test_submultiplicative(self, a, b):
        na, nb, nab = opnorm2(as_potential(a)), opnorm2(as_potential(b)), opnorm2(as_potential(a @ b))
        if na.is_zero or nb.is_zero:
            assert nab.is_zero
            return
        if not nab.is_zero:
            assert nab.logmag <= na.logmag + nb.logmag + 1e-12

    @given(matrices, st.integers(min_value=0, max_value=2**32 - 1))
    @settings(max_examples=200)
    def test_unitary_invariance(self, m, seed):
        assume(np.abs(m).max() > 1e-100)
        rng = np.random.default_rng(seed)
        u = random_unitary(rng)
        v = random_unitary(rng)
        ref = opnorm2(as_potential(m))
        got = opnorm2(as_potential(u @ m @ v))
        assert abs(got.logmag - ref.logmag) < 1e-12

    def test_equal_singular_values(self):
        # a scaled unitary: both singular values coincide
        rng = np.random.default_rng(5)
        m = 3.0 * random_unitary(rng)
        got = opnorm2(as_potential(m))
        assert abs(got.logmag - math.log(3.0)) < 1e-14


class TestDiracSquared:
    @pytest.mark.parametrize("n", [2, 3])
    @pytest.mark.parametrize("mass", [0.0, 1.5])
    def test_square_is_shifted_laplacian(self, n, mass):
        st_ = FDStencil(1e-3, 4)
        x = np.array([0.3, -0.4, 0.2][:n])
        for field in (gaussian_spinor(n), polynomial_spinor(n)):
            assert dirac_squared_residual(field, x, n, st_, mass) < 1e-6
