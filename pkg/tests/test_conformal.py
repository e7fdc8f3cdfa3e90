import math

import numpy as np
import pytest

from skodom import _segments
from skodom.conformal import (RootFindingError, StepProfile, _bracketed_root, boundary_point,
                              conjugate_series, conjugate_series_grid, curve_from_series,
                              hilbert_profile, hilbert_step, psi_derivative, psi_eval, ray_tips,
                              simplicity_check, step_profile, trace)
from skodom.distributions import Atoms, Gaussian, Uniform
from skodom.fourier import cosine_coefficients

from conftest import BERNOULLI, THREE_ATOM, shipped

BERN_SERIES = cosine_coefficients(BERNOULLI, 4096)


def bernoulli_truncated(theta, r, n_max=4096):
    """Damped conjugate sum of the exact odd coefficients -(4/pi)(-1)^k/(2k+1), term by term."""
    terms = [-(4 / math.pi) * (-1) ** k / n * r ** n * math.sin(n * theta)
             for k, n in enumerate(range(1, n_max + 1, 2))]
    return math.fsum(terms)


def bernoulli_conjugate(theta, r):
    """Abel-damped conjugate series of phi for the fair +-1 law, in closed form.

    psi(z) = -(4/pi) arctan z, so the damped series is -(4/pi) Im arctan(r e^{i theta}).
    """
    return -(4 / math.pi) * np.arctan(r * np.exp(1j * np.asarray(theta))).imag


@pytest.fixture(scope="module")
def traces():
    out = {}
    for name, dist in shipped().items():
        out[name] = trace(cosine_coefficients(dist), dist, 2001)
    return out


class TestPsi:
    def test_origin(self):
        s = cosine_coefficients(THREE_ATOM, 64)
        assert psi_eval(s, 0) == s.coeffs[0]
        assert psi_derivative(s, 0) == s.coeffs[1]

    def test_conjugation_exact(self):
        s = cosine_coefficients(THREE_ATOM, 256)
        z = 0.3 - 0.55j
        assert psi_eval(s, np.conj(z)) == np.conj(psi_eval(s, z))

    def test_bernoulli_arctan(self):
        assert psi_eval(BERN_SERIES, 0.5) == pytest.approx(-(4 / math.pi) * math.atan(0.5), abs=1e-10)
        assert psi_eval(BERN_SERIES, 0.5).real == pytest.approx(-0.590334, abs=1e-6)

    def test_bernoulli_derivative(self):
        assert psi_derivative(BERN_SERIES, 0.5) == pytest.approx(-16 / (5 * math.pi), abs=1e-10)

    def test_finite_difference(self):
        s = cosine_coefficients(Uniform(), 4096)
        z, h = 0.3 + 0.2j, 1e-5
        fd = (psi_eval(s, z + h) - psi_eval(s, z - h)) / (2 * h)
        assert abs(fd - psi_derivative(s, z)) <= 1e-6

    @pytest.mark.parametrize("z", [1.0, 1j, 0.8 + 0.7j])
    def test_outside_disc(self, z):
        with pytest.raises(ValueError):
            psi_eval(BERN_SERIES, z)
        with pytest.raises(ValueError):
            psi_derivative(BERN_SERIES, z)


class TestBoundaryPoint:
    def test_theta_zero_gaussian(self):
        s = cosine_coefficients(Gaussian(), 64)
        x, y, div = boundary_point(s, Gaussian(), 0.0)
        assert y == 0.0 and not div
        assert x == pytest.approx(Gaussian().quantile(1e-6), abs=1e-12)

    def test_uniform_pi(self):
        s = cosine_coefficients(Uniform(), 4096)
        assert boundary_point(s, Uniform(), math.pi) == (1.0, 0.0, False)

    def test_bernoulli_quarter(self):
        r = 1 - 1 / 4096
        x, y, div = boundary_point(BERN_SERIES, BERNOULLI, math.pi / 4)
        assert x == -1.0 and not div
        assert y == pytest.approx(bernoulli_truncated(math.pi / 4, r), abs=1e-12)
        assert y == pytest.approx((2 / math.pi) * math.log(math.sin(math.pi / 8) / math.sin(3 * math.pi / 8)),
                                  abs=1e-3)

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            boundary_point(BERN_SERIES, BERNOULLI, 4.0)


def test_conjugate_grid_matches_direct():
    a = cosine_coefficients(THREE_ATOM, 3000).coeffs
    m = 512
    theta = 2 * math.pi * np.arange(m) / m
    assert np.allclose(conjugate_series_grid(a, 0.99, m), conjugate_series(a, theta, 0.99), atol=1e-11)


def test_conjugate_series_closed_form():
    theta = np.linspace(-3, 3, 61)
    r = 0.99
    got = conjugate_series(BERN_SERIES.coeffs, theta, r)
    assert np.allclose(got, bernoulli_conjugate(theta, r), atol=1e-12)


class TestHilbert:
    def test_step_values(self):
        assert hilbert_step(math.pi / 2, 0.0) == 0.0
        assert hilbert_step(math.pi / 2, math.pi) == pytest.approx(0.0, abs=1e-15)
        assert hilbert_step(math.pi / 2, math.pi / 2) == -math.inf
        assert hilbert_step(math.pi / 2, math.pi / 2 - 1e-12) < -8

    def test_step_range(self):
        with pytest.raises(ValueError):
            hilbert_step(4.0, 0.1)

    def test_bernoulli_profile(self):
        p = step_profile(BERNOULLI)
        assert p.angles == (math.pi / 2,) and p.weights == (2.0,)
        ref = (2 / math.pi) * math.log(abs(math.sin(math.pi / 8) / math.sin(3 * math.pi / 8)))
        assert hilbert_profile(p, math.pi / 4) == pytest.approx(ref, abs=1e-15)
        assert ref == pytest.approx(-0.5611, abs=1e-4)
        # the Abel series at r = 1 - 1e-6 is the cross-oracle
        assert ref == pytest.approx(bernoulli_conjugate(math.pi / 4, 1 - 1e-6), abs=1e-5)

    def test_empty_and_odd(self):
        assert hilbert_profile(StepProfile(0.3), np.linspace(-3, 3, 7)).tolist() == [0.0] * 7
        p = step_profile(THREE_ATOM)
        x = np.linspace(0.05, 3.0, 50)
        assert np.array_equal(hilbert_profile(p, -x), -hilbert_profile(p, x))

    def test_profile_reconstructs_phi(self):
        p = step_profile(THREE_ATOM)
        # jump angles are excluded: there the profile is right-continuous, G left-continuous
        th = np.linspace(-math.pi, math.pi, 1000)
        assert np.array_equal(p(th), THREE_ATOM.quantile_closed(np.abs(th) / math.pi))

    @pytest.mark.parametrize("kwargs", [
        dict(base=0.0, angles=(1.0,), weights=()),
        dict(base=0.0, angles=(0.0,), weights=(1.0,)),
        dict(base=0.0, angles=(2.0, 1.0), weights=(1.0, 1.0)),
        dict(base=0.0, angles=(1.0,), weights=(-1.0,)),
    ])
    def test_profile_validation(self, kwargs):
        with pytest.raises(ValueError):
            StepProfile(**kwargs)


def _scan_oracle(profile, lo, hi, points=1_000_000):
    """Stationary point of the closed-form H on (lo, hi) by dense scan and a parabola."""
    x = np.linspace(lo, hi, points)[1:-1]
    h = hilbert_profile(profile, x)
    d = np.diff(h)
    k = int(np.nonzero(np.sign(d[:-1]) != np.sign(d[1:]))[0][0]) + 1
    x0, x1, x2 = x[k - 1:k + 2]
    f0, f1, f2 = h[k - 1:k + 2]
    step = x1 - x0
    vertex = x1 + 0.5 * step * (f0 - f2) / (f0 - 2 * f1 + f2)
    return vertex, abs(float(hilbert_profile(profile, vertex)))


class TestRayTips:
    def test_bernoulli_strip(self):
        tips = ray_tips(step_profile(BERNOULLI))
        assert [t.tip_y for t in tips.tips] == [math.inf, math.inf]
        assert all(t.critical_angle is None for t in tips.tips)

    def test_three_atom_against_scan(self):
        p = step_profile(THREE_ATOM)
        tips = ray_tips(p).tips
        middle = tips[1]
        assert middle.atom_x == 0.0
        assert 0.4 * math.pi < middle.critical_angle < 0.8 * math.pi
        angle, height = _scan_oracle(p, 0.4 * math.pi, 0.8 * math.pi)
        assert middle.critical_angle == pytest.approx(angle, abs=1e-6)
        assert middle.tip_y == pytest.approx(height, abs=1e-6)
        assert tips[0].tip_y == math.inf and tips[2].tip_y == math.inf

    def test_symmetric_two_step(self):
        p = step_profile(Atoms((-1.0, 0.0, 1.0), (1 / 3, 1 / 3, 1 / 3)))
        middle = ray_tips(p).tips[1]
        assert middle.critical_angle == pytest.approx(math.pi / 2, abs=1e-11)

    def test_json(self):
        js = ray_tips(step_profile(THREE_ATOM)).to_json()
        assert js[0]["tip_y"] == "inf" and js[0]["critical_angle"] is None
        assert isinstance(js[1]["tip_y"], float)

    def test_needs_steps(self):
        with pytest.raises(ValueError):
            ray_tips(StepProfile(0.0))

    def test_bracketed_root_diagnostics(self):
        with pytest.raises(RootFindingError, match="no sign change"):
            _bracketed_root(lambda v: v * v + 1.0, -1.0, 1.0)
        assert _bracketed_root(lambda v: v - 0.25, 0.0, 1.0) == pytest.approx(0.25, abs=1e-12)


class TestTrace:
    def test_grid_validation(self):
        with pytest.raises(ValueError):
            trace(BERN_SERIES, BERNOULLI, 2000)
        with pytest.raises(ValueError):
            trace(BERN_SERIES, BERNOULLI, 1)

    def test_uniform_shape(self, traces):
        c = traces["uniform"]
        assert c.x.min() == -1.0 and c.x.max() == 1.0
        assert np.all(np.isfinite(c.y)) and np.abs(c.y).max() < 1.0
        assert not c.diverged.any()
        assert c.abel_radius == 1 - 1 / 4096 and c.grid_size == 2001

    def test_bernoulli_two_values(self, traces):
        c = traces["bernoulli"]
        assert set(c.x[c.good].tolist()) == {-1.0, 1.0}
        assert c.jump_flags == 1 and c.diverged.sum() == 2

    @pytest.mark.parametrize("name", list(shipped()))
    def test_symmetry_and_sign(self, traces, name):
        c = traces[name]
        assert np.array_equal(c.x, c.x[::-1])
        assert np.array_equal(c.y, -c.y[::-1])
        upper = (c.theta > 0) & (c.theta < math.pi)
        assert c.y[upper].max() <= 1e-6

    @pytest.mark.parametrize("name", list(shipped()))
    def test_real_part_monotone(self, traces, name):
        c = traces[name]
        half = c.theta >= 0
        assert np.all(np.diff(c.x[half]) >= 0)

    def test_start_point(self, traces):
        assert traces["geometric"].start == pytest.approx((1.0, 0.0), abs=1e-12)
        assert traces["uniform"].start == (0.0, 0.0)

    def test_gaussian_clip_recorded(self, traces):
        c = traces["gaussian"]
        assert c.quantile_clip == 1e-6
        assert c.x.min() == pytest.approx(Gaussian().quantile(1e-6), abs=1e-12)
        assert traces["uniform"].quantile_clip is None

    def test_cantor_flags(self, traces):
        c = traces["cantor"]
        assert c.jump_flags > 100
        assert np.all(np.abs(c.x) <= 0.5)

    def test_continuity_near_half(self, traces):
        c = traces["uniform"]
        k = int(np.argmin(np.abs(c.theta - math.pi / 2)))
        assert abs(c.x[k + 1] - c.x[k - 1]) < 1e-2 and abs(c.y[k + 1] - c.y[k - 1]) < 1e-2


class TestStructure:
    def test_atom_property(self, traces):
        c = traces["three_atom"]
        atoms = np.array(THREE_ATOM.xs)
        dev = np.min(np.abs(c.x[c.good][:, None] - atoms[None, :]), axis=1)
        assert dev.max() <= 1e-9

    def test_gap_property(self, traces):
        c = traces["bernoulli"]
        d = 1e-9
        assert not np.any((c.x > -1 + d) & (c.x < 1 - d))

    def test_cantor_gap(self, traces):
        # the middle third of the centered Cantor set is empty
        c = traces["cantor"]
        assert not np.any((c.x > -1 / 6 + 1e-9) & (c.x < 1 / 6 - 1e-9))


def test_uniform_slope():
    c = trace(cosine_coefficients(Uniform()), Uniform(), 2001)
    h = c.theta[1] - c.theta[0]
    slope = (c.y[2:] - c.y[:-2]) / (2 * h)
    th = c.theta[1:-1]
    mask = (np.abs(th) > 0.1) & (np.abs(th) < math.pi - 0.1)
    ref = -(8 / math.pi ** 2) * np.arctanh(np.tan(math.pi / 4 - np.abs(th) / 2))
    assert np.max(np.abs(slope - ref)[mask]) <= 1e-3


class TestSimplicity:
    def test_uniform(self, traces):
        assert simplicity_check(traces["uniform"]) == (True, None)

    @pytest.mark.parametrize("name", ["bernoulli", "gaussian", "cantor"])
    def test_strictly_simple(self, traces, name):
        assert simplicity_check(traces[name])[0]

    @pytest.mark.parametrize("name", ["three_atom", "geometric"])
    def test_slit_domains(self, traces, name):
        # finite rays are traced twice, once on each side
        assert not simplicity_check(traces[name])[0]
        assert simplicity_check(traces[name], allow_slits=True) == (True, None)

    def test_circle(self):
        assert simplicity_check(curve_from_series([0.0, 1.0])) == (True, None)

    def test_figure_eight(self):
        simple, pair = simplicity_check(curve_from_series([0.0, 0.3, 1.0]))
        assert not simple and pair is not None
        assert not simplicity_check(curve_from_series([0.0, 0.3, 1.0]), allow_slits=True)[0]


class TestSegments:
    def _kind(self, p, q, a, b):
        return int(_segments.classify(np.array(p, float), np.array(q, float),
                                      np.array([a], float), np.array([b], float))[0])

    def test_kinds(self):
        assert self._kind((0, 0), (2, 2), (0, 2), (2, 0)) == _segments.CROSS
        assert self._kind((0, 0), (2, 0), (1, 0), (1, 1)) == _segments.TOUCH
        assert self._kind((0, 0), (2, 0), (1, 0), (3, 0)) == _segments.COLLINEAR
        assert self._kind((0, 0), (1, 0), (1, 0), (1, 1)) == _segments.VERTEX
        assert self._kind((0, 0), (1, 0), (0, 1), (1, 1)) == _segments.NONE

    def test_distance(self):
        d = _segments.point_segment_distance(np.array([0.5, 3.0, 0.0]), np.array([1.0, 0.0, 0.0]),
                                             0.0, 0.0, 1.0, 0.0)
        assert np.allclose(d, [1.0, 2.0, 0.0])

    def test_sweep_matches_brute_force(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            pts = rng.uniform(size=(12, 2))
            start, end = pts[:-1], pts[1:]
            ids = np.arange(len(start))
            hit = _segments.first_self_contact(start, end, ids, ids + 1)
            brute = False
            for i in range(len(start)):
                for j in range(i + 2, len(start)):
                    k = self._kind(start[i], end[i], start[j], end[j])
                    brute |= k != _segments.NONE
            assert (hit is not None) == brute
