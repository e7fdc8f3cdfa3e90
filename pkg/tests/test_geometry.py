import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from skodom.conformal import curve_from_series, ray_tips, step_profile, trace
from skodom.distributions import Uniform
from skodom.fourier import cosine_coefficients
from skodom.geometry import (GeometryError, RegionPolygon, boundary_distance, contains,
                             default_y_max, load_polygon, polygon_area, polygonize, save_polygon)

from conftest import BERNOULLI, THREE_ATOM, shipped

SQUARE = RegionPolygon(np.array([[0, 0], [2, 0], [2, 2], [0, 2]], float), 2.0, (1.0, 1.0))


def _region(dist, y_max=10.0):
    return polygonize(trace(cosine_coefficients(dist), dist, 2001), y_max)


@pytest.fixture(scope="module")
def bernoulli_region():
    return _region(BERNOULLI)


@pytest.fixture(scope="module")
def circle():
    return polygonize(curve_from_series([0.0, 1.0], grid_size=2001), 10.0)


class TestPolygon:
    def test_orientation_normalized(self):
        cw = RegionPolygon(SQUARE.vertices[::-1], 2.0)
        assert polygon_area(cw) == 4.0 == polygon_area(SQUARE)

    def test_read_only(self):
        with pytest.raises(ValueError):
            SQUARE.vertices[0, 0] = 5.0

    def test_too_few_vertices(self):
        with pytest.raises(GeometryError):
            RegionPolygon(np.zeros((2, 2)), 1.0)

    def test_json_roundtrip(self, tmp_path, bernoulli_region):
        path = tmp_path / "poly.json"
        save_polygon(bernoulli_region, path)
        back = load_polygon(path)
        assert np.array_equal(back.vertices, bernoulli_region.vertices)
        assert back.y_max == bernoulli_region.y_max and back.start == bernoulli_region.start

    def test_unknown_field(self, tmp_path):
        path = tmp_path / "poly.json"
        path.write_text('{"vertices": [[0,0],[1,0],[0,1]], "y_max": 1, "colour": 3}')
        with pytest.raises(GeometryError, match="colour"):
            load_polygon(path)


class TestContains:
    def test_square(self):
        assert contains(SQUARE, (1, 1)) and not contains(SQUARE, (3, 1))
        assert not contains(SQUARE, (0, 1))  # on an edge
        assert contains(SQUARE, np.array([[0.5, 0.5], [2.5, 0.5]])).tolist() == [True, False]

    def test_bernoulli(self, bernoulli_region):
        assert contains(bernoulli_region, (0, 0))
        assert not contains(bernoulli_region, (1.5, 0))
        assert not contains(bernoulli_region, (0, 10.5))

    def test_circle(self, circle):
        assert contains(circle, (0.999, 0.0))
        assert not contains(circle, (1.001, 0.0))

    @given(st.floats(-3, 3), st.floats(-3, 3))
    def test_square_matches_box(self, x, y):
        inside = 0 < x < 2 and 0 < y < 2 and min(x, 2 - x, y, 2 - y) > 1e-12
        assert contains(SQUARE, (x, y)) == inside


class TestDistance:
    def test_bernoulli(self, bernoulli_region):
        assert boundary_distance(bernoulli_region, (0, 0)) == 1.0
        assert boundary_distance(bernoulli_region, (0.5, 0)) == 0.5
        assert boundary_distance(bernoulli_region, (0, 9.75)) == 0.25

    def test_outside_raises(self):
        with pytest.raises(GeometryError):
            boundary_distance(SQUARE, (3, 3))

    def test_brute_force(self, circle):
        rng = np.random.default_rng(2)
        v = circle.vertices
        w = np.roll(v, -1, axis=0)
        for p in rng.uniform(-0.7, 0.7, size=(25, 2)):
            t = np.linspace(0, 1, 2001)[:, None, None]
            samples = v[None] + t * (w - v)[None]
            brute = np.hypot(*(samples - p).transpose(2, 0, 1)).min()
            assert boundary_distance(circle, p) == pytest.approx(brute, abs=1e-6)


class TestPolygonize:
    def test_bernoulli_rectangle(self, bernoulli_region):
        v = bernoulli_region.vertices
        assert set(map(tuple, v.tolist())) <= {(-1.0, y) for y in v[:, 1]} | {(1.0, y) for y in v[:, 1]}
        assert v[:, 0].min() == -1.0 and v[:, 0].max() == 1.0
        assert np.abs(v[:, 1]).max() == 10.0
        assert polygon_area(bernoulli_region) == pytest.approx(40.0, abs=1e-12)
        assert bernoulli_region.cap_edges.sum() == 2

    def test_three_atom_caps(self):
        tips = ray_tips(step_profile(THREE_ATOM))
        region = _region(THREE_ATOM, default_y_max(THREE_ATOM, tips))
        assert region.cap_edges.sum() == 4
        assert contains(region, region.start)
        assert boundary_distance(region, region.start) == pytest.approx(tips.tips[1].tip_y, abs=1e-2)

    def test_circle_polygon(self, circle):
        r = np.hypot(*circle.vertices.T)
        assert circle.vertices.shape == (2000, 2)
        assert np.abs(r - 1).max() <= 1e-5
        assert circle.cap_edges.sum() == 0

    @pytest.mark.parametrize("name", list(shipped()))
    def test_start_inside_and_symmetric(self, name):
        dist = shipped()[name]
        tips = ray_tips(step_profile(dist)) if dist.is_atomic else None
        region = _region(dist, default_y_max(dist, tips))
        assert contains(region, region.start)
        assert polygon_area(region) > 0
        v = region.vertices
        mirrored = v * np.array([1.0, -1.0])
        # reflection in the real axis maps the vertex set onto itself
        d = np.abs(mirrored[:, None, :] - v[None, :, :]).max(axis=2).min(axis=1)
        assert d.max() <= 1e-9

    def test_bad_y_max(self):
        c = trace(cosine_coefficients(Uniform()), Uniform(), 101)
        with pytest.raises(GeometryError):
            polygonize(c, 0.0)

    def test_default_y_max(self):
        assert default_y_max(Uniform()) == 10.0
        assert default_y_max(BERNOULLI) == 10.0
        assert default_y_max(THREE_ATOM.__class__((-10.0, 10.0), (0.5, 0.5))) == 80.0
