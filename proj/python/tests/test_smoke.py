import math

import numpy as np
import pytest

import lcfunc


def test_gaussian_mass_and_barycenter():
    g = lcfunc.GridSpec.cube(1, -16, 16, 2049)
    f = lcfunc.gaussian([0.5], [2.0], g)
    assert f.values.shape == (2049,)
    assert f.integral() == pytest.approx(math.sqrt(4 * math.pi), rel=1e-9)
    assert f.barycenter()[0] == pytest.approx(0.5, abs=1e-9)


def test_polar_of_standard_gaussian_is_itself():
    g = lcfunc.GridSpec.cube(1, -16, 16, 2049)
    f = lcfunc.gaussian([0.0], [1.0], g)
    p = lcfunc.polar(f, [0.0])
    assert np.max(np.abs(p.values - f.values)) < 1e-4
    assert lcfunc.polar_mass(f, [0.0]) == pytest.approx(math.sqrt(2 * math.pi), rel=1e-6)


def test_conjugate_of_indicator_is_abs():
    g = lcfunc.GridSpec.cube(1, -2, 2, 41)
    x = np.array(g.coords(0))
    phi = np.where(np.abs(x) <= 1.0, 0.0, np.inf)
    assert np.array_equal(lcfunc.conjugate(g, phi, [0.0]), np.abs(x))


def test_steiner_keeps_mass_and_centers():
    g = lcfunc.GridSpec.cube(2, -16, 16, 129)
    f = lcfunc.gaussian([1.5, -0.5], [1.0, 2.0], g)
    s = lcfunc.steiner_symmetrize(f, 0, 0.0)
    assert s.integral() == f.integral()
    assert np.array_equal(s.values, s.values[::-1, :])


def test_santalo_point_of_shifted_gaussian():
    g = lcfunc.GridSpec.cube(2, -16, 16, 129)
    r = lcfunc.santalo_point(lcfunc.gaussian([1.0, -2.0], [1.0, 2.0], g))
    assert r["converged"]
    assert r["z"] == pytest.approx([1.0, -2.0], abs=1e-3)


def test_pipeline_report():
    g = lcfunc.GridSpec.cube(1, -16, 16, 2049)
    report = lcfunc.run_pipeline(lcfunc.gaussian([0.7], [1.3], g), 0, 0.3)
    assert report["passed"]
    assert report["initial_product"] <= report["bound"]


def test_corpus_is_deterministic():
    g = lcfunc.GridSpec.cube(1, -16, 16, 257)
    a = lcfunc.corpus("mixed", 3, 7, g)
    b = lcfunc.corpus("mixed", 3, 7, g)
    assert [d for d, _ in a] == [d for d, _ in b]
    assert all(np.array_equal(fa.values, fb.values) for (_, fa), (_, fb) in zip(a, b))


def test_errors_carry_their_kind():
    g = lcfunc.GridSpec.cube(1, -1, 1, 3)
    with pytest.raises(lcfunc.LcfError, match="InvalidArgument"):
        lcfunc.LogConcaveFn(g, np.ones(4))
    f = lcfunc.gaussian([0.0], [0.1], lcfunc.GridSpec.cube(1, -4, 4, 65))
    with pytest.raises(lcfunc.LcfError, match="OffsetNotOnGrid"):
        lcfunc.steiner_symmetrize(f, 0, 0.01)
