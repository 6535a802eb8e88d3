import math

import numpy as np
import pytest

from ttm import core, geometry as geo, perimeter as P
from ttm.exceptions import DegenerateReal, InsufficientChain, NotExpanding

from conftest import random_c

ZETA_ON_L2 = -0.09324640005962104 + 1.0354025584703148j
RAMS_HEAD_C = 0.5143270375386889 + 1.7538427722902206j


def brute_zeta(c, n_max=2000):
    """Oracle: walk ell_1, ell_2, ... by repeated division and test each
    closed segment against the line Im(c z) = -1 directly."""
    a = 2j * (1 - c.conjugate()) / (abs(c) ** 2 - 1) / c
    for n in range(1, n_max):
        b = a / c
        sa, sb = (c * a).imag + 1, (c * b).imag + 1
        if sa == 0:
            return n, a
        if (sa > 0) != (sb > 0) or sb == 0:
            t = sa / (sa - sb)
            return n, a + t * (b - a)
        a = b
    return None, None


def _seg_hits(a, b, c, d):
    """Vectorised closed-segment intersection of [a, b] with each [c_i, d_i]."""
    def orient(p, q, r):
        return ((q - p) * np.conj(r - p)).imag
    o1, o2 = orient(a, b, c), orient(a, b, d)
    o3, o4 = orient(c, d, a), orient(c, d, b)
    return (np.sign(o1) != np.sign(o2)) & (np.sign(o3) != np.sign(o4))


# ---------------------------------------------------------------- chains

def test_ell_chain_examples():
    ch = P.build_ell_chain(1 + 1j, -3, 4)
    assert abs(ch[-1].imag + 1) < 1e-12
    for c in (1.2j, -0.65 + 0.88j, 0.5567 + 0.8471j):
        ch = P.build_ell_chain(c, -4, 5)
        assert abs(core.reflect_pfl(c, ch[2]) - ch[-1]) < 1e-12
        assert ch[0] == core.ell0(c)


def test_ell_chain_contracts_geometrically():
    c = 0.9 + 0.8j
    ch = P.build_ell_chain(c, 0, 30)
    ratios = [abs(ch[k + 1]) / abs(ch[k]) for k in range(30)]
    assert np.allclose(ratios, 1 / abs(c), rtol=1e-12)


def test_chain_index_errors():
    ch = P.build_ell_chain(1.2j, -2, 3)
    with pytest.raises(InsufficientChain):
        ch[4]
    with pytest.raises(DegenerateReal):
        P.build_ell_chain(2, 0, 3)
    with pytest.raises(NotExpanding):
        P.build_ell_chain(0.5j, 0, 3)


def test_ell_k_matches_chain(rng):
    for c in random_c(rng, 50, 1.01, 2.5):
        ch = P.build_ell_chain(c, -6, 7)
        for k in range(-6, 8):
            assert abs(P.ell_k(c, k) - ch[k]) < 1e-12 * max(1, abs(ch[k]))


def test_mirror_symmetry_of_chain(rng):
    for c in random_c(rng, 1000, 1.0001, 3.0):
        ch = P.build_ell_chain(c, -6, 7)
        for k in range(-6, 7):
            assert abs(core.reflect_pfl(c, ch[k]) - ch[1 - k]) < 1e-9


def test_pfl_bisects_L0_and_L_minus1_vertical(rng):
    for c in random_c(rng, 500, 1.001, 3.0):
        l0, l1 = core.ell0(c), core.ell0(c) / c
        assert abs(core.pfl_side(c, (l0 + l1) / 2)) / abs(c) < 1e-8
        # PFL direction is 1/c
        cosang = abs(((l1 - l0) * (1 / c).conjugate()).real) / (abs(l1 - l0) * abs(1 / c))
        assert cosang < 1e-8
        assert abs(P.ell_k(c, -1).real - l0.real) < 1e-9 * max(1, abs(l0))


# ------------------------------------------------------------------ zeta

def test_zeta_example_minus_1_06():
    z = P.find_zeta(-1.06 + 0.5j)
    assert z.exists and z.via_L_minus1 and z.n == 1
    rep = P.build_perimeter(-1.06 + 0.5j)
    assert rep.side_count == 3
    assert rep.classification == P.POLYGON_WITH_HOLES
    assert rep.holes


@pytest.mark.parametrize("c", [0.5567 + 0.8471j, -0.65 + 0.88j, 1.2j, ZETA_ON_L2, -1.06 + 0.5j])
def test_zeta_matches_brute_force_walk(c):
    z = P.find_zeta(c)
    n, pt = brute_zeta(c)
    assert z.exists and z.n == n
    assert abs(z.point - pt) < 1e-9 * max(1, abs(pt))


def test_zeta_random_against_oracle(rng):
    for c in random_c(rng, 300, 1.05, 2.0):
        z = P.find_zeta(c)
        n, pt = brute_zeta(c)
        assert z.exists == (n is not None)
        if n is not None:
            assert z.n == n and abs(z.point - pt) < 1e-9 * max(1, abs(pt))


def test_tbcoloring_parameter_is_polygon():
    z = P.find_zeta(0.5567 + 0.8471j)
    assert z.point.imag <= -1
    assert P.build_perimeter(0.5567 + 0.8471j).classification == P.POLYGON


def test_rams_head():
    z = P.find_zeta(RAMS_HEAD_C)
    assert not z.exists
    rep = P.build_perimeter(RAMS_HEAD_C)
    assert rep.classification == P.RAMS_HEAD
    assert rep.side_count is None and not rep.outer_boundary.closed
    assert rep.inner_boundary is not None and rep.inner_boundary.kind == "inner"
    # the spiral never dies out: the S_k list is cut, and says so
    assert rep.truncated
    assert max(r.k for r in rep.s_regions) > 10
    # every segment of the scanned spiral stays off the PFL
    ch = P.build_ell_chain(RAMS_HEAD_C, 1, 60)
    sides = [core.pfl_side(RAMS_HEAD_C, v) for v in ch.points]
    assert all(s > 0 for s in sides) or all(s < 0 for s in sides)


def test_side_counts():
    assert P.build_perimeter(ZETA_ON_L2).side_count == 5
    assert P.build_perimeter(-1.4935515289338175 + 0.23432553281872645j).side_count == 3


def test_side_count_three_or_five_when_alpha_nonpositive(rng):
    seen = 0
    for c in random_c(rng, 400, 1.01, 2.0):
        if c.real > 0:
            continue
        z = P.find_zeta(c)
        if z.exists:
            seen += 1
            assert P.build_perimeter(c, with_regions=False).side_count in (3, 5)
    assert seen > 50


def _first_self_intersections(n_params=1000, seed=2024):
    """(c, m, n, fl) for the first pair L_m, L_n (0 < m, m + 1 < n) that meet;
    fl[k] says whether L_k crosses the folding line."""
    rng = np.random.default_rng(seed)
    out = []
    for c in random_c(rng, n_params, 1.0, 2.0):
        v = np.asarray(P.build_ell_chain(c, 0, 41).points)
        a, b = v[:-1], v[1:]              # a[k], b[k] are the ends of L_k
        fl = (np.minimum(a.imag, b.imag) <= -1) & (np.maximum(a.imag, b.imag) >= -1)
        for n in range(3, len(a)):
            hit = _seg_hits(a[n], b[n], a[1:n - 1], b[1:n - 1])
            if hit.any():
                out.append((c, int(np.argmax(hit)) + 1, n, fl))
                break
    return out


def test_segment_before_line_guard():
    """L meets FL before it meets itself: if L_n meets L_m (0 < m, m + 1 < n),
    some L_k with 0 < k < n crosses the folding line."""
    found = _first_self_intersections()
    assert len(found) > 100
    violations = [(c, m, n) for c, m, n, fl in found if not fl[1:n].any()]
    assert violations == []


@pytest.mark.xfail(strict=True, reason="literal index range 0 < k < m is empty for the typical first "
                                       "self-intersection L_1 ∩ L_3; see the k < n reading above")
def test_segment_guard_literal_index_range():
    found = _first_self_intersections(200)
    violations = [(c, m, n) for c, m, n, fl in found if not fl[1:m].any()]
    assert violations == []


# --------------------------------------------------------------- regions

def test_S2_lemma():
    for c in (0.5567 + 0.8471j, 1.2j, -0.65 + 0.88j, RAMS_HEAD_C):
        p = core.as_parameter(c)
        regs, _ = P.build_S_regions(p)
        s0 = [r.polygon for r in regs if r.k == 0]
        s2 = [r.polygon for r in regs if r.k == 2]
        pfl0, pfld = -1j / p.c, 1 / p.c
        expect = []
        for q in s0:
            piece = geo.clip_halfplane([z / p.c ** 2 for z in q], pfl0, pfld)
            if len(piece) >= 3 and abs(geo.signed_area(piece)) > 0:
                expect.append(piece)
        assert len(expect) == len(s2)
        for got, want in zip(s2, expect):
            assert abs(geo.signed_area(got)) == pytest.approx(abs(geo.signed_area(want)), rel=1e-9)
            assert np.allclose(sorted(np.asarray(got), key=lambda z: (z.real, z.imag)),
                               sorted(np.asarray(want), key=lambda z: (z.real, z.imag)), atol=1e-9)


def test_S_regions_lie_in_PH_plus_and_are_ccw():
    p = core.as_parameter(RAMS_HEAD_C)
    regs, _ = P.build_S_regions(p)
    for r in regs:
        if r.diameter > 1e-6:   # areas of the last few slivers round to zero
            assert geo.signed_area(r.polygon) > 0
        if r.k >= 2:
            assert all(core.pfl_side(p, z) >= -1e-9 for z in r.polygon)


def test_polygon_case_collapses_into_lower_half_plane():
    for c in (0.5567 + 0.8471j, 1.2j, -0.65 + 0.88j):
        regs, truncated = P.build_S_regions(c)
        assert not truncated
        assert any(max(z.imag for z in r.polygon) <= -1 + 1e-9 for r in regs if r.k > 0)


def test_every_region_has_its_mirror(rng):
    for c in list(random_c(rng, 40, 1.02, 2.0)) + [RAMS_HEAD_C, -1.06 + 0.5j]:
        p = core.as_parameter(c)
        regs, _ = P.build_S_regions(p, max_depth=20)
        by_k = {}
        for r in regs:
            by_k.setdefault(r.k, []).append(r.polygon)
        for k, polys in by_k.items():
            if k <= 0:
                continue
            mirrors = by_k[-k]
            assert len(mirrors) == len(polys)
            for q, m in zip(polys, mirrors):
                ref = sorted(np.asarray(P.mirror_points(p, q)), key=lambda z: (z.real, z.imag))
                got = sorted(np.asarray(m), key=lambda z: (z.real, z.imag))
                assert np.allclose(ref, got, atol=1e-9)


# ---------------------------------------------------------------- report

def test_minus_065_is_polygon_by_the_theorem():
    # alpha = -0.65 >= -1, so the "alpha < -1" exclusion does not apply here;
    # zeta sits far below the folding line and gamma0 has a bounded orbit
    rep = P.build_perimeter(-0.65 + 0.88j)
    assert rep.zeta.point.imag < -10
    assert rep.classification == P.POLYGON
    assert not core.iterate_until_escape(-0.65 + 0.88j, core.gamma0(-0.65 + 0.88j), 5000).escaped


def test_polygon_implies_parameter_bounds(rng):
    for c in random_c(rng, 400, 1.0, 1.6):
        z = P.find_zeta(c)
        if z.exists and z.point.imag <= -1:
            assert c.real >= -1 and abs(c) <= math.sqrt(2) + 1e-12


def test_polygon_forward_invariance_and_re_bound(rng):
    checked = 0
    for c in random_c(rng, 120, 1.0, 1.45):
        rep = P.build_perimeter(c)
        if rep.classification != P.POLYGON:
            continue
        checked += 1
        ring = list(rep.outer_boundary.vertices)
        assert rep.side_count % 2 == 1
        zs = geo.sample_boundary(ring, 1000)
        img = np.array([core.apply(c, z).value for z in zs])
        assert np.all(rep.contains(img, tol=1e-8))
        assert min(v.real for v in ring) >= core.ell0(c).real - 1e-10
    assert checked > 20


def test_report_contains_survivors():
    c = 0.5567 + 0.8471j
    rep = P.build_perimeter(c)
    rng = np.random.default_rng(0)
    zs = rng.uniform(-60, 60, 4000) + 1j * rng.uniform(-60, 60, 4000)
    alive = [z for z in zs if not core.iterate_until_escape(c, z, 2000).escaped]
    assert alive
    assert np.all(rep.contains(np.asarray(alive), tol=1e-8))


def test_summary_and_csv():
    rep = P.build_perimeter(ZETA_ON_L2)
    s = rep.summary()
    assert s["classification"] == "Polygon" and s["side_count"] == "5"
    lines = rep.outer_boundary.to_csv().strip().splitlines()
    assert len(lines) == 6 and lines[0] == lines[-1]


# ------------------------------------------------------------ predicates

def test_predicate_examples():
    c = -1.2 + 0.5j
    assert core.gamma0(c).real < core.ell0(c).real
    assert P.predicate_alpha_vs_gamma(c)
    assert abs(P.ell_k(1 + 1j, -1).imag + 1) < 1e-12
    assert not P.predicate_ell_minus1(1 + 1j)
    assert P.predicate_L0_in_K(1.2j)


def test_L0_returns_under_f2_for_1_2i():
    c = 1.2j
    l0, l1 = core.ell0(c), core.ell0(c) / c
    d = l1 - l0
    for t in np.linspace(0, 1, 201):
        w = core.apply_n(c, l0 + t * d, 2)
        s = ((w - l0) * d.conjugate()).real / abs(d) ** 2
        assert -1e-9 <= s <= 1 + 1e-9
        assert geo.point_segment_distance(w, l0, l1) < 1e-8
