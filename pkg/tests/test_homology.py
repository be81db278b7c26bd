"""Homology engine: boundary calculus, absolute/relative/cohomology,
exhaustion limits, pushforward and ramified pullback."""

import random
from fractions import Fraction

import pytest

from btq.errors import (
    ComputationError, CoreUnavailable, MissingRamificationData,
    NonFiniteFiber, SupportExceedsCore,
)
from btq.homology import (
    OrientedChain, bm_homology, boundary_matrix, canonical_map, cohomology,
    compact_support_cohomology, homology, matrix_to_text, pullback_ramified,
    pushforward_bm, relative_homology,
)
from btq.scomplex import (
    Complex, ExhaustedComplex, SimplicialMap, compose_maps, identity_map,
    strict_complex, validate_map,
)


def circle3():
    return strict_complex([("a", "b"), ("b", "c"), ("a", "c")])


def full_triangle():
    return strict_complex([("a", "b", "c")])


def tetra_boundary():
    return strict_complex([("a", "b", "c"), ("a", "b", "d"),
                           ("a", "c", "d"), ("b", "c", "d")])


def path_complex(n):
    return strict_complex([("v%02d" % k, "v%02d" % (k + 1)) for k in range(n)])


def vlab(k, off=100):
    return "v%03d" % (k + off)


def line_slab(n):
    """Path from -n to n with zero-padded labels so key order = coordinate
    order."""
    return strict_complex([(vlab(k), vlab(k + 1)) for k in range(-n, n)])


def edge_key(k):
    return "%s;%s" % (vlab(k), vlab(k + 1))


def line_exhaustion(n, alphas):
    """Core(a): simplices with some vertex at |coordinate| <= a-1."""
    slab = line_slab(n)
    cores = {}
    for a in alphas:
        core = set()
        for k in range(-n, n + 1):
            if abs(k) <= a - 1:
                core.add((0, vlab(k)))
        for k in range(-n, n):
            if min(abs(k), abs(k + 1)) <= a - 1:
                core.add((1, edge_key(k)))
        cores[a] = core
    return ExhaustedComplex(slab, cores)


def ray_exhaustion(n, alphas):
    slab = path_complex(n)
    cores = {}
    for a in alphas:
        core = set()
        for k in range(min(a, n + 1)):
            core.add((0, "v%02d" % k))
        for k in range(min(a, n)):
            core.add((1, "v%02d;v%02d" % (k, k + 1)))
        cores[a] = core
    return ExhaustedComplex(slab, cores)


# -- boundary calculus ---------------------------------------------------------

def test_single_edge_boundary():
    C = strict_complex([("a", "b")])
    z = OrientedChain(1, {"a;b": 1})
    b = z.boundary(C)
    assert b.coeffs == {"a": Fraction(1), "b": Fraction(-1)}


def test_boundary_matrix_convention():
    C = circle3()
    B = boundary_matrix(C, 1)
    assert B.col_keys == ("a;b", "a;c", "b;c")
    assert B.row_keys == ("a", "b", "c")
    # entry (row a, col a;b) = +1; (row b, col a;b) = -1
    assert B.rows[0][0] == 1 and B.rows[1][0] == -1


def test_dd_zero_everywhere():
    rng = random.Random(3)
    corpus = [circle3(), full_triangle(), tetra_boundary(), path_complex(6),
              strict_complex([("a", "b", "c", "d"), ("b", "c", "d", "e")])]
    for C in corpus:
        for i in C.dims():
            if i < 1:
                continue
            for _ in range(10):
                keys = C.keys(i)
                z = OrientedChain(i, {k: rng.randrange(-3, 4) for k in keys})
                assert z.boundary(C).boundary(C).is_zero()


def test_matrix_text_dump():
    C = strict_complex([("a", "b")])
    B = boundary_matrix(C, 1)
    assert matrix_to_text(B) == "a\ta;b\t1\nb\ta;b\t-1\n"


# -- homology of small spaces ----------------------------------------------------

def test_circle():
    C = circle3()
    h1 = homology(C, 1)
    h0 = homology(C, 0)
    assert h1.dimension == 1 and h0.dimension == 1
    z = h1.basis[0]
    assert z.boundary(C).is_zero()
    assert z.coeffs == {"a;b": Fraction(1), "a;c": Fraction(-1),
                        "b;c": Fraction(1)}


def test_contractible():
    C = path_complex(7)
    assert homology(C, 1).dimension == 0
    assert homology(C, 0).dimension == 1
    D = full_triangle()
    assert homology(D, 1).dimension == 0
    assert homology(D, 2).dimension == 0


def test_sphere():
    C = tetra_boundary()
    assert homology(C, 2).dimension == 1
    assert homology(C, 1).dimension == 0
    z = homology(C, 2).basis[0]
    assert z.boundary(C).is_zero()
    assert len(z.coeffs) == 4


def test_cohomology_matches_homology_dims():
    for C in [circle3(), full_triangle(), tetra_boundary(), path_complex(5)]:
        for i in range(3):
            assert cohomology(C, i).dimension == homology(C, i).dimension


def test_relative_disc_mod_boundary():
    C = full_triangle()
    excluded = {(d, k) for (d, k) in C.all_simplices() if d <= 1}
    res = relative_homology(C, excluded, 2)
    assert res.dimension == 1
    assert relative_homology(C, excluded, 1).dimension == 0


def test_relative_interval_rel_far_endpoint():
    # the pair (interval, far tail) has no relative 1-cycles: the base
    # vertex row forces every coefficient to zero
    C = path_complex(6)
    for tail_start in (3, 5):
        excluded = set()
        for k in range(tail_start, 7):
            excluded.add((0, "v%02d" % k))
        for k in range(tail_start, 6):
            excluded.add((1, "v%02d;v%02d" % (k, k + 1)))
        assert relative_homology(C, excluded, 1).dimension == 0


# -- exhaustions -------------------------------------------------------------------

def test_bm_ray_stabilizes_to_zero():
    E = ray_exhaustion(12, [2, 4, 6, 8])
    res = bm_homology(E, 1, alpha_max=8)
    assert res.dims == (0, 0, 0, 0)
    assert res.transition_ranks == (0, 0, 0)
    assert res.stabilized and res.dimension == 0
    cc = compact_support_cohomology(E, 1, alpha_max=8)
    assert cc.stabilized and cc.dimension == 0


def test_bm_line_keeps_fundamental_class():
    E = line_exhaustion(12, [2, 4, 6, 8])
    res = bm_homology(E, 1, alpha_max=8)
    assert res.dims == (1, 1, 1, 1)
    assert res.transition_ranks == (1, 1, 1)
    assert res.stabilized and res.dimension == 1
    # the class is the constant chain over the top core
    z = res.basis[0]
    vals = set(z.coeffs.values())
    assert len(vals) == 1
    keys = {k for (d, k) in E.core(8) if d == 1}
    assert z.support() == keys
    # duality with compact support cohomology
    cc = compact_support_cohomology(E, 1, alpha_max=8)
    assert cc.stabilized and cc.dimension == 1


def test_bm_finite_complex_equals_homology():
    C = circle3()
    full = set(C.all_simplices())
    E = ExhaustedComplex(C, {1: full, 2: full, 3: full})
    res = bm_homology(E, 1, alpha_max=3)
    assert res.stabilized
    assert res.dimension == homology(C, 1).dimension == 1


def test_bm_not_stabilized_flag():
    # growing disjoint circles; H_1 of core(a) grows with a
    facets = []
    for i in range(4):
        a, b, c = ("c%da" % i, "c%db" % i, "c%dc" % i)
        facets += [(a, b), (b, c), (a, c)]
    C = strict_complex(facets)
    cores = {}
    for a in range(1, 5):
        core = set()
        for i in range(a):
            for (d, k) in C.all_simplices():
                if ("c%d" % i) in k:
                    core.add((d, k))
        cores[a] = core
    E = ExhaustedComplex(C, cores)
    res = bm_homology(E, 1, alpha_max=4)
    assert res.dims == (1, 2, 3, 4)
    assert not res.stabilized
    with pytest.raises(CoreUnavailable):
        bm_homology(E, 1, alpha_max=1)


def test_canonical_map_restriction_family():
    # disjoint circles exhaustion again: a finite cycle inside core(1)
    facets = [("c0a", "c0b"), ("c0b", "c0c"), ("c0a", "c0c"),
              ("d0", "d1")]
    C = strict_complex(facets)
    full = set(C.all_simplices())
    circ = {s for s in full if s[1].startswith("c")}
    cores = {1: circ, 2: full, 3: full}
    E = ExhaustedComplex(C, cores)
    z = OrientedChain(1, {"c0a;c0b": 1, "c0b;c0c": 1, "c0a;c0c": -1})
    fam = canonical_map(z, E, alpha_max=3)
    assert set(fam) == {1, 2, 3}
    assert fam[1] == z and fam[3] == z
    bad = OrientedChain(1, {"c0a;c0b": 1})
    with pytest.raises(ComputationError):
        canonical_map(bad, E, alpha_max=3)  # not a cycle
    far = OrientedChain(1, {"d0;d1": 1})
    with pytest.raises(SupportExceedsCore):
        canonical_map(far, E, alpha_max=1)  # outside core(1)
    with pytest.raises(CoreUnavailable):
        canonical_map(z, E, alpha_max=0.5)


# -- pushforward --------------------------------------------------------------------

def fold_line_to_ray(n):
    src = line_slab(n)
    tgt = path_complex(n)
    maps = {0: {}, 1: {}}
    for k in range(-n, n + 1):
        maps[0][vlab(k)] = "v%02d" % abs(k)
    for k in range(-n, n):
        a, b = sorted((abs(k), abs(k + 1)))
        maps[1][edge_key(k)] = "v%02d;v%02d" % (a, b)
    return SimplicialMap(src, tgt, maps)


def test_pushforward_identity_and_fold():
    C = circle3()
    ident = identity_map(C)
    z = OrientedChain(1, {"a;b": Fraction(3, 2), "b;c": -2})
    assert pushforward_bm(ident, z) == z

    f = fold_line_to_ray(6)
    assert validate_map(f) == []
    # constant chain: the two preimages of each ray edge carry opposite
    # orientation transport signs, so everything cancels
    beta = OrientedChain(1, {edge_key(k): 1 for k in range(-6, 6)})
    assert pushforward_bm(f, beta).is_zero()
    # single edges do not cancel
    one = OrientedChain(1, {edge_key(2): 1})
    assert pushforward_bm(f, one) == OrientedChain(1, {"v02;v03": 1})
    neg = OrientedChain(1, {edge_key(-3): 1})  # {-3,-2} -> {3,2}: sign -1
    assert pushforward_bm(f, neg) == OrientedChain(1, {"v02;v03": -1})


def test_pushforward_functorial():
    rng = random.Random(5)
    f = fold_line_to_ray(6)

    # g: collapse ray [0,6] onto [0,3] by reflection at 3
    src, tgt = f.target, path_complex(3)
    maps = {0: {}, 1: {}}
    for k in range(7):
        maps[0]["v%02d" % k] = "v%02d" % min(k, 6 - k)
    for k in range(6):
        a, b = sorted((min(k, 6 - k), min(k + 1, 5 - k)))
        maps[1]["v%02d;v%02d" % (k, k + 1)] = "v%02d;v%02d" % (a, b)
    g = SimplicialMap(src, tgt, maps)
    assert validate_map(g) == []
    gf = compose_maps(f, g)
    for _ in range(10):
        z = OrientedChain(1, {edge_key(k): rng.randrange(-2, 3)
                              for k in range(-6, 6)})
        assert pushforward_bm(gf, z) == pushforward_bm(g, pushforward_bm(f, z))


def test_pushforward_fiber_guard():
    C = strict_complex([("x", "y")])
    f = identity_map(C)
    z = OrientedChain(1, {"x;y": 1})
    # passes with a generous ceiling
    assert pushforward_bm(f, z, verify_fibers=True) == z


# -- ramified pullback ----------------------------------------------------------------

def hexagon_to_triangle():
    hexagon = strict_complex([("x0", "x1"), ("x1", "x2"), ("x2", "x3"),
                              ("x3", "x4"), ("x4", "x5"), ("x0", "x5")])
    tri = circle3()
    word = {0: "a", 1: "b", 2: "c", 3: "a", 4: "b", 5: "c"}
    maps = {0: {}, 1: {}}
    for k in range(6):
        maps[0]["x%d" % k] = word[k]
    for k in range(6):
        u, v = "x%d" % k, "x%d" % ((k + 1) % 6)
        key = ";".join(sorted((u, v)))
        tkey = ";".join(sorted((word[k], word[(k + 1) % 6])))
        maps[1][key] = tkey
    return SimplicialMap(hexagon, tri, maps)


def test_pullback_trivial_cover():
    C = circle3()
    f = identity_map(C)
    ram = {(d, k): 1 for (d, k) in C.all_simplices()}
    z = OrientedChain(1, {"a;b": 2, "b;c": Fraction(1, 3)})
    assert pullback_ramified(f, z, ram) == z
    with pytest.raises(MissingRamificationData):
        pullback_ramified(f, z, {})


def test_pullback_commutes_with_boundary_and_degree():
    f = hexagon_to_triangle()
    assert validate_map(f) == []
    tri, hexa = f.target, f.source
    ram1 = {(1, k): 1 for k in hexa.simplices(1)}
    ram0 = {(0, k): 1 for k in hexa.simplices(0)}
    rng = random.Random(7)
    for _ in range(15):
        z = OrientedChain(1, {k: rng.randrange(-2, 3)
                              for k in tri.simplices(1)})
        up = pullback_ramified(f, z, ram1)
        # boundary commutes: pull back the boundary, or take the boundary
        # of the pullback
        a = up.boundary(hexa)
        b = pullback_ramified(f, z.boundary(tri), ram0)
        assert a == b
        # pushforward after pullback multiplies by the covering degree
        assert pushforward_bm(f, up) == z.scaled(2)


def test_pullback_lands_in_deck_invariants():
    f = hexagon_to_triangle()
    hexa = f.source
    ram1 = {(1, k): 1 for k in hexa.simplices(1)}
    # rotation by 3 is the deck transformation of the double cover
    rot = {0: {}, 1: {}}
    for k in range(6):
        rot[0]["x%d" % k] = "x%d" % ((k + 3) % 6)
    for k in range(6):
        u, v = "x%d" % k, "x%d" % ((k + 1) % 6)
        key = ";".join(sorted((u, v)))
        tu, tv = "x%d" % ((k + 3) % 6), "x%d" % ((k + 4) % 6)
        rot[1][key] = ";".join(sorted((tu, tv)))
    deck = SimplicialMap(hexa, hexa, rot)
    assert validate_map(deck) == []
    z = OrientedChain(1, {"a;b": 1, "b;c": -2, "a;c": 5})
    up = pullback_ramified(f, z, ram1)
    assert pushforward_bm(deck, up) == up


# -- chain utilities ----------------------------------------------------------------

def test_chain_json_roundtrip():
    z = OrientedChain(1, {"a;b": Fraction(3, 7), "b;c": -2})
    text = z.to_json()
    back = OrientedChain.from_json(1, text)
    assert back == z


def test_chain_arithmetic():
    z = OrientedChain(1, {"a": 1, "b": 2})
    w = OrientedChain(1, {"b": -2, "c": 1})
    s = z.add(w)
    assert s.coeffs == {"a": Fraction(1), "c": Fraction(1)}
    assert z.scaled(0).is_zero()
    assert z.restrict({"a"}).coeffs == {"a": Fraction(1)}
