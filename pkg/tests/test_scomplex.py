"""Complex axioms, face/sign calculus, maps and exhaustions."""

import itertools
import random

import pytest

from btq.errors import (
    ComputationError, NotASubset, VertexNotInSimplex, WrongDimension,
)
from btq.scomplex import (
    Complex, ExhaustedComplex, OrientedSimplexRef, SimplicialMap,
    check_finite_map, complex_from_text, complex_to_text, compose_maps,
    face, identity_map, orientation_face_sign, perm_sign, strict_complex,
    validate_complex, validate_map,
)


def triangle():
    return strict_complex([("a", "b", "c")])


def tetra():
    return strict_complex([("a", "b", "c", "d")])


def nonstrict_digon():
    # two distinct edges with the same endpoints
    C = Complex()
    C.add_vertex("a")
    C.add_vertex("b")
    C.add_simplex("e1", ("a", "b"), ("b", "a"))
    C.add_simplex("e2", ("a", "b"), ("b", "a"))
    return C.seal()


def path_complex(n):
    return strict_complex([("v%02d" % k, "v%02d" % (k + 1)) for k in range(n)])


CORPUS = [triangle, tetra, nonstrict_digon, lambda: path_complex(5),
          lambda: strict_complex([("a", "b", "c"), ("b", "c", "d"),
                                  ("c", "d", "e")])]


# -- validation ----------------------------------------------------------------

def test_triangle_valid():
    C = triangle()
    assert validate_complex(C) == []
    assert C.dimension == 2
    assert C.size() == 7


def test_nonstrict_allowed():
    C = nonstrict_digon()
    assert validate_complex(C) == []
    assert len(C.simplices(1)) == 2


def test_bad_face_table_reported():
    C = Complex()
    for v in "abc":
        C.add_vertex(v)
    C.add_simplex("ab", ("a", "b"), ("b", "a"))
    C.add_simplex("ac", ("a", "c"), ("c", "a"))
    C.add_simplex("bc", ("b", "c"), ("c", "b"))
    # face at position 2 should drop c and have vertices (a, b); wire in ac
    C.add_simplex("top", ("a", "b", "c"), ("bc", "ac", "ac"))
    C.seal(validate=False)
    report = validate_complex(C)
    assert any("expected" in r for r in report)
    with pytest.raises(ComputationError):
        strict = Complex()
        for v in "ab":
            strict.add_vertex(v)
        strict.add_simplex("e", ("a", "b"), ("b", "missing"))
        strict.seal()


def test_key_hygiene():
    C = Complex()
    with pytest.raises(ComputationError):
        C.add_vertex("has space")
    with pytest.raises(ComputationError):
        C.add_vertex("")
    C.add_vertex("a")
    C.add_vertex("b")
    C.add_simplex("e", ("a", "b"), ("b", "a"))
    with pytest.raises(ComputationError):
        # same key, different simplex
        C.add_simplex("e", ("a", "b"), ("a", "b"))


# -- faces ----------------------------------------------------------------------

def test_face_full_subset_is_identity():
    C = tetra()
    for dim, key in C.all_simplices():
        rec = C.record(dim, key)
        assert face(C, dim, key, rec.verts) == (dim, key)


def test_face_associativity_exhaustive():
    C = tetra()
    for dim, key in C.all_simplices():
        verts = C.record(dim, key).verts
        subsets = [s for r in range(1, dim + 2)
                   for s in itertools.combinations(verts, r)]
        for vp in subsets:
            d1, k1 = face(C, dim, key, vp)
            for r in range(1, len(vp) + 1):
                for vpp in itertools.combinations(vp, r):
                    assert face(C, d1, k1, vpp) == face(C, dim, key, vpp)


def test_face_errors():
    C = triangle()
    with pytest.raises(NotASubset):
        face(C, 2, "a;b;c", ("a", "z"))
    with pytest.raises(NotASubset):
        face(C, 2, "a;b;c", ())


def test_face_of_vertex():
    C = triangle()
    assert face(C, 0, "a", ("a",)) == (0, "a")


# -- orientation signs -----------------------------------------------------------

def test_edge_signs():
    C = triangle()
    nu = OrientedSimplexRef(1, "a;b", 1)
    # dropping b (position 2, 1-indexed) keeps the sign
    assert orientation_face_sign(C, "b", nu) == OrientedSimplexRef(0, "a", 1)
    # dropping a (position 1) flips it
    assert orientation_face_sign(C, "a", nu) == OrientedSimplexRef(0, "b", -1)
    flipped = OrientedSimplexRef(1, "a;b", -1)
    assert orientation_face_sign(C, "a", flipped).parity == 1


def test_sign_errors():
    C = triangle()
    with pytest.raises(VertexNotInSimplex):
        orientation_face_sign(C, "z", OrientedSimplexRef(1, "a;b", 1))
    with pytest.raises(WrongDimension):
        orientation_face_sign(C, "a", OrientedSimplexRef(0, "a", 1))


def test_anticommutation_exhaustive():
    # s_v' s_v = - s_v s_v' across the whole corpus
    for build in CORPUS:
        C = build()
        for dim in C.dims():
            if dim < 2:
                continue
            for key, rec in C.simplices(dim).items():
                for parity in (1, -1):
                    nu = OrientedSimplexRef(dim, key, parity)
                    for v, w in itertools.permutations(rec.verts, 2):
                        a = orientation_face_sign(
                            C, w, orientation_face_sign(C, v, nu))
                        b = orientation_face_sign(
                            C, v, orientation_face_sign(C, w, nu))
                        assert a.key == b.key
                        assert a.parity == -b.parity


def test_perm_sign():
    def brute(p):
        s = 1
        for i in range(len(p)):
            for j in range(i + 1, len(p)):
                if p[i] > p[j]:
                    s = -s
        return s
    rng = random.Random(2)
    for _ in range(100):
        p = list(range(rng.randrange(1, 7)))
        rng.shuffle(p)
        assert perm_sign(p) == brute(p)


# -- maps -------------------------------------------------------------------------

def test_identity_map_and_fibers():
    C = triangle()
    f = identity_map(C)
    assert validate_map(f) == []
    rep = check_finite_map(f, list(C.all_simplices()))
    assert all(v == 1 for v in rep["fibers"].values())
    assert rep["flags"] == [] and not rep["truncated"]


def test_map_validation_catches_collapse():
    C = triangle()
    D = strict_complex([("x",)])
    f = SimplicialMap(C, D, {0: {"a": "x", "b": "x", "c": "x"},
                             1: {"a;b": "x"}})
    report = validate_map(f)
    assert report


def test_composite_is_simplicial():
    # fold a path onto a shorter path, twice
    C = path_complex(4)
    D = path_complex(2)
    E = path_complex(1)

    def fold(n, m):
        # reflect indices above m
        def fv(k):
            return min(k, 2 * m - k)
        src = path_complex(n)
        tgt = path_complex(m)
        maps = {0: {}, 1: {}}
        for k in range(n + 1):
            maps[0]["v%02d" % k] = "v%02d" % fv(k)
        for k in range(n):
            a, b = sorted([fv(k), fv(k + 1)])
            maps[1]["v%02d;v%02d" % (k, k + 1)] = "v%02d;v%02d" % (a, b)
        return SimplicialMap(src, tgt, maps)

    f = fold(4, 2)
    g = fold(2, 1)
    assert validate_map(f) == []
    assert validate_map(g) == []
    h = compose_maps(f, SimplicialMap(f.target, E, g.maps))
    assert validate_map(h) == []


def test_orientation_sign_of_map():
    C = strict_complex([("a", "b")])
    D = strict_complex([("c", "d")])
    swap = SimplicialMap(C, D, {0: {"a": "d", "b": "c"}, 1: {"a;b": "c;d"}})
    keep = SimplicialMap(C, D, {0: {"a": "c", "b": "d"}, 1: {"a;b": "c;d"}})
    assert swap.orientation_sign(1, "a;b") == -1
    assert keep.orientation_sign(1, "a;b") == 1


def test_infinite_domain_ceiling_flag():
    C = strict_complex([("x",)])
    f = SimplicialMap(C, C, {0: {"x": "x"}})

    def endless():
        while True:
            yield (0, "x")

    rep = check_finite_map(f, [(0, "x")], fiber_ceiling=50, domain=endless())
    assert rep["flags"] == [(0, "x")]
    assert rep["truncated"]
    # constant map defined only on x: undefined scans are skipped
    rep2 = check_finite_map(f, [(0, "x")], fiber_ceiling=50,
                            domain=[(0, "x")] * 10)
    assert rep2["fibers"][(0, "x")] == 10 and not rep2["truncated"]


# -- exhaustions --------------------------------------------------------------------

def ray_exhaustion(n, alphas):
    slab = path_complex(n)
    cores = {}
    for a in alphas:
        core = set()
        for k in range(min(a, n + 1)):
            core.add((0, "v%02d" % k))
        # crossing edge {a-1, a} belongs to the core so the frontier
        # stays closed under faces
        for k in range(min(a, n)):
            core.add((1, "v%02d;v%02d" % (k, k + 1)))
        cores[a] = core
    return ExhaustedComplex(slab, cores)


def test_exhaustion_valid_and_monotone():
    E = ray_exhaustion(10, [2, 4, 6])
    assert E.grid == (2, 4, 6)
    for a, b in [(2, 4), (4, 6)]:
        assert E.core(a) <= E.core(b)
    # a simplex outside core(4) is outside core(2)
    out4 = set(E.slab.all_simplices()) - set(E.core(4))
    assert all(s not in E.core(2) for s in out4)
    with pytest.raises(ComputationError):
        E.core(3)


def test_exhaustion_rejects_open_frontier():
    slab = path_complex(3)
    # vertex v01 in the core but its coface edge v00;v01 outside
    with pytest.raises(ComputationError):
        ExhaustedComplex(slab, {1: {(0, "v01")}})


def test_exhaustion_rejects_unnested():
    slab = path_complex(3)
    full = set(slab.all_simplices())
    with pytest.raises(ComputationError):
        ExhaustedComplex(slab, {1: full, 2: set(list(full)[:2])})


# -- serialization -------------------------------------------------------------------

def test_text_roundtrip():
    for build in CORPUS:
        C = build()
        text = complex_to_text(C)
        D = complex_from_text(text)
        assert D.dims() == C.dims()
        for dim in C.dims():
            assert C.simplices(dim) == D.simplices(dim)
        assert complex_to_text(D) == text
