"""Tests for modular symbols, span certificates, exports, and the semi-norm."""

import random
from fractions import Fraction

import pytest

from btq.errors import (
    BadSimplexPoint, CollarCheckFailed, ComputationError, GeneratorCeiling,
    NotStabilized, SingularBasis, WrongDimension,
)
from btq.ffield import field, rfrom_poly, rmat_mul, rval
from btq.homology import OrientedChain
from btq.modsym import (
    DEFAULT_POLICY, automorphic_csv, automorphic_export, candidate_bases,
    certificate_valid, homology_image, modular_symbol, seminorm_exponent,
    span_json, span_test, symbol_json, symbol_restriction,
)
from btq.quotient import QuotientParams, pm_adjugate_inverse, quotient_exhaustion
from btq.scomplex import Complex, ExhaustedComplex

from oracles import random_glpoly

F2 = field(2)
F3 = field(3)

_CACHE = {}


def params(q, d, level=(1,), alpha_max=6):
    key = (q, d, level, alpha_max)
    if key not in _CACHE:
        F = F2 if q == 2 else F3
        _CACHE[key] = QuotientParams(F, d, level=level, alpha_max=alpha_max)
    return _CACHE[key]


def to_rat(mat):
    def pol(x):
        if isinstance(x, int):
            return (x,) if x else ()
        return x
    return tuple(tuple(rfrom_poly(pol(x)) for x in row) for row in mat)


IDENT = [[1, 0], [0, 1]]


# -- the symbol at full level -------------------------------------------------


def test_full_level_symbol_folds_to_zero():
    # the apartment line maps two-to-one onto the quotient ray with
    # opposite orientations, so the pushforward cancels edge by edge
    P = params(2, 2)
    sym = modular_symbol(IDENT, P, 3)
    assert sym.chain.coeffs == {}
    assert set(sym.certificate.fibers.values()) == {2}
    assert certificate_valid(sym.certificate)
    E = quotient_exhaustion(P, [1, 2, 3])
    core_edges = sorted(k for (dim, k) in E.core(3) if dim == 1)
    assert sorted(sym.certificate.fibers) == core_edges


def test_full_level_symbol_folds_to_zero_q3():
    P = params(3, 2)
    sym = modular_symbol(IDENT, P, 2)
    assert sym.chain.coeffs == {}
    assert set(sym.certificate.fibers.values()) == {2}
    assert certificate_valid(sym.certificate)


def test_symbol_entry_levels_match_cores():
    # entry value of a key is the last alpha whose core misses it
    P = params(2, 2)
    sym = modular_symbol(IDENT, P, 3)
    for alpha in (1, 2, 3):
        E = quotient_exhaustion(P, [alpha])
        core = {k for (dim, k) in E.core(alpha) if dim == 1}
        for key, e in sym.certificate.entry.items():
            assert (e < alpha) == (key in core)


def test_full_level_translation_invariance():
    P = params(2, 2)
    base = modular_symbol(IDENT, P, 3)
    rng = random.Random(5)
    for _ in range(3):
        g = random_glpoly(F2, rng, 2, maxdeg=2)
        Vg = rmat_mul(F2, to_rat(IDENT), to_rat(pm_adjugate_inverse(F2, g)))
        s = modular_symbol(Vg, P, 3)
        assert s.chain == base.chain
        assert s.certificate.fibers == base.certificate.fibers


# -- the symbol at a congruence level -----------------------------------------


def test_level_t_symbol_is_nonzero_relative_cycle():
    P = params(2, 2, level=(0, 1))
    sym = modular_symbol(IDENT, P, 3)
    # the identity-level section of the fiber has trivial stabilizer
    # here, so each edge is hit once and nothing cancels
    assert sym.chain.coeffs
    assert set(sym.certificate.fibers.values()) == {1}
    assert certificate_valid(sym.certificate)
    vals = set(sym.chain.coeffs.values())
    assert vals <= {Fraction(1), Fraction(-1)}


def test_level_t_congruence_invariance():
    P = params(2, 2, level=(0, 1))
    base = modular_symbol(IDENT, P, 3)
    rng = random.Random(7)
    found = 0
    while found < 3:
        g = random_glpoly(F2, rng, 2, maxdeg=2)
        if any((list(g[i][j])[:1] or [0])[0] != (1 if i == j else 0)
               for i in range(2) for j in range(2)):
            continue   # congruent to the identity mod t or skip
        found += 1
        Vg = rmat_mul(F2, to_rat(IDENT), to_rat(pm_adjugate_inverse(F2, g)))
        s = modular_symbol(Vg, P, 3)
        assert s.chain == base.chain
        assert s.certificate.fibers == base.certificate.fibers


def test_row_swap_negates_chain():
    P = params(2, 2, level=(0, 1))
    a = modular_symbol(IDENT, P, 3)
    b = modular_symbol([[0, 1], [1, 0]], P, 3)
    assert b.chain.coeffs == {k: -v for k, v in a.chain.coeffs.items()}


def test_restriction_matches_direct_computation():
    for level in [(1,), (0, 1)]:
        P = params(2, 2, level=level)
        sym = modular_symbol(IDENT, P, 4)
        for alpha in (2, 3):
            direct = modular_symbol(IDENT, P, alpha)
            assert symbol_restriction(sym, alpha) == direct.chain
        assert symbol_restriction(sym, 4) == sym.chain
    with pytest.raises(ComputationError):
        symbol_restriction(sym, 5)


def test_symbol_bad_inputs():
    P = params(2, 2)
    with pytest.raises(SingularBasis):
        modular_symbol([[1, 0], [1, 0]], P, 2)
    with pytest.raises(WrongDimension):
        modular_symbol([[1, 0, 0], [0, 1, 0], [0, 0, 1]], P, 2)
    with pytest.raises(CollarCheckFailed):
        modular_symbol(IDENT, P, 3, collar=2, collar_ceiling=2)


def test_symbol_json_round_trip_shape():
    P = params(2, 2, level=(0, 1))
    sym = modular_symbol(IDENT, P, 2)
    import json
    blob = json.loads(json.dumps(symbol_json(sym)))
    assert blob["alpha"] == 2
    assert blob["certificate"]["radius"] == sym.certificate.radius
    assert all(n >= 1 for n in blob["certificate"]["fibers"].values())
    got = {k: Fraction(n, d) for k, n, d in blob["chain"]}
    assert got == dict(sym.chain.coeffs)


# -- homology image -----------------------------------------------------------


def triangle_exhaustion():
    """One hollow triangle, entirely core at every grid alpha."""
    C = Complex()
    for v in "abc":
        C.add_vertex(v)
    C.add_simplex("ab", ("a", "b"), ("b", "a"))
    C.add_simplex("ac", ("a", "c"), ("c", "a"))
    C.add_simplex("bc", ("b", "c"), ("c", "b"))
    C.seal()
    everything = {(0, "a"), (0, "b"), (0, "c"),
                  (1, "ab"), (1, "ac"), (1, "bc")}
    return ExhaustedComplex(C, {1: everything, 2: everything,
                                3: everything})


class _FakeParams:
    def __init__(self, d):
        self.d = d


def test_homology_image_triangle():
    E = triangle_exhaustion()
    img = homology_image(_FakeParams(2), 3, E=E)
    assert img.row_keys == ("ab", "ac", "bc")
    assert len(img.columns) == 1
    (col,) = img.columns
    # boundary: ab - ac + bc up to the global sign convention
    z = dict(zip(img.row_keys, col))
    assert abs(z["ab"]) == 1 and z["ac"] == -z["ab"] and z["bc"] == z["ab"]


def test_homology_image_unstable_raises():
    # a second component enters only at the last core, so the dimension
    # sequence still moves at the end of the grid
    C = Complex()
    for v in "abcdef":
        C.add_vertex(v)
    for x, y in ["ab", "ac", "bc", "de", "df", "ef"]:
        C.add_simplex(x + y, (x, y), (y, x))
    C.seal()
    one = {(0, v) for v in "abc"} | {(1, k) for k in ("ab", "ac", "bc")}
    two = one | {(0, v) for v in "def"} | {(1, k)
                                           for k in ("de", "df", "ef")}
    E = ExhaustedComplex(C, {1: one, 2: one, 3: two})
    with pytest.raises(NotStabilized):
        homology_image(_FakeParams(2), 3, E=E)


def test_homology_image_on_quotient_levels():
    # full level: the quotient ray carries nothing in degree one
    img = homology_image(params(2, 2), 3)
    assert img.columns == ()
    # level t^2 + t: four independent cycles survive truncation
    P = params(2, 2, level=(0, 1, 1))
    img = homology_image(P, 3)
    assert len(img.columns) == 4
    for z in img.cycles:
        assert z.boundary(quotient_exhaustion(P, [1, 2, 3]).slab).is_zero()


# -- span test ----------------------------------------------------------------


def test_span_vacuous_at_full_level():
    for q in (2, 3):
        cert = span_test(params(q, 2), 3, policy=1)
        assert cert.status == "vacuous"
        assert cert.tried == 0


def test_span_contained_at_level_t2_plus_t():
    P = params(2, 2, level=(0, 1, 1))
    cert = span_test(P, 3, policy=2)
    assert cert.status == "contained"
    # exact reproduction: sum of coefficient * symbol row equals the image
    for col, sol in zip(cert.image_columns, cert.coefficients):
        for r in range(len(cert.row_keys)):
            acc = sum((c * cert.symbol_matrix[g][r] for g, c in sol.items()),
                      Fraction(0))
            assert acc == col[r]
    assert cert.generators
    blob = span_json(cert)
    assert blob["status"] == "contained"
    assert len(blob["coefficients"]) == len(cert.image_columns)


def test_span_insufficient_generators_reports_residual():
    P = params(2, 2, level=(0, 1, 1))
    cert = span_test(P, 3, policy=1)
    assert cert.status == "not_contained_with_generators"
    assert cert.residual
    for ci, rem in cert.residual:
        assert rem
        assert 0 <= ci < len(cert.image_columns)


def test_span_generator_ceiling():
    P = params(2, 2, level=(0, 1, 1))
    policy = DEFAULT_POLICY._replace(entry_degree=2, basis_ceiling=3)
    with pytest.raises(GeneratorCeiling):
        span_test(P, 3, policy=policy)


def test_candidate_bases_shape():
    seen = set()
    count = 0
    for V in candidate_bases(F2, 2, 1):
        count += 1
        assert len(V) == 2 and all(len(r) == 2 for r in V)
        key = frozenset(V)
        assert key not in seen
        seen.add(key)
    # identity basis comes first
    first = next(iter(candidate_bases(F2, 2, 0)))
    assert first == (((), (1,)), ((1,), ()))
    assert count > 10


# -- automorphic export --------------------------------------------------------


def test_automorphic_export_table():
    P = params(2, 2, level=(0, 1))
    sym = modular_symbol(IDENT, P, 3)
    E = quotient_exhaustion(P, [1, 2, 3])
    table = automorphic_export(sym, P, 3, E=E)
    edges = [k for (dim, k) in E.core(3) if dim == 1]
    assert len(table) == 2 * len(edges)
    for key in edges:
        # rotating a 1-simplex swaps the vertex order: opposite signs
        assert table[(key, 0)] == -table[(key, 1)]
        assert abs(table[(key, 0)]) == abs(sym.chain.get(key))
    csv = automorphic_csv(table)
    lines = csv.strip().split("\n")
    assert lines[0] == "simplex,rotation,numerator,denominator"
    assert len(lines) == 1 + len(table)
    # keys contain commas, so the key column must be quoted
    assert all(line.startswith('"') for line in lines[1:])


def test_automorphic_export_zero_chain():
    P = params(2, 2)
    table = automorphic_export(OrientedChain(1, {}), P, 2)
    assert table and all(v == 0 for v in table.values())


# -- semi-norm exponent ---------------------------------------------------------


def test_seminorm_point_values():
    # single vector, full weight: exponent is -val(f(v)) - 1
    s = seminorm_exponent(F2, [[1, 0]], [1], [1, 0])
    assert s.value == Fraction(-1)
    # f(v) = t has valuation -1 at infinity
    s = seminorm_exponent(F2, [[(0, 1), 0]], [1], [1, 0])
    assert s.value == Fraction(0)
    # vanishing functional: empty sup
    s = seminorm_exponent(F2, [[1, 0]], [1], [0, 1])
    assert s.value == float("-inf")


def test_seminorm_zero_weight_terms_do_not_count():
    v = [[1, 0], [0, 1]]
    s = seminorm_exponent(F2, v, [1, 0], [0, 1])
    assert s.value == float("-inf")
    s = seminorm_exponent(F2, v, [0, 1], [0, 1])
    assert s.value == Fraction(-1)


def test_seminorm_matches_direct_recomputation():
    from btq.ffield import radd, rmul, RZERO
    from oracles import random_ratfunc
    rng = random.Random(13)
    weights = [Fraction(1, 2), Fraction(1, 3), Fraction(1, 6)]
    for _ in range(25):
        vecs = [[random_ratfunc(F2, rng, 2) for _ in range(2)]
                for _ in range(3)]
        f = [random_ratfunc(F2, rng, 2) for _ in range(2)]
        terms = []
        for v, t in zip(vecs, weights):
            dot = RZERO
            for a, b in zip(f, v):
                dot = radd(F2, dot, rmul(F2, a, b))
            if dot != RZERO:
                terms.append(Fraction(-rval(dot)) - 1 / t)
        want = max(terms) if terms else float("-inf")
        assert seminorm_exponent(F2, vecs, weights, f).value == want


def test_seminorm_scaling_shifts_by_valuation():
    from btq.ffield import rmul, rfrom_tpow
    from oracles import random_ratfunc
    rng = random.Random(17)
    w = [Fraction(1, 2), Fraction(1, 2)]
    lam = rfrom_tpow(1)            # multiplication by t drops val by one
    for _ in range(20):
        vecs = [[random_ratfunc(F2, rng, 2) for _ in range(2)]
                for _ in range(2)]
        f = [random_ratfunc(F2, rng, 2) for _ in range(2)]
        base = seminorm_exponent(F2, vecs, w, f).value
        scaled = seminorm_exponent(
            F2, vecs, w, [rmul(F2, lam, x) for x in f]).value
        if base == float("-inf"):
            assert scaled == float("-inf")
        else:
            assert scaled == base + 1


def test_seminorm_ultrametric():
    from btq.ffield import radd
    from oracles import random_ratfunc
    rng = random.Random(29)
    w = [Fraction(1, 3), Fraction(1, 3), Fraction(1, 3)]
    for _ in range(25):
        vecs = [[random_ratfunc(F2, rng, 2) for _ in range(2)]
                for _ in range(3)]
        f = [random_ratfunc(F2, rng, 2) for _ in range(2)]
        g = [random_ratfunc(F2, rng, 2) for _ in range(2)]
        sf = seminorm_exponent(F2, vecs, w, f).value
        sg = seminorm_exponent(F2, vecs, w, g).value
        fg = [radd(F2, a, b) for a, b in zip(f, g)]
        assert seminorm_exponent(F2, vecs, w, fg).value <= max(sf, sg)


def test_seminorm_bad_points():
    with pytest.raises(BadSimplexPoint):
        seminorm_exponent(F2, [], [], [1, 0])
    with pytest.raises(BadSimplexPoint):
        seminorm_exponent(F2, [[1, 0]], [Fraction(1, 2)], [1, 0])
    with pytest.raises(BadSimplexPoint):
        seminorm_exponent(F2, [[1, 0]], [2], [1, 0])
    with pytest.raises(BadSimplexPoint):
        seminorm_exponent(F2, [[1, 0]], [1], [1, 0, 0])
