"""Modular symbols in the arithmetic quotient.

A basis of rational vectors spans an apartment of the building.  The
fundamental class of the apartment is a locally finite cycle, and the
projection to the quotient is finite on the apartment, so the class
pushes forward to a Borel-Moore class downstairs.  Truncating below a
convexity gap alpha leaves a finite relative cycle on the core.

There is no effective a priori bound on how far from the origin the
apartment can still meet the core, so the enumeration radius is
certified per run: a pass is accepted only when every apartment vertex
on the enumeration shell lands outside a padded core and no in-core
simplex was found past the collar.  The certificate records the radius,
the shell scan and the preimage count of every simplex hit.

The span test solves, in exact rational arithmetic, for the image of
ordinary homology inside the space of relative cycles as a combination
of modular symbols, enumerating generator bases of bounded entry degree
until the image is covered or the supply runs out.
"""

from __future__ import annotations

import itertools
from collections import namedtuple
from fractions import Fraction

from .errors import (
    BadSimplexPoint, CollarCheckFailed, ComputationError, GeneratorCeiling,
    NotStabilized, SingularBasis, WrongDimension,
)
from .ffield import (
    PONE, RZERO, pdeg, pdivmod, pgcd, pm_det, pmul, pnorm, polys_upto,
    radd, rfrom_poly, rmat_det, rmul, rval,
)
from .linalg import rat_echelon, rat_nullspace
from .scomplex import Complex, perm_sign
from .building import (
    _top_permutation, apartment_top_lifts, point_lattice, small_chain,
)
from .homology import (
    OrientedChain, bm_homology, boundary_matrix, canonical_map,
)
from .quotient import (
    canon_simplex, canon_vertex, quotient_exhaustion, simplex_in_core,
)

NEG_INF = float("-inf")

ModularSymbol = namedtuple("ModularSymbol", "basis alpha chain certificate")

# radius: accepted collar radius; shell: per shell vertex (point, largest
# convexity gap, outside-padded-core flag); fibers: preimage count per
# simplex key; entry: smallest alpha whose core misses the key, minus one
CollarCertificate = namedtuple("CollarCertificate",
                               "radius shell fibers entry")

HomologyImage = namedtuple("HomologyImage",
                           "alpha row_keys columns cycles bm")

SpanCertificate = namedtuple(
    "SpanCertificate",
    "status alpha row_keys image_columns generators symbol_matrix "
    "coefficients residual tried")

GeneratorPolicy = namedtuple("GeneratorPolicy",
                             "entry_degree basis_ceiling collar_ceiling")

DEFAULT_POLICY = GeneratorPolicy(entry_degree=2, basis_ceiling=4096,
                                 collar_ceiling=None)

SeminormExponent = namedtuple("SeminormExponent", "value")


# -- coercion ---------------------------------------------------------------------

def _ratfunc(e):
    if isinstance(e, int):
        return rfrom_poly((e,) if e else ())
    e = tuple(e)
    if len(e) == 2 and all(isinstance(x, (tuple, list)) for x in e):
        return (pnorm(e[0]), pnorm(e[1]))
    return rfrom_poly(pnorm(e))


def _basis_rows(F, V):
    rows = tuple(tuple(_ratfunc(e) for e in row) for row in V)
    d = len(rows)
    if d == 0 or any(len(r) != d for r in rows):
        raise WrongDimension("basis must be a square matrix")
    if rmat_det(F, rows) == RZERO:
        raise SingularBasis("basis rows are linearly dependent")
    return rows


def _cleared_degree(F, rows):
    """Largest entry degree after clearing denominators row by row."""
    best = 0
    for row in rows:
        den = PONE
        for _, dn in row:
            den = pmul(F, den, dn)
        cleared = [pmul(F, num, pdivmod(F, den, dn)[0])
                   for num, dn in row]
        g = ()
        for p in cleared:
            g = pgcd(F, g, p)
        if pdeg(g) > 0:
            cleared = [pdivmod(F, p, g)[0] for p in cleared]
        best = max(best, max(pdeg(p) for p in cleared if p))
    return best


# -- the symbol --------------------------------------------------------------------

def _shell_scan(P, rows, lev, alpha, radius):
    """Check whether every apartment vertex at the given radius lands
    outside the padded core.  The pad of d extra gap units is what makes
    a passing scan evidence that nothing beyond the collar can reach
    core(alpha)."""
    F, d = P.F, P.d
    pad = alpha + d
    out = []
    for x in itertools.product(range(radius + 1), repeat=d):
        if min(x) != 0 or max(x) != radius:
            continue
        res = canon_vertex(P, point_lattice(F, rows, x), lev)
        dp = res.vertex_dps[0]
        out.append((x, max(dp), any(g >= pad for g in dp)))
    return tuple(out)


def _collar_enumerate(P, rows, lev, alpha, radius):
    """One enumeration pass over the box; None signals a collar breach
    (an in-core simplex whose bottom vertex sits past the radius)."""
    F, d = P.F, P.d
    coeffs = {}
    fibers = {}
    lifts = {}
    for lift in apartment_top_lifts(d, 0, radius + 1):
        chain = small_chain(lift)
        base = min(chain[0])
        pts = [tuple(c - base for c in x) for x in chain]
        res = canon_simplex(P, [point_lattice(F, rows, x) for x in pts],
                            lev)
        if not simplex_in_core(res.vertex_dps, d, alpha):
            continue
        if max(pts[0]) > radius:
            return None
        order = sorted(range(d), key=lambda i: res.vertex_keys[i])
        sign = perm_sign(_top_permutation(pts)) * perm_sign(order)
        coeffs[res.key] = coeffs.get(res.key, 0) + sign
        fibers[res.key] = fibers.get(res.key, 0) + 1
        lifts.setdefault(res.key, (pts, res))
    return coeffs, fibers, lifts


def _relative_cycle_check(P, rows, lev, alpha, chain, lifts):
    """Boundary coefficients of the symbol must vanish on the core.

    Cores are closed under cofaces, so every top simplex contributing to
    the boundary at a core face is itself in the core and carries its
    full coefficient; the check is exact, not heuristic.
    """
    F, d = P.F, P.d
    C = Complex()
    info = {}

    def add(pts):
        res = canon_simplex(P, [point_lattice(F, rows, x) for x in pts],
                            lev)
        dim = len(pts) - 1
        if (dim, res.key) not in info:
            info[(dim, res.key)] = res
            if dim == 0:
                C.add_vertex(res.key)
            else:
                pos = {res.vertex_keys[i]: i for i in range(dim + 1)}
                srt = sorted(res.vertex_keys)
                faces = tuple(
                    add([pts[j] for j in range(dim + 1) if j != pos[v]]).key
                    for v in srt)
                C.add_simplex(res.key, tuple(srt), faces)
        return res

    for key in sorted(lifts):
        add(lifts[key][0])
    C.seal()
    for fk, val in sorted(chain.boundary(C).coeffs.items()):
        fres = info[(d - 2, fk)]
        if simplex_in_core(fres.vertex_dps, d, alpha):
            raise ComputationError(
                "symbol boundary hits the core at %r with %s" % (fk, val))


def modular_symbol(V, P, alpha, collar=None, collar_ceiling=None):
    """Pushforward of the apartment class of the basis V, cut at alpha.

    The chain is a relative cycle supported on core(alpha) simplices of
    top dimension; its certificate carries the accepted collar radius,
    the shell scan and the preimage count of every simplex hit.
    """
    F, d = P.F, P.d
    if d < 2:
        raise WrongDimension("modular symbols need dimension at least 2")
    rows = _basis_rows(F, V)
    if len(rows) != d:
        raise WrongDimension("basis size %d does not match dimension %d"
                             % (len(rows), d))
    lev = None if P.full_level else P.ring.identity(d)
    start = 2 * d * (1 + _cleared_degree(F, rows))
    radius = start if collar is None else collar
    ceiling = collar_ceiling if collar_ceiling is not None \
        else max(start + 4 * d, radius)
    while True:
        shell = _shell_scan(P, rows, lev, alpha, radius)
        if all(ok for _, _, ok in shell):
            got = _collar_enumerate(P, rows, lev, alpha, radius)
            if got is not None:
                break
        radius += d
        if radius > ceiling:
            raise CollarCheckFailed(
                "no certified collar radius up to %d" % ceiling)
    coeffs, fibers, lifts = got
    chain = OrientedChain(d - 1, coeffs)
    _relative_cycle_check(P, rows, lev, alpha, chain, lifts)
    entry = {}
    for key, (_, res) in lifts.items():
        entry[key] = max(min(dp[i] for dp in res.vertex_dps)
                         for i in range(d - 1))
    cert = CollarCertificate(radius=radius, shell=shell, fibers=fibers,
                             entry=entry)
    return ModularSymbol(basis=rows, alpha=alpha, chain=chain,
                         certificate=cert)


def certificate_valid(cert):
    return (all(ok for _, _, ok in cert.shell)
            and all(n >= 1 for n in cert.fibers.values()))


def symbol_restriction(sym, alpha):
    """The chain of the same symbol truncated at a smaller alpha."""
    if alpha > sym.alpha:
        raise ComputationError("restriction only goes downward in alpha")
    keys = [k for k, e in sym.certificate.entry.items() if e < alpha]
    return sym.chain.restrict(keys)


# -- image of ordinary homology -----------------------------------------------------

def homology_image(P, alpha_star, E=None, G=3):
    """Cycle basis of the homology carried by core(alpha_star), written
    in relative-cycle coordinates.

    In top degree the relative chain group has no boundaries to quotient
    by, so a class in the exhausted limit IS its coefficient vector on
    the core top simplices; columns are exactly those vectors.
    """
    d = P.d
    if E is None:
        E = quotient_exhaustion(P, list(range(1, alpha_star + 1)))
    bm = bm_homology(E, d - 1, alpha_star, G=G)
    if not bm.stabilized:
        raise NotStabilized(
            "transition ranks still moving at alpha %r" % (alpha_star,))
    tops = sorted(k for (dim, k) in E.core(alpha_star) if dim == d - 1)
    index = {k: j for j, k in enumerate(tops)}
    B = boundary_matrix(E.slab, d - 1)
    keep = {j: index[k] for j, k in enumerate(B.col_keys) if k in index}
    rows = [{keep[j]: v for j, v in row.items() if j in keep}
            for row in B.rows]
    ech = rat_echelon([dict(v) for v in rat_nullspace(rows, len(tops))])
    cycles = []
    for c in sorted(ech):
        z = OrientedChain(d - 1, {tops[j]: v for j, v in ech[c].items()})
        canonical_map(z, E, alpha_star)  # cycle and support validation
        cycles.append(z)
    columns = tuple(tuple(z.get(k) for k in tops) for z in cycles)
    return HomologyImage(alpha=alpha_star, row_keys=tuple(tops),
                         columns=columns, cycles=tuple(cycles), bm=bm)


# -- span test ---------------------------------------------------------------------

class _ComboSpan:
    """Echelon span that remembers how each row was built from the
    inserted vectors, so membership comes with coefficients."""

    def __init__(self):
        self.rows = []

    def _eliminate(self, vec):
        v = {j: Fraction(x) for j, x in vec.items() if x}
        combo = {}
        for pivot, rvec, rcombo in self.rows:
            c = v.get(pivot)
            if not c:
                continue
            f = c / rvec[pivot]
            for j, x in rvec.items():
                nv = v.get(j, Fraction(0)) - f * x
                if nv:
                    v[j] = nv
                else:
                    v.pop(j, None)
            for g, x in rcombo.items():
                combo[g] = combo.get(g, Fraction(0)) - f * x
        return v, combo

    def add(self, vec, tag):
        v, combo = self._eliminate(vec)
        if not v:
            return False
        combo[tag] = combo.get(tag, Fraction(0)) + 1
        self.rows.append((min(v), v, combo))
        return True

    def solve(self, vec):
        """Coefficients over the inserted tags, or (None, residual)."""
        v, combo = self._eliminate(vec)
        if v:
            return None, v
        return {g: -x for g, x in combo.items() if x}, {}


def _primitive_lines(F, d, maxdeg):
    """One polynomial representative per rational line: primitive entries
    with the first nonzero one monic, ordered by entry degree."""
    out = []
    pols = list(polys_upto(F, maxdeg))
    for vec in itertools.product(pols, repeat=d):
        nz = [p for p in vec if p]
        if not nz:
            continue
        if nz[0][-1] != 1:
            continue
        g = ()
        for p in nz:
            g = pgcd(F, g, p)
        if pdeg(g) != 0:
            continue
        out.append(vec)
    out.sort(key=lambda v: (max(pdeg(p) for p in v if p), v))
    return out


def candidate_bases(F, d, maxdeg):
    """Bases of rational lines with entries of degree at most maxdeg,
    one per unordered family, in rounds of growing degree."""
    lines = _primitive_lines(F, d, maxdeg)
    degs = [max(pdeg(p) for p in v if p) for v in lines]
    start = 0
    for m in range(maxdeg + 1):
        n = sum(1 for x in degs if x <= m)
        for combo in itertools.combinations(range(n), d):
            if combo[-1] < start:
                continue
            M = tuple(lines[i] for i in combo)
            if pm_det(F, M):
                yield M
        start = n


def _chain_signature(vec):
    items = sorted(vec.items())
    if items[0][1] < 0:
        items = [(j, -x) for j, x in items]
    return tuple(items)


def span_test(P, alpha_star, policy=None, E=None, image=None):
    """Try to express the homology image as a combination of modular
    symbols from the generator supply.

    The outcome is exact: contained comes with coefficients that are
    re-multiplied and compared entry by entry, not_contained only means
    this particular supply ran out, and vacuous means there was nothing
    to express.
    """
    if policy is None:
        policy = DEFAULT_POLICY
    elif isinstance(policy, int):
        policy = DEFAULT_POLICY._replace(entry_degree=policy)
    if image is None:
        image = homology_image(P, alpha_star, E=E)
    if not image.columns:
        return SpanCertificate("vacuous", alpha_star, image.row_keys,
                               (), (), (), None, None, 0)
    index = {k: j for j, k in enumerate(image.row_keys)}
    targets = [{j: v for j, v in enumerate(col) if v}
               for col in image.columns]
    span = _ComboSpan()
    used = []
    seen = set()
    tried = 0
    done = False
    for V in candidate_bases(P.F, P.d, policy.entry_degree):
        if tried >= policy.basis_ceiling:
            raise GeneratorCeiling(
                "image not covered after %d candidate bases" % tried)
        tried += 1
        sym = modular_symbol(V, P, alpha_star,
                             collar_ceiling=policy.collar_ceiling)
        vec = {}
        for k, c in sym.chain.coeffs.items():
            if k not in index:
                raise ComputationError(
                    "symbol support leaves the core coordinates")
            vec[index[k]] = c
        if not vec:
            continue
        sig = _chain_signature(vec)
        if sig in seen:
            continue
        seen.add(sig)
        if not span.add(vec, len(used)):
            continue
        used.append((V, sym))
        if all(span.solve(t)[0] is not None for t in targets):
            done = True
            break
    generators = tuple(V for V, _ in used)
    symbol_matrix = tuple(tuple(sym.chain.get(k) for k in image.row_keys)
                          for _, sym in used)
    if not done:
        residual = []
        for ci, t in enumerate(targets):
            sol, rem = span.solve(t)
            if sol is None:
                residual.append((ci, {image.row_keys[j]: v
                                      for j, v in sorted(rem.items())}))
        return SpanCertificate("not_contained_with_generators", alpha_star,
                               image.row_keys, image.columns, generators,
                               symbol_matrix, None, tuple(residual), tried)
    coefficients = []
    for t in targets:
        sol, _ = span.solve(t)
        coefficients.append(dict(sorted(sol.items())))
    for col, sol in zip(image.columns, coefficients):
        for r in range(len(image.row_keys)):
            acc = sum((c * symbol_matrix[g][r] for g, c in sol.items()),
                      Fraction(0))
            if acc != col[r]:
                raise ComputationError("span solution fails to reproduce "
                                       "the image exactly")
    return SpanCertificate("contained", alpha_star, image.row_keys,
                           image.columns, generators, symbol_matrix,
                           tuple(coefficients), None, tried)


# -- pointed coefficient table -------------------------------------------------------

def automorphic_export(c, P, alpha, E=None):
    """Coefficients of a relative class on every pointed top simplex of
    core(alpha), normalized so the pointed vertex comes first."""
    chain = c.chain if isinstance(c, ModularSymbol) else c
    if E is None:
        E = quotient_exhaustion(P, [alpha])
    d = P.d
    table = {}
    for (dim, key) in sorted(E.core(alpha)):
        if dim != d - 1:
            continue
        res = E.results[(dim, key)]
        coeff = chain.get(key)
        pos = {v: i for i, v in enumerate(sorted(res.vertex_keys))}
        for j in range(d):
            rotated = res.vertex_keys[j:] + res.vertex_keys[:j]
            sign = perm_sign([pos[v] for v in rotated])
            table[(key, j)] = sign * coeff
    return table


def automorphic_csv(table):
    lines = ["simplex,rotation,numerator,denominator"]
    for key, j in sorted(table):
        v = Fraction(table[(key, j)])
        lines.append('"%s",%d,%d,%d' % (key, j, v.numerator,
                                        v.denominator))
    return "\n".join(lines) + "\n"


# -- semi-norm exponent ---------------------------------------------------------------

def seminorm_exponent(F, vectors, weights, functional):
    """log_q of the simplex semi-norm sup_i |f(v_i)| q^(-1/t_i).

    Exact rational value, or -inf when every admissible term vanishes
    (weight zero or f(v_i) = 0); terms with weight zero never count.
    """
    vecs = [tuple(_ratfunc(e) for e in v) for v in vectors]
    if not vecs:
        raise BadSimplexPoint("need at least one vector")
    f = tuple(_ratfunc(e) for e in functional)
    if any(len(v) != len(f) for v in vecs):
        raise BadSimplexPoint("functional and vectors disagree in size")
    w = [Fraction(x) for x in weights]
    if len(w) != len(vecs):
        raise BadSimplexPoint("one weight per vector")
    if any(x < 0 or x > 1 for x in w) or sum(w) != 1:
        raise BadSimplexPoint("weights must be barycentric coordinates")
    best = NEG_INF
    for v, t in zip(vecs, w):
        if t == 0:
            continue
        x = RZERO
        for a, b in zip(f, v):
            x = radd(F, x, rmul(F, a, b))
        if x == RZERO:
            continue
        e = Fraction(-rval(x)) - Fraction(1) / t
        if best == NEG_INF or e > best:
            best = e
    return SeminormExponent(best)


# -- report shapes -------------------------------------------------------------------

def _frac_json(v):
    v = Fraction(v)
    return [v.numerator, v.denominator]


def symbol_json(sym):
    cert = sym.certificate
    return {
        "basis": [[[list(num), list(den)] for num, den in row]
                  for row in sym.basis],
        "alpha": sym.alpha,
        "chain": [[k, v.numerator, v.denominator]
                  for k, v in sorted(sym.chain.coeffs.items())],
        "certificate": {
            "radius": cert.radius,
            "shell": [[list(x), int(m), bool(ok)]
                      for x, m, ok in cert.shell],
            "fibers": {k: cert.fibers[k] for k in sorted(cert.fibers)},
            "entry": {k: cert.entry[k] for k in sorted(cert.entry)},
        },
    }


def span_json(cert):
    out = {
        "status": cert.status,
        "alpha": cert.alpha,
        "row_keys": list(cert.row_keys),
        "image": [[_frac_json(v) for v in col]
                  for col in cert.image_columns],
        "generators": [[[list(p) for p in row] for row in V]
                       for V in cert.generators],
        "symbols": [[_frac_json(v) for v in row]
                    for row in cert.symbol_matrix],
        "tried": cert.tried,
    }
    if cert.coefficients is not None:
        out["coefficients"] = [
            {str(g): _frac_json(c) for g, c in sol.items()}
            for sol in cert.coefficients]
    if cert.residual is not None:
        out["residual"] = [
            [ci, {k: _frac_json(v) for k, v in rem.items()}]
            for ci, rem in cert.residual]
    return out
