"""Exact arithmetic over F_q, F_q[t], F_q(t) and the completion at infinity.

Conventions used throughout the package:

* Elements of F_q are integer codes 0..q-1.  The base-p digits of a code
  are the coordinates in the polynomial basis 1, x, .., x^(e-1) of
  F_q = F_p[x]/(modulus), so code arithmetic is table driven.
* Polynomials over F_q are tuples of codes, lowest degree first, with no
  trailing zeros.  The zero polynomial is the empty tuple.
* Rational functions are pairs (num, den) of polynomials with den monic,
  gcd(num, den) = 1 and den = (1,) preferred when possible.  Zero is
  ((), (1,)).
* The place at infinity has uniformizer u = 1/t, and val(f) for a
  polynomial f of degree n is -n.  Series expansions are in powers of u.

All functions take the field object as explicit first argument; data stays
in plain tuples so it hashes and compares cheaply.
"""

from __future__ import annotations

import itertools

from .errors import ComputationError, PrecisionExceeded, SingularMatrix

INF = 1 << 60  # valuation of zero


def _is_prime(n):
    if n < 2:
        return False
    for k in range(2, int(n ** 0.5) + 1):
        if n % k == 0:
            return False
    return True


# default irreducible moduli for the prime powers we support (q <= 16)
_DEFAULT_MODULI = {
    (2, 2): (1, 1, 1),        # x^2 + x + 1
    (2, 3): (1, 1, 0, 1),     # x^3 + x + 1
    (2, 4): (1, 1, 0, 0, 1),  # x^4 + x + 1
    (3, 2): (1, 0, 1),        # x^2 + 1
}


class Fq:
    """A finite field with q = p^e <= 16 elements and precomputed tables."""

    __slots__ = ("p", "e", "q", "modulus", "_add", "_mul", "_neg", "_inv",
                 "one", "units")

    def __init__(self, p, e=1, modulus=None):
        if not _is_prime(p):
            raise ComputationError("p = %r is not prime" % (p,))
        q = p ** e
        if e < 1 or q > 16:
            raise ComputationError("q = p^e must satisfy q <= 16, e >= 1")
        if e == 1:
            modulus = (0, 1) if modulus is None else tuple(modulus)
        elif modulus is None:
            modulus = _DEFAULT_MODULI.get((p, e))
            if modulus is None:
                raise ComputationError("no default modulus for p=%d e=%d" % (p, e))
        else:
            modulus = tuple(modulus)
        if len(modulus) != e + 1 or modulus[-1] != 1:
            raise ComputationError("modulus must be monic of degree e")
        self.p, self.e, self.q, self.modulus = p, e, q, modulus
        self._build_tables()
        if e > 1 and not self._modulus_irreducible():
            raise ComputationError("modulus %r is reducible" % (modulus,))
        self.one = 1
        self.units = tuple(range(1, q))

    # -- element codes ----------------------------------------------------

    def _digits(self, code):
        p, out = self.p, []
        for _ in range(self.e):
            out.append(code % p)
            code //= p
        return out

    def _code(self, digits):
        out = 0
        for d in reversed(digits):
            out = out * self.p + (d % self.p)
        return out

    def _build_tables(self):
        p, e, q = self.p, self.e, self.q
        add = [[0] * q for _ in range(q)]
        mul = [[0] * q for _ in range(q)]
        neg = [0] * q
        for a in range(q):
            da = self._digits(a)
            neg[a] = self._code([(-x) % p for x in da])
            for b in range(q):
                db = self._digits(b)
                add[a][b] = self._code([(x + y) % p for x, y in zip(da, db)])
                # polynomial product of digit vectors, reduced mod modulus
                prod = [0] * (2 * e - 1)
                for i, x in enumerate(da):
                    if x:
                        for j, y in enumerate(db):
                            prod[i + j] = (prod[i + j] + x * y) % p
                for k in range(len(prod) - 1, e - 1, -1):
                    c = prod[k]
                    if c:
                        prod[k] = 0
                        for j in range(e + 1):
                            prod[k - e + j] = (prod[k - e + j] - c * self.modulus[j]) % p
                mul[a][b] = self._code(prod[:e])
        inv = [0] * q
        for a in range(1, q):
            for b in range(1, q):
                if mul[a][b] == 1:
                    inv[a] = b
                    break
        self._add, self._mul, self._neg, self._inv = add, mul, neg, inv

    def _modulus_irreducible(self):
        # a degree-e modulus is irreducible iff x^(q) == x in the quotient
        # and no proper subfield catches it; brute trial division is enough
        # at this size.
        for dd in range(1, self.e // 2 + 1):
            for tail in itertools.product(range(self.p), repeat=dd):
                cand = tuple(tail) + (1,)
                if self._pmod_prime(self.modulus, cand):
                    return False
        return True

    def _pmod_prime(self, a, b):
        # True if b divides a over F_p (prime-field polynomial division)
        p = self.p
        a = list(a)
        db = len(b) - 1
        while len(a) - 1 >= db and any(a):
            while a and a[-1] == 0:
                a.pop()
            if len(a) - 1 < db:
                break
            c = a[-1]  # b monic
            off = len(a) - 1 - db
            for j in range(db + 1):
                a[off + j] = (a[off + j] - c * b[j]) % p
        while a and a[-1] == 0:
            a.pop()
        return not a

    def add(self, a, b):
        return self._add[a][b]

    def sub(self, a, b):
        return self._add[a][self._neg[b]]

    def neg(self, a):
        return self._neg[a]

    def mul(self, a, b):
        return self._mul[a][b]

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero in F_q")
        return self._inv[a]

    def div(self, a, b):
        return self._mul[a][self.inv(b)]

    def __repr__(self):
        if self.e == 1:
            return "Fq(%d)" % self.p
        return "Fq(%d^%d)" % (self.p, self.e)


_FIELD_CACHE = {}


def field(p, e=1, modulus=None):
    """Shared Fq instances; tables are built once per spec."""
    key = (p, e, tuple(modulus) if modulus is not None else None)
    if key not in _FIELD_CACHE:
        _FIELD_CACHE[key] = Fq(p, e, modulus)
    return _FIELD_CACHE[key]


# -- polynomials over F_q (tuples, lowest degree first) --------------------

PZERO = ()
PONE = (1,)


def pnorm(a):
    a = tuple(a)
    i = len(a)
    while i > 0 and a[i - 1] == 0:
        i -= 1
    return a[:i]


def pdeg(a):
    return len(a) - 1 if a else -INF


def padd(F, a, b):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    add = F._add
    for i, c in enumerate(b):
        out[i] = add[out[i]][c]
    return pnorm(out)


def pneg(F, a):
    neg = F._neg
    return tuple(neg[c] for c in a)


def psub(F, a, b):
    return padd(F, a, pneg(F, b))


def pscale(F, a, c):
    if c == 0:
        return PZERO
    if c == 1:
        return tuple(a)
    mul = F._mul
    return tuple(mul[x][c] for x in a)


def pmul(F, a, b):
    if not a or not b:
        return PZERO
    out = [0] * (len(a) + len(b) - 1)
    add, mul = F._add, F._mul
    for i, x in enumerate(a):
        if x:
            mx = mul[x]
            for j, y in enumerate(b):
                if y:
                    out[i + j] = add[out[i + j]][mx[y]]
    return pnorm(out)


def pshift(F, a, k):
    """Multiply by t^k (k >= 0)."""
    if not a:
        return PZERO
    return (0,) * k + tuple(a)


def pdivmod(F, a, b):
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    db, lb = len(b) - 1, b[-1]
    ilb = F.inv(lb)
    q = [0] * max(0, len(a) - db)
    add, mul, neg = F._add, F._mul, F._neg
    while len(a) - 1 >= db:
        if a[-1] == 0:
            a.pop()
            continue
        c = mul[a[-1]][ilb]
        off = len(a) - 1 - db
        q[off] = c
        for j in range(db + 1):
            a[off + j] = add[a[off + j]][neg[mul[c][b[j]]]]
        a.pop()
    return pnorm(q), pnorm(a)


def pmonic(F, a):
    if not a:
        return a
    return pscale(F, a, F.inv(a[-1]))


def pgcd(F, a, b):
    a, b = pnorm(a), pnorm(b)
    while b:
        a, b = b, pdivmod(F, a, b)[1]
    return pmonic(F, a)


def ppow_t(k):
    """The monomial t^k as a polynomial tuple."""
    return (0,) * k + (1,)


def peval(F, a, x):
    out = 0
    for c in reversed(a):
        out = F.add(F.mul(out, x), c)
    return out


def polys_upto(F, max_deg):
    """All polynomials of degree <= max_deg (including zero)."""
    for coeffs in itertools.product(range(F.q), repeat=max_deg + 1):
        yield pnorm(coeffs)


# -- rational functions -----------------------------------------------------

RZERO = (PZERO, PONE)
RONE = (PONE, PONE)


def rnorm(F, num, den):
    num, den = pnorm(num), pnorm(den)
    if not den:
        raise ZeroDivisionError("rational function with zero denominator")
    if not num:
        return RZERO
    g = pgcd(F, num, den)
    if pdeg(g) > 0:
        num = pdivmod(F, num, g)[0]
        den = pdivmod(F, den, g)[0]
    c = den[-1]
    if c != 1:
        ic = F.inv(c)
        num, den = pscale(F, num, ic), pscale(F, den, ic)
    return (num, den)


def rfrom_poly(a):
    a = pnorm(a)
    return (a, PONE) if a else RZERO


def rfrom_tpow(k):
    """t^k as a rational function, any integer k."""
    if k >= 0:
        return (ppow_t(k), PONE)
    return (PONE, ppow_t(-k))


def radd(F, x, y):
    (n1, d1), (n2, d2) = x, y
    if not n1:
        return y
    if not n2:
        return x
    if d1 == d2:
        return rnorm(F, padd(F, n1, n2), d1)
    num = padd(F, pmul(F, n1, d2), pmul(F, n2, d1))
    return rnorm(F, num, pmul(F, d1, d2))


def rneg(F, x):
    return (pneg(F, x[0]), x[1])


def rsub(F, x, y):
    return radd(F, x, rneg(F, y))


def rmul(F, x, y):
    (n1, d1), (n2, d2) = x, y
    if not n1 or not n2:
        return RZERO
    return rnorm(F, pmul(F, n1, n2), pmul(F, d1, d2))


def rinv(F, x):
    n, d = x
    if not n:
        raise ZeroDivisionError("inverse of zero rational function")
    c = F.inv(n[-1])
    return (pscale(F, d, c), pscale(F, n, c))


def rdiv(F, x, y):
    return rmul(F, x, rinv(F, y))


def rscale(F, x, c):
    if c == 0:
        return RZERO
    return (pscale(F, x[0], c), x[1])


def rval(x):
    """Valuation at infinity: deg(den) - deg(num); INF for zero."""
    n, d = x
    if not n:
        return INF
    return (len(d) - 1) - (len(n) - 1)


def rseries(F, x, lo, hi):
    """Coefficients of u^lo .. u^(hi-1) in the expansion of x at infinity."""
    n, d = x
    if hi <= lo:
        return []
    if not n:
        return [0] * (hi - lo)
    v = rval(x)
    # x = u^v * N(u)/D(u) with N, D power series, D(0) != 0
    N = tuple(reversed(n))
    D = tuple(reversed(d))
    need = hi - v  # need coefficients c_0 .. c_{need-1} of N/D
    if need <= 0:
        return [0] * (hi - lo)
    c = [0] * need
    id0 = F.inv(D[0])
    add, mul, neg = F._add, F._mul, F._neg
    for k in range(need):
        acc = N[k] if k < len(N) else 0
        jlo = max(1, k - len(c) + 1)
        for j in range(1, min(k, len(D) - 1) + 1):
            if D[j] and c[k - j]:
                acc = add[acc][neg[mul[D[j]][c[k - j]]]]
        c[k] = mul[acc][id0]
    out = []
    for s in range(lo, hi):
        k = s - v
        out.append(c[k] if 0 <= k < need else 0)
    return out


def rtail(F, x, hi):
    """The part of x with u-exponent < hi, as a rational function.

    The result r is a finite Laurent polynomial in u = 1/t and x - r has
    valuation >= hi.
    """
    v = rval(x)
    if v >= hi:
        return RZERO
    coeffs = rseries(F, x, v, hi)
    out = RZERO
    for i, c in enumerate(coeffs):
        if c:
            e = v + i  # term c * u^e = c * t^(-e)
            out = radd(F, out, rscale(F, rfrom_tpow(-e), c))
    return out


# -- matrices over F_q(t) ---------------------------------------------------

def rmat_mul(F, A, B):
    n, k, m = len(A), len(B), len(B[0])
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = RZERO
            for s in range(k):
                if A[i][s][0] and B[s][j][0]:
                    acc = radd(F, acc, rmul(F, A[i][s], B[s][j]))
            row.append(acc)
        out.append(tuple(row))
    return tuple(out)


def rmat_det(F, A):
    """Determinant by fraction elimination; exact over F_q(t)."""
    n = len(A)
    M = [list(r) for r in A]
    det = RONE
    for c in range(n):
        piv = None
        for i in range(c, n):
            if M[i][c][0]:
                piv = i
                break
        if piv is None:
            return RZERO
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            det = rneg(F, det)
        det = rmul(F, det, M[c][c])
        ipiv = rinv(F, M[c][c])
        for i in range(c + 1, n):
            if M[i][c][0]:
                f = rmul(F, M[i][c], ipiv)
                for j in range(c, n):
                    M[i][j] = rsub(F, M[i][j], rmul(F, f, M[c][j]))
    return det


def rmat_inv(F, A):
    n = len(A)
    M = [list(r) + [RONE if i == j else RZERO for j in range(n)]
         for i, r in enumerate(A)]
    for c in range(n):
        piv = None
        for i in range(c, n):
            if M[i][c][0]:
                piv = i
                break
        if piv is None:
            raise SingularMatrix("matrix is singular")
        M[c], M[piv] = M[piv], M[c]
        ip = rinv(F, M[c][c])
        M[c] = [rmul(F, x, ip) for x in M[c]]
        for i in range(n):
            if i != c and M[i][c][0]:
                f = M[i][c]
                M[i] = [rsub(F, x, rmul(F, f, y)) for x, y in zip(M[i], M[c])]
    return tuple(tuple(r[n:]) for r in M)


# -- polynomial matrices ----------------------------------------------------

def pm_mul(F, A, B):
    n, k, m = len(A), len(B), len(B[0])
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = PZERO
            for s in range(k):
                if A[i][s] and B[s][j]:
                    acc = padd(F, acc, pmul(F, A[i][s], B[s][j]))
            row.append(acc)
        out.append(tuple(row))
    return tuple(out)


def pm_identity(d):
    return tuple(tuple(PONE if i == j else PZERO for j in range(d))
                 for i in range(d))


def pm_det(F, A):
    """Fraction-free (Bareiss) determinant of a polynomial matrix."""
    n = len(A)
    if n == 0:
        return PONE
    M = [list(r) for r in A]
    sign = 1
    prev = PONE
    for k in range(n - 1):
        if not M[k][k]:
            piv = None
            for i in range(k + 1, n):
                if M[i][k]:
                    piv = i
                    break
            if piv is None:
                return PZERO
            M[k], M[piv] = M[piv], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = psub(F, pmul(F, M[i][j], M[k][k]),
                           pmul(F, M[i][k], M[k][j]))
                quo, rem = pdivmod(F, num, prev)
                assert not rem, "Bareiss exact division failed"
                M[i][j] = quo
            M[i][k] = PZERO
        prev = M[k][k]
    det = M[n - 1][n - 1]
    return pneg(F, det) if sign < 0 else det


def _pivot(row):
    """Index of the rightmost entry of maximal degree; None for zero row."""
    best, bestdeg = None, -1
    for j, a in enumerate(row):
        d = pdeg(a)
        if a and d >= bestdeg:
            best, bestdeg = j, d
    return best


def weak_popov(F, M):
    """Row reduce M to weak Popov form.

    Returns (R, U, degs) with R = U * M, U unimodular over F_q[t], the
    pivot entries of R in pairwise distinct columns, and degs the sorted
    (descending) multiset of row degrees of R.  Raises SingularMatrix if
    the rows are dependent.
    """
    R = [list(r) for r in M]
    n, m = len(R), len(R[0])
    U = [[PONE if i == j else PZERO for j in range(n)] for i in range(n)]
    pivots = []
    for row in R:
        p = _pivot(row)
        if p is None:
            raise SingularMatrix("zero row in weak Popov input")
        pivots.append(p)
    while True:
        seen = {}
        clash = None
        for i, p in enumerate(pivots):
            if p in seen:
                clash = (seen[p], i)
                break
            seen[p] = i
        if clash is None:
            break
        i, k = clash
        di = pdeg(R[i][pivots[i]])
        dk = pdeg(R[k][pivots[k]])
        if di < dk:
            i, k = k, i
            di, dk = dk, di
        # reduce row i by row k: kill the leading pivot coefficient
        c = F.div(R[i][pivots[i]][-1], R[k][pivots[k]][-1])
        s = di - dk
        shift = pshift(F, (c,), s)
        for j in range(m):
            if R[k][j]:
                R[i][j] = psub(F, R[i][j], pmul(F, shift, R[k][j]))
        for j in range(n):
            if U[k][j]:
                U[i][j] = psub(F, U[i][j], pmul(F, shift, U[k][j]))
        p = _pivot(R[i])
        if p is None:
            raise SingularMatrix("rows are linearly dependent")
        pivots[i] = p
    Rt = tuple(tuple(row) for row in R)
    Ut = tuple(tuple(row) for row in U)
    degs = tuple(sorted((max(pdeg(a) for a in row) for row in Rt),
                        reverse=True))
    return Rt, Ut, degs


# -- lattices over the valuation ring at infinity ---------------------------

class InfinityLattice:
    """Full lattice over O = F_q[[1/t]] spanned by the rows of a matrix.

    Rows are rational function vectors; the determinant must be nonzero.
    """

    __slots__ = ("field", "rows", "d", "_inv", "_canon")

    def __init__(self, F, rows):
        self.field = F
        self.rows = tuple(tuple(x) if isinstance(x, list) else x for x in
                          (tuple(r) for r in rows))
        self.d = len(self.rows)
        for r in self.rows:
            if len(r) != self.d:
                raise ComputationError("lattice matrix must be square")
        if rmat_det(F, self.rows) == RZERO:
            raise SingularMatrix("lattice rows are dependent")
        self._inv = None
        self._canon = None

    def inverse_rows(self):
        if self._inv is None:
            self._inv = rmat_inv(self.field, self.rows)
        return self._inv

    @classmethod
    def from_polys(cls, F, rows):
        return cls(F, tuple(tuple(rfrom_poly(a) for a in r) for r in rows))

    @classmethod
    def standard(cls, F, d):
        return cls(F, tuple(tuple(RONE if i == j else RZERO for j in range(d))
                            for i in range(d)))

    @classmethod
    def diagonal_tpowers(cls, F, exps):
        """Lattice with rows t^(e_i) * e_i."""
        d = len(exps)
        return cls(F, tuple(tuple(rfrom_tpow(exps[i]) if i == j else RZERO
                                  for j in range(d)) for i in range(d)))


def o_triangularize(F, rows, d=None):
    """Row reduce over O to an upper triangular lattice basis.

    Accepts r >= d generating rows; row operations are unimodular over O,
    so the O-span is unchanged.  Raises SingularMatrix if the rows do not
    span a full lattice.
    """
    rows = [list(r) for r in rows]
    if d is None:
        d = len(rows[0])
    n = len(rows)
    if n < d:
        raise SingularMatrix("not enough rows to span a lattice")
    for col in range(d):
        piv, pval = None, INF
        for i in range(col, n):
            v = rval(rows[i][col])
            if v < pval:
                piv, pval = i, v
        if piv is None or pval == INF:
            raise SingularMatrix("rows do not span a full lattice")
        rows[col], rows[piv] = rows[piv], rows[col]
        pivot = rows[col][col]
        for i in range(col + 1, n):
            if rows[i][col][0]:
                c = rdiv(F, rows[i][col], pivot)
                rows[i] = [rsub(F, x, rmul(F, c, y))
                           for x, y in zip(rows[i], rows[col])]
    for i in range(d, n):
        if any(x[0] for x in rows[i]):
            raise SingularMatrix("generating rows exceed lattice rank")
    return [rows[i] for i in range(d)]


def lattice_canonical_rows(F, rows, normalize_homothety=True):
    """Hermite form at infinity: unique basis with diagonal powers of 1/t.

    Returns (basis, exps, shift): basis rows are upper triangular with
    diagonal t^(-a_i), every entry above the diagonal of column j is a
    finite Laurent polynomial in 1/t with u-exponent < a_j, and when
    normalize_homothety is set the matrix was scaled by t^shift so that
    min(a_i) = 0.  The basis depends only on the O-span of the input (and
    only on its homothety class when normalized).
    """
    d = len(rows[0])
    T = o_triangularize(F, rows, d)
    exps = []
    for i in range(d):
        a = rval(T[i][i])
        unit = rmul(F, T[i][i], rfrom_tpow(a))
        iunit = rinv(F, unit)
        T[i] = [rmul(F, x, iunit) for x in T[i]]
        exps.append(a)
    for i in range(d):
        for j in range(i + 1, d):
            x = T[i][j]
            if not x[0]:
                continue
            r = rtail(F, x, exps[j])
            c = rmul(F, rsub(F, x, r), rfrom_tpow(exps[j]))
            if c[0]:
                T[i] = [rsub(F, y, rmul(F, c, z))
                        for y, z in zip(T[i], T[j])]
    shift = 0
    if normalize_homothety:
        shift = min(exps)
        if shift:
            sc = rfrom_tpow(shift)
            T = [[rmul(F, x, sc) for x in row] for row in T]
            exps = [a - shift for a in exps]
    return [tuple(r) for r in T], tuple(exps), shift


def lattice_polynomialize(F, rows):
    """Scale a lattice into F_q[t]^d: returns (P, s) with P a polynomial
    row basis of t^s * L."""
    T, exps, _ = lattice_canonical_rows(F, rows, normalize_homothety=False)
    s = max(exps)
    sc = rfrom_tpow(s)
    P = []
    for row in T:
        prow = []
        for x in row:
            y = rmul(F, x, sc)
            if y[1] != PONE:
                raise ComputationError("polynomial presentation failed")
            prow.append(y[0])
        P.append(tuple(prow))
    return tuple(P), s


def lattice_reduce(F, rows):
    """Find gamma in GL_d(F_q[t]) moving the lattice to diagonal form.

    Returns (ntype, gamma) where ntype is descending and
    L * gamma = the lattice with rows t^(ntype_j) e_j.  Column operations
    by gamma correspond to changing the polynomial-side basis, so ntype is
    the splitting type of the pair (F_q[t]^d, L).
    """
    d = len(rows[0])
    P, s = lattice_polynomialize(F, rows)
    Pt = tuple(tuple(P[i][j] for i in range(d)) for j in range(d))
    R, U, _ = weak_popov(F, Pt)
    rowdegs = [max(pdeg(a) for a in row) for row in R]
    order = sorted(range(d), key=lambda j: (-rowdegs[j], j))
    gamma = tuple(tuple(U[order[new]][i] for new in range(d))
                  for i in range(d))
    ntype = tuple(rowdegs[j] - s for j in order)
    return ntype, gamma


def bundle_type(lat):
    """Splitting type of (F_q[t]^d, L), descending.

    The entries n_i are pinned by the section-count jumps: the number of i
    with n_i >= -(m+1) equals h0(L, m+1) - h0(L, m), and sum(n_i) is minus
    the valuation of det L.
    """
    ntype, _ = lattice_reduce(lat.field, lat.rows)
    return ntype


def h0_dimension(lat, m, series_ceiling=4096):
    """dim over F_q of {v in F_q[t]^d : v in t^m L}.

    Exact linear algebra on truncated expansions at infinity; the
    truncation window is derived from the valuations of L^(-1) and is
    checked against series_ceiling.
    """
    F, d = lat.field, lat.d
    Minv = lat.inverse_rows()
    colval = [min(rval(lat.rows[j][k]) for j in range(d)) for k in range(d)]
    bounds = [m - colval[k] for k in range(d)]
    unknowns = [(k, b) for k in range(d) for b in range(bounds[k] + 1)
                if bounds[k] >= 0]
    if not unknowns:
        return 0
    maxb = max(bounds[k] for k in range(d) if bounds[k] >= 0)
    lo = min(rval(Minv[k][j]) - bounds[k]
             for k in range(d) for j in range(d) if Minv[k][j][0])
    hi = -m
    if hi <= lo:
        return len(unknowns)
    # u^s coefficient of t^b * X is the u^(s+b) coefficient of X, so the
    # expansions must reach hi + maxb
    top = hi + maxb
    if top - lo > series_ceiling:
        raise PrecisionExceeded(
            "truncation window %d exceeds ceiling %d" % (top - lo, series_ceiling))
    ser = {}
    for k in range(d):
        for j in range(d):
            ser[(k, j)] = rseries(F, Minv[k][j], lo, top)
    rows = []
    for j in range(d):
        for s in range(lo, hi):
            row = []
            for (k, b) in unknowns:
                idx = s + b - lo
                coeffs = ser[(k, j)]
                row.append(coeffs[idx] if 0 <= idx < len(coeffs) else 0)
            if any(row):
                rows.append(tuple(row))
    from .linalg import gf_rank
    return len(unknowns) - gf_rank(F, rows)
