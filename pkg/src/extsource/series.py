"""Truncated multivariate power series in Miwa-type variables, plus Laurent windows.

Series live in one or more "blocks" of variables t_1, t_2, ...; the variable
t_j carries weight j and a series is truncated at a fixed weighted degree cap.
Extra blocks serve two purposes: a second full Miwa alphabet (bilinear
identities in two sets of times) and single "point symbols" of weight one
(shift parameters that must participate in the grading).  Coefficients are
exact rationals by default; a float backend exists for cross-checks only.
"""

from fractions import Fraction


class FieldMismatch(TypeError):
    """Raised when exact and float coefficient fields are mixed."""


class WindowError(ValueError):
    """Raised when a Laurent window cannot support the requested operation."""


def _is_floatlike(x):
    return isinstance(x, float) or (hasattr(x, "dtype") and not isinstance(x, (int, Fraction)))


def _strip(exps):
    exps = tuple(exps)
    n = len(exps)
    while n and exps[n - 1] == 0:
        n -= 1
    return exps[:n]


def _block_weight(exps):
    return sum((i + 1) * e for i, e in enumerate(exps))


def _mono_weight(mono):
    return sum(_block_weight(b) for b in mono)


def _mono_mul(m1, m2):
    out = []
    for b1, b2 in zip(m1, m2):
        if not b1:
            out.append(b2)
        elif not b2:
            out.append(b1)
        else:
            n = max(len(b1), len(b2))
            b1 = b1 + (0,) * (n - len(b1))
            b2 = b2 + (0,) * (n - len(b2))
            out.append(tuple(x + y for x, y in zip(b1, b2)))
    return tuple(out)


class TruncatedSeries:
    """Sparse series with weighted-degree truncation.

    terms maps a monomial to its coefficient; a monomial is a tuple with one
    exponent tuple per block, trailing zeros stripped.  No stored coefficient
    is zero and no stored monomial exceeds the cap, so equality of exact
    series is structural equality.
    """

    __slots__ = ("cap", "nblocks", "field", "terms")

    def __init__(self, cap, terms=None, nblocks=1, field="exact"):
        if cap < 0:
            raise ValueError("cap must be >= 0")
        self.cap = cap
        self.nblocks = nblocks
        self.field = field
        self.terms = {}
        if terms:
            for mono, c in terms.items():
                if c == 0:
                    continue
                mono = tuple(_strip(b) for b in mono)
                if len(mono) != nblocks:
                    raise ValueError("monomial block count mismatch")
                if _mono_weight(mono) > cap:
                    continue
                self.terms[mono] = self.terms.get(mono, 0) + c
            for mono in [m for m, c in self.terms.items() if c == 0]:
                del self.terms[mono]

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, cap, nblocks=1, field="exact"):
        return cls(cap, {}, nblocks, field)

    @classmethod
    def const(cls, value, cap, nblocks=1, field=None):
        if field is None:
            field = "float" if _is_floatlike(value) else "exact"
        mono = ((),) * nblocks
        return cls(cap, {mono: value}, nblocks, field)

    @classmethod
    def one(cls, cap, nblocks=1, field="exact"):
        return cls.const(1 if field == "exact" else 1.0, cap, nblocks, field)

    @classmethod
    def variable(cls, j, cap, block=0, nblocks=1, field="exact"):
        """The variable t_j (weight j) of the given block."""
        if j < 1:
            raise ValueError("variable index must be >= 1")
        if j > cap:
            return cls.zero(cap, nblocks, field)
        mono = tuple(((0,) * (j - 1) + (1,)) if b == block else () for b in range(nblocks))
        return cls(cap, {mono: 1 if field == "exact" else 1.0}, nblocks, field)

    # -- plumbing ----------------------------------------------------------

    def _check_compatible(self, other):
        if self.field != other.field:
            raise FieldMismatch(f"cannot mix {self.field} and {other.field} series")
        if self.nblocks != other.nblocks:
            raise ValueError("block count mismatch")

    def _coerce_scalar(self, c):
        if self.field == "exact":
            if _is_floatlike(c):
                raise FieldMismatch("float scalar into exact series")
            return c
        return float(c)

    def is_zero(self):
        return not self.terms

    def constant_term(self):
        return self.terms.get(((),) * self.nblocks, 0 if self.field == "exact" else 0.0)

    def coeff(self, mono):
        mono = tuple(_strip(b) for b in mono)
        return self.terms.get(mono, 0 if self.field == "exact" else 0.0)

    def weight(self):
        """Largest stored monomial weight (0 for the zero series)."""
        return max((_mono_weight(m) for m in self.terms), default=0)

    def max_abs_coeff(self):
        return max((abs(c) for c in self.terms.values()), default=0)

    def __repr__(self):
        n = len(self.terms)
        return f"<TruncatedSeries cap={self.cap} blocks={self.nblocks} terms={n}>"

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        if self.field == "float" or other.field == "float":
            raise FieldMismatch("float series must be compared with an explicit tolerance")
        return self.terms == other.terms

    def __hash__(self):
        raise TypeError("TruncatedSeries is unhashable")

    # -- ring operations ---------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, TruncatedSeries):
            other = TruncatedSeries.const(self._coerce_scalar(other), self.cap, self.nblocks, self.field)
        self._check_compatible(other)
        cap = min(self.cap, other.cap)
        out = dict(self.terms)
        for mono, c in other.terms.items():
            out[mono] = out.get(mono, 0) + c
        return TruncatedSeries(cap, out, self.nblocks, self.field)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(self.cap, {m: -c for m, c in self.terms.items()}, self.nblocks, self.field)

    def __sub__(self, other):
        if isinstance(other, TruncatedSeries):
            return self + (-other)
        return self + (-self._coerce_scalar(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            c = self._coerce_scalar(other)
            if c == 0:
                return TruncatedSeries.zero(self.cap, self.nblocks, self.field)
            return TruncatedSeries(self.cap, {m: v * c for m, v in self.terms.items()},
                                   self.nblocks, self.field)
        self._check_compatible(other)
        cap = min(self.cap, other.cap)
        out = {}
        for m1, c1 in self.terms.items():
            w1 = _mono_weight(m1)
            for m2, c2 in other.terms.items():
                if w1 + _mono_weight(m2) > cap:
                    continue
                m = _mono_mul(m1, m2)
                out[m] = out.get(m, 0) + c1 * c2
        return TruncatedSeries(cap, out, self.nblocks, self.field)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        if isinstance(scalar, TruncatedSeries):
            raise TypeError("series division is not supported")
        if self.field == "exact":
            return self * Fraction(1, scalar)
        return self * (1.0 / scalar)

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative series power")
        out = TruncatedSeries.one(self.cap, self.nblocks, self.field)
        for _ in range(n):
            out = out * self
        return out

    def flip_signs(self):
        """Substitute t_j -> -t_j in every block."""
        out = {}
        for mono, c in self.terms.items():
            tot = sum(sum(b) for b in mono)
            out[mono] = -c if tot % 2 else c
        return TruncatedSeries(self.cap, out, self.nblocks, self.field)

    def substitute_point(self, block, value):
        """Evaluate a point-symbol block at a scalar, dropping that block.

        The block must only involve its first variable (a weight-one symbol).
        """
        if self.nblocks < 2:
            raise ValueError("cannot drop the last block")
        out = {}
        for mono, c in self.terms.items():
            b = mono[block]
            if len(b) > 1:
                raise ValueError("block is not a point symbol")
            e = b[0] if b else 0
            red = mono[:block] + mono[block + 1:]
            out[red] = out.get(red, 0) + c * value ** e
        return TruncatedSeries(self.cap, out, self.nblocks - 1, self.field)


def series_mul(f, g):
    """Product truncated to min(cap_f, cap_g); exact over rationals."""
    return f * g


def series_exp(f):
    """exp(f) = sum f^k/k! truncated at cap; f must have zero constant term."""
    if f.constant_term() != 0:
        raise ValueError("series_exp requires a zero constant term")
    out = TruncatedSeries.one(f.cap, f.nblocks, f.field)
    term = out
    for k in range(1, f.cap + 1):
        term = term * f / k
        if term.is_zero():
            break
        out = out + term
    return out


def miwa_eval(f, points, block=0):
    """Substitute t_j = sum_i sign_i * c_i^j / j in one block and sum.

    points is a list of (c, sign) with sign = +1 or -1.  All other blocks
    must be absent from f's monomials.
    """
    field_float = f.field == "float"
    tj = {}

    def tval(j):
        if j not in tj:
            acc = 0.0 if field_float else Fraction(0)
            for c, sign in points:
                if field_float:
                    acc += sign * c ** j / j
                else:
                    acc += Fraction(sign) * Fraction(c) ** j / j
            tj[j] = acc
        return tj[j]

    total = 0.0 if field_float else Fraction(0)
    for mono, coef in f.terms.items():
        val = coef
        for b, exps in enumerate(mono):
            if b != block and exps:
                raise ValueError("miwa_eval: series involves another block")
        for i, e in enumerate(mono[block]):
            if e:
                val = val * tval(i + 1) ** e
        total += val
    return total


class LaurentSlice:
    """Finite window of a formal Laurent series in z.

    Coefficients may be scalars or TruncatedSeries (homogeneous within one
    slice).  Powers outside [lo, hi] are implicitly zero; operations that
    would have to reach beyond the window raise WindowError instead of
    silently truncating.
    """

    __slots__ = ("lo", "hi", "coeffs")

    def __init__(self, lo, coeffs):
        coeffs = list(coeffs)
        if not coeffs:
            raise WindowError("empty Laurent window")
        self.lo = lo
        self.hi = lo + len(coeffs) - 1
        self.coeffs = coeffs

    def get(self, power):
        if power < self.lo or power > self.hi:
            raise WindowError(f"power {power} outside window [{self.lo}, {self.hi}]")
        return self.coeffs[power - self.lo]

    def powers(self):
        return range(self.lo, self.hi + 1)

    def shifted(self, k):
        """Multiply by z^k."""
        return LaurentSlice(self.lo + k, self.coeffs)

    def __add__(self, other):
        lo = min(self.lo, other.lo)
        hi = max(self.hi, other.hi)
        out = []
        for p in range(lo, hi + 1):
            a = self.coeffs[p - self.lo] if self.lo <= p <= self.hi else None
            b = other.coeffs[p - other.lo] if other.lo <= p <= other.hi else None
            if a is None:
                out.append(b)
            elif b is None:
                out.append(a)
            else:
                out.append(a + b)
        return LaurentSlice(lo, out)

    def __neg__(self):
        return LaurentSlice(self.lo, [-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def scaled(self, factor):
        """Multiply every coefficient by a scalar or series."""
        return LaurentSlice(self.lo, [factor * c for c in self.coeffs])

    def __repr__(self):
        return f"<LaurentSlice [{self.lo}, {self.hi}]>"


def laurent_residue(L):
    """Coefficient of z^-1; the window must cover power -1."""
    if L.lo > -1 or L.hi < -1:
        raise WindowError(f"window [{L.lo}, {L.hi}] does not cover power -1")
    return L.get(-1)


def laurent_mul(A, B, keep=None):
    """Convolution of two slices restricted to the keep window.

    Every kept power must lie inside the full convolution support
    [A.lo+B.lo, A.hi+B.hi]; powers outside would depend on coefficients the
    windows do not carry.
    """
    full_lo, full_hi = A.lo + B.lo, A.hi + B.hi
    if keep is None:
        keep = (full_lo, full_hi)
    klo, khi = keep
    if klo > khi:
        raise WindowError("empty keep window")
    if klo < full_lo or khi > full_hi:
        raise WindowError(
            f"keep [{klo}, {khi}] exceeds convolution support [{full_lo}, {full_hi}]")
    template = None
    for c in list(A.coeffs) + list(B.coeffs):
        if isinstance(c, TruncatedSeries):
            template = c
            break
    out = []
    for p in range(klo, khi + 1):
        acc = None
        for i in range(max(A.lo, p - B.hi), min(A.hi, p - B.lo) + 1):
            term = A.coeffs[i - A.lo] * B.coeffs[p - i - B.lo]
            acc = term if acc is None else acc + term
        if acc is None:
            acc = 0 if template is None else TruncatedSeries.zero(
                template.cap, template.nblocks, template.field)
        out.append(acc)
    return LaurentSlice(klo, out)
