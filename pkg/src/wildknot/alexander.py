"""Alexander-polynomial machinery: Fox calculus on finite presentations.

Words are strings over [a-z] with capital letters denoting formal inverses
(``"xyxYXY"`` is x y x y^-1 x^-1 y^-1).  Internally a word is a tuple of
signed 1-based generator indices, always freely reduced.

The Alexander polynomial of a deficiency-1 presentation with infinite-cyclic
abelianization (all generators mapping to the same meridian t) is the gcd in
Z[t] of the maximal minors of the Fox-derivative matrix with one column
deleted.  The verdict logic on top treats the limit knot of an infinite
connected-sum tower: the stage-i knot is the connected sum of 2^i copies of
the base, so its polynomial is the 2^i-th power of the base polynomial, and
the limit is certified nontrivial as soon as the base polynomial is not a
unit +-t^k.
"""

from __future__ import annotations

import dataclasses
import string

import sympy

_T = sympy.Symbol("t")

Word = tuple[int, ...]


# ---------------------------------------------------------------------------
# Laurent polynomials over Z


class LaurentPolynomial:
    """Exact integer Laurent polynomial, a finite map exponent -> coefficient."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        self.coeffs = {int(e): int(c) for e, c in dict(coeffs or {}).items() if c != 0}

    @classmethod
    def unit(cls):
        return cls({0: 1})

    @classmethod
    def monomial(cls, exponent, coefficient=1):
        return cls({exponent: coefficient})

    def __add__(self, other):
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out.get(e, 0) + c
        return LaurentPolynomial(out)

    def __neg__(self):
        return LaurentPolynomial({e: -c for e, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        out: dict[int, int] = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                out[e1 + e2] = out.get(e1 + e2, 0) + c1 * c2
        return LaurentPolynomial(out)

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative power")
        result = LaurentPolynomial.unit()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        return isinstance(other, LaurentPolynomial) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def is_zero(self):
        return not self.coeffs

    def is_unit(self):
        """True iff the polynomial is +-t^k."""
        return len(self.coeffs) == 1 and abs(next(iter(self.coeffs.values()))) == 1

    @property
    def min_exponent(self):
        return min(self.coeffs) if self.coeffs else 0

    @property
    def degree(self):
        """Span of the support (degree after normalization); 0 for constants."""
        return max(self.coeffs) - min(self.coeffs) if self.coeffs else 0

    def evaluate(self, value):
        return sum(c * value**e for e, c in self.coeffs.items())

    def normalized(self):
        """Shift lowest exponent to 0 and make the leading coefficient positive."""
        if not self.coeffs:
            return LaurentPolynomial()
        lo = self.min_exponent
        sign = 1 if self.coeffs[max(self.coeffs)] > 0 else -1
        return LaurentPolynomial({e - lo: sign * c for e, c in self.coeffs.items()})

    def coefficient_list(self):
        """Coefficients from the lowest exponent upward (empty for zero)."""
        if not self.coeffs:
            return []
        lo, hi = min(self.coeffs), max(self.coeffs)
        return [self.coeffs.get(e, 0) for e in range(lo, hi + 1)]

    def to_sympy(self):
        return sum(c * _T**e for e, c in self.coeffs.items())

    @classmethod
    def from_sympy(cls, expr):
        expr = sympy.expand(expr)
        poly = sympy.Poly(expr, _T)
        return cls({e[0]: int(c) for e, c in poly.terms()})

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for e in sorted(self.coeffs, reverse=True):
            c = self.coeffs[e]
            mono = "1" if e == 0 else ("t" if e == 1 else f"t^{e}")
            if e != 0 and abs(c) == 1:
                body = mono
            elif e == 0:
                body = str(abs(c))
            else:
                body = f"{abs(c)}*{mono}"
            parts.append(("- " if c < 0 else "+ ") + body)
        s = " ".join(parts)
        return s[2:] if s.startswith("+ ") else "-" + s[2:]

    def __repr__(self):
        return f"LaurentPolynomial({self})"


# ---------------------------------------------------------------------------
# Words and presentations


def _letter_index(ch, n_generators):
    if ch in string.ascii_lowercase:
        idx = ord(ch) - ord("a") + 1
        sign = 1
    elif ch in string.ascii_uppercase:
        idx = ord(ch) - ord("A") + 1
        sign = -1
    else:
        raise ValueError(f"bad letter {ch!r} in word")
    if idx > n_generators:
        raise ValueError(f"letter {ch!r} is not among the first {n_generators} generators")
    return sign * idx


def free_reduce(word):
    out: list[int] = []
    for g in word:
        if out and out[-1] == -g:
            out.pop()
        else:
            out.append(g)
    return tuple(out)


def parse_word(s, n_generators):
    return free_reduce(_letter_index(ch, n_generators) for ch in s.strip())


def word_to_string(word):
    return "".join(
        string.ascii_lowercase[abs(g) - 1] if g > 0 else string.ascii_uppercase[abs(g) - 1]
        for g in word
    )


@dataclasses.dataclass(frozen=True)
class GroupPresentation:
    """Finite presentation with generators a, b, c, ... and reduced relators."""

    n_generators: int
    relators: tuple[Word, ...]

    @classmethod
    def from_strings(cls, n_generators, relator_strings):
        return cls(n_generators, tuple(parse_word(r, n_generators) for r in relator_strings))

    @property
    def deficiency(self):
        return self.n_generators - len(self.relators)

    def generator_names(self):
        return list(string.ascii_lowercase[: self.n_generators])


def parse_presentation(text):
    """File format: first non-empty line = generator letters, then one relator
    per line; '#' starts a comment; inverses as capital letters."""
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    if not lines:
        raise ValueError("empty presentation file")
    gens = lines[0]
    if not gens or any(ch not in string.ascii_lowercase for ch in gens):
        raise ValueError("generator line must be lowercase letters")
    if gens != string.ascii_lowercase[: len(gens)] or len(set(gens)) != len(gens):
        raise ValueError("generators must be an initial segment a, b, c, ...")
    return GroupPresentation.from_strings(len(gens), lines[1:])


def render_presentation(p):
    lines = ["".join(p.generator_names())]
    lines += [word_to_string(r) for r in p.relators]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Fox calculus

# A group-ring element is a dict {reduced word: integer coefficient}.


def _ring_add(a, b, scale=1):
    out = dict(a)
    for w, c in b.items():
        out[w] = out.get(w, 0) + scale * c
        if out[w] == 0:
            del out[w]
    return out


def ring_left_multiply(word, elem):
    """Left-multiply a group-ring element by a group word."""
    out: dict[Word, int] = {}
    for w, c in elem.items():
        key = free_reduce(tuple(word) + w)
        out[key] = out.get(key, 0) + c
        if out[key] == 0:
            del out[key]
    return out


def fox_derivative(word, generator):
    """Free Fox derivative d(word)/d(generator) as a group-ring element.

    generator is a 1-based index. Satisfies d(uv) = d(u) + u d(v),
    d(x)/d(x) = 1, d(x^-1)/d(x) = -x^-1.
    """
    if generator < 1:
        raise ValueError("generator indices are 1-based")
    result: dict[Word, int] = {}
    prefix: Word = ()
    for g in word:
        if g == generator:
            result = _ring_add(result, {prefix: 1})
        elif g == -generator:
            result = _ring_add(result, {free_reduce(prefix + (g,)): -1})
        prefix = free_reduce(prefix + (g,))
    return result


def abelianize(elem):
    """Map a group-ring element into Z[t, 1/t] sending every generator to t."""
    out: dict[int, int] = {}
    for w, c in elem.items():
        e = sum(1 if g > 0 else -1 for g in w)
        out[e] = out.get(e, 0) + c
    return LaurentPolynomial(out)


def alexander_matrix(p):
    """Fox-derivative matrix abelianized at t; rows = relators, cols = generators."""
    return [
        [abelianize(fox_derivative(r, j + 1)) for j in range(p.n_generators)]
        for r in p.relators
    ]


def _abelianization_is_infinite_cyclic(p):
    """Check Z^n / (relator exponent vectors) == Z via Smith normal form."""
    if p.n_generators == 0:
        return False
    rows = []
    for r in p.relators:
        row = [0] * p.n_generators
        for g in r:
            row[abs(g) - 1] += 1 if g > 0 else -1
        rows.append(row)
    if not rows:
        return p.n_generators == 1
    m = sympy.Matrix(rows)
    from sympy.matrices.normalforms import smith_normal_form

    snf = smith_normal_form(m)
    diag = [snf[i, i] for i in range(min(snf.shape))]
    nonzero = [abs(d) for d in diag if d != 0]
    rank = len(nonzero)
    # quotient is Z^(n - rank) x products of Z/d; infinite cyclic needs
    # n - rank == 1 and all nonzero invariant factors equal 1
    return p.n_generators - rank == 1 and all(d == 1 for d in nonzero)


def alexander_polynomial(p, check_knot=True):
    """gcd of the maximal minors of the one-column-deleted Alexander matrix."""
    if p.deficiency != 1:
        raise ValueError(f"need a deficiency-1 presentation, got deficiency {p.deficiency}")
    if not _abelianization_is_infinite_cyclic(p):
        raise ValueError("abelianization is not infinite cyclic")
    if not p.relators:
        return LaurentPolynomial.unit()  # free group of rank 1: unknot
    mat = alexander_matrix(p)
    n = p.n_generators
    # clear denominators: multiply each entry by t^shift so entries live in Z[t]
    shift = max(0, -min(e.min_exponent for row in mat for e in row if not e.is_zero()))
    sym = sympy.Matrix(
        [[(ent * LaurentPolynomial.monomial(shift)).to_sympy() for ent in row] for row in mat]
    )
    minors = []
    for j in range(n):
        cols = [k for k in range(n) if k != j]
        det = sym[:, cols].det()
        if det != 0:
            minors.append(sympy.Poly(det, _T))
    if not minors:
        raise ValueError("all maximal minors vanish; Alexander ideal is zero")
    g = minors[0]
    for m in minors[1:]:
        g = sympy.gcd(g, m)
    delta = LaurentPolynomial.from_sympy(g.as_expr()).normalized()
    if check_knot and abs(delta.evaluate(1)) != 1:
        raise ValueError(f"Delta(1) = {delta.evaluate(1)} != +-1: not a knot-group presentation")
    return delta


def stage_polynomial(delta, i):
    """Polynomial of the i-th connected-sum doubling stage: delta^(2^i)."""
    if i < 0:
        raise ValueError("stage must be >= 0")
    return (delta ** (2**i)).normalized()


def connected_sum(p1, p2):
    """Presentation of the connected sum: free product with meridians merged.

    Both inputs must use generator 'a' as a meridian; the second factor's
    generators are renamed to follow the first factor's, and the relator
    identifying the two 'a' meridians is appended.
    """
    offset = p1.n_generators
    shifted = tuple(
        tuple((abs(g) + offset) * (1 if g > 0 else -1) for g in r) for r in p2.relators
    )
    merge: Word = (1, -(offset + 1))  # a = a'
    return GroupPresentation(
        p1.n_generators + p2.n_generators, p1.relators + shifted + (merge,)
    )


def nontriviality_verdict(delta, depth=6):
    """Certify nontriviality of the infinite connected-sum limit knot.

    Returns a report dict.  The verdict is NONTRIVIAL iff delta is not a unit
    +-t^k; the finite stages double the knot each time, so their polynomials
    are delta^(2^i) and are non-units exactly when delta is.
    """
    delta = delta.normalized()
    nontrivial = not delta.is_unit() and not delta.is_zero()
    stages = []
    for i in range(depth + 1):
        poly = stage_polynomial(delta, i)
        stages.append(
            {
                "stage": i,
                "copies": 2**i,
                "degree": poly.degree,
                "unit": poly.is_unit(),
                "polynomial": str(poly) if poly.degree <= 16 else f"degree-{poly.degree} power",
            }
        )
    return {
        "verdict": "NONTRIVIAL" if nontrivial else "TRIVIAL",
        "base_polynomial": str(delta),
        "base_degree": delta.degree,
        "delta_at_1": delta.evaluate(1),
        "stages": stages,
        "assumed_facts": [
            # Standard results used but not recomputed here; the polynomial
            # arithmetic above is the only machine-checked step.
            "PROOF-LEVEL: the knot-group polynomial is multiplicative under connected sum",
            "PROOF-LEVEL: each stage complement includes into the next inducing an "
            "injection on first homology of the infinite cyclic covers",
            "PROOF-LEVEL: the stage boundary is a product (2-sphere) x (circle), so "
            "nonvanishing stage homology passes to the limit complement",
        ],
    }


# ---------------------------------------------------------------------------
# Presets


def _two_bridge_relator(p, q):
    """Relator a w b^-1 w^-1 of the 2-bridge presentation, w = b^e1 a^e2 ..."""
    w: list[int] = []
    for i in range(1, p):
        gen = 2 if i % 2 == 1 else 1
        sign = 1 if (i * q // p) % 2 == 0 else -1
        w.append(sign * gen)
    inv = [-g for g in reversed(w)]
    return free_reduce(tuple([1] + w + [-2] + inv))


PRESETS = {
    "unknot": GroupPresentation(1, ()),
    "trefoil": GroupPresentation(2, (_two_bridge_relator(3, 1),)),
    "figure-eight": GroupPresentation(2, (_two_bridge_relator(5, 3),)),
    "granny": GroupPresentation.from_strings(3, ["abaBAB", "acaCAC"]),
}
# Spinning a classical knot does not change the fundamental group of the
# complement, so the spun trefoil (the base 2-knot of the block construction)
# shares the trefoil's presentation and polynomial.
PRESETS["spun-trefoil"] = PRESETS["trefoil"]
