"""Closed forms for the layer recursion and their exact cross-checks.

Anything that can be rational is computed with integers or ``Fraction``;
only quantities carrying square roots (eigenvalues, the Cheeger constant,
the a-constants) are floats.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .lattice import LatticeParams, layer_counts, transfer_matrix
from .shapes import minimal_perimeter_closed_form


class DegenerateDiscriminant(ArithmeticError):
    pass


# ---------------------------------------------------------------------------
# spectrum


@dataclass(frozen=True)
class SpectralData:
    params: LatticeParams
    trace: int
    det: int
    discriminant: int
    lambda_plus: float
    lambda_minus: float
    a_plus: float
    a_minus: float
    c_pq: float

    def to_json_dict(self) -> dict:
        d = asdict(self)
        d["params"] = {"p": self.params.p, "q": self.params.q}
        return d


def spectral(params: LatticeParams) -> SpectralData:
    """Eigenvalues of the layer transfer matrix and the constants built on them.

    For p >= 4 the matrix is T1 and the constants come from its
    diagonalisation; for triangulations T2 is used.
    """
    p, q = params.p, params.q
    (a, b), (c, d) = transfer_matrix(params)
    tr, det = a + d, a * d - b * c
    disc = tr * tr - 4 * det
    if p == 3:
        assert disc == (q - 6) * (q - 2)
    else:
        assert disc == (p - 2) * (q - 2) * (q * (p - 2) - 2 * p)
    if det != 1:
        raise AssertionError(f"transfer matrix determinant {det} != 1")
    if disc <= 0:
        raise DegenerateDiscriminant(f"discriminant {disc} for {params}")
    root = math.sqrt(disc)
    lp, lm = (tr + root) / 2, (tr - root) / 2
    # the smaller root loses digits to cancellation; det = 1 recovers it
    lm = 1 / lp
    if p == 3:
        s = math.sqrt((q - 6) * (q - 2))
        ap = 1.5 * (q - 3 + (q - 5) * (q - 2) / s)
        am = 1.5 * (q - 3 - (q - 5) * (q - 2) / s)
    else:
        s = math.sqrt((p - 2) * (p * (q - 2) - 2 * q))
        r = math.sqrt(q - 2)
        ap = s - 2 * r + p * r
        am = s + 2 * r - p * r
    radicand = (p - 2) * (p * (q - 2) - 2 * q)
    c_pq = p / (2 * math.sqrt(radicand)) if radicand > 0 else math.nan
    return SpectralData(params, tr, det, disc, lp, lm, ap, am, c_pq)


def _rel_close(x: float, y: float, tol: float) -> bool:
    return abs(x - y) <= tol * max(abs(x), abs(y))


def cheeger_expressions(params: LatticeParams) -> dict[str, float]:
    """Every available expression for the edge Cheeger constant."""
    p, q = params.p, params.q
    out = {"closed_form": (q - 2) * math.sqrt(1 - 4 / ((p - 2) * (q - 2)))}
    if p == 3:
        sp = spectral(params)
        out["ball_limit_p3"] = 3 * math.sqrt((q - 2) / (q - 6)) * sp.lambda_plus * (sp.lambda_plus - 1) / sp.a_plus
    # the T1 limit is meaningful for p = 3 as well, so evaluate it on T1 directly
    t1 = ((q - 3, q - 2), (8 - 3 * p - 3 * q + p * q, 5 - 2 * p - 3 * q + p * q))
    tr = t1[0][0] + t1[1][1]
    lp = (tr + math.sqrt(tr * tr - 4)) / 2
    r = math.sqrt(q - 2)
    ap = math.sqrt((p - 2) * (p * (q - 2) - 2 * q)) - 2 * r + p * r
    out["ball_limit"] = 2 * r * (lp - 1) / ap
    return out


def cheeger_squared(params: LatticeParams) -> Fraction:
    """i_e squared, which is rational: (q-2)^2 - 4(q-2)/(p-2)."""
    p, q = params.p, params.q
    return Fraction((q - 2) ** 2) - Fraction(4 * (q - 2), p - 2)


def exceeds_cheeger(params: LatticeParams, ratio: Fraction) -> bool:
    """Exact test ratio > i_e (both sides are positive)."""
    return ratio > 0 and ratio * ratio > cheeger_squared(params)


def cheeger_constant(params: LatticeParams, tol: float = 1e-12) -> float:
    """i_e = (q-2) sqrt(1 - 4/((p-2)(q-2))), checked against the ball limits."""
    vals = cheeger_expressions(params)
    ref = vals["closed_form"]
    for name, v in vals.items():
        if not _rel_close(ref, v, tol):
            raise AssertionError(f"{name} = {v!r} disagrees with {ref!r}")
    return ref


# ---------------------------------------------------------------------------
# ratio sequences


def ball_ratio_sequence(params: LatticeParams, n_max: int) -> list[Fraction]:
    """|boundary B_n| / |B_n| for n = 0..n_max, exactly."""
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    lc = layer_counts(params, n_max + 1)
    sizes = lc.ball_sizes()
    return [Fraction(lc.ball_perimeter(n), sizes[n]) for n in range(n_max + 1)]


def minimal_shape_ratio_sequence(params: LatticeParams, sizes: Iterable[int]) -> list[Fraction]:
    """Boundary-to-size ratio of the minimal shapes for each N."""
    return [Fraction(minimal_perimeter_closed_form(params, N), N) for N in sizes]


def layer_bound_sequence(params: LatticeParams, n_max: int) -> list[Fraction]:
    """q-2-2|I_{n+1}|/|L_{n+1}| (p >= 4) or q-4-2|I''_{n+1}|/|L_{n+1}| (p = 3)."""
    lc = layer_counts(params, n_max + 1)
    shift = 4 if params.p == 3 else 2
    return [params.q - shift - Fraction(2 * lc.internal(n + 1), lc.layer_size(n + 1)) for n in range(n_max + 1)]


# ---------------------------------------------------------------------------
# growth series


Poly = tuple[int, ...]


def _trim(a: Sequence[int]) -> Poly:
    a = list(a)
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    return tuple(a)


def poly_add(a: Sequence[int], b: Sequence[int]) -> Poly:
    n = max(len(a), len(b))
    return _trim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])


def poly_mul(a: Sequence[int], b: Sequence[int]) -> Poly:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _trim(out)


def poly_eval(a: Sequence[int], z):
    acc = 0
    for c in reversed(a):
        acc = acc * z + c
    return acc


@dataclass(frozen=True)
class RationalFunction:
    """numerator / denominator with integer coefficients, lowest degree first."""

    numerator: Poly
    denominator: Poly

    def __call__(self, z):
        den = poly_eval(self.denominator, z)
        if den == 0:
            raise ZeroDivisionError("denominator vanishes")
        num = poly_eval(self.numerator, z)
        if isinstance(z, (int, Fraction)):
            return Fraction(num) / den
        return num / den

    def same_as(self, other: "RationalFunction") -> bool:
        return poly_mul(self.numerator, other.denominator) == poly_mul(other.numerator, self.denominator)

    def __str__(self) -> str:
        return f"({_poly_str(self.numerator)}) / ({_poly_str(self.denominator)})"


def _poly_str(a: Sequence[int]) -> str:
    terms = []
    for i, c in enumerate(a):
        if c == 0:
            continue
        mono = "" if i == 0 else ("z" if i == 1 else f"z^{i}")
        coef = str(c) if (i == 0 or abs(c) != 1) else ("-" if c < 0 else "")
        terms.append(f"{coef}{'*' if mono and coef not in ('', '-') else ''}{mono}")
    return " + ".join(terms).replace("+ -", "- ") or "0"


def growth_closed_form(params: LatticeParams) -> RationalFunction:
    p, q = params.p, params.q
    if p == 3:
        # 3 + 3(q-3-z)/(1+(4-q)z+z^2) over a common denominator
        den = (1, 4 - q, 1)
        num = poly_add(poly_mul((3,), den), (3 * (q - 3), -3))
        return RationalFunction(num, den)
    return RationalFunction((p, p), (1, 2 * q + 2 * p - p * q - 2, 1))


def growth_matrix_form(params: LatticeParams) -> RationalFunction:
    """c + (1,1)(Id - zT)^{-1} z v with v = T (initial vector), by 2x2 adjugate."""
    p, q = params.p, params.q
    (a, b), (c, d) = transfer_matrix(params)
    if p == 3:
        start, const = (3, 3 * (q - 4)), 3 * (q - 2)
    else:
        start, const = (0, p), p
    v = (a * start[0] + b * start[1], c * start[0] + d * start[1])
    den = (1, -(a + d), a * d - b * c)
    # (1,1) adj(Id - zT) v, adj = [[1 - d z, b z], [c z, 1 - a z]]
    row = ((1, -d + c), (1, b - a))  # column sums of adj as polynomials in z
    inner = poly_add(poly_mul(row[0], (v[0],)), poly_mul(row[1], (v[1],)))
    num = poly_add(poly_mul((const,), den), poly_mul((0, 1), inner))
    return RationalFunction(num, _trim(den))


def growth_function(params: LatticeParams) -> RationalFunction:
    """Growth series as a rational function, checked against its matrix form."""
    closed = growth_closed_form(params)
    if not closed.same_as(growth_matrix_form(params)):
        raise AssertionError(f"growth function identity fails for {params}")
    return closed


def series_coefficients(f: RationalFunction, n_max: int) -> list[int]:
    """Maclaurin coefficients a_0..a_{n_max} by the denominator's recurrence."""
    den, num = f.denominator, f.numerator
    if den[0] == 0:
        raise ValueError("denominator has zero constant term")
    out: list = []
    for n in range(n_max + 1):
        acc = num[n] if n < len(num) else 0
        for k in range(1, min(n, len(den) - 1) + 1):
            acc -= den[k] * out[n - k]
        if acc % den[0]:
            out.append(Fraction(acc, den[0]))
        else:
            out.append(acc // den[0])
    return out


def matrix_coefficients(params: LatticeParams, n_max: int) -> list[int]:
    """Growth coefficients straight from the transfer matrix.

    p >= 4: (1,1) T1^n (0,p).  p = 3: the expansion of the triangulation
    form, 3(q-2) at n = 0 and (1,1) T2^n (3, 3(q-4)) after that.
    """
    t = transfer_matrix(params)
    if params.p == 3:
        v = (3, 3 * (params.q - 4))
        out = [3 * (params.q - 2)]
        for n in range(1, n_max + 1):
            v = (t[0][0] * v[0] + t[0][1] * v[1], t[1][0] * v[0] + t[1][1] * v[1])
            out.append(v[0] + v[1])
        return out[: n_max + 1]
    v = (0, params.p)
    out = []
    for _ in range(n_max + 1):
        out.append(v[0] + v[1])
        v = (t[0][0] * v[0] + t[0][1] * v[1], t[1][0] * v[0] + t[1][1] * v[1])
    return out


def count_sequence(params: LatticeParams, n_max: int) -> list[int]:
    """Closed-form count sequence a_n from the transfer matrix.

    p >= 4: (1,1) T1^n (0,p) for n >= 0.  p = 3: 3 + (1,1) T2^(n-1) (3, 3(q-4))
    for n >= 1, with index 0 left as ``None``.
    """
    if params.p != 3:
        return matrix_coefficients(params, n_max)
    t = transfer_matrix(params)
    v = (3, 3 * (params.q - 4))
    out: list = [None]
    for _ in range(1, n_max + 1):
        out.append(3 + v[0] + v[1])
        v = (t[0][0] * v[0] + t[0][1] * v[1], t[1][0] * v[0] + t[1][1] * v[1])
    return out


def animal_count_closed_form(params: LatticeParams, n: int) -> float:
    """c(C+ l+^n + C- l-^n) for p >= 4, 3 + C~+ l+^(n-1) + C~- l-^(n-1) for p = 3."""
    sp = spectral(params)
    if params.p == 3:
        if n < 1:
            raise ValueError("the triangulation form starts at n = 1")
        return 3 + sp.a_plus * sp.lambda_plus ** (n - 1) + sp.a_minus * sp.lambda_minus ** (n - 1)
    if n < 0:
        raise ValueError("n must be >= 0")
    return sp.c_pq * (sp.a_plus * sp.lambda_plus**n + sp.a_minus * sp.lambda_minus**n)


def euler_characteristic(params: LatticeParams) -> Fraction:
    """1/f(1), asserted equal to (2q+2p-pq)/(2p)."""
    p, q = params.p, params.q
    f = growth_function(params)
    value = 1 / f(1)
    closed = Fraction(2 * q + 2 * p - p * q, 2 * p)
    if value != closed:
        raise AssertionError(f"1/f(1) = {value} but closed form gives {closed}")
    if p == 3 and closed != Fraction(6 - q, 6):
        raise AssertionError("triangulation Euler characteristic mismatch")
    return value


# ---------------------------------------------------------------------------
# emitters


def counts_rows(params: LatticeParams, n_max: int) -> list[dict]:
    """One row per layer: class counts, ball size, boundary and ratio error."""
    lc = layer_counts(params, n_max + 1)
    sizes = lc.ball_sizes()
    ie = cheeger_constant(params)
    rows = []
    for n in range(n_max + 1):
        a, b = lc.pairs[n]
        ratio = Fraction(lc.ball_perimeter(n), sizes[n])
        rows.append(
            {
                "n": n,
                "I": a,
                "E": b,
                "L": lc.layer_size(n),
                "B": sizes[n],
                "boundary": lc.ball_perimeter(n),
                "ratio": float(ratio),
                "i_e": ie,
                "error": float(ratio) - ie,
            }
        )
    return rows


def rows_to_csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def summary_json(params: LatticeParams) -> str:
    sp = spectral(params)
    return json.dumps(
        {
            "spectral": sp.to_json_dict(),
            "cheeger": cheeger_expressions(params),
            "euler_characteristic": str(euler_characteristic(params)),
            "growth_function": str(growth_function(params)),
        },
        indent=2,
    )
