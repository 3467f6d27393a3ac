"""Differential polynomials in one dependent variable and local functionals.

A `DiffPoly` is a finite sum of monomials in u = u_0, u_1, u_2, ... (u_k is
the k-th x-derivative of u) whose coefficients are polynomials in the two
deformation parameters h and e, held as truncated `MultiSeries`.  On top of
the ring this module provides the total x-derivative, the variational
(Euler) derivative, integration-by-parts normalization of densities, the
Poisson bracket {f, g} = int (delta f/delta u) d/dx (delta g/delta u) dx,
the triangular Miura substitution and its compositional inverse, and the
reconstruction of a Hamiltonian from its flow via the homotopy formula.

A `LocalFunctional` is the class of a density modulo total x-derivatives,
stored in a canonical normal form: no monomial keeps a factor u_N (N >= 1)
that is linear and strictly above every other derivative index in that
monomial.  Together with dropping pure c*u_N terms this picks one density
per class, so equality of functionals is a dictionary comparison.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Iterable, Iterator, Mapping, Union

from .mpseries import MultiSeries, VarSpec

__all__ = [
    "DiffAlgError",
    "NotTotalDerivativeError",
    "NotSelfAdjointError",
    "UExps",
    "u_key",
    "coeff_ring",
    "DiffMonomial",
    "DiffPoly",
    "LocalFunctional",
    "total_x_derivative",
    "x_derivative_n",
    "variational_derivative",
    "normalize",
    "poisson_bracket",
    "miura_series",
    "miura_inverse_series",
    "miura_forward",
    "miura_inverse",
    "integrate_x",
    "frechet_apply",
    "reconstruct_functional_from_flow",
    "random_diffpoly",
]

# ((derivative index, multiplicity), ...) sorted by index, multiplicities > 0
UExps = tuple[tuple[int, int], ...]

Coefficient = Union[int, Fraction, MultiSeries]


class DiffAlgError(ValueError):
    """An operation violated a differential-algebra precondition."""


class NotTotalDerivativeError(DiffAlgError):
    """The input is not a total x-derivative."""


class NotSelfAdjointError(DiffAlgError):
    """The integrated flow is not a variational gradient."""


def u_key(exponents: Mapping[int, int] | Iterable[tuple[int, int]]) -> UExps:
    """Canonicalize {derivative index: multiplicity} into a UExps tuple."""
    items = exponents.items() if isinstance(exponents, Mapping) else exponents
    acc: dict[int, int] = {}
    for k, m in items:
        if k < 0:
            raise DiffAlgError(f"derivative index must be >= 0, got {k}")
        if m < 0:
            raise DiffAlgError(f"multiplicity must be >= 0, got {m}")
        if m:
            acc[k] = acc.get(k, 0) + m
    return tuple(sorted(acc.items()))


def coeff_ring(G: int) -> tuple[VarSpec, VarSpec]:
    """Coefficient variables (h, e) truncated so exponents up to G survive."""
    if G < 0:
        raise DiffAlgError(f"truncation order must be >= 0, got {G}")
    return (VarSpec("h", G + 1), VarSpec("e", G + 1))


def differential_degree(ue: UExps) -> int:
    """D = sum of index * multiplicity."""
    return sum(k * m for k, m in ue)


def u_degree(ue: UExps) -> int:
    """N = total multiplicity."""
    return sum(m for _, m in ue)


def _dense(ue: UExps, width: int) -> tuple[int, ...]:
    out = [0] * width
    for k, m in ue:
        out[k] = m
    return tuple(out)


def monomial_sort_key(ue: UExps) -> tuple:
    """Graded-lex canonical order: differential degree, then the dense
    exponent vector (u_0 multiplicity first)."""
    top = ue[-1][0] if ue else 0
    return (differential_degree(ue), _dense(ue, top + 1))


def _integration_key(ue: UExps) -> tuple:
    # order used by integration by parts: top derivative index first, then
    # multiplicities read from the top index downward
    if not ue:
        return (-1, ())
    top = ue[-1][0]
    return (top, tuple(reversed(_dense(ue, top + 1))))


@dataclass(frozen=True)
class DiffMonomial:
    """One canonical term: a coefficient polynomial in (h, e) times a
    u-derivative monomial."""

    coefficient: MultiSeries
    u_exponents: UExps

    @property
    def differential_degree(self) -> int:
        return differential_degree(self.u_exponents)

    @property
    def u_degree(self) -> int:
        return u_degree(self.u_exponents)


class DiffPoly:
    """Finite sum of `DiffMonomial`s over a fixed (h, e) coefficient ring."""

    __slots__ = ("coeff_vars", "terms")

    def __init__(self, coeff_vars: Iterable[VarSpec], terms: Mapping[UExps, Coefficient]):
        cvars = tuple(coeff_vars)
        clean: dict[UExps, MultiSeries] = {}
        for ue, coef in terms.items():
            key = u_key(dict(ue))
            series = self._as_coeff(cvars, coef)
            if series.is_zero():
                continue
            if key in clean:
                acc = clean[key] + series
                if acc.is_zero():
                    del clean[key]
                else:
                    clean[key] = acc
            else:
                clean[key] = series
        self.coeff_vars = cvars
        self.terms = clean

    @staticmethod
    def _as_coeff(cvars: tuple[VarSpec, ...], coef: Coefficient) -> MultiSeries:
        if isinstance(coef, MultiSeries):
            if coef.vars != cvars:
                raise DiffAlgError("coefficient series lives in a different ring")
            return coef
        return MultiSeries.constant(cvars, coef)

    @classmethod
    def _make(cls, cvars: tuple[VarSpec, ...], terms: dict[UExps, MultiSeries]) -> "DiffPoly":
        out = cls.__new__(cls)
        out.coeff_vars = cvars
        out.terms = terms
        return out

    # -- constructors --------------------------------------------------------

    @classmethod
    def zero(cls, cvars: Iterable[VarSpec]) -> "DiffPoly":
        return cls._make(tuple(cvars), {})

    @classmethod
    def constant(cls, cvars: Iterable[VarSpec], coef: Coefficient) -> "DiffPoly":
        return cls(cvars, {(): coef})

    @classmethod
    def u_power(cls, cvars: Iterable[VarSpec], index: int = 0, mult: int = 1,
                coef: Coefficient = 1) -> "DiffPoly":
        return cls(cvars, {u_key({index: mult}): coef})

    # -- queries ---------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def monomials(self) -> Iterator[DiffMonomial]:
        for ue in sorted(self.terms, key=monomial_sort_key):
            yield DiffMonomial(self.terms[ue], ue)

    def max_index(self) -> int:
        """Highest derivative index present (-1 for u-free polynomials)."""
        tops = [ue[-1][0] for ue in self.terms if ue]
        return max(tops, default=-1)

    def coefficient_of(self, ue: Mapping[int, int] | UExps) -> MultiSeries:
        key = u_key(dict(ue))
        return self.terms.get(key, MultiSeries.zero(self.coeff_vars))

    def u_free_part(self) -> MultiSeries:
        return self.terms.get((), MultiSeries.zero(self.coeff_vars))

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiffPoly):
            return NotImplemented
        return self.coeff_vars == other.coeff_vars and self.terms == other.terms

    __hash__ = None  # mutable dict inside; compare by value only

    def __bool__(self) -> bool:
        return bool(self.terms)

    # -- arithmetic --------------------------------------------------------------

    def _check_ring(self, other: "DiffPoly") -> None:
        if self.coeff_vars != other.coeff_vars:
            raise DiffAlgError("operands live over different coefficient rings")

    def __add__(self, other) -> "DiffPoly":
        if not isinstance(other, DiffPoly):
            return NotImplemented
        self._check_ring(other)
        terms = dict(self.terms)
        for ue, c in other.terms.items():
            _accumulate(terms, ue, c)
        return DiffPoly._make(self.coeff_vars, terms)

    def __neg__(self) -> "DiffPoly":
        return DiffPoly._make(self.coeff_vars, {ue: -c for ue, c in self.terms.items()})

    def __sub__(self, other) -> "DiffPoly":
        if not isinstance(other, DiffPoly):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other) -> "DiffPoly":
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return DiffPoly.zero(self.coeff_vars)
            return DiffPoly._make(
                self.coeff_vars, {ue: c * other for ue, c in self.terms.items()}
            )
        if isinstance(other, MultiSeries):
            terms: dict[UExps, MultiSeries] = {}
            for ue, c in self.terms.items():
                prod = c * other
                if not prod.is_zero():
                    terms[ue] = prod
            return DiffPoly._make(self.coeff_vars, terms)
        if not isinstance(other, DiffPoly):
            return NotImplemented
        self._check_ring(other)
        terms = {}
        for ua, ca in self.terms.items():
            for ub, cb in other.terms.items():
                prod = ca * cb
                if prod.is_zero():
                    continue
                _accumulate(terms, _merge_keys(ua, ub), prod)
        return DiffPoly._make(self.coeff_vars, terms)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "DiffPoly":
        if not isinstance(n, int) or n < 0:
            raise DiffAlgError(f"power must be a non-negative integer, got {n}")
        out = DiffPoly.constant(self.coeff_vars, 1)
        for _ in range(n):
            out = out * self
        return out

    # -- serialization --------------------------------------------------------------

    def to_json_dict(self) -> list:
        return [
            {"coef": m.coefficient.to_json_dict(), "u": [list(p) for p in m.u_exponents]}
            for m in self.monomials()
        ]

    def pretty(self) -> str:
        """Plain-text rendering, e.g. "u*u_1 + 1/12*h*u_3"."""
        if not self.terms:
            return "0"
        parts = []
        for m in self.monomials():
            parts.append(_pretty_term(m))
        out = parts[0]
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out

    def latex(self) -> str:
        if not self.terms:
            return "0"
        parts = [_latex_term(m) for m in self.monomials()]
        out = parts[0]
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out

    def __str__(self) -> str:
        return self.pretty()

    def __repr__(self) -> str:
        return f"DiffPoly({self.pretty()})"


def _accumulate(terms: dict[UExps, MultiSeries], ue: UExps, coef: MultiSeries) -> None:
    if ue in terms:
        acc = terms[ue] + coef
        if acc.is_zero():
            del terms[ue]
        else:
            terms[ue] = acc
    elif not coef.is_zero():
        terms[ue] = coef


def _merge_keys(a: UExps, b: UExps) -> UExps:
    acc = dict(a)
    for k, m in b:
        acc[k] = acc.get(k, 0) + m
    return tuple(sorted(acc.items()))


def _u_name(k: int) -> str:
    return "u" if k == 0 else f"u_{k}"


def _coeff_prefix(coef: MultiSeries) -> tuple[str, bool]:
    # returns (rendered coefficient, needs_star) with sign folded when the
    # coefficient is a single term
    if len(coef.terms) == 1:
        text = str(coef)
        return text, True
    return f"({coef})", True


def _pretty_term(m: DiffMonomial) -> str:
    ufacs = [
        _u_name(k) if mult == 1 else f"{_u_name(k)}^{mult}" for k, mult in m.u_exponents
    ]
    coef = m.coefficient
    if not ufacs:
        return str(coef) if len(coef.terms) == 1 else f"({coef})"
    if len(coef.terms) == 1 and coef.constant_term == 1:
        return "*".join(ufacs)
    if len(coef.terms) == 1 and coef.constant_term == -1:
        return "-" + "*".join(ufacs)
    prefix, _ = _coeff_prefix(coef)
    return "*".join([prefix] + ufacs)


_LATEX_VAR = {"h": r"\hbar", "e": r"\varepsilon"}


def _latex_coeff(coef: MultiSeries) -> str:
    parts = []
    for e, c in coef.sorted_terms():
        factors = []
        for v, x in zip(coef.vars, e):
            if x == 0:
                continue
            sym = _LATEX_VAR.get(v.name, v.name)
            factors.append(sym if x == 1 else f"{sym}^{{{x}}}")
        body = "".join(factors)
        if c.denominator == 1:
            num = str(abs(c.numerator))
        else:
            num = rf"\frac{{{abs(c.numerator)}}}{{{c.denominator}}}"
        sign = "-" if c < 0 else "+"
        if num == "1" and body:
            parts.append((sign, body))
        else:
            parts.append((sign, num + body))
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def _latex_term(m: DiffMonomial) -> str:
    ufacs = []
    for k, mult in m.u_exponents:
        base = f"u_{{{k}}}" if k else "u"
        ufacs.append(base if mult == 1 else f"{base}^{{{mult}}}")
    body = " ".join(ufacs)
    coef = m.coefficient
    rendered = _latex_coeff(coef)
    if len(coef.terms) > 1:
        return rf"\left({rendered}\right) {body}".strip()
    if not body:
        return rendered
    if rendered == "1":
        return body
    if rendered == "-1":
        return "-" + body
    return f"{rendered} {body}"


# -- calculus ---------------------------------------------------------------------


def partial_u(p: DiffPoly, k: int) -> DiffPoly:
    """Partial derivative with respect to the symbol u_k."""
    terms: dict[UExps, MultiSeries] = {}
    for ue, coef in p.terms.items():
        d = dict(ue)
        m = d.get(k)
        if not m:
            continue
        if m == 1:
            del d[k]
        else:
            d[k] = m - 1
        _accumulate(terms, tuple(sorted(d.items())), coef * m)
    return DiffPoly._make(p.coeff_vars, terms)


def total_x_derivative(p: DiffPoly) -> DiffPoly:
    """d/dx p = sum_k (dp/du_k) u_{k+1}; a derivation, kills constants."""
    terms: dict[UExps, MultiSeries] = {}
    for ue, coef in p.terms.items():
        for k, m in ue:
            d = dict(ue)
            if m == 1:
                del d[k]
            else:
                d[k] = m - 1
            d[k + 1] = d.get(k + 1, 0) + 1
            _accumulate(terms, tuple(sorted(d.items())), coef * m)
    return DiffPoly._make(p.coeff_vars, terms)


def x_derivative_n(p: DiffPoly, n: int) -> DiffPoly:
    for _ in range(n):
        p = total_x_derivative(p)
    return p


def substitute_u(p: DiffPoly, image: DiffPoly) -> DiffPoly:
    """Replace the dependent variable: u_k goes to d^k/dx^k (image)."""
    p._check_ring(image)
    images = [image]
    for _ in range(max(p.max_index(), 0)):
        images.append(total_x_derivative(images[-1]))
    out = DiffPoly.zero(p.coeff_vars)
    for ue, coef in p.terms.items():
        term = DiffPoly.constant(p.coeff_vars, coef)
        for k, m in ue:
            term = term * images[k] ** m
        out = out + term
    return out


def variational_derivative(h: "LocalFunctional | DiffPoly") -> DiffPoly:
    """Euler operator: delta/delta u = sum_k (-d/dx)^k (partial/partial u_k).

    Representative-independent: total x-derivatives are killed.
    """
    f = h.density if isinstance(h, LocalFunctional) else h
    out = DiffPoly.zero(f.coeff_vars)
    for k in range(f.max_index() + 1):
        term = x_derivative_n(partial_u(f, k), k)
        out = out + (term if k % 2 == 0 else -term)
    return out


# -- normal form -------------------------------------------------------------------


def _is_normal_key(ue: UExps) -> bool:
    if not ue:
        return True
    top, mult = ue[-1]
    return top == 0 or mult >= 2


class LocalFunctional:
    """int(density) dx modulo total x-derivatives, density in normal form.

    Build through `normalize`; the constructor trusts its input.
    """

    __slots__ = ("density",)

    def __init__(self, density: DiffPoly):
        self.density = density

    @property
    def coeff_vars(self) -> tuple[VarSpec, ...]:
        return self.density.coeff_vars

    def is_zero(self) -> bool:
        return self.density.is_zero()

    def __eq__(self, other) -> bool:
        if not isinstance(other, LocalFunctional):
            return NotImplemented
        return self.density == other.density

    __hash__ = None

    def __add__(self, other: "LocalFunctional") -> "LocalFunctional":
        # sums of normal-form monomials stay normal
        return LocalFunctional(self.density + other.density)

    def __sub__(self, other: "LocalFunctional") -> "LocalFunctional":
        return LocalFunctional(self.density - other.density)

    def __neg__(self) -> "LocalFunctional":
        return LocalFunctional(-self.density)

    def __mul__(self, other) -> "LocalFunctional":
        if isinstance(other, (int, Fraction, MultiSeries)):
            return LocalFunctional(self.density * other)
        return NotImplemented

    __rmul__ = __mul__

    def pretty(self) -> str:
        return f"int({self.density.pretty()}) dx"

    def latex(self) -> str:
        return rf"\int\left({self.density.latex()}\right)\,dx"

    def to_json_dict(self) -> list:
        return self.density.to_json_dict()

    def __repr__(self) -> str:
        return f"LocalFunctional({self.density.pretty()})"


def normalize(p: DiffPoly) -> LocalFunctional:
    """Integration-by-parts normal form of int(p) dx.

    A monomial c*R*u_{N-1}^j*u_N with u_N linear and strictly top reduces to
    -c/(j+1) * dx(R) * u_{N-1}^{j+1}: the usual step int Q u_N = -int (dx Q)
    u_{N-1}, with the self-reproducing part (dx raising a u_{N-1} of Q back
    to u_N) already solved for.  Every produced monomial has strictly lower
    top index, so the loop terminates; pure c*u_N terms come out as zero.
    The result is the projection onto the complement of im(d/dx), hence
    idempotent and independent of reduction order.
    """
    cvars = p.coeff_vars
    work: dict[UExps, MultiSeries] = dict(p.terms)
    out: dict[UExps, MultiSeries] = {}
    while work:
        ue = max(work, key=_integration_key)
        coef = work.pop(ue)
        if coef.is_zero():
            continue
        if _is_normal_key(ue):
            _accumulate(out, ue, coef)
            continue
        top = ue[-1][0]
        rest = dict(ue[:-1])
        j = rest.pop(top - 1, 0)
        r_key = tuple(sorted(rest.items()))
        factor = coef * Fraction(-1, j + 1)
        d_r = total_x_derivative(DiffPoly._make(cvars, {r_key: MultiSeries.constant(cvars, 1)}))
        for rk, rc in d_r.terms.items():
            new_key = _merge_keys(rk, ((top - 1, j + 1),))
            _accumulate(work, new_key, rc * factor)
    return LocalFunctional(DiffPoly._make(cvars, out))


def poisson_bracket(
    h: "LocalFunctional | DiffPoly", f: "LocalFunctional | DiffPoly"
) -> LocalFunctional:
    """{h, f} = int (delta h/delta u) d/dx (delta f/delta u) dx, normalized."""
    dh = variational_derivative(h)
    df = variational_derivative(f)
    return normalize(dh * total_x_derivative(df))


# -- Miura substitution ---------------------------------------------------------


def _miura_tail(cvars: tuple[VarSpec, ...], G: int) -> DiffPoly:
    # sum_{g>=1} (-1)^g / (4^g (2g+1)!) h^g e^g u_{2g}
    terms: dict[UExps, MultiSeries] = {}
    hspec, espec = cvars[0], cvars[1]
    for g in range(1, G + 1):
        if g >= hspec.order or g >= espec.order:
            break
        coef = MultiSeries.monomial(cvars, (g, g), Fraction((-1) ** g, 4**g * factorial(2 * g + 1)))
        terms[u_key({2 * g: 1})] = coef
    return DiffPoly._make(cvars, terms)


def miura_series(cvars: Iterable[VarSpec], G: int) -> DiffPoly:
    """The substitution series of the triangular change of dependent variable:
    the image reads w + sum_{g>=1} (-1)^g/(2^{2g}(2g+1)!) h^g e^g w_{2g}."""
    cvars = tuple(cvars)
    return DiffPoly.u_power(cvars) + _miura_tail(cvars, G)


def miura_inverse_series(cvars: Iterable[VarSpec], G: int) -> DiffPoly:
    """Order-by-order compositional inverse of `miura_series`.

    Solved as the fixed point W = u - tail(W); the tail raises the h-degree,
    so G sweeps suffice.
    """
    cvars = tuple(cvars)
    tail = _miura_tail(cvars, G)
    u = DiffPoly.u_power(cvars)
    w = u
    for _ in range(G):
        w = u - substitute_u(tail, w)
    return w


def miura_forward(p: DiffPoly, G: int) -> DiffPoly:
    """Substitute the displayed triangular series for the dependent variable
    (rewrites an expression against the transformed variable)."""
    return substitute_u(p, miura_series(p.coeff_vars, G))


def miura_inverse(p: DiffPoly, G: int) -> DiffPoly:
    """Substitute the compositional inverse series; round-trips with
    `miura_forward` up to h^G."""
    return substitute_u(p, miura_inverse_series(p.coeff_vars, G))


# -- integration and reconstruction -----------------------------------------------


def integrate_x(q: DiffPoly) -> DiffPoly:
    """A differential polynomial phi with d/dx phi = q, when one exists.

    Repeatedly peels the greatest monomial (top derivative index first): for
    q in the image of d/dx that monomial has a linear strictly-top factor
    u_N, and its unique preimage lowers u_N to u_{N-1}.
    """
    cvars = q.coeff_vars
    work: dict[UExps, MultiSeries] = dict(q.terms)
    phi: dict[UExps, MultiSeries] = {}
    while work:
        ue = max(work, key=_integration_key)
        coef = work[ue]
        if coef.is_zero():
            del work[ue]
            continue
        if not ue or ue[-1][0] == 0:
            raise NotTotalDerivativeError(
                f"monomial {DiffMonomial(coef, ue)!r} admits no x-antiderivative"
            )
        top, mult = ue[-1]
        if mult != 1:
            raise NotTotalDerivativeError(
                f"leading monomial has u_{top}^{mult}; input is not a total derivative"
            )
        d = dict(ue)
        del d[top]
        d[top - 1] = d.get(top - 1, 0) + 1
        pre_key = tuple(sorted(d.items()))
        c = coef * Fraction(1, d[top - 1])
        _accumulate(phi, pre_key, c)
        d_pre = total_x_derivative(DiffPoly._make(cvars, {pre_key: c}))
        for rk, rc in d_pre.terms.items():
            _accumulate(work, rk, -rc)
    return DiffPoly._make(cvars, phi)


def frechet_apply(phi: DiffPoly, b: DiffPoly) -> DiffPoly:
    """Frechet derivative of phi applied to b: sum_k (dphi/du_k) d^k/dx^k b."""
    phi._check_ring(b)
    out = DiffPoly.zero(phi.coeff_vars)
    bk = b
    for k in range(phi.max_index() + 1):
        if k > 0:
            bk = total_x_derivative(bk)
        out = out + partial_u(phi, k) * bk
    return out


def random_diffpoly(
    cvars: tuple[VarSpec, ...],
    rng: random.Random,
    max_index: int = 3,
    max_udeg: int = 3,
    max_terms: int = 3,
    with_params: bool = False,
) -> DiffPoly:
    """Small random differential polynomial for seeded property checks."""
    terms: dict[UExps, Coefficient] = {}
    for _ in range(rng.randint(1, max_terms)):
        exps: dict[int, int] = {}
        for _ in range(rng.randint(0, max_udeg)):
            k = rng.randint(0, max_index)
            exps[k] = exps.get(k, 0) + 1
        coef = Fraction(rng.randint(-6, 6), rng.randint(1, 4))
        if coef == 0:
            coef = Fraction(1)
        key = u_key(exps)
        if with_params:
            h_ord, e_ord = cvars[0].order, cvars[1].order
            eexp = (rng.randrange(h_ord), rng.randrange(e_ord))
            series = MultiSeries.monomial(cvars, eexp, coef)
            terms[key] = (terms.get(key, MultiSeries.zero(cvars)) + series)
        else:
            terms[key] = terms.get(key, Fraction(0)) + coef
    return DiffPoly(cvars, terms)


def _self_adjoint_witness(
    phi: DiffPoly, rng: random.Random, trials: int
) -> DiffPoly | None:
    """Search for a test pair violating int a*Dphi(b) = int b*Dphi(a);
    returns the offending difference, or None if all trials balance."""
    cvars = phi.coeff_vars
    max_index = max(phi.max_index() + 1, 2)
    fixed_pairs = [
        (DiffPoly.constant(cvars, 1), DiffPoly.u_power(cvars, 1)),
        (DiffPoly.u_power(cvars), DiffPoly.u_power(cvars, 0, 2)),
    ]
    pairs = fixed_pairs + [
        (
            random_diffpoly(cvars, rng, max_index=max_index),
            random_diffpoly(cvars, rng, max_index=max_index),
        )
        for _ in range(trials)
    ]
    for a, b in pairs:
        diff = normalize(a * frechet_apply(phi, b) - b * frechet_apply(phi, a))
        if not diff.is_zero():
            return diff.density
    return None


def reconstruct_functional_from_flow(
    q: DiffPoly, seed: int = 0, trials: int = 8
) -> LocalFunctional:
    """Recover h with d/dx (delta h/delta u) = q via the homotopy formula.

    Checks that q is a total x-derivative (Euler derivative vanishes, no
    u-free part), integrates it to phi, tests phi for formal
    self-adjointness of its Frechet derivative on seeded random pairs, and
    evaluates h = int_0^1 dl int u*phi[l*u] dx exactly: the l-integral
    weights each monomial of phi by 1/(u-degree + 1).
    """
    if not q.u_free_part().is_zero():
        raise NotTotalDerivativeError("flow has a u-independent part")
    if not variational_derivative(q).is_zero():
        raise NotTotalDerivativeError("Euler derivative of the flow does not vanish")
    phi = integrate_x(q)
    witness = _self_adjoint_witness(phi, random.Random(seed), trials)
    if witness is not None:
        raise NotSelfAdjointError(
            f"integrated flow is not a variational gradient; witness {witness.pretty()}"
        )
    terms: dict[UExps, MultiSeries] = {}
    for ue, coef in phi.terms.items():
        weight = Fraction(1, u_degree(ue) + 1)
        _accumulate(terms, _merge_keys(ue, ((0, 1),)), coef * weight)
    return normalize(DiffPoly._make(q.coeff_vars, terms))
