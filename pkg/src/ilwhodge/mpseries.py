"""Truncated multivariate formal power series over exact rationals.

A `MultiSeries` is a finite association from exponent vectors to nonzero
`Fraction` coefficients, over an ordered tuple of `VarSpec` variables.  Each
variable carries its own truncation order: an exclusive bound on the
exponents retained.  Every operation enforces the bounds, so equality of
series is decidable and exact.

Negative exponents are never allowed.  The two constructs that would call
for them, a 1/eps prefactor and a sqrt(h*eps) argument, are realized by
`divide_by_var` (a checked exponent shift) and `substitute_square`
(z^(2m) -> h^m e^m), keeping the ring total.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Iterable, Mapping

from .exactnum import bernoulli, rational_from_str, rational_to_str

__all__ = [
    "SeriesError",
    "VarSpec",
    "MultiSeries",
    "exp_series",
    "log_series",
    "inverse_series",
    "log_sinc_half",
    "sinc_half_series",
    "pow_linear_exponent",
    "substitute_square",
    "divide_by_var",
]

Exponents = tuple[int, ...]


class SeriesError(ValueError):
    """An operation violated a series precondition (bounds, variables, ...)."""


@dataclass(frozen=True)
class VarSpec:
    """A formal variable with its truncation order (exclusive exponent bound)."""

    name: str
    order: int

    def __post_init__(self) -> None:
        if not self.name:
            raise SeriesError("variable name must be non-empty")
        if self.order < 0:
            raise SeriesError(f"truncation order must be >= 0, got {self.order}")


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    raise SeriesError(f"coefficients must be exact rationals, got {type(value).__name__}")


class MultiSeries:
    """A truncated formal power series; immutable by discipline.

    `terms` never stores a zero coefficient or an exponent at or beyond its
    variable's truncation order.  Two series over the same variables are
    equal iff their term maps are equal.
    """

    __slots__ = ("vars", "terms")

    def __init__(self, vars: Iterable[VarSpec], terms: Mapping[Exponents, Fraction]):
        vs = tuple(vars)
        names = [v.name for v in vs]
        if len(set(names)) != len(names):
            raise SeriesError(f"duplicate variable names in {names}")
        clean: dict[Exponents, Fraction] = {}
        for exps, coef in terms.items():
            e = tuple(int(x) for x in exps)
            if len(e) != len(vs):
                raise SeriesError(f"exponent vector {e} has wrong arity for {names}")
            c = _as_fraction(coef)
            if c == 0:
                continue
            for x, v in zip(e, vs):
                if x < 0:
                    raise SeriesError(f"negative exponent {x} for {v.name}")
                if x >= v.order:
                    raise SeriesError(
                        f"exponent {x} of {v.name} exceeds truncation order {v.order}"
                    )
            clean[e] = clean.get(e, Fraction(0)) + c
            if clean[e] == 0:
                del clean[e]
        self.vars = vs
        self.terms = clean

    # -- constructors ------------------------------------------------------

    @classmethod
    def _make(cls, vs: tuple[VarSpec, ...], terms: dict[Exponents, Fraction]) -> "MultiSeries":
        # trusted fast path: caller guarantees invariants
        out = cls.__new__(cls)
        out.vars = vs
        out.terms = terms
        return out

    @classmethod
    def zero(cls, vars: Iterable[VarSpec]) -> "MultiSeries":
        return cls._make(tuple(vars), {})

    @classmethod
    def constant(cls, vars: Iterable[VarSpec], value) -> "MultiSeries":
        vs = tuple(vars)
        c = _as_fraction(value)
        if c == 0:
            return cls._make(vs, {})
        zero_exp = (0,) * len(vs)
        for v in vs:
            if v.order == 0:
                raise SeriesError(f"variable {v.name} truncates even the constant term")
        return cls._make(vs, {zero_exp: c})

    @classmethod
    def variable(cls, vars: Iterable[VarSpec], name: str) -> "MultiSeries":
        vs = tuple(vars)
        idx = _var_index(vs, name)
        exps = tuple(1 if i == idx else 0 for i in range(len(vs)))
        return cls(vs, {exps: Fraction(1)})

    @classmethod
    def monomial(cls, vars: Iterable[VarSpec], exps: Exponents, coef) -> "MultiSeries":
        return cls(tuple(vars), {tuple(exps): _as_fraction(coef)})

    # -- queries -----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * len(self.vars), Fraction(0))

    def coefficient(self, exps: Exponents) -> Fraction:
        """Coefficient at an exponent vector; 0 if absent, error if out of range."""
        e = tuple(int(x) for x in exps)
        if len(e) != len(self.vars):
            raise SeriesError(f"exponent vector {e} has wrong arity")
        for x, v in zip(e, self.vars):
            if x < 0 or x >= v.order:
                raise SeriesError(
                    f"coefficient request {v.name}^{x} is outside truncation order {v.order}"
                )
        return self.terms.get(e, Fraction(0))

    def sorted_terms(self) -> list[tuple[Exponents, Fraction]]:
        """Terms in graded-lexicographic order (total degree, then exponents)."""
        return sorted(self.terms.items(), key=lambda kv: (sum(kv[0]), kv[0]))

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultiSeries):
            return NotImplemented
        return self.vars == other.vars and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.vars, frozenset(self.terms.items())))

    def __bool__(self) -> bool:
        return bool(self.terms)

    # -- ring operations ----------------------------------------------------

    def _check_same_vars(self, other: "MultiSeries") -> None:
        if self.vars != other.vars:
            raise SeriesError(
                f"variable mismatch: {[v.name for v in self.vars]} vs "
                f"{[v.name for v in other.vars]}"
            )

    def __add__(self, other) -> "MultiSeries":
        if isinstance(other, (int, Fraction)):
            other = MultiSeries.constant(self.vars, other)
        if not isinstance(other, MultiSeries):
            return NotImplemented
        self._check_same_vars(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            acc = terms.get(e, Fraction(0)) + c
            if acc == 0:
                terms.pop(e, None)
            else:
                terms[e] = acc
        return MultiSeries._make(self.vars, terms)

    __radd__ = __add__

    def __neg__(self) -> "MultiSeries":
        return MultiSeries._make(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "MultiSeries":
        if isinstance(other, (int, Fraction)):
            other = MultiSeries.constant(self.vars, other)
        if not isinstance(other, MultiSeries):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "MultiSeries":
        return (-self) + other

    def __mul__(self, other) -> "MultiSeries":
        if isinstance(other, (int, Fraction)):
            c = _as_fraction(other)
            if c == 0:
                return MultiSeries._make(self.vars, {})
            return MultiSeries._make(self.vars, {e: k * c for e, k in self.terms.items()})
        if not isinstance(other, MultiSeries):
            return NotImplemented
        self._check_same_vars(other)
        bounds = tuple(v.order for v in self.vars)
        terms: dict[Exponents, Fraction] = {}
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                if any(x >= b for x, b in zip(e, bounds)):
                    continue  # truncated away
                acc = terms.get(e, Fraction(0)) + ca * cb
                if acc == 0:
                    terms.pop(e, None)
                else:
                    terms[e] = acc
        return MultiSeries._make(self.vars, terms)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "MultiSeries":
        if not isinstance(n, int) or n < 0:
            raise SeriesError(f"series power must be a non-negative integer, got {n}")
        out = MultiSeries.constant(self.vars, 1)
        base = self
        k = n
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    # -- calculus ------------------------------------------------------------

    def partial_derivative(self, name: str) -> "MultiSeries":
        """Formal d/d(name): the exponent-weighted shift."""
        idx = _var_index(self.vars, name)
        terms: dict[Exponents, Fraction] = {}
        for e, c in self.terms.items():
            k = e[idx]
            if k == 0:
                continue
            ne = e[:idx] + (k - 1,) + e[idx + 1 :]
            acc = terms.get(ne, Fraction(0)) + c * k
            if acc == 0:
                terms.pop(ne, None)
            else:
                terms[ne] = acc
        return MultiSeries._make(self.vars, terms)

    def lift(self, vars: Iterable[VarSpec]) -> "MultiSeries":
        """Reinterpret over a variable tuple that contains this one.

        The existing variables must appear (same name, same order) in the
        target tuple; new variables get exponent zero.
        """
        vs = tuple(vars)
        positions = []
        by_name = {v.name: (i, v) for i, v in enumerate(vs)}
        for v in self.vars:
            if v.name not in by_name:
                raise SeriesError(f"target variables are missing {v.name}")
            i, tv = by_name[v.name]
            if tv.order != v.order:
                raise SeriesError(
                    f"variable {v.name} changes truncation order in lift "
                    f"({v.order} -> {tv.order})"
                )
            positions.append(i)
        terms: dict[Exponents, Fraction] = {}
        for e, c in self.terms.items():
            ne = [0] * len(vs)
            for pos, x in zip(positions, e):
                ne[pos] = x
            terms[tuple(ne)] = c
        return MultiSeries._make(vs, terms)

    # -- serialization -------------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "vars": [{"name": v.name, "order": v.order} for v in self.vars],
            "terms": [
                {"exp": list(e), "coef": rational_to_str(c)}
                for e, c in self.sorted_terms()
            ],
        }

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "MultiSeries":
        vs = tuple(VarSpec(v["name"], int(v["order"])) for v in data["vars"])
        terms = {
            tuple(int(x) for x in t["exp"]): rational_from_str(t["coef"])
            for t in data["terms"]
        }
        return cls(vs, terms)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            factors = [
                v.name if x == 1 else f"{v.name}^{x}"
                for v, x in zip(self.vars, e)
                if x > 0
            ]
            if not factors:
                parts.append(rational_to_str(c))
            elif c == 1:
                parts.append("*".join(factors))
            elif c == -1:
                parts.append("-" + "*".join(factors))
            else:
                parts.append("*".join([rational_to_str(c)] + factors))
        out = parts[0]
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out

    def __repr__(self) -> str:
        names = ",".join(v.name for v in self.vars)
        return f"MultiSeries[{names}]({self})"


def _var_index(vs: tuple[VarSpec, ...], name: str) -> int:
    for i, v in enumerate(vs):
        if v.name == name:
            return i
    raise SeriesError(f"no variable named {name!r} in {[v.name for v in vs]}")


def _max_nilpotence(vs: tuple[VarSpec, ...]) -> int:
    # a series with zero constant term is nilpotent: its n-th power vanishes
    # once n exceeds the total retained degree
    return sum(max(v.order - 1, 0) for v in vs)


def exp_series(a: MultiSeries) -> MultiSeries:
    """exp of a series with zero constant term, exact to truncation."""
    if a.constant_term != 0:
        raise SeriesError("exp_series requires a zero constant term")
    acc = MultiSeries.constant(a.vars, 1)
    power = acc
    bound = _max_nilpotence(a.vars)
    n = 0
    while True:
        power = power * a
        if power.is_zero():
            return acc
        n += 1
        if n > bound:
            raise AssertionError("exp_series failed to terminate")
        acc = acc + power * Fraction(1, factorial(n))


def log_series(a: MultiSeries) -> MultiSeries:
    """log of a series with constant term one, exact to truncation."""
    if a.constant_term != 1:
        raise SeriesError("log_series requires constant term 1")
    x = a - 1
    acc = MultiSeries.zero(a.vars)
    power = MultiSeries.constant(a.vars, 1)
    bound = _max_nilpotence(a.vars)
    n = 0
    while True:
        power = power * x
        if power.is_zero():
            return acc
        n += 1
        if n > bound:
            raise AssertionError("log_series failed to terminate")
        acc = acc + power * Fraction((-1) ** (n + 1), n)


def inverse_series(a: MultiSeries) -> MultiSeries:
    """Multiplicative inverse of a series with nonzero constant term."""
    c = a.constant_term
    if c == 0:
        raise SeriesError("inverse_series requires a nonzero constant term")
    y = a * (Fraction(1) / c) - 1
    acc = MultiSeries.constant(a.vars, 1)
    power = MultiSeries.constant(a.vars, 1)
    bound = _max_nilpotence(a.vars)
    n = 0
    while True:
        power = power * y
        if power.is_zero():
            return acc * (Fraction(1) / c)
        n += 1
        if n > bound:
            raise AssertionError("inverse_series failed to terminate")
        acc = acc + power * Fraction((-1) ** n)


def log_sinc_half(order: int, name: str = "z") -> MultiSeries:
    """The even series log((z/2) / sin(z/2)) = sum_{g>=1} |B_{2g}|/(2g (2g)!) z^{2g}.

    Coefficients come straight from the Bernoulli numbers; the composition
    -log(sin(z/2)/(z/2)) provides an independent route for testing.
    """
    if order < 2:
        raise SeriesError(f"order must be >= 2, got {order}")
    v = VarSpec(name, order)
    terms: dict[Exponents, Fraction] = {}
    g = 1
    while 2 * g < order:
        terms[(2 * g,)] = abs(bernoulli(2 * g)) / Fraction(2 * g * factorial(2 * g))
        g += 1
    return MultiSeries((v,), terms)


def sinc_half_series(order: int, name: str = "z") -> MultiSeries:
    """Taylor series of sin(z/2)/(z/2) = sum_m (-1)^m z^{2m} / (4^m (2m+1)!)."""
    if order < 1:
        raise SeriesError(f"order must be >= 1, got {order}")
    v = VarSpec(name, order)
    terms: dict[Exponents, Fraction] = {}
    m = 0
    while 2 * m < order:
        terms[(2 * m,)] = Fraction((-1) ** m, 4**m * factorial(2 * m + 1))
        m += 1
    return MultiSeries((v,), terms)


def pow_linear_exponent(
    base: MultiSeries, a0, a1, k: VarSpec
) -> MultiSeries:
    """base^(a0 + a1*k) = exp((a0 + a1*k) * log(base)) with k a fresh variable.

    The base must have constant term 1; the output lives over the base's
    variables extended by k.
    """
    if base.constant_term != 1:
        raise SeriesError("pow_linear_exponent requires base constant term 1")
    if any(v.name == k.name for v in base.vars):
        raise SeriesError(f"exponent variable {k.name} already occurs in the base")
    out_vars = base.vars + (k,)
    lifted = log_series(base).lift(out_vars)
    kvar = MultiSeries.variable(out_vars, k.name)
    exponent = lifted * _as_fraction(a0) + (kvar * lifted) * _as_fraction(a1)
    return exp_series(exponent)


def substitute_square(a: MultiSeries, target: tuple[VarSpec, VarSpec]) -> MultiSeries:
    """Send z^{2m} to h^m e^m for an even univariate series.

    This realizes an argument of sqrt(h*e) without ever materializing the
    square root; odd coefficients must all vanish.
    """
    if len(a.vars) != 1:
        raise SeriesError("substitute_square expects a univariate series")
    hbar, eps = target
    terms: dict[Exponents, Fraction] = {}
    for (x,), c in a.terms.items():
        if x % 2 != 0:
            raise SeriesError(f"series is not even: z^{x} has coefficient {c}")
        m = x // 2
        if m >= hbar.order or m >= eps.order:
            continue  # truncated away
        terms[(m, m)] = c
    return MultiSeries((hbar, eps), terms)


def divide_by_var(a: MultiSeries, name: str, m: int = 1) -> MultiSeries:
    """Shift all exponents of one variable down by m; every term must allow it.

    The divisibility precondition failing signals a logic error upstream,
    never a representable Laurent tail.
    """
    if m < 1:
        raise SeriesError(f"divisor power must be positive, got {m}")
    idx = _var_index(a.vars, name)
    terms: dict[Exponents, Fraction] = {}
    for e, c in a.terms.items():
        if e[idx] < m:
            raise SeriesError(
                f"term with {name}^{e[idx]} is not divisible by {name}^{m}"
            )
        terms[e[:idx] + (e[idx] - m,) + e[idx + 1 :]] = c
    return MultiSeries._make(a.vars, terms)
