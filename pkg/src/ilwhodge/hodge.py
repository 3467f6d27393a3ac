"""One-point intersection-number tables and the extraction of the constants.

The generating identity

    1 + sum_{g>=1} sum_{i=0}^g t^{2g} k^i <lambda_{g-i} tau_{2g-2+i}>_g
        = ((t/2) / sin(t/2))^{k+1}

is expanded exactly to read off the one-point table.  Two string-equation
steps turn it into S(h, e) = exp((1 + 1/e) L(h e)) with
L(z) = log((z/2)/sin(z/2)), the sine factor produces the tilde variant
S~(h, e) = exp(sum_g h^g e^{g-1} |B_{2g}|/(2g (2g)!)), and the logarithmic
h-derivative of S~ is a function of the product h*e alone whose
coefficients are the constants

    C_g = |B_{2g}| / (2 (2g)!).

Everything is verified coefficient-by-coefficient over the rationals; the
linear-term identity check reproduces the step that equates the dilaton
expansion of the t_1 flow with its right-hand side.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from . import exactnum
from .exactnum import rational_to_str
from .mpseries import (
    MultiSeries,
    VarSpec,
    divide_by_var,
    exp_series,
    inverse_series,
    log_sinc_half,
    pow_linear_exponent,
    sinc_half_series,
    substitute_square,
)
from .reports import VerificationReport

__all__ = [
    "HodgeConsistencyError",
    "BracketTable",
    "dimension_check",
    "one_point_table",
    "hodge_vars",
    "sinc_factor_series",
    "s_series",
    "s_tilde_series",
    "s_tilde_from_constants",
    "tilde_table",
    "extract_cg",
    "verify_cg",
    "verify_linear_term_identity",
    "verify_one_point_reverse",
]

CgValues = Callable[[int], Fraction]

TableKey = tuple[int, int, tuple[int, ...]]


class HodgeConsistencyError(RuntimeError):
    """Two mathematically identical computation paths disagreed."""


def dimension_check(g: int, n: int, j: int, d: tuple[int, ...]) -> bool:
    """True iff 3g - 3 + n = j + sum(d) and the case is stable."""
    return 3 * g - 3 + n == j + sum(d) and 2 * g - 2 + n > 0


@dataclass
class BracketTable:
    """Finite table of one-point bracket values keyed (genus, lambda-index,
    tau-index tuple)."""

    flavor: str  # "plain" | "tilde"
    entries: dict[TableKey, Fraction] = field(default_factory=dict)

    def value(self, g: int, j: int, d: tuple[int, ...]) -> Fraction:
        return self.entries.get((g, j, tuple(d)), Fraction(0))

    def rows(self) -> list[dict]:
        out = []
        for (g, j, d) in sorted(self.entries):
            out.append(
                {"g": g, "j": j, "d": list(d), "value": rational_to_str(self.entries[(g, j, d)])}
            )
        return out

    def to_json_dict(self) -> dict:
        return {"flavor": self.flavor, "entries": self.rows()}

    def to_csv(self) -> str:
        lines = ["g,j,d,value"]
        for row in self.rows():
            d = " ".join(str(x) for x in row["d"])
            lines.append(f"{row['g']},{row['j']},{d},{row['value']}")
        return "\n".join(lines) + "\n"

    def to_latex(self) -> str:
        lines = [
            r"\begin{tabular}{rrrl}",
            r"$g$ & $j$ & $d$ & value \\ \hline",
        ]
        for (g, j, d) in sorted(self.entries):
            v = self.entries[(g, j, d)]
            if v.denominator == 1:
                val = str(v.numerator)
            else:
                sign = "-" if v < 0 else ""
                val = rf"${sign}\frac{{{abs(v.numerator)}}}{{{v.denominator}}}$"
            dd = ",".join(str(x) for x in d)
            lines.append(f"{g} & {j} & $({dd})$ & {val} \\\\")
        lines.append(r"\end{tabular}")
        return "\n".join(lines) + "\n"


def one_point_table(g_max: int) -> BracketTable:
    """One-point values <lambda_{g-i} tau_{2g-2+i}>_g for g <= g_max, read off
    the exact expansion of ((t/2)/sin(t/2))^{k+1}."""
    if g_max < 1:
        raise ValueError(f"genus bound must be >= 1, got {g_max}")
    base = inverse_series(sinc_half_series(2 * g_max + 1, "t"))
    expansion = pow_linear_exponent(base, 1, 1, VarSpec("k", g_max + 1))
    if expansion.coefficient((0, 0)) != 1:
        raise HodgeConsistencyError("expansion constant term is not 1")
    table = BracketTable("plain")
    for g in range(1, g_max + 1):
        for i in range(0, g + 1):
            val = expansion.coefficient((2 * g, i))
            entry = (g, g - i, (2 * g - 2 + i,))
            if not dimension_check(g, 1, entry[1], entry[2]):
                raise HodgeConsistencyError(f"entry {entry} violates the dimension constraint")
            if val != 0:
                table.entries[entry] = val
    return table


def hodge_vars(G: int) -> tuple[VarSpec, VarSpec]:
    """Series variables (h, e) retaining exponents up to G."""
    if G < 1:
        raise ValueError(f"order must be >= 1, got {G}")
    return (VarSpec("h", G + 1), VarSpec("e", G + 1))


def sinc_factor_series(G: int) -> MultiSeries:
    """sin(sqrt(h e)/2) / (sqrt(h e)/2) as a series in h, e (z^2 -> h e)."""
    return substitute_square(sinc_half_series(2 * G + 1), hodge_vars(G))


def s_series(G: int) -> MultiSeries:
    """S(h, e) = exp((1 + 1/e) L(h e)) with L = log((z/2)/sin(z/2)).

    The coefficient of h^g e^j is the tau_0^2-padded one-point value
    <lambda_j tau_0^2 tau_{3g-j}>_g; the 1/e prefactor is a checked exponent
    shift, so no Laurent term ever exists.
    """
    hv = hodge_vars(G)
    L = substitute_square(log_sinc_half(2 * G + 1), hv)
    return exp_series(L + divide_by_var(L, "e", 1))


def s_tilde_series(G: int) -> MultiSeries:
    """S~(h, e), computed two independent ways and cross-checked exactly.

    (a) multiply S by the sine factor sin(sqrt(he)/2)/(sqrt(he)/2);
    (b) directly exp(sum_g h^g e^{g-1} |B_{2g}|/(2g (2g)!)).
    """
    hv = hodge_vars(G)
    path_a = s_series(G) * sinc_factor_series(G)
    L = substitute_square(log_sinc_half(2 * G + 1), hv)
    path_b = exp_series(divide_by_var(L, "e", 1))
    if path_a != path_b:
        raise HodgeConsistencyError(
            "sine-factor and direct-exponential routes to S~ disagree"
        )
    return path_a


def s_tilde_from_constants(G: int, cg_values: CgValues | None = None) -> MultiSeries:
    """Integrate dS~/dh = (sum_g C_g (h e)^{g-1}) S~ with S~(0,0) = 1:
    the solution exp(sum_g (C_g/g) h^g e^{g-1}) built from given constants."""
    cg = cg_values or exactnum.c_g
    hv = hodge_vars(G)
    terms = {(g, g - 1): cg(g) / g for g in range(1, G + 1)}
    return exp_series(MultiSeries(hv, terms))


def tilde_table(G: int) -> BracketTable:
    """Tilde one-point values <lambda_j tau_0^2 tau_{3g-j}>~_g from S~."""
    st = s_tilde_series(G)
    table = BracketTable("tilde")
    for (a, b), val in st.terms.items():
        entry = (a, b, (0, 0, 3 * a - b))
        if not dimension_check(a, 3, b, entry[2]):
            raise HodgeConsistencyError(f"entry {entry} violates the dimension constraint")
        table.entries[entry] = val
    return table


def extract_cg(G: int) -> list[Fraction]:
    """The constants [C_1, ..., C_G] read from (d/dh S~) / S~.

    The quotient must be a function of the product h*e alone on the region
    where the truncated derivative is exact (h-exponent <= G-1); C_g is its
    coefficient at (h e)^{g-1}.
    """
    if G < 1:
        raise ValueError(f"order must be >= 1, got {G}")
    st = s_tilde_series(G)
    quotient = st.partial_derivative("h") * inverse_series(st)
    for (a, b), val in quotient.terms.items():
        if a <= G - 1 and a != b and val != 0:
            raise HodgeConsistencyError(
                f"dS~/dh / S~ has off-diagonal term h^{a} e^{b}: {val}"
            )
    return [quotient.coefficient((g - 1, g - 1)) for g in range(1, G + 1)]


def verify_cg(G: int, cg_values: CgValues | None = None) -> VerificationReport:
    """Compare the extracted constants against the Bernoulli closed form."""
    reference = cg_values or exactnum.c_g
    computed = extract_cg(G)
    mism = None
    for g in range(1, G + 1):
        want = reference(g)
        got = computed[g - 1]
        if got != want:
            mism = {
                "g": g,
                "expected": rational_to_str(want),
                "computed": rational_to_str(got),
            }
            break
    return VerificationReport(
        name="cg",
        status="ok" if mism is None else "mismatch",
        order_checked=G,
        first_mismatch=mism,
    )


def verify_linear_term_identity(
    G: int, cg_values: CgValues | None = None
) -> VerificationReport:
    """Check the linear-in-t coefficient identity between the dilaton
    expansion of the t_1 flow and its right-hand side.

    Left, per (h^a, e^b, t-label d): (2g+1) T~(g, j) at (g, j, 3g-j).
    Right: T~(g, j) from u u_x plus sum_{g'>=1} 2 C_{g'} T~(h, j) at
    (g'+h, g'+j-1, 3(g'+h)-(g'+j-1)).  Checked per label up to total
    h-order G.
    """
    if G < 1:
        raise ValueError(f"order must be >= 1, got {G}")
    cg = cg_values or exactnum.c_g
    st = s_tilde_series(G)

    def t_value(g: int, j: int) -> Fraction:
        if g < 0 or j < 0 or g > G or j > G:
            return Fraction(0)
        return st.terms.get((g, j), Fraction(0))

    left: dict[tuple[int, int, int], Fraction] = {}
    right: dict[tuple[int, int, int], Fraction] = {}
    for g in range(0, G + 1):
        for j in range(0, g + 1):
            v = t_value(g, j)
            if v == 0:
                continue
            key = (g, j, 3 * g - j)
            left[key] = left.get(key, Fraction(0)) + (2 * g + 1) * v
            right[key] = right.get(key, Fraction(0)) + v
    for gp in range(1, G + 1):
        two_c = 2 * cg(gp)
        for h in range(0, G - gp + 1):
            for j in range(0, h + 1):
                v = t_value(h, j)
                if v == 0:
                    continue
                a = gp + h
                b = gp + j - 1
                key = (a, b, 3 * a - b)
                right[key] = right.get(key, Fraction(0)) + two_c * v

    mism = None
    for key in sorted(set(left) | set(right)):
        lv = left.get(key, Fraction(0))
        rv = right.get(key, Fraction(0))
        if lv != rv:
            a, b, d = key
            mism = {
                "h_exp": a,
                "e_exp": b,
                "t_label": d,
                "left": rational_to_str(lv),
                "right": rational_to_str(rv),
            }
            break
    return VerificationReport(
        name="linear-term",
        status="ok" if mism is None else "mismatch",
        order_checked=G,
        first_mismatch=mism,
    )


def verify_one_point_reverse(
    G: int, cg_values: CgValues | None = None
) -> VerificationReport:
    """Run the argument backwards: from the constants C_g, integrate the
    differential equation for S~, undo the sine factor, and compare the
    resulting S against the one-point table."""
    if G < 1:
        raise ValueError(f"order must be >= 1, got {G}")
    s_ode = s_tilde_from_constants(G, cg_values) * inverse_series(sinc_factor_series(G))
    table = one_point_table(G)
    mism = None
    if s_ode.coefficient((0, 0)) != 1:
        mism = {"g": 0, "j": 0, "from_ode": rational_to_str(s_ode.coefficient((0, 0))), "from_table": "1"}
    else:
        done = False
        for a in range(1, G + 1):
            if done:
                break
            for b in range(0, G + 1):
                got = s_ode.terms.get((a, b), Fraction(0))
                if b > a:
                    want = Fraction(0)
                    d: tuple[int, ...] = ()
                else:
                    d = (3 * a - b - 2,)
                    want = table.value(a, b, d)
                if got != want:
                    mism = {
                        "g": a,
                        "j": b,
                        "from_ode": rational_to_str(got),
                        "from_table": rational_to_str(want),
                    }
                    done = True
                    break
    return VerificationReport(
        name="one-point-reverse",
        status="ok" if mism is None else "mismatch",
        order_checked=G,
        first_mismatch=mism,
    )
