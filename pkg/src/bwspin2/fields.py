"""Tensor field symbols, linear forms over them, and the symbolic field functions.

All symbols carry upper Lorentz indices; lowering happens with explicit
metric factors where an expansion or equation is built.  Index order
puts the second-pair (spectator) indices first, e.g. ``F^{kappa tau, mu}``
is stored as ``("F", (kappa, tau, mu))`` and ``T^{kappa, mu nu}`` as
``("T", (kappa, mu, nu))``.
"""

from __future__ import annotations

import itertools
import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .clifford import GammaBasis, LORENTZ, SpinorMatrix
from .exact import CRational, MomentumPoly, ZERO, format_rational, parse_rational
from .multispinor import SIZE, Multispinor4, flat_index


@dataclass(frozen=True)
class BlockSpec:
    name: str
    rank: int
    antisym: tuple  # pairs of index positions that are antisymmetric
    latex: str
    description: str


BLOCKS = {
    spec.name: spec
    for spec in (
        BlockSpec("G", 2, (), "G", "vector-vector block"),
        BlockSpec("F", 3, ((0, 1),), "F", "vector-tensor block"),
        BlockSpec("Ft", 3, ((0, 1),), r"\widetilde{F}", "vector-pseudotensor block"),
        BlockSpec("T", 3, ((1, 2),), "T", "tensor-vector block"),
        BlockSpec("R", 4, ((0, 1), (2, 3)), "R", "tensor-tensor block"),
        BlockSpec("Rt", 4, ((0, 1), (2, 3)), r"\widetilde{R}", "tensor-pseudotensor block"),
        BlockSpec("Tt", 3, ((1, 2),), r"\widetilde{T}", "pseudotensor-vector block"),
        BlockSpec("Dt", 4, ((0, 1), (2, 3)), r"\widetilde{D}", "pseudotensor-tensor block"),
        BlockSpec("D", 4, ((0, 1), (2, 3)), "D", "pseudotensor-pseudotensor block"),
        # first-pair-only functions (second-pair indices are spectators)
        BlockSpec("Psi", 1, (), r"\Psi", "vector part of the first-pair expansion"),
        BlockSpec("PsiT", 2, ((0, 1),), r"\Psi", "tensor part of the first-pair expansion"),
        BlockSpec("PsiTt", 2, ((0, 1),), r"\widetilde{\Psi}", "pseudotensor part of the first-pair expansion"),
        # divergence of G, introduced by the second-order reduction
        BlockSpec("A", 1, (), "F", "4-vector built from the divergence of G"),
    )
}
BLOCK_ORDER = tuple(BLOCKS)
STANDARD_BLOCKS = ("G", "F", "T", "R")
GENERALIZED_BLOCKS = ("G", "F", "Ft", "T", "R", "Rt", "Tt", "Dt", "D")


@dataclass(frozen=True, order=False)
class FieldSymbol:
    block: str
    indices: tuple

    def __post_init__(self):
        spec = BLOCKS.get(self.block)
        if spec is None:
            raise ValueError(f"unknown field block {self.block!r}")
        if len(self.indices) != spec.rank:
            raise ValueError(f"block {self.block} takes {spec.rank} indices")
        for i, j in spec.antisym:
            if not self.indices[i] < self.indices[j]:
                raise ValueError(f"{self.block}{self.indices} is not in canonical index order")

    def sort_key(self):
        return BLOCK_ORDER.index(self.block), self.indices

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def __str__(self):
        return f"{self.block}^{''.join(str(i) for i in self.indices)}"

    def latex(self) -> str:
        spec = BLOCKS[self.block]
        idx = "".join(str(i) for i in self.indices)
        if spec.rank == 4:
            idx = f"{idx[:2]},{idx[2:]}"
        elif self.block in ("F", "Ft"):
            idx = f"{idx[:2]},{idx[2:]}"
        elif self.block in ("T", "Tt"):
            idx = f"{idx[:1]},{idx[1:]}"
        return f"{spec.latex}^{{{idx}}}"


_SYM_RE = re.compile(r"^([A-Za-z]+)\^(\d*)$")


def parse_symbol(text: str) -> FieldSymbol:
    match = _SYM_RE.match(text)
    if not match:
        raise ValueError(f"not a field symbol: {text!r}")
    return FieldSymbol(match.group(1), tuple(int(c) for c in match.group(2)))


def canonical(block: str, indices: Iterable[int]) -> tuple[int, FieldSymbol | None]:
    """(sign, symbol) with antisymmetric pairs sorted; (0, None) if a pair repeats."""
    spec = BLOCKS[block]
    idx = list(indices)
    sign = 1
    for i, j in spec.antisym:
        if idx[i] == idx[j]:
            return 0, None
        if idx[i] > idx[j]:
            idx[i], idx[j] = idx[j], idx[i]
            sign = -sign
    return sign, FieldSymbol(block, tuple(idx))


def block_symbols(block: str) -> list[FieldSymbol]:
    spec = BLOCKS[block]
    out = []
    for idx in itertools.product(range(4), repeat=spec.rank):
        if all(idx[i] < idx[j] for i, j in spec.antisym):
            out.append(FieldSymbol(block, idx))
    return out


def enumerate_symbols(formalism: str) -> list[FieldSymbol]:
    """Deterministic unknown ordering: 100 symbols (standard) or 256 (generalized)."""
    blocks = {"standard": STANDARD_BLOCKS, "generalized": GENERALIZED_BLOCKS}.get(formalism)
    if blocks is None:
        raise ValueError(f"formalism must be 'standard' or 'generalized', not {formalism!r}")
    return [s for b in blocks for s in block_symbols(b)]


def _poly(c) -> MomentumPoly:
    if isinstance(c, MomentumPoly):
        return c
    return MomentumPoly.const(c)


class LinearForm:
    """Finite sum of field symbols with polynomial coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[FieldSymbol, object] | None = None):
        self.terms = {}
        if terms:
            for s, c in terms.items():
                c = _poly(c)
                if c:
                    self.terms[s] = c

    @classmethod
    def _raw(cls, terms: dict) -> "LinearForm":
        obj = cls.__new__(cls)
        obj.terms = terms
        return obj

    @classmethod
    def term(cls, block: str, indices: Iterable[int], coeff=1) -> "LinearForm":
        sign, sym = canonical(block, indices)
        if not sign:
            return cls()
        c = _poly(coeff)
        if sign < 0:
            c = -c
        return cls({sym: c})

    def __bool__(self):
        return bool(self.terms)

    def __add__(self, other):
        if not isinstance(other, LinearForm):
            if not other:
                return self
            return NotImplemented
        if len(other.terms) > len(self.terms):
            big, small = other.terms, self.terms
        else:
            big, small = self.terms, other.terms
        out = dict(big)
        for s, c in small.items():
            cur = out.get(s)
            if cur is None:
                out[s] = c
            else:
                c = cur + c
                if c:
                    out[s] = c
                else:
                    del out[s]
        return LinearForm._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return LinearForm._raw({s: -c for s, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, LinearForm):
            if not other:
                return self
            return NotImplemented
        return self + (-other)

    def __mul__(self, c):
        if isinstance(c, LinearForm):
            raise TypeError("product of two linear forms is not linear")
        if isinstance(c, MomentumPoly):
            if not c:
                return LinearForm()
            out = {}
            for s, p in self.terms.items():
                q = p * c
                if q:
                    out[s] = q
            return LinearForm._raw(out)
        c = CRational.coerce(c)
        if not c:
            return LinearForm()
        return LinearForm._raw({s: p.scale(c) for s, p in self.terms.items()})

    __rmul__ = __mul__

    def scale(self, c):
        return self * c

    def coefficient(self, sym: FieldSymbol) -> MomentumPoly:
        return self.terms.get(sym, MomentumPoly.zero())

    def symbols(self) -> list[FieldSymbol]:
        return sorted(self.terms)

    def blocks(self) -> set[str]:
        return {s.block for s in self.terms}

    def sorted_items(self) -> list[tuple[FieldSymbol, MomentumPoly]]:
        return sorted(self.terms.items(), key=lambda kv: kv[0].sort_key())

    def restrict(self, keep) -> "LinearForm":
        return LinearForm._raw({s: c for s, c in self.terms.items() if keep(s)})

    def substitute(self, assignment: Mapping[str, object]) -> "LinearForm":
        out = {}
        for s, c in self.terms.items():
            q = c.substitute(assignment)
            if q:
                out[s] = q
        return LinearForm._raw(out)

    def is_numeric(self) -> bool:
        return all(c.is_constant() for c in self.terms.values())

    def numeric_row(self, columns: Mapping[FieldSymbol, int]) -> dict[int, CRational]:
        """Sparse row over ``columns``; raises if a coefficient still depends on p or m."""
        row = {}
        for s, c in self.terms.items():
            if s not in columns:
                raise KeyError(f"symbol {s} is not among the unknowns")
            row[columns[s]] = c.constant_value()
        return row

    def max_degree(self) -> int:
        return max((c.degree() for c in self.terms.values()), default=0)

    def __eq__(self, other):
        if isinstance(other, LinearForm):
            return self.terms == other.terms
        if not other:
            return not self.terms
        return NotImplemented

    __hash__ = None

    def __repr__(self):
        return f"LinearForm({str(self)!r})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for s, c in self.sorted_items():
            txt = str(c)
            if len(c.terms) > 1:
                txt = f"({txt})*"
            elif txt in ("1", "-1"):
                txt = txt[:-1]
            else:
                txt += "*"
            parts.append(f"{txt}{s}")
        out = parts[0]
        for p in parts[1:]:
            out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return out


LF_ZERO = LinearForm()


# --- coefficient sets -----------------------------------------------------------

class CoefficientConfigError(ValueError):
    pass


ALPHA_KEYS = tuple(f"alpha{i}" for i in range(1, 4))
BETA_KEYS = tuple(f"beta{i}" for i in range(1, 10))


@dataclass(frozen=True)
class CoefficientSet:
    alpha: tuple = (Fraction(1),) * 3
    beta: tuple = (Fraction(1),) * 9

    def __post_init__(self):
        if len(self.alpha) != 3 or len(self.beta) != 9:
            raise ValueError("need 3 alpha and 9 beta coefficients")
        object.__setattr__(self, "alpha", tuple(Fraction(a) for a in self.alpha))
        object.__setattr__(self, "beta", tuple(Fraction(b) for b in self.beta))

    @classmethod
    def ones(cls) -> "CoefficientSet":
        return cls()

    @classmethod
    def degenerate(cls) -> "CoefficientSet":
        """alpha3 = beta3 = beta6 = beta9 = 0, all others 1."""
        beta = [Fraction(1)] * 9
        for k in (2, 5, 8):
            beta[k] = Fraction(0)
        return cls((Fraction(1), Fraction(1), Fraction(0)), tuple(beta))

    @classmethod
    def zeros(cls) -> "CoefficientSet":
        return cls((Fraction(0),) * 3, (Fraction(0),) * 9)

    def a(self, i: int) -> Fraction:
        return self.alpha[i - 1]

    def b(self, j: int) -> Fraction:
        return self.beta[j - 1]

    def replace(self, **kw) -> "CoefficientSet":
        alpha, beta = list(self.alpha), list(self.beta)
        for key, val in kw.items():
            if key in ALPHA_KEYS:
                alpha[ALPHA_KEYS.index(key)] = Fraction(val)
            elif key in BETA_KEYS:
                beta[BETA_KEYS.index(key)] = Fraction(val)
            else:
                raise KeyError(key)
        return CoefficientSet(tuple(alpha), tuple(beta))

    def as_dict(self) -> dict[str, str]:
        out = {k: format_rational(v) for k, v in zip(ALPHA_KEYS, self.alpha)}
        out.update({k: format_rational(v) for k, v in zip(BETA_KEYS, self.beta)})
        return out

    def all_nonzero(self) -> bool:
        return all(self.alpha) and all(self.beta)


def parse_coefficient_config(text: str) -> CoefficientSet:
    """Parse ``key = rational`` lines; ``#`` starts a comment, missing keys default to 1."""
    values: dict[str, Fraction] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CoefficientConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, val = (part.strip() for part in line.split("=", 1))
        if key not in ALPHA_KEYS and key not in BETA_KEYS:
            raise CoefficientConfigError(f"line {lineno}: unknown coefficient {key!r}")
        if key in values:
            raise CoefficientConfigError(f"line {lineno}: duplicate coefficient {key!r}")
        try:
            values[key] = parse_rational(val)
        except ValueError as exc:
            raise CoefficientConfigError(f"line {lineno}: {exc}") from None
    return CoefficientSet().replace(**values)


def format_coefficient_config(coeffs: CoefficientSet) -> str:
    return "".join(f"{k} = {v}\n" for k, v in coeffs.as_dict().items())


def random_coefficients(rng: random.Random, bound: int = 9) -> CoefficientSet:
    """All-nonzero rationals p/q with 1 <= |p|, q <= bound."""
    def draw():
        p = rng.randint(1, bound) * rng.choice((-1, 1))
        return Fraction(p, rng.randint(1, bound))
    return CoefficientSet(tuple(draw() for _ in range(3)), tuple(draw() for _ in range(9)))


def coefficient_samples(seed: int, count: int) -> list[CoefficientSet]:
    rng = random.Random(seed)
    return [random_coefficients(rng) for _ in range(count)]


# --- field functions ------------------------------------------------------------

def _first_pair_matrices(basis: GammaBasis, kind: str):
    """(lowered-index matrix times R) for the first pair, summed over all index values."""
    r = basis.r_matrix
    g = basis.metric
    if kind == "gamma":
        return {(mu,): basis.gamma[mu].scale(g[mu]) @ r for mu in LORENTZ}
    sig = {(mu, nu): (basis.sigma[mu, nu].scale(g[mu] * g[nu])) @ r
           for mu in LORENTZ for nu in LORENTZ if mu != nu}
    if kind == "sigma":
        return sig
    if kind == "gamma5sigma":
        return {k: basis.gamma5 @ v for k, v in sig.items()}
    raise ValueError(kind)


def _second_pair_matrices(basis: GammaBasis, kind: str):
    """(upper-index matrix times R) for the second pair."""
    r = basis.r_matrix
    if kind == "gamma":
        return {(k,): basis.gamma[k] @ r for k in LORENTZ}
    sig = {(k, t): basis.sigma[k, t] @ r for k in LORENTZ for t in LORENTZ if k != t}
    if kind == "sigma":
        return sig
    if kind == "gamma5sigma":
        return {k: basis.gamma5 @ v for k, v in sig.items()}
    raise ValueError(kind)


# (alpha index, beta index, first-pair kind, second-pair kind, block)
GENERALIZED_TERMS = (
    (1, 1, "gamma", "gamma", "G"),
    (1, 2, "gamma", "sigma", "F"),
    (1, 3, "gamma", "gamma5sigma", "Ft"),
    (2, 4, "sigma", "gamma", "T"),
    (2, 5, "sigma", "sigma", "R"),
    (2, 6, "sigma", "gamma5sigma", "Rt"),
    (3, 7, "gamma5sigma", "gamma", "Tt"),
    (3, 8, "gamma5sigma", "sigma", "Dt"),
    (3, 9, "gamma5sigma", "gamma5sigma", "D"),
)


def _lowering(indices: tuple, metric: tuple, lowered: Iterable[int]) -> int:
    f = 1
    for pos in lowered:
        f *= metric[indices[pos]]
    return f


# positions (in the stored index tuple) that carry lower indices in the expansion:
# the spectator indices are written lower (G_kappa^mu, F_{kappa tau}^mu, ...)
_LOWERED_POSITIONS = {"G": (0,), "F": (0, 1), "Ft": (0, 1), "T": (0,), "Tt": (0,),
                      "R": (0, 1), "Rt": (0, 1), "D": (0, 1), "Dt": (0, 1)}


def build_field_function(basis: GammaBasis, terms) -> Multispinor4:
    """Sum over ``terms`` of coeff * (first)_{ab} (second)_{cd} X, summing every index value."""
    comps: list[dict] = [dict() for _ in range(SIZE)]
    metric = basis.metric
    for coeff, first_kind, second_kind, block in terms:
        coeff = Fraction(coeff)
        if not coeff:
            continue
        firsts = _first_pair_matrices(basis, first_kind)
        seconds = _second_pair_matrices(basis, second_kind)
        for fidx, fmat in firsts.items():
            for sidx, smat in seconds.items():
                sign, sym = canonical(block, sidx + fidx)
                if not sign:
                    continue
                w = coeff * sign * _lowering(sidx + fidx, metric, _LOWERED_POSITIONS[block])
                for a in range(4):
                    for b in range(4):
                        x = fmat.rows[a][b]
                        if not x:
                            continue
                        xw = x * w
                        for c in range(4):
                            for d in range(4):
                                y = smat.rows[c][d]
                                if y:
                                    comp = comps[flat_index(a, b, c, d)]
                                    comp[sym] = comp.get(sym, ZERO) + xw * y
    forms = [LinearForm({s: c for s, c in comp.items() if c}) for comp in comps]
    return Multispinor4(forms, LF_ZERO)


def standard_field_function(basis: GammaBasis) -> Multispinor4:
    """Four-block expansion with unit coefficients (100 symbols)."""
    terms = [(1, f, s, b) for (_, _, f, s, b) in GENERALIZED_TERMS if b in STANDARD_BLOCKS]
    return build_field_function(basis, terms)


def generalized_field_function(basis: GammaBasis, coeffs: CoefficientSet) -> Multispinor4:
    """Nine-block expansion weighted by alpha_i * beta_j."""
    terms = [(coeffs.a(i) * coeffs.b(j), f, s, b) for (i, j, f, s, b) in GENERALIZED_TERMS]
    return build_field_function(basis, terms)


def field_function(basis: GammaBasis, formalism: str, coeffs: CoefficientSet | None = None) -> Multispinor4:
    if formalism == "standard":
        return standard_field_function(basis)
    if formalism == "generalized":
        return generalized_field_function(basis, coeffs or CoefficientSet.ones())
    raise ValueError(f"formalism must be 'standard' or 'generalized', not {formalism!r}")


def symbols_in(psi: Multispinor4) -> set[FieldSymbol]:
    out = set()
    for comp in psi.components:
        out.update(comp.terms)
    return out


def embedding_matrix(psi: Multispinor4, unknowns: list[FieldSymbol]):
    """256 x len(unknowns) matrix taking symbol values to multispinor components."""
    from .linsys import ExactMatrix

    cols = {s: i for i, s in enumerate(unknowns)}
    return ExactMatrix.from_sparse([comp.numeric_row(cols) for comp in psi.components], len(unknowns))
