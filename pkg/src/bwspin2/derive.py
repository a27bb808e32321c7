"""Derivation pipeline: BW operator, projections, constraints and reductions.

All equations live in momentum space under ``d_mu -> -i p_mu`` and are kept
polynomial in (p0..p3, m).  Field symbols store every index upper; the
spectator indices of the expansion are lowered inside the field function, so
their metric factors show up as per-equation overall signs only.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .clifford import LORENTZ, GammaBasis, SpinorMatrix, build_dirac_basis, gram_dual
from .exact import VARIABLES, CRational, MomentumPoly, ONE, ZERO
from .fields import (
    STANDARD_BLOCKS,
    CoefficientSet,
    FieldSymbol,
    LinearForm,
    embedding_matrix,
    enumerate_symbols,
    field_function,
)
from .linsys import ExactMatrix, RowSpace, nullspace_from_space, row_space, span_equal
from .multispinor import Multispinor4, contract_antisym, project_pairs, SIZE
from . import shapes


class ProjectionResidue(ValueError):
    """The projected BW system has a component no equation shape accounts for."""


class MissingBlock(ValueError):
    pass


class OffShellRequested(ValueError):
    pass


# --- types ------------------------------------------------------------------------

@dataclass(frozen=True)
class TensorEquation:
    """``lhs = 0`` with the free index values that label it."""

    lhs: LinearForm
    free_indices: tuple = ()  # ((name, value), ...)
    provenance: str = ""

    @property
    def indices(self) -> dict:
        return dict(self.free_indices)

    def label(self) -> str:
        idx = ",".join(f"{k}={v}" for k, v in self.free_indices)
        return f"{self.provenance}[{idx}]" if idx else self.provenance

    def __str__(self):
        return f"{self.label()}: {self.lhs} = 0"


@dataclass
class ConstraintSystem:
    equations: list
    unknowns: list

    def __post_init__(self):
        known = set(self.unknowns)
        for eq in self.equations:
            for s in eq.lhs.terms:
                if s not in known:
                    raise ValueError(f"symbol {s} in {eq.label()} is not among the unknowns")

    def matrix(self) -> ExactMatrix:
        cols = {s: i for i, s in enumerate(self.unknowns)}
        return ExactMatrix.from_sparse([eq.lhs.numeric_row(cols) for eq in self.equations], len(self.unknowns))

    def row_space(self) -> RowSpace:
        return row_space(self.matrix())

    def nullspace(self) -> list:
        return nullspace_from_space(self.row_space())


@dataclass(frozen=True)
class DerivationContext:
    basis: GammaBasis
    mass: Fraction | None = None  # None = symbolic m
    momentum: tuple | None = None  # None = symbolic p0..p3

    def __post_init__(self):
        if self.mass is not None:
            object.__setattr__(self, "mass", Fraction(self.mass))
            if self.mass <= 0:
                raise ValueError("numeric mass must be positive")
        if self.momentum is not None:
            mom = tuple(Fraction(x) for x in self.momentum)
            if len(mom) != 4:
                raise ValueError("momentum needs four components")
            object.__setattr__(self, "momentum", mom)

    @classmethod
    def symbolic(cls, basis: GammaBasis | None = None) -> "DerivationContext":
        return cls(basis or build_dirac_basis())

    def p_upper(self) -> list[MomentumPoly]:
        if self.momentum is None:
            return [MomentumPoly.var(f"p{mu}") for mu in LORENTZ]
        return [MomentumPoly.const(x) for x in self.momentum]

    def m(self) -> MomentumPoly:
        return MomentumPoly.var("m") if self.mass is None else MomentumPoly.const(self.mass)

    def operator(self) -> SpinorMatrix:
        """gamma^mu p_mu - m 1 with polynomial entries."""
        slash = self.basis.slash(self.p_upper())
        m = self.m()
        return SpinorMatrix([[slash[i, j] - m if i == j else slash[i, j] for j in range(4)] for i in range(4)])

    def is_on_shell(self) -> bool | None:
        if self.mass is None or self.momentum is None:
            return None
        p = self.momentum
        return p[0] ** 2 - p[1] ** 2 - p[2] ** 2 - p[3] ** 2 == self.mass ** 2


# --- normalization ------------------------------------------------------------------

_M = VARIABLES.index("m")


def clear_mass(lf: LinearForm) -> LinearForm:
    """Divide out the largest power of m common to every term."""
    powers = [mono[_M] for c in lf.terms.values() for mono in c.terms]
    k = min(powers, default=0)
    if not k:
        return lf
    out = {}
    for s, c in lf.terms.items():
        out[s] = MomentumPoly({mono[:_M] + (mono[_M] - k,) + mono[_M + 1:]: v for mono, v in c.terms.items()})
    return LinearForm(out)


def normalize(lf: LinearForm) -> LinearForm:
    """m-cleared, scaled so the leading term of the first symbol has coefficient 1."""
    lf = clear_mass(lf)
    if not lf:
        return lf
    sym, coeff = lf.sorted_items()[0]
    lead = coeff.sorted_terms()[0][1]
    return lf if lead == ONE else lf.scale(lead.inverse())


# --- BW operator and projections ---------------------------------------------------

def apply_bw_operator(psi: Multispinor4, slot: int, ctx: DerivationContext) -> Multispinor4:
    """(gamma.p - m) on spinor slot 1..4; zero is the plane-wave BW equation for that slot."""
    if slot not in (1, 2, 3, 4):
        raise ValueError("slot must be 1, 2, 3 or 4")
    return psi.apply_slot(ctx.operator(), slot - 1)


_FIRST_NAMES = {"gamma": ("nu",), "sigma": ("mu", "nu"), "one": (), "gamma5": (), "gamma5gamma": ("lambda",)}
_SECOND_NAMES = {"gamma": ("kappa",), "sigma": ("kappa", "tau")}
DYNAMICS_FAMILIES = ("gamma", "sigma")
CONSTRAINT_FAMILIES = ("one", "gamma5gamma")


def _tag(first_family: str, second_family: str | None = None) -> str:
    return f"bw-slot1:{first_family}" + (f"|{second_family}" if second_family else "")


def is_dynamics(eq: TensorEquation) -> bool:
    head = eq.provenance.split(":", 1)[-1].split("|")[0]
    return eq.provenance.startswith("bw-slot1:") and head in DYNAMICS_FAMILIES


def _pair_expansion(basis: GammaBasis, alphas: tuple) -> SpinorMatrix:
    """a1 (g_mu R) Psi^mu + a2 (s_mu nu R) PsiT^{mu nu} + a3 (g5 s_mu nu R) PsiTt^{mu nu} as a 4x4 of LinearForms."""
    g = basis.metric
    r = basis.r_matrix
    a1, a2, a3 = alphas
    entries = [[LinearForm() for _ in range(4)] for _ in range(4)]

    def add(mat: SpinorMatrix, block: str, idx: tuple, w):
        for i in range(4):
            for j in range(4):
                x = mat.rows[i][j]
                if x:
                    entries[i][j] = entries[i][j] + LinearForm.term(block, idx, x * w)

    for mu in LORENTZ:
        if a1:
            add(basis.gamma[mu] @ r, "Psi", (mu,), a1 * g[mu])
    for mu in LORENTZ:
        for nu in LORENTZ:
            if mu == nu:
                continue
            s = basis.sigma[mu, nu] @ r
            if a2:
                add(s, "PsiT", (mu, nu), a2 * g[mu] * g[nu])
            if a3:
                add(basis.gamma5 @ s, "PsiTt", (mu, nu), a3 * g[mu] * g[nu])
    return SpinorMatrix(entries)


def _apply_left(op: SpinorMatrix, mat: SpinorMatrix) -> list[list[LinearForm]]:
    out = []
    for i in range(4):
        row = []
        for j in range(4):
            acc = LinearForm()
            for k in range(4):
                x = op.rows[i][k]
                y = mat.rows[k][j]
                if x and y:
                    acc = acc + y * x
            row.append(acc)
        out.append(row)
    return out


def _trace_with(dual: SpinorMatrix, table) -> LinearForm:
    acc = LinearForm()
    for a in range(4):
        for b in range(4):
            e = dual.rows[b][a]
            if e and table[a][b]:
                acc = acc + table[a][b] * e
    return acc


def derive_pair_dynamics(ctx: DerivationContext, coeffs: CoefficientSet | None = None) -> list[TensorEquation]:
    """Slot-1 BW equation on the first-pair expansion, projected on the 16 dual matrices.

    Returns the dynamics (gamma and sigma projections) followed by the
    constraint-type projections (R and gamma5 gamma).  ``coeffs`` switches on
    the alpha-weighted expansion including the pseudotensor part.
    """
    basis = ctx.basis
    alphas = (1, 1, 0) if coeffs is None else (coeffs.a(1), coeffs.a(2), coeffs.a(3))
    table = _apply_left(ctx.operator(), _pair_expansion(basis, alphas))
    members = basis.members()
    duals = gram_dual(basis, members)
    dyn, cons = [], []
    for mem, dual in zip(members, duals):
        lf = _trace_with(dual, table)
        if mem.family == "gamma5":
            if lf:
                raise ProjectionResidue(f"projection on {mem.label} is nonzero: {lf}")
            continue
        if not lf:
            continue
        eq = TensorEquation(normalize(lf), tuple(zip(_FIRST_NAMES[mem.family], mem.indices)), _tag(mem.family))
        (dyn if mem.family in DYNAMICS_FAMILIES else cons).append(eq)
    return dyn + cons


def derive_tensor_dynamics(formalism: str, coeffs: CoefficientSet | None, ctx: DerivationContext,
                           psi: Multispinor4 | None = None) -> list[TensorEquation]:
    """Project the slot-1 BW equation on both dual bases.

    Every (first, second) member pair gives one equation tagged
    ``bw-slot1:<first family>|<second family>``.  Antisymmetric second-pair
    components and the gamma5 first-pair component must vanish.
    """
    if formalism == "generalized" and coeffs is None:
        raise ValueError("generalized formalism needs a coefficient set")
    basis = ctx.basis
    if psi is None:
        psi = field_function(basis, formalism, coeffs)
    phi = apply_bw_operator(psi, 1, ctx)
    members = basis.members()
    duals = gram_dual(basis, members)
    table = project_pairs(phi, duals, duals)
    dyn, cons = [], []
    for fm, row in zip(members, table):
        for sm, lf in zip(members, row):
            if not lf:
                continue
            if sm.kind != "symmetric" or fm.family == "gamma5":
                raise ProjectionResidue(f"component {fm.label} (x) {sm.label} is nonzero: {lf}")
            idx = tuple(zip(_SECOND_NAMES[sm.family], sm.indices)) + tuple(zip(_FIRST_NAMES[fm.family], fm.indices))
            eq = TensorEquation(normalize(lf), idx, _tag(fm.family, sm.family))
            (dyn if fm.family in DYNAMICS_FAMILIES else cons).append(eq)
    return dyn + cons


def dynamics_only(eqs: Iterable[TensorEquation]) -> list[TensorEquation]:
    return [e for e in eqs if is_dynamics(e)]


# --- template matching --------------------------------------------------------------

def expected_shape(eq: TensorEquation, formalism: str, coeffs: CoefficientSet | None = None) -> LinearForm | None:
    """The hand-written form this derived equation should be proportional to (None if no template)."""
    fam = eq.provenance.split(":", 1)[-1]
    ix = eq.indices
    if formalism == "pair":
        if fam == "gamma":
            return shapes.divergence_form("PsiT", "Psi", (), ix["nu"]) if coeffs is None else None
        if fam == "sigma":
            return shapes.curl_form("PsiT", "Psi", (), ix["mu"], ix["nu"]) if coeffs is None else None
        if fam == "one":
            return shapes.divergence_constraint("Psi", ())
        if fam == "gamma5gamma":
            return shapes.pair_dual_divergence("PsiT", ix["lambda"]) if coeffs is None else None
        return None
    if formalism == "standard":
        table = {
            "gamma|gamma": lambda: shapes.divergence_form("T", "G", (ix["kappa"],), ix["nu"]),
            "gamma|sigma": lambda: shapes.divergence_form("R", "F", (ix["kappa"], ix["tau"]), ix["nu"]),
            "sigma|gamma": lambda: shapes.curl_form("T", "G", (ix["kappa"],), ix["mu"], ix["nu"]),
            "sigma|sigma": lambda: shapes.curl_form("R", "F", (ix["kappa"], ix["tau"]), ix["mu"], ix["nu"]),
            "one|gamma": lambda: shapes.divergence_constraint("G", (ix["kappa"],)),
            "one|sigma": lambda: shapes.divergence_constraint("F", (ix["kappa"], ix["tau"])),
            "gamma5gamma|gamma": lambda: shapes.dual_divergence_constraint("T", (ix["kappa"],), ix["lambda"]),
            "gamma5gamma|sigma": lambda: shapes.dual_divergence_constraint(
                "R", (ix["kappa"], ix["tau"]), ix["lambda"]),
        }
        fn = table.get(fam)
        return fn() if fn else None
    if formalism == "generalized":
        c = coeffs or CoefficientSet.ones()
        if fam == "gamma|gamma":
            return shapes.mixed_divergence_form(c, ix["kappa"], ix["nu"])
        if fam == "sigma|gamma":
            return shapes.mixed_curl_form(c, ix["kappa"], ix["mu"], ix["nu"])
        if fam == "gamma|sigma":
            return shapes.mixed_tensor_divergence_form(c, ix["kappa"], ix["tau"], ix["nu"])
        if fam == "sigma|sigma":
            return shapes.mixed_tensor_curl_form(c, ix["kappa"], ix["tau"], ix["mu"], ix["nu"])
        return None
    raise ValueError(f"unknown formalism {formalism!r}")


@dataclass(frozen=True)
class ShapeMatch:
    label: str
    matched: bool | None  # None when no template applies


def match_shapes(eqs: Sequence[TensorEquation], formalism: str,
                 coeffs: CoefficientSet | None = None) -> list[ShapeMatch]:
    out = []
    for eq in eqs:
        ref = expected_shape(eq, formalism, coeffs)
        out.append(ShapeMatch(eq.label(), None if ref is None else shapes.proportional(eq.lhs, ref)))
    return out


# --- polynomial span membership (Macaulay) -----------------------------------------

def monomials_up_to(degree: int) -> list[tuple]:
    n = len(VARIABLES)
    out = [e for e in itertools.product(range(degree + 1), repeat=n) if sum(e) <= degree]
    return sorted(out, key=lambda e: (sum(e), tuple(-x for x in e)))


def _expand(lf: LinearForm, mult: tuple) -> dict:
    out = {}
    for s, c in lf.terms.items():
        for mono, v in c.terms.items():
            out[s, tuple(a + b for a, b in zip(mono, mult))] = v
    return out


def _components(forms: Sequence[LinearForm]) -> list[list[int]]:
    """Group forms into connected components of the 'shares a symbol' relation."""
    parent = list(range(len(forms)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    owner: dict = {}
    for i, f in enumerate(forms):
        for s in f.terms:
            j = owner.setdefault(s, i)
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[ri] = rj
    groups: dict = {}
    for i in range(len(forms)):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


class PolynomialSpan:
    """Span over C(i)-rationals of {monomial * row : deg(monomial) <= degree}.

    Membership of ``m^k * target`` certifies that ``target = 0`` follows from
    the rows for every m != 0 (the multipliers are polynomials, so the
    combination is valid at every momentum).
    """

    def __init__(self, forms: Sequence[LinearForm], degree: int = 1):
        self.forms = [f for f in forms if f]
        self.degree = degree
        self.mults = monomials_up_to(degree)
        self._groups = _components(self.forms)
        self._group_of = {}
        for gi, grp in enumerate(self._groups):
            for i in grp:
                for s in self.forms[i].terms:
                    self._group_of[s] = gi
        self._cache: dict = {}

    def _space(self, groups: frozenset):
        hit = self._cache.get(groups)
        if hit is None:
            rows = [_expand(self.forms[i], mu) for g in sorted(groups) for i in self._groups[g] for mu in self.mults]
            cols: dict = {}
            for r in rows:
                for k in r:
                    cols.setdefault(k, len(cols))
            rs = RowSpace(len(cols))
            for r in rows:
                rs.add({cols[k]: v for k, v in r.items()})
            hit = (rs, cols)
            self._cache[groups] = hit
        return hit

    def contains(self, target: LinearForm, mass_power: int = 0) -> bool:
        if not target:
            return True
        groups = set()
        for s in target.terms:
            if s not in self._group_of:
                return False
            groups.add(self._group_of[s])
        rs, cols = self._space(frozenset(groups))
        mult = tuple(mass_power if i == _M else 0 for i in range(len(VARIABLES)))
        row = {}
        for k, v in _expand(target, mult).items():
            if k not in cols:
                return False
            row[cols[k]] = v
        return rs.contains(row)


@dataclass(frozen=True)
class ConsequenceResult:
    label: str
    derivable: bool
    mass_power: int | None


def check_consequences(dynamics: Sequence[TensorEquation], targets: Sequence[TensorEquation],
                       degree: int = 1, max_mass_power: int = 2) -> list[ConsequenceResult]:
    span = PolynomialSpan([e.lhs for e in dynamics], degree)
    out = []
    for t in targets:
        k = next((k for k in range(max_mass_power + 1) if span.contains(t.lhs, k)), None)
        out.append(ConsequenceResult(t.label(), k is not None, k))
    return out


def pair_consequence_targets() -> list[TensorEquation]:
    out = [TensorEquation(shapes.divergence_constraint("Psi", ()), (), "target:divergence")]
    out += [TensorEquation(shapes.pair_dual_divergence("PsiT", nu), (("nu", nu),), "target:dual-divergence")
            for nu in LORENTZ]
    return out


def tensor_consequence_targets() -> list[TensorEquation]:
    out = []
    for k in LORENTZ:
        out.append(TensorEquation(shapes.divergence_constraint("G", (k,)), (("kappa", k),), "target:divergence-G"))
    for k, t in itertools.combinations(LORENTZ, 2):
        out.append(TensorEquation(shapes.divergence_constraint("F", (k, t)), (("kappa", k), ("tau", t)),
                                  "target:divergence-F"))
    for k in LORENTZ:
        for mu in LORENTZ:
            out.append(TensorEquation(shapes.dual_divergence_constraint("T", (k,), mu),
                                      (("kappa", k), ("mu", mu)), "target:dual-divergence-T"))
    for k, t in itertools.combinations(LORENTZ, 2):
        for mu in LORENTZ:
            out.append(TensorEquation(shapes.dual_divergence_constraint("R", (k, t), mu),
                                      (("kappa", k), ("tau", t), ("mu", mu)), "target:dual-divergence-R"))
    return out


def verify_consequence(dynamics: Sequence[TensorEquation],
                       targets: Sequence[TensorEquation] | None = None) -> bool:
    """True iff every target follows from the dynamics as a polynomial identity (m != 0).

    Without explicit targets, the divergence and dual-divergence constraints
    matching the symbols in ``dynamics`` are used.
    """
    if targets is None:
        blocks = set()
        for e in dynamics:
            blocks |= e.lhs.blocks()
        targets = pair_consequence_targets() if "Psi" in blocks or not blocks else tensor_consequence_targets()
    return all(r.derivable for r in check_consequences(dynamics, targets))


# --- symmetry constraints -----------------------------------------------------------

def derive_symmetry_constraints(formalism: str, coeffs: CoefficientSet | None = None,
                                basis: GammaBasis | None = None,
                                psi: Multispinor4 | None = None) -> ConstraintSystem:
    """Contract (beta, gamma) with each antisymmetric matrix and set all 16 entries to zero."""
    basis = basis or build_dirac_basis()
    if psi is None:
        psi = field_function(basis, formalism, coeffs)
    eqs = []
    for mem in basis.contraction_matrices():
        table = contract_antisym(psi, mem.matrix)
        for al in range(4):
            for de in range(4):
                lf = table[al][de]
                if lf:
                    eqs.append(TensorEquation(normalize(lf), (("alpha", al), ("delta", de)),
                                              f"contraction:{mem.label}"))
    return ConstraintSystem(eqs, enumerate_symbols(formalism))


@dataclass(frozen=True)
class ConstraintAnalysis:
    formalism: str
    unknowns: int
    equations: int
    rank: int
    nullity: int  # kernel dimension over the symbol unknowns
    redundancy: int  # symbol combinations mapping to the zero multispinor
    field_dimension: int  # dimension of the set of multispinors the kernel produces


def analyze_constraints(formalism: str, coeffs: CoefficientSet | None = None,
                        basis: GammaBasis | None = None) -> ConstraintAnalysis:
    basis = basis or build_dirac_basis()
    psi = field_function(basis, formalism, coeffs)
    system = derive_symmetry_constraints(formalism, coeffs, basis, psi)
    rs = system.row_space()
    n = len(system.unknowns)
    emb_rank = row_space(embedding_matrix(psi, system.unknowns).transpose()).rank
    nullity = n - rs.rank
    redundancy = n - emb_rank
    return ConstraintAnalysis(formalism, n, len(system.equations), rs.rank, nullity, redundancy,
                              nullity - redundancy)


@dataclass(frozen=True)
class GenericityProbe:
    seed: int
    samples: int
    field_dimensions: tuple
    nullities: tuple

    @property
    def constant(self) -> bool:
        return len(set(self.field_dimensions)) == 1 and len(set(self.nullities)) == 1


def genericity_probe(seed: int, count: int = 20, basis: GammaBasis | None = None) -> GenericityProbe:
    from .fields import coefficient_samples

    basis = basis or build_dirac_basis()
    dims, nulls = [], []
    for c in coefficient_samples(seed, count):
        a = analyze_constraints("generalized", c, basis)
        dims.append(a.field_dimension)
        nulls.append(a.nullity)
    return GenericityProbe(seed, count, tuple(dims), tuple(nulls))


def recovery_check(coeffs: CoefficientSet | None = None, basis: GammaBasis | None = None) -> bool:
    """Generalized constraints at ``coeffs`` (default: degenerate point) span-equal to the standard ones."""
    basis = basis or build_dirac_basis()
    coeffs = coeffs or CoefficientSet.degenerate()
    gen = derive_symmetry_constraints("generalized", coeffs, basis)
    std = derive_symmetry_constraints("standard", None, basis)
    allowed = set(std.unknowns)
    if any(s not in allowed for eq in gen.equations for s in eq.lhs.terms):
        return False
    restricted = ConstraintSystem(gen.equations, std.unknowns)
    return span_equal(restricted.matrix(), std.matrix())


# --- second-order reduction -----------------------------------------------------------

@dataclass
class SecondOrderResult:
    second_order: list  # one equation per G^{kappa mu}
    trace: TensorEquation  # kappa = mu contraction
    vector_definition: list  # A^kappa - p_mu G^{mu kappa} = 0
    vector_divergence: TensorEquation  # p_kappa A^kappa = 0
    divergence_follows: bool  # vector_divergence follows from the above modulo G^mu_mu = 0


_SUBSYSTEM = {"G", "T", "Tt"}


def second_order_reduction(dynamics: Sequence[TensorEquation]) -> SecondOrderResult:
    """Eliminate T (and T~) between the G-T first-order equations.

    The rows are multiplied by every monomial of degree <= 1 and reduced with
    the T columns first and the m^2 G columns leading the G columns, so each
    G-only row pivots on one m^2 G^{kappa mu}.
    """
    rows = [e.lhs for e in dynamics if e.lhs and e.lhs.blocks() <= _SUBSYSTEM]
    if not any("G" in r.blocks() for r in rows):
        raise MissingBlock("no equations couple G to T; the G-T block is absent (alpha1*beta1 = 0?)")
    mults = monomials_up_to(1)
    expanded = [_expand(r, mu) for r in rows for mu in mults]
    m2 = tuple(2 if i == _M else 0 for i in range(len(VARIABLES)))
    keys = sorted({k for r in expanded for k in r},
                  key=lambda k: (k[0].block == "G", k[1] != m2, k[0].sort_key(), k[1]))
    cols = {k: i for i, k in enumerate(keys)}
    rs = RowSpace(len(keys))
    for r in expanded:
        rs.add({cols[k]: v for k, v in r.items()})
    second = []
    for piv, row in zip(rs.pivots, rs.reduced_rows()):
        sym, mono = keys[piv]
        if sym.block != "G" or mono != m2:
            continue
        terms: dict = {}
        for j, v in row.items():
            s, mo = keys[j]
            terms.setdefault(s, {})[mo] = v
        lf = LinearForm({s: MomentumPoly(t) for s, t in terms.items()})
        second.append(TensorEquation(lf, (("kappa", sym.indices[0]), ("mu", sym.indices[1])), "second-order"))
    if not second:
        raise MissingBlock("elimination produced no second-order G equation")
    second.sort(key=lambda e: e.free_indices)
    by_idx = {(e.indices["kappa"], e.indices["mu"]): e.lhs for e in second}
    g = shapes.g
    trace = LinearForm()
    for mu in LORENTZ:
        if (mu, mu) in by_idx:
            trace = trace + by_idx[mu, mu].scale(g[mu])
    trace_eq = TensorEquation(trace, (), "second-order:trace")
    vdef = []
    for k in LORENTZ:
        lf = LinearForm.term("A", (k,)) - shapes._sum(
            LinearForm.term("G", (mu, k), shapes.p_low(mu)) for mu in LORENTZ)
        vdef.append(TensorEquation(lf, (("kappa", k),), "second-order:vector-definition"))
    vdiv = TensorEquation(shapes.divergence_constraint("A", ()), (), "second-order:vector-divergence")
    # p_k A^k - sum_k p_k (A^k - p_mu G^{mu k}) - trace must be a multiple of G^mu_mu
    rest = vdiv.lhs - shapes._sum(e.lhs * shapes.p_low(e.indices["kappa"]) for e in vdef) - trace
    tc = shapes.trace_condition()
    g00 = FieldSymbol("G", (0, 0))
    q = rest.coefficient(g00)
    follows = rest == tc * q
    return SecondOrderResult(second, trace_eq, vdef, vdiv, follows)


# --- solution spaces ------------------------------------------------------------------

@dataclass
class SolutionSpace:
    formalism: str
    momentum: tuple
    mass: Fraction
    on_shell: bool
    include_bw: bool
    dimension: int  # kernel over the symbol unknowns
    redundancy: int
    field_dimension: int
    basis: list = field(repr=False)  # kernel vectors over the unknowns
    field_basis: list = field(repr=False)  # reduced basis of the multispinors produced (256-vectors)
    unknowns: list = field(repr=False)


def solution_space(formalism: str, coeffs: CoefficientSet | None, p: Sequence, m, include_bw: bool = True,
                   basis: GammaBasis | None = None, require_on_shell: bool = False) -> SolutionSpace:
    basis = basis or build_dirac_basis()
    ctx = DerivationContext(basis, Fraction(m), tuple(p))
    on_shell = bool(ctx.is_on_shell())
    if include_bw and require_on_shell and not on_shell:
        raise OffShellRequested(f"p^2 != m^2 for p={list(map(str, ctx.momentum))}, m={ctx.mass}")
    psi = field_function(basis, formalism, coeffs)
    system = derive_symmetry_constraints(formalism, coeffs, basis, psi)
    unknowns = system.unknowns
    cols = {s: i for i, s in enumerate(unknowns)}
    rs = RowSpace(len(unknowns))
    for eq in system.equations:
        rs.add(eq.lhs.numeric_row(cols))
    if include_bw:
        for slot in (1, 2, 3, 4):
            for comp in apply_bw_operator(psi, slot, ctx).components:
                if comp:
                    rs.add(comp.numeric_row(cols))
    kernel = nullspace_from_space(rs)
    emb = embedding_matrix(psi, unknowns)
    emb_rank = row_space(emb.transpose()).rank
    image = RowSpace(SIZE)
    for v in kernel:
        image.add({i: x for i, x in enumerate(emb.apply(v)) if x})
    return SolutionSpace(
        formalism=formalism,
        momentum=ctx.momentum,
        mass=ctx.mass,
        on_shell=on_shell,
        include_bw=include_bw,
        dimension=len(kernel),
        redundancy=len(unknowns) - emb_rank,
        field_dimension=image.rank,
        basis=kernel,
        field_basis=image.reduced_rows(),
        unknowns=unknowns,
    )


__all__ = [
    "ProjectionResidue", "MissingBlock", "OffShellRequested", "TensorEquation", "ConstraintSystem",
    "DerivationContext", "apply_bw_operator", "derive_pair_dynamics", "derive_tensor_dynamics",
    "verify_consequence", "check_consequences", "derive_symmetry_constraints", "analyze_constraints",
    "recovery_check", "second_order_reduction", "solution_space", "genericity_probe", "match_shapes",
    "PolynomialSpan", "normalize", "clear_mass", "dynamics_only",
]
