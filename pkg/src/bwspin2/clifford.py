"""Dirac matrices in the Dirac representation, the matrix R and the Levi-Civita symbol.

Conventions (fixed, reported by ``basis-check``):

* metric ``diag(+1, -1, -1, -1)``
* ``gamma5 = i g0 g1 g2 g3``
* ``sigma^{mu nu} = (i/2) [g^mu, g^nu]``
* ``eps^{0123} = +1`` so ``eps_{0123} = -1``
* ``R = i g^2 g^0``
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

from .exact import CRational, I, ONE, ZERO

METRIC = (1, -1, -1, -1)
LORENTZ = range(4)
PAIRS = tuple((m, n) for m in range(4) for n in range(m + 1, 4))


class SplitViolation(ValueError):
    """A basis member fails the transpose property its class requires."""

    def __init__(self, label: str, expected: str):
        super().__init__(f"{label} is not {expected}; R does not produce the symmetric/antisymmetric split")
        self.label = label
        self.expected = expected


class SingularGram(ValueError):
    pass


class SpinorMatrix:
    """4x4 matrix over an exact ring (CRational or MomentumPoly entries).

    Row index is the first spinor index, column the second.
    """

    __slots__ = ("rows",)

    def __init__(self, rows):
        rows = tuple(tuple(r) for r in rows)
        if len(rows) != 4 or any(len(r) != 4 for r in rows):
            raise ValueError("SpinorMatrix must be 4x4")
        self.rows = rows

    @classmethod
    def from_ints(cls, rows) -> "SpinorMatrix":
        return cls([[CRational.coerce(x) for x in r] for r in rows])

    @classmethod
    def identity(cls) -> "SpinorMatrix":
        return cls([[ONE if i == j else ZERO for j in range(4)] for i in range(4)])

    @classmethod
    def zero(cls) -> "SpinorMatrix":
        return cls([[ZERO] * 4 for _ in range(4)])

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __matmul__(self, other: "SpinorMatrix") -> "SpinorMatrix":
        a, b = self.rows, other.rows
        out = []
        for i in range(4):
            row = []
            for j in range(4):
                acc = None
                for k in range(4):
                    x, y = a[i][k], b[k][j]
                    if x and y:
                        acc = x * y if acc is None else acc + x * y
                row.append(acc if acc is not None else a[i][0] * 0)
            out.append(row)
        return SpinorMatrix(out)

    def __add__(self, other: "SpinorMatrix") -> "SpinorMatrix":
        return SpinorMatrix([[x + y for x, y in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other: "SpinorMatrix") -> "SpinorMatrix":
        return SpinorMatrix([[x - y for x, y in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __neg__(self) -> "SpinorMatrix":
        return SpinorMatrix([[-x for x in r] for r in self.rows])

    def scale(self, c) -> "SpinorMatrix":
        return SpinorMatrix([[x * c for x in r] for r in self.rows])

    def __mul__(self, c):
        if isinstance(c, SpinorMatrix):
            return NotImplemented
        return self.scale(c)

    __rmul__ = __mul__

    def transpose(self) -> "SpinorMatrix":
        return SpinorMatrix(list(zip(*self.rows)))

    @property
    def T(self) -> "SpinorMatrix":
        return self.transpose()

    def trace(self):
        return self.rows[0][0] + self.rows[1][1] + self.rows[2][2] + self.rows[3][3]

    def is_zero(self) -> bool:
        return not any(x for r in self.rows for x in r)

    def is_symmetric(self) -> bool:
        return (self - self.T).is_zero()

    def is_antisymmetric(self) -> bool:
        return (self + self.T).is_zero()

    def inverse(self) -> "SpinorMatrix":
        """Gauss-Jordan inverse over CRational."""
        aug = [list(r) + [ONE if i == j else ZERO for j in range(4)] for i, r in enumerate(self.rows)]
        for col in range(4):
            piv = next((r for r in range(col, 4) if aug[r][col]), None)
            if piv is None:
                raise ZeroDivisionError("singular SpinorMatrix")
            aug[col], aug[piv] = aug[piv], aug[col]
            inv = aug[col][col].inverse()
            aug[col] = [x * inv for x in aug[col]]
            for r in range(4):
                if r != col and aug[r][col]:
                    f = aug[r][col]
                    aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
        return SpinorMatrix([r[4:] for r in aug])

    def entries(self) -> list:
        return [x for r in self.rows for x in r]

    def __eq__(self, other):
        if not isinstance(other, SpinorMatrix):
            return NotImplemented
        return self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        body = "; ".join(" ".join(str(x) for x in r) for r in self.rows)
        return f"SpinorMatrix[{body}]"


def trace_pair(a: SpinorMatrix, b: SpinorMatrix):
    """Tr(a b), exact."""
    total = None
    for i in range(4):
        for k in range(4):
            x, y = a.rows[i][k], b.rows[k][i]
            if x and y:
                total = x * y if total is None else total + x * y
    return total if total is not None else ZERO


def anticommutator(a: SpinorMatrix, b: SpinorMatrix) -> SpinorMatrix:
    return a @ b + b @ a


def commutator(a: SpinorMatrix, b: SpinorMatrix) -> SpinorMatrix:
    return a @ b - b @ a


@lru_cache(maxsize=None)
def _perm_sign(idx: tuple) -> int:
    if len(set(idx)) < len(idx):
        return 0
    sign = 1
    seq = list(idx)
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


def levi_civita(mu: int, nu: int, rho: int, sigma: int, lowered: bool = False) -> int:
    """eps^{mu nu rho sigma} with eps^{0123}=+1; ``lowered`` gives eps_{...} (eps_{0123}=-1)."""
    s = _perm_sign((mu, nu, rho, sigma))
    return -s if lowered else s


def nonzero_epsilon() -> list[tuple[tuple[int, int, int, int], int]]:
    return [(p, _perm_sign(p)) for p in itertools.permutations(range(4))]


@dataclass(frozen=True)
class Member:
    label: str
    matrix: SpinorMatrix
    kind: str  # "symmetric" | "antisymmetric"
    family: str = ""  # gamma | sigma | one | gamma5 | gamma5gamma
    indices: tuple = ()


@dataclass(frozen=True)
class GammaBasis:
    gamma: tuple
    gamma5: SpinorMatrix
    sigma: dict = field(hash=False)
    r_matrix: SpinorMatrix
    r_inverse: SpinorMatrix
    metric: tuple = METRIC
    r_label: str = "R = i g^2 g^0"

    def epsilon(self, mu, nu, rho, sigma, lowered=False) -> int:
        return levi_civita(mu, nu, rho, sigma, lowered)

    def gamma_lower(self, mu: int) -> SpinorMatrix:
        return self.gamma[mu].scale(self.metric[mu])

    def slash(self, p_upper: Sequence) -> SpinorMatrix:
        """gamma^mu p_mu for contravariant components ``p_upper`` (scalars or polynomials)."""
        acc = None
        for mu in LORENTZ:
            term = self.gamma[mu].scale(p_upper[mu] * self.metric[mu])
            acc = term if acc is None else acc + term
        return acc

    def symmetric_members(self) -> list[Member]:
        r = self.r_matrix
        out = [Member(f"gamma^{mu} R", self.gamma[mu] @ r, "symmetric", "gamma", (mu,)) for mu in LORENTZ]
        out += [Member(f"sigma^{mu}{nu} R", self.sigma[mu, nu] @ r, "symmetric", "sigma", (mu, nu))
                for mu, nu in PAIRS]
        return out

    def antisymmetric_members(self) -> list[Member]:
        r = self.r_matrix
        out = [Member("R", r, "antisymmetric", "one"),
               Member("gamma5 R", self.gamma5 @ r, "antisymmetric", "gamma5")]
        out += [Member(f"gamma5 gamma^{lam} R", self.gamma5 @ self.gamma[lam] @ r, "antisymmetric",
                       "gamma5gamma", (lam,))
                for lam in LORENTZ]
        return out

    def members(self) -> list[Member]:
        """The 16-element basis: 10 symmetric then 6 antisymmetric (fixed order)."""
        return self.symmetric_members() + self.antisymmetric_members()

    def contraction_matrices(self) -> list[Member]:
        """R^{-1}, R^{-1} gamma5, R^{-1} gamma5 gamma^lambda: the antisymmetric contraction set."""
        ri = self.r_inverse
        out = [Member("R^-1", ri, "antisymmetric", "one"),
               Member("R^-1 gamma5", ri @ self.gamma5, "antisymmetric", "gamma5")]
        out += [Member(f"R^-1 gamma5 gamma^{lam}", ri @ self.gamma5 @ self.gamma[lam], "antisymmetric",
                       "gamma5gamma", (lam,))
                for lam in LORENTZ]
        return out


def _pauli_blocks():
    z, o = 0, 1
    sx = [[z, o], [o, z]]
    sy = [[ZERO, -I], [I, ZERO]]
    sz = [[o, z], [z, -o]]
    return sx, sy, sz


def _spatial_gamma(s) -> SpinorMatrix:
    rows = [[ZERO] * 4 for _ in range(4)]
    for i in range(2):
        for j in range(2):
            v = CRational.coerce(s[i][j])
            rows[i][j + 2] = v
            rows[i + 2][j] = -v
    return SpinorMatrix(rows)


def charge_conjugation_r(gamma: Sequence[SpinorMatrix]) -> SpinorMatrix:
    return (gamma[2] @ gamma[0]).scale(I)


def build_dirac_basis(r_matrix: SpinorMatrix | None = None, r_label: str | None = None) -> GammaBasis:
    """Dirac-representation basis; ``r_matrix`` overrides the default R = i g^2 g^0."""
    g0 = SpinorMatrix.from_ints([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, -1, 0], [0, 0, 0, -1]])
    gamma = (g0,) + tuple(_spatial_gamma(s) for s in _pauli_blocks())
    gamma5 = (gamma[0] @ gamma[1] @ gamma[2] @ gamma[3]).scale(I)
    half_i = CRational(0, "1/2")
    sigma = {}
    for mu in LORENTZ:
        for nu in LORENTZ:
            sigma[mu, nu] = commutator(gamma[mu], gamma[nu]).scale(half_i)
    if r_matrix is None:
        r_matrix = charge_conjugation_r(gamma)
        r_label = r_label or "R = i g^2 g^0"
    return GammaBasis(
        gamma=gamma,
        gamma5=gamma5,
        sigma=sigma,
        r_matrix=r_matrix,
        r_inverse=r_matrix.inverse(),
        r_label=r_label or "R = custom",
    )


def alternative_basis() -> GammaBasis:
    """Same gamma matrices with R rescaled to 2 g^2 g^0 (= -2i times the default R).

    By Schur's lemma every R producing the split is a multiple of the default one
    within a fixed representation, so a rescaling is the only freedom here.
    """
    base = build_dirac_basis()
    return build_dirac_basis(base.r_matrix.scale(CRational(0, -2)), r_label="R = 2 g^2 g^0")


def similarity_basis(basis: GammaBasis, s: SpinorMatrix) -> GammaBasis:
    """Conjugated representation g -> S g S^-1 with R -> S R S^T (preserves the split)."""
    si = s.inverse()
    conj: Callable[[SpinorMatrix], SpinorMatrix] = lambda x: s @ x @ si
    return GammaBasis(
        gamma=tuple(conj(g) for g in basis.gamma),
        gamma5=conj(basis.gamma5),
        sigma={k: conj(v) for k, v in basis.sigma.items()},
        r_matrix=s @ basis.r_matrix @ s.T,
        r_inverse=(s @ basis.r_matrix @ s.T).inverse(),
        metric=basis.metric,
        r_label=f"S ({basis.r_label}) S^T",
    )


@dataclass(frozen=True)
class InvariantCheck:
    name: str
    passed: bool


def clifford_invariants(basis: GammaBasis) -> list[InvariantCheck]:
    eye = SpinorMatrix.identity()
    g = basis.gamma
    checks = []
    ok = all(anticommutator(g[m], g[n]) == eye.scale(2 * basis.metric[m] if m == n else 0)
             for m in LORENTZ for n in LORENTZ)
    checks.append(InvariantCheck("{g^mu, g^nu} = 2 g^{mu nu} 1", ok))
    g5 = basis.gamma5
    checks.append(InvariantCheck("g5 = i g0 g1 g2 g3", g5 == (g[0] @ g[1] @ g[2] @ g[3]).scale(I)))
    checks.append(InvariantCheck("g5^2 = 1", g5 @ g5 == eye))
    checks.append(InvariantCheck("{g5, g^mu} = 0", all(anticommutator(g5, g[m]).is_zero() for m in LORENTZ)))
    half_i = CRational(0, "1/2")
    checks.append(InvariantCheck(
        "sigma^{mu nu} = (i/2)[g^mu, g^nu]",
        all(basis.sigma[m, n] == commutator(g[m], g[n]).scale(half_i) for m in LORENTZ for n in LORENTZ)))
    checks.append(InvariantCheck(
        "sigma^{mu nu} = -sigma^{nu mu}",
        all(basis.sigma[m, n] == -basis.sigma[n, m] for m in LORENTZ for n in LORENTZ)))
    checks.append(InvariantCheck("R R^-1 = 1", basis.r_matrix @ basis.r_inverse == eye))
    return checks


@dataclass(frozen=True)
class SplitReport:
    symmetric_count: int
    antisymmetric_count: int
    independent: bool
    gram_rank: int


def gram_matrix(members: Sequence[Member]):
    return [[trace_pair(a.matrix, b.matrix) for b in members] for a in members]


def check_symmetry_split(basis: GammaBasis) -> SplitReport:
    """Certify 10 symmetric + 6 antisymmetric members spanning all 4x4 matrices."""
    from .linsys import ExactMatrix, rank

    for mem in basis.symmetric_members():
        if not mem.matrix.is_symmetric():
            raise SplitViolation(mem.label, "symmetric")
    for mem in basis.antisymmetric_members():
        if not mem.matrix.is_antisymmetric():
            raise SplitViolation(mem.label, "antisymmetric")
    members = basis.members()
    grank = rank(ExactMatrix(gram_matrix(members)))
    return SplitReport(
        symmetric_count=len(basis.symmetric_members()),
        antisymmetric_count=len(basis.antisymmetric_members()),
        independent=grank == 16,
        gram_rank=grank,
    )


def gram_dual(basis: GammaBasis, members: Sequence[Member] | None = None) -> list[SpinorMatrix]:
    """Dual matrices E^a with Tr(E^a B_b) = delta^a_b for the 16 basis members."""
    from .linsys import ExactMatrix, inverse

    members = list(members if members is not None else basis.members())
    gram = ExactMatrix(gram_matrix(members))
    try:
        ginv = inverse(gram)
    except ZeroDivisionError:
        raise SingularGram("basis matrices are linearly dependent; Gram matrix is singular") from None
    n = len(members)
    duals = []
    for a in range(n):
        acc = SpinorMatrix.zero()
        for b in range(n):
            c = ginv.entry(b, a)
            if c:
                acc = acc + members[b].matrix.scale(c)
        duals.append(acc)
    return duals


def convention_ledger(basis: GammaBasis) -> dict[str, str]:
    return {
        "metric": "diag(+1,-1,-1,-1)",
        "representation": "Dirac (g0 = diag(1,1,-1,-1))",
        "gamma5": "i g0 g1 g2 g3",
        "sigma": "sigma^{mu nu} = (i/2)[g^mu, g^nu]",
        "epsilon": "eps^{0123} = +1, eps_{0123} = -1",
        "r_matrix": basis.r_label,
        "plane_wave": "d_mu -> -i p_mu (wave exp(-i p.x))",
        "mass": "m is a polynomial variable; equations multiplied through by the minimal power of m",
    }
