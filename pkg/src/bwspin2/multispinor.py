"""Rank-4 Dirac multispinors.

Components are stored flat in row-major order over (alpha, beta, gamma, delta):
``flat = ((alpha*4 + beta)*4 + gamma)*4 + delta``.  The scalar type is
anything closed under ``+`` and multiplication by complex rationals
(:class:`~bwspin2.exact.CRational` or :class:`~bwspin2.fields.LinearForm`).
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .clifford import GammaBasis, Member, SpinorMatrix, gram_dual
from .exact import CRational, ZERO, format_crational, parse_crational
from .linsys import ExactMatrix, RowSpace

SLOTS = 4
SIZE = 256


class AsymmetricBlockMatrix(ValueError):
    pass


class ResidualNotZero(ValueError):
    pass


def flat_index(a: int, b: int, c: int, d: int) -> int:
    return ((a * 4 + b) * 4 + c) * 4 + d


def unflatten(k: int) -> tuple[int, int, int, int]:
    return (k >> 6) & 3, (k >> 4) & 3, (k >> 2) & 3, k & 3


_ALL = tuple(itertools.product(range(4), repeat=4))


class Multispinor4:
    __slots__ = ("components", "zero")

    def __init__(self, components: Sequence, zero=ZERO):
        comps = tuple(components)
        if len(comps) != SIZE:
            raise ValueError(f"a rank-4 multispinor has {SIZE} components, got {len(comps)}")
        self.components = comps
        self.zero = zero

    @classmethod
    def zeros(cls, zero=ZERO) -> "Multispinor4":
        return cls((zero,) * SIZE, zero)

    @classmethod
    def from_function(cls, fn: Callable[[int, int, int, int], object], zero=ZERO) -> "Multispinor4":
        return cls([fn(*idx) for idx in _ALL], zero)

    def __getitem__(self, idx):
        return self.components[flat_index(*idx)]

    def __add__(self, other: "Multispinor4") -> "Multispinor4":
        return Multispinor4([_add(x, y) for x, y in zip(self.components, other.components)], self.zero)

    def __sub__(self, other: "Multispinor4") -> "Multispinor4":
        return self + other.scale(-1)

    def scale(self, c) -> "Multispinor4":
        return Multispinor4([x * c if x else x for x in self.components], self.zero)

    def is_zero(self) -> bool:
        return not any(self.components)

    def __eq__(self, other):
        if not isinstance(other, Multispinor4):
            return NotImplemented
        return all(_same(x, y) for x, y in zip(self.components, other.components))

    __hash__ = None

    def permuted(self, perm: Sequence[int]) -> "Multispinor4":
        """Result ``r`` with ``r[i0,i1,i2,i3] = self[i_perm[0], ..., i_perm[3]]``."""
        comps = []
        for idx in _ALL:
            src = tuple(idx[perm[s]] for s in range(4))
            comps.append(self.components[flat_index(*src)])
        return Multispinor4(comps, self.zero)

    def apply_slot(self, matrix: SpinorMatrix, slot: int) -> "Multispinor4":
        """Act with ``matrix`` on spinor index ``slot`` (0-based): M_{a a'} psi_{..a'..}."""
        if not 0 <= slot < 4:
            raise ValueError("slot must be 0..3")
        rows = matrix.rows
        comps = []
        for idx in _ALL:
            acc = None
            a = idx[slot]
            for a2 in range(4):
                mval = rows[a][a2]
                if not mval:
                    continue
                src = list(idx)
                src[slot] = a2
                x = self.components[flat_index(*src)]
                if x:
                    term = x * mval
                    acc = term if acc is None else _add(acc, term)
            comps.append(acc if acc is not None else self.zero)
        return Multispinor4(comps, self.zero)

    def pair_slice(self, c: int, d: int) -> SpinorMatrix:
        """4x4 matrix over the first pair (alpha, beta) at fixed (gamma, delta)."""
        return SpinorMatrix([[self.components[flat_index(a, b, c, d)] for b in range(4)] for a in range(4)])

    def second_slice(self, a: int, b: int) -> SpinorMatrix:
        return SpinorMatrix([[self.components[flat_index(a, b, c, d)] for d in range(4)] for c in range(4)])

    def to_json(self) -> str:
        return json.dumps([format_crational(CRational.coerce(x)) for x in self.components])

    @classmethod
    def from_json(cls, text: str) -> "Multispinor4":
        return cls([parse_crational(s) for s in json.loads(text)])


def _add(x, y):
    if not x:
        return y
    if not y:
        return x
    return x + y


def _same(x, y) -> bool:
    if not x and not y:
        return True
    return x == y


def symmetrize(psi: Multispinor4, subset: Sequence[int] = (0, 1, 2, 3)) -> Multispinor4:
    """Average of ``psi`` over all permutations of the slots in ``subset``."""
    subset = tuple(subset)
    acc = None
    count = 0
    for image in itertools.permutations(subset):
        perm = list(range(4))
        for src, dst in zip(subset, image):
            perm[src] = dst
        term = psi.permuted(perm)
        acc = term if acc is None else acc + term
        count += 1
    return acc.scale(Fraction(1, count))


def is_pair_symmetric(psi: Multispinor4) -> bool:
    return psi == psi.permuted((1, 0, 2, 3)) and psi == psi.permuted((0, 1, 3, 2))


def is_fully_symmetric(psi: Multispinor4) -> bool:
    return all(psi == psi.permuted(p) for p in ((1, 0, 2, 3), (0, 2, 1, 3), (0, 1, 3, 2)))


def block_embed(first: SpinorMatrix, second: SpinorMatrix, coefficient, zero=None) -> Multispinor4:
    """(first)_{alpha beta} (second)_{gamma delta} * coefficient; both matrices must be symmetric."""
    if not first.is_symmetric():
        raise AsymmetricBlockMatrix("first-pair matrix is not symmetric")
    if not second.is_symmetric():
        raise AsymmetricBlockMatrix("second-pair matrix is not symmetric")
    return outer_embed(first, second, coefficient, zero)


def outer_embed(first: SpinorMatrix, second: SpinorMatrix, coefficient, zero=None) -> Multispinor4:
    """Unchecked outer product embedding (any matrices)."""
    if zero is None:
        zero = coefficient * 0
    comps = [zero] * SIZE
    if not coefficient:
        return Multispinor4(comps, zero)
    for a in range(4):
        for b in range(4):
            x = first.rows[a][b]
            if not x:
                continue
            cx = coefficient * x
            for c in range(4):
                for d in range(4):
                    y = second.rows[c][d]
                    if y:
                        comps[flat_index(a, b, c, d)] = cx * y
    return Multispinor4(comps, zero)


def _project_slice(dual: SpinorMatrix, slice_: SpinorMatrix, zero):
    # Tr(E S) = sum_{a,b} E_{b a} S_{a b}
    acc = None
    for a in range(4):
        for b in range(4):
            e = dual.rows[b][a]
            s = slice_.rows[a][b]
            if e and s:
                term = s * e
                acc = term if acc is None else _add(acc, term)
    return acc if acc is not None else zero


def project_pairs(psi: Multispinor4, duals_first: Sequence[SpinorMatrix],
                  duals_second: Sequence[SpinorMatrix]) -> list[list]:
    """Coefficients c[a][b] with psi = sum c[a][b] B_a (x) B_b for the bases dual to the given duals."""
    zero = psi.zero
    first = []
    for e in duals_first:
        table = [[_project_slice(e, psi.pair_slice(c, d), zero) for d in range(4)] for c in range(4)]
        first.append(SpinorMatrix(table))
    return [[_project_slice(f, t, zero) for f in duals_second] for t in first]


@dataclass
class PairCoefficients:
    """Coefficients of a pair-symmetric multispinor on (sym member) x (sym member) blocks."""

    labels: list
    table: dict  # (first_label, second_label) -> scalar

    def get(self, first: str, second: str):
        return self.table.get((first, second), ZERO)


def extract_coefficients(psi: Multispinor4, basis: GammaBasis) -> PairCoefficients:
    """Invert the block expansion via the Gram dual; error if antisymmetric parts are present."""
    members = basis.members()
    duals = gram_dual(basis, members)
    coeffs = project_pairs(psi, duals, duals)
    table = {}
    for i, mi in enumerate(members):
        for j, mj in enumerate(members):
            c = coeffs[i][j]
            if not c:
                continue
            if mi.kind != "symmetric" or mj.kind != "symmetric":
                raise ResidualNotZero(
                    f"component along {mi.label} (x) {mj.label} is nonzero; psi is not pair-symmetric")
            table[mi.label, mj.label] = c
    return PairCoefficients([m.label for m in members if m.kind == "symmetric"], table)


def embed_coefficients(coeffs: PairCoefficients, basis: GammaBasis, zero=ZERO) -> Multispinor4:
    by_label = {m.label: m.matrix for m in basis.symmetric_members()}
    acc = Multispinor4.zeros(zero)
    for (la, lb), c in sorted(coeffs.table.items()):
        acc = acc + block_embed(by_label[la], by_label[lb], c, zero)
    return acc


def contract_antisym(psi: Multispinor4, a: SpinorMatrix) -> list[list]:
    """table[alpha][delta] = sum_{beta,gamma} psi_{alpha beta gamma delta} a_{beta gamma}.

    Antisymmetry of ``a`` is not enforced.
    """
    out = []
    for al in range(4):
        row = []
        for de in range(4):
            acc = None
            for be in range(4):
                for ga in range(4):
                    w = a.rows[be][ga]
                    if not w:
                        continue
                    x = psi.components[flat_index(al, be, ga, de)]
                    if x:
                        term = x * w
                        acc = term if acc is None else _add(acc, term)
            row.append(acc if acc is not None else psi.zero)
        out.append(row)
    return out


# --- subspace computations on explicit coordinates --------------------------------

SYM_PAIRS = tuple((i, j) for i in range(4) for j in range(i, 4))


def pair_symmetric_coordinates() -> list[dict[int, CRational]]:
    """The 100 pair-symmetric unit tensors (E_ij + E_ji) (x) (E_kl + E_lk) as sparse 256-vectors.

    Built from unit matrices only, so it does not depend on the gamma basis or R.
    """
    one = CRational(1)
    vecs = []
    for i, j in SYM_PAIRS:
        for k, l in SYM_PAIRS:
            v: dict[int, CRational] = {}
            for a, b in {(i, j), (j, i)}:
                for c, d in {(k, l), (l, k)}:
                    v[flat_index(a, b, c, d)] = one
            vecs.append(v)
    return vecs


def _contraction_rows(vectors: Sequence[dict[int, CRational]], matrices: Sequence[SpinorMatrix]) -> ExactMatrix:
    """Rows = (matrix, alpha, delta) contractions, columns = the given domain vectors."""
    rows = []
    for a in matrices:
        for al in range(4):
            for de in range(4):
                row = {}
                for col, v in enumerate(vectors):
                    acc = ZERO
                    for be in range(4):
                        for ga in range(4):
                            w = a.rows[be][ga]
                            if w:
                                x = v.get(flat_index(al, be, ga, de))
                                if x:
                                    acc = acc + x * w
                    if acc:
                        row[col] = acc
                rows.append(row)
    return ExactMatrix.from_sparse(rows, len(vectors))


def contraction_matrix(matrices: Sequence[SpinorMatrix]) -> ExactMatrix:
    """Contraction equations (16 per matrix) on the 100-dim pair-symmetric coordinates."""
    return _contraction_rows(pair_symmetric_coordinates(), matrices)


def symmetric_subspace_dim(matrices: Sequence[SpinorMatrix]) -> int:
    """Dimension of the joint kernel of the contractions on the pair-symmetric space."""
    from .linsys import rank

    m = contraction_matrix(matrices)
    return m.ncols - rank(m)


def contraction_kernel(matrices: Sequence[SpinorMatrix]) -> list[dict[int, CRational]]:
    """Kernel of the contractions as sparse 256-component vectors."""
    from .linsys import nullspace

    coords = pair_symmetric_coordinates()
    kernel = nullspace(contraction_matrix(matrices))
    out = []
    for vec in kernel:
        acc: dict[int, CRational] = {}
        for c, x in enumerate(vec):
            if x:
                for k, y in coords[c].items():
                    acc[k] = acc.get(k, ZERO) + x * y
        out.append({k: v for k, v in acc.items() if v})
    return out


def symmetrizer_image(subset: Sequence[int] = (0, 1, 2, 3)) -> RowSpace:
    """Row space spanned by the symmetrized unit multispinors (image of the projector)."""
    subset = tuple(subset)
    perms = []
    for image in itertools.permutations(subset):
        perm = list(range(4))
        for src, dst in zip(subset, image):
            perm[src] = dst
        perms.append(perm)
    weight = CRational(Fraction(1, math.factorial(len(subset))))
    rs = RowSpace(SIZE)
    seen = set()
    for idx in _ALL:
        vec: dict[int, CRational] = {}
        for perm in perms:
            k = flat_index(*(idx[perm[s]] for s in range(4)))
            vec[k] = vec.get(k, ZERO) + weight
        key = tuple(sorted(vec))
        if key in seen:
            continue
        seen.add(key)
        rs.add(vec)
    return rs


def multispinor_vector(psi: Multispinor4) -> dict[int, CRational]:
    return {k: CRational.coerce(x) for k, x in enumerate(psi.components) if x}
