"""Independent on-shell check: the 4th symmetric power of ker(gamma.p - m).

Deliberately avoids the field-function machinery: it only needs the gamma
matrices, a 4x4 kernel and explicit tensor products.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Sequence

from .clifford import GammaBasis, SpinorMatrix
from .exact import CRational, ZERO
from .linsys import ExactMatrix, RowSpace, nullspace
from .multispinor import SIZE, flat_index


def dirac_kernel(basis: GammaBasis, p: Sequence, m) -> list[list[CRational]]:
    """Basis of {u in C^4 : (gamma.p - m) u = 0}."""
    pc = [CRational.coerce(Fraction(x)) for x in p]
    op = basis.slash(pc) - SpinorMatrix.identity().scale(CRational.coerce(Fraction(m)))
    return nullspace(ExactMatrix(op.rows))


def symmetric_power(vectors: Sequence[Sequence[CRational]], rank: int = 4) -> RowSpace:
    """Span of the symmetrized products u_i1 (x) ... (x) u_irank, as a space of 256-vectors."""
    space = RowSpace(SIZE)
    for combo in itertools.combinations_with_replacement(range(len(vectors)), rank):
        acc: dict[int, CRational] = {}
        for perm in set(itertools.permutations(combo)):
            us = [vectors[i] for i in perm]
            for a, b, c, d in itertools.product(range(4), repeat=4):
                x = us[0][a] * us[1][b] * us[2][c] * us[3][d]
                if x:
                    k = flat_index(a, b, c, d)
                    acc[k] = acc.get(k, ZERO) + x
        space.add({k: v for k, v in acc.items() if v})
    return space


def onshell_space(basis: GammaBasis, p: Sequence, m) -> RowSpace:
    return symmetric_power(dirac_kernel(basis, p, m))


def same_span(a: RowSpace, b: RowSpace) -> bool:
    return a.rank == b.rank and all(a.contains(r) for r in b.reduced_rows())
