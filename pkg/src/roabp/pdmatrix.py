"""Coefficient-matrix machinery for bivariate polynomials.

The partial derivative matrix of a bivariate f with individual degree at
most d is the (d+1) x (d+1) matrix M(i, j) = coeff of x1^i x2^j.  Its rank
never exceeds the width of a program computing f, and the top nonzero
diagonal together with the binomial matrix below is what makes the
(t^w, t^w + t^{w-1}) substitution preserve nonzeroness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .algebra import Field, SparseMultiPoly
from .errors import ShapeError


@dataclass(frozen=True)
class PartialDerivMatrix:
    field: Field
    d: int
    rows: tuple  # (d+1) rows of (d+1) residues

    def __post_init__(self):
        if len(self.rows) != self.d + 1 or any(len(r) != self.d + 1 for r in self.rows):
            raise ShapeError("expected a (d+1) x (d+1) matrix")

    def entry(self, i: int, j: int) -> int:
        return self.rows[i][j]

    @property
    def is_zero(self) -> bool:
        return all(not any(r) for r in self.rows)


def pdm(f: SparseMultiPoly, d: int) -> PartialDerivMatrix:
    """Exact coefficient matrix of a bivariate polynomial; zero f gives zero."""
    if f.n != 2:
        raise ShapeError("partial derivative matrix is defined for two variables")
    if not f.is_zero and f.individual_degree > d:
        raise ShapeError(
            "individual degree %d exceeds the declared bound %d" % (f.individual_degree, d)
        )
    rows = [[0] * (d + 1) for _ in range(d + 1)]
    for (i, j), c in f.terms.items():
        rows[i][j] = c
    return PartialDerivMatrix(f.field, d, tuple(tuple(r) for r in rows))


def top_diagonal(m: PartialDerivMatrix):
    """Highest k with a nonzero entry on {i + j = k}, and those cells.

    Cells are (i, j, value) sorted by j ascending.  Their count is at most
    the matrix rank: rows holding them are linearly independent because
    everything above the diagonal is zero.
    """
    if m.is_zero:
        raise ValueError("top diagonal of the zero matrix is undefined")
    ell = max(i + j for i in range(m.d + 1) for j in range(m.d + 1) if m.rows[i][j])
    cells = [
        (ell - j, j, m.rows[ell - j][j])
        for j in range(m.d + 1)
        if 0 <= ell - j <= m.d and m.rows[ell - j][j]
    ]
    return ell, cells


def binomial_matrix(field: Field, j_list, w: int):
    """|j_list| x w matrix with entry (a, b) = binom(j_a, b) reduced mod p.

    Binomials are computed over the integers first, so a small
    characteristic genuinely can break invertibility (binom(2,1) = 2
    vanishes mod 2) instead of being masked by modular factorials.
    """
    j_list = list(j_list)
    if len(set(j_list)) != len(j_list):
        raise ValueError("j values must be distinct")
    if any(j < 0 for j in j_list):
        raise ValueError("j values must be non-negative")
    p = field.p
    return [[math.comb(j, b) % p for b in range(w)] for j in j_list]
