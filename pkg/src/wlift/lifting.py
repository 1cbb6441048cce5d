"""Sparse lifting bases and the lift / adjoint pair.

A lifting basis is a family of N sparse d1 x d2 matrices {A_n}, each with
omega_n nonzeros all equal to 1/sqrt(omega_n), mutually orthogonal, with at
most one nonzero per column. The lift maps a length-N vector to
sum_n a_n * x_n * A_n; the adjoint inverts it coordinate-wise. A basis may
mark some cells as conjugating, in which case those cells carry conj(x_n)
and the lift is real-linear instead of complex-linear.

Patterns are kept as flat coordinate arrays grouped by element, so lift and
adjoint are plain fancy-indexing operations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

__all__ = [
    "LiftingBasis",
    "BasisReport",
    "hankel_basis",
    "double_hankel_basis",
    "make_basis",
    "lift",
    "adjoint",
    "validate_basis",
]


@dataclass(frozen=True)
class LiftingBasis:
    """Coordinate-form lifting basis.

    rows/cols/element are parallel flat arrays: entry j says element
    `element[j]` (0-based) has a nonzero at (rows[j], cols[j]) of value
    1/sqrt(omega) for that element. Entries are grouped by element;
    `offsets[n]:offsets[n+1]` slices element n's pattern.
    """

    structure: str
    n: int
    dims: Tuple[int, int]
    rows: np.ndarray
    cols: np.ndarray
    element: np.ndarray
    offsets: np.ndarray
    support_counts: np.ndarray  # omega_n
    coefficients: np.ndarray    # a_n
    conjugated: Optional[np.ndarray] = None  # flat mask of conjugating cells

    def pattern(self, n: int) -> Tuple[np.ndarray, np.ndarray]:
        """(rows, cols) of element n, 0-based n."""
        lo, hi = self.offsets[n], self.offsets[n + 1]
        return self.rows[lo:hi], self.cols[lo:hi]

    @property
    def entry_values(self) -> np.ndarray:
        """Flat nonzero values, aligned with rows/cols/element."""
        return 1.0 / np.sqrt(self.support_counts[self.element])

    def element_dense(self, n: int) -> np.ndarray:
        r, c = self.pattern(n)
        a = np.zeros(self.dims)
        a[r, c] = 1.0 / np.sqrt(self.support_counts[n])
        return a

    def descriptor(self) -> Tuple[str, int, int]:
        """(structure name, N, pencil) triple used in experiment configs."""
        return (self.structure, self.n, self.dims[0])


@dataclass(frozen=True)
class BasisReport:
    """Pass/fail per lifting-basis condition, with the first offender."""

    unit_frobenius: bool
    equal_positive_entries: bool
    orthogonal: bool
    column_sparsity: bool
    positive_coefficients: bool
    first_failure: Optional[Tuple[str, int]] = None

    @property
    def all_pass(self) -> bool:
        return (self.unit_frobenius and self.equal_positive_entries
                and self.orthogonal and self.column_sparsity
                and self.positive_coefficients)


def make_basis(structure: str, n: int, dims: Tuple[int, int],
               patterns: List[Tuple[np.ndarray, np.ndarray]],
               coefficients: np.ndarray,
               conjugated: Optional[np.ndarray] = None) -> LiftingBasis:
    """Assemble a basis from per-element (rows, cols) patterns.

    `conjugated`, when given, is a flat boolean mask (aligned with the
    concatenated patterns) marking cells that carry the conjugate of their
    coordinate instead of the coordinate itself.
    """
    counts = np.array([len(r) for r, _ in patterns], dtype=np.int64)
    if np.any(counts < 1):
        raise ValueError("every basis element needs a nonempty pattern")
    offsets = np.concatenate([[0], np.cumsum(counts)])
    rows = np.concatenate([r for r, _ in patterns]).astype(np.int64)
    cols = np.concatenate([c for _, c in patterns]).astype(np.int64)
    element = np.repeat(np.arange(n), counts)
    coeff = np.asarray(coefficients, dtype=float)
    if np.any(coeff <= 0):
        raise ValueError("lifting coefficients must be positive")
    if conjugated is not None:
        conjugated = np.asarray(conjugated, dtype=bool)
        if conjugated.shape != rows.shape:
            raise ValueError("conjugation mask must align with the patterns")
    return LiftingBasis(structure, n, dims, rows, cols, element, offsets,
                        counts, coeff, conjugated)


def _hankel_patterns(n: int, d: int) -> List[Tuple[np.ndarray, np.ndarray]]:
    d2 = n - d + 1
    pats = []
    for k in range(1, n + 1):  # 1-based element index, cells i + j - 1 = k
        i = np.arange(max(1, k - d2 + 1), min(d, k) + 1)
        pats.append((i - 1, k - i))
    return pats


def hankel_basis(n: int, pencil: int) -> LiftingBasis:
    """Hankel lifting basis of shape (d, N - d + 1).

    Element k occupies the antidiagonal i + j - 1 = k; a_k equals the square
    root of its support size, so the lift reproduces the plain Hankel matrix
    M[i, j] = x[i + j - 1].
    """
    if not 1 <= pencil <= n:
        raise ValueError(f"pencil must lie in [1, N], got {pencil} for N={n}")
    pats = _hankel_patterns(n, pencil)
    counts = np.array([len(r) for r, _ in pats], dtype=float)
    return make_basis("hankel", n, (pencil, n - pencil + 1), pats,
                      np.sqrt(counts))


def double_hankel_basis(n: int, pencil: int) -> LiftingBasis:
    """Double-Hankel basis: [H_d(x) | H_d(conj(reverse(x)))] as one lift.

    Element k collects its antidiagonal in the Hankel lift of x (columns
    1..N-d+1) plus the antidiagonal of x_k inside the Hankel lift of the
    conjugate-reversed vector (columns N-d+2..2(N-d+1)). The two blocks
    use disjoint columns, so the column-sparsity condition survives the
    union. Conjugating the reversal keeps the second block on the same
    exponential bases as the first (for unit-modulus bases the conjugate
    of z^-n is z^n), so the lifted rank stays at the component count
    instead of doubling; this is what makes the double structure complete
    better than the single one.
    """
    if not 1 <= pencil <= n:
        raise ValueError(f"pencil must lie in [1, N], got {pencil} for N={n}")
    d2h = n - pencil + 1
    fwd = _hankel_patterns(n, pencil)
    pats = []
    conj_chunks = []
    for k in range(1, n + 1):
        r1, c1 = fwd[k - 1]
        r2, c2 = fwd[n - k]  # x_k sits at position N + 1 - k of the reversal
        pats.append((np.concatenate([r1, r2]),
                     np.concatenate([c1, c2 + d2h])))
        conj_chunks.append(np.concatenate([np.zeros(r1.size, dtype=bool),
                                           np.ones(r2.size, dtype=bool)]))
    counts = np.array([len(r) for r, _ in pats], dtype=float)
    return make_basis("double-hankel", n, (pencil, 2 * d2h), pats,
                      np.sqrt(counts), np.concatenate(conj_chunks))


def lift(basis: LiftingBasis, x: np.ndarray) -> np.ndarray:
    """Apply the lifting operator: sum_n a_n * x_n * A_n."""
    x = np.asarray(x, dtype=complex)
    if x.shape != (basis.n,):
        raise ValueError(f"expected length-{basis.n} vector, got {x.shape}")
    m = np.zeros(basis.dims, dtype=complex)
    scale = basis.coefficients / np.sqrt(basis.support_counts)
    # patterns are pairwise disjoint, so plain assignment accumulates nothing
    vals = (scale * x)[basis.element]
    if basis.conjugated is not None:
        vals = np.where(basis.conjugated, np.conj(vals), vals)
    m[basis.rows, basis.cols] = vals
    return m


def adjoint(basis: LiftingBasis, m: np.ndarray) -> np.ndarray:
    """Apply the back projection: x_n = <A_n, M> / a_n."""
    m = np.asarray(m, dtype=complex)
    if m.shape != basis.dims:
        raise ValueError(f"expected {basis.dims} matrix, got {m.shape}")
    vals = m[basis.rows, basis.cols]
    if basis.conjugated is not None:
        vals = np.where(basis.conjugated, np.conj(vals), vals)
    acc = (np.bincount(basis.element, weights=vals.real, minlength=basis.n)
           + 1j * np.bincount(basis.element, weights=vals.imag,
                              minlength=basis.n))
    return acc / (basis.coefficients * np.sqrt(basis.support_counts))


def validate_basis(basis: LiftingBasis, tol: float = 1e-12) -> BasisReport:
    """Check the four lifting-basis conditions plus coefficient positivity.

    Failures never raise; they are recorded with the first offending
    element index (0-based).
    """
    first: Optional[Tuple[str, int]] = None

    def note(name: str, idx: int):
        nonlocal first
        if first is None:
            first = (name, idx)

    unit_frob = True
    equal_entries = True
    for k in range(basis.n):
        lo, hi = basis.offsets[k], basis.offsets[k + 1]
        omega = hi - lo
        if omega != basis.support_counts[k]:
            unit_frob = False
            note("unit_frobenius", k)
        # entries are 1/sqrt(omega) by construction; Frobenius norm is then
        # sqrt(omega * (1/omega)) = 1 whenever counts agree
        if omega < 1:
            equal_entries = False
            note("equal_positive_entries", k)

    # orthogonality: disjoint supports with equal-sign entries
    flat = basis.rows * basis.dims[1] + basis.cols
    orthogonal = True
    uniq, idx_first = np.unique(flat, return_index=True)
    if uniq.size != flat.size:
        orthogonal = False
        seen = np.zeros(basis.dims[0] * basis.dims[1], dtype=bool)
        for j, cell in enumerate(flat):
            if seen[cell]:
                note("orthogonal", int(basis.element[j]))
                break
            seen[cell] = True

    column_ok = True
    for k in range(basis.n):
        _, c = basis.pattern(k)
        if np.unique(c).size != c.size:
            column_ok = False
            note("column_sparsity", k)
            break

    coeff_ok = bool(np.all(basis.coefficients > 0))
    if not coeff_ok:
        note("positive_coefficients", int(np.argmax(basis.coefficients <= 0)))

    return BasisReport(unit_frob, equal_entries, orthogonal, column_ok,
                       coeff_ok, first)
