"""
Exact rational linear algebra on ambient Cartan coordinates.

Scalars are ``Fraction`` values; covectors and vectors are tuples of them and
matrices are tuples of row tuples, so every value is immutable and hashable.
Row reduction is delegated to FLINT through python-flint.
"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from flint import fmpq, fmpq_mat

from services.errors import DimensionMismatch, RankMismatch, ZeroVector

logger = logging.getLogger(__name__)

Rat = Fraction
Covector = Tuple[Fraction, ...]
Vector = Tuple[Fraction, ...]
Matrix = Tuple[Tuple[Fraction, ...], ...]
RatLike = Union[int, str, Fraction]


def to_rat(value: RatLike) -> Fraction:
    """Parse an integer, a "p/q" string or a Fraction; floats are refused."""
    if isinstance(value, bool) or isinstance(value, float):
        raise TypeError(f"Refusing inexact scalar {value!r}")
    if isinstance(value, str):
        return Fraction(value.strip())
    return Fraction(value)


def covector(values: Iterable[RatLike]) -> Covector:
    return tuple(to_rat(v) for v in values)


def matrix(rows: Iterable[Iterable[RatLike]]) -> Matrix:
    return tuple(tuple(to_rat(v) for v in row) for row in rows)


def is_zero(v: Sequence[Fraction]) -> bool:
    return all(c == 0 for c in v)


def sign_normalize(v: Sequence[Fraction]) -> Covector:
    """Flip the sign so that the first nonzero coordinate is positive."""
    for c in v:
        if c != 0:
            return tuple(v) if c > 0 else tuple(-x for x in v)
    return tuple(v)


def evaluate(form: Sequence[Fraction], vector: Sequence[Fraction]) -> Fraction:
    if len(form) != len(vector):
        raise DimensionMismatch(f"Cannot pair length {len(form)} with length {len(vector)}")
    return sum((Fraction(a) * b for a, b in zip(form, vector)), Fraction(0))


def primitive_covector(v: Sequence[RatLike]) -> Covector:
    """Integral, coprime, sign-normalized representative of the line through v."""
    values = [to_rat(x) for x in v]
    if is_zero(values):
        raise ZeroVector("Cannot normalize the zero covector")
    scale = math.lcm(*(x.denominator for x in values))
    integral = [int(x * scale) for x in values]
    divisor = math.gcd(*integral)
    return sign_normalize(tuple(Fraction(x // divisor) for x in integral))


def proportional(a: Sequence[Fraction], b: Sequence[Fraction]) -> bool:
    if len(a) != len(b):
        raise DimensionMismatch(f"Cannot compare length {len(a)} with length {len(b)}")
    if is_zero(a) or is_zero(b):
        raise ZeroVector("Proportionality is undefined for the zero covector")
    return all(a[i] * b[j] == a[j] * b[i] for i in range(len(a)) for j in range(i + 1, len(a)))


def format_covector(v: Sequence[Fraction], symbol: str = "e") -> str:
    """Render a covector as a signed combination such as ``e1-2e2``."""
    parts: List[str] = []
    for i, c in enumerate(v, start=1):
        if c == 0:
            continue
        magnitude = abs(c)
        coefficient = "" if magnitude == 1 else str(magnitude)
        sign = "-" if c < 0 else ("+" if parts else "")
        parts.append(f"{sign}{coefficient}{symbol}{i}")
    return "".join(parts) if parts else "0"


@dataclass(frozen=True)
class Subspace:
    """Span of linearly independent vectors of t, with r = ambient rank."""

    basis: Tuple[Vector, ...]
    ambient: int

    def __post_init__(self):
        for v in self.basis:
            if len(v) != self.ambient:
                raise DimensionMismatch(f"Basis vector {v} does not have length {self.ambient}")
        if rank(self.basis, self.ambient) != len(self.basis):
            raise RankMismatch("Subspace basis vectors are linearly dependent")

    @property
    def dim(self) -> int:
        return len(self.basis)

    def contains(self, v: Sequence[Fraction]) -> bool:
        return rank(self.basis + (tuple(v),), self.ambient) == self.dim


def _to_fmpq(value: Fraction) -> fmpq:
    return fmpq(value.numerator, value.denominator)


def _from_fmpq(value) -> Fraction:
    return Fraction(int(value.p), int(value.q))


def _dense(rows: Sequence[Sequence[RatLike]], ncols: int) -> fmpq_mat:
    mat = fmpq_mat(len(rows), ncols)
    for i, row in enumerate(rows):
        if len(row) != ncols:
            raise DimensionMismatch(f"Row {i} has length {len(row)}, expected {ncols}")
        for j, value in enumerate(row):
            value = to_rat(value)
            if value != 0:
                mat[i, j] = _to_fmpq(value)
    return mat


def _pivots(reduced: fmpq_mat, nrows: int, ncols: int, rk: int) -> List[int]:
    zero = fmpq(0)
    pivot_cols = []
    for r in range(min(nrows, rk)):
        for c in range(ncols):
            if reduced[r, c] != zero:
                pivot_cols.append(c)
                break
    return pivot_cols


def rank(rows: Sequence[Sequence[RatLike]], ncols: int) -> int:
    if not rows:
        return 0
    _, rk = _dense(rows, ncols).rref()
    return int(rk)


def matrix_rank(entries: Mapping[Tuple[int, int], RatLike], nrows: int, ncols: int) -> int:
    """Rank of a sparse system given as {(row, col): value}."""
    if nrows == 0 or ncols == 0:
        return 0
    mat = fmpq_mat(nrows, ncols)
    for (i, j), value in entries.items():
        value = to_rat(value)
        if value != 0:
            mat[i, j] = _to_fmpq(value)
    _, rk = mat.rref()
    return int(rk)


def determinant(m: Matrix) -> Fraction:
    if not m:
        return Fraction(1)
    return _from_fmpq(_dense(m, len(m)).det())


def kernel_basis(rows: Sequence[Sequence[RatLike]], rank_: int) -> Subspace:
    """
    Basis of { v in t : <row, v> = 0 for every row }.

    One vector per free column of the reduced row-echelon form, each
    sign-normalized, in increasing free-column order.
    """
    for row in rows:
        if len(row) != rank_:
            raise DimensionMismatch(f"Row {tuple(row)} has length {len(row)}, expected rank {rank_}")
    if not rows:
        return Subspace(basis=tuple(unit(i, rank_) for i in range(rank_)), ambient=rank_)

    mat = _dense(rows, rank_)
    reduced, rk = mat.rref()
    pivot_cols = _pivots(reduced, len(rows), rank_, int(rk))
    pivot_set = set(pivot_cols)
    free_cols = [c for c in range(rank_) if c not in pivot_set]

    basis = []
    for free_col in free_cols:
        v = [Fraction(0)] * rank_
        v[free_col] = Fraction(1)
        for i, pivot_col in enumerate(pivot_cols):
            v[pivot_col] = -_from_fmpq(reduced[i, free_col])
        basis.append(sign_normalize(tuple(v)))
    return Subspace(basis=tuple(basis), ambient=rank_)


def annihilator_line(span: Subspace, rank_: int) -> Covector:
    """Primitive covector vanishing on a hyperplane of t."""
    if span.dim != rank_ - 1:
        raise RankMismatch(f"Annihilator line needs a subspace of dimension {rank_ - 1}, got {span.dim}")
    line = kernel_basis(span.basis, rank_)
    return primitive_covector(line.basis[0])


def unit(i: int, r: int) -> Covector:
    return tuple(Fraction(1) if j == i else Fraction(0) for j in range(r))


def identity(r: int) -> Matrix:
    return tuple(unit(i, r) for i in range(r))


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    columns = list(zip(*b))
    return tuple(tuple(sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in columns) for row in a)


def mat_vec(m: Matrix, v: Sequence[Fraction]) -> Covector:
    if m and len(m[0]) != len(v):
        raise DimensionMismatch(f"Matrix of width {len(m[0])} cannot act on length {len(v)}")
    return tuple(sum((x * y for x, y in zip(row, v)), Fraction(0)) for row in m)


def transpose(m: Matrix) -> Matrix:
    return tuple(zip(*m)) if m else m


def block_embed(block: Matrix, offset: int, r: int, base: Optional[Matrix] = None) -> Matrix:
    """Place a square block on the diagonal of an r x r matrix (identity unless a base is given)."""
    size = len(block)
    if offset < 0 or offset + size > r:
        raise DimensionMismatch(f"Block of size {size} at offset {offset} does not fit rank {r}")
    rows: List[List[Fraction]] = [list(row) for row in (base if base is not None else identity(r))]
    for i in range(size):
        for j in range(size):
            rows[offset + i][offset + j] = block[i][j]
    return tuple(tuple(row) for row in rows)


def pad(v: Sequence[Fraction], offset: int, r: int) -> Covector:
    if offset < 0 or offset + len(v) > r:
        raise DimensionMismatch(f"Covector of length {len(v)} at offset {offset} does not fit rank {r}")
    return tuple([Fraction(0)] * offset + list(v) + [Fraction(0)] * (r - offset - len(v)))


def rat_str(value: Fraction) -> str:
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def rat_json(value: Fraction) -> Union[int, str]:
    """Integers stay JSON numbers; other rationals become "p/q" strings."""
    return value.numerator if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def as_ints(v: Sequence[Fraction]) -> List[int]:
    out = []
    for c in v:
        if Fraction(c).denominator != 1:
            raise DimensionMismatch(f"Covector {tuple(v)} is not integral")
        out.append(int(c))
    return out


def check_square(m: Matrix, r: int) -> None:
    if len(m) != r or any(len(row) != r for row in m):
        raise DimensionMismatch(f"Matrix is not {r}x{r}")
