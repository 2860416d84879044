"""
Root systems and finite reflection groups acting on t*.

Groups are closed breadth-first on the permutation representation they
induce on a finite, generator-stable set of covectors spanning t* (the orbit
of the coordinate basis); products of permutations are integer tuple lookups,
and matrices are recovered from the images of the basis at the end.
"""
import logging
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Dict, FrozenSet, List, Literal, Mapping, Optional, Sequence, Tuple

from sympy import ZZ, Rational
from sympy import Matrix as SymMatrix

from config import get_settings
from services.errors import (
    DimensionMismatch,
    GroupTooLarge,
    NotOrthogonal,
    NotSubgroup,
    SchemaError,
    UnsupportedRank,
    ZeroVector,
)
from services.ratlin import (
    Covector,
    Matrix,
    check_square,
    determinant,
    evaluate,
    format_covector,
    identity,
    is_zero,
    mat_mul,
    mat_vec,
    primitive_covector,
    sign_normalize,
    transpose,
    unit,
)

logger = logging.getLogger(__name__)

Family = Literal["A", "B", "C", "D", "G2", "F4", "U", "torus"]


@dataclass(frozen=True)
class GramForm:
    matrix: Matrix

    def __post_init__(self):
        r = len(self.matrix)
        check_square(self.matrix, r)
        if self.matrix != transpose(self.matrix):
            raise SchemaError("Gram form must be symmetric")
        for k in range(1, r + 1):
            minor = tuple(row[:k] for row in self.matrix[:k])
            if determinant(minor) <= 0:
                raise SchemaError(f"Gram form is not positive definite (leading minor {k})")

    @classmethod
    def identity(cls, r: int) -> "GramForm":
        return cls(matrix=identity(r))

    @property
    def rank(self) -> int:
        return len(self.matrix)

    def inner(self, a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
        return evaluate(a, mat_vec(self.matrix, b))

    def preserved_by(self, m: Matrix) -> bool:
        return mat_mul(mat_mul(transpose(m), self.matrix), m) == self.matrix


@dataclass(frozen=True)
class RootSet:
    rank: int
    roots: Tuple[Covector, ...] = ()

    @classmethod
    def build(cls, rank: int, roots) -> "RootSet":
        vectors = [tuple(Fraction(c) for c in root) for root in roots]
        for v in vectors:
            if len(v) != rank:
                raise DimensionMismatch(f"Root {[str(c) for c in v]} does not have length {rank}")
            if is_zero(v):
                raise SchemaError("The zero covector is not a root")
            if any(c.denominator != 1 for c in v):
                raise SchemaError(f"Root {v} is not integral")
        unique = set(vectors)
        if len(unique) != len(vectors):
            raise SchemaError("Root list contains duplicates")
        for v in unique:
            if tuple(-c for c in v) not in unique:
                raise SchemaError(f"Root set is not closed under negation: missing -{format_covector(v)}")
        return cls(rank=rank, roots=tuple(sorted(unique)))

    def __len__(self) -> int:
        return len(self.roots)

    def __iter__(self):
        return iter(self.roots)

    def __contains__(self, v) -> bool:
        return tuple(v) in self.root_set

    @cached_property
    def root_set(self) -> FrozenSet[Covector]:
        return frozenset(self.roots)

    def positive(self) -> Tuple[Covector, ...]:
        """One representative per ± pair, first nonzero coordinate positive."""
        return tuple(sorted({sign_normalize(v) for v in self.roots}))

    def issubset(self, other: "RootSet") -> bool:
        return self.root_set <= other.root_set

    def difference(self, other: "RootSet") -> "RootSet":
        return RootSet(rank=self.rank, roots=tuple(v for v in self.roots if v not in other.root_set))


@dataclass(frozen=True, eq=False)
class WeylGroup:
    rank: int
    gram: GramForm
    generators: Tuple[Matrix, ...]
    generator_names: Tuple[str, ...]
    elements: Tuple[Matrix, ...]
    words: Mapping[Matrix, Tuple[int, ...]] = field(default_factory=dict, repr=False)

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def identity(self) -> Matrix:
        return identity(self.rank)

    @cached_property
    def element_set(self) -> FrozenSet[Matrix]:
        return frozenset(self.elements)

    def __contains__(self, m) -> bool:
        return m in self.element_set

    def is_subgroup_of(self, other: "WeylGroup") -> bool:
        return self.element_set <= other.element_set

    def same_elements(self, other: "WeylGroup") -> bool:
        return self.element_set == other.element_set

    def word(self, m: Matrix) -> Optional[str]:
        """Generator word of an element, ``e`` for the identity."""
        letters = self.words.get(m)
        if letters is None:
            return None
        if not letters:
            return "e"
        return "·".join(self.generator_names[k] for k in letters)


@dataclass(frozen=True, eq=False)
class CosetSpace:
    ambient: WeylGroup
    subgroup: WeylGroup
    representatives: Tuple[Matrix, ...]
    assignment: Mapping[Matrix, int] = field(repr=False, default_factory=dict)

    def __len__(self) -> int:
        return len(self.representatives)

    def index_of(self, m: Matrix) -> int:
        return self.assignment[m]

    def members(self, i: int) -> List[Matrix]:
        return sorted(m for m, j in self.assignment.items() if j == i)


def reflection_matrix(alpha: Sequence[Fraction], gram: GramForm) -> Matrix:
    """sigma_alpha(beta) = beta - 2 (beta, alpha) / (alpha, alpha) * alpha."""
    alpha = tuple(Fraction(c) for c in alpha)
    if len(alpha) != gram.rank:
        raise DimensionMismatch(f"Root of length {len(alpha)} in rank {gram.rank}")
    if is_zero(alpha):
        raise ZeroVector("Cannot reflect in the zero covector")
    b_alpha = mat_vec(gram.matrix, alpha)
    norm = evaluate(alpha, b_alpha)
    r = gram.rank
    return tuple(
        tuple((Fraction(1) if i == j else Fraction(0)) - 2 * alpha[i] * b_alpha[j] / norm for j in range(r))
        for i in range(r)
    )


def generate_group(
    generators: Sequence[Matrix],
    gram: GramForm,
    cap: Optional[int] = None,
    names: Optional[Sequence[str]] = None,
) -> WeylGroup:
    """Breadth-first closure of the generators; words are shortest in BFS order."""
    r = gram.rank
    cap = cap if cap is not None else get_settings().gen_cap
    generators = tuple(generators)
    for g in generators:
        check_square(g, r)
        if not gram.preserved_by(g):
            raise NotOrthogonal(f"Generator {g} does not preserve the Gram form")
    names = tuple(names) if names is not None else tuple(f"g{k}" for k in range(1, len(generators) + 1))

    points: List[Covector] = []
    index: Dict[Covector, int] = {}
    pending = deque()

    def add_point(p: Covector) -> None:
        if p in index:
            return
        if len(points) >= cap * max(r, 1):
            raise GroupTooLarge(f"Orbit of the coordinate basis exceeds {cap * max(r, 1)} covectors")
        index[p] = len(points)
        points.append(p)
        pending.append(p)

    for j in range(r):
        add_point(unit(j, r))
    while pending:
        p = pending.popleft()
        for g in generators:
            add_point(mat_vec(g, p))

    perms = [tuple(index[mat_vec(g, p)] for p in points) for g in generators]
    start = tuple(range(len(points)))
    words: Dict[Tuple[int, ...], Tuple[int, ...]] = {start: ()}
    queue = deque([start])
    while queue:
        current = queue.popleft()
        for k, perm in enumerate(perms):
            product = tuple(current[i] for i in perm)
            if product not in words:
                if len(words) >= cap:
                    raise GroupTooLarge(f"Group closure exceeds the cap of {cap} elements")
                words[product] = words[current] + (k,)
                queue.append(product)

    basis_index = [index[unit(j, r)] for j in range(r)]
    by_matrix: Dict[Matrix, Tuple[int, ...]] = {}
    for perm, word in words.items():
        columns = [points[perm[basis_index[j]]] for j in range(r)]
        by_matrix[tuple(tuple(columns[j][i] for j in range(r)) for i in range(r))] = word

    logger.debug(f"Generated group of order {len(by_matrix)} from {len(generators)} generators")
    return WeylGroup(
        rank=r,
        gram=gram,
        generators=generators,
        generator_names=names,
        elements=tuple(sorted(by_matrix)),
        words=by_matrix,
    )


@lru_cache(maxsize=256)
def has_finite_order(m: Matrix) -> bool:
    """
    An orthogonal rational matrix has finite order exactly when its characteristic
    polynomial has integer coefficients and splits into cyclotomic factors.
    """
    poly = SymMatrix([[Rational(x.numerator, x.denominator) for x in row] for row in m]).charpoly()
    if not all(c.is_Integer for c in poly.all_coeffs()):
        return False
    _, factors = poly.set_domain(ZZ).factor_list()
    return all((f.degree() == 1 and abs(f.TC()) == 1) or f.is_cyclotomic for f, _ in factors)


@lru_cache(maxsize=256)
def _cached_group(generators: Tuple[Matrix, ...], gram: GramForm, cap: int, names: Tuple[str, ...]) -> WeylGroup:
    return generate_group(generators, gram, cap, names)


def weyl_from_generators(generators: Sequence[Matrix], gram: GramForm, cap: Optional[int] = None) -> WeylGroup:
    cap = cap if cap is not None else get_settings().gen_cap
    generators = tuple(generators)
    names = tuple(f"g{k}" for k in range(1, len(generators) + 1))
    for name, g in zip(names, generators):
        check_square(g, gram.rank)
        if gram.preserved_by(g) and not has_finite_order(g):
            raise GroupTooLarge(f"Generator {name} has infinite order")
    return _cached_group(generators, gram, cap, names)


def weyl_from_roots(roots: RootSet, gram: GramForm, cap: Optional[int] = None) -> WeylGroup:
    """Weyl group generated by the reflections in the given roots."""
    if roots.rank != gram.rank:
        raise DimensionMismatch(f"Roots of rank {roots.rank} with a Gram form of rank {gram.rank}")
    cap = cap if cap is not None else get_settings().gen_cap
    generators: List[Matrix] = []
    names: List[str] = []
    for alpha in sorted(roots.positive(), reverse=True):
        sigma = reflection_matrix(alpha, gram)
        if sigma not in generators:
            generators.append(sigma)
            names.append(f"s[{format_covector(primitive_covector(alpha))}]")
    group = _cached_group(tuple(generators), gram, cap, tuple(names))
    logger.debug(f"Weyl group of {len(roots)} roots in rank {roots.rank} has order {group.order}")
    return group


def subgroup_from_elements(ambient: WeylGroup, elements: Sequence[Matrix]) -> WeylGroup:
    members = tuple(sorted(set(elements)))
    return WeylGroup(
        rank=ambient.rank,
        gram=ambient.gram,
        generators=tuple(m for m in members if m != ambient.identity),
        generator_names=tuple(f"h{k}" for k in range(1, len(members))),
        elements=members,
        words={m: ambient.words[m] for m in members if m in ambient.words},
    )


def trivial_group(gram: GramForm) -> WeylGroup:
    e = identity(gram.rank)
    return WeylGroup(rank=gram.rank, gram=gram, generators=(), generator_names=(), elements=(e,), words={e: ()})


def coset_space(W: WeylGroup, Wsub: WeylGroup) -> CosetSpace:
    """Left cosets w Wsub; each represented by its lex-minimal element, ordered by representative."""
    if not Wsub.is_subgroup_of(W):
        raise NotSubgroup(f"Group of order {Wsub.order} is not contained in the group of order {W.order}")
    assignment: Dict[Matrix, int] = {}
    representatives: List[Matrix] = []
    for w in W.elements:
        if w in assignment:
            continue
        i = len(representatives)
        representatives.append(w)
        for h in Wsub.elements:
            assignment[mat_mul(w, h)] = i
    if len(representatives) * Wsub.order != W.order:
        raise NotSubgroup("Cosets do not partition the ambient group")
    logger.debug(f"{len(representatives)} cosets of a subgroup of order {Wsub.order} in order {W.order}")
    return CosetSpace(ambient=W, subgroup=Wsub, representatives=tuple(representatives), assignment=assignment)


def orbit(W: WeylGroup, lam: Sequence[Fraction]) -> FrozenSet[Covector]:
    lam = tuple(Fraction(c) for c in lam)
    return frozenset(mat_vec(w, lam) for w in W.elements)


def stabilizer_mod_sign(W: WeylGroup, lam: Sequence[Fraction]) -> WeylGroup:
    """Elements w with w.lam = +lam or -lam."""
    lam = tuple(Fraction(c) for c in lam)
    if is_zero(lam):
        raise ZeroVector("Stabilizer of the zero covector is not a line stabilizer")
    negated = tuple(-c for c in lam)
    members = [w for w in W.elements if mat_vec(w, lam) in (lam, negated)]
    return subgroup_from_elements(W, members)


def _signed_pairs(n: int) -> List[Tuple[int, ...]]:
    roots = []
    for i in range(n):
        for j in range(i + 1, n):
            for si in (1, -1):
                for sj in (1, -1):
                    v = [0] * n
                    v[i], v[j] = si, sj
                    roots.append(tuple(v))
    return roots


def _multiples_of_units(n: int, factor: int) -> List[Tuple[int, ...]]:
    roots = []
    for i in range(n):
        for s in (factor, -factor):
            v = [0] * n
            v[i] = s
            roots.append(tuple(v))
    return roots


def _su_gram(n: int) -> Matrix:
    return tuple(
        tuple((Fraction(1) if i == j else Fraction(0)) - Fraction(1, n + 1) for j in range(n)) for i in range(n)
    )


_VALID_RANGE = {
    "A": lambda n: n >= 1,
    "B": lambda n: n >= 1,
    "C": lambda n: n >= 1,
    "D": lambda n: n >= 2,
    "U": lambda n: n >= 1,
    "torus": lambda n: n >= 1,
    "G2": lambda n: n == 2,
    "F4": lambda n: n == 4,
}


def standard_roots(family: Family, n: int, scale: int = 1) -> Tuple[RootSet, GramForm]:
    """
    Standard root system of a family with its recommended Gram form.

    A_n lives in n restricted coordinates of SU(n+1) (e_{n+1} = -sum e_i),
    U(n) in n coordinates, G2 in the SU(3) coordinates (long roots are the
    A2 roots), and F4 is doubled so that it is integral and stable under its
    own Weyl group.
    """
    if family not in _VALID_RANGE:
        raise UnsupportedRank(f"Unknown root system family {family!r}")
    if not _VALID_RANGE[family](n):
        raise UnsupportedRank(f"Family {family} does not support n={n}")
    if scale < 1:
        raise SchemaError(f"Root scale must be a positive integer, got {scale}")

    gram = identity(n)
    if family == "U":
        roots = [v for v in _signed_pairs(n) if sum(v) == 0]
    elif family == "A":
        roots = [v for v in _signed_pairs(n) if sum(v) == 0]
        for i in range(n):
            v = tuple(2 if k == i else 1 for k in range(n))
            roots.extend([v, tuple(-c for c in v)])
        gram = _su_gram(n)
    elif family == "B":
        roots = _signed_pairs(n) + _multiples_of_units(n, 1)
    elif family == "C":
        roots = _signed_pairs(n) + _multiples_of_units(n, 2)
    elif family == "D":
        roots = _signed_pairs(n)
    elif family == "G2":
        long_roots = [(1, -1), (1, 2), (2, 1)]
        short_roots = [(1, 0), (0, 1), (1, 1)]
        roots = []
        for v in long_roots + short_roots:
            roots.extend([v, tuple(-c for c in v)])
        gram = _su_gram(2)
    elif family == "F4":
        roots = [tuple(2 * c for c in v) for v in _signed_pairs(4) + _multiples_of_units(4, 1)]
        for signs in range(16):
            roots.append(tuple(-1 if signs >> k & 1 else 1 for k in range(4)))
    else:
        roots = []

    root_set = RootSet.build(n, [tuple(scale * c for c in v) for v in roots])
    return root_set, GramForm(matrix=tuple(tuple(Fraction(c) for c in row) for row in gram))
