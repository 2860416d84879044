"""
Additive equivariant cohomology of a GKM graph.

A class is a polynomial f_p on t per vertex with f_p - f_q divisible by the
label of every edge pq. Divisibility by a linear form is vanishing on its
kernel, so each degree is the solution space of a linear system built by
substituting a basis of ker(label) into the monomials.
"""
import logging
from fractions import Fraction
from itertools import combinations_with_replacement
from math import comb
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from sympy.polys.domains import QQ
from sympy.polys.rings import ring

from models.cohomology import BettiResult
from models.graph import GkmGraph
from models.report import ValidationReport
from services.errors import FormalityViolation
from services.ratlin import Covector, Vector, covector, kernel_basis, matrix_rank

logger = logging.getLogger(__name__)

KernelBasis = Callable[[Covector], Sequence[Vector]]
Exponents = Tuple[int, ...]


def default_kernel_basis(label: Covector) -> Sequence[Vector]:
    return kernel_basis([label], len(label)).basis


def monomials(r: int, d: int) -> List[Exponents]:
    """Exponent vectors of the degree-d monomials in r variables, in a fixed order."""
    out = []
    for combo in combinations_with_replacement(range(r), d):
        exps = [0] * r
        for i in combo:
            exps[i] += 1
        out.append(tuple(exps))
    return out


def _to_fraction(value) -> Fraction:
    return Fraction(int(value.numerator), int(value.denominator))


class EquivariantCohomology:
    """Degree-wise dimensions of H_T(M) read off a GKM graph."""

    def __init__(self, graph: GkmGraph, kernel_basis: Optional[KernelBasis] = None):
        self.graph = graph
        self.r = graph.rank
        self.kernel_basis = kernel_basis or default_kernel_basis
        self.index = {v.id: k for k, v in enumerate(graph.vertices)}
        self.edges = [(self.index[e.u], self.index[e.v], covector(e.label)) for e in graph.edges]
        self._restrictions: Dict[Covector, "_Restriction"] = {}

    def restriction(self, label: Covector) -> "_Restriction":
        if label not in self._restrictions:
            self._restrictions[label] = _Restriction(self.r, self.kernel_basis(label))
        return self._restrictions[label]

    def ht_dimension(self, d: int) -> int:
        if d < 0:
            return 0
        basis = monomials(self.r, d)
        width = len(basis)
        unknowns = len(self.graph.vertices) * width

        entries: Dict[Tuple[int, int], Fraction] = {}
        rows = 0
        for p, q, label in self.edges:
            restriction = self.restriction(label)
            row_of: Dict[Exponents, int] = {}
            for k, exps in enumerate(basis):
                for target, coeff in restriction.image(exps).items():
                    if target not in row_of:
                        row_of[target] = rows
                        rows += 1
                    row = row_of[target]
                    value = _to_fraction(coeff)
                    entries[(row, p * width + k)] = entries.get((row, p * width + k), Fraction(0)) + value
                    entries[(row, q * width + k)] = entries.get((row, q * width + k), Fraction(0)) - value

        dimension = unknowns - matrix_rank(entries, rows, unknowns)
        logger.debug(f"{self.graph.name}: degree {d}, {rows} conditions on {unknowns} unknowns, h = {dimension}")
        return dimension


class _Restriction:
    """Pull-back of polynomials on t along a parametrization of ker(label)."""

    def __init__(self, r: int, basis: Sequence[Vector]):
        self.dim = len(basis)
        if self.dim:
            self.ring, *ys = ring(",".join(f"y{j}" for j in range(1, self.dim + 1)), QQ)
            self.linear = [
                sum((QQ(b[i].numerator, b[i].denominator) * ys[j] for j, b in enumerate(basis)), self.ring.zero)
                for i in range(r)
            ]
        self._images: Dict[Exponents, object] = {}

    def image(self, exps: Exponents) -> Dict[Exponents, object]:
        """Coefficients of the restricted monomial, keyed by kernel-coordinate exponents."""
        if not self.dim:
            return {(): QQ(1)} if not any(exps) else {}
        return dict(self._poly(exps).items())

    def _poly(self, exps: Exponents):
        if exps in self._images:
            return self._images[exps]
        i = next((k for k, e in enumerate(exps) if e), None)
        if i is None:
            poly = self.ring.one
        else:
            lower = exps[:i] + (exps[i] - 1,) + exps[i + 1:]
            poly = self._poly(lower) * self.linear[i]
        self._images[exps] = poly
        return poly


def ht_dimension(g: GkmGraph, d: int, kernel_basis: Optional[KernelBasis] = None) -> int:
    return EquivariantCohomology(g, kernel_basis).ht_dimension(d)


def poincare_check(b: BettiResult, n: int, chi: int) -> ValidationReport:
    report = ValidationReport()
    betti = b.betti
    report.add("betti.nonnegative", all(x >= 0 for x in betti), str(betti))
    mirrored = [d for d in range(len(betti)) if betti[d] != betti[n - d]] if len(betti) == n + 1 else list(range(len(betti)))
    report.add("betti.poincare_duality", not mirrored, f"asymmetric at degrees {mirrored}" if mirrored else "ok")
    report.add("betti.euler_sum", sum(betti) == chi, f"Σ b = {sum(betti)}, χ = {chi}")
    report.add("betti.b0", bool(betti) and betti[0] == 1, f"b0 = {betti[0] if betti else None}")
    return report


def betti_numbers(
    g: GkmGraph, n: int, max_degree: Optional[int] = None, kernel_basis: Optional[KernelBasis] = None
) -> BettiResult:
    """
    Invert h_d = sum_i b_2i C(d - i + r - 1, r - 1) degree by degree.

    Degrees above n are computed up to ``max_degree`` (default n + 2) and must
    contribute nothing.
    """
    top = max(n, max_degree if max_degree is not None else n + 2)
    cohomology = EquivariantCohomology(g, kernel_basis)
    r = g.rank
    h: List[int] = []
    b: List[int] = []
    for d in range(top + 1):
        h.append(cohomology.ht_dimension(d))
        b.append(h[d] - sum(b[i] * comb(d - i + r - 1, r - 1) for i in range(d)))
        if b[d] < 0:
            raise FormalityViolation(f"{g.name}: b{2 * d} = {b[d]} is negative")

    excess = [d for d in range(n + 1, top + 1) if b[d]]
    if excess:
        raise FormalityViolation(f"{g.name}: nonzero Betti numbers above the top degree at {excess}")

    result = BettiResult(name=g.name, betti=b[: n + 1], ht_dims=h[: n + 1], r=r, n=n, max_degree=top)
    failures = poincare_check(result, n, len(g.vertices)).failures()
    if failures:
        raise FormalityViolation(f"{g.name}: " + "; ".join(f"{c.name}: {c.message}" for c in failures))
    logger.info(f"{g.name}: Betti numbers {result.betti}")
    return result
