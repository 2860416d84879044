"""
The GKM criterion for cohomogeneity-one diagrams.

A diagram is GKM exactly when one singular isotropy group has full rank,
rank H = rank G - 1, and no root of G vanishes on t∩h. ``direct_weight_check``
recomputes the answer from the isotropy weights at the base fixed point and is
kept as an independent oracle.
"""
import dataclasses
import logging
from typing import List, Optional, Tuple

from models.diagram import GroupDiagram, HomogeneousSpace
from models.verdict import GkmVerdict, RankCondition, RootCondition
from services.diagram import lambda_weight, weyl_group_of
from services.errors import NotSubgroup, NotSubsystem, RankMismatch
from services.ratlin import Covector, as_ints, evaluate, format_covector, primitive_covector, proportional, sign_normalize
from services.weyl import orbit

logger = logging.getLogger(__name__)


def orient(d: GroupDiagram) -> Tuple[GroupDiagram, bool]:
    """Return the diagram with K+ a full-rank side, and whether K+/K- were exchanged."""
    if d.Kplus.full_rank or not d.Kminus.full_rank:
        return d, False
    return dataclasses.replace(d, Kplus=d.Kminus, Kminus=d.Kplus), True


def condition_rank(d: GroupDiagram) -> RankCondition:
    o, _ = orient(d)
    rank_h = o.H.torus_span.dim
    holds = o.Kplus.full_rank and rank_h == o.rank - 1
    return RankCondition(
        holds=holds,
        kplus_full_rank=o.Kplus.full_rank,
        kminus_full_rank=o.Kminus.full_rank,
        rank_g=o.rank,
        rank_h=rank_h,
        rank_kplus=o.side_rank(o.Kplus),
        rank_kminus=o.side_rank(o.Kminus),
    )


def _offending(roots: List[Covector]) -> List[List[int]]:
    return [as_ints(v) for v in sorted({sign_normalize(v) for v in roots})]


def condition_roots(d: GroupDiagram) -> RootCondition:
    """Roots of G vanishing identically on t∩h; a zero t∩h makes every root vanish."""
    basis = d.H.torus_span.basis
    vanishing = [alpha for alpha in d.G.roots if all(evaluate(alpha, v) == 0 for v in basis)]
    return RootCondition(holds=not vanishing, offending_roots=_offending(vanishing))


def condition_roots_via_lambda(d: GroupDiagram) -> RootCondition:
    """Same condition on corank-one data: no root of G is proportional to lambda."""
    lam = lambda_weight(d)
    parallel = [alpha for alpha in d.G.roots if proportional(alpha, lam)]
    return RootCondition(holds=not parallel, offending_roots=_offending(parallel))


def euler_characteristic(d: GroupDiagram, cap: Optional[int] = None) -> int:
    sides = [side for side in (d.Kplus, d.Kminus) if side.full_rank]
    if not sides:
        raise RankMismatch(f"{d.name}: neither singular isotropy group has full rank")
    WG = weyl_group_of(d.G, d.gram, cap)
    chi = 0
    for side in sides:
        WK = weyl_group_of(side, d.gram, cap)
        if WG.order % WK.order:
            raise NotSubgroup(f"{d.name}: |W(K)| = {WK.order} does not divide |W(G)| = {WG.order}")
        chi += WG.order // WK.order
    return chi


def gkm_verdict(d: GroupDiagram, cap: Optional[int] = None) -> GkmVerdict:
    o, swapped = orient(d)
    rank_c = condition_rank(o)
    roots_c = condition_roots(o)
    is_gkm = rank_c.holds and roots_c.holds

    if not is_gkm:
        case_tag = "NotGkm"
    elif o.Kminus.full_rank:
        case_tag = "Case1"
    else:
        case_tag = "Case2"

    try:
        lam = as_ints(lambda_weight(o))
    except RankMismatch:
        lam = None

    messages = []
    if swapped:
        messages.append("K+ and K- exchanged so that K+ has full rank")
    if not rank_c.holds:
        messages.append(f"rank condition fails: rank H = {rank_c.rank_h}, rank G = {rank_c.rank_g}")
    if roots_c.offending_roots:
        listed = ", ".join(format_covector(v) for v in roots_c.offending_roots)
        messages.append(f"roots vanishing on t∩h: {listed}")

    verdict = GkmVerdict(
        name=d.name,
        condition_rank=rank_c,
        condition_roots=roots_c,
        is_gkm=is_gkm,
        case_tag=case_tag,
        lambda_=lam,
        euler=euler_characteristic(o, cap) if is_gkm else None,
        swapped=swapped,
        messages=messages,
    )
    logger.info(f"{d.name}: {verdict.summary()}")
    return verdict


def direct_weight_check(d: GroupDiagram, cap: Optional[int] = None) -> bool:
    """
    Pairwise independence of the isotropy weights at the base fixed point.

    Tangential weights are the roots of G not in K+, normal weights the
    W(K+)-orbit of lambda. With dimensions the number of normal classes must be
    (dim K+ - dim H + 1) / 2; without them no normal class may be proportional to
    a root of K+.
    """
    o, _ = orient(d)
    if not o.Kplus.full_rank:
        return False
    lam = lambda_weight(o)
    WK = weyl_group_of(o.Kplus, o.gram, cap)

    tangential = sorted({sign_normalize(alpha) for alpha in o.G.roots if alpha not in o.Kplus.roots})
    normal = sorted({sign_normalize(w) for w in orbit(WK, lam)})
    lines = {primitive_covector(v) for v in tangential + normal}
    if len(lines) != len(tangential) + len(normal):
        return False

    if o.Kplus.dim is not None and o.H.dim is not None:
        slice_dim = o.Kplus.dim - o.H.dim + 1
        return slice_dim % 2 == 0 and len(normal) == slice_dim // 2
    return not any(proportional(v, alpha) for v in normal for alpha in o.Kplus.roots)


def homogeneous_verdict(h: HomogeneousSpace, cap: Optional[int] = None) -> GkmVerdict:
    if not h.K.roots.issubset(h.G.roots):
        missing = ", ".join(format_covector(v) for v in h.K.roots.difference(h.G.roots))
        raise NotSubsystem(f"{h.name}: roots of K missing from G: {missing}")
    WG = weyl_group_of(h.G, h.gram, cap)
    WK = weyl_group_of(h.K, h.gram, cap)
    if not WK.is_subgroup_of(WG):
        raise NotSubgroup(f"{h.name}: W(K) is not contained in W(G)")
    verdict = GkmVerdict(
        name=h.name,
        condition_rank=RankCondition(holds=True, kplus_full_rank=True, kminus_full_rank=True, rank_g=h.rank),
        condition_roots=RootCondition(holds=True),
        is_gkm=True,
        case_tag="Homogeneous",
        euler=WG.order // WK.order,
    )
    logger.info(f"{h.name}: {verdict.summary()}")
    return verdict
