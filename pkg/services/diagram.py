"""
Group-diagram documents: parameter binding, schema validation, resolution of
constructor references into explicit root sets, structural validation and the
distinguished weight lambda.
"""
import json
import logging
import re
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

from pydantic import ValidationError

from models.diagram import (
    ConstructSpec,
    DiagramDocument,
    GroupDatum,
    GroupDiagram,
    GroupSpec,
    HomogeneousDocument,
    HomogeneousSpace,
    PrincipalSpec,
)
from models.report import ValidationReport
from services.errors import DimensionMismatch, GkmError, ParseError, RankMismatch, SchemaError
from services.ratlin import (
    Covector,
    Subspace,
    annihilator_line,
    block_embed,
    check_square,
    covector,
    format_covector,
    identity,
    matrix,
    pad,
    rat_json,
)
from services.weyl import (
    GramForm,
    RootSet,
    WeylGroup,
    has_finite_order,
    standard_roots,
    trivial_group,
    weyl_from_generators,
    weyl_from_roots,
)

logger = logging.getLogger(__name__)

PLACEHOLDER = re.compile(r"^(-?)\$([A-Za-z_][A-Za-z0-9_]*)$")


def load_json(text: str) -> Dict[str, Any]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"line {e.lineno}, column {e.colno}: {e.msg}")
    if not isinstance(doc, dict):
        raise SchemaError("Document must be a JSON object")
    return doc


def substitute_parameters(doc: Dict[str, Any], params: Optional[Mapping[str, int]] = None) -> Tuple[Dict[str, Any], Dict[str, int]]:
    """
    Replace "$name" / "-$name" strings by bound integers.

    Defaults come from the document's "parameters" object; caller bindings win.
    """
    defaults = doc.get("parameters", {})
    if not isinstance(defaults, dict) or not all(isinstance(v, int) and not isinstance(v, bool) for v in defaults.values()):
        raise SchemaError("parameters: expected an object of integers")
    bound = {**defaults, **dict(params or {})}

    def walk(value: Any, path: str) -> Any:
        if isinstance(value, str):
            match = PLACEHOLDER.match(value)
            if not match:
                return value
            sign, name = match.groups()
            if name not in bound:
                raise SchemaError(f"unbound parameter '{name}' at {path}")
            return -bound[name] if sign else bound[name]
        if isinstance(value, list):
            return [walk(item, f"{path}[{i}]") for i, item in enumerate(value)]
        if isinstance(value, dict):
            return {key: walk(item, f"{path}.{key}" if path else key) for key, item in value.items()}
        return value

    body = {key: value for key, value in doc.items() if key != "parameters"}
    resolved = walk(body, "")
    resolved["parameters"] = bound
    return resolved, bound


def _describe(error: ValidationError) -> str:
    first = error.errors()[0]
    path = ".".join(str(part) for part in first["loc"])
    return f"{path}: {first['msg']}" if path else first["msg"]


def _embed_construct(spec: ConstructSpec, r: int, path: str) -> Tuple[List[Covector], GramForm]:
    roots, gram = standard_roots(spec.family, spec.n, spec.scale)
    if spec.offset < 0 or spec.offset + roots.rank > r:
        raise DimensionMismatch(f"{path}: {spec.family}{spec.n} at offset {spec.offset} does not fit rank {r}")
    return [pad(v, spec.offset, r) for v in roots], gram


def _resolve_roots(spec: GroupSpec, r: int, path: str) -> RootSet:
    try:
        if spec.roots is not None:
            return RootSet.build(r, spec.roots)
        blocks = [spec.construct] if spec.construct is not None else list(spec.product or [])
        roots: List[Covector] = []
        for k, block in enumerate(blocks):
            embedded, _ = _embed_construct(block, r, f"{path}.product[{k}]" if spec.product else f"{path}.construct")
            roots.extend(embedded)
        return RootSet.build(r, roots)
    except GkmError as e:
        raise type(e)(f"{path}: {e}")


def _default_gram(spec: GroupSpec, r: int) -> GramForm:
    """Block-diagonal assembly of the constructor-recommended forms of G, identity elsewhere."""
    blocks = [spec.construct] if spec.construct is not None else list(spec.product or [])
    m = identity(r)
    for block in blocks:
        _, block_gram = standard_roots(block.family, block.n, block.scale)
        if block.offset < 0 or block.offset + block_gram.rank > r:
            continue
        m = block_embed(block_gram.matrix, block.offset, r, base=m)
    return GramForm(matrix=m)


def _resolve_span(vectors: Optional[List[List[int]]], r: int, path: str) -> Optional[Subspace]:
    if vectors is None:
        return None
    try:
        return Subspace(basis=tuple(covector(v) for v in vectors), ambient=r)
    except DimensionMismatch as e:
        raise DimensionMismatch(f"{path}: {e}")
    except RankMismatch:
        raise SchemaError(f"{path}: torus span vectors are linearly dependent")


def _resolve_generators(generators, r: int, path: str):
    if generators is None:
        return None
    resolved = []
    for k, rows in enumerate(generators):
        try:
            m = matrix(rows)
        except (TypeError, ValueError, ZeroDivisionError):
            raise SchemaError(f"{path}[{k}]: entries must be integers or 'p/q' strings")
        try:
            check_square(m, r)
        except DimensionMismatch as e:
            raise DimensionMismatch(f"{path}[{k}]: {e}")
        resolved.append(m)
    return tuple(resolved)


def _resolve_group(spec: GroupSpec, r: int, path: str) -> GroupDatum:
    return GroupDatum(
        roots=_resolve_roots(spec, r, path),
        full_rank=spec.full_rank,
        weyl_generators=_resolve_generators(spec.weyl_generators, r, f"{path}.weyl_generators"),
        torus_span=_resolve_span(spec.torus_span, r, f"{path}.torus_span"),
        dim=spec.dim,
        note=spec.note,
    )


def _resolve_principal(spec: PrincipalSpec, r: int) -> GroupDatum:
    return GroupDatum(
        roots=RootSet(rank=r),
        full_rank=False,
        weyl_generators=_resolve_generators(spec.weyl_generators, r, "H.weyl_generators"),
        torus_span=_resolve_span(spec.torus_span, r, "H.torus_span"),
        dim=spec.dim,
        note=spec.note,
    )


def _resolve_gram(raw, G: GroupSpec, r: int) -> GramForm:
    if raw is None:
        return _default_gram(G, r)
    try:
        m = matrix(raw)
    except (TypeError, ValueError, ZeroDivisionError):
        raise SchemaError("gram: entries must be integers or 'p/q' strings")
    try:
        check_square(m, r)
    except DimensionMismatch as e:
        raise DimensionMismatch(f"gram: {e}")
    return GramForm(matrix=m)


def _validated(model, doc: Dict[str, Any]):
    try:
        return model.model_validate(doc)
    except ValidationError as e:
        raise SchemaError(_describe(e))


def parse_diagram(text: str, params: Optional[Mapping[str, int]] = None) -> GroupDiagram:
    doc, bound = substitute_parameters(load_json(text), params)
    model: DiagramDocument = _validated(DiagramDocument, doc)
    r = model.rank
    diagram = GroupDiagram(
        name=model.name,
        rank=r,
        gram=_resolve_gram(model.gram, model.G, r),
        G=_resolve_group(model.G, r, "G"),
        Kplus=_resolve_group(model.Kplus, r, "Kplus"),
        Kminus=_resolve_group(model.Kminus, r, "Kminus"),
        H=_resolve_principal(model.H, r),
        parameters=tuple(sorted(bound.items())),
        notes=tuple(model.notes),
    )
    logger.info(f"Parsed diagram {diagram.name}: rank {r}, |roots G| = {len(diagram.G.roots)}")
    return diagram


def parse_homogeneous(text: str, params: Optional[Mapping[str, int]] = None) -> HomogeneousSpace:
    doc, bound = substitute_parameters(load_json(text), params)
    model: HomogeneousDocument = _validated(HomogeneousDocument, doc)
    r = model.rank
    space = HomogeneousSpace(
        name=model.name,
        rank=r,
        gram=_resolve_gram(model.gram, model.G, r),
        G=_resolve_group(model.G, r, "G"),
        K=_resolve_group(model.K, r, "K"),
        parameters=tuple(sorted(bound.items())),
        notes=tuple(model.notes),
    )
    if not space.G.full_rank or not space.K.full_rank:
        raise RankMismatch(f"{space.name}: K has smaller rank than G, so G/K has Euler characteristic 0")
    return space


def parse_document(text: str, params: Optional[Mapping[str, int]] = None) -> Union[GroupDiagram, HomogeneousSpace]:
    """Dispatch on the presence of "K" (homogeneous) versus K+ / K-."""
    if "K" in load_json(text):
        return parse_homogeneous(text, params)
    return parse_diagram(text, params)


def _group_json(datum: GroupDatum) -> Dict[str, Any]:
    out: Dict[str, Any] = {"roots": [[int(c) for c in v] for v in datum.roots]}
    if not datum.full_rank:
        out["full_rank"] = False
    if datum.weyl_generators is not None:
        out["weyl_generators"] = [[[rat_json(x) for x in row] for row in m] for m in datum.weyl_generators]
    if datum.torus_span is not None:
        out["torus_span"] = [[int(c) for c in v] for v in datum.torus_span.basis]
    if datum.dim is not None:
        out["dim"] = datum.dim
    if datum.note is not None:
        out["note"] = datum.note
    return out


def _principal_json(datum: GroupDatum) -> Dict[str, Any]:
    out = _group_json(datum)
    out.pop("roots")
    out.pop("full_rank", None)
    return out


def _header(name: str, rank: int, gram: GramForm, parameters, notes) -> Dict[str, Any]:
    return {
        "name": name,
        "rank": rank,
        "gram": [[rat_json(x) for x in row] for row in gram.matrix],
        "parameters": dict(parameters),
        "notes": list(notes),
    }


def serialize_diagram(d: GroupDiagram) -> str:
    doc = _header(d.name, d.rank, d.gram, d.parameters, d.notes)
    doc.update({"G": _group_json(d.G), "Kplus": _group_json(d.Kplus), "Kminus": _group_json(d.Kminus), "H": _principal_json(d.H)})
    return json.dumps(doc, indent=2)


def serialize_homogeneous(h: HomogeneousSpace) -> str:
    doc = _header(h.name, h.rank, h.gram, h.parameters, h.notes)
    doc.update({"G": _group_json(h.G), "K": _group_json(h.K)})
    return json.dumps(doc, indent=2)


def weyl_group_of(datum: GroupDatum, gram: GramForm, cap: Optional[int] = None) -> WeylGroup:
    """Explicit generators win; full-rank groups fall back to root reflections; otherwise trivial."""
    if datum.weyl_generators is not None:
        return weyl_from_generators(datum.weyl_generators, gram, cap)
    if datum.full_rank:
        return weyl_from_roots(datum.roots, gram, cap)
    return trivial_group(gram)


def lambda_weight(d: GroupDiagram) -> Covector:
    """Primitive sign-normalized covector whose kernel is t∩h."""
    span = d.H.torus_span
    if span.dim != d.rank - 1:
        raise RankMismatch(f"{d.name}: dim t∩h = {span.dim}, expected {d.rank - 1}")
    if span.dim == 0 and len(d.G.roots) > 0:
        raise RankMismatch(f"{d.name}: t∩h is trivial and every root of G vanishes on it")
    lam = annihilator_line(span, d.rank)
    logger.debug(f"{d.name}: lambda = {format_covector(lam)}")
    return lam


def _sides(d: GroupDiagram):
    return (("Kplus", d.Kplus), ("Kminus", d.Kminus))


def validate(d: GroupDiagram) -> ValidationReport:
    report = ValidationReport()
    r = d.rank

    for label, side in _sides(d):
        name = f"roots.{label}_in_G"
        if not side.full_rank:
            report.add(name, True, f"skipped: {label} is not of full rank")
            continue
        missing = [v for v in side.roots if v not in d.G.roots]
        report.add(name, not missing, ", ".join(format_covector(v) for v in missing) or "ok")

    groups = (("G", d.G), ("Kplus", d.Kplus), ("Kminus", d.Kminus), ("H", d.H))
    bad = [
        f"{label}.weyl_generators[{k}]"
        for label, datum in groups
        for k, m in enumerate(datum.weyl_generators or ())
        if not d.gram.preserved_by(m)
    ]
    report.add("gram.generators_preserved", not bad, ", ".join(bad) or "ok")

    infinite = [
        f"{label}.weyl_generators[{k}]"
        for label, datum in groups
        for k, m in enumerate(datum.weyl_generators or ())
        if d.gram.preserved_by(m) and not has_finite_order(m)
    ]
    report.add("weyl.generators_finite_order", not infinite, ", ".join(infinite) or "ok")

    # case 2: the non-full side needs explicit generators
    one_sided = sum(side.full_rank for _, side in _sides(d)) == 1
    absent = [label for label, side in _sides(d) if one_sided and not side.full_rank and side.weyl_generators is None]
    report.add(
        "weyl.kminus_generators_present",
        not absent,
        f"{', '.join(absent)} is not of full rank and needs weyl_generators" if absent else "ok",
    )

    if bad or infinite:
        report.add("weyl.generation", False, "skipped: unusable generators")
    else:
        try:
            WG = weyl_group_of(d.G, d.gram)
            WH = weyl_group_of(d.H, d.gram)
            for label, side in _sides(d):
                if side.full_rank:
                    continue
                WK = weyl_group_of(side, d.gram)
                report.add(f"weyl.{label}_in_G", WK.is_subgroup_of(WG), f"|W({label})| = {WK.order}")
                report.add(f"weyl.H_in_{label}", WH.is_subgroup_of(WK), f"|W(H)| = {WH.order}, |W({label})| = {WK.order}")
        except GkmError as e:
            report.add("weyl.generation", False, str(e))

    rank_h = d.H.torus_span.dim
    problems = []
    for label, side in _sides(d):
        k = d.side_rank(side)
        if side.full_rank or k is None:
            continue
        if k >= r:
            problems.append(f"{label} is declared not of full rank but has rank {k}")
        elif not rank_h <= k <= rank_h + 1:
            problems.append(f"rank {label} - rank H = {k - rank_h}, expected 0 or 1")
        if side.torus_span is not None and side.dim is not None and d.H.dim is not None:
            implied = rank_h + (side.dim - d.H.dim) % 2
            if implied != k:
                problems.append(f"rank {label} = {k}, but the sphere {label}/H of dimension {side.dim - d.H.dim} implies {implied}")
    ranks = ", ".join(f"rank {label} = {d.side_rank(side)}" for label, side in _sides(d))
    report.add("rank.bookkeeping", not problems, "; ".join(problems) or f"rank G = {r}, {ranks}, rank H = {rank_h}")

    for label, side in _sides(d):
        if not side.full_rank and side.torus_span is not None:
            inside = all(side.torus_span.contains(v) for v in d.H.torus_span.basis)
            report.add(f"rank.H_torus_in_{label}", inside, "t∩h must lie in the torus of the singular isotropy group")

    if d.H.dim is None or any(side.dim is None for _, side in _sides(d)):
        report.add("dims.sphere_codimension", True, "skipped: dims not supplied")
    else:
        gaps = {label: side.dim - d.H.dim for label, side in _sides(d)}
        report.add("dims.sphere_codimension", all(g >= 1 for g in gaps.values()), str(gaps))

    if d.manifold_dim is None:
        report.add("dims.manifold_even", True, "skipped: dims not supplied")
    else:
        report.add("dims.manifold_even", d.manifold_dim % 2 == 0, f"dim M = {d.manifold_dim}")

    wrong = [
        f"{label}: dim {datum.dim} != {r} + {len(datum.roots)}"
        for label, datum in groups[:3]
        if datum.full_rank and datum.dim is not None and datum.dim != r + len(datum.roots)
    ]
    report.add("dims.full_rank_identity", not wrong, "; ".join(wrong) or "ok")

    for check in report.failures():
        logger.warning(f"{d.name}: validation check {check.name} failed: {check.message}")
    return report

