"""The system-description file format: a JSON document with group, algebra,
action, and cocycle sections plus optional named elements.  Parsing yields a
validated system; every error carries the path of the offending field.

Complex numbers serialize as [re, im] pairs so the files stay valid JSON and
usable as cross-language golden fixtures.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .algebra import (AlgebraAction, AlgebraAutomorphism, CoeffAlgebra)
from .cocycles import TwistedSystem, TwoCocycle
from .crossed import CrossedElement
from .errors import DescriptionError
from .groups import Group

FORMAT_KEYS = ("group", "algebra", "action", "cocycle")


@dataclass
class SystemDescription:
    system: TwistedSystem
    elements: dict = field(default_factory=dict)    # name -> CrossedElement
    source: dict = field(default_factory=dict)      # canonical serialized form


def _need(section: dict, key: str, where: str):
    if key not in section:
        raise DescriptionError(f"missing required field {key!r}", where=where)
    return section[key]


def _as_complex(value, where: str) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if (isinstance(value, (list, tuple)) and len(value) == 2
            and all(isinstance(v, (int, float)) for v in value)):
        return complex(value[0], value[1])
    raise DescriptionError("expected a number or an [re, im] pair", where=where)


def _complex_pair(z: complex):
    return [float(z.real), float(z.imag)]


# -- section parsers ---------------------------------------------------------

def _parse_group(section, where="group") -> Group:
    if not isinstance(section, dict):
        raise DescriptionError("group section must be an object", where=where)
    kind = _need(section, "kind", where)
    if kind == "free":
        rank = _need(section, "rank", f"{where}.rank")
        if not isinstance(rank, int) or rank < 1:
            raise DescriptionError("rank must be a positive integer", where=f"{where}.rank")
        return Group.free(rank)
    if kind == "finite":
        if "moduli" in section:
            moduli = section["moduli"]
            if (not isinstance(moduli, list) or not moduli
                    or any(not isinstance(m, int) or m < 1 for m in moduli)):
                raise DescriptionError("moduli must be positive integers",
                                       where=f"{where}.moduli")
            return Group.cyclic_product(moduli)
        table = _need(section, "table", f"{where}.table")
        try:
            return Group.from_table(table, labels=section.get("labels"))
        except Exception as exc:
            raise DescriptionError(str(exc), where=f"{where}.table") from exc
    raise DescriptionError(f"unknown group kind {kind!r}", where=f"{where}.kind")


def _parse_algebra(section, where="algebra") -> CoeffAlgebra:
    if not isinstance(section, dict):
        raise DescriptionError("algebra section must be an object", where=where)
    kind = _need(section, "kind", where)
    if kind == "scalars":
        return CoeffAlgebra.scalars()
    if kind == "functions_on_set":
        size = _need(section, "size", f"{where}.size")
        if not isinstance(size, int) or size < 1:
            raise DescriptionError("size must be a positive integer", where=f"{where}.size")
        return CoeffAlgebra.functions_on_set(size)
    if kind == "matrix_blocks":
        dims = _need(section, "dims", f"{where}.dims")
        try:
            return CoeffAlgebra(dims)
        except Exception as exc:
            raise DescriptionError(str(exc), where=f"{where}.dims") from exc
    raise DescriptionError(f"unknown algebra kind {kind!r}", where=f"{where}.kind")


def _parse_action(section, group: Group, algebra: CoeffAlgebra,
                  where="action") -> AlgebraAction:
    if not isinstance(section, dict):
        raise DescriptionError("action section must be an object", where=where)
    kind = _need(section, "kind", where)
    if kind == "trivial":
        return AlgebraAction.trivial(group, algebra)
    if kind == "permutation":
        if not algebra.is_commutative:
            raise DescriptionError(
                "permutation actions act on commutative algebras", where=where)
        if group.kind == "finite":
            maps = _need(section, "per_element", f"{where}.per_element")
            if not isinstance(maps, list) or len(maps) != group.order:
                raise DescriptionError(
                    f"need one point map per group element ({group.order})",
                    where=f"{where}.per_element")
            auts = []
            for i, pm in enumerate(maps):
                try:
                    auts.append(AlgebraAutomorphism.from_point_permutation(algebra, pm))
                except Exception as exc:
                    raise DescriptionError(str(exc),
                                           where=f"{where}.per_element[{i}]") from exc
            try:
                return AlgebraAction(group, algebra, per_element=auts)
            except Exception as exc:
                raise DescriptionError(str(exc), where=where) from exc
        maps = _need(section, "per_generator", f"{where}.per_generator")
        if not isinstance(maps, list) or len(maps) != group.rank:
            raise DescriptionError(
                f"need one point map per free generator ({group.rank})",
                where=f"{where}.per_generator")
        auts = []
        for i, pm in enumerate(maps):
            try:
                auts.append(AlgebraAutomorphism.from_point_permutation(algebra, pm))
            except Exception as exc:
                raise DescriptionError(str(exc),
                                       where=f"{where}.per_generator[{i}]") from exc
        return AlgebraAction(group, algebra, per_generator=auts)
    raise DescriptionError(f"unknown action kind {kind!r}", where=f"{where}.kind")


def _parse_cocycle(section, group: Group, where="cocycle") -> TwoCocycle:
    if not isinstance(section, dict):
        raise DescriptionError("cocycle section must be an object", where=where)
    kind = _need(section, "kind", where)
    if kind == "trivial":
        return TwoCocycle(group, "trivial")
    if kind == "table":
        entries = _need(section, "entries", f"{where}.entries")
        if group.kind != "finite":
            raise DescriptionError("table cocycles require a finite group", where=where)
        if not isinstance(entries, list) or len(entries) != group.order:
            raise DescriptionError("entries must be an order x order grid",
                                   where=f"{where}.entries")
        grid = np.zeros((group.order, group.order), dtype=complex)
        for i, row in enumerate(entries):
            if not isinstance(row, list) or len(row) != group.order:
                raise DescriptionError("entries must be an order x order grid",
                                       where=f"{where}.entries[{i}]")
            for j, v in enumerate(row):
                grid[i, j] = _as_complex(v, f"{where}.entries[{i}][{j}]")
        return TwoCocycle(group, "table", table=grid)
    if kind == "bicharacter":
        if group.kind != "finite" or group.coords is None:
            raise DescriptionError(
                "bicharacter cocycles need a finite group built from moduli",
                where=where)
        matrix = _need(section, "matrix", f"{where}.matrix")
        root_order = _need(section, "root_order", f"{where}.root_order")
        try:
            return TwoCocycle(group, "bicharacter", matrix=matrix, root_order=root_order)
        except Exception as exc:
            raise DescriptionError(str(exc), where=where) from exc
    raise DescriptionError(f"unknown cocycle kind {kind!r}", where=f"{where}.kind")


def _parse_coefficient(value, algebra: CoeffAlgebra, where: str):
    """Scalar, [re, im] pair, or list of per-block matrices of pairs."""
    if isinstance(value, (int, float)):
        return algebra.scalar(complex(value))
    if (isinstance(value, list) and len(value) == 2
            and all(isinstance(v, (int, float)) for v in value)):
        return algebra.scalar(complex(value[0], value[1]))
    if isinstance(value, list):
        if len(value) != algebra.num_blocks:
            raise DescriptionError(
                f"need {algebra.num_blocks} coefficient blocks", where=where)
        blocks = []
        for b, (d, rows) in enumerate(zip(algebra.dims, value)):
            if not isinstance(rows, list) or len(rows) != d:
                raise DescriptionError(f"block {b} must be a {d}x{d} matrix",
                                       where=f"{where}[{b}]")
            m = np.zeros((d, d), dtype=complex)
            for r, row in enumerate(rows):
                if not isinstance(row, list) or len(row) != d:
                    raise DescriptionError(f"block {b} must be a {d}x{d} matrix",
                                           where=f"{where}[{b}][{r}]")
                for c, v in enumerate(row):
                    m[r, c] = _as_complex(v, f"{where}[{b}][{r}][{c}]")
            blocks.append(m)
        return algebra.element(blocks)
    raise DescriptionError("coefficient must be a scalar, pair, or block list",
                           where=where)


def _parse_element(terms, system: TwistedSystem, where: str) -> CrossedElement:
    if not isinstance(terms, list):
        raise DescriptionError("an element is a list of terms", where=where)
    parsed = []
    for i, term in enumerate(terms):
        w = f"{where}[{i}]"
        if not isinstance(term, dict):
            raise DescriptionError("a term is an object", where=w)
        if system.group.kind == "free":
            word = _need(term, "word", f"{w}.word")
            try:
                g = system.group.word(tuple((int(a), int(b)) for a, b in word))
            except Exception as exc:
                raise DescriptionError(str(exc), where=f"{w}.word") from exc
        else:
            idx = _need(term, "index", f"{w}.index")
            try:
                g = system.group.element(int(idx))
            except Exception as exc:
                raise DescriptionError(str(exc), where=f"{w}.index") from exc
        coeff = _parse_coefficient(term.get("coefficient", 1.0), system.algebra,
                                   f"{w}.coefficient")
        parsed.append((g, coeff))
    return CrossedElement.from_terms(system, parsed)


# -- top level ----------------------------------------------------------------

def parse_description(source, validate: bool = True) -> SystemDescription:
    """Parse a dict, JSON string, or file path into a validated system."""
    if isinstance(source, (str, Path)) and "{" not in str(source):
        path = Path(source)
        if not path.exists():
            raise DescriptionError(f"no such file: {path}", where="")
        text = path.read_text()
    elif isinstance(source, str):
        text = source
    else:
        text = None
    if text is not None:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DescriptionError(f"invalid JSON: {exc}", where="") from exc
    else:
        data = source
    if not isinstance(data, dict):
        raise DescriptionError("description must be a JSON object", where="")
    for key in FORMAT_KEYS:
        if key not in data:
            raise DescriptionError(f"missing section {key!r}", where=key)

    group = _parse_group(data["group"])
    algebra = _parse_algebra(data["algebra"])
    action = _parse_action(data["action"], group, algebra)
    cocycle = _parse_cocycle(data["cocycle"], group)
    system = TwistedSystem(group, algebra, action, cocycle, validate=validate)
    elements = {}
    for name, terms in (data.get("elements") or {}).items():
        elements[name] = _parse_element(terms, system, f"elements.{name}")
    desc = SystemDescription(system=system, elements=elements)
    desc.source = serialize_description(desc)
    return desc


def serialize_description(desc: SystemDescription) -> dict:
    """Canonical dict form; json.dumps(..., sort_keys=True) is byte-stable."""
    system = desc.system
    group = system.group
    if group.kind == "free":
        group_section = {"kind": "free", "rank": group.rank}
    elif getattr(group, "moduli", None) is not None:
        group_section = {"kind": "finite", "moduli": list(group.moduli)}
    else:
        group_section = {"kind": "finite", "table": group.table.tolist(),
                         "labels": list(group.labels)}

    algebra = system.algebra
    if algebra.dims == (1,):
        algebra_section = {"kind": "scalars"}
    elif algebra.is_commutative:
        algebra_section = {"kind": "functions_on_set", "size": algebra.num_blocks}
    else:
        algebra_section = {"kind": "matrix_blocks", "dims": list(algebra.dims)}

    action = system.action
    if action.is_trivial:
        action_section = {"kind": "trivial"}
    elif group.kind == "finite":
        action_section = {"kind": "permutation",
                          "per_element": [list(a.perm) for a in action.per_element]}
    else:
        action_section = {"kind": "permutation",
                          "per_generator": [list(a.perm) for a in action.per_generator]}

    cocycle = system.cocycle
    if cocycle.kind == "trivial":
        cocycle_section = {"kind": "trivial"}
    elif cocycle.kind == "table":
        cocycle_section = {"kind": "table",
                           "entries": [[_complex_pair(v) for v in row]
                                       for row in cocycle.table]}
    else:
        cocycle_section = {"kind": "bicharacter",
                           "matrix": cocycle.matrix.tolist(),
                           "root_order": cocycle.root_order}

    elements_section = {}
    for name, x in desc.elements.items():
        terms = []
        keyfn = (lambda g: (g.word_length(), repr(g))) if group.kind == "free" \
            else (lambda g: g.index)
        for g in sorted(x.coeffs, key=keyfn):
            a = x.coeffs[g]
            term = ({"word": [[gen, exp] for gen, exp in g.blocks]}
                    if group.kind == "free" else {"index": g.index})
            term["coefficient"] = [[[_complex_pair(v) for v in row]
                                    for row in block] for block in a.blocks]
            terms.append(term)
        elements_section[name] = terms

    out = {"group": group_section, "algebra": algebra_section,
           "action": action_section, "cocycle": cocycle_section}
    if elements_section:
        out["elements"] = elements_section
    return out


def to_json(desc: SystemDescription) -> str:
    return json.dumps(serialize_description(desc), sort_keys=True, indent=2) + "\n"
