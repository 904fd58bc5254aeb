"""Command-line entry point.

Exit codes: 0 success; 2 validation or usage failure; 3 resource cap;
4 refutation (a certified analytic bound was violated numerically -- the
most serious signal this tool can emit, kept distinct from ordinary bugs).
"""

from __future__ import annotations

import argparse
import json
import sys

from .averaging import (REFUTATION_TOL, ph_average, pcom_average_checked,
                        steps_to_reach)
from .crossed import CrossedElement
from .description import parse_description
from .errors import (DescriptionError, RefutationError, ResourceError,
                     TwistlabError, UsageError)
from .groups import conjugate
from .powers import construct_pcom
from .rep import adaptive_norm_lower, ball_norm_lower
from .structure import (bijection_report, block_decompose, matrix_model,
                        orbit_decomposition, trace_correspondence)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_RESOURCE = 3
EXIT_REFUTATION = 4


def _fmt(v: float) -> str:
    return f"{v:.12g}"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="twistlab",
        description="computations on twisted crossed products described by a JSON file")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, element=False):
        sp.add_argument("input", help="system description file (JSON)")
        if element:
            sp.add_argument("element", help="name of an element from the file")
        sp.add_argument("--radius", type=int, default=8)
        sp.add_argument("--guard", type=int, default=None,
                        help="adaptive window growth rounds (default: from support)")
        sp.add_argument("--tol", type=float, default=1e-8)
        sp.add_argument("--max-iter", type=int, default=10_000)
        sp.add_argument("--kmax", type=int, default=4)
        sp.add_argument("--N", type=int, default=64)
        sp.add_argument("--eps", type=float, default=0.01)
        sp.add_argument("--seed", type=int, default=42)
        sp.add_argument("--output", default=None)
        sp.add_argument("--format", choices=["text", "json", "csv"], default="text")

    common(sub.add_parser("validate", help="check the twisted-system axioms"))
    common(sub.add_parser("norm", help="two-sided norm estimate of an element"),
           element=True)
    common(sub.add_parser("average-ph", help="iterated contraction of a "
                          "self-adjoint zero-expectation element"), element=True)
    common(sub.add_parser("average-pcom", help="displacement averages with the "
                          "2n/sqrt(N) bound"), element=True)
    common(sub.add_parser("ideals", help="induced vs coefficient-filtered ideals "
                          "and the maximal-ideal correspondence"))
    common(sub.add_parser("traces", help="trace correspondence report"))
    common(sub.add_parser("decompose", help="block decomposition of the finite model"))
    common(sub.add_parser("report", help="all reports for a finite system"))
    return p


def _emit(text: str, args) -> None:
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _get_element(desc, name) -> CrossedElement:
    if name not in desc.elements:
        raise UsageError(f"no element named {name!r} in the description "
                         f"(have: {sorted(desc.elements)})")
    return desc.elements[name]


# -- command bodies -----------------------------------------------------------

def cmd_validate(args) -> int:
    desc = parse_description(args.input)
    report = desc.system.report
    payload = report.as_dict()
    if args.format == "json":
        _emit(json.dumps(payload, sort_keys=True, indent=2) + "\n", args)
    else:
        lines = [f"{'PASS' if c['passed'] else 'FAIL'}  {c['name']}"
                 + (f"  [witness: {c['witness']}]" if c["witness"] else "")
                 for c in payload["checks"]]
        lines.append("all checks passed" if payload["passed"] else "validation FAILED")
        _emit("\n".join(lines) + "\n", args)
    return EXIT_OK if report.passed else EXIT_VALIDATION


def cmd_norm(args) -> int:
    desc = parse_description(args.input)
    x = _get_element(desc, args.element)
    if args.guard is not None:
        est = adaptive_norm_lower(x, rounds=args.guard, tol=args.tol,
                                  max_iter=args.max_iter, seed=args.seed)
    else:
        est = ball_norm_lower(x, args.radius, tol=args.tol,
                              max_iter=args.max_iter, seed=args.seed)
    upper = x.l1_norm()
    if est.value > upper + REFUTATION_TOL:
        raise RefutationError(
            f"norm lower bound {est.value} exceeds the certified upper bound {upper}",
            observed=est.value, certified=upper)
    payload = {"element": args.element, "norm_lower": est.value,
               "l1_upper": upper, "converged": est.converged,
               "method": est.method, "terms": x.term_count()}
    if args.format == "json":
        _emit(json.dumps(payload, sort_keys=True, indent=2) + "\n", args)
    else:
        _emit(f"norm_lower={_fmt(est.value)} l1_upper={_fmt(upper)} "
              f"method={est.method} converged={est.converged}\n", args)
    return EXIT_OK


def cmd_average_ph(args) -> int:
    desc = parse_description(args.input)
    x = _get_element(desc, args.element)
    process, trace = ph_average(x, args.eps, k_max=args.kmax, seed=args.seed)
    if args.format == "csv":
        _emit(trace.to_csv(), args)
    elif args.format == "json":
        _emit(json.dumps(trace.as_dict(), sort_keys=True, indent=2) + "\n", args)
    else:
        lines = [f"step {r.step}: terms={r.terms} "
                 f"norm_lower={'n/a' if r.norm_lower is None else _fmt(r.norm_lower)} "
                 f"l1={_fmt(r.l1_upper)} certified={_fmt(r.certified_bound)}"
                 for r in trace.records]
        lines.append(f"steps to reach eps={args.eps:g}: {trace.steps_to_epsilon} "
                     f"(factor 0.991 per step)")
        _emit("\n".join(lines) + "\n", args)
    return EXIT_OK


def cmd_average_pcom(args) -> int:
    desc = parse_description(args.input)
    x = _get_element(desc, args.element)
    cert = construct_pcom(desc.system.group, sorted(
        x.support(), key=lambda w: (w.word_length(), repr(w))))
    if not cert.conjugator.is_identity():
        u = CrossedElement.lam(desc.system, cert.conjugator)
        x = u.multiply(x).multiply(u.adjoint())
    counts = []
    n = 1
    while n < args.N:
        counts.append(n)
        n *= 4
    counts.append(args.N)
    rows = []
    for i, count in enumerate(counts, start=1):
        y_n, bound, nl = pcom_average_checked(x, cert, count, seed=args.seed)
        rows.append({"step": i, "N": count, "terms": y_n.term_count(),
                     "norm_lower": nl, "l1_upper": y_n.l1_norm(),
                     "certified_bound": bound})
    if args.format == "json":
        _emit(json.dumps(rows, sort_keys=True, indent=2) + "\n", args)
    elif args.format == "csv":
        lines = ["step,terms,norm_lower,l1_upper,certified_bound"]
        lines += [f"{r['step']},{r['terms']},{_fmt(r['norm_lower'])},"
                  f"{_fmt(r['l1_upper'])},{_fmt(r['certified_bound'])}" for r in rows]
        _emit("\n".join(lines) + "\n", args)
    else:
        lines = [f"N={r['N']}: terms={r['terms']} norm_lower={_fmt(r['norm_lower'])} "
                 f"l1={_fmt(r['l1_upper'])} certified={_fmt(r['certified_bound'])}"
                 for r in rows]
        _emit("\n".join(lines) + "\n", args)
    return EXIT_OK


def _ideal_payload(system, seed):
    from .algebra import invariant_ideals
    from .structure import ideal_pair
    model = matrix_model(system)
    blocks = block_decompose(model, seed=seed)
    lattice = invariant_ideals(system.algebra, system.action)
    pairs = []
    for J in lattice.ideals:
        pr = ideal_pair(system, J, model=model, blocks=blocks, seed=seed)
        pairs.append({"ideal_blocks": sorted(J.blocks), **pr.as_dict()})
    bij = bijection_report(system, seed=seed)
    return {"pairs": pairs, "bijection": bij.as_dict(),
            "model_blocks": blocks.as_dict()}


def cmd_ideals(args) -> int:
    desc = parse_description(args.input)
    payload = _ideal_payload(desc.system, args.seed)
    if args.format == "json":
        _emit(json.dumps(payload, sort_keys=True, indent=2) + "\n", args)
    else:
        bij = payload["bijection"]
        lines = []
        for pr in payload["pairs"]:
            lines.append(f"J={pr['ideal_blocks']}: induced={pr['induced_blocks']} "
                         f"tilde={pr['tilde_blocks']} equal={'YES' if pr['equal'] else 'NO'}")
        verdict = ("YES" if bij["holds"]
                   else "NO (hypothesis (DP)/class P absent)")
        lines.append(f"maximal ideals: {bij['model_maximal_count']}; "
                     f"maximal invariant ideals of A: {bij['invariant_maximal_count']}; "
                     f"bijection: {verdict}")
        _emit("\n".join(lines) + "\n", args)
    return EXIT_OK


def cmd_traces(args) -> int:
    desc = parse_description(args.input)
    rep = trace_correspondence(desc.system, seed=args.seed)
    payload = rep.as_dict()
    if args.format == "json":
        _emit(json.dumps(payload, sort_keys=True, indent=2) + "\n", args)
    else:
        _emit(f"invariant traces of A: {rep.invariant_trace_count}; "
              f"extreme model traces: {rep.model_trace_count}; "
              f"composed maps tracial: {'YES' if rep.composed_tracial else 'NO'}; "
              f"injective: {'YES' if rep.injective else 'NO'}; "
              f"surjective: {'YES' if rep.surjective else 'NO'}; "
              f"bijection: {'YES' if rep.holds else 'NO'}\n", args)
    return EXIT_OK


def cmd_decompose(args) -> int:
    desc = parse_description(args.input)
    model = matrix_model(desc.system)
    blocks = block_decompose(model, seed=args.seed)
    payload = {"ambient_dimension": model.ambient_dim,
               "algebra_dimension": model.dimension,
               "blocks": blocks.as_dict()}
    if desc.system.algebra.is_commutative:
        payload["orbits"] = orbit_decomposition(desc.system, seed=args.seed).as_dict()
    if args.format == "json":
        _emit(json.dumps(payload, sort_keys=True, indent=2) + "\n", args)
    else:
        lines = [f"ambient dimension: {model.ambient_dim}",
                 f"algebra dimension: {model.dimension}",
                 f"simple blocks: {list(blocks.dims)} "
                 f"(multiplicities {list(blocks.multiplicities)})"]
        if "orbits" in payload:
            for e in payload["orbits"]["entries"]:
                lines.append(f"orbit {e['points']}: stabilizer order "
                             f"{e['stabilizer_order']}, summand dimension "
                             f"{e['model_dimension']}, blocks {e['block_dims']}")
            lines.append(f"dimensions add up: "
                         f"{'YES' if payload['orbits']['dimensions_add_up'] else 'NO'}")
        _emit("\n".join(lines) + "\n", args)
    return EXIT_OK


def cmd_report(args) -> int:
    desc = parse_description(args.input)
    system = desc.system
    payload = {"validation": system.report.as_dict()}
    if system.group.kind == "finite":
        model = matrix_model(system)
        blocks = block_decompose(model, seed=args.seed)
        payload["decomposition"] = {"ambient_dimension": model.ambient_dim,
                                    "algebra_dimension": model.dimension,
                                    "blocks": blocks.as_dict()}
        payload["ideals"] = _ideal_payload(system, args.seed)
        payload["traces"] = trace_correspondence(system, seed=args.seed).as_dict()
        if system.algebra.is_commutative:
            payload["orbits"] = orbit_decomposition(system, seed=args.seed).as_dict()
    _emit(json.dumps(payload, sort_keys=True, indent=2) + "\n", args)
    return EXIT_OK if payload["validation"]["passed"] else EXIT_VALIDATION


COMMANDS = {
    "validate": cmd_validate,
    "norm": cmd_norm,
    "average-ph": cmd_average_ph,
    "average-pcom": cmd_average_pcom,
    "ideals": cmd_ideals,
    "traces": cmd_traces,
    "decompose": cmd_decompose,
    "report": cmd_report,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except RefutationError as exc:
        print(f"REFUTATION: {exc}", file=sys.stderr)
        return EXIT_REFUTATION
    except ResourceError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (DescriptionError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except TwistlabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
