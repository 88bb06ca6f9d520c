"""critfan command line.

Exit codes: 0 non-critical (or success), 1 input error, 2 selftest or
verification failure, 3 critical, 4 a central torus acts trivially.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__, selftest
from .arrangement import derivative_arrangement, refine_arrangement
from .asymlab import BUILTINS, AsymFun1D, _cutoff, _one_minus_cutoff, invariance_check, mellin_regularize
from .criticality import Verdict, analyze, avoid_functional, criticality_report
from .errors import CritfanError, CriticalExponent
from .exactgeom import Cone, is_valid_fan
from .exactgeom import linalg as la
from .report import bundle_json, criticality_json, derivative_json, dumps, exponents_json, fan_json, provenance, sha256
from .simulation import simulate
from .specfile import SpecError, _parse_rational, load_spec, shift_mode, to_group, to_rep_expr

EXIT_OK, EXIT_INPUT, EXIT_FAIL, EXIT_CRITICAL, EXIT_CENTRAL = 0, 1, 2, 3, 4

VERDICT_EXIT = {
    Verdict.NON_CRITICAL: EXIT_OK,
    Verdict.CRITICAL: EXIT_CRITICAL,
    Verdict.CENTRAL_TRIVIAL: EXIT_CENTRAL,
}


class InputError(Exception):
    pass


def _canonical_input(spec) -> str:
    return dumps(spec.model_dump(mode="json"))


def _build(spec, shift_override):
    g = to_group(spec)
    e = to_rep_expr(spec.representation)
    mode = shift_override or shift_mode(spec)
    return analyze(g, e, mode), mode


def _derivative_cone(bundle, coords) -> Cone:
    fan = bundle.arrangement.fan
    v = [_parse_rational(x) for x in coords]
    if len(v) != fan.ambient:
        raise InputError(f"options.derivative_of: expected {fan.ambient} coordinates, got {len(v)}")
    return fan.locate(la.frac_vector(v))


def _analysis_doc(spec, shift_override, with_refine=None, with_derivative=None, strategy="pull"):
    b, mode = _build(spec, shift_override)
    doc = {"analysis": bundle_json(b), "provenance": provenance(_canonical_input(spec))}
    verdict = b.verdict
    opts = spec.options
    refine = opts.refine if with_refine is None else with_refine
    if b.arrangement is not None:
        if refine:
            avoid = avoid_functional(b.arrangement, b.root_datum, mode) if strategy == "interior" else None
            ra = refine_arrangement(b.arrangement, avoid=avoid, strategy=strategy)
            rep = criticality_report(ra, b.root_datum, mode)
            doc["refinement"] = {
                "strategy": strategy,
                "fan": fan_json(ra.fan),
                "exponents": exponents_json(ra),
                "criticality": criticality_json(rep),
                "valid": not is_valid_fan(ra.fan),
            }
            verdict = rep.verdict
        target = opts.derivative_of if with_derivative is None else with_derivative
        if target is not None:
            d = _derivative_cone(b, target)
            doc["derivative"] = derivative_json(derivative_arrangement(b.arrangement, d), b.arrangement.fan)
    if opts.simulate:
        doc["numeric"] = simulate(b.weights, opts.grid.t_min, opts.grid.t_max, opts.grid.points)
    return doc, verdict


def _text(doc: dict) -> str:
    lines = []
    a = doc.get("analysis")
    if a:
        grp = " x ".join(f"{f['family']}({f['rank']})" for f in a["group"])
        lines.append(f"group: {grp}")
        lines.append(f"2rho: {a['root_datum']['two_rho']}")
        if "fan" in a:
            lines.append(f"fan: {len(a['fan']['rays'])} rays, {len(a['fan']['maximal'])} maximal cones")
        crit = a["criticality"]
        lines.append(f"shift: {crit['shift_mode']} {crit['shift']}")
        for r in crit["rays"]:
            mark = "CRITICAL" if r["critical"] else "ok"
            lines.append(f"  ray {r['ray']}: chi {r['chi_value']}  2rho {r['rho_value']}  {mark}")
        lines.append(f"verdict: {crit['verdict']}")
    if "refinement" in doc:
        r = doc["refinement"]
        lines.append(f"refined ({r['strategy']}): {len(r['fan']['maximal'])} simplicial cones, verdict {r['criticality']['verdict']}")
    if "derivative" in doc:
        d = doc["derivative"]
        lines.append(f"derivative at cone {d['base_cone']}: {len(d['fan']['maximal'])} maximal cones in dimension {d['fan']['ambient']}")
    if "numeric" in doc:
        n = doc["numeric"]
        for f in n["fits"]:
            lines.append(
                f"  slope along {f['direction']}: {f['slope']:.4f} vs {f['prediction']} (gap {f['gap']:.2e}), "
                f"scaled residual {f['scaled_residual']:.2e}"
            )
        for p in n["poisson"]:
            lines.append(f"  poisson residual at t={p['t']}: {p['residual']:.2e}")
        lines.append(f"numeric checks: {'pass' if n['all_ok'] else 'FAIL'}")
    if "cases" in doc:
        for c in doc["cases"]:
            if not c["passed"]:
                lines.append(f"FAIL {c['table']}: {c['name']} {c['detail']}")
        lines.append(f"selftest: {doc['summary']['passed']}/{doc['summary']['total']} passed")
    if "provenance" in doc:
        lines.append(f"input sha256: {doc['provenance']['input_sha256']}")
    return "\n".join(lines) + "\n"


def _emit(doc: dict, args) -> str:
    text = dumps(doc) if args.format == "json" else _text(doc)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return text


def _twice(fn):
    """Run ``fn`` twice and insist on identical output (for --seedless)."""
    first = fn()
    second = fn()
    if dumps(first[0]) != dumps(second[0]):
        raise RuntimeError("non-deterministic output: two runs differ")
    return first


def _run_spec_command(args, **kw) -> int:
    spec, _ = load_spec(args.spec)
    run = lambda: _analysis_doc(spec, args.shift, **kw)  # noqa: E731
    doc, verdict = _twice(run) if args.seedless else run()
    _emit(doc, args)
    return VERDICT_EXIT[verdict]


def cmd_analyze(args) -> int:
    return _run_spec_command(args)


def cmd_refine(args) -> int:
    return _run_spec_command(args, with_refine=True, strategy=args.strategy)


def cmd_derivative(args) -> int:
    coords = args.cone.split(",") if args.cone else None
    if coords is None:
        spec, _ = load_spec(args.spec)
        if spec.options.derivative_of is None:
            raise InputError("derivative: give --cone or options.derivative_of")
    return _run_spec_command(args, with_derivative=[c.strip() for c in coords] if coords else None)


def cmd_simulate(args) -> int:
    spec, _ = load_spec(args.spec)

    def run():
        b, _ = _build(spec, args.shift)
        g = spec.options.grid
        num = simulate(b.weights, g.t_min, g.t_max, g.points)
        return {"numeric": num, "provenance": provenance(_canonical_input(spec))}, num["all_ok"]

    doc, ok = _twice(run) if args.seedless else run()
    _emit(doc, args)
    return EXIT_OK if ok else EXIT_FAIL


def _builtin(name: str, a0, a_inf) -> AsymFun1D:
    if name == "power":
        if a0 is None:
            raise InputError("regularize power: --a0 is required")
        return AsymFun1D(lambda t: t**a0 * _cutoff(t), a0=a0, c0=1.0, name=f"power(a0={a0})")
    if name == "two_sided":
        if a0 is None or a_inf is None:
            raise InputError("regularize two_sided: --a0 and --a-inf are required")
        return AsymFun1D(
            lambda t: t**a0 * _cutoff(t) + t**a_inf * _one_minus_cutoff(t),
            a0=a0, c0=1.0, a_inf=a_inf, c_inf=1.0, name=f"two_sided(a0={a0}, a_inf={a_inf})",
        )
    if name not in BUILTINS:
        raise InputError(f"unknown function {name!r}; choose from {', '.join(sorted(BUILTINS) + ['power', 'two_sided'])}")
    return BUILTINS[name]


def cmd_regularize(args) -> int:
    g = _builtin(args.function, args.a0, args.a_inf)
    try:
        value = mellin_regularize(g)
    except CriticalExponent as e:
        print(f"critical: {e}", file=sys.stderr)
        return EXIT_CRITICAL
    defect = invariance_check(g, args.u)
    doc = {"function": g.name, "value": value, "invariance_u": args.u, "invariance_defect": defect}
    if args.format == "json":
        _emit(doc, args)
    else:
        text = f"{value:.9f}\ninvariance defect at u={args.u:g}: {defect:.3e}\n"
        if args.out:
            Path(args.out).write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)
    return EXIT_OK


def cmd_selftest(args) -> int:
    def run():
        cases = selftest.run(args.filter)
        body = {
            "cases": [c.as_dict() for c in cases],
            "summary": {"total": len(cases), "passed": sum(c.passed for c in cases)},
            "version": __version__,
        }
        return body, all(c.passed for c in cases)

    try:
        doc, ok = _twice(run) if args.seedless else run()
    except KeyError as e:
        raise InputError(e.args[0]) from None
    _emit(doc, args)
    digest = sha256(dumps(doc))
    print(f"report sha256: {digest}", file=sys.stderr)
    if not ok:
        failed = [c for c in doc["cases"] if not c["passed"]]
        for c in failed:
            print(f"FAILED {c['table']}: {c['name']} {c['detail']}", file=sys.stderr)
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="critfan", description="Exponent arrangements and criticality of regularized integrals.")
    p.add_argument("--version", action="version", version=f"critfan {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, spec=True):
        if spec:
            sp.add_argument("spec", help="analysis spec (.json or .toml)")
            sp.add_argument("--shift", choices=["none", "haar"], default=None, help="override the spec's shift")
        sp.add_argument("--out", help="write the report here instead of stdout")
        sp.add_argument("--format", choices=["json", "text"], default="json")
        sp.add_argument("--seedless", action="store_true", help="run twice and fail unless outputs match")

    sp = sub.add_parser("analyze", help="fan, exponents and criticality verdict")
    common(sp)
    sp.set_defaults(func=cmd_analyze)
    sp = sub.add_parser("refine", help="analyze, then refine to a simplicial fan")
    common(sp)
    sp.add_argument("--strategy", choices=["pull", "interior"], default="interior")
    sp.set_defaults(func=cmd_refine)
    sp = sub.add_parser("derivative", help="derivative arrangement at the cone containing a point")
    common(sp)
    sp.add_argument("--cone", help="comma-separated coordinates of a point; its cone is used")
    sp.set_defaults(func=cmd_derivative)
    sp = sub.add_parser("simulate", help="numeric checks in the split-torus model")
    common(sp)
    sp.set_defaults(func=cmd_simulate)
    sp = sub.add_parser("regularize", help="regularized Mellin integral of a built-in function")
    sp.add_argument("function")
    sp.add_argument("--a0", type=float)
    sp.add_argument("--a-inf", dest="a_inf", type=float)
    sp.add_argument("--u", type=float, default=2.0, help="dilation for the invariance check")
    common(sp, spec=False)
    sp.set_defaults(func=cmd_regularize)
    sp = sub.add_parser("selftest", help="run the regression tables")
    sp.add_argument("--filter", help="run only tables whose name contains this")
    common(sp, spec=False)
    sp.set_defaults(func=cmd_selftest)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (SpecError, InputError) as e:
        print(f"input error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except CriticalExponent as e:
        print(f"critical: {e}", file=sys.stderr)
        return EXIT_CRITICAL
    except CritfanError as e:
        print(f"input error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INPUT
    except RuntimeError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
