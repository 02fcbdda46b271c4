"""Command-line front end: evaluate formulas, compare with oracles, run the gates.

Exit status: 0 on success, 1 when a verification gate fails, 2 on bad input.
Reports go to stdout as JSON, CSV or a text table; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import warnings

import numpy as np

from . import compact, haar, noncompact
from .errors import LocalizeError
from .matrix_core import Orientation, pfaffian, skew_canonical_form, sqrt_det
from .roots import builtin_un_spec, load_spec

SEED_ENV = "LOCALIZE_SEED"
CSV_FIELDS = ("case", "value_re", "value_im", "oracle_re", "oracle_im", "abs_diff", "rel_diff", "pass")


class InputError(Exception):
    pass


def parse_complex(text: str) -> complex:
    """Parse ``"1"``, ``"i"``, ``"-2.5i"`` or ``"1+1i"`` (``j`` is accepted too)."""
    s = text.strip().replace(" ", "").replace("I", "i").replace("i", "j")
    try:
        return complex(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def parse_reals(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of reals: {text!r}") from None


def parse_seed(text: str) -> int:
    try:
        return int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed {text!r}") from None


def resolve_seed(flag):
    if flag is not None:
        return flag
    env = os.environ.get(SEED_ENV)
    if env:
        try:
            return int(env, 0)
        except ValueError:
            raise InputError(f"{SEED_ENV}={env!r} is not an integer") from None
    return haar.DEFAULT_SEED


def read_document(path: str):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def json_complex(v) -> complex:
    """Complex from a JSON number, ``[re, im]`` pair or string like ``"1+2i"``."""
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, str):
        return parse_complex(v)
    raise InputError(f"cannot read complex value from {v!r}")


def case(name, value, oracle=None, tol=None, rel=False, passed=None, **extra):
    """One report row. ``pass`` is computed from ``tol`` unless given explicitly."""
    value = complex(value)
    row = {"case": name, "value_re": value.real, "value_im": value.imag,
           "oracle_re": None, "oracle_im": None, "abs_diff": None, "rel_diff": None}
    if oracle is not None:
        oracle = complex(oracle)
        diff = abs(value - oracle)
        reldiff = diff / abs(oracle) if oracle != 0 else (0.0 if diff == 0 else float("inf"))
        row.update(oracle_re=oracle.real, oracle_im=oracle.imag, abs_diff=diff, rel_diff=reldiff)
        if passed is None and tol is not None:
            passed = (reldiff if rel else diff) <= tol
    row["pass"] = True if passed is None else bool(passed)
    row.update(extra)
    return row


def cmd_pfaffian(args):
    if args.input is None:
        raise InputError("pfaffian needs --input (JSON array of arrays, '-' for stdin)")
    a = np.array(read_document(args.input), dtype=float)
    pf = pfaffian(a)
    det = float(np.linalg.det(a))
    rows = [case("pf_squared_vs_det", pf * pf, det, tol=1e-9 * max(1.0, abs(det)), pfaffian=pf)]
    try:
        pairing = skew_canonical_form(a, Orientation.POSITIVE)
        rows.append(case("sqrt_det", sqrt_det(a), np.prod(pairing.weights), tol=1e-9 * max(1.0, abs(pf)),
                         weights=pairing.weights.tolist()))
    except LocalizeError as exc:
        print(f"note: {exc}", file=sys.stderr)
    return {"rows": rows}


def _spec_arg(args, n):
    if args.spec_file:
        return load_spec(read_document(args.spec_file))
    return builtin_un_spec(n)


def _pair(args):
    if args.theta is None or args.t is None:
        raise InputError("--theta and --t are required")
    if len(args.theta) != len(args.t):
        raise InputError("--theta and --t must have the same length")
    if args.n is not None and args.n != len(args.t):
        raise InputError(f"--n {args.n} does not match {len(args.t)} entries")
    return args.theta, args.t


def cmd_iz(args):
    theta, t = _pair(args)
    exact = compact.iz_exact(theta, t)
    rows = [case("iz_exact_vs_root_data", exact, compact.iz_generic(builtin_un_spec(len(t)), theta, t),
                 tol=1e-9, rel=True)]
    meta = {}
    if args.mc_samples:
        est = haar.iz_mc(theta, t, args.mc_samples, args.seed, args.workers)
        sigmas = max(abs(exact.real - est.mean.real), abs(exact.imag - est.mean.imag)) / est.stderr \
            if est.stderr > 0 else (0.0 if abs(exact - est.mean) < 1e-14 else float("inf"))
        rows.append(case("iz_exact_vs_haar_mc", exact, est.mean, passed=sigmas <= 4,
                         stderr=est.stderr, sigmas=sigmas, gate="4 stderr per component"))
        meta["haar_estimate"] = est.to_dict()
    return {"rows": rows, **meta}


def cmd_hc_sum(args):
    theta, t = _pair(args)
    spec = _spec_arg(args, len(t))
    c = args.c if args.c is not None else -1j
    value = compact.hc_weyl_sum(theta, t, c, spec)
    oracle = None
    if not args.spec_file and c == -1j:
        oracle = compact.symplectic_volume_un(t) * compact.iz_exact(theta, t)
    return {"rows": [case("hc_weyl_sum", value, oracle, tol=1e-9, rel=True)]}


def cmd_volume(args):
    if args.t is None:
        raise InputError("--t is required")
    spec = _spec_arg(args, len(args.t))
    generic = compact.symplectic_volume_generic(spec, args.t)
    oracle = None if args.spec_file else compact.symplectic_volume_un(args.t)
    return {"rows": [case("symplectic_volume", generic, oracle, tol=1e-12, rel=True)]}


def cmd_volume_limit(args):
    if args.t is None:
        raise InputError("--t is required")
    eps = args.eps or [1e-2, 1e-3, 1e-4]
    value = compact.volume_limit(args.t, eps)
    rows = [case("volume_limit", value, compact.symplectic_volume_un(args.t), tol=1e-6, rel=True,
                 epsilons=eps)]
    return {"rows": rows}


def cmd_dh_sphere(args):
    c = args.c if args.c is not None else 1.0
    demo = compact.sphere_dh_demo(c)
    tol = 1e-8 * max(1.0, abs(demo.quadrature_value))
    return {"rows": [case("sphere_fixed_point_vs_quadrature", demo.fixed_point_value,
                          demo.quadrature_value, tol=tol)]}


def problem_from_document(doc) -> compact.DHProblem:
    try:
        points = [
            compact.FixedPointDatum(
                label=str(p.get("label", f"p{k}")),
                j_value=json_complex(p.get("j_value", 0.0)),
                weights=tuple(p["weights"]),
                multiplicity=int(p.get("multiplicity", 1)),
                class_value=json_complex(p.get("class_value", 1.0)),
            )
            for k, p in enumerate(doc["points"])
        ]
        return compact.DHProblem(n=int(doc["n"]), c=json_complex(doc.get("c", 1.0)), points=points)
    except (KeyError, TypeError, AttributeError) as exc:
        raise InputError(f"malformed problem document: {exc}") from exc


def cmd_dh_sum(args):
    if args.input is None:
        raise InputError("dh-sum needs --input (problem JSON, '-' for stdin)")
    doc = read_document(args.input)
    problem = problem_from_document(doc)
    if args.c is not None:
        problem = compact.DHProblem(problem.n, args.c, problem.points)
    rows = [case("dh_sum", compact.dh_sum(problem))]
    # same class data through the generic localization sum, with s = i / (2 pi)
    s = 1j / (2 * np.pi)
    classes = [compact.FixedPointDatum(p.label, p.j_value, p.weights, p.multiplicity,
                                       np.exp(problem.c * p.j_value)) for p in problem.points]
    via_bv = compact.bv_sum(problem.n, classes) / (s * problem.c) ** problem.n
    rows.append(case("bv_sum_consistency", rows[0]["value_re"] + 1j * rows[0]["value_im"], via_bv,
                     tol=1e-12 * max(1.0, abs(via_bv))))
    return {"rows": rows}


def cmd_noncompact(args):
    if args.matrix is None:
        raise InputError("--matrix a,b,c is required")
    if len(args.matrix) != 3:
        raise InputError("--matrix takes exactly three reals a,b,c")
    x = noncompact.Sl2Element(*args.matrix)
    kind = noncompact.classify(x)
    cycle = noncompact.CycleChoice(args.cycle)
    s = args.s if args.s is not None else noncompact.DEFAULT_S
    data = noncompact.zero_data(x, cycle)
    value = noncompact.f_alpha_const(x, s)
    rows = [case("f_alpha", value)]
    rows.append(case("weight_sum_zero", data[0].mu + data[1].mu, 0.0, tol=1e-12 * max(1.0, x.scale)))
    rows.append(case("single_contributing_zero", sum(d.multiplicity for d in data), 1.0, tol=0.0))
    return {"rows": rows, "class": kind.value, "zeros": [d.to_dict() for d in data],
            "s_re": complex(s).real, "s_im": complex(s).imag}


def cmd_haar_check(args):
    n = args.n or 3
    samples = args.mc_samples or 100_000
    rows = []
    unit = haar.haar_values(lambda us: np.full(len(us), haar.unitarity_residual(us)), n,
                            min(samples, 10_000), args.seed, args.workers, batched=True)
    rows.append(case("unitarity_residual", float(unit.max()), 0.0, tol=1e-12))
    for j in range(n):
        est = haar.mc_expectation(lambda us, j=j: np.abs(us[:, 0, j]) ** 2, n, samples,
                                  args.seed, args.workers, batched=True)
        rows.append(case(f"E|U1{j + 1}|^2", est.mean, 1.0 / n, passed=abs(est.mean - 1 / n) <= 4 * est.stderr,
                         stderr=est.stderr))
    est = haar.mc_expectation(lambda us: np.trace(us, axis1=1, axis2=2) / n, n, samples,
                              args.seed, args.workers, batched=True)
    rows.append(case("E[Tr U / n]", est.mean, 0.0, passed=abs(est.mean) <= 4 * est.stderr,
                     stderr=est.stderr))
    return {"rows": rows}


def cmd_verify(args):
    from .verify import run_all

    results = run_all(seed=args.seed, workers=args.workers)
    rows = []
    for r in results:
        print(r.line(), file=sys.stderr)
        rows.append({"case": f"criterion_{r.number}", "name": r.name, "pass": r.ok,
                     "measured": r.to_dict()["measured"], "tolerance": r.tolerance,
                     "summary": r.summary(),
                     "value_re": None, "value_im": None, "oracle_re": None, "oracle_im": None,
                     "abs_diff": None, "rel_diff": None})
    return {"rows": rows}


COMMANDS = {
    "pfaffian": cmd_pfaffian,
    "iz": cmd_iz,
    "hc-sum": cmd_hc_sum,
    "volume": cmd_volume,
    "volume-limit": cmd_volume_limit,
    "dh-sphere": cmd_dh_sphere,
    "dh-sum": cmd_dh_sum,
    "noncompact": cmd_noncompact,
    "haar-check": cmd_haar_check,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int)
    common.add_argument("--theta", type=parse_reals, help="comma list, x = diag(i*theta)")
    common.add_argument("--t", type=parse_reals, help="comma list, x0 = diag(i*t)")
    common.add_argument("--c", type=parse_complex, help='complex, e.g. "1", "i", "1+1i"')
    common.add_argument("--mc-samples", type=int, default=0)
    common.add_argument("--seed", type=parse_seed, default=None,
                        help=f"64-bit seed (default: ${SEED_ENV}, else 0x5EED)")
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--format", choices=("json", "csv", "table"), default="json")
    common.add_argument("--spec-file", help="root-system JSON document")
    common.add_argument("--matrix", type=parse_reals, help="a,b,c for [[a,b],[c,-a]]")
    common.add_argument("--s", type=parse_complex, help="non-compact scale s")
    common.add_argument("--cycle", choices=("c-h", "conormal"), default="c-h")
    common.add_argument("--input", help="JSON input document ('-' for stdin)")
    common.add_argument("--eps", type=parse_reals, help="decreasing epsilons for volume-limit")

    parser = argparse.ArgumentParser(prog="localize", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def _render(report, fmt) -> str:
    if fmt == "json":
        return json.dumps(report, sort_keys=True, default=_json_default) + "\n"
    rows = report["rows"]
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, extrasaction="ignore", lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: ("" if row.get(k) is None else row.get(k)) for k in CSV_FIELDS})
        return buf.getvalue()
    lines = [f"{'case':<36} {'value':>28} {'oracle':>28} {'abs_diff':>10}  pass"]
    for row in rows:
        if row["value_re"] is None and "summary" in row:
            lines.append(f"{row['case']:<36} {row['summary']}  {'yes' if row['pass'] else 'NO'}")
            continue
        lines.append(f"{row['case']:<36} {_cplx(row['value_re'], row['value_im']):>28} "
                     f"{_cplx(row['oracle_re'], row['oracle_im']):>28} "
                     f"{'' if row['abs_diff'] is None else format(row['abs_diff'], '.2e'):>10}  "
                     f"{'yes' if row['pass'] else 'NO'}")
    return "\n".join(lines) + "\n"


def _cplx(re, im):
    if re is None:
        return ""
    return f"{re:.10g}{im:+.10g}i"


def _json_default(o):
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.seed = resolve_seed(args.seed)
        if args.workers < 1:
            raise InputError("--workers must be >= 1")
        if args.mc_samples and args.mc_samples < 2:
            raise InputError("--mc-samples must be >= 2")
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            body = COMMANDS[args.command](args)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
    except (InputError, LocalizeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    report = {"command": args.command, "seed": args.seed, "workers": args.workers, **body}
    report["pass"] = all(row["pass"] for row in body["rows"])
    sys.stdout.write(_render(report, args.format))
    return 0 if report["pass"] else 1


if __name__ == "__main__":
    sys.exit(main())
