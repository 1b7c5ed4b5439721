"""Command line: analyze, zeta, count and verify.

Input is an INI file::

    [surface]
    f = x0*x1*x2 + x0*x1*x3 + x0*x2*x3 + x1*x2*x3
    prime = 5

    [field]
    minpoly = t^2 - 2

    [points]
    P1 = 1, 0, 0, 0

    [options]
    terms = 8

Output is ``key = value`` text with stable field names.
"""

import argparse
import configparser
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .errors import NodalZetaError, ParseError
from .exact import NumberField
from .oracle import DEFAULT_BUDGET, count_points, verify_zeta
from .pipeline import Problem, compute_zeta, validate
from .polynomials import format_polynomial, parse_expression, parse_polynomial
from .spectral import b_formula, e2_basis, koszul_dim
from .zeta import ZetaResult, format_factored, format_poly

log = logging.getLogger("nodalzeta")

OPTION_KEYS = {
    "precision": int,
    "terms": int,
    "transversal": int,
    "budget": int,
    "engine": str,
    "verify_extensions": int,
    "dims_method": str,
    "dims_degree": int,
    "stop": str,
}


# ------------------------------------------------------------------ input


@dataclass
class ProblemInput:
    path: str
    problem: Problem
    options: dict
    zeta: ZetaResult = None


def _line_numbers(text):
    """(section, key) -> (line number, column where the value starts)."""
    where = {}
    section = None
    for i, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
        elif "=" in raw and section is not None and not line.startswith(("#", ";")):
            key, _, _ = raw.partition("=")
            col = len(key) + 1
            while col < len(raw) and raw[col].isspace():
                col += 1
            where[(section, key.strip().lower())] = (i, col)
    return where


def _parse_integers(text, section, key, where):
    try:
        return [int(x) for x in text.replace(",", " ").split()]
    except ValueError:
        line, _ = where.get((section, key), (None, None))
        raise ParseError(f"{section}.{key} must be a list of integers", line=line) from None


def _field_value(text, K, line, col):
    try:
        terms = parse_expression(text, [K.name])
    except ParseError as exc:
        exc_col = exc.column
        raise ParseError(str(exc).split(" (line")[0], line=line, column=(col + exc_col - 1) if exc_col else None) from None
    coeffs = [0] * (max((m[0] for m in terms), default=0) + 1)
    for m, c in terms.items():
        coeffs[m[0]] = c
    return K(coeffs)


def load_input(path, prime=None, overrides=None):
    """Parse an input file into a ProblemInput; command-line values win."""
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    cp.optionxform = str.lower
    try:
        cp.read_string(text, source=path)
    except configparser.Error as exc:
        raise ParseError(f"malformed input: {exc.message}", line=getattr(exc, "lineno", None)) from None
    where = _line_numbers(text)
    if not cp.has_option("surface", "f"):
        raise ParseError("missing [surface] f")
    line, col = where.get(("surface", "f"), (None, None))
    ftext = cp.get("surface", "f")
    try:
        f = parse_polynomial(ftext)
    except ParseError as exc:
        raise ParseError(str(exc).split(" (line")[0], line=line, column=(col + exc.column - 1) if exc.column else None) from None
    if cp.has_option("surface", "n"):
        n = cp.getint("surface", "n")
        if n + 1 < f.nvars:
            raise ParseError(f"f uses {f.nvars} variables but n = {n}", line=where.get(("surface", "n"), (None,))[0])
        if n + 1 > f.nvars:
            f = parse_polynomial(ftext, n + 1)
    p = prime
    if p is None and cp.has_option("surface", "prime"):
        p = cp.getint("surface", "prime")
    K = NumberField.rationals()
    if cp.has_option("field", "minpoly"):
        line, col = where.get(("field", "minpoly"), (None, None))
        try:
            terms = parse_expression(cp.get("field", "minpoly"), ["t"])
        except ParseError as exc:
            raise ParseError(str(exc).split(" (line")[0], line=line, column=exc.column) from None
        deg = max(m[0] for m in terms)
        coeffs = [terms.get((i,), 0) for i in range(deg + 1)]
        if any(c != int(c) for c in coeffs) or coeffs[-1] != 1:
            raise ParseError("the minimal polynomial must be monic with integer coefficients", line=line)
        K = NumberField([int(c) for c in coeffs])
        if not K.is_certified_irreducible():
            log.warning("irreducibility of the minimal polynomial was not certified by reduction modulo small primes")
    points = None
    if cp.has_section("points"):
        points = []
        for key, value in cp.items("points"):
            line, col = where.get(("points", key), (None, None))
            coords = []
            offset = col
            for part in value.split(","):
                coords.append(_field_value(part.strip(), K, line, offset))
                offset += len(part) + 1
            if len(coords) != f.nvars:
                raise ParseError(f"point {key} has {len(coords)} coordinates, expected {f.nvars}", line=line)
            points.append(coords)
    options = {}
    if cp.has_section("options"):
        for key, value in cp.items("options"):
            if key not in OPTION_KEYS:
                raise ParseError(f"unknown option {key!r}", line=where.get(("options", key), (None,))[0])
            try:
                options[key] = OPTION_KEYS[key](value)
            except ValueError:
                raise ParseError(f"option {key} has a bad value {value!r}", line=where.get(("options", key), (None,))[0]) from None
    for key, value in (overrides or {}).items():
        if value is not None:
            options[key] = value
    problem = Problem(
        f,
        p,
        K,
        points,
        precision=options.get("precision"),
        terms=options.get("terms"),
        transversal=options.get("transversal", 0),
        budget=options.get("budget", DEFAULT_BUDGET),
        engine=options.get("engine", "padic"),
        verify_extensions=options.get("verify_extensions", 2),
        stop=options.get("stop", "bound"),
    )
    zeta = None
    if cp.has_section("zeta"):
        qc = _parse_integers(cp.get("zeta", "q_coefficients", fallback="1"), "zeta", "q_coefficients", where)
        de = cp.get("zeta", "denominator_exponents", fallback=None)
        exps = _parse_integers(de, "zeta", "denominator_exponents", where) if de else [1] * problem.n
        if p is None:
            raise ParseError("a prime is required to interpret [zeta]")
        zeta = ZetaResult(p, problem.n, qc, exps)
    return ProblemInput(path, problem, options, zeta)


# ----------------------------------------------------------------- output


def _fmt(value):
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, (list, tuple)):
        return ", ".join(_fmt(v) for v in value)
    if value is None:
        return "none"
    return str(value)


class Report:
    def __init__(self):
        self.lines = []

    def __setitem__(self, key, value):
        self.lines.append(f"{key} = {_fmt(value)}")

    def text(self):
        return "\n".join(self.lines) + "\n"


def _config(report, command, inp):
    pr = inp.problem
    report["command"] = command
    report["config.n"] = pr.n
    report["config.degree"] = pr.f.degree
    report["config.prime"] = pr.p
    report["config.field"] = format_poly(list(pr.field.minpoly), "t") if pr.field.degree > 1 else "Q"
    report["config.f"] = format_polynomial(pr.f)
    for key in sorted(OPTION_KEYS):
        if key in inp.options:
            report[f"config.{key}"] = inp.options[key]


def _element_text(x):
    if hasattr(x, "is_rational") and x.is_rational():
        return str(x.to_rational())
    return str(x)


def _point_text(P):
    return "[" + " : ".join(_element_text(x) for x in P) + "]"


def _validation_lines(report, inp, val):
    report["b"] = b_formula(inp.problem.n, inp.problem.f.degree)
    report["tau"] = val.tau
    if val.points is not None:
        for i, (P, cert) in enumerate(zip(val.points.points, val.odp)):
            report[f"points.{i}"] = _point_text(P)
            report[f"points.{i}.odp"] = cert.is_odp
            report[f"points.{i}.hessian_rank"] = cert.rank
            report[f"points.{i}.affine_hessian_det"] = _element_text(cert.affine_determinant)
    rep = val.equisingularity
    if rep is not None:
        report["tau_p"] = rep.tau_p
        report["equisingular"] = rep.passed
        report["equisingularity.verdict"] = rep.describe()


def _dims_slice(args):
    f, level, degree, method = args
    return koszul_dim(f, level, degree, method=method)


def dimension_table(f, max_degree, method="euler", jobs=1):
    """dim H^n(K_f)_j and dim H^{n+1}(K_f)_j for j = 0..max_degree."""
    n = f.nvars - 1
    tasks = [(f, level, j, method) for level in (n, n + 1) for j in range(max_degree + 1)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            vals = list(pool.map(_dims_slice, tasks))
    else:
        vals = [_dims_slice(t) for t in tasks]
    k = max_degree + 1
    return vals[:k], vals[k:]


def run_analyze(inp, jobs=1):
    pr = inp.problem
    report = Report()
    _config(report, "analyze", inp)
    val = validate(pr, require_prime=False)
    _validation_lines(report, inp, val)
    n, N = pr.n, pr.f.degree
    top = inp.options.get("dims_degree", (n + 1) * N - n)
    method = inp.options.get("dims_method", "euler")
    hn, hn1 = dimension_table(pr.f, top, method, jobs)
    report["dims.method"] = method
    report["dims.degree"] = list(range(top + 1))
    report[f"dims.H{n}"] = hn
    report[f"dims.H{n + 1}"] = hn1
    e2 = e2_basis(pr.f, val.tau, val.gb)
    poles = sorted({s for _, s in e2.entries})
    report["e2.size"] = len(e2)
    report["e2.pole_orders"] = poles
    report["e2.dims"] = [len(e2.at_pole(s)) for s in poles]
    report["e2.basis"] = e2.describe()
    plateau = [hn[j * N - n] for j in range(n + 1, (top + n) // N + 1)]
    report["checks.tau_plateau"] = all(d == val.tau for d in plateau)
    report["checks.e2_total"] = len(e2) == b_formula(n, N) - val.tau
    return report


def _zeta_lines(report, z):
    report["q_coefficients"] = z.q_coefficients
    report["denominator_exponents"] = z.denominator_exponents
    report["q_factored"] = format_factored(z.q_coefficients, z.q, z.n)
    report["zeta"] = z.describe()


def run_zeta(inp, jobs=1, dump_reductions=False):
    pr = inp.problem
    report = Report()
    _config(report, "zeta", inp)
    val = validate(pr)
    _validation_lines(report, inp, val)
    z = compute_zeta(pr, val, per_term=dump_reductions)
    d = z.diagnostics
    report["config.precision_effective"] = d["precision"]
    report["config.terms_effective"] = d["terms"]
    report["config.engine_effective"] = pr.engine
    _zeta_lines(report, z)
    report["diagnostics.coordinate_change"] = [" ".join(str(x) for x in row) for row in d["coordinate_change"]]
    report["diagnostics.e2_basis"] = d["e2_basis"]
    report["diagnostics.precision_default"] = d["precision_default"]
    report["diagnostics.terms_guaranteed"] = d["terms_guaranteed"]
    report["diagnostics.terms_rule"] = d["terms_rule"]
    report["diagnostics.runs"] = [f"M={m} p-adic precision {pi}" for m, pi in d["runs"]]
    if "recovery_precision" in d:
        report["diagnostics.recovery_precision"] = [min(x, 999) for x in d["recovery_precision"]]
    report["diagnostics.degree_check"] = "pass"
    report["diagnostics.weil_roots"] = "pass"
    F = d.get("frobenius")
    if dump_reductions and F is not None:
        _dump_reductions(report, F)
    R = pr.verify_extensions
    if R > 0:
        rows = verify_zeta(z, pr.f, pr.p, R, budget=pr.budget, jobs=jobs)
        report["diagnostics.verify"] = [f"r={r} {a}/{b}" for r, a, b in rows]
    return report


def _dump_reductions(report, F):
    basis = F.basis.describe()
    for col, name in enumerate(basis):
        cumulative = [0] * len(basis)
        for k, T in enumerate(F.term_classes):
            for i in range(len(basis)):
                cumulative[i] += T[i][col]
            tag = f"reductions.{col}.k{k}"
            report[tag + ".term"] = [T[i][col] for i in range(len(basis))]
            report[tag + ".cumulative"] = cumulative
    report["reductions.columns"] = basis


def run_count(inp, r=1, jobs=1):
    pr = inp.problem
    report = Report()
    _config(report, "count", inp)
    if pr.p is None:
        raise NodalZetaError("a prime is required")
    report["extension_degree"] = r
    report["count"] = count_points(pr.f, pr.p, r, budget=pr.budget, jobs=jobs)
    return report


def run_verify(inp, R=2, jobs=1):
    pr = inp.problem
    report = Report()
    _config(report, "verify", inp)
    z = inp.zeta
    if z is None:
        val = validate(pr)
        _validation_lines(report, inp, val)
        z = compute_zeta(pr, val)
    _zeta_lines(report, z)
    rows = verify_zeta(z, pr.f, pr.p, R, budget=pr.budget, jobs=jobs)
    report["verify.extensions"] = R
    report["verify.rows"] = [f"r={r} {a}/{b}" for r, a, b in rows]
    report["verify"] = "pass"
    return report


# ------------------------------------------------------------------- main


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # usage errors share the exit code of input parse errors
        self.print_usage(sys.stderr)
        self.exit(ParseError.exit_code, f"{self.prog}: error: {message}\n")


def build_parser():
    ap = _Parser(prog="nodalzeta", description="Zeta functions of nodal hypersurfaces over F_p.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("analyze", "zeta", "count", "verify"):
        sp = sub.add_parser(name)
        sp.add_argument("--input", required=True, help="input file")
        sp.add_argument("--prime", type=int, help="the prime p (overrides the file)")
        sp.add_argument("--precision", type=int, help="p-adic precision D for recovering Q")
        sp.add_argument("--terms", type=int, help="number of Frobenius series terms M")
        sp.add_argument("--jobs", type=int, default=1, help="worker processes")
        sp.add_argument("--budget", type=int, help="point enumeration budget")
        sp.add_argument("--dump-reductions", action="store_true", help="write per-term reductions")
        sp.add_argument("--output", help="output file (default: standard output)")
        sp.add_argument("--engine", choices=("padic", "exact"), help="reduction arithmetic")
        sp.add_argument("--stop", choices=("bound", "agreement"), help="series length rule when --terms is absent")
        sp.add_argument("--extension", type=int, help="extension degree r (count) or R (verify)")
        sp.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        inp = load_input(
            args.input,
            prime=args.prime,
            overrides={"precision": args.precision, "terms": args.terms, "budget": args.budget, "engine": args.engine, "stop": args.stop},
        )
        if args.command == "analyze":
            report = run_analyze(inp, args.jobs)
        elif args.command == "zeta":
            report = run_zeta(inp, args.jobs, args.dump_reductions)
        elif args.command == "count":
            report = run_count(inp, args.extension or 1, args.jobs)
        else:
            report = run_verify(inp, args.extension or 2, args.jobs)
    except NodalZetaError as exc:
        print(f"error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return ParseError.exit_code
    except Exception as exc:  # anything unforeseen is an internal error
        log.debug("internal error", exc_info=True)
        print(f"internal error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return NodalZetaError.exit_code
    text = report.text()
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


__all__ = ["main", "load_input", "run_analyze", "run_zeta", "run_count", "run_verify", "dimension_table"]
