"""The end-to-end zeta computation: validation, E2 basis, Frobenius, recovery, checks."""

import logging
import time
from dataclasses import dataclass, field

from gmpy2 import mpq

from .errors import AmbiguousLift, EquisingularityFailure, NodalZetaError, NotODP, NotSingular, PDivides
from .exact import is_prime
from .frobenius import ReductionContext, frobenius_matrix, precision_bound, truncation_bound
from .padic import integral_model, padic_frobenius_matrix
from .polynomials import groebner_with_cofactors, jacobian
from .singularities import equisingularity_check, is_odp, tau_count, verify_singular_points
from .spectral import b_formula, e2_basis
from .zeta import assemble_zeta, charpoly, degree_check, recover_q, weil_root_check

log = logging.getLogger(__name__)

# series lengths tried in turn when the number of terms is not fixed
TERM_SCHEDULE = (3, 5, 7, 10, 14, 19, 26, 35, 47, 63)


@dataclass
class Problem:
    f: object
    p: int = None
    field: object = None
    points: list = None
    precision: int = None
    terms: int = None
    transversal: int = 0
    budget: int = 10**9
    engine: str = "padic"
    verify_extensions: int = 2
    stop: str = "bound"

    @property
    def n(self):
        return self.f.nvars - 1


@dataclass
class Validation:
    tau: int
    points: object = None
    odp: list = field(default_factory=list)
    equisingularity: object = None
    gb: object = None


def validate(problem, require_prime=True):
    """Nodes, ODP certificates, tau over Q and the equisingularity gate."""
    f, p = problem.f, problem.p
    if problem.n % 2 == 0:
        raise NodalZetaError("only odd n is supported")
    if p is not None:
        if not is_prime(p):
            raise NodalZetaError(f"{p} is not prime")
        if p <= problem.n - 1:
            raise NodalZetaError(f"p must exceed n - 1 = {problem.n - 1}")
    elif require_prime:
        raise NodalZetaError("a prime is required")
    gb = groebner_with_cofactors([g for g in jacobian(f) if g])
    tau = tau_count(f, gb=gb)
    out = Validation(tau, gb=gb)
    if problem.points:
        out.points = verify_singular_points(f, problem.points, problem.field)
        for i, P in enumerate(out.points.points):
            cert = is_odp(f, P)
            out.odp.append(cert)
            if not cert.is_odp:
                raise NotODP(f"point {i} has Hessian rank {cert.rank}, not {problem.n}")
        if out.points.tau != tau:
            raise NotSingular(f"{out.points.tau} points supplied but the singular locus has length {tau}")
    if p is not None:
        out.equisingularity = equisingularity_check(f, p, out.points.points if out.points else None, gb=gb)
    return out


def _valuation(x, p):
    x = mpq(x)
    if not x:
        return None
    num, den = int(x.numerator), int(x.denominator)
    v = 0
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


@dataclass
class FrobeniusRun:
    terms: int
    approx: list
    bounds: list
    matrix: object


def _approximations(F, p):
    """Coefficients of det(I - T F / p) and their arithmetic precision.

    With entries known to absolute precision pi and of valuation at least
    vmin, coefficient i of det(I - T F) is known to pi + (i-1) vmin, and
    dividing by p^i costs i more digits.
    """
    cp = charpoly(F.entries)
    approx = [c / mpq(p) ** i for i, c in enumerate(cp)]
    if F.precision is None:
        return approx, [None] * len(approx)
    vals = [_valuation(x, p) for row in F.entries for x in row]
    vmin = min((v for v in vals if v is not None), default=0)
    bounds = [None] + [F.precision + (i - 1) * vmin - i for i in range(1, len(cp))]
    return approx, bounds


def _agreement(a, b, p):
    out = []
    for x, y in zip(a, b):
        v = _valuation(mpq(x) - mpq(y), p)
        out.append(None if v is None else v)
    return out


def _cap(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def frobenius_run(f, p, e2, ctx, M, engine="padic", per_term=False, progress=None):
    if engine == "exact":
        F = frobenius_matrix(f, p, e2, ctx, M, progress=progress)
    elif engine == "padic":
        F = padic_frobenius_matrix(f, p, e2, ctx, M, per_term=per_term, progress=progress)
    else:
        raise ValueError(f"unknown engine {engine!r}")
    approx, bounds = _approximations(F, p)
    return FrobeniusRun(M, approx, bounds, F)


def compute_zeta(problem, validation=None, progress=None, per_term=False):
    """Steps 1-6 for an equisingular nodal hypersurface of odd dimension.

    With ``problem.terms`` fixed a single run is made and recovered at the
    given (or default) precision.  With ``stop="bound"`` (the default) the
    series length is the guaranteed truncation bound.  With
    ``stop="agreement"`` the length follows TERM_SCHEDULE and each run is
    recovered with per-coefficient precision equal to its agreement with
    the previous run, capped by the arithmetic precision, falling back to
    the guaranteed length.
    """
    f, p, n = problem.f, problem.p, problem.n
    validation = validation or validate(problem)
    rep = validation.equisingularity
    if rep is not None and not rep.passed:
        raise EquisingularityFailure(rep.describe())
    tau = validation.tau
    start = time.time()
    if problem.engine == "padic":
        model = integral_model(f, p, gb=validation.gb)
    else:
        from .padic import IntegralModel

        model = IntegralModel(f, [[int(i == j) for j in range(f.nvars)] for i in range(f.nvars)], validation.gb)
    g = model.f
    e2 = e2_basis(g, tau, model.gb)
    b = len(e2)
    q = p
    D_default, _ = precision_bound(b, q, n)
    D = problem.precision if problem.precision is not None else D_default
    M_guaranteed = truncation_bound(D, p, n)
    ctx = ReductionContext(g, e2, model.gb, transversal=problem.transversal)
    diagnostics = {
        "coordinate_change": model.matrix,
        "e2_basis": e2.describe(),
        "precision_default": D_default,
        "terms_guaranteed": M_guaranteed,
    }
    runs = []
    recovery = None
    if b == 0:
        recovery_coeffs, schedule = [1], []
        diagnostics["terms_rule"] = "none"
    else:
        if problem.terms is not None:
            schedule = [problem.terms]
        elif problem.stop == "bound":
            schedule = [M_guaranteed]
        elif problem.stop != "agreement":
            raise ValueError(f"unknown stop rule {problem.stop!r}")
        else:
            schedule = [M for M in TERM_SCHEDULE if M < M_guaranteed] + [M_guaranteed]
        last_error = None
        for M in schedule:
            log.info("Frobenius series with %d terms", M)
            run = frobenius_run(g, p, e2, ctx, M, problem.engine, per_term=per_term, progress=progress)
            runs.append(run)
            if problem.terms is not None or M == M_guaranteed:
                Ds = [_cap(D, bd) for bd in run.bounds]
                rule = "fixed" if problem.terms is not None else "guaranteed"
            elif len(runs) >= 2:
                agree = _agreement(run.approx, runs[-2].approx, p)
                Ds = [_cap(_cap(a, bd), problem.precision) for a, bd in zip(agree, run.bounds)]
                rule = "agreement"
            else:
                continue
            Ds = [10**6 if i == 0 else (D if x is None else x) for i, x in enumerate(Ds)]
            try:
                recovery = recover_q(run.approx, q, n, Ds)
            except (AmbiguousLift, PDivides) as exc:
                last_error = exc
                log.info("recovery with %d terms failed: %s", M, exc)
                continue
            if not weil_root_check(recovery.coefficients, q, n, raise_error=False):
                last_error = AmbiguousLift(f"recovered Q with {M} terms fails the Weil root test")
                recovery = None
                continue
            diagnostics["terms_rule"] = rule
            diagnostics["recovery_precision"] = Ds
            break
        if recovery is None:
            raise last_error or AmbiguousLift("no series length recovered Q")
        recovery_coeffs = recovery.coefficients
    degree_check(recovery_coeffs, n, f.degree, tau)
    weil_root_check(recovery_coeffs, q, n)
    diagnostics["runs"] = [(r.terms, r.matrix.precision) for r in runs]
    diagnostics["b"] = b_formula(n, f.degree)
    diagnostics["elapsed"] = time.time() - start
    result = assemble_zeta(recovery_coeffs, q, n, diagnostics)
    result.diagnostics["frobenius"] = runs[-1].matrix if runs else None
    result.diagnostics["precision"] = D
    result.diagnostics["terms"] = runs[-1].terms if runs else 0
    return result


__all__ = ["Problem", "Validation", "validate", "compute_zeta", "frobenius_run", "TERM_SCHEDULE"]
