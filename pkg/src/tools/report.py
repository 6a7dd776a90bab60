"""
Index reports for a single path: every index whose preconditions hold,
"n/a (<code>)" for the others, and the cross-checks between routes.
"""
import logging
from fractions import Fraction
from typing import Callable, List, Optional, TypeVar, Union

import numpy as np

from src.config import Settings, settings
from src.errors import IntegralityViolation, SymplecticIndexError
from src.models.documents import CheckResult, CheckStatus, IndexReport, PathSpecDocument, Scalar
from src.models.orbit import PeriodicOrbit
from src.models.path import SymplecticPath
from src.models.transforms import IndexValue
from src.tools.czindex import cayley, concavity_index, cz_winding_oracle, nu, nu_via_concavity
from src.tools.hamflow import circular_orbit, integrate_monodromy
from src.tools.lagrangian import apply, intersection_dim, plane_p, plane_x
from src.tools.maslov import relative_maslov
from src.tools.paths import path_from_samples, symplectic_path_from_generator
from src.tools.symplinalg import det_minus_identity, sp_class, standard_J

logger = logging.getLogger("report")

T = TypeVar("T")


def path_from_document(doc: PathSpecDocument, tolerances: Optional[Settings] = None) -> SymplecticPath:
    tol = tolerances or settings
    if doc.generator is not None:
        return symplectic_path_from_generator(doc.generator, tol)
    if doc.samples is not None:
        return path_from_samples(doc.samples.times, doc.samples.matrices, label=doc.label or "samples", tolerances=tol)
    ham = doc.hamiltonian
    if ham.orbit.circular_radius is not None:
        orbit = circular_orbit(ham.hamiltonian, ham.orbit.circular_radius, tol)
    else:
        orbit = PeriodicOrbit(z0=np.asarray(ham.orbit.z0, dtype=float), period=ham.orbit.period)
    return integrate_monodromy(ham.hamiltonian, orbit, ham.steps, ham.reps, tol)


def not_available(error: SymplecticIndexError) -> str:
    return f"n/a ({error.code})"


def format_index(value: IndexValue) -> Scalar:
    value = Fraction(value)
    return int(value) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def attempt(what: str, fn: Callable[[], T]) -> Union[T, str]:
    """fn(), or an n/a marker when a precondition fails. Integrality failures propagate."""
    try:
        return fn()
    except IntegralityViolation:
        raise
    except SymplecticIndexError as e:
        logger.debug("%s unavailable: %s", what, e)
        return not_available(e)


def _compare(name: str, left, right) -> CheckResult:
    if isinstance(left, str) or isinstance(right, str):
        return CheckResult(name=name, status=CheckStatus.SKIPPED, detail=f"{left} / {right}")
    ok = Fraction(left) == Fraction(right)
    return CheckResult(
        name=name,
        status=CheckStatus.PASS if ok else CheckStatus.FAIL,
        residual=float(abs(Fraction(left) - Fraction(right))),
        detail=f"{format_index(left)} vs {format_index(right)}",
    )


def build_report(path: SymplecticPath, tolerances: Optional[Settings] = None, label: Optional[str] = None) -> IndexReport:
    tol = tolerances or settings
    S = path.endpoint
    n = path.n
    nu_value = nu(path, tol)

    planes = {"l_X": plane_x(n), "l_P": plane_p(n)}
    mu_rel, m_rel = {}, {}
    checks: List[CheckResult] = []
    for name, plane in planes.items():
        mu = attempt(f"mu_{name}", lambda plane=plane: relative_maslov(path, plane, tol))
        mu_rel[name] = mu
        if isinstance(mu, str):
            m_rel[name] = mu
            continue
        meet = intersection_dim(apply(S, plane), plane, tol)
        total = mu + n + meet
        if total % 2:
            raise IntegralityViolation(f"reduced Maslov index on {name}", total / 2, 0.5)
        m_rel[name] = total // 2
        checks.append(CheckResult(name=f"mu_parity_{name}", status=CheckStatus.PASS, detail=f"n + dim = {n + meet}"))

    concavity = attempt("concavity", lambda: concavity_index(S, tol))
    oracle = attempt("cz_oracle", lambda: cz_winding_oracle(path, tol))
    transform = attempt("cayley", lambda: cayley(S, tol))

    checks.append(_compare("nu_vs_cz_oracle", nu_value, oracle))
    via = attempt("nu_via_concavity", lambda: nu_via_concavity(path, tol))
    checks.append(_compare("nu_vs_concavity", nu_value, via if isinstance(via, str) else via.via_reduced))

    component = sp_class(S, tol)
    if Fraction(nu_value).denominator == 1 and not isinstance(transform, str):
        expected = (-1) ** ((n - int(nu_value)) % 2)
        actual = int(np.sign(det_minus_identity(S)))
        checks.append(
            CheckResult(
                name="det_sign",
                status=CheckStatus.PASS if expected == actual else CheckStatus.FAIL,
                detail=f"(-1)^(n - nu) = {expected}, sign det(S - I) = {actual}",
            )
        )
        J = standard_J(n)
        rebuilt = 0.5 * J + J @ np.linalg.inv(S - np.eye(2 * n))
        gap = float(np.max(np.abs(rebuilt - transform.entries)) / max(1.0, np.max(np.abs(transform.entries))))
        checks.append(
            CheckResult(
                name="cayley_reconstruction",
                status=CheckStatus.PASS if gap <= 1e-7 else CheckStatus.FAIL,
                residual=gap,
            )
        )

    return IndexReport(
        label=label or path.label,
        n=n,
        tolerance_profile=tol.TOLERANCE_PROFILE,
        classification=component,
        nu=format_index(nu_value),
        gutzwiller_mu=format_index(-Fraction(nu_value)),
        mu_rel=mu_rel,
        m_rel=m_rel,
        concavity=concavity,
        cz_oracle=oracle,
        cayley=transform if isinstance(transform, str) else transform.entries.tolist(),
        cross_check=checks,
    )
