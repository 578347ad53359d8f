"""Numerical solution of the level-k restricted recurrence and the
Rogers-dilogarithm identity for its positive solution.

The unknowns are the interior values Q^(a)_m, 1 <= m <= k-1, with both
boundary rows pinned to 1.  Positivity is built into the parameterisation
by solving in logarithmic coordinates with a damped Newton iteration
(finishing with a few Newton steps at extended precision so residuals
land far below the requested tolerance).  A damped fixed-point fallback
covers the rare case of a stalled line search.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

import mpmath
import numpy as np

from .dynkin import DynkinData
from .qdim import precision_bits

_BACKTRACK_FLOOR = 1e-10
_FIXED_POINT_SWEEPS = 200
_POLISH_STEPS = 6


class InvalidLevel(ValueError):
    """Restricted system needs level >= 1."""


class NoConvergence(RuntimeError):
    """Solver failed to reach the requested residual."""

    def __init__(self, message: str, best_residual: float):
        super().__init__(message)
        self.best_residual = best_residual


class DomainError(ValueError):
    """Argument outside the domain of the Rogers dilogarithm."""


class XOutOfRange(RuntimeError):
    """A dilogarithm argument fell outside (0, 1); the solution is bad."""


@dataclass(frozen=True)
class RestrictedSolution:
    """Positive solution of the restricted system on 0 <= m <= level."""

    family: str
    rank: int
    level: int
    values: Mapping[tuple[int, int], mpmath.mpf]
    residual: float
    iterations: int
    tol: float

    def value(self, a: int, m: int) -> mpmath.mpf:
        return self.values[(a, m)]


def _grid(dynkin: DynkinData, k: int, interior: np.ndarray) -> np.ndarray:
    """Full (rank, k+1) value grid with unit boundary columns."""
    q = np.ones((dynkin.rank, k + 1))
    if k >= 2:
        q[:, 1:k] = interior
    return q


def _residual(q: np.ndarray, adj: np.ndarray) -> np.ndarray:
    # Underflowed line-search candidates produce NaNs here; the caller
    # rejects them, so silence the spurious warnings.
    with np.errstate(all="ignore"):
        mid = q[:, 1:-1]
        prod = np.exp(adj @ np.log(mid))
        return mid**2 - prod - q[:, :-2] * q[:, 2:]


def _jacobian_log(q: np.ndarray, adj: np.ndarray, k: int) -> np.ndarray:
    """Jacobian of the residual with respect to log-coordinates."""
    r = q.shape[0]
    n = r * (k - 1)
    mid = q[:, 1:k]
    prod = np.exp(adj @ np.log(mid))
    jac = np.zeros((n, n))
    for a in range(r):
        for j in range(k - 1):
            row = a * (k - 1) + j
            m = j + 1
            jac[row, row] += 2 * q[a, m]
            for b in range(r):
                if adj[a, b]:
                    jac[row, b * (k - 1) + j] -= prod[a, j] / q[b, m]
            if m - 1 >= 1:
                jac[row, row - 1] -= q[a, m + 1]
            if m + 1 <= k - 1:
                jac[row, row + 1] -= q[a, m - 1]
    jac *= mid.reshape(-1)[None, :]
    return jac


def _initial_guess(rank: int, k: int) -> np.ndarray:
    m = np.arange(1, k)
    return np.tile(1.0 + m * (k - m) / k, (rank, 1))


def _newton_float(dynkin: DynkinData, k: int, u0: np.ndarray,
                  max_iter: int) -> tuple[np.ndarray, float, int, bool]:
    """Damped Newton in log-coordinates at machine precision.

    Returns the value grid, the residual, the iteration count, and a
    convergence flag.  The target residual is scale-aware; final accuracy
    comes from the extended-precision polish afterwards.
    """
    adj = np.array(dynkin.adjacency, dtype=float)
    u = u0.copy()
    iterations = 0

    def res_of(uu: np.ndarray) -> np.ndarray:
        return _residual(_grid(dynkin, k, np.exp(uu)), adj)

    def scale_of(uu: np.ndarray) -> float:
        # Largest term appearing in any equation; the float residual floor
        # is a small multiple of machine epsilon times this.
        q = _grid(dynkin, k, np.exp(uu))
        mid = q[:, 1:-1]
        prod = np.exp(adj @ np.log(mid))
        return float(np.max(mid**2 + prod + q[:, :-2] * q[:, 2:]))

    def fixed_point_sweeps(uu: np.ndarray) -> np.ndarray:
        # Newton may have walked to the boundary of the positive cone;
        # clamp before sweeping so exp/log stay finite.
        uu = np.clip(np.nan_to_num(uu, nan=0.0, posinf=40.0, neginf=-40.0),
                     -40.0, 40.0)
        for _ in range(_FIXED_POINT_SWEEPS):
            q = _grid(dynkin, k, np.exp(uu))
            mid = q[:, 1:-1]
            prod = np.exp(adj @ np.log(mid))
            cand = np.sqrt(prod + q[:, :-2] * q[:, 2:])
            uu = 0.5 * (uu + np.log(cand))
        return uu

    def interior(uu: np.ndarray) -> bool:
        # The positive solution has unit boundaries and grows towards the
        # midpoint, so every genuine value is >= 1.  Anything below 1/2
        # is an escape towards the boundary of the positive cone, where
        # degenerate zero-padded solutions of the equations live.
        return bool(np.min(np.exp(uu)) > 0.5)

    with np.errstate(all="ignore"):
        f = res_of(u)
        fallbacks_left = 5
        while iterations < max_iter:
            nrm = float(np.max(np.abs(f)))
            solved = nrm <= 1e-11 * scale_of(u)
            if solved and interior(u):
                return _grid(dynkin, k, np.exp(u)), nrm, iterations, True
            moved = False
            # A solved-but-boundary state, or any drift out of the
            # interior, means the wrong basin: go straight to recovery.
            if not solved and interior(u):
                jac = _jacobian_log(_grid(dynkin, k, np.exp(u)), adj, k)
                try:
                    step = np.linalg.solve(jac, -f.reshape(-1))
                except np.linalg.LinAlgError:
                    step = None
                if step is not None:
                    t = 1.0
                    base = float(np.sum(f**2))
                    while t > _BACKTRACK_FLOOR:
                        cand = u + t * step.reshape(u.shape)
                        fc = res_of(cand)
                        if float(np.sum(fc**2)) < base * (1 - 1e-4 * t):
                            u, f = cand, fc
                            moved = True
                            break
                        t /= 2
            iterations += 1
            if not moved:
                if fallbacks_left == 0:
                    break
                fallbacks_left -= 1
                u = fixed_point_sweeps(u)
                f = res_of(u)
        nrm = float(np.max(np.abs(f)))
        ok = nrm <= 1e-11 * scale_of(u) and interior(u)
        return _grid(dynkin, k, np.exp(u)), nrm, iterations, ok


def _polish(dynkin: DynkinData, k: int, q_float: np.ndarray,
            steps: int = _POLISH_STEPS) -> tuple[list[list[mpmath.mpf]], mpmath.mpf, int]:
    """Newton at working precision, started from the float solution."""
    r = dynkin.rank
    n = r * (k - 1)
    adj = dynkin.adjacency
    q = [[mpmath.mpf(1)] + [mpmath.mpf(q_float[a, m]) for m in range(1, k)] + [mpmath.mpf(1)]
         for a in range(r)]

    def residual_vec() -> mpmath.matrix:
        out = mpmath.matrix(n, 1)
        for a in range(r):
            for m in range(1, k):
                prod = mpmath.mpf(1)
                for b in range(r):
                    if adj[a][b]:
                        prod *= q[b][m]
                out[a * (k - 1) + m - 1] = q[a][m] ** 2 - prod - q[a][m - 1] * q[a][m + 1]
        return out

    def max_abs(vec: mpmath.matrix) -> mpmath.mpf:
        return max(abs(vec[i]) for i in range(n)) if n else mpmath.mpf(0)

    used = 0
    f = residual_vec()
    floor = mpmath.mpf(2) ** (12 - precision_bits())
    for _ in range(steps):
        if max_abs(f) < floor:
            break
        jac = mpmath.matrix(n, n)
        for a in range(r):
            for m in range(1, k):
                row = a * (k - 1) + m - 1
                prod = mpmath.mpf(1)
                for b in range(r):
                    if adj[a][b]:
                        prod *= q[b][m]
                jac[row, row] += 2 * q[a][m]
                for b in range(r):
                    if adj[a][b]:
                        jac[row, b * (k - 1) + m - 1] -= prod / q[b][m]
                if m - 1 >= 1:
                    jac[row, row - 1] -= q[a][m + 1]
                if m + 1 <= k - 1:
                    jac[row, row + 1] -= q[a][m - 1]
        delta = mpmath.lu_solve(jac, -f)
        for a in range(r):
            for m in range(1, k):
                q[a][m] += delta[a * (k - 1) + m - 1]
        f = residual_vec()
        used += 1
    return q, max_abs(f), used


def solve_restricted(dynkin: DynkinData, k: int, tol: float = 1e-12,
                     max_iter: int = 200) -> RestrictedSolution:
    """Unique positive solution of the level-k restricted system.

    Deterministic start Q^(a)_m = 1 + m(k-m)/k; raises
    :class:`NoConvergence` with the best residual if the target cannot
    be met within the iteration budget.
    """
    if k < 1:
        raise InvalidLevel(f"level must be >= 1, got {k}")
    values: dict[tuple[int, int], mpmath.mpf] = {}
    if k == 1:
        for a in range(1, dynkin.rank + 1):
            values[(a, 0)] = mpmath.mpf(1)
            values[(a, 1)] = mpmath.mpf(1)
        return RestrictedSolution(dynkin.family, dynkin.rank, k, values,
                                  residual=0.0, iterations=0, tol=tol)

    u0 = np.log(_initial_guess(dynkin.rank, k))
    q_float, res_float, its, ok = _newton_float(dynkin, k, u0, max_iter)
    if not ok:
        raise NoConvergence(
            f"float phase stalled at residual {res_float:.3e}", res_float)
    with mpmath.workprec(precision_bits()):
        q, res, polish_its = _polish(dynkin, k, q_float)
        if res > tol:
            raise NoConvergence(
                f"residual {mpmath.nstr(res)} above tolerance {tol}", float(res))
        for a in range(1, dynkin.rank + 1):
            for m in range(k + 1):
                values[(a, m)] = q[a - 1][m]
    return RestrictedSolution(dynkin.family, dynkin.rank, k, values,
                              residual=float(res), iterations=its + polish_its,
                              tol=tol)


@dataclass(frozen=True)
class SolutionProperties:
    symmetric: bool
    unimodal: bool
    max_symmetry_defect: float
    failures: tuple[str, ...]

    @property
    def passed(self) -> bool:
        return self.symmetric and self.unimodal


def check_positive_solution_properties(sol: RestrictedSolution,
                                       tol: float | None = None) -> SolutionProperties:
    """Symmetry about k/2 (within 10x the solve tolerance by default) and
    strict growth up to the midpoint."""
    if tol is None:
        tol = 10 * sol.tol
    k = sol.level
    symmetry_failures: list[str] = []
    growth_failures: list[str] = []
    defect = 0.0
    for a in range(1, sol.rank + 1):
        for m in range(k + 1):
            d = float(abs(sol.value(a, m) - sol.value(a, k - m)))
            defect = max(defect, d)
            if d > tol:
                symmetry_failures.append(f"Q({a},{m}) != Q({a},{k - m})")
        for m in range(1, k // 2 + 1):
            if not sol.value(a, m - 1) < sol.value(a, m):
                growth_failures.append(f"Q({a},{m - 1}) >= Q({a},{m})")
    return SolutionProperties(
        symmetric=not symmetry_failures,
        unimodal=not growth_failures,
        max_symmetry_defect=defect,
        failures=tuple(symmetry_failures + growth_failures),
    )


@dataclass(frozen=True)
class ProbeReport:
    """Agreement of randomized restarts with the deterministic solution."""

    starts: int
    converged: int
    max_deviation: float
    agree: bool


def uniqueness_probe(dynkin: DynkinData, k: int, n_starts: int = 20,
                     seed: int = 0, tol: float = 1e-8,
                     max_iter: int = 400) -> ProbeReport:
    """Rerun the float solve from log-coordinates jittered by +-50% and
    measure the spread.  Evidence for uniqueness, never a proof."""
    if k < 1:
        raise InvalidLevel(f"level must be >= 1, got {k}")
    if k == 1:
        return ProbeReport(n_starts, n_starts, 0.0, True)
    u0 = np.log(_initial_guess(dynkin.rank, k))
    ref, _, _, ok = _newton_float(dynkin, k, u0, max_iter)
    if not ok:
        raise NoConvergence("reference solve failed", float("inf"))
    rng = np.random.default_rng(seed)
    converged = 0
    worst = 0.0
    for _ in range(n_starts):
        start = u0 * (1 + rng.uniform(-0.5, 0.5, size=u0.shape))
        q, _, _, ok = _newton_float(dynkin, k, start, max_iter)
        if not ok:
            continue
        converged += 1
        worst = max(worst, float(np.max(np.abs(q - ref))))
    return ProbeReport(n_starts, converged, worst,
                       converged == n_starts and worst <= tol)


# ---------------------------------------------------------------------------
# Rogers dilogarithm and the central-charge identity


def _li2_series(x: mpmath.mpf) -> mpmath.mpf:
    """Power series for the dilogarithm, adequate on [0, 1/2]."""
    eps = mpmath.mpf(2) ** (-(mpmath.mp.prec + 10))
    total = mpmath.mpf(0)
    power = mpmath.mpf(1)
    n = 0
    while True:
        n += 1
        power *= x
        term = power / (n * n)
        total += term
        if term < eps:
            return total


def rogers_L(x) -> mpmath.mpf:
    """Rogers dilogarithm on [0, 1], with L(0) = 0 and L(1) = pi^2/6.

    Uses the dilogarithm series on [0, 1/2] plus the log product, and the
    reflection L(x) + L(1-x) = pi^2/6 above 1/2.
    """
    with mpmath.workprec(precision_bits()):
        x = mpmath.mpf(x)
        if x < 0 or x > 1:
            raise DomainError(f"Rogers dilogarithm needs 0 <= x <= 1, got {x}")
        if x == 0:
            return mpmath.mpf(0)
        if x == 1:
            return mpmath.pi**2 / 6
        if 2 * x > 1:
            return mpmath.pi**2 / 6 - rogers_L(1 - x)
        return _li2_series(x) + mpmath.log(x) * mpmath.log(1 - x) / 2


@dataclass(frozen=True)
class DilogReport:
    """Normalized dilogarithm sum against the closed rational value."""

    lhs: mpmath.mpf
    rhs: Fraction
    x_values: Mapping[tuple[int, int], mpmath.mpf]
    delta: float

    def passed(self, tol: float = 1e-9) -> bool:
        return self.delta <= tol


def dilog_identity(sol: RestrictedSolution, dynkin: DynkinData) -> DilogReport:
    """Evaluate (6/pi^2) * sum of L(x^(a)_m) against (k-1) h r / (h + k).

    The arguments x^(a)_m = (neighbor product) / Q^2 must lie in (0, 1)
    for a genuine positive solution; anything else raises
    :class:`XOutOfRange`.
    """
    k, r, h = sol.level, sol.rank, dynkin.coxeter
    rhs = Fraction((k - 1) * h * r, h + k)
    x_values: dict[tuple[int, int], mpmath.mpf] = {}
    with mpmath.workprec(precision_bits()):
        total = mpmath.mpf(0)
        for a in range(1, r + 1):
            for m in range(1, k):
                prod = mpmath.mpf(1)
                for b in range(1, r + 1):
                    if dynkin.adjacency[a - 1][b - 1]:
                        prod *= sol.value(b, m)
                x = prod / sol.value(a, m) ** 2
                if not 0 < x < 1:
                    raise XOutOfRange(f"x({a},{m}) = {mpmath.nstr(x)} outside (0,1)")
                x_values[(a, m)] = x
                total += rogers_L(x)
        lhs = 6 / mpmath.pi**2 * total
        delta = float(abs(lhs - mpmath.mpf(rhs.numerator) / rhs.denominator))
    return DilogReport(lhs=lhs, rhs=rhs, x_values=x_values, delta=delta)
