"""First-order analysis of P-time event graphs.

From the characteristic matrices of a normalized model this module builds
the tightened one-step bounds

    calA = B* (x) A (x) B*          (max-plus, lower bound)
    calB = B#* (x)' C (x)' B#*      (min-plus, upper bound)

so that a trajectory is admissible exactly when
calA (x) x(k-1) <= x(k) <= calB (x)' x(k-1) and x(k) = B* (x) x(k).
Existence of admissible behavior hinges on the constraint matrix
H = calB# (x) calA (+) B: its star is finite exactly when the combined
fixpoint system has solutions, and extremal periodic runs start from
eigenvectors of calA (fastest) or calB (slowest) that stay inside the
image of H*.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .model import MatrixBundle, ModelError
from .spectral import (
    NotIrreducible,
    coupling_index,
    cyclicity,
    eigenvectors,
    is_irreducible,
    max_cycle_mean,
    min_cycle_mean,
    min_eigenvectors,
    periodic_eigenvectors,
)
from .tropical import (
    MAXPLUS,
    MINPLUS,
    Number,
    StarDivergence,
    TropicalMatrix,
    conjugate,
    format_number,
    is_finite,
    kleene_star,
    leq,
    mat_add,
    mat_mul,
    retag,
)


class CouplingNotFound(Exception):
    """The coupling index search exceeded its cap; the necessary-condition
    horizon cannot be established."""


class TrajectoryMode(Enum):
    FASTEST = "fastest"
    SLOWEST = "slowest"
    CUSTOM = "custom"


@dataclass(frozen=True)
class CombinedModel:
    bundle: MatrixBundle
    Bstar: TropicalMatrix
    calA: TropicalMatrix
    calB: TropicalMatrix
    H: TropicalMatrix
    Hstar: TropicalMatrix | None  # None when the star diverges

    @property
    def transitions(self) -> tuple[str, ...]:
        return self.bundle.index_map


@dataclass(frozen=True)
class ExistenceReport:
    rho_calA: Number | None
    rho_prime_calB: Number | None
    rho_H_nonpositive: bool
    necessary_order_ok: bool
    entrywise_ok: bool
    verdict: str  # NO_SOLUTION or CANDIDATES_EXIST

    NO_SOLUTION = "NO_SOLUTION"
    CANDIDATES_EXIST = "CANDIDATES_EXIST"


@dataclass(frozen=True)
class Candidate:
    """Admissible periodic initialization: x0 with period p and rate lam."""

    x0: tuple[Number, ...]
    period: int
    rate: Number


@dataclass(frozen=True)
class Trajectory:
    states: tuple[tuple[Number, ...], ...]
    mode: TrajectoryMode
    period_scalar: tuple[Number, int] | None = None  # (rate, period)

    def __post_init__(self):
        if not self.states:
            raise ValueError("trajectory needs at least one state")
        for x in self.states:
            if any(not is_finite(v) for v in x):
                raise ValueError("trajectory states must be finite")


@dataclass(frozen=True)
class Violation:
    step: int
    transition: str
    side: str  # "lower", "upper" or "initial"
    slack: Number | str

    def describe(self) -> str:
        return f"k={self.step} transition={self.transition} side={self.side} slack={self.slack}"


@dataclass(frozen=True)
class NecessaryReport:
    ok: bool
    failing_n: int | None
    order_ok: bool
    n_checked: int


def build_combined(bundle: MatrixBundle) -> CombinedModel:
    """Tightened one-step bounds and the solution-space matrix H."""
    try:
        bstar = kleene_star(bundle.B)
    except StarDivergence as exc:
        raise ModelError(
            "B* diverges: the token-free constraint graph has a positive circuit"
        ) from exc
    cal_a = mat_mul(mat_mul(bstar, bundle.A), bstar)
    bsharp_star = kleene_star(conjugate(bundle.B))
    cal_b = mat_mul(mat_mul(bsharp_star, bundle.C), bsharp_star)
    h = mat_add(mat_mul(conjugate(cal_b), cal_a), bundle.B)
    try:
        hstar: TropicalMatrix | None = kleene_star(h)
    except StarDivergence:
        hstar = None
    return CombinedModel(bundle=bundle, Bstar=bstar, calA=cal_a, calB=cal_b, H=h, Hstar=hstar)


def existence_report(cm: CombinedModel) -> ExistenceReport:
    """Necessary conditions for admissible behavior, plus the verdict."""
    rho_a = max_cycle_mean(cm.calA)
    rho_b = min_cycle_mean(cm.calB)
    rho_h = max_cycle_mean(cm.H)
    h_ok = rho_h is None or rho_h <= 0
    order_ok = rho_a is None or rho_b is None or rho_a <= rho_b
    entrywise_ok = leq(cm.calA, cm.calB)
    verdict = (
        ExistenceReport.CANDIDATES_EXIST
        if h_ok and order_ok and entrywise_ok
        else ExistenceReport.NO_SOLUTION
    )
    return ExistenceReport(
        rho_calA=rho_a,
        rho_prime_calB=rho_b,
        rho_H_nonpositive=h_ok,
        necessary_order_ok=order_ok,
        entrywise_ok=entrywise_ok,
        verdict=verdict,
    )


def _column(x: Sequence[Number], tag) -> TropicalMatrix:
    return TropicalMatrix.column(tuple(x), tag)


def in_image_star(m: TropicalMatrix, x: Sequence[Number]) -> bool:
    """Membership of x in the image of m*: m (x) x <= x entrywise.

    Uses the fixpoint characterization instead of materializing the star.
    """
    if not m.is_square or m.rows != len(x):
        raise ValueError(f"vector of length {len(x)} against {m.rows}x{m.cols} matrix")
    col = _column(x, m.tag)
    return leq(mat_mul(m, col), col)


def necessary_check(cm: CombinedModel, x0: Sequence[Number], cap: int | None = None) -> NecessaryReport:
    """Finite-horizon necessary condition for x0 to start a solution.

    Requires calA and calB# irreducible; checks the cycle-time ordering
    and (calB#)^n (x) calA^n (x) x0 <= x0 for n up to the larger coupling
    index.
    """
    bsharp = conjugate(cm.calB)
    if not is_irreducible(cm.calA):
        raise NotIrreducible("calA is not irreducible")
    if not is_irreducible(bsharp):
        raise NotIrreducible("calB# is not irreducible")
    n_a = coupling_index(cm.calA, cap)
    n_b = coupling_index(bsharp, cap)
    if n_a is None or n_b is None:
        raise CouplingNotFound("coupling index not found under the cap")
    rho_a = max_cycle_mean(cm.calA)
    rho_b = min_cycle_mean(cm.calB)
    order_ok = rho_a is None or rho_b is None or rho_a <= rho_b
    horizon = max(1, n_a, n_b)
    col = _column(x0, MAXPLUS)
    failing: int | None = None
    power_a = TropicalMatrix.identity(cm.calA.rows, MAXPLUS)
    power_bs = TropicalMatrix.identity(cm.calA.rows, MAXPLUS)
    for n in range(1, horizon + 1):
        power_a = mat_mul(power_a, cm.calA)
        power_bs = mat_mul(power_bs, bsharp)
        lhs = mat_mul(power_bs, mat_mul(power_a, col))
        if not leq(lhs, col):
            failing = n
            break
    return NecessaryReport(
        ok=order_ok and failing is None,
        failing_n=failing,
        order_ok=order_ok,
        n_checked=horizon,
    )


def _shift_min_zero(v: Sequence[Number]) -> tuple[Number, ...]:
    finite = [x for x in v if is_finite(x)]
    if not finite:
        return tuple(v)
    m = min(finite)
    return tuple(x - m if is_finite(x) else x for x in v)


def _candidate_pool(vectors: list[tuple[Number, ...]]) -> list[tuple[Number, ...]]:
    """Shift every vector so its minimum entry is 0, dropping duplicates."""
    pool: list[tuple[Number, ...]] = []
    for vec in vectors:
        shifted = _shift_min_zero(vec)
        if shifted not in pool:
            pool.append(shifted)
    return pool


def fastest_init(cm: CombinedModel) -> list[Candidate]:
    """Admissible initializations of the fastest periodic behavior.

    Candidates are eigenvectors of calA and, when the cyclicity p exceeds
    one, of its p-th power as well; the eigenspace of the power basis
    alone can miss admissible starts that are combinations of its
    generators.  A candidate is kept when every phase
    x(i) = calA^i (x) x0 stays in the image of (calB# (x) calA)*, and is
    shifted so its minimum entry is 0.  An empty result means no
    candidate passes, not an error.
    """
    if not is_irreducible(cm.calA):
        raise NotIrreducible("calA is not irreducible")
    p = cyclicity(cm.calA)
    rate = max_cycle_mean(cm.calA)
    vectors = eigenvectors(cm.calA)
    if p > 1:
        vectors = vectors + periodic_eigenvectors(cm.calA, p)
    guard = mat_mul(conjugate(cm.calB), cm.calA)
    out: list[Candidate] = []
    for x0 in _candidate_pool(vectors):
        state = _column(x0, MAXPLUS)
        admissible = True
        for _ in range(p):
            if not in_image_star(guard, state.entries):
                admissible = False
                break
            state = mat_mul(cm.calA, state)
        if admissible:
            out.append(Candidate(x0=x0, period=p, rate=rate))
    return out


def slowest_init(cm: CombinedModel) -> list[Candidate]:
    """Admissible initializations of the slowest periodic behavior.

    Dual of fastest_init: candidates come from the min-plus eigenvectors
    of calB and, for cyclicity q > 1, of its q-th power, and every phase
    x(i) = calB^i (x)' x0 must stay in the image of (calB# (x) calA)*.
    """
    if not is_irreducible(cm.calB):
        raise NotIrreducible("calB is not irreducible")
    q = cyclicity(cm.calB)
    rate = min_cycle_mean(cm.calB)
    vectors = min_eigenvectors(cm.calB)
    if q > 1:
        vectors = vectors + periodic_eigenvectors(cm.calB, q)
    guard = mat_mul(conjugate(cm.calB), cm.calA)
    out: list[Candidate] = []
    for x0 in _candidate_pool(vectors):
        state = _column(x0, MINPLUS)
        admissible = True
        for _ in range(q):
            if not in_image_star(guard, state.entries):
                admissible = False
                break
            state = mat_mul(cm.calB, state)
        if admissible:
            out.append(Candidate(x0=x0, period=q, rate=rate))
    return out


def run_trajectory(
    cm: CombinedModel,
    x0: Sequence[Number],
    mode: TrajectoryMode,
    steps: int,
    period_scalar: tuple[Number, int] | None = None,
) -> Trajectory:
    """Iterate the extremal recursion for the given number of steps.

    FASTEST steps with x(k) = calA (x) x(k-1), SLOWEST with
    x(k) = calB (x)' x(k-1); the result holds steps+1 states.
    """
    if mode is TrajectoryMode.FASTEST:
        matrix, tag = cm.calA, MAXPLUS
    elif mode is TrajectoryMode.SLOWEST:
        matrix, tag = cm.calB, MINPLUS
    else:
        raise ValueError("run_trajectory generates fastest or slowest runs only")
    state = _column(x0, tag)
    states = [tuple(state.entries)]
    for _ in range(steps):
        state = mat_mul(matrix, state)
        states.append(tuple(state.entries))
    return Trajectory(states=tuple(states), mode=mode, period_scalar=period_scalar)


def verify_trajectory(bundle: MatrixBundle, traj: Trajectory) -> list[Violation]:
    """Check a trajectory against the raw per-step constraints.

    For every k >= 1 the lower bound x(k) >= A (x) x(k-1) (+) Blow (x) x(k)
    and the upper bound x(k) <= B# (x)' x(k) (+)' C (x)' x(k-1) must hold;
    the initial state must satisfy B (x) x(0) <= x(0).  Violations name
    the step, transition, bound side and the signed slack.
    """
    if len(traj.states) < 2:
        raise ValueError("verification needs at least two states")
    names = bundle.index_map
    bsharp = conjugate(bundle.B)
    out: list[Violation] = []
    x_prev = _column(traj.states[0], MAXPLUS)
    init_bound = mat_mul(bundle.B, x_prev)
    for i in range(len(names)):
        if not x_prev[i, 0] >= init_bound[i, 0]:
            out.append(Violation(0, names[i], "initial", _slack(x_prev[i, 0], init_bound[i, 0])))
    for k in range(1, len(traj.states)):
        x_k = _column(traj.states[k], MAXPLUS)
        lower = mat_add(mat_mul(bundle.A, x_prev), mat_mul(bundle.Blow, x_k))
        upper = mat_add(
            mat_mul(bsharp, retag(x_k, MINPLUS)),
            mat_mul(bundle.C, retag(x_prev, MINPLUS)),
        )
        for i in range(len(names)):
            if not x_k[i, 0] >= lower[i, 0]:
                out.append(Violation(k, names[i], "lower", _slack(x_k[i, 0], lower[i, 0])))
            if not x_k[i, 0] <= upper[i, 0]:
                out.append(Violation(k, names[i], "upper", _slack(upper[i, 0], x_k[i, 0])))
        x_prev = x_k
    return out


def _slack(have: Number, bound: Number) -> Number | str:
    """Signed margin have - bound; symbolic when a sentinel is involved."""
    if is_finite(have) and is_finite(bound):
        return have - bound
    return f"{format_number(have)} vs {format_number(bound)}"
