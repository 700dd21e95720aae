"""Long-run average payoffs and pure saddle-point solving.

For a fixed pure stationary pair (f, g) the induced chain's Cesaro
limits exist, so the lim-inf in the undiscounted payoff criterion is an
actual limit and the payoff from initial state s is computed directly as

    phi(s, f, g) = [Q* r](s) / [Q* tau](s)

(the denominator is positive because expected sojourns are). Per initial
state the payoff matrix over all pure pairs is searched for a pure
saddle point with the row player maximising; the per-state saddle rows
and columns assemble the optimal semi-stationary strategies. A missing
saddle is a hard error: perfect-information games are expected to
always have one, and the accompanying certificate checks the stronger
statement that no 2x2 submatrix is saddle-free.

Payoff vectors are cached per (game, f, g, method), so the N per-state
matrices of one solve reuse each pair's chain computation.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import NumericalError, SaddlePointError
from .game import GameSpec, PLAYER_I, PLAYER_II, validate
from .markov import (
    AVERAGING_N_MAX,
    AVERAGING_TOL,
    DEFLATION_TOL,
    cesaro,
)
from .strategies import (
    PureStationaryStrategy,
    SemiStationaryStrategy,
    enumerate_pure,
    induce,
)

EPS_SADDLE_REL = 1e-9
# a computed value this far from a bundled reference value gets flagged
REFERENCE_FLAG_TOL = 1e-3
# memory guard for the vectorized 2x2 sweep
_CHUNK_QUADRUPLES = 10**7


@dataclass(frozen=True)
class SaddleResult:
    """Outcome of the pure saddle search on one payoff matrix.

    ``row``/``col`` are the lexicographically smallest saddle cell
    (0-based ordinals), ``all_saddles`` every saddle cell in row-major
    order, ``certificate_2x2`` the 2x2 sweep verdict when one was run.
    """

    exists: bool
    row: int | None
    col: int | None
    value: float | None
    all_saddles: tuple[tuple[int, int], ...]
    certificate_2x2: bool | None = None


@dataclass(frozen=True)
class SaddleCertificate:
    """Verdict of the exhaustive 2x2 submatrix sweep. ``violation`` is
    the first saddle-free quadruple (i, i', j, j'), 1-based, if any."""

    passed: bool
    violation: tuple[int, int, int, int] | None = None


@dataclass(frozen=True, eq=False)
class PayoffMatrix:
    """Payoffs phi(s, f_i, g_j) for one initial state s, rows indexed by
    the maximiser's ordinals and columns by the minimiser's."""

    initial_state: int
    entries: np.ndarray
    row_ordinals: tuple[int, ...]
    col_ordinals: tuple[int, ...]


@dataclass(frozen=True, eq=False)
class SolveReport:
    """Full solve outcome: value vector (index s - 1 for state s),
    optimal semi-stationary strategies for both players, the per-state
    saddle results and payoff matrices, and a diagnostics dict."""

    value: tuple[float, ...]
    maximiser: SemiStationaryStrategy
    minimiser: SemiStationaryStrategy
    per_state: tuple[SaddleResult, ...]
    matrices: tuple[PayoffMatrix, ...]
    method: str
    diagnostics: dict


def saddle_tolerance(entries) -> float:
    """Comparison tolerance scaled to the matrix: EPS_SADDLE_REL *
    max(1, max|entry|)."""
    a = np.asarray(entries, dtype=float)
    return EPS_SADDLE_REL * max(1.0, _finite_max_abs(a))


def _finite_max_abs(a: np.ndarray) -> float:
    return float(np.max(np.abs(a))) if a.size else 0.0


@lru_cache(maxsize=None)
def _pair_payoff(spec: GameSpec, f: PureStationaryStrategy,
                 g: PureStationaryStrategy, method: str,
                 deflation_tol: float, averaging_tol: float,
                 averaging_n_max: int) -> tuple[float, ...]:
    chain = induce(spec, f, g)
    result = cesaro(
        chain.q,
        method=method,
        deflation_tol=deflation_tol,
        averaging_tol=averaging_tol,
        averaging_n_max=averaging_n_max,
    )
    numerator = result.q_star @ chain.r
    denominator = result.q_star @ chain.tau
    if float(denominator.min()) <= 0.0:
        raise NumericalError(
            "nonpositive expected time in the limit; sojourn validation "
            "should have prevented this"
        )
    return tuple(float(x) for x in numerator / denominator)


def payoff_vector(spec: GameSpec, f: PureStationaryStrategy,
                  g: PureStationaryStrategy, method: str = "structural", *,
                  deflation_tol: float = DEFLATION_TOL,
                  averaging_tol: float = AVERAGING_TOL,
                  averaging_n_max: int = AVERAGING_N_MAX) -> np.ndarray:
    """phi(s, f, g) for every initial state s, as an array indexed
    s - 1."""
    try:
        values = _pair_payoff(
            spec, f, g, method, deflation_tol, averaging_tol, averaging_n_max
        )
    except NumericalError as e:
        raise NumericalError(f"pair ({f.label}, {g.label}): {e}") from e
    return np.array(values)


def build_payoff_matrix(spec: GameSpec, initial_state: int,
                        method: str = "structural", *,
                        deflation_tol: float = DEFLATION_TOL,
                        averaging_tol: float = AVERAGING_TOL,
                        averaging_n_max: int = AVERAGING_N_MAX) -> PayoffMatrix:
    """The D1 x D2 payoff matrix for one initial state."""
    if not 1 <= initial_state <= spec.n:
        raise ValueError(f"initial state {initial_state} out of range 1..{spec.n}")
    fs = enumerate_pure(spec, PLAYER_I)
    gs = enumerate_pure(spec, PLAYER_II)
    entries = np.empty((len(fs), len(gs)))
    for f in fs:
        for g in gs:
            entries[f.ordinal, g.ordinal] = payoff_vector(
                spec, f, g, method,
                deflation_tol=deflation_tol,
                averaging_tol=averaging_tol,
                averaging_n_max=averaging_n_max,
            )[initial_state - 1]
    return PayoffMatrix(
        initial_state=initial_state,
        entries=entries,
        row_ordinals=tuple(range(len(fs))),
        col_ordinals=tuple(range(len(gs))),
    )


def find_pure_saddle(entries, eps: float | None = None) -> SaddleResult:
    """All pure saddle cells of a matrix game with the row player
    maximising.

    A cell qualifies when it is within ``eps`` of both its row minimum
    and its column maximum; this coincides with the classic test
    max-of-row-mins >= min-of-col-maxes up to comparison fuzz (when that
    inequality holds within eps, the (argmax, argmin) cell always
    qualifies). Reported row/col is the row-major first cell. Saddle
    values are asserted to agree within 2 eps (interchangeability)."""
    a = np.asarray(entries, dtype=float)
    if a.ndim != 2 or a.size == 0:
        raise ValueError(f"payoff matrix must be 2-D and non-empty, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("payoff matrix has non-finite entries")
    if eps is None:
        eps = saddle_tolerance(a)
    row_min = a.min(axis=1)
    col_max = a.max(axis=0)
    mask = (a <= row_min[:, None] + eps) & (a >= col_max[None, :] - eps)
    cells = np.argwhere(mask)
    if cells.size == 0:
        return SaddleResult(False, None, None, None, ())
    values = a[mask]
    if float(values.max() - values.min()) > 2 * eps:
        raise NumericalError(
            "saddle cells disagree beyond tolerance: values span "
            f"[{values.min()!r}, {values.max()!r}] with eps {eps!r}"
        )
    i, j = (int(x) for x in cells[0])
    return SaddleResult(
        exists=True,
        row=i,
        col=j,
        value=float(a[i, j]),
        all_saddles=tuple((int(r), int(c)) for r, c in cells),
    )


def check_all_2x2(entries, eps: float | None = None) -> SaddleCertificate:
    """Sweep every 2x2 submatrix (row pair x column pair) for the
    saddle-free pattern: with corners a=(i,j), b=(i,j'), c=(i',j),
    d=(i',j'), a 2x2 matrix has no pure saddle exactly when
    min(a, d) > max(b, c) or max(a, d) < min(b, c) (strictly, beyond
    ``eps``). Matrices with fewer than two rows or columns pass
    vacuously. The first violation in lexicographic (i, i', j, j') order
    is reported 1-based."""
    a = np.asarray(entries, dtype=float)
    if a.ndim != 2:
        raise ValueError(f"payoff matrix must be 2-D, got shape {a.shape}")
    d1, d2 = a.shape
    if d1 < 2 or d2 < 2:
        return SaddleCertificate(True, None)
    if eps is None:
        eps = saddle_tolerance(a)
    rows_i, rows_j = np.triu_indices(d1, k=1)   # lexicographic row pairs
    cols_i, cols_j = np.triu_indices(d2, k=1)
    n_col_pairs = cols_i.size
    block = max(1, _CHUNK_QUADRUPLES // n_col_pairs)
    for start in range(0, rows_i.size, block):
        ri = rows_i[start:start + block]
        rj = rows_j[start:start + block]
        tl = a[ri[:, None], cols_i[None, :]]
        tr = a[ri[:, None], cols_j[None, :]]
        bl = a[rj[:, None], cols_i[None, :]]
        br = a[rj[:, None], cols_j[None, :]]
        diag_low = (tl < tr - eps) & (tl < bl - eps) & (br < tr - eps) & (br < bl - eps)
        diag_high = (tl > tr + eps) & (tl > bl + eps) & (br > tr + eps) & (br > bl + eps)
        bad = diag_low | diag_high
        if bad.any():
            flat = int(np.argmax(bad))
            rp, cp = divmod(flat, n_col_pairs)
            return SaddleCertificate(
                passed=False,
                violation=(
                    int(ri[rp]) + 1,
                    int(rj[rp]) + 1,
                    int(cols_i[cp]) + 1,
                    int(cols_j[cp]) + 1,
                ),
            )
    return SaddleCertificate(True, None)


def _reference_deltas(spec: GameSpec, values: tuple[float, ...]) -> tuple[dict, ...]:
    if spec.reference_values is None:
        return ()
    out = []
    for s, (got, ref) in enumerate(zip(values, spec.reference_values), start=1):
        if abs(got - ref) > REFERENCE_FLAG_TOL * max(1.0, abs(ref)):
            out.append(
                {"state": s, "computed": got, "reference": ref, "delta": got - ref}
            )
    return tuple(out)


def solve(spec: GameSpec, method: str = "structural", *,
          saddle_eps: float | None = None,
          deflation_tol: float = DEFLATION_TOL,
          averaging_tol: float = AVERAGING_TOL,
          averaging_n_max: int = AVERAGING_N_MAX) -> SolveReport:
    """Value vector and optimal pure semi-stationary strategies.

    Builds the payoff matrix of every initial state, locates its pure
    saddle cells (raising :class:`SaddlePointError` if a state has
    none), takes the lexicographically smallest cell per state, and
    assembles one strategy per player whose state-s component is that
    cell's row/column strategy. Diagnostics carry the strategy-space
    sizes, per-state saddle multiplicity, the 2x2 certificate verdicts,
    and deltas against bundled reference values if the game has any."""
    report = validate(spec)
    fs = enumerate_pure(spec, PLAYER_I)
    gs = enumerate_pure(spec, PLAYER_II)
    matrices: list[PayoffMatrix] = []
    per_state: list[SaddleResult] = []
    values: list[float] = []
    f_parts: list[PureStationaryStrategy] = []
    g_parts: list[PureStationaryStrategy] = []
    violations: list[tuple[int, int, int, int] | None] = []
    for s in range(1, spec.n + 1):
        pm = build_payoff_matrix(
            spec, s, method,
            deflation_tol=deflation_tol,
            averaging_tol=averaging_tol,
            averaging_n_max=averaging_n_max,
        )
        eps = saddle_eps if saddle_eps is not None else saddle_tolerance(pm.entries)
        certificate = check_all_2x2(pm.entries, eps)
        found = find_pure_saddle(pm.entries, eps)
        found = dataclasses.replace(found, certificate_2x2=certificate.passed)
        if not found.exists:
            raise SaddlePointError(
                f"no pure saddle point in the payoff matrix for initial "
                f"state {s}; the perfect-information guarantee failed",
                matrix=pm,
            )
        matrices.append(pm)
        per_state.append(found)
        values.append(found.value)
        f_parts.append(fs[found.row])
        g_parts.append(gs[found.col])
        violations.append(certificate.violation)
    value_t = tuple(values)
    diagnostics = {
        "d1": report.d1,
        "d2": report.d2,
        "saddle_multiplicity": tuple(len(sr.all_saddles) for sr in per_state),
        "certificate_2x2": tuple(sr.certificate_2x2 for sr in per_state),
        "certificate_violations": tuple(violations),
        "reference_deltas": _reference_deltas(spec, value_t),
    }
    return SolveReport(
        value=value_t,
        maximiser=SemiStationaryStrategy(PLAYER_I, tuple(f_parts)),
        minimiser=SemiStationaryStrategy(PLAYER_II, tuple(g_parts)),
        per_state=tuple(per_state),
        matrices=tuple(matrices),
        method=method,
        diagnostics=diagnostics,
    )
