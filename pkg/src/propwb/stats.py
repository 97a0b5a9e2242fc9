"""Statistical machinery: survey sample sizing, chi-square survival function,
and the Stuart-Maxwell marginal homogeneity test."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

from .errors import DegenerateTableError, SingularMatrixError

Z_TABLE = {0.90: 1.645, 0.95: 1.96, 0.99: 2.576}


@dataclass(frozen=True)
class SampleSpec:
    population_N: int | None  # None = infinite population
    confidence: float = 0.95
    margin_e: float = 0.05
    proportion_p: float = 0.5

    @property
    def z(self) -> float:
        if self.confidence not in Z_TABLE:
            raise ValueError(f"unsupported confidence {self.confidence}; choose from {sorted(Z_TABLE)}")
        return Z_TABLE[self.confidence]


def sample_size(spec: SampleSpec) -> int:
    """Cochran's formula with finite population correction, ceiling-rounded."""
    if not 0 < spec.margin_e < 1:
        raise ValueError("margin_e must be in (0,1)")
    if not 0 <= spec.proportion_p <= 1:
        raise ValueError("proportion_p must be in [0,1]")
    z = spec.z
    n0 = z * z * spec.proportion_p * (1 - spec.proportion_p) / (spec.margin_e ** 2)
    if spec.population_N is not None:
        if spec.population_N <= 0:
            raise ValueError("population_N must be positive")
        n0 = n0 / (1 + (n0 - 1) / spec.population_N)
    return max(1, math.ceil(n0))


def _gamma_p_series(a: float, x: float, tol: float = 1e-12, max_iter: int = 10_000) -> float:
    """Lower regularized incomplete gamma P(a,x) by series expansion."""
    if x == 0.0:
        return 0.0
    term = 1.0 / a
    total = term
    n = a
    for _ in range(max_iter):
        n += 1.0
        term *= x / n
        total += term
        if abs(term) < abs(total) * tol:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _gamma_q_contfrac(a: float, x: float, tol: float = 1e-12, max_iter: int = 10_000) -> float:
    """Upper regularized incomplete gamma Q(a,x) by Lentz continued fraction."""
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, max_iter):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < tol:
            break
    return h * math.exp(-x + a * math.log(x) - math.lgamma(a))


def chi_square_sf(x: float, df: int) -> float:
    """Upper-tail chi-square probability via the regularized incomplete gamma."""
    if x < 0:
        raise ValueError("x must be non-negative")
    if df < 1:
        raise ValueError("df must be >= 1")
    a = df / 2.0
    half = x / 2.0
    if half == 0.0:
        return 1.0
    if half < a + 1.0:
        return 1.0 - _gamma_p_series(a, half)
    return _gamma_q_contfrac(a, half)


def chi_square_cdf(x: float, df: int) -> float:
    return 1.0 - chi_square_sf(x, df)


@dataclass(frozen=True)
class ContingencyTable:
    labels: tuple[str, ...]
    counts: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        k = len(self.labels)
        if len(self.counts) != k or any(len(row) != k for row in self.counts):
            raise ValueError("counts must be a square matrix matching labels")
        if any(c < 0 for row in self.counts for c in row):
            raise ValueError("counts must be non-negative")


@dataclass(frozen=True)
class TestResult:
    statistic: float
    df: int
    p_value: float
    dropped_categories: tuple[str, ...] = ()


def _solve(matrix: list[list[float]], rhs: list[float]) -> list[float]:
    """Gaussian elimination with partial pivoting; raises on near-singular pivots."""
    n = len(rhs)
    a = [row[:] + [rhs[i]] for i, row in enumerate(matrix)]
    for col in range(n):
        pivot_row = max(range(col, n), key=lambda r: abs(a[r][col]))
        if abs(a[pivot_row][col]) < 1e-12:
            raise SingularMatrixError(f"reduced covariance matrix is singular at column {col}")
        a[col], a[pivot_row] = a[pivot_row], a[col]
        for r in range(col + 1, n):
            factor = a[r][col] / a[col][col]
            for c in range(col, n + 1):
                a[r][c] -= factor * a[col][c]
    x = [0.0] * n
    for r in range(n - 1, -1, -1):
        x[r] = (a[r][n] - sum(a[r][c] * x[c] for c in range(r + 1, n))) / a[r][r]
    return x


def stuart_maxwell(t: ContingencyTable) -> TestResult:
    """Marginal homogeneity test for a paired k x k categorical table."""
    k = len(t.labels)
    if k < 2:
        raise DegenerateTableError("table must have at least 2 categories")
    rows = [sum(t.counts[i]) for i in range(k)]
    cols = [sum(t.counts[i][j] for i in range(k)) for j in range(k)]

    retained = [i for i in range(k) if rows[i] + cols[i] > 0]
    dropped = [t.labels[i] for i in range(k) if rows[i] + cols[i] == 0]
    if len(retained) < 2:
        raise DegenerateTableError("fewer than 2 categories with non-zero marginals")

    reduced = retained[:-1]  # last retained category dropped for the reduced system
    d = [rows[i] - cols[i] for i in reduced]
    s = [
        [
            rows[i] + cols[i] - 2 * t.counts[i][i] if i == j else -(t.counts[i][j] + t.counts[j][i])
            for j in reduced
        ]
        for i in reduced
    ]
    if all(v == 0 for v in d):
        statistic = 0.0
    else:
        solved = _solve([list(map(float, row)) for row in s], [float(v) for v in d])
        statistic = sum(di * si for di, si in zip(d, solved))
    df = len(retained) - 1
    return TestResult(statistic=statistic, df=df, p_value=chi_square_sf(statistic, df),
                      dropped_categories=tuple(dropped))


def paired_contingency(a: dict, b: dict, labels) -> ContingencyTable:
    """Cross-tabulate two labelings of the same item set."""
    labels = tuple(labels)
    if set(a) != set(b):
        raise ValueError("item sets differ between the two labelings")
    index = {l: i for i, l in enumerate(labels)}
    counts = [[0] * len(labels) for _ in labels]
    for item in a:
        la, lb = a[item], b[item]
        if la not in index:
            raise ValueError(f"label {la!r} not in declared label set")
        if lb not in index:
            raise ValueError(f"label {lb!r} not in declared label set")
        counts[index[la]][index[lb]] += 1
    return ContingencyTable(labels=labels, counts=tuple(tuple(row) for row in counts))


def load_table_csv(path) -> ContingencyTable:
    """Square table CSV with a label header row and label row headers."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        labels = tuple(header[1:])
        counts = []
        for row in reader:
            if not row:
                continue
            counts.append(tuple(int(c) for c in row[1:]))
    return ContingencyTable(labels=labels, counts=tuple(counts))
