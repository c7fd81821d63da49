"""Transfer-operator machinery: pressure of a locally constant potential,
the induced Gibbs Markov measure, exact integrals of sequence tables
against Markov measures (Kingman limits) and weak-Gibbs constants C_n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .markov import MarkovMeasure, MeasureError, entropy
from .numerics import log_fraction
from .potential import LocallyConstantPotential
from .seqtable import SeqTable, TableError
from .shiftcore import Sft, Word, is_irreducible
from .verdicts import DEFAULT_SLOPE_THRESHOLD, GibbsVerdict, growth_flag, trend_stats

__all__ = [
    "MarkovMeasure", "entropy", "GibbsData", "transfer_pressure",
    "integrate_table", "IntegralReport", "weak_gibbs_constants",
    "WeakGibbsReport", "pushforward_sandwich", "SandwichReport", "GibbsError",
]

_POWER_TOL = 1e-14
_MAX_ITER = 500_000


class GibbsError(ValueError):
    pass


@dataclass
class GibbsData:
    potential: LocallyConstantPotential
    pressure: float
    lam_exact: Fraction | None
    states: tuple[Word, ...]
    right: tuple[float, ...]
    left: tuple[float, ...]
    measure: MarkovMeasure
    residual: float
    c_n: dict[int, float] = field(default_factory=dict)


def _power_iteration(matrix, tol=_POWER_TOL):
    """Perron eigenpair of a nonnegative irreducible matrix by shifted power
    iteration (the shift restores primitivity for periodic digraphs), with a
    deterministic uniform start and unit 1-norm normalization."""
    n = len(matrix)
    gamma = max(max(row) for row in matrix)
    shifted = [[matrix[i][j] + (gamma if i == j else 0.0) for j in range(n)] for i in range(n)]
    v = [1.0 / n] * n
    lam_shift = 0.0
    for _ in range(_MAX_ITER):
        w = [sum(shifted[i][j] * v[j] for j in range(n)) for i in range(n)]
        norm = math.fsum(w)
        w = [x / norm for x in w]
        if max(abs(a - b) for a, b in zip(w, v)) <= tol:
            v = w
            lam_shift = norm
            break
        v = w
        lam_shift = norm
    lam = lam_shift - gamma
    residual = max(abs(sum(matrix[i][j] * v[j] for j in range(n)) - lam * v[i]) for i in range(n))
    return lam, v, residual


def _try_rationalize(matrix_exact, lam: float, right, left):
    """Exact eigendata when the weight matrix is integral and the eigenpair
    is rational (full shifts and friends); verified over Fractions."""
    try:
        lam_q = Fraction(lam).limit_denominator(10 ** 6)
        r_q = [Fraction(x).limit_denominator(10 ** 6) for x in right]
        l_q = [Fraction(x).limit_denominator(10 ** 6) for x in left]
    except (OverflowError, ZeroDivisionError):
        return None
    n = len(right)
    for i in range(n):
        if sum(matrix_exact[i][j] * r_q[j] for j in range(n)) != lam_q * r_q[i]:
            return None
        if sum(l_q[j] * matrix_exact[j][i] for j in range(n)) != lam_q * l_q[i]:
            return None
    total = sum(r_q)
    r_q = [x / total for x in r_q]
    total = sum(l_q)
    l_q = [x / total for x in l_q]
    return lam_q, r_q, l_q


def transfer_pressure(sft: Sft, f: LocallyConstantPotential) -> GibbsData:
    """Pressure P(f) = log of the Perron eigenvalue of the weighted
    adjacency matrix on (r-1)-block states (1-block states for r = 1), plus
    the Gibbs Markov measure from the standard eigenvector conjugation."""
    if f.language is not sft:
        raise GibbsError("potential must live on the given shift")
    if not is_irreducible(sft):
        raise GibbsError("transfer pressure needs an irreducible shift")
    r = f.range
    k = max(r - 1, 1)
    states = tuple(sft.blocks(k))
    index = {s: i for i, s in enumerate(states)}
    n = len(states)
    weights = [[0.0] * n for _ in range(n)]
    integral = f.is_zero
    for s in states:
        i = index[s]
        for x in sft.followers(s[-1]):
            t = s[1:] + (x,) if r >= 2 else (x,)
            j = index.get(t)
            if j is None:
                continue
            if r == 1:
                w = f.value(s)        # weight on the source symbol
            else:
                w = f.value(s + (x,))
            weights[i][j] = math.exp(w)
    lam, right, residual_r = _power_iteration(weights)
    transposed = [[weights[j][i] for j in range(n)] for i in range(n)]
    lam_l, left, residual_l = _power_iteration(transposed)
    residual = max(residual_r, residual_l, abs(lam - lam_l))
    if lam <= 0:
        raise GibbsError("Perron eigenvalue must be positive")

    lam_exact = None
    matrix = None
    stationary = None
    if integral:
        ints = [[int(round(weights[i][j])) for j in range(n)] for i in range(n)]
        data = _try_rationalize(ints, lam, right, left)
        if data is not None:
            lam_q, r_q, l_q = data
            lam_exact = lam_q
            matrix = [[Fraction(ints[i][j]) * r_q[j] / (lam_q * r_q[i]) for j in range(n)]
                      for i in range(n)]
            norm = sum(l_q[i] * r_q[i] for i in range(n))
            stationary = [l_q[i] * r_q[i] / norm for i in range(n)]
    if matrix is None:
        matrix = [[weights[i][j] * right[j] / (lam * right[i]) for j in range(n)]
                  for i in range(n)]
        # renormalize rows against float drift before the measure validates
        for i in range(n):
            s = math.fsum(matrix[i])
            matrix[i] = [x / s for x in matrix[i]]
        norm = math.fsum(left[i] * right[i] for i in range(n))
        stationary = [left[i] * right[i] / norm for i in range(n)]
        s = math.fsum(stationary)
        stationary = [x / s for x in stationary]
    measure = MarkovMeasure(sft, k, matrix, stationary, exact=lam_exact is not None)
    return GibbsData(
        potential=f,
        pressure=float(log_fraction(lam_exact)) if lam_exact is not None else math.log(lam),
        lam_exact=lam_exact,
        states=states,
        right=tuple(right),
        left=tuple(left),
        measure=measure,
        residual=residual,
    )


def self_check_constants(gd: GibbsData, depth: int,
                         slope_threshold: float = DEFAULT_SLOPE_THRESHOLD) -> "WeakGibbsReport":
    """Weak-Gibbs constants of the induced measure against its own
    potential's additive table; fills gd.c_n and should come out bounded."""
    from .seqtable import build_additive_table

    table = build_additive_table(gd.potential, depth)
    report = weak_gibbs_constants(gd.measure, table, gd.pressure,
                                  depth_max=depth, exact_base=gd.lam_exact,
                                  pressure_source="transfer",
                                  slope_threshold=slope_threshold)
    gd.c_n = dict(report.log_cn)
    return report


@dataclass
class IntegralReport:
    depth: int
    value: float
    per_n: list[float]
    running_inf: list[float]
    kingman_consistent: bool

    def as_dict(self):
        return {"depth": self.depth, "value": self.value, "per_n": self.per_n,
                "running_inf": self.running_inf,
                "kingman_consistent": self.kingman_consistent}


def integrate_table(t: SeqTable, m: MarkovMeasure, n: int) -> IntegralReport:
    """(1/n) integral of log f_n dm, with the running infimum over depths
    up to n (the Kingman limit from above for subadditive tables)."""
    if m.alphabet != t.alphabet:
        raise MeasureError("measure alphabet does not match the table")
    if n > t.depth_max:
        raise TableError("depth %d exceeds the table (max %d)" % (n, t.depth_max))
    raw = []
    for depth in range(1, n + 1):
        mass_total = 0.0
        acc = []
        for w, lv in t.logs[depth].items():
            mw = float(m.cylinder_mass(w))
            if mw:
                acc.append(mw * lv)
                mass_total += mw
        if abs(mass_total - 1.0) > 1e-9:
            raise MeasureError("measure puts mass %g outside the table language"
                               % (1.0 - mass_total))
        raw.append(math.fsum(acc))
    per_n = [b / depth for depth, b in zip(range(1, n + 1), raw)]
    running = []
    best = float("inf")
    for v in per_n:
        best = min(best, v)
        running.append(best)
    consistent = True
    for total in range(2, n + 1):
        for a in range(1, total):
            if raw[total - 1] > raw[a - 1] + raw[total - a - 1] + 1e-9:
                consistent = False
    return IntegralReport(n, per_n[-1], per_n, running, consistent)


@dataclass
class WeakGibbsReport:
    log_cn: dict[int, float]
    exact_cn: dict[int, Fraction] | None
    verdict: GibbsVerdict
    exact: bool
    pressure: float
    pressure_source: str
    stats: dict

    def as_dict(self):
        return {"log_cn": {str(n): v for n, v in sorted(self.log_cn.items())},
                "exact_cn": None if self.exact_cn is None else
                {str(n): str(v) for n, v in sorted(self.exact_cn.items())},
                "verdict": self.verdict.value, "exact": self.exact,
                "pressure": self.pressure, "pressure_source": self.pressure_source,
                "stats": self.stats}


def weak_gibbs_constants(mu: MarkovMeasure, t: SeqTable, pressure: float,
                         depth_max: int | None = None,
                         exact_base: Fraction | None = None,
                         pressure_source: str = "given",
                         slope_threshold: float = DEFAULT_SLOPE_THRESHOLD) -> WeakGibbsReport:
    """C_n = worst two-sided ratio of mu[u] against e^{-nP} f_n(u).

    Verdict: GIBBS when sup_n C_n shows no growth, WEAK-GIBBS when the trend
    is consistent with (1/n) log C_n -> 0, NEITHER on linear growth of
    log C_n.  Exact Fractions are used when the measure, the table and the
    pressure base all are exact; only then is C_n == 1 a certified identity.
    """
    if mu.alphabet != t.alphabet:
        raise MeasureError("measure alphabet does not match the table")
    depth = min(depth_max or t.depth_max, t.depth_max)
    exact = mu.exact and t.is_exact and exact_base is not None

    # cylinder masses built incrementally level by level
    levels: list[dict] = []
    k = mu.order
    prev: dict = {}
    for n in range(1, depth + 1):
        cur = {}
        if n <= k:
            for w in t.logs[n]:
                cur[w] = mu.cylinder_mass(w)
        else:
            for w in t.logs[n]:
                base_mass = prev[w[:-1]]
                if base_mass:
                    i = mu._index[w[-k - 1:-1]]
                    j = mu._index[w[-k:]]
                    cur[w] = base_mass * mu.matrix[i][j]
                else:
                    cur[w] = base_mass
        levels.append(cur)
        prev = cur

    def scan(n: int):
        worst_log = 0.0
        worst_exact = Fraction(1)
        masses = levels[n - 1]
        if exact:
            lam_n = exact_base ** n
            for w in t.logs[n]:
                mw = masses[w]
                if not mw:
                    return float("inf"), worst_exact
                rho = mw * lam_n / t.exact[n][w]
                big = rho if rho >= 1 else 1 / rho
                if big > worst_exact:
                    worst_exact = big
            return log_fraction(worst_exact), worst_exact
        for w, lv in t.logs[n].items():
            mw = masses[w]
            if not mw:
                worst_log = float("inf")
                continue
            log_rho = (log_fraction(mw) if isinstance(mw, Fraction) else math.log(mw)) \
                + n * pressure - lv
            worst_log = max(worst_log, abs(log_rho))
        return worst_log, None

    from .parallel import pmap
    scanned = pmap(scan, range(1, depth + 1))
    log_cn = {n: row[0] for n, row in zip(range(1, depth + 1), scanned)}
    exact_cn = {n: row[1] for n, row in zip(range(1, depth + 1), scanned)} if exact else None
    ns = sorted(log_cn)
    values = [log_cn[n] for n in ns]
    if exact and all(c == 1 for c in exact_cn.values()):
        verdict = GibbsVerdict.GIBBS
        stats = {"certainty": "exact", "max_log_cn": 0.0}
        return WeakGibbsReport(log_cn, exact_cn, verdict, True, pressure,
                               pressure_source, stats)
    if any(math.isinf(v) for v in values):
        return WeakGibbsReport(log_cn, exact_cn, GibbsVerdict.NEITHER, False,
                               pressure, pressure_source,
                               {"certainty": "exact", "reason": "vanishing cylinder mass"})
    fired, stats = growth_flag(ns, values, slope_threshold)
    trend = trend_stats(ns, values)
    if trend.bounded:
        verdict = GibbsVerdict.GIBBS
    elif fired:
        verdict = GibbsVerdict.NEITHER
    else:
        verdict = GibbsVerdict.WEAK_GIBBS
    detail = {"certainty": "evidence", "slope": stats.slope,
              "r_squared": stats.r_squared, "max_log_cn": max(values),
              "normalized_last": values[-1] / ns[-1]}
    return WeakGibbsReport(log_cn, exact_cn, verdict, exact, pressure,
                           pressure_source, detail)


@dataclass
class SandwichReport:
    depth: int
    ok: bool
    exact: bool
    worst_margin: float
    failures: list

    def as_dict(self):
        return {"depth": self.depth, "ok": self.ok, "exact": self.exact,
                "worst_margin": self.worst_margin,
                "failures": self.failures[:5]}


def pushforward_sandwich(mu: MarkovMeasure, pi, f: LocallyConstantPotential,
                         gt: SeqTable, pressure: float,
                         exact_base: Fraction | None,
                         weak_report: WeakGibbsReport, depth: int) -> SandwichReport:
    """Check 1/(C_n M_n) <= pi(mu)[y] / (e^{-nP} g_n(y)) <= C_n M_n for all
    stored image words, where C_n are the weak-Gibbs constants of mu for f
    on the domain and M_n the variation constants of f.

    Zero tolerance on the exact rational path; 1e-9 slack on floats.
    """
    from .factor import pushforward_cylinder
    from .potential import variation_constant

    exact = (exact_base is not None and mu.exact and gt.is_exact
             and weak_report.exact_cn is not None)
    worst = float("inf")
    failures = []
    for n in range(1, depth + 1):
        log_mn = variation_constant(f, n)
        if exact and log_mn != 0.0:
            exact_here = False
        else:
            exact_here = exact
        cn_log = weak_report.log_cn[n]
        for y in gt.words(n):
            names = [gt.alphabet[i] for i in y]
            mass = pushforward_cylinder(mu, pi, y)
            if exact_here:
                ratio = mass * exact_base ** n / gt.exact_value(n, y)
                cn = weak_report.exact_cn[n]
                ok = (1 / cn) <= ratio <= cn
                margin = float(log_fraction(cn)) - abs(float(log_fraction(ratio))) if ratio > 0 else float("-inf")
            else:
                if mass == 0:
                    failures.append({"n": n, "word": names, "reason": "zero mass"})
                    continue
                log_ratio = (log_fraction(mass) if isinstance(mass, Fraction)
                             else math.log(mass)) + n * pressure - gt.log_value(n, y)
                bound = cn_log + log_mn
                margin = bound - abs(log_ratio) + 1e-9
                ok = margin >= 0
            if not ok:
                failures.append({"n": n, "word": names})
            worst = min(worst, margin)
    return SandwichReport(depth, not failures, exact, worst, failures)
