"""Decision procedures: periodic-point and uniform defects of a candidate
h against a sequence table, sup-norm (Chebyshev) fitting of h, periodic
certificates built from bridged fiber words, and the aggregate
compensation-function verdict.

Verdicts are three-valued: CERTIFIED needs exact arithmetic identities,
REFUTED needs an exact witness of growth (or the profile flag), everything
else is EVIDENCE with decay statistics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .factor import OneBlockFactor
from .lp import chebyshev_fit_exact, chebyshev_fit_float
from .numerics import common_power_base, power_exponent
from .potential import (LocallyConstantPotential, birkhoff_extremes_coeff,
                        birkhoff_inf, birkhoff_sup, periodic_birkhoff,
                        periodic_birkhoff_coeff, variation_constant)
from .seqtable import SeqTable, TableError, build_g_table, defect_profile
from .shiftcore import PeriodicPoint, Word, bridge, is_irreducible
from .verdicts import DEFAULT_SLOPE_THRESHOLD, Verdict, decays_to_zero

_EXACT_FIT_LIMIT = 4096  # constraint cap for the exact simplex path


class DetectError(ValueError):
    pass


# ---------------------------------------------------------------------------
# exact exponent plumbing

def table_power_base(gt: SeqTable) -> int | None:
    """Common integer base b with every exact table value a power of b."""
    if not gt.is_exact:
        return None
    values = set()
    for level in gt.exact.values():
        values.update(level.values())
    return common_power_base(values)


def _exponent(gt: SeqTable, n: int, w: Word, base: int) -> Fraction | None:
    e = power_exponent(gt.exact_value(n, w), base)
    return None if e is None else Fraction(e)


# ---------------------------------------------------------------------------
# defects of a candidate h

def periodic_defect(gt: SeqTable, h: LocallyConstantPotential, y: PeriodicPoint,
                    J: int) -> list[float]:
    """d_{y,j} = (1/(jq)) (log g_{jq}(block^j) - S_{jq} h(y)) for j = 1..J;
    the Birkhoff sum at the periodic point is exact from the block."""
    q = y.period
    if J < 1 or J * q > gt.depth_max:
        raise TableError("J*q exceeds the table depth")
    out = []
    for j in range(1, J + 1):
        n = j * q
        w = y.word(n)
        if not gt.has_word(n, w):
            raise DetectError("periodic block %s is not in the image language" % (w,))
        out.append((gt.log_value(n, w) - periodic_birkhoff(h, y, n)) / n)
    return out


def periodic_defect_exact(gt: SeqTable, h: LocallyConstantPotential,
                          y: PeriodicPoint, J: int) -> list[Fraction] | None:
    """Exact defects in units of log(base), or None when the exact
    representations don't line up."""
    if not (gt.is_exact and h.is_exact):
        return None
    base = h.exact_base
    q = y.period
    out = []
    for j in range(1, J + 1):
        n = j * q
        w = y.word(n)
        if not gt.has_word(n, w):
            raise DetectError("periodic block %s is not in the image language" % (w,))
        e = _exponent(gt, n, w, base)
        if e is None:
            return None
        out.append((e - periodic_birkhoff_coeff(h, y, n)) / n)
    return out


def uniform_defect(gt: SeqTable, h: LocallyConstantPotential, n: int) -> float:
    """u_n = max over depth-n words of (1/n)|log g_n(y) - sup S_n h on [y]|."""
    worst = 0.0
    for w in gt.words(n):
        worst = max(worst, abs(gt.log_value(n, w) - birkhoff_sup(h, w)))
    return worst / n


def uniform_defect_exact(gt: SeqTable, h: LocallyConstantPotential, n: int) -> Fraction | None:
    if not (gt.is_exact and h.is_exact):
        return None
    base = h.exact_base
    worst = Fraction(0)
    exps: dict[Fraction, Fraction | None] = {}
    for w in gt.words(n):
        v = gt.exact_value(n, w)
        if v not in exps:
            e = power_exponent(v, base)
            exps[v] = None if e is None else Fraction(e)
        e = exps[v]
        if e is None:
            return None
        d = abs(e - birkhoff_extremes_coeff(h, w)[0])
        if d > worst:
            worst = d
    return worst / n


def uniform_defects_exact_all(gt: SeqTable, h: LocallyConstantPotential) -> dict[int, Fraction] | None:
    """Exact uniform defects at every table depth in one incremental pass.

    Walks the word tree once, accumulating the contained-window Birkhoff
    coefficients (integers over a common denominator) and adding the
    per-suffix sup tail at readout, so exact certification at depth 18 stays
    linear in the table size instead of quadratic.
    """
    if not (gt.is_exact and h.is_exact):
        return None
    base = h.exact_base
    r = h.range
    den = 1
    for c in h.exact_coeffs.values():
        den = den * c.denominator // math.gcd(den, c.denominator)
    cint = {w: int(c * den) for w, c in h.exact_coeffs.items()}
    tails: dict[Word, int] = {}
    if r >= 2:
        for s in h.language.blocks(r - 1):
            tails[s] = int(birkhoff_extremes_coeff(h, s)[0] * den)

    out: dict[int, Fraction] = {}
    inner: dict[Word, int] = {(): 0}
    for n in range(1, gt.depth_max + 1):
        nxt: dict[Word, int] = {}
        for w in gt.logs[n]:
            add = cint[w[-r:]] if n >= r else 0
            nxt[w] = inner[w[:-1]] + add
        inner = nxt
        worst = 0
        exps: dict[Fraction, int | None] = {}
        for w, csum in inner.items():
            v = gt.exact[n][w]
            if v not in exps:
                exps[v] = power_exponent(v, base)
            e = exps[v]
            if e is None:
                return None
            if n >= r - 1 and r >= 2:
                total = csum + tails[w[n - r + 1:]]
            elif r == 1:
                total = csum
            else:
                total = int(birkhoff_extremes_coeff(h, w)[0] * den)
            d = abs(e * den - total)
            if d > worst:
                worst = d
        out[n] = Fraction(worst, den * n)
    return out


# ---------------------------------------------------------------------------
# Chebyshev fit

@dataclass
class FitResult:
    r: int
    n_fit: int
    values: dict[Word, float]
    tstar: float
    solver: str
    coeffs: dict[Word, Fraction] | None = None
    base: int | None = None
    tstar_exact: Fraction | None = None
    boundary: dict[Word, float] | None = None

    @property
    def exact(self) -> bool:
        return self.tstar_exact is not None

    def potential(self, language) -> LocallyConstantPotential:
        return LocallyConstantPotential(language, self.r, self.values,
                                        exact_coeffs=self.coeffs, exact_base=self.base)

    def as_dict(self, names=None):
        def key(w):
            return ",".join(names(w)) if names else ",".join(map(str, w))
        return {"r": self.r, "n_fit": self.n_fit, "solver": self.solver,
                "tstar": self.tstar,
                "tstar_exact": None if self.tstar_exact is None else str(self.tstar_exact),
                "values": {key(w): v for w, v in sorted(self.values.items())},
                "exact_base": self.base}


def _fit_rows(gt: SeqTable, r: int, n_fit: int):
    """Constraint rows of the Chebyshev LP.

    Unknowns: h on the depth-r words, plus (for r >= 2) one boundary
    correction per (r-1)-suffix class; S_n h enters through the n-r+1
    windows contained in the word, so each word contributes one linear row.
    The boundary unknowns absorb the sup-convention tail, keep t*(r) exactly
    monotone in r, and vanish for r = 1.
    """
    r_words = gt.words(r)
    h_index = {w: i for i, w in enumerate(r_words)}
    tau_index: dict[Word, int] = {}
    if r >= 2:
        for w in gt.words(n_fit):
            s = w[n_fit - r + 1:]
            if s not in tau_index:
                tau_index[s] = len(r_words) + len(tau_index)
    rows = []
    words = gt.words(n_fit)
    for w in words:
        row: dict[int, Fraction] = {}
        for i in range(n_fit - r + 1):
            j = h_index[w[i:i + r]]
            row[j] = row.get(j, Fraction(0)) + 1
        if r >= 2:
            row[tau_index[w[n_fit - r + 1:]]] = Fraction(1)
        rows.append(row)
    return r_words, tau_index, rows, words


def fit_h(gt: SeqTable, r: int, n_fit: int, mode: str = "auto") -> FitResult:
    """Minimize max over depth-n_fit words of |log g_n(y) - S_n h(y)| over
    potentials h of range r (a Chebyshev-center LP).

    Exact simplex on rationals when the table is exact counting with a
    common power base; deterministic iterative LP otherwise.
    """
    if r < 1:
        raise DetectError("fit range must be >= 1")
    if r > n_fit:
        raise DetectError("fit range exceeds the fit depth")
    if n_fit > gt.depth_max:
        raise TableError("n_fit exceeds the table depth")
    r_words, tau_index, rows, words = _fit_rows(gt, r, n_fit)
    nvars = len(r_words) + len(tau_index)
    base = table_power_base(gt) if mode in ("auto", "exact") else None
    exact_rhs = None
    if base is not None:
        exact_rhs = []
        for w in words:
            e = _exponent(gt, n_fit, w, base)
            if e is None:
                exact_rhs = None
                break
            exact_rhs.append(e)
    if mode == "exact" and exact_rhs is None:
        raise DetectError("exact fit needs a counting table with a common power base")
    if exact_rhs is not None and 2 * len(rows) <= _EXACT_FIT_LIMIT:
        z, tstar = chebyshev_fit_exact(rows, exact_rhs, nvars)
        log_b = math.log(base)
        coeffs = {w: z[i] for i, w in enumerate(r_words)}
        values = {w: float(coeffs[w]) * log_b for w in r_words}
        boundary = {s: float(z[i]) * log_b for s, i in tau_index.items()}
        return FitResult(r, n_fit, values, float(tstar) * log_b, "exact-simplex",
                         coeffs=coeffs, base=base, tstar_exact=tstar,
                         boundary=boundary or None)
    rhs = [gt.log_value(n_fit, w) for w in words]
    z, tstar = chebyshev_fit_float(rows, rhs, nvars)
    values = {w: z[i] for i, w in enumerate(r_words)}
    boundary = {s: z[i] for s, i in tau_index.items()}
    return FitResult(r, n_fit, values, tstar, "highs", boundary=boundary or None)


def chebyshev_defect(gt: SeqTable, values: dict[Word, float], r: int, n: int) -> float:
    """Achieved sup-norm defect of candidate h values in the same functional
    the LP minimizes (boundary corrections eliminated by midrange)."""
    residuals: dict[Word, list[float]] = {}
    for w in gt.words(n):
        s = sum(values[w[i:i + r]] for i in range(n - r + 1))
        resid = gt.log_value(n, w) - s
        key = w[n - r + 1:] if r >= 2 else ()
        residuals.setdefault(key, []).append(resid)
    worst = 0.0
    for res in residuals.values():
        if r >= 2:
            worst = max(worst, (max(res) - min(res)) / 2.0)
        else:
            worst = max(worst, max(abs(v) for v in res))
    return worst


# ---------------------------------------------------------------------------
# periodic certificates (bridged fiber words)

@dataclass
class C2Certificate:
    """Certificate that the fiber sums over [u] reproduce themselves along
    the bridged periodic image word, with at worst the stated constant:
    g_{j(n+q)}((u w')^j) >= (bound * g_n(u))^j for the verified j."""

    u: Word
    endpoints: tuple[int, int]
    bridge_word: Word
    gap: int
    block: Word
    log_bound: float
    verified_j: list[int]
    slacks: list[float]
    ok: bool
    exact: bool
    constants: dict = field(default_factory=dict)

    def as_dict(self, domain_names=None, image_names=None):
        img = image_names or (lambda w: list(w))
        dom = domain_names or (lambda w: list(w))
        return {
            "u": list(img(self.u)),
            "endpoints": list(dom(self.endpoints)),
            "bridge": list(dom(self.bridge_word)), "gap": self.gap,
            "block": list(img(self.block)), "log_bound": self.log_bound,
            "verified_j": self.verified_j, "slacks": self.slacks,
            "ok": self.ok, "exact": self.exact, "constants": self.constants,
        }


def c2_certificate(gt: SeqTable, pi: OneBlockFactor, f: LocallyConstantPotential,
                   u: Word, gap_cap: int, J: int) -> C2Certificate:
    """Build the bridged periodic image word from the best preimage
    endpoint pair and verify the per-period lower bound numerically
    (exactly on the counting path)."""
    if not is_irreducible(pi.domain):
        raise DetectError("certificates need an irreducible domain shift")
    if not pi.image.is_word(u):
        raise DetectError("word %s is not in the image language" % (u,))
    n = len(u)
    if n > gt.depth_max:
        raise TableError("certificate word is deeper than the table")
    from .factor import fiber_words

    from .numerics import logsumexp

    groups: dict[tuple[int, int], list[Word]] = {}
    for x in fiber_words(pi, u):
        groups.setdefault((x[0], x[-1]), []).append(x)
    exact = gt.is_exact and f.is_zero
    best_key = None
    best = None
    for key in sorted(groups):
        xs = groups[key]
        total = len(xs) if exact else logsumexp(birkhoff_sup(f, x) for x in xs)
        if best is None or total > best:
            best = total
            best_key = key
    i0, j0 = best_key
    w = bridge(pi.domain, (j0,), (i0,), gap_cap)
    if w is None:
        raise DetectError("no bridge of length <= %d from %s to %s"
                          % (gap_cap, pi.domain.alphabet[j0], pi.domain.alphabet[i0]))
    q = len(w)
    block = u + pi.apply(w)

    log_mn = variation_constant(f, n)
    l1 = len(pi.preimage_symbols(u[0]))
    l2 = len(pi.preimage_symbols(u[-1]))
    if q == 0:
        m_log = 0.0
    else:
        m_log = min(birkhoff_inf(f, wq) for wq in pi.domain.blocks(q))
        m_log = min(m_log, 0.0)
    log_bound = m_log - math.log(l1 * l2) - 2 * log_mn

    g_u = gt.log_value(n, u)
    verified = []
    slacks = []
    ok = True
    period = n + q
    j = 1
    while j <= J and j * period <= gt.depth_max:
        word_j = block * j
        lhs = gt.log_value(j * period, word_j)
        slack = lhs - j * (log_bound + g_u)
        verified.append(j)
        slacks.append(slack)
        if exact:
            bound_exact = Fraction(1, l1 * l2)
            if gt.exact_value(j * period, word_j) < (bound_exact * gt.exact_value(n, u)) ** j:
                ok = False
        elif slack < -1e-9:
            ok = False
        j += 1
    if not verified:
        raise TableError("table too shallow to verify any multiple of %d" % period)
    return C2Certificate(u, (i0, j0), w, q, block, log_bound, verified, slacks,
                         ok, exact,
                         constants={"m_log": m_log, "l1": l1, "l2": l2,
                                    "log_mn": log_mn})


# ---------------------------------------------------------------------------
# aggregate verdict

def _exactly_multiplicative(gt: SeqTable, orbit: PeriodicPoint, j_max: int) -> bool:
    q = orbit.period
    base_val = gt.exact_value(q, orbit.word(q))
    return all(gt.exact_value(j * q, orbit.word(j * q)) == base_val ** j
               for j in range(1, j_max + 1))


def image_periodic_points(language, max_period: int) -> list[PeriodicPoint]:
    """Canonical periodic orbits of the image shift up to max_period."""
    from .shiftcore import _is_primitive, _least_rotation

    seen = set()
    out = []
    for q in range(1, max_period + 1):
        for w in language.blocks(q):
            if not _is_primitive(w):
                continue
            canon = _least_rotation(w)
            if canon in seen:
                continue
            if language.is_periodic_block(canon):
                seen.add(canon)
                out.append(PeriodicPoint(block=canon, period=q))
    out.sort(key=lambda p: (p.period, p.block))
    return out


@dataclass
class DefectReport:
    verdict: Verdict
    reason: str
    h: FitResult | None
    uniform: dict[int, float]
    uniform_exact_zero: bool
    periodic: dict[PeriodicPoint, list[float]]
    periodic_exact_zero: bool
    tstars: dict[int, float]
    profile_growth: bool
    profile_witness: dict | None
    coverage: dict
    stats: dict = field(default_factory=dict)

    def as_dict(self, names=None):
        def orbit_key(p):
            return ",".join(names(p.block)) if names else ",".join(map(str, p.block))
        return {
            "verdict": self.verdict.value,
            "reason": self.reason,
            "h": None if self.h is None else self.h.as_dict(names),
            "uniform": {str(n): v for n, v in sorted(self.uniform.items())},
            "uniform_exact_zero": self.uniform_exact_zero,
            "periodic": {orbit_key(p): v for p, v in sorted(self.periodic.items(),
                                                            key=lambda kv: (kv[0].period, kv[0].block))},
            "periodic_exact_zero": self.periodic_exact_zero,
            "tstars": {str(n): v for n, v in sorted(self.tstars.items())},
            "profile_growth": self.profile_growth,
            "profile_witness": self.profile_witness,
            "coverage": self.coverage,
            "stats": self.stats,
        }


def table_verdict(gt: SeqTable, h: LocallyConstantPotential | None = None,
                  r: int = 1, P_max: int = 6, J: int | None = None,
                  n_fits=None, slope_threshold: float = DEFAULT_SLOPE_THRESHOLD) -> DefectReport:
    """Aggregate detector on a prebuilt table; see compensation_verdict."""
    profile = defect_profile(gt, slope_threshold)
    if profile.growth:
        return DefectReport(
            Verdict.REFUTED, "defect profile grows linearly in log", None, {}, False,
            {}, False, {}, True, profile.witness,
            {"depth_max": gt.depth_max, "orbits": 0, "P_max": P_max},
            {"slope_threshold": slope_threshold})

    fit = None
    tstars: dict[int, float] = {}
    exact_fit_zero = True
    if h is None:
        if gt.language is None:
            return DefectReport(
                Verdict.EVIDENCE, "no growth found; no candidate h to certify",
                None, {}, False, {}, False, {}, False, None,
                {"depth_max": gt.depth_max, "orbits": 0, "P_max": P_max}, {})
        if n_fits is None:
            hi = min(gt.depth_max, 8)
            n_fits = list(range(max(r, min(2, hi)), hi + 1))
        for nf in n_fits:
            res = fit_h(gt, r, nf)
            tstars[nf] = res.tstar
            if not (res.exact and res.tstar_exact == 0):
                exact_fit_zero = False
            fit = res
        h = fit.potential(gt.language)
    else:
        exact_fit_zero = False
        if gt.language is not None:
            for nf in (n_fits or [min(gt.depth_max, 8)]):
                tstars[nf] = chebyshev_defect(gt, h.values, h.range, nf)

    uniform = {}
    uniform_exact = True
    all_exact = uniform_defects_exact_all(gt, h)
    if all_exact is not None:
        log_b = math.log(h.exact_base)
        for n, ue in all_exact.items():
            uniform[n] = float(ue) * log_b
            uniform_exact = uniform_exact and ue == 0
    else:
        uniform_exact = False
        for n in range(1, gt.depth_max + 1):
            uniform[n] = uniform_defect(gt, h, n)

    orbits = image_periodic_points(gt.language, P_max) if gt.language is not None else []
    periodic: dict[PeriodicPoint, list[float]] = {}
    periodic_exact = True
    refuted_orbit = None
    for orbit in orbits:
        q = orbit.period
        j_max = min(J, gt.depth_max // q) if J else gt.depth_max // q
        if j_max < 1:
            continue
        de = periodic_defect_exact(gt, h, orbit, j_max)
        ds = periodic_defect(gt, h, orbit, j_max)
        periodic[orbit] = ds
        if de is None or any(c != 0 for c in de):
            periodic_exact = False
            # exact multiplicativity witness: g_{jq}(B^j) == g_q(B)^j makes
            # the defect constant in j, so a nonzero value is the Kingman
            # limit itself.  With a float h the witness still stands when
            # the defect clears the Birkhoff-sum rounding by many orders.
            nonzero = de[0] != 0 if de is not None else abs(ds[0]) > 1e-6
            if refuted_orbit is None and gt.is_exact and nonzero and \
                    _exactly_multiplicative(gt, orbit, j_max):
                limit = float(de[0]) * math.log(h.exact_base) if de is not None else ds[0]
                refuted_orbit = (orbit, limit)

    coverage = {"depth_max": gt.depth_max, "P_max": P_max,
                "orbits": len(periodic),
                "multiples": {",".join(map(str, o.block)): len(v) for o, v in periodic.items()}}

    if refuted_orbit is not None:
        orbit, d = refuted_orbit
        return DefectReport(
            Verdict.REFUTED,
            "periodic defect bounded away from 0 with exact arithmetic",
            fit, uniform, False, periodic, False, tstars, False, None, coverage,
            {"orbit": list(orbit.block), "limit_defect": d})

    exact_ok = (uniform_exact and periodic_exact and
                (exact_fit_zero if fit is not None else h.is_exact))
    if exact_ok and uniform and (fit is None or exact_fit_zero):
        return DefectReport(
            Verdict.CERTIFIED, "exact zero defects at every checked depth",
            fit, uniform, True, periodic, True, tstars, False, None, coverage, {})

    ns = sorted(uniform)
    stats = {
        "uniform_decays": decays_to_zero(ns, [uniform[n] for n in ns]),
        "max_uniform_tail": max(uniform[n] for n in ns[len(ns) // 2:]) if ns else None,
        "max_abs_periodic_last": max((abs(v[-1]) for v in periodic.values()), default=None),
    }
    return DefectReport(Verdict.EVIDENCE, "finite-depth decay statistics only",
                        fit, uniform, uniform_exact, periodic, periodic_exact,
                        tstars, False, None, coverage, stats)


def compensation_verdict(pi: OneBlockFactor, f: LocallyConstantPotential,
                         h: LocallyConstantPotential | None = None,
                         depth_max: int = 12, r: int = 1, P_max: int = 6,
                         J: int | None = None, n_fits=None,
                         slope_threshold: float = DEFAULT_SLOPE_THRESHOLD) -> DefectReport:
    """Full detector for the triple (pi, f, candidate h).

    Aggregates (a) periodic defects over all image orbits with period
    <= P_max and all multiples inside the table, (b) the uniform defect
    trend, (c) the defect-profile growth flag, plus the Chebyshev t* per
    fitted depth when h is fitted rather than given.  For f = 0 this is the
    saturated-compensation test.
    """
    gt = build_g_table(pi, f, depth_max)
    return table_verdict(gt, h=h, r=r, P_max=P_max, J=J, n_fits=n_fits,
                         slope_threshold=slope_threshold)
