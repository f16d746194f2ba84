"""Acceptance checks shared by the ``verify`` command and the test suite.

Each ``criterion_*`` function returns a list of :class:`CheckRecord`.  The
``systems`` argument restricts a criterion to the records about those systems
(``None`` means all of them), and ``size`` overrides the default window side.
"""

from __future__ import annotations

import hashlib
import platform
import random
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Iterable

import numpy as np
import scipy

from . import __version__
from .correlations import CorrelationQuery, autocorr_coefficient, autocorr_table, correlation
from .diffraction import flatness_report, ordinate, periodogram
from .formats import format_grid_pgm, format_json, format_table_csv, format_window_csv
from .lattice import Rademacher, UniformCircle, comb_weights
from .oracles import ledrappier_bruteforce, ledrappier_corr_oracle, times23_corr_oracle
from .samplers import (
    Bernoulli,
    Ledrappier,
    RudinShapiro2D,
    SamplerSpec,
    Times23,
    derive_seed,
    sample,
    sample_ledrappier,
)

SYSTEMS = ("bernoulli", "ledrappier", "times23", "rudin-shapiro")

DEFAULT_TOLERANCES = {
    "ledrappier_triple": 1e-12,
    "eta_max": 0.02,
    "bernoulli_triple": 0.02,
    "times23_rule": 1e-10,
    "times23_eta_max": 0.05,
    "times23_identity": 1e-6,
    "bragg_mass": 0.01,
    "bragg_offlattice": 0.01,
    "flatness": 0.05,
    "parseval": 1e-9,
    "rs_eta_max": 0.02,
    "rs_vs_bernoulli": 0.03,
    "fft_direct": 1e-10,
}

# criterion 4 uses its entry as the enumeration box and ignores size overrides
DEFAULT_SIZES = {1: 512, 2: 512, 3: 256, 4: 8, 5: 512, 6: 512, 7: 1024, 8: 256}
ETA_RADIUS = 8
TIMES23_ETA_RADIUS = 6
TRIPLE_POWERS = range(7)
THREAD_COUNTS = (1, 4, 8)


@dataclass
class CheckRecord:
    name: str
    criterion: int
    system: str
    quantity: str
    empirical: float
    oracle: float
    tolerance: float
    passed: bool
    note: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"[{status}] C{self.criterion} {self.name} ({self.system}): {self.quantity} = "
                f"{self.empirical:.6g}, target {self.oracle:.6g}, tol {self.tolerance:.3g}")


@dataclass
class VerifyReport:
    records: list[CheckRecord]
    seed: int
    versions: dict = field(default_factory=lambda: versions())

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def summary(self) -> dict:
        n_pass = sum(r.passed for r in self.records)
        return {"total": len(self.records), "passed": n_pass, "failed": len(self.records) - n_pass,
                "all_passed": self.passed}

    def as_dict(self) -> dict:
        return {"passed": self.passed, "seed": self.seed, "versions": self.versions, "summary": self.summary(),
                "records": [asdict(r) for r in self.records]}


def versions() -> dict:
    return {"latdiff": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
            "python": platform.python_version()}


class _Checks:
    """Accumulates records for one criterion."""

    def __init__(self, criterion: int, tolerances: dict | None):
        self.criterion = criterion
        self.tol = {**DEFAULT_TOLERANCES, **(tolerances or {})}
        self.records: list[CheckRecord] = []

    def within(self, name, system, quantity, empirical, oracle, tol_key, note=""):
        tol = self.tol[tol_key]
        ok = abs(empirical - oracle) <= tol
        self._add(name, system, quantity, empirical, oracle, tol, ok, note)

    def at_most(self, name, system, quantity, empirical, bound_key, note=""):
        tol = self.tol[bound_key]
        self._add(name, system, quantity, empirical, 0.0, tol, empirical <= tol, note)

    def exact(self, name, system, quantity, empirical, oracle, note=""):
        self._add(name, system, quantity, empirical, oracle, 0.0, empirical == oracle, note)

    def _add(self, name, system, quantity, empirical, oracle, tol, ok, note):
        self.records.append(CheckRecord(name, self.criterion, system, quantity, float(empirical),
                                        float(oracle), float(tol), bool(ok), note))


def _wants(systems, name: str) -> bool:
    return systems is None or name in systems


def triple_query(n: int) -> CorrelationQuery:
    return CorrelationQuery.points([(0, 0), (2**n, 0), (0, 2**n)])


TIMES23_IDENTITY = CorrelationQuery.of(((0, 1), -2), ((1, 1), 1))
FAIR_COIN = Bernoulli(Rademacher(0.5))


def ledrappier_violations(window) -> int:
    """Number of sites where ``w_x w_{x+e1} w_{x+e2} != 1`` with all three inside."""
    s = window.signs().astype(np.int64)
    prod = s[:-1, :-1] * s[:-1, 1:] * s[1:, :-1]
    return int(np.count_nonzero(prod != 1))


def times23_rule_errors(window) -> tuple[float, float]:
    d = window.data
    err2 = float(np.max(np.abs(d[:, 1:] - d[:, :-1] ** 2))) if window.width > 1 else 0.0
    err3 = float(np.max(np.abs(d[1:, :] - d[:-1, :] ** 3))) if window.height > 1 else 0.0
    return err2, err3


# -- criteria ---------------------------------------------------------------------------


def criterion_1(seed: int, size: int | None = None, systems=None, tolerances=None) -> list[CheckRecord]:
    """Ledrappier constraint everywhere and exact 3-point correlations at distance 2**n."""
    c = _Checks(1, tolerances)
    if not _wants(systems, "ledrappier"):
        return c.records
    n = size or DEFAULT_SIZES[1]
    window = sample(SamplerSpec(Ledrappier(), n, n, seed))
    violations = ledrappier_violations(window)
    for k in range(16):
        side = 1 + (k * 37) % 96
        violations += ledrappier_violations(sample_ledrappier(side, 97 - side, derive_seed(seed, 1, k)))
    c.exact("constraint", "ledrappier", "sites violating w_x w_x+e1 w_x+e2 = 1", violations, 0,
            note="main window plus 16 extra windows of mixed shapes")
    for p in TRIPLE_POWERS:
        if 2**p >= n:
            continue
        value = correlation(window, triple_query(p))
        c.within(f"triple n={p}", "ledrappier", f"<0, {2**p}e1, {2**p}e2>", value.real, 1.0,
                 "ledrappier_triple")
    return c.records


def criterion_2(seed: int, size: int | None = None, systems=None, tolerances=None) -> list[CheckRecord]:
    """Bernoulli and Ledrappier share eta = delta_0 but differ in 3-point correlations."""
    c = _Checks(2, tolerances)
    n = size or DEFAULT_SIZES[2]
    for name, system in (("bernoulli", FAIR_COIN), ("ledrappier", Ledrappier())):
        if not _wants(systems, name):
            continue
        window = sample(SamplerSpec(system, n, n, derive_seed(seed, 2)))
        radius = min(ETA_RADIUS, n - 1)
        table = autocorr_table(window, radius)
        c.at_most("eta offcentre", name, f"max |eta(z)|, 0<|z|<={radius}", table.max_offcentre(), "eta_max")
        for p in TRIPLE_POWERS:
            if 2**p >= n:
                continue
            value = correlation(window, triple_query(p), exact=True)
            if name == "bernoulli":
                c.at_most(f"triple n={p}", name, f"|<0, {2**p}e1, {2**p}e2>|", abs(float(value)),
                          "bernoulli_triple")
            else:
                c.exact(f"triple n={p}", name, f"<0, {2**p}e1, {2**p}e2>", float(value), 1.0,
                        note="exact rational")
    return c.records


def criterion_3(seed: int, size: int | None = None, systems=None, tolerances=None) -> list[CheckRecord]:
    """(x2,x3) local rules, delta-like autocorrelation, and the vanishing-sum correlation."""
    c = _Checks(3, tolerances)
    if not _wants(systems, "times23"):
        return c.records
    n = size or DEFAULT_SIZES[3]
    window = sample(SamplerSpec(Times23(), n, n, derive_seed(seed, 3)))
    err2, err3 = times23_rule_errors(window)
    c.at_most("rule x2", "times23", "max |w_x+e1 - w_x^2|", err2, "times23_rule")
    c.at_most("rule x3", "times23", "max |w_x+e2 - w_x^3|", err3, "times23_rule")
    radius = min(TIMES23_ETA_RADIUS, n - 1)
    table = autocorr_table(window, radius)
    c.at_most("eta offcentre", "times23", f"max |eta(z)|, 0<|z|<={radius}", table.max_offcentre(),
              "times23_eta_max")
    value = correlation(window, TIMES23_IDENTITY)
    c.within("vanishing-sum correlation", "times23", "|<((0,1),-2), ((1,1),1)> - 1|", abs(value - 1), 0.0,
             "times23_identity")
    return c.records


def random_ledrappier_queries(rng: random.Random, count: int, box: int = 8) -> list[CorrelationQuery]:
    """Random queries in ``[0, box]^2`` with at most 4 terms; about a third are 2**n triples."""
    out = []
    for _ in range(count):
        if rng.random() < 1 / 3:
            p = rng.randrange(0, box.bit_length())
            a = rng.randrange(0, box - 2**p + 1)
            b = rng.randrange(0, box - 2**p + 1)
            terms = [((a, b), 1), ((a + 2**p, b), 1), ((a, b + 2**p), 1)]
            if rng.random() < 0.5:
                z = (rng.randrange(box + 1), rng.randrange(box + 1))
                terms.append((z, rng.choice((2, -2))))
        else:
            terms = [((rng.randrange(box + 1), rng.randrange(box + 1)), rng.choice((-1, 1, 2, 3)))
                     for _ in range(rng.randrange(1, 5))]
        rng.shuffle(terms)
        out.append(CorrelationQuery(tuple(terms)))
    return out


def random_distinct_queries(rng: random.Random, count: int, reach: int = 10) -> list[CorrelationQuery]:
    out = []
    for _ in range(count):
        k = rng.randrange(1, 7)
        sites = set()
        while len(sites) < k:
            sites.add((rng.randrange(-reach, reach + 1), rng.randrange(-reach, reach + 1)))
        out.append(CorrelationQuery.points(sorted(sites)))
    return out


def vanishing_sum_queries(rng: random.Random, count: int, reach: int = 10) -> list[CorrelationQuery]:
    """Queries whose (x2,x3) sum vanishes, built from ``2 * 2^k 3^l = 2^(k+1) 3^l`` splits.

    Each seed term ``(z, c)`` becomes ``(z, 2c), (z + e1, -c)`` or, for the
    tripling rule, ``(z, 3c), (z + e2, -c)``.
    """
    out = []
    for _ in range(count):
        terms = []
        for _ in range(rng.randrange(1, 4)):
            z = (rng.randrange(-reach, reach + 1), rng.randrange(-reach, reach + 1))
            coeff = rng.choice((-3, -2, -1, 1, 2, 3))
            if rng.random() < 0.5:
                terms += [(z, 2 * coeff), ((z[0] + 1, z[1]), -coeff)]
            else:
                terms += [(z, 3 * coeff), ((z[0], z[1] + 1), -coeff)]
        rng.shuffle(terms)
        out.append(CorrelationQuery(tuple(terms)))
    return out


def criterion_4(seed: int, size: int | None = None, systems=None, tolerances=None) -> list[CheckRecord]:
    """Oracle equivalences: polynomial test vs enumeration; (x2,x3) vanishing-sum test."""
    c = _Checks(4, tolerances)
    rng = random.Random(derive_seed(seed, 4))
    box = DEFAULT_SIZES[4]
    if _wants(systems, "ledrappier"):
        queries = random_ledrappier_queries(rng, 1000, box)
        mismatches = sum(
            Fraction(int(ledrappier_corr_oracle(q).value.real)) != ledrappier_bruteforce(q, box)
            for q in queries
        )
        ones = sum(int(ledrappier_corr_oracle(q).value.real) for q in queries)
        c.exact("oracle vs enumeration", "ledrappier", "mismatching queries out of 1000", mismatches, 0,
                note=f"{ones} of 1000 queries have value 1; box [0,{box}]^2")
    if _wants(systems, "times23"):
        distinct = random_distinct_queries(rng, 1000)
        nonzero = sum(int(times23_corr_oracle(q).value.real) != 0 for q in distinct)
        c.exact("distinct sites vanish", "times23", "nonzero values out of 1000", nonzero, 0)
        vanishing = vanishing_sum_queries(rng, 50)
        wrong = sum(int(times23_corr_oracle(q).value.real) != 1 for q in vanishing)
        c.exact("vanishing sums give 1", "times23", "values other than 1 out of 50", wrong, 0)
    return c.records


def criterion_5(seed: int, size: int | None = None, systems=None, tolerances=None) -> list[CheckRecord]:
    """Bragg masses of the occupation comb of a fair coin."""
    c = _Checks(5, tolerances)
    if not _wants(systems, "bernoulli"):
        return c.records
    n = size or DEFAULT_SIZES[5]
    window = comb_weights(sample(SamplerSpec(FAIR_COIN, n, n, derive_seed(seed, 5))), 1, 0)
    sites = window.size
    for freq in ((0, 0), (1, 0)):
        c.within(f"bragg {freq}", "bernoulli", f"I({freq[0]},{freq[1]})/N^2", ordinate(window, freq) / sites,
                 0.25, "bragg_mass")
    c.at_most("off-lattice (0.5,0)", "bernoulli", "I(0.5,0)/N^2", ordinate(window, (0.5, 0)) / sites,
              "bragg_offlattice")
    report = flatness_report(periodogram(window), 0.25, tolerance=c.tol["flatness"])
    c.at_most("background flatness", "bernoulli", "max relative bin-mean deviation from 1/4",
              report.max_bin_deviation, "flatness", note=f"background mean {report.mean:.6f}")
    return c.records


def criterion_6(seed: int, size: int | None = None, systems=None, tolerances=None) -> list[CheckRecord]:
    """Flat periodograms for all four systems, and exact Parseval."""
    c = _Checks(6, tolerances)
    n = size or DEFAULT_SIZES[6]
    chosen = (("bernoulli", FAIR_COIN), ("ledrappier", Ledrappier()), ("times23", Times23()),
              ("rudin-shapiro", RudinShapiro2D()))
    for name, system in chosen:
        if not _wants(systems, name):
            continue
        window = sample(SamplerSpec(system, n, n, derive_seed(seed, 6)))
        grid = periodogram(window)
        report = flatness_report(grid, 1.0, tolerance=c.tol["flatness"], ks=(name == "bernoulli"))
        note = f"grid mean excluding origin {report.mean:.6f}"
        if report.ks_statistic is not None:
            note += f"; KS statistic vs Exp(1) {report.ks_statistic:.4f}"
        c.at_most("flatness", name, "max relative bin-mean deviation from 1 (16x16 bins)",
                  report.max_bin_deviation, "flatness", note=note)
        eta0 = autocorr_coefficient(window, (0, 0)).real
        c.within("parseval", name, "grid mean - eta(0)", grid.mean() - eta0, 0.0, "parseval")
    return c.records


def criterion_7(seed: int, size: int | None = None, systems=None, tolerances=None) -> list[CheckRecord]:
    """The deterministic Rudin-Shapiro product comb is homometric to the fair coin."""
    c = _Checks(7, tolerances)
    if not _wants(systems, "rudin-shapiro"):
        return c.records
    n = size or DEFAULT_SIZES[7]
    spec = SamplerSpec(RudinShapiro2D(), n, n, seed)
    window = sample(spec)
    again = sample(spec.resized(n, n, seed=derive_seed(seed, 7)))
    c.exact("deterministic", "rudin-shapiro", "windows differing between two seeds", int(window != again), 0)
    radius = min(ETA_RADIUS, n - 1)
    rs = autocorr_table(window, radius)
    c.at_most("eta offcentre", "rudin-shapiro", f"max |eta(z)|, 0<|z|<={radius}", rs.max_offcentre(),
              "rs_eta_max")
    coin = autocorr_table(sample(SamplerSpec(FAIR_COIN, n, n, derive_seed(seed, 7))), radius)
    diff = max(abs(rs[z] - coin[z]) for z in rs.lags() if z.sup_norm() > 0)
    c.at_most("matches bernoulli", "rudin-shapiro", "max |eta_RS(z) - eta_B(z)|", diff, "rs_vs_bernoulli")
    return c.records


def artifact_digest(spec: SamplerSpec, radius: int, workers: int) -> str:
    """SHA-256 over the CSV, PGM and JSON artifacts of one sampled window."""
    window = sample(spec)
    table = autocorr_table(window, radius, workers=workers)
    grid = periodogram(window, workers=workers)
    h = hashlib.sha256()
    h.update(format_window_csv(window).encode())
    h.update(format_table_csv(table).encode())
    pgm, sidecar = format_grid_pgm(grid)
    h.update(pgm)
    h.update(format_json(sidecar).encode())
    h.update(format_json(flatness_report(grid, 1.0).as_dict()).encode())
    return h.hexdigest()


def criterion_8(seed: int, size: int | None = None, systems=None, tolerances=None) -> list[CheckRecord]:
    """FFT and direct autocorrelation agree; artifacts do not depend on the thread count."""
    c = _Checks(8, tolerances)
    n = size or DEFAULT_SIZES[8]
    cases = (("bernoulli", Bernoulli(UniformCircle())), ("ledrappier", Ledrappier()), ("times23", Times23()))
    for name, system in cases:
        if not _wants(systems, name):
            continue
        spec = SamplerSpec(system, n, n, derive_seed(seed, 8))
        window = sample(spec)
        radius = min(ETA_RADIUS, n - 1)
        fft = autocorr_table(window, radius, method="fft")
        direct = autocorr_table(window, radius, method="direct")
        c.at_most("fft vs direct", name, "max |eta_fft - eta_direct|",
                  float(np.max(np.abs(fft.values - direct.values))), "fft_direct")
        digests = {w: artifact_digest(spec, radius, w) for w in THREAD_COUNTS}
        distinct = len(set(digests.values()))
        c.exact("thread determinism", name, f"distinct artifact digests over {THREAD_COUNTS} threads",
                distinct, 1, note=digests[1][:16])
    return c.records


CRITERIA: dict[int, Callable[..., list[CheckRecord]]] = {
    1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4,
    5: criterion_5, 6: criterion_6, 7: criterion_7, 8: criterion_8,
}


def run_verification(seed: int, systems: Iterable[str] | None = None, size: int | None = None,
                     criteria: Iterable[int] | None = None, tolerances: dict | None = None) -> VerifyReport:
    systems = None if systems is None else set(systems)
    unknown = (systems or set()) - set(SYSTEMS)
    if unknown:
        raise ValueError(f"unknown systems {sorted(unknown)}")
    records: list[CheckRecord] = []
    for k in criteria or sorted(CRITERIA):
        records += CRITERIA[k](seed, size=size, systems=systems, tolerances=tolerances)
    return VerifyReport(records=records, seed=seed)
