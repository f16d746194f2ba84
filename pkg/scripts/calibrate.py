"""Seed-calibration harness for the statistical tolerances.

Runs each statistical quantity used by ``latdiff verify`` over a range of seeds
and prints its mean, standard deviation, maximum, and 5x the standard
deviation.  Nothing here feeds back into the library; the printed table is what
the frozen tolerances were compared against.

    python3 scripts/calibrate.py --seeds 20
"""

import argparse
import json
import statistics

import numpy as np

from latdiff.correlations import autocorr_table, correlation
from latdiff.diffraction import bragg_estimate, flatness_report, periodogram
from latdiff.lattice import Rademacher, comb_weights
from latdiff.samplers import Bernoulli, Ledrappier, RudinShapiro2D, SamplerSpec, Times23, sample
from latdiff.verify import triple_query

FAIR = Bernoulli(Rademacher(0.5))


def eta_max(system, n, radius, seed):
    return autocorr_table(sample(SamplerSpec(system, n, n, seed)), radius).max_offcentre()


def triple_max(n, seed):
    w = sample(SamplerSpec(FAIR, n, n, seed))
    return max(abs(correlation(w, triple_query(p))) for p in range(7))


def flatness(system, n, seed, phi=None, density=1.0):
    w = sample(SamplerSpec(system, n, n, seed))
    if phi is not None:
        w = comb_weights(w, *phi)
    return flatness_report(periodogram(w), density).max_bin_deviation


def grid_max(n, seed):
    return float(periodogram(sample(SamplerSpec(FAIR, n, n, seed))).values.max())


def bragg(freq, seed):
    ((_, v),) = bragg_estimate(SamplerSpec(FAIR, 8, 8, seed), (1, 0), freq, [512])
    return v


QUANTITIES = {
    "eta_max bernoulli N=512 R=8": lambda s: eta_max(FAIR, 512, 8, s),
    "eta_max ledrappier N=512 R=8": lambda s: eta_max(Ledrappier(), 512, 8, s),
    "eta_max times23 N=256 R=6": lambda s: eta_max(Times23(), 256, 6, s),
    "triple max bernoulli N=512": lambda s: triple_max(512, s),
    "bragg (0,0) phi=(1,0)": lambda s: bragg((0, 0), s),
    "bragg (1,0) phi=(1,0)": lambda s: bragg((1, 0), s),
    "bragg (0.5,0) phi=(1,0)": lambda s: bragg((0.5, 0), s),
    "max ordinate bernoulli N=512": lambda s: grid_max(512, s),
    "flatness bernoulli N=512": lambda s: flatness(FAIR, 512, s),
    "flatness ledrappier N=512": lambda s: flatness(Ledrappier(), 512, s),
    "flatness times23 N=512": lambda s: flatness(Times23(), 512, s),
    "flatness comb phi=(1,0) N=512": lambda s: flatness(FAIR, 512, s, (1, 0), 0.25),
}


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--seeds", type=int, default=20)
    parser.add_argument("--json", action="store_true", help="emit JSON instead of a table")
    args = parser.parse_args(argv)

    rows = {}
    for name, fn in QUANTITIES.items():
        values = [float(fn(seed)) for seed in range(args.seeds)]
        rows[name] = {
            "mean": statistics.fmean(values),
            "sd": statistics.stdev(values),
            "max": max(values),
            "five_sd": 5 * statistics.stdev(values),
        }
    # the deterministic system needs no seeds
    rs = sample(SamplerSpec(RudinShapiro2D(), 1024, 1024, 0))
    rows["eta_max rudin-shapiro N=1024 R=8"] = {"value": autocorr_table(rs, 8).max_offcentre()}
    rows["flatness rudin-shapiro N=512"] = {"value": flatness(RudinShapiro2D(), 512, 0)}

    if args.json:
        print(json.dumps(rows, indent=2, sort_keys=True))
        return
    width = max(map(len, rows))
    for name, row in rows.items():
        cells = "  ".join(f"{k}={np.round(v, 5)}" for k, v in row.items())
        print(f"{name:<{width}}  {cells}")


if __name__ == "__main__":
    main()
