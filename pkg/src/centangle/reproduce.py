"""Regenerate the published tables and figure data and diff them against testdata.

Each target returns a :class:`Reproduction`: the rows written to disk and a
list of human-readable mismatches.  An empty mismatch list means success.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction
from importlib.resources import files
from math import sqrt
from pathlib import Path

from .haar import haar_experiment, haar_moments, write_histogram
from .hierarchy import (
    CmaxTable,
    ProductStructure,
    VacuousBound,
    build_hierarchy,
    gme_threshold,
    haar_tail_bound,
)
from .statevec import ce_asymptotic_bound

TARGETS = ("table1", "table2", "sm_lp", "sm_hierarchies", "fig2", "fig3")
FIG2_SIZES = (4, 5, 6, 7)
FIG2_SAMPLES = 6000
MEAN_SE_BAND = 5.0
VAR_BAND = (0.7, 1.4)


def _published_csv(*parts: str) -> list[dict]:
    text = files("centangle").joinpath("testdata", "paper", *parts).read_text()
    return list(csv.DictReader(text.splitlines()))


def load_table1() -> list[dict]:
    return _published_csv("table1.csv")


def load_table2() -> list[dict]:
    return _published_csv("table2.csv")


def load_sm_lp() -> list[dict]:
    return _published_csv("sm_lp.csv")


def load_raw_hierarchy(n: int) -> list[dict]:
    return _published_csv("hierarchies", f"n{n}.csv")


def load_errata() -> list[dict]:
    return _published_csv("hierarchies", "errata.csv")


def corrected_hierarchy(n: int) -> list[tuple[str, str]]:
    """Printed rows for ``n`` with the errata entries substituted."""
    fixes = {(e["raw_structure"], e["raw_value"]): (e["structure"], e["zeta_star"])
             for e in load_errata() if int(e["n"]) == n}
    return [fixes.get((r["structure"], r["zeta_star"]), (r["structure"], r["zeta_star"]))
            for r in load_raw_hierarchy(n)]


# ---------------------------------------------------------------- decimals


def decimals_of(text: str) -> int:
    return len(text.split(".")[1]) if "." in text else 0


def decimal_string(x: Fraction, digits: int | None = None) -> str:
    """Exact decimal expansion if it terminates, else rounded to ``digits`` (default 20)."""
    x = Fraction(x)
    d = x.denominator
    while d % 2 == 0:
        d //= 2
    while d % 5 == 0:
        d //= 5
    with localcontext() as ctx:
        ctx.prec = 200
        value = Decimal(x.numerator) / Decimal(x.denominator)
        if digits is None:
            if d == 1:
                return _strip(format(value, "f"))
            digits = 20
        return format(value.quantize(Decimal(1).scaleb(-digits)), "f")


def _strip(s: str) -> str:
    if "." in s:
        s = s.rstrip("0").rstrip(".")
    return s or "0"


def matches_printed(x: Fraction, printed: str) -> bool:
    """True if ``x`` rounds to ``printed`` at its number of decimals (either way on a tie)."""
    p = Fraction(Decimal(printed))
    return abs(Fraction(x) - p) <= Fraction(1, 2 * 10 ** decimals_of(printed))


# ----------------------------------------------------------------- targets


@dataclass
class Reproduction:
    target: str
    rows: list = field(default_factory=list)
    header: tuple = ()
    mismatches: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def write(self, out_dir):
        path = Path(out_dir) / f"{self.target}.csv"
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(self.header)
            w.writerows(self.rows)
        return path


def reproduce_table1() -> Reproduction:
    cmax = CmaxTable.from_lp(12)
    rep = Reproduction("table1", header=("n", "cmax", "zeta"))
    for row in load_table1():
        n = int(row["n"])
        c, z = cmax[n], gme_threshold(n, cmax)
        rep.rows.append((n, decimal_string(c), decimal_string(z)))
        for name, got, want in (("cmax", c, row["cmax"]), ("zeta", z, row["zeta"])):
            if got != Fraction(Decimal(want)):
                rep.mismatches.append(f"n={n} {name}: computed {decimal_string(got)}, printed {want}")
    return rep


def _hierarchy_diff(n: int, printed: list[tuple[str, str]], cmax: CmaxTable) -> list[str]:
    computed = build_hierarchy(n, cmax).as_dict()
    out, seen = [], set()
    for s_text, v_text in printed:
        try:
            s = ProductStructure.parse(s_text)
        except ValueError:
            out.append(f"n={n}: cannot parse structure {s_text!r}")
            continue
        if s not in computed:
            out.append(f"n={n}: {s_text} is not a partition of {n}")
            continue
        if s in seen:
            out.append(f"n={n}: {s_text} listed twice")
        seen.add(s)
        if not matches_printed(computed[s], v_text):
            out.append(f"n={n} {s_text}: computed {decimal_string(computed[s])}, printed {v_text}")
    for s in computed:
        if s not in seen:
            out.append(f"n={n}: structure {s} missing from the printed table")
    return out


def reproduce_table2() -> Reproduction:
    cmax = CmaxTable.from_lp(5)
    table = build_hierarchy(5, cmax)
    rep = Reproduction("table2", header=("structure", "zeta_star"))
    rep.rows = [(str(r.structure), decimal_string(r.zeta_star)) for r in table.rows]
    printed = [(r["structure"], r["zeta_star"]) for r in load_table2()]
    rep.mismatches = _hierarchy_diff(5, printed, cmax)
    return rep


def reproduce_sm_hierarchies(raw: bool = False) -> Reproduction:
    """All hierarchies for n = 3..12; ``raw`` skips the errata."""
    cmax = CmaxTable.from_lp(12)
    rep = Reproduction("sm_hierarchies", header=("n", "structure", "zeta_star", "loose"))
    for n in range(3, 13):
        for r in build_hierarchy(n, cmax).rows:
            rep.rows.append((n, str(r.structure), decimal_string(r.zeta_star), int(r.loose)))
        printed = ([(r["structure"], r["zeta_star"]) for r in load_raw_hierarchy(n)]
                   if raw else corrected_hierarchy(n))
        rep.mismatches += _hierarchy_diff(n, printed, cmax)
    return rep


def reproduce_sm_lp() -> Reproduction:
    cmax = CmaxTable.from_lp(31)
    rep = Reproduction("sm_lp", header=("n", "cmax", "printed", "match"))
    for row in load_sm_lp():
        n, printed = int(row["n"]), row["cmax"]
        got = cmax[n]
        ok = matches_printed(got, printed)
        rep.rows.append((n, decimal_string(got, max(20, decimals_of(printed))), printed, int(ok)))
        if not ok:
            diff = float(got - Fraction(Decimal(printed)))
            rep.mismatches.append(
                f"n={n}: computed {decimal_string(got, decimals_of(printed))}, "
                f"printed {printed} (difference {diff:.3e})"
            )
    return rep


def reproduce_fig2(out_dir=None, seed: int = 0, samples: int = FIG2_SAMPLES) -> Reproduction:
    """Haar CE histograms and moment checks; band checks stand in for exact diffs."""
    rep = Reproduction(
        "fig2",
        header=("n", "samples", "mean_emp", "mean_closed", "var_emp", "var_closed", "frac_above_ghz"),
    )
    for n in FIG2_SIZES:
        stats, ces = haar_experiment(n, samples, seed=(seed, n), return_values=True)
        rep.rows.append((n, samples, f"{stats.mean_emp:.10f}", f"{stats.mean_closed:.10f}",
                         f"{stats.var_emp:.10e}", f"{stats.var_closed:.10e}",
                         f"{stats.frac_above_ghz:.6f}"))
        if out_dir is not None:
            Path(out_dir).mkdir(parents=True, exist_ok=True)
            write_histogram(ces, Path(out_dir) / f"fig2_hist_n{n}.csv")
        se = sqrt(stats.var_closed / samples)
        if abs(stats.mean_emp - stats.mean_closed) > MEAN_SE_BAND * se:
            rep.mismatches.append(f"n={n}: mean {stats.mean_emp:.6f} outside 5 SE of {stats.mean_closed:.6f}")
        ratio = stats.var_emp / stats.var_closed
        if not VAR_BAND[0] <= ratio <= VAR_BAND[1]:
            rep.mismatches.append(f"n={n}: variance ratio {ratio:.3f} outside {VAR_BAND}")
        if n == 5 and stats.frac_above_ghz <= 0.5:
            rep.mismatches.append(f"n=5: only {stats.frac_above_ghz:.3f} of samples exceed the GHZ CE")
    return rep


def reproduce_fig3(max_n: int = 31) -> Reproduction:
    """Scaling data: C*, zeta, Haar moments and the Chebyshev tail bound."""
    cmax = CmaxTable.from_lp(max_n)
    rep = Reproduction(
        "fig3", header=("n", "cmax", "zeta", "haar_mean", "haar_var", "asymptotic", "tail_bound")
    )
    bounds = {}
    for n in range(2, max_n + 1):
        mean, var = haar_moments(n)
        z = gme_threshold(n, cmax)
        try:
            bounds[n] = haar_tail_bound(n, cmax)
            tail = f"{float(bounds[n]):.10e}"
        except VacuousBound:
            tail = ""
        asym = ce_asymptotic_bound(n)
        rep.rows.append((n, f"{float(cmax[n]):.15f}", f"{float(z):.15f}", f"{float(mean):.15f}",
                         f"{float(var):.10e}", f"{float(asym):.15f}", tail))
        if not z <= cmax[n] <= asym:
            rep.mismatches.append(f"n={n}: ordering zeta <= C* <= 1-(3/4)^n violated")
    decreasing = [n for n in range(6, min(max_n, 12) + 1) if bounds[n] >= bounds[n - 1]]
    if decreasing:
        rep.mismatches.append(f"tail bound fails to decrease at n={decreasing}")
    return rep


def run_target(target: str, out_dir=None, seed: int = 0, max_n: int = 31) -> Reproduction:
    if target == "table1":
        rep = reproduce_table1()
    elif target == "table2":
        rep = reproduce_table2()
    elif target == "sm_lp":
        rep = reproduce_sm_lp()
    elif target == "sm_hierarchies":
        rep = reproduce_sm_hierarchies()
    elif target == "fig2":
        rep = reproduce_fig2(out_dir, seed=seed)
    elif target == "fig3":
        rep = reproduce_fig3(max_n)
    else:
        raise ValueError(f"unknown target {target!r}; choose from {', '.join(TARGETS)}")
    if out_dir is not None:
        rep.write(out_dir)
    return rep
