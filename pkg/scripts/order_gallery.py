#!/usr/bin/env python3
"""Gallery of distribution pairs that separate the four stochastic orders.

Prints the built-in qualitative suite (two continuous pairs checked on a
grid, two discrete pairs checked exactly), then an exact verdict matrix
for one hand-picked discrete pair per strictness gap: stochastic order
without hazard-ratio order, hazard-ratio order without likelihood-ratio
order, likelihood-ratio order with a non-monotone hazard ratio, and a
monotone hazard ratio without stochastic dominance.
"""
from __future__ import annotations

import argparse
from fractions import Fraction

from mhrfit.stochastic_orders import (DiscreteDistribution, check_order,
                                      figure1_suite, truncated_geometric)

KINDS = ("mhr", "hr", "st", "lr")


def uniform_on(points):
    w = Fraction(1, len(points))
    return DiscreteDistribution(tuple(points), (w,) * len(points))


def separation_pairs():
    """One (label, S, T) triple per gap between adjacent orders."""
    st_not_hr = ("st holds, hr fails",
                 uniform_on((2.0, 3.0)),
                 uniform_on((1.0, 3.0)))
    hr_not_lr = ("hr holds, lr fails",
                 DiscreteDistribution((1.0, 2.0, 3.0),
                                      (Fraction(9, 20), Fraction(1, 20),
                                       Fraction(1, 2))),
                 DiscreteDistribution((1.0, 2.0, 3.0),
                                      (Fraction(1, 2), Fraction(1, 4),
                                       Fraction(1, 4))))
    lr_not_mhr = ("lr holds, mhr fails",
                  uniform_on((1.0, 2.0, 3.0, 4.0, 5.0)),
                  DiscreteDistribution(
                      (1.0, 2.0, 3.0, 4.0, 5.0),
                      tuple(Fraction(k, 1000)
                            for k in (210, 209, 206, 200, 175))))
    mhr_not_st = ("mhr holds, st fails",
                  truncated_geometric(Fraction(4, 5), 40),
                  truncated_geometric(Fraction(1, 2), 40))
    return (st_not_hr, hr_not_lr, lr_not_mhr, mhr_not_st)


def print_suite() -> None:
    print("built-in qualitative suite")
    for entry in figure1_suite():
        claims = "  ".join(f"{k}={'yes' if v else 'no'}"
                           for k, v in sorted(entry["claims"].items()))
        print(f"  {entry['name']:<28}{entry['family']:<12}{claims}")


def print_matrix(show_witness: bool) -> None:
    print("\nexact verdicts, one pair per strictness gap")
    print(f"  {'pair':<22}" + "".join(f"{k:>6}" for k in KINDS))
    for label, S, T in separation_pairs():
        verdicts = {k: check_order(S, T, k) for k in KINDS}
        cells = "".join(f"{'yes' if verdicts[k].holds else 'no':>6}"
                        for k in KINDS)
        print(f"  {label:<22}{cells}")
        if show_witness:
            for k in KINDS:
                v = verdicts[k]
                if not v.holds:
                    print(f"      {k} fails at t={v.point:g}")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        description="print order-separating distribution pairs")
    parser.add_argument("--witness", action="store_true",
                        help="also print the first failure point per order")
    args = parser.parse_args(argv)
    print_suite()
    print_matrix(args.witness)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
