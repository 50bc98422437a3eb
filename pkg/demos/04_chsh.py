"""CHSH: the quantitative gap between local models and the singlet.

Four setting pairs, one number S. Every deterministic local strategy --
and hence every convex mixture of them -- keeps |S| at or below 2. The
singlet at the canonical angles reaches 2*sqrt(2), and a seeded Monte
Carlo estimate lands on the same value within its standard error.
"""

import math

from eprsim import (
    MeasurementAxis,
    PointerDevice,
    Z_AXIS,
    attach_device,
    chsh_report,
    chsh_value,
    estimate_correlations,
    exact_correlation_table,
    lhv_brute_force,
    make_singlet,
    pair_records,
    sample_outcomes,
)

axes_a = (Z_AXIS, MeasurementAxis(math.pi / 2, 0.0))
axes_b = (MeasurementAxis(math.pi / 4, 0.0), MeasurementAxis(3 * math.pi / 4, 0.0))
pairs = [(sa, sb) for sa in axes_a for sb in axes_b]

singlet = make_singlet()
table = exact_correlation_table(singlet, pairs)
print("Exact correlations at the canonical angles (0/90 vs 45/135 deg):")
for (sa, sb), e in zip(table.settings, table.values):
    print(f"  E(theta_a={math.degrees(sa.theta):>5.1f}, theta_b={math.degrees(sb.theta):>5.1f}) = {e:+.8f}")
s = chsh_value(table)
print(f"S = E(a,b) - E(a,b') + E(a',b) + E(a',b') = {s:+.8f}")
print(f"|S| = {abs(s):.8f}   (2*sqrt(2) = {2 * math.sqrt(2):.8f})")

print("\nEvery deterministic local strategy, exhaustively:")
baseline = lhv_brute_force(axes_a, axes_b, n_mixtures=200, seed=1)
print(f"  strategies tried: {len(baseline['strategies'])}")
print(f"  best |S|: {baseline['max_abs_S']}   (classical bound 2)")
print(f"  best assignment: a={baseline['best_strategy']['a']} b={baseline['best_strategy']['b']}")
print(f"  200 random convex mixtures, max |S|: {baseline['mixture_max_abs_S']:.6f}")
print(f"  gap to the quantum value: {baseline['gap_to_quantum']:.6f}")

print("\nSeeded sampling, 5000 trials per setting pair:")
pre = attach_device(
    attach_device(singlet, "alpha", PointerDevice("A")), "beta", PointerDevice("B")
)
all_pairs = []
for i, (sa, sb) in enumerate(pairs):
    records = sample_outcomes(
        pre,
        [("Alice", "alpha", "A", sa), ("Bob", "beta", "B", sb)],
        n_trials=5000,
        seed=100 + i,
    )
    all_pairs.extend(pair_records(records))
report = chsh_report(estimate_correlations(all_pairs))
for setting, e, se in zip(report["settings"], report["E"], report["SE"]):
    print(f"  E = {e:+.4f} +- {se:.4f}")
print(f"  empirical |S| = {report['S']:.4f}")
print("The estimate sits a couple of standard errors from 2*sqrt(2) and")
print("well above every local strategy's ceiling of 2.")
