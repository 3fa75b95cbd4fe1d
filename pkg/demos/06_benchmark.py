"""A small benchmark run: many seeded realizations, aggregated metrics.

Mirrors the comparison-table protocol at desk scale: 40 Kahan matrices
with the shrink factor drawn per realization, all four algorithms, fixed
k = n - 1.  Per-realization rows land in CSV, aggregates plus timings in
JSON, under ./demo_output/.
"""
from pathlib import Path

from cssident import ExperimentSpec, RankPolicy, run_experiment
from cssident.bench import write_report_json, write_rows_csv

spec = ExperimentSpec(
    generator={"family": "kahan", "n": 40, "zeta_range": [0.9, 0.99999]},
    algorithms=("b1", "b4", "b3", "srrqr"),
    k_policy=RankPolicy.fixed(39),
    realizations=40,
    base_seed=0,
)
report = run_experiment(spec)

out = Path("demo_output")
out.mkdir(exist_ok=True)
write_rows_csv(report, out / "kahan_rows.csv")
write_report_json(report, out / "kahan_report.json")

print(f"{'algorithm':<8} {'mean gamma1':>12} {'mean gamma2':>12} {'mean tau':>12}")
for alg, stats in report.stats.items():
    g2 = stats["gamma2"]["mean"]
    g2_txt = f"{g2:.4g}" if g2 is not None else "n/a"
    print(f"{alg:<8} {stats['gamma1']['mean']:>12.4f} {g2_txt:>12} "
          f"{stats['tau']['mean']:>12.3e}")

print(f"\nwall time: {report.wall_time_s['total']:.2f}s; "
      f"rows written to {out / 'kahan_rows.csv'}")
print("The forward greedy selector (b4) is the outlier on this family;")
print("rerunning this script reproduces the CSV byte for byte.")
