"""
Measure the codec: throughput, pipeline ablation, precision sweep
=================================================================

Runs the benchmark harness on a synthetic driving-style sequence and
prints the three tables the harness knows how to produce.
"""

from jiffy import QuantizationSpec, ScanType
from jiffy.bench import as_scans, run_ablation, run_bench, run_sweep
from jiffy.synthetic import generate

frames, rows, cols = 30, 64, 512
seq = generate("driving_like", frames, rows, cols, seed=21)
scans = as_scans(seq, QuantizationSpec(precision_um=1000, sample_width=2),
                 ScanType.RANGE)

# throughput and ratio, averaged over repetitions
rep = run_bench(scans, reps=3)
print(f"bench: {frames} frames {rows}x{cols}, "
      f"ratio {rep.ratio:.2f}, {rep.i_scans} I / {rep.p_scans} P")
print(f"  encode {rep.encode_scans_per_s:8.0f} scans/s  "
      f"{rep.encode_points_per_s / 1e6:6.1f} Mpts/s")
print(f"  decode {rep.decode_scans_per_s:8.0f} scans/s  "
      f"{rep.decode_points_per_s / 1e6:6.1f} Mpts/s")

# the ablation ladder: switch stages on one by one. Delta without zigzag
# is the classic trap: negative deltas wrap to huge unsigned values and
# compression gets worse than no delta at all.
print("\nablation:")
for row in run_ablation(scans):
    print(f"  {row['variant']:<24} ratio {row['ratio']:5.2f}  "
          f"{row['bits_per_sample']:5.2f} bits/sample")

# ratio vs quantization step: every doubling of the step should save
# about one bit per stored sample
print("\nprecision sweep:")
for row in run_sweep(seq, [1000, 2000, 4000, 8000]):
    print(f"  {row['precision_um']:>5} um  ratio {row['ratio']:5.2f}  "
          f"{row['bits_per_sample']:5.2f} bits/sample")
