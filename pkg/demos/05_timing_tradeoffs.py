"""Why one exponential beats a chain of gates, and why batching pays.

Two cost structures compete. A composed-gate circuit with 2^(2N) angles
applies 2^(2N) tiny matrices per pass; the full-unitary model pays one
matrix exponential and then a single matmul per batch. More parameters,
less work. Batching amortizes the exponential over the whole dataset.

This is a reduced sweep so it finishes in about a minute; the shipped
configs/bench.json file runs the full table.
"""

import json

from unitary_forge.bench import BenchConfig, emit_report, run_bench

cfg = BenchConfig(
    qubit_range=(2, 3, 4, 5, 6),
    epochs=5,
    dataset_size=16,
    batch_sizes=(1, 16),
    model_kinds=("FullUnitary", "Ansatz"),
    seed=0,
    limits=(),
)
report = run_bench(cfg)

print(emit_report(report, "markdown"))

full = report.cell(6, "FullUnitary", 16)
ansatz = report.cell(6, "Ansatz", 16)
batched = report.cell(6, "FullUnitary", 16)
unbatched = report.cell(6, "FullUnitary", 1)
print(f"at 6 qubits, gate chain / one exponential : "
      f"{ansatz.median_epoch_seconds / full.median_epoch_seconds:.1f}x slower")
print(f"at 6 qubits, per-point / batched passes   : "
      f"{unbatched.median_epoch_seconds / batched.median_epoch_seconds:.1f}x slower")
print("\nthe same report as machine-readable JSON:")
print(json.dumps(json.loads(emit_report(report, "json"))["meta"], indent=2))
