"""
Scoring the whole task repertoire without opening a socket
==========================================================

Scenario files are JSON lines: each line names a task, scripts the
operator's sketch and feedback, and states what should happen. The
headless runner plays them against a fresh simulator and folds the
outcomes into per-class success rates.

Takes around ten seconds for the eighty runs.
"""

import time
from pathlib import Path

from sketchteleop.service.headless import load_scenarios, run_headless

suite = Path(__file__).resolve().parent.parent / "scenarios" / "tsr_suite.jsonl"

scenarios = load_scenarios(suite)
print(f"{suite.name}: {len(scenarios)} scenarios")

# peek at one scenario's script so the file format is visible
first = scenarios[0]
print(f"\nfirst scenario {first['name']!r} has steps:")
for step in first["steps"]:
    print(f"  {step['op']}")

t0 = time.perf_counter()
report = run_headless(suite)
wall = time.perf_counter() - t0

print(f"\nran in {wall:.1f}s wall")
print()
for line in report.table_lines():
    print(line)

# the same numbers, machine readable and byte-stable across runs
out = Path(__file__).resolve().parent / "out"
out.mkdir(exist_ok=True)
(out / "tsr_report.json").write_text(report.to_json())
print(f"\nwrote {out / 'tsr_report.json'}")
