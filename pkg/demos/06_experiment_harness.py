#!/usr/bin/env python3
"""Drive the batch experiment catalog and render its reports.

Each entry is a deterministic, replicated computation with a recorded
pass/fail verdict; identical configs give byte-identical CSV output.
"""

import json
import tempfile
from pathlib import Path

from graphonlab.experiments import (
    default_config,
    describe_experiment,
    experiment_names,
    render_report,
    run_experiment,
)

print("catalog:", ", ".join(experiment_names()))
print()
print(describe_experiment("edge_growth"))
print()

report = run_experiment(default_config("edge_growth", seed=0))
print(f"edge_growth: passed={report.passed}, mean ratio {report.aggregates['mean_ratio']:.4f}"
      f" (target {report.aggregates['target']})")

report = run_experiment(default_config("exchangeability", seed=0))
print(f"exchangeability: passed={report.passed}, process min p = "
      f"{report.aggregates['min_p_process']:.3f}, control max p = {report.aggregates['max_p_control']:.2g}")

with tempfile.TemporaryDirectory() as tmp:
    files = render_report(report, out_dir=tmp)
    for path in files:
        size = Path(path).stat().st_size
        print(f"  wrote {Path(path).name} ({size} bytes)")
    payload = json.loads(Path(files[1]).read_text())
    print("  JSON aggregate keys:", sorted(payload["aggregates"]))
