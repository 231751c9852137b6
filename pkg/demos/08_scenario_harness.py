"""Driving the simulation harness from Python.

The same machinery behind the robust-update CLI: parse a JSON config, run the
named scenario, and get back a deterministic report with per-replication
records, aggregates, and embedded pass/fail checks.  Identical configs
produce byte-identical reports, threaded or not.
"""

import json
import os

from robustupdate import parse_config, run_scenario

config_text = """{
  "scenario": "coverage",
  "rule": "riid",
  "alpha": 0.05,
  "n": 500,
  "reps": 200,
  "seed": 42
}"""

config = parse_config(config_text)
report = run_scenario(config)

print(f"scenario: {report.scenario}")
print(f"aggregates: {json.dumps(report.aggregates, sort_keys=True)}")
for check in report.checks:
    status = "PASS" if check.passed else "FAIL"
    print(f"{status} {check.name}: observed={check.observed} "
          f"required: {check.required}")

print("\nfirst three replication records (CSV):")
for line in report.to_csv_text().split("\n")[:4]:
    print(f"  {line}")

os.environ["ROBUST_UPDATE_THREADS"] = "4"
threaded = run_scenario(config)
os.environ.pop("ROBUST_UPDATE_THREADS")
print(f"\nthreaded rerun byte-identical: "
      f"{threaded.to_json_text() == report.to_json_text()}")

print("\nequivalent CLI invocations:")
print("  robust-update list-scenarios")
print("  robust-update validate my_config.json")
print("  robust-update run my_config.json --seed 42 --out report.json")
print("  (exit code 0 = all checks pass, 1 = usage/config error, "
      "2 = a check failed)")
