#!/usr/bin/env python3
# Copyright 2026 The Mutspec Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

# Builds fixtures/samples.jsonl and the golden report.csv for the fixture
# corpus. The golden is computed here, from the brute-force oracle matrices
# and exact binomials, without the C++ metrics code.
#
#   tools/gen_fixture_samples.py fixtures
import json
import random
import sys
from fractions import Fraction
from math import comb
from pathlib import Path

MODELS = {"model-a": (5, 3, 2), "model-b": (2, 4, 4)}  # weights: complete, incomplete, incorrect
SETTINGS = ["C2P", "N2P"]
N = 5
KS = [1, 3, 5]
KINDS = ["complete", "incomplete", "incorrect"]


def fmt(v):
    if v is None:
        return "—"
    s = "%.3f" % v
    return "0.000" if s == "-0.000" else s


def pass_at_k(n, c, k):
    return 1 - Fraction(comb(n - c, k), comb(n, k))


def main(root):
    root = Path(root)
    rng = random.Random(20240611)
    sets = {p.stem: json.loads(p.read_text()) for p in sorted((root / "postconds").glob("*.json"))}
    oracle = {p.stem: json.loads(p.read_text()) for p in sorted((root / "oracle").glob("*.json"))}

    verdict = {}
    for task, m in oracle.items():
        for s, row in zip(m["sets"], m["cells"]):
            correct = row[0] == 1
            verdict[task, s] = (correct, correct and all(c == 0 for c in row[1:]))

    lines = []
    outcomes = {}
    for model, weights in MODELS.items():
        for setting in SETTINGS:
            for task in sets:
                for i in range(N):
                    kind = rng.choices(KINDS, weights=weights)[0]
                    chosen = next(s for s in sets[task] if s["set_id"] == kind)
                    lines.append(json.dumps({"task": task, "model": model, "setting": setting,
                                             "index": i, "set": {"conditions": chosen["conditions"]}},
                                            sort_keys=True))
                    outcomes.setdefault((model, setting, task), []).append(verdict[task, kind])
    (root / "samples.jsonl").write_text("\n".join(lines) + "\n")

    header = ["model", "setting", "tasks"]
    for k in KS:
        header += ["corr@%d" % k, "comp@%d" % k, "delta@%d" % k, "comp/corr@%d" % k]
    header.append("c2c")
    out = [",".join(header)]
    for model in sorted(MODELS):
        for setting in sorted(SETTINGS):
            groups = [v for (m, s, _), v in sorted(outcomes.items()) if m == model and s == setting]
            row = [model, setting, str(len(groups))]
            for k in KS:
                corr = sum(pass_at_k(N, sum(c for c, _ in g), k) for g in groups) / len(groups)
                comp = sum(pass_at_k(N, sum(p for _, p in g), k) for g in groups) / len(groups)
                rho = None if corr == 0 else float(comp / corr)
                row += [fmt(float(corr)), fmt(float(comp)), fmt(float(corr - comp)), fmt(rho)]
            cc = sum(sum(c for c, _ in g) for g in groups)
            cp = sum(sum(p for _, p in g) for g in groups)
            row.append(fmt(None if cc == 0 else cp / cc))
            out.append(",".join(row))
    (root / "golden").mkdir(exist_ok=True)
    (root / "golden" / "report.csv").write_text("\n".join(out) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "fixtures")
