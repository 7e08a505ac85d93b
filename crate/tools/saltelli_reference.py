"""Reference values for the Sobol' sequence and Saltelli design, from scipy and SALib.

Writes crates/core/tests/data/saltelli_reference.txt. Offline use only.
"""
from pathlib import Path

import numpy as np
from scipy.stats import qmc
from SALib.analyze import sobol as analyze
from SALib.sample import sobol as sample
from SALib.test_functions import Ishigami

OUT = Path(__file__).resolve().parents[1] / "crates/core/tests/data/saltelli_reference.txt"


def main():
    lines = ["# generated by tools/saltelli_reference.py"]
    seq = qmc.Sobol(d=21, scramble=False).random(1024)
    for i in [1, 2, 3, 7, 100, 513, 1023]:
        lines.append("sobol %d %s" % (i, " ".join(repr(float(v)) for v in seq[i])))

    problem = {"num_vars": 3, "names": ["x1", "x2", "x3"], "bounds": [[-np.pi, np.pi]] * 3}
    x = sample.sample(problem, 8, scramble=False, skip_values=8)
    for r in x:
        lines.append("saltelli " + " ".join(repr(float(v)) for v in r))

    x = sample.sample(problem, 1024, scramble=False, skip_values=1024)
    y = Ishigami.evaluate(x)
    si = analyze.analyze(problem, y, calc_second_order=True, num_resamples=10, seed=1)
    for j in range(3):
        lines.append("ishigami %d %r %r" % (j, float(si["S1"][j]), float(si["ST"][j])))
    OUT.write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
