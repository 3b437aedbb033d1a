"""
Command-line walkthrough
========================

Drives the ``edgequant`` command on the scenario files in ``scenarios/``.
The same calls work from a shell, e.g.
``edgequant simulate --config demos/scenarios/logarithmic.toml --out run.csv``.
"""

import os

from edgequant.cli import main

here = os.path.dirname(os.path.abspath(__file__))
scen = os.path.join(here, "scenarios")
out = os.path.join(here, "out")
os.makedirs(out, exist_ok=True)


def run(*argv):
    print("$ edgequant", " ".join(argv))
    code = main(list(argv))
    print("exit code", code, "\n")
    return code


run("certify", "--config", os.path.join(scen, "logarithmic.toml"), "--out", os.path.join(out, "cert.json"))
run("simulate", "--config", os.path.join(scen, "logarithmic.toml"), "--out", os.path.join(out, "log.csv"))
run("plot", os.path.join(out, "log.csv"), "--out", os.path.join(out, "log.svg"))
run("sweep", "--config", os.path.join(scen, "uniform.toml"), "--deltas", "0.01,0.1,1,2,3",
    "--horizon", "100", "--out", os.path.join(out, "sweep.csv"))

# a gain below the threshold is reported with exit code 2
with open(os.path.join(scen, "uniform.toml")) as fh:
    text = fh.read()
text = text.replace("sigma = 1.64", "sigma = 1.2").replace('"g5.txt"', repr(os.path.join(scen, "g5.txt")))
low_gain = os.path.join(out, "low_gain.toml")
with open(low_gain, "w") as fh:
    fh.write(text)
run("certify", "--config", low_gain)
run("reproduce-paper")
