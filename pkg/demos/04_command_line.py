"""
The command-line tool
=====================

The same pipeline driven through ``qcsphere`` subcommands, writing every
intermediate file into a temporary directory.
"""

import pathlib
import tempfile

from qcsphere.cli import main

work = pathlib.Path(tempfile.mkdtemp(prefix="qcsphere-"))


def run(*args):
    print("$ qcsphere", " ".join(args))
    code = main(list(args))
    print(f"exit {code}\n")


# Synthetic inputs: an icosphere and a ridged ellipsoid with a region spec.
run("gen", "icosphere", "--level", "3", "--out", str(work / "ico.obj"))
run("gen", "ridge", "--frequency", "24", "--out", str(work / "ridge.obj"),
    "--spec-out", str(work / "ridge.spec"))
print((work / "ridge.spec").read_text())

# Conformal and uniform K = 3 parameterizations with CSV reports.
run("param", "--in", str(work / "ico.obj"), "--uniform-k", "1",
    "--out", str(work / "ico_sphere.obj"), "--report", str(work / "k1.csv"))
run("param", "--in", str(work / "ico.obj"), "--uniform-k", "3",
    "--out", str(work / "ico_k3.obj"), "--report", str(work / "k3.csv"),
    "--hist", str(work / "k3_hist.csv"))
print((work / "k3.csv").read_text())

# Measure the dilation between two meshes with the same connectivity.
run("metrics", "--source", str(work / "ico.obj"), "--target", str(work / "ico_k3.obj"))

# Remesh the ridge and look at the quality report.
run("remesh", "--in", str(work / "ridge.obj"), "--spec", str(work / "ridge.spec"),
    "--out", str(work / "ridge_remeshed.obj"), "--metrics", str(work / "remesh.csv"))
print((work / "remesh.csv").read_text())

# Invalid input is reported with a nonzero exit status.
run("param", "--in", str(work / "missing.obj"), "--uniform-k", "2", "--out", "x.obj")
print(f"files written to {work}")
