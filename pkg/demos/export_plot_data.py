"""
Data for a picture of an optimal set
====================================

Writes the points of an optimal 6-set, their pieces and the Voronoi
boundaries to a CSV file. Plot them with whatever tool you like.
"""

import io

from cantor_quant.cli import run

buf = io.StringIO()
run(["export-plot", "--n", "6"], stdout=buf)
text = buf.getvalue()
print(text)

with open("optimal_6.csv", "w") as fh:
    fh.write(text)
