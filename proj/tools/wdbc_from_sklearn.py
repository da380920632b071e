#!/usr/bin/env python3
"""Rebuild a UCI-layout wdbc.data from the copy bundled with scikit-learn.

scikit-learn ships the Wisconsin Diagnostic Breast Cancer table (569 rows,
30 features, same row order as the UCI distribution) without the sample ids.
The ids written here are placeholders (1..569); nothing downstream uses them.

usage: wdbc_from_sklearn.py OUT_PATH
"""
import os
import sys

import sklearn


def main() -> int:
    if len(sys.argv) != 2:
        print(__doc__, file=sys.stderr)
        return 2
    src = os.path.join(os.path.dirname(sklearn.__file__), "datasets", "data",
                       "breast_cancer.csv")
    with open(src) as fh:
        lines = fh.read().splitlines()
    n_rows, n_features = (int(v) for v in lines[0].split(",")[:2])
    out = []
    for i, line in enumerate(lines[1:1 + n_rows], start=1):
        cells = line.split(",")
        if len(cells) != n_features + 1:
            print(f"unexpected width on row {i}", file=sys.stderr)
            return 1
        # sklearn target: 0 = malignant, 1 = benign
        diagnosis = "M" if cells[-1] == "0" else "B"
        out.append(",".join([str(i), diagnosis] + cells[:-1]))
    with open(sys.argv[1], "w") as fh:
        fh.write("\n".join(out) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
