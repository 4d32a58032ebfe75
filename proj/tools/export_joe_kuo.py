#!/usr/bin/env python3
"""Write Joe-Kuo (new-joe-kuo-6.21201) direction numbers in the distributed
column format, using the copy shipped inside SciPy.

    python3 tools/export_joe_kuo.py 1100 > data/joe_kuo_d1100.txt
"""
import os
import sys

import numpy as np
import scipy


def main() -> None:
    max_dim = int(sys.argv[1]) if len(sys.argv) > 1 else 1100
    path = os.path.join(os.path.dirname(scipy.__file__), "stats",
                        "_sobol_direction_numbers.npz")
    z = np.load(path)
    poly, vinit = z["poly"], z["vinit"]
    print("d       s       a       m_i")
    # SciPy row 0 is the van der Corput dimension; the file starts at d = 2.
    for dim in range(2, max_dim + 1):
        p = int(poly[dim - 1])
        s = p.bit_length() - 1
        a = (p >> 1) & ((1 << (s - 1)) - 1) if s > 1 else 0
        m = " ".join(str(int(v)) for v in vinit[dim - 1][:s])
        print(f"{dim}       {s}       {a}       {m} ")


if __name__ == "__main__":
    main()
