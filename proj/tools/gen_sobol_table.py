#!/usr/bin/env python3
# Copyright 2026 The kdnas Authors.
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

"""Regenerates src/sobol_directions.inc from the Joe-Kuo (new-joe-kuo-6.21201)
direction numbers bundled with SciPy."""

import os
import sys

import numpy as np
import scipy.stats._sobol as sobol_mod

NUM_DIMS = 256


def main():
    path = os.path.join(os.path.dirname(sobol_mod.__file__),
                        "_sobol_direction_numbers.npz")
    data = np.load(path)
    poly, vinit = data["poly"], data["vinit"]
    out = sys.stdout
    out.write("// Generated by tools/gen_sobol_table.py. Do not edit.\n")
    out.write("// Joe-Kuo direction numbers (new-joe-kuo-6.21201), first %d dims.\n"
              % NUM_DIMS)
    out.write("// {degree, polynomial (with leading/trailing ones), m_1..m_degree}\n")
    for d in range(NUM_DIMS):
        p = int(poly[d])
        deg = p.bit_length() - 1
        ms = ", ".join(str(int(v)) for v in vinit[d][:max(deg, 1)])
        out.write("{%d, %d, {%s}},\n" % (deg, p, ms))


if __name__ == "__main__":
    main()
