#!/usr/bin/env python3
# Copyright 2026 The cram Authors.
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
"""Solves an exported LP file with HiGHS and prints the optimum.

Usage: solve_lp.py FILE.lp

Prints one line, "optimal <objective>" or "status <name>", and exits 0 when
an optimum was found, 2 when the program is infeasible, 1 otherwise. Needs
the highspy package (pip install highspy).
"""

import sys


def main(argv):
    if len(argv) != 2:
        print(__doc__.strip(), file=sys.stderr)
        return 1
    try:
        import highspy
    except ImportError:
        print("status missing-highspy")
        return 1

    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("mip_rel_gap", 0.0)
    h.setOptionValue("mip_abs_gap", 1e-12)
    h.setOptionValue("mip_feasibility_tolerance", 1e-9)
    h.setOptionValue("primal_feasibility_tolerance", 1e-9)
    h.setOptionValue("random_seed", 0)
    h.setOptionValue("threads", 1)
    if h.readModel(argv[1]) == highspy.HighsStatus.kError:
        print("status unreadable")
        return 1
    h.run()
    status = h.getModelStatus()
    if status == highspy.HighsModelStatus.kOptimal:
        print("optimal %.12f" % h.getInfo().objective_function_value)
        return 0
    name = h.modelStatusToString(status).lower().replace(" ", "-")
    print("status " + name)
    return 2 if status == highspy.HighsModelStatus.kInfeasible else 1


if __name__ == "__main__":
    sys.exit(main(sys.argv))
