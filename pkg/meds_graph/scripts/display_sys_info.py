#!/usr/bin/env python

# Copyright 2024 The meds-graph authors. All rights reserved.
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

"""Use this script to get a quick summary of your system config when reporting a bug.
Missing packages are reported as N/A.
"""

import platform

from meds_graph.common.utils.import_utils import is_package_available

PACKAGES = {
    "`meds-graph` version": ("meds_graph", "meds-graph"),
    "Datasets version": ("datasets", None),
    "Numpy version": ("numpy", None),
    "PyArrow version": ("pyarrow", None),
    "rdflib version": ("rdflib", None),
    "pySHACL version": ("pyshacl", None),
    "Hydra version": ("hydra", "hydra-core"),
}


def display_sys_info() -> dict:
    """Run this to get basic system info to help for tracking issues & bugs."""
    info = {"Platform": platform.platform(), "Python version": platform.python_version()}
    for label, (package, dist_name) in PACKAGES.items():
        available, version = is_package_available(package, return_version=True, dist_name=dist_name)
        info[label] = version if available else "N/A"

    print("\nCopy-and-paste the text below in your GitHub issue.\n")
    print("\n".join([f"- {prop}: {val}" for prop, val in info.items()]) + "\n")
    return info


if __name__ == "__main__":
    display_sys_info()
