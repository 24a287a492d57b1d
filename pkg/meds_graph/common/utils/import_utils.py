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
import importlib.metadata
import importlib.util
import logging


def is_package_available(
    pkg_name: str, return_version: bool = False, dist_name: str | None = None
) -> tuple[bool, str] | bool:
    """Whether `pkg_name` is importable and installed as a distribution, so a local directory of the same
    name does not count.

    `dist_name` is the distribution name when it differs from the import name (`hydra-core` for `hydra`).
    """
    version = "N/A"
    available = importlib.util.find_spec(pkg_name) is not None
    if available:
        try:
            version = importlib.metadata.version(dist_name or pkg_name)
            logging.debug(f"Found {pkg_name} {version}")
        except importlib.metadata.PackageNotFoundError:
            available = False
    return (available, version) if return_version else available


_pyshacl_available = is_package_available("pyshacl")
