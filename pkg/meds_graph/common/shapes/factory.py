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
import logging

from omegaconf import DictConfig

from meds_graph.common.shapes.shape_file import load_suite
from meds_graph.common.shapes.shapes import ShapeSuite, builtin_meds_suite


def make_suite(cfg: DictConfig) -> ShapeSuite:
    """The shape suite of a run: `cfg.shapes.path` if set, else the builtin suite over the configured
    vocabulary namespace."""
    path = cfg.shapes.get("path")
    if path:
        logging.info(f"Loading shapes from {path}")
        return load_suite(path)
    return builtin_meds_suite(cfg.mapping.vocab_namespace)
