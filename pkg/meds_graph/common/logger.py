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
from pathlib import Path

from omegaconf import DictConfig
from termcolor import colored


def log_output_path(kind: str, path: str | Path):
    logging.info(colored(f"{kind}:", "yellow", attrs=["bold"]) + f" {path}")


def cfg_to_group(cfg: DictConfig) -> str:
    """Short description of a run, for log lines."""
    source = f"input:{cfg.input_root}" if cfg.get("input_root") else f"synth:seed={cfg.synth.seed}"
    provenance = cfg.mapping.include_event_provenance
    return "-".join([source, f"workers:{cfg.num_workers}", f"provenance:{provenance}"])
