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
"""Write a synthetic MEDS dataset to disk.

```bash
meds-graph synth --output data/synthetic synth=neurovasc_like --seed 3
```
"""

import logging

from omegaconf import DictConfig

from meds_graph.common.datasets.factory import make_synth_config
from meds_graph.common.datasets.synth import generate
from meds_graph.common.datasets.utils import save_dataset
from meds_graph.common.logger import log_output_path
from meds_graph.scripts.run_config import ExitCode, RunConfig


def run_synth(cfg: DictConfig, run: RunConfig) -> ExitCode:
    synth_cfg = make_synth_config(cfg)
    ds = generate(synth_cfg)
    logging.info(f"Generated {ds.num_events} events for {synth_cfg.n_subjects} subjects")
    save_dataset(ds, cfg.conversion.output_path)
    log_output_path("MEDS root", cfg.conversion.output_path)
    return ExitCode.OK
