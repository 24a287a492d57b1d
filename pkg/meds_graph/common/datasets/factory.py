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

from meds_graph.common.datasets.meds_dataset import MedsDataset
from meds_graph.common.datasets.synth import SynthConfig, generate
from meds_graph.common.utils.utils import dataclass_from_cfg


def make_synth_config(cfg: DictConfig, **overrides) -> SynthConfig:
    return dataclass_from_cfg(SynthConfig, cfg.synth, **overrides)


def make_dataset(cfg: DictConfig, progress: bool = False) -> MedsDataset:
    """Make the dataset a run works on.

    Args:
        cfg: A Hydra config as per the meds-graph config scheme. When `cfg.input_root` is set, the MEDS root
            it points to is loaded (lazily if `cfg.streaming`); otherwise a synthetic dataset is generated
            from `cfg.synth`.
    Returns:
        The MedsDataset.
    """
    if cfg.get("input_root"):
        root = Path(cfg.input_root)
        logging.info(f"Loading MEDS dataset from {root}")
        return MedsDataset(
            root,
            streaming=cfg.get("streaming", False),
            num_workers=cfg.get("num_workers", 1),
            progress=progress,
        )

    synth_cfg = make_synth_config(cfg)
    logging.info(
        f"Generating a synthetic MEDS dataset (seed={synth_cfg.seed}, subjects={synth_cfg.n_subjects})"
    )
    return generate(synth_cfg)
