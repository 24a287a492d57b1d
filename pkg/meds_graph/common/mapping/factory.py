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
from omegaconf import DictConfig, OmegaConf

from meds_graph.common.datasets.records import DatasetMetadataRecord
from meds_graph.common.mapping.configuration_mapping import MappingContext, slugify
from meds_graph.common.utils.utils import dataclass_from_cfg


def make_mapping_context(cfg: DictConfig, metadata: DatasetMetadataRecord) -> MappingContext:
    """Build the mapping context of a run from `cfg.mapping`.

    A null `dataset_slug` is derived from the dataset name.
    """
    node = OmegaConf.to_container(cfg.mapping, resolve=True)
    if not node.get("dataset_slug"):
        node["dataset_slug"] = slugify(metadata.dataset_name)
    return dataclass_from_cfg(MappingContext, node)
