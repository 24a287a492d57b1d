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
import inspect
import logging
from datetime import datetime
from pathlib import Path

import hydra
from omegaconf import DictConfig, OmegaConf

_NUMBER_SUFFIXES = ("", "K", "M", "B", "T", "Q")


class _LogFormatter(logging.Formatter):
    """`LEVEL date time location message`, the location being the last 15 characters of `file:line`."""

    def format(self, record: logging.LogRecord) -> str:
        dt = datetime.fromtimestamp(record.created).strftime("%Y-%m-%d %H:%M:%S")
        location = f"{record.pathname}:{record.lineno}"[-15:]
        message = f"{record.levelname} {dt} {location:>15} {record.getMessage()}"
        if record.exc_info:
            message += "\n" + self.formatException(record.exc_info)
        return message


def init_logging(level: int | str = logging.INFO):
    """Route every log record to stderr through one handler. Reports own stdout."""
    root = logging.getLogger()
    for handler in root.handlers[:]:
        root.removeHandler(handler)
    console_handler = logging.StreamHandler()
    console_handler.setFormatter(_LogFormatter())
    root.addHandler(console_handler)
    root.setLevel(level)


def format_big_number(num: float, precision: int = 0) -> str:
    exponent = 0
    while abs(num) >= 1000 and exponent < len(_NUMBER_SUFFIXES) - 1:
        num /= 1000.0
        exponent += 1
    return f"{num:.{precision}f}{_NUMBER_SUFFIXES[exponent]}"


def init_hydra_config(config_path: str, overrides: list[str] | None = None) -> DictConfig:
    """Compose the config at `config_path` with `overrides`.

    The parent directory of the file is the Hydra config dir, so config groups live next to it.
    """
    config_path = Path(config_path).absolute()
    hydra.core.global_hydra.GlobalHydra.instance().clear()
    with hydra.initialize_config_dir(config_dir=str(config_path.parent), version_base="1.2"):
        return hydra.compose(config_path.stem, overrides)


def dataclass_from_cfg(cfg_class, node: DictConfig | dict, **extra):
    """Instantiate a config dataclass from a (sub-)config, keeping only the keys its signature accepts.

    Keys present in the config but unknown to the dataclass are reported, not silently dropped.
    """
    expected_kwargs = set(inspect.signature(cfg_class).parameters)
    container = OmegaConf.to_container(node, resolve=True) if isinstance(node, DictConfig) else dict(node)
    unknown = set(container).difference(expected_kwargs)
    if unknown:
        logging.warning(f"Ignoring unknown {cfg_class.__name__} keys: {sorted(unknown)}")
    kwargs = {k: v for k, v in container.items() if k in expected_kwargs}
    kwargs.update(extra)
    return cfg_class(**kwargs)
