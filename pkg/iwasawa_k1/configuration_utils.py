# coding=utf-8
# Copyright 2023 The iwasawa_k1 Authors.
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
"""Library configuration: structured defaults, YAML files and dotlist overrides merged with OmegaConf."""

import os
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Any, List, Optional, Sequence, Tuple, Union

from omegaconf import DictConfig, ListConfig, OmegaConf

from .logging import get_logger


logger = get_logger(__name__)


class FrozenDict(OrderedDict):
    """Read-only mapping used for lookup tables that models expose after construction."""

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.__frozen = True

    def __setitem__(self, key, value):
        if getattr(self, "_FrozenDict__frozen", False):
            raise TypeError(f"You cannot use ``__setitem__`` on a {self.__class__.__name__} instance.")
        super().__setitem__(key, value)

    def __delitem__(self, *args, **kwargs):
        raise TypeError(f"You cannot use ``__delitem__`` on a {self.__class__.__name__} instance.")

    def setdefault(self, *args, **kwargs):
        raise TypeError(f"You cannot use ``setdefault`` on a {self.__class__.__name__} instance.")

    def pop(self, *args, **kwargs):
        raise TypeError(f"You cannot use ``pop`` on a {self.__class__.__name__} instance.")

    def update(self, *args, **kwargs):
        raise TypeError(f"You cannot use ``update`` on a {self.__class__.__name__} instance.")


@dataclass
class PrecisionConfig:
    # extra p-adic digits carried by the integral logarithm; None means e + 2
    log_buffer: Optional[int] = None
    # moduli above 2**max_modulus_bits use Python-int coefficient vectors
    max_modulus_bits: int = 31


@dataclass
class LinalgConfig:
    max_dense_size: int = 243


@dataclass
class ZetaConfig:
    sample_weights: List[int] = field(default_factory=lambda: [2, 4, 6, 8, 12])


@dataclass
class ReportConfig:
    format: str = "text"


@dataclass
class RandomConfig:
    seed: int = 0


@dataclass
class IwasawaConfig:
    precision: PrecisionConfig = field(default_factory=PrecisionConfig)
    linalg: LinalgConfig = field(default_factory=LinalgConfig)
    zeta: ZetaConfig = field(default_factory=ZetaConfig)
    report: ReportConfig = field(default_factory=ReportConfig)
    random: RandomConfig = field(default_factory=RandomConfig)


_active_config: Optional[DictConfig] = None


def load_config(
    path: Optional[Union[str, os.PathLike]] = None, overrides: Sequence[str] = ()
) -> DictConfig:
    """
    Build a configuration from the structured defaults, an optional YAML file and dotlist overrides.

    Args:
        path (`str` or `os.PathLike`, *optional*):
            YAML file merged over the defaults. Unknown keys are rejected by the structured schema.
        overrides (`Sequence[str]`, *optional*):
            `key=value` strings applied last, e.g. `linalg.max_dense_size=729`.

    Return:
        `omegaconf.DictConfig`
    """
    conf = OmegaConf.structured(IwasawaConfig)
    if path is not None:
        conf = OmegaConf.merge(conf, OmegaConf.load(path))
    if overrides:
        conf = OmegaConf.merge(conf, OmegaConf.from_dotlist(list(overrides)))
    return conf


def get_config() -> DictConfig:
    """Return the active configuration, creating the default one on first use."""
    global _active_config
    if _active_config is None:
        _active_config = load_config()
    return _active_config


def set_config(conf: Optional[DictConfig]) -> None:
    """Install `conf` as the active configuration. `None` restores the defaults on next access."""
    global _active_config
    _active_config = conf
    if conf is not None:
        logger.debug(f"active configuration: {dict(flatten_config(conf))}")


def flatten_config(cfg: Any, resolve: bool = True) -> List[Tuple[str, Any]]:
    ret = []

    if isinstance(cfg, DictConfig):
        for k, v in cfg.items_ex(resolve=resolve):
            if isinstance(v, (DictConfig, ListConfig)):
                ret.extend((f"{k}.{k1}", v1) for k1, v1 in flatten_config(v, resolve=resolve))
            else:
                ret.append((str(k), v))
    elif isinstance(cfg, ListConfig):
        for idx, v in enumerate(cfg._iter_ex(resolve=resolve)):
            if isinstance(v, (DictConfig, ListConfig)):
                ret.extend((f"{idx}.{k1}", v1) for k1, v1 in flatten_config(v, resolve=resolve))
            else:
                ret.append((str(idx), v))
    else:
        raise TypeError(f"Unexpected config type {type(cfg)}")

    return ret
