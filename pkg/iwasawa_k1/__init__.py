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

__version__ = "0.0.1"

from .configuration_utils import get_config, load_config, set_config
from .exactnum import CycloRational, Residue, p_adic_valuation, reduce_mod_pN
from .groupmodel import GroupElement, GroupModel, GroupSpec, build_group, is_special_type, transfer_ver
from .groupring import RingElement, TraceElement, parse_element, parse_trace, to_trace, trace_ideal_membership
from .k1maps import LayerTuple, beta, beta_tuple, tau, theta, theta_tuple, ver_ring
from .logk1 import integral_log_L, layer_L_compat, log_series
from .phipsi import (
    CheckReport,
    L_phi_to_psi,
    additive_theorem_verify,
    check_phi,
    check_phi_fraction,
    check_psi,
    diagram_verify,
)
from .zeta import (
    DirichletCharacter,
    LocallyConstantFn,
    ZetaDatum,
    bernoulli,
    delta_value,
    dr_congruence_check,
    partial_zeta_Q,
    partial_zeta_vector,
    ver_congruence_check,
    zeta_approx,
)
