from pathlib import Path

from iwasawa_k1 import (
    LayerTuple,
    LocallyConstantFn,
    ZetaDatum,
    beta_tuple,
    build_group,
    check_phi,
    dr_congruence_check,
    is_special_type,
    tau,
)
from iwasawa_k1.groupmodel import GroupSpec
from iwasawa_k1.random_utils import make_rng, random_trace_element
from iwasawa_k1.zeta import kummer_value

data = Path(__file__).resolve().parent / "data"

e1 = build_group(GroupSpec.from_file(data / "E1.grp"))
e2 = build_group(GroupSpec.from_file(data / "E2.grp"))

assert is_special_type(e1)
verdict = is_special_type(e2)
assert not verdict and verdict.witness == (3, 0)

assert kummer_value(5, 2) == kummer_value(5, 6) == 3

rng = make_rng(0)
t = random_trace_element(e1, e1.precision, rng)
assert tau(e1, beta_tuple(e1, t)) == t.truncate(e1.precision - e1.e)

ones = LayerTuple.from_file(data / "ones.tup", e1)
assert check_phi(ones).passed

kummer5 = ZetaDatum.from_file(data / "kummer5.zd")
eps = LocallyConstantFn.constant(kummer5.model.layer_group(1, 1))
check = dr_congruence_check(kummer5, 1, 0, eps, 2)
assert check.holds
print("\n".join(check.to_lines()))
