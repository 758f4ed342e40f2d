"""Sampled RSC / GEB / QG constants on the instance library.

Each number is the smallest per-sample ratio, so it can only sit above the
true constant.  On the two analytic instances the samples hit the exact
value; on the rest the ordering between the three is what to look at.
"""

from errbound import make_instance
from errbound.certificates import chain_theorem1, chain_theorem2, estimate_constant, verify_chain

families = ["quad1d", "rankdef_ls", "lasso", "box_ls", "case_study"]

print(f"{'family':<12}{'variant':<10}{'rsc':>12}{'geb':>12}{'qg':>12}")
for fam in families:
    p = make_instance(fam, seed=7)
    row = {prop: estimate_constant(p, prop, n_samples=2000, seed=0) for prop in ("rsc", "geb", "qg")}
    print(f"{fam:<12}{row['qg'].variant:<10}"
          + "".join(f"{row[k].constant:12.5g}" for k in ("rsc", "geb", "qg")))

# rankdef_ls: f = 0.5 (x1 + x2 - 1)^2.  With s the residual, d = |s|/sqrt(2),
# f = d^2 and ||grad f|| = 2 d, so all three constants are exactly 2.

# Conversions between the constants, as closed forms.
print()
print("QG(2) implies", chain_theorem1(2.0))
print("extended QG(1) with gamma = L = 1 implies", chain_theorem2(1.0, 1.0, 1.0))

# The pointwise part of the chain on a restricted sublevel set.
rep = verify_chain(make_instance("lasso", seed=7), omega=1.0, n_samples=2000, seed=1)
print()
for c in rep.checks:
    print(" ", c)
print("constants on {phi <= phi* + 1}:",
      {k: (round(v, 5) if isinstance(v, float) else v) for k, v in rep.constants.items()})
assert rep.passed
