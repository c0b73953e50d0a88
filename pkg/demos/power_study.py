"""Choosing (p, weights) and measuring power, at reduced desk scale.

Reproduces the shape of the headline experiments with 300 replicates:
the heteroskedasticity objective and its minimizer, the two-sample power
comparison under a scale alternative, and the uniformity ROC against the
chi-square baseline under an underdispersed Erlang alternative.
"""

from spacings import (
    AlternativeSpec,
    ArrivalDist,
    WeightVector,
    heteroskedastic_objective,
    one_sample_roc_study,
    search_parameters,
    two_sample_power_study,
)

K, N = 10, 30
PUBLISHED = ["1", "1/5", "1/10", "0", "0", "0", "0", "1/10", "1/5", "1"]

print("== the scale-detection objective (exact rational, lower is better) ==")
for label, w in (("uniform", [1] * K), ("U-shaped published", PUBLISHED)):
    value = heteroskedastic_objective(1, w, N, K, "1/2")
    print(f"  {label:>20}: {float(value):.6f}")

print("\n== coordinate-descent search over symmetric weight templates ==")
objective = lambda p, w: heteroskedastic_objective(p, w, N, K, "1/2")
p_best, w_best, value = search_parameters(
    objective, [1],
    {"k": K, "grid": [f"{j}/10" for j in range(11)], "template": "symmetric",
     "starts": [PUBLISHED[:5]], "restarts": 0, "sweeps": 2},
)
print(f"  best p = {p_best}, objective {float(value):.6f}")
print(f"  best w = {[str(v) for v in w_best.entries]}")

print("\n== two-sample power at the scale alternative sigma^2 = 4 ==")
study = two_sample_power_study(
    1, WeightVector.of(PUBLISHED), K, N, AlternativeSpec.scale(2.0),
    replicates=300, alpha=0.05, seed=11, baselines=("ks", "cvm", "mw"),
)
for name, power in sorted(study["powers"].items()):
    print(f"  {name:>8}: power {power:.3f}")

print("\n== uniformity ROC: gap test vs chi-square, Erlang arrivals ==")
roc = one_sample_roc_study(
    2, WeightVector.uniform(K), K,
    AlternativeSpec.arrivals(ArrivalDist.erlang(4)),
    replicates=300, alphas=[0.01, 0.05, 0.1, 0.25, 0.5], seed=12,
    baselines=("chi2",), M=400,
)
print("  alpha   spacing   chi2")
for (a, pg), (_, pc) in zip(roc["curves"]["spacing"], roc["curves"]["chi2"]):
    print(f"  {a:5.2f}   {pg:7.3f}   {pc:5.3f}")
