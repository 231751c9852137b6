"""Updating a single prior can be worse than not updating at all.

Two hypotheses about a repeated binary experiment: under the first, each
round's success probability is either 0.4 or 0.5 (chosen adversarially per
round); under the second it is either 0.6 or 1.  A uniform prior over the
finitely many length-N outcome assignments splits mass evenly between the
branches.

Act f pays the success indicator; the outside option x pays 0.55 always.
Prior expected payoff of f is 0.5 * 0.45 + 0.5 * 0.8 = 0.625 > 0.55, so a
Bayesian takes f before seeing data.  The truth is i.i.d. 0.6 (second
branch!), yet the likelihood race is won by the first branch: its per-round
best-case probabilities (0.5 for a success, 0.6 for a failure) beat the
second branch's forced spread.  The posterior concentrates on the wrong
branch, the predictive success probability drops toward 0.45, and the
Bayesian switches to x, earning 0.55 forever while f would earn 0.6.
"""

import numpy as np

from robustupdate import SampleData, UpdateParams, act, bayesian_posterior, \
    binary_iid, binary_space, sample
from robustupdate.scenarios import bayes_initial

space = binary_space()
family = bayes_initial(space)
truth = binary_iid(space, 0.6)
f = act(space, [1.0, 0.0])

prior = bayesian_posterior(family, SampleData(space, np.empty(0, dtype=np.int64)),
                           UpdateParams(support_floor=0.0))
print(f"prior branch masses: low={prior.mass('branch0')}, "
      f"high={prior.mass('branch1')}")
print(f"prior expected payoff of f: {prior.posterior_expected_payoff(f)!r} "
      f"(exactly 5/8)\n")

print(" N    mass(low branch)   predictive P(success)   choice   payoff")
for n in (0, 50, 150, 300, 600):
    data = sample(truth, n, np.random.SeedSequence((606, 0)))
    post = bayesian_posterior(family, data, UpdateParams(support_floor=0.0))
    mass_low = post.mass("branch0")
    pred = float(post.predictive_marginal(n + 1)[0])
    choice = "f" if pred > 0.55 else "x"
    payoff = 0.6 if choice == "f" else 0.55
    print(f"{n:4d}   {mass_low:16.6f}   {pred:21.4f}   {choice:>6s}   {payoff:.2f}")

print("\nacross independent samples at N=300:")
concentrated = 0
reps = 200
for r in range(reps):
    data = sample(truth, 300, np.random.SeedSequence((606, r)))
    post = bayesian_posterior(family, data, UpdateParams(support_floor=0.0))
    concentrated += post.mass("branch0") >= 0.99
print(f"  posterior mass >= 0.99 on the wrong branch in "
      f"{concentrated}/{reps} = {concentrated / reps:.3f} of runs")
print("  every concentrated run picks x: payoff 0.55 < 0.60 from f")
