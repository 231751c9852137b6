"""Accommodation matters beyond max-min: a minimax-regret story.

One experiment, success probability anywhere in [0, 1] initially.  Act f pays
the success indicator; act x pays 2/3 always.  Ex-post regret of an act under
p is the shortfall against the better act under p; minimax regret picks the
act whose worst-case shortfall is smallest.

Initially f's worst regret is 2/3 (at p=0) and x's is 1/3 (at p=1), so x wins.
Suppose data narrows the set to p in [0.6, 1] and the update is trusted.
Now f's worst regret is 4/15 and x's is still 1/3, so the choice flips to f.
If the truth is p=0.62 (inside the updated set, so no one was lied to), f
pays 0.62 while x pays 2/3: the data-driven choice loses.
"""

import numpy as np

from robustupdate import (
    BoxFamily,
    DecisionProblem,
    act,
    binary_iid,
    binary_space,
    constant_act,
    future_hull,
    minimax_regret_choice,
    objective_payoff,
    regret_values,
)

space = binary_space()
initial = BoxFamily(space, (np.array([[0.0, 1.0], [0.0, 1.0]]),))
updated = BoxFamily(space, (np.array([[0.6, 1.0], [0.0, 0.4]]),))
f = act(space, [1.0, 0.0])
x = constant_act(space, 1, 2.0 / 3.0)
problem = DecisionProblem(space, (f, x))

hull0 = future_hull(initial, 0, 1)
hull1 = future_hull(updated, 0, 1)
r0 = regret_values(problem, hull0)
r1 = regret_values(problem, hull1)
print(f"worst-case regret, initial set [0, 1]:   f: {r0[0]:.6f}  x: {r0[1]:.6f}")
print(f"worst-case regret, updated set [0.6, 1]: f: {r1[0]:.6f}  x: {r1[1]:.6f}")
print(f"exact fractions: 2/3, 1/3, 4/15, 1/3\n")

df = minimax_regret_choice(problem, hull0)
dd = minimax_regret_choice(problem, hull1)
print(f"data-free choice:   {'x' if df == x else 'f'}")
print(f"data-driven choice: {'f' if dd == f else 'x'}")

truth = binary_iid(space, 0.62)
w_df = objective_payoff(df, truth, 0)
w_dd = objective_payoff(dd, truth, 0)
print(f"\ntruth p = 0.62 (inside the updated set):")
print(f"  data-free payoff   {w_df:.4f}")
print(f"  data-driven payoff {w_dd:.4f}  <- updating on correct information "
      f"still loses under this criterion")
