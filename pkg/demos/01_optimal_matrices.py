"""Minimum-loss joint selection matrices.

Two players state preferences over the same options and must never pick the
same one.  When every popularity S_i = A_i + B_i is at most 1 a conflict-free
matrix can hit both preferences exactly; otherwise the most popular option
caps what is achievable and the best loss has a closed form.

    python3 demos/01_optimal_matrices.py
"""

import numpy as np

from cfjs import PreferencePair, loss, min_loss, optimal_matrix, popularity, satisfied_preferences


def show(title, pair):
    m = optimal_matrix(pair)
    pi_a, pi_b = satisfied_preferences(m)
    print(f"\n{title}")
    print(f"  popularities     {np.round(popularity(pair).s, 4)}")
    print("  joint matrix")
    for row in m.p:
        print("   ", np.array2string(row, precision=4, suppress_small=True))
    print(f"  satisfied A      {np.round(pi_a, 4)}  (wanted {pair.a})")
    print(f"  satisfied B      {np.round(pi_b, 4)}  (wanted {pair.b})")
    print(f"  loss {loss(m, pair):.3e}   closed-form minimum {min_loss(pair):.6f}")


# every option at most "one vote": zero loss is reachable
show("four options, S_max = 0.7", PreferencePair(np.array([0.1, 0.2, 0.3, 0.4]),
                                                   np.array([0.3, 0.2, 0.2, 0.3])))

# both players lean heavily on option 3: it gets capped
a = np.array([1, 3, 9]) / 13
show("geometric 1:3:9 for both players, S_max = 18/13", PreferencePair(a, a))
print(f"  exact minimum is 75/676 = {75 / 676:.6f}")

# the minimum grows with the excess popularity and barely with N
print("\nminimum loss N (S_max - 1)^2 / (2 (N - 1)) at S_max = 2")
for n in (2, 3, 5, 10, 50):
    e = np.zeros(n)
    e[-1] = 1.0
    print(f"  N = {n:2d}   {min_loss(PreferencePair(e, e)):.4f}")
