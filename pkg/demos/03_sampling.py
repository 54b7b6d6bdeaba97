"""Monte Carlo draws converge to the analytic joint matrices.

Every sampler returns conflict-free decisions; the empirical matrix error
shrinks roughly like 1/sqrt(draws).

    python3 demos/03_sampling.py
"""

import numpy as np

from cfjs import PreferencePair, phom_pair_matrix
from cfjs.quantum import attenuation_expected_matrix
from cfjs.samplers import (
    accumulate,
    make_rng,
    max_cell_deviation,
    random_order_matrix,
    sample_attenuation_batch,
    sample_phom_batch,
    sample_random_order_batch,
    sample_uniform_batch,
    uniform_random_matrix,
)

pair = PreferencePair(np.array([0.1, 0.2, 0.3, 0.4]), np.array([0.3, 0.2, 0.2, 0.3]))
matrix, dist = phom_pair_matrix(pair)

samplers = {
    "Pure HOM": (lambda rng, k: sample_phom_batch(dist, rng, k), matrix),
    "OAM attenuation": (lambda rng, k: sample_attenuation_batch(pair, rng, k),
                        attenuation_expected_matrix(pair)),
    "random order": (lambda rng, k: sample_random_order_batch(pair, rng, k),
                     random_order_matrix(pair)),
    "uniform": (lambda rng, k: sample_uniform_batch(4, rng, k), uniform_random_matrix(4)),
}

print("max cell deviation from the analytic matrix (3/sqrt(draws) for reference)")
print(f"  {'draws':>8}  " + "  ".join(f"{name:>15}" for name in samplers) + "  3/sqrt")
for draws in (10**3, 10**4, 10**5):
    devs = []
    for k, (sample, target) in enumerate(samplers.values()):
        batch = sample(make_rng(1, stream=k), draws)
        assert np.all(batch.choice_a != batch.choice_b)
        devs.append(max_cell_deviation(accumulate(batch, 4).joint(), target))
    print(f"  {draws:>8}  " + "  ".join(f"{d:15.5f}" for d in devs) + f"  {3 / np.sqrt(draws):.5f}")

# physical cost: photon pairs generated per decision
rng = make_rng(2)
hom = sample_phom_batch(dist, rng, 10**5)
att = sample_attenuation_batch(pair, rng, 10**4)
print(f"\npairs per decision: Pure HOM {hom.attempts.mean():.2f} (model {1 / dist.usage:.2f}), "
      f"attenuation {att.attempts.mean():.1f}")
