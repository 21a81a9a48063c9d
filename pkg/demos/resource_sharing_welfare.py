#!/usr/bin/env python3
"""How much welfare does published (noisy) usage information buy?

Plays the shared-vs-private resource-sharing instance and a batch of random
instances under three information regimes: exact counters, private counters
(clamped tree counter behind an underestimator wrapper), and no information
at all. Prints the competitive ratio OPT/SW for each.
"""

from contcount import ExperimentConfig, MechanismSpec, run_experiment
from contcount.harness import run_trial
from contcount.instances import harmonic_number, illustrative_shared_vs_private

REGIMES = {
    "perfect": MechanismSpec(mech="perfect"),
    "private": MechanismSpec(mech="treesum", eps=1.0, wraps=("clamp", "under"),
                             clamp_alpha=1.5, clamp_beta=3.0),
    "empty": MechanismSpec(mech="empty"),
}


def illustrative():
    n = 100
    inst = illustrative_shared_vs_private(n, 0.01)
    print(f"shared-vs-private instance (n={n}): one public resource decaying "
          "as 1/(k+1), private fallbacks worth 0.99")
    print(f"  harmonic benchmark H_{n} = {harmonic_number(n):.4f}")
    for name, spec in REGIMES.items():
        config = ExperimentConfig(game="resource", instance=inst,
                                  mechanism=spec, seed=1)
        result, _, _, _ = run_trial(config, 0)
        print(f"  {name:>8}: welfare {result.sw:8.4f}  ratio vs exact optimum "
              f"{result.ratio:6.2f}")


def random_batch(trials=60):
    print(f"\n{trials} random instances (n <= 40, m <= 8), greedy play:")
    print(f"  {'regime':>8} {'mean CR':>8} {'max CR':>8} {'envelope ok':>12}")
    for name, spec in REGIMES.items():
        config = ExperimentConfig(game="resource", instance="random:resource",
                                  mechanism=spec, trials=trials, seed=2,
                                  instance_params={"n_max": 40, "m_max": 8})
        _, summary = run_experiment(config)
        print(f"  {name:>8} {summary['mean_ratio']:>8.3f} {summary['max_ratio']:>8.3f} "
              f"{summary['envelope_pass_rate']:>12.2f}")
    print("\nreading: exact counters stay within the 4-competitive guarantee, "
          "private counters track them closely, empty counters can be far off "
          "(the shared-vs-private instance above makes that gap Theta(n/log n)).")


if __name__ == "__main__":
    illustrative()
    random_batch()
