#!/usr/bin/env python3
"""Random-interval measurements on a delocalized excitation.

A W-state over the first lambda sites of a 12-site chain is measured at
random times drawn from a bimodal distribution (1 us or 5 us, fifty-fifty).
The survival probability of one realization is compared against the two
closed forms: the constant-edge prediction (exact for lambda = 1, 2 where
the W-state is an eigenstate of the confined dynamics) and the
time-averaged prediction that follows the actual edge population.

Writes demo_out/wstate_survival.csv with the full staircases.
"""

from pathlib import Path

from zenochain import (
    ChainSpec,
    IntervalDistribution,
    ProtocolConfig,
    ProtocolKind,
    SeededSampler,
    edge_population,
    moments,
    pstar_time_averaged,
    pstar_weak,
    run_projective,
    variance_h_pi,
    w_state,
)
from zenochain.experiments import write_csv

d = IntervalDistribution.bimodal(1.0, 5.0, 0.5)
mom = moments(d)
m = 500
out = Path("demo_out")

rows = []
print(f"bimodal intervals: mean {mom.mean} us, kappa = {mom.kappa:.4f}")
print()
print("lambda   ln P (sim)   ln P* (const)   ln P* (time-avg)")
for lam in range(1, 10):
    spec = ChainSpec(n_sites=12, subspace_size=lam)
    psi0 = w_state(12, lam)
    traj = run_projective(
        spec, psi0, ProtocolConfig(ProtocolKind.PROJECTIVE, m, d), SeededSampler(20 + lam)
    )
    const = pstar_weak(m, d, variance_h_pi(psi0, spec))
    series = edge_population(spec, psi0, t_max=m * mom.mean, dt=mom.mean / 20)
    averaged = pstar_time_averaged(m, d, series, spec.beta)
    print(
        f"{lam:4d}    {traj.log_survival:9.4f}    {const.log_pstar:11.4f}    "
        f"{averaged.log_pstar:13.4f}"
    )
    for j in range(m):
        rows.append((lam, j + 1, traj.times[j], traj.cumulative_survival[j]))

write_csv(out / "wstate_survival.csv", ("lambda", "m", "t_us", "P_sim"), rows)
print(f"\nwrote {out / 'wstate_survival.csv'}")
print("note: the constant-edge form is exact for lambda = 1, 2 (eigenstates);")
print("for larger subspaces the time-averaged form tracks the simulation.")
