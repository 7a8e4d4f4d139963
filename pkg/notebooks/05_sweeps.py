"""
Trend sweeps at desk scale
==========================

Small versions of the QoS-threshold and UE-count sweeps; the CLI runs the
full ones, e.g.

    uav-isac sweep --config configs/desk.yaml --param qos.gamma \
        --values=-5,0,5 --modes mobile,fixed,tethered --seeds 10 --out fig3.csv
"""

from uav_isac.config import build_config
from uav_isac.scenario import aggregate, run_sweep

cfg = build_config({"profile": "desk", "power": {"total": "40 dBm"}})

rows = run_sweep(cfg, "qos.gamma", [-5.0, 0.0, 5.0], ["fixed", "tethered"], seeds=[0, 1, 2]).rows
for a in aggregate(rows):
    print(f"Gamma {a['value']:>4} dB {a['mode']:>8}: median {a['median_gamma_t_access']:.2f} "
          f"({a['n_feasible']}/{a['n']} fully feasible)")

rows = run_sweep(cfg, "network.n_ue", [2, 4, 8], ["tethered"], seeds=[0, 1, 2]).rows
for a in aggregate(rows):
    print(f"N_ue {a['value']}: tethered median {a['median_gamma_t_access']:.2f}")
