"""
Geometry and channels of one desk-scale drop
============================================

Builds the layout for seed 0, draws every channel and prints the quantities
that drive the rest of the pipeline: LoS probabilities, Rician factors, path
losses and the rank structure of the mmWave backhaul.
"""

import numpy as np

from uav_isac.channels import realize_channels
from uav_isac.config import build_config

cfg = build_config({"profile": "desk"})
layout = cfg.layout(0)
print("transmit UAVs (m):\n", layout.uavs)
print("UEs (m):\n", layout.ues.round(1))

ch = realize_channels(layout, cfg.propagation, cfg.arrays, seed=0)

# access links: rows are UEs, columns transmit UAVs
print("LoS probability:\n", ch.los_prob.round(3))
print("Rician factor (dB):\n", (10 * np.log10(ch.rician_k)).round(1))
print("path loss (dB):\n", (10 * np.log10(ch.access_pathloss)).round(1))

# the backhaul matrices are sums of a few rank-one paths
for k, link in enumerate(ch.backhaul):
    s = np.linalg.svd(link.matrix, compute_uv=False)
    print(f"backhaul {k}: top singular values {np.array2string(s[:3], precision=2)}")

# bistatic sensing: the weaker the path gain, the harder the UAV has to beam at the target
print("sensing path gains:", ch.sensing.path_gain)
