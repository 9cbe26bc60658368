"""A small paired experiment sweep, summarized and ready for plotting.

Variants share every random stream, so their metric differences are
paired observations. The aggregate CSV feeds the figures tool:

    node figures/dist/cli.js --csv <out>/aggregate.csv \
        --metric composite_latency --x size --percentile mean --out latency.svg
"""

import tempfile

from spbp.experiment import config_from_dict, run_experiment, summarize

out_dir = tempfile.mkdtemp(prefix="spbp-sweep-")
cfg = config_from_dict({
    "sizes": [12, 16],
    "instances_per_size": 2,
    "realizations_per_instance": 2,
    "T": 400,
    "seed": 7,
    "output": out_dir,
    "traffic": {"mix": 0.5},
    "radio": {"antennas": "mimo"},
    "variants": [
        {"name": "Excl-SISO", "commodity_selection": "excl", "scheduler": "lgs",
         "antennas": "siso"},
        {"name": "MaxU-SISO", "commodity_selection": "maxu", "scheduler": "lgs",
         "antennas": "siso"},
        {"name": "MaxU-MIMO", "commodity_selection": "maxu", "scheduler": "lgs-mimo"},
    ],
})

paths = run_experiment(cfg, jobs=2)
for name, path in paths.items():
    print(f"{name}: {path}")

print()
print(summarize(out_dir))
