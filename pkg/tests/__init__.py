import math

SEED = 20080101
REPS = 4000
STDERRS = 4

E_MINUS_1 = math.exp(-1.0)
E_MINUS_2 = math.exp(-2.0)
H_10 = 2.9289682539682538

DIMER_FILE = {
    "name": "dimer-from-file",
    "dimension": 1,
    "region": {"kind": "free", "shape": [4]},
    "types": [{"name": "dimer", "footprint": [[0], [1]]}],
}

EXCLUSION_FILE = {
    "dimension": 2,
    "region": {"kind": "torus", "shape": [4, 4]},
    "types": [
        {
            "name": "monomer",
            "footprint": [[0, 0], [1, 0], [-1, 0], [0, 1], [0, -1]],
            "occupancy": [[0, 0]],
        }
    ],
}
