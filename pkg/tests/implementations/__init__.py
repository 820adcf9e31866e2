from .anni_pair import anni_pair_implementation
from .dimer import dimer_implementation
from .exclusion import exclusion_1d_implementation, exclusion_2d_implementation, mixed_implementation
from .monomer import monomer_implementation

implementations = [
    (dimer_implementation, "torus"),
    (dimer_implementation, "free"),
    (monomer_implementation, "torus"),
    (exclusion_1d_implementation, "torus"),
    (exclusion_1d_implementation, "free"),
    (exclusion_2d_implementation, "torus"),
    (anni_pair_implementation, "torus"),
    (anni_pair_implementation, "free"),
    (mixed_implementation, "torus"),
]

# models small enough for the exact oracle, N <= 8
oracle_implementations = [
    (dimer_implementation, 3, "free"),
    (dimer_implementation, 4, "free"),
    (dimer_implementation, 5, "free"),
    (dimer_implementation, 6, "torus"),
    (exclusion_1d_implementation, 5, "free"),
    (exclusion_1d_implementation, 8, "free"),
    (anni_pair_implementation, 4, "free"),
    (anni_pair_implementation, 4, "torus"),
    (monomer_implementation, 6, "torus"),
]
