from fractions import Fraction
from typing import List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

SEED_BITS = 64


class RngSpec(BaseModel):
    """
    Names one replication's random stream. The stream is a pure function of
    (seed, replication): numpy's SeedSequence hashes the pair into PCG64 state.
    """

    model_config = ConfigDict(frozen=True)

    seed: int = Field(ge=0, lt=2**SEED_BITS)
    replication: int = Field(default=0, ge=0)

    def generator(self) -> np.random.Generator:
        sequence = np.random.SeedSequence(self.seed, spawn_key=(self.replication,))
        return np.random.Generator(np.random.PCG64(sequence))


def exponential_variates(generator: np.random.Generator, size: int) -> np.ndarray:
    """
    Unit-rate exponentials by inverse transform. random() is in [0, 1) so
    1 - U never reaches zero and the logarithm stays finite.
    """

    uniforms = generator.random(size)
    return -np.log1p(-uniforms)


def chunk_ranges(total: int, chunk_size: int) -> List[Tuple[int, int]]:
    step = max(1, chunk_size)
    return [(start, min(start + step, total)) for start in range(0, total, step)]


def fraction_str(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)

    return f"{value.numerator}/{value.denominator}"
