from typing import Literal, Tuple, TypeVar

Offset = Tuple[int, ...]
Site = Tuple[int, ...]
Boundary = Literal["torus", "free"]
OutputFormat = Literal["csv", "json"]
ExpKey = Tuple[int, int]

R = TypeVar("R")
