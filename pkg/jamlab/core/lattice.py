import json
import logging
import math
from collections import defaultdict
from functools import lru_cache, partial
from itertools import product
from pathlib import Path
from typing import Any, Callable, Dict, List, Mapping, Optional, Tuple, Union

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    ValidationError,
    field_validator,
    model_validator,
)

from ._base import ModelInvalidError, UsageError
from ._types import Boundary, Offset, Site

logger = logging.getLogger(__name__)


def _normalize(offsets: Tuple[Offset, ...]) -> Tuple[Offset, ...]:
    return tuple(sorted(set(tuple(o) for o in offsets)))


class ConfigType(BaseModel):
    """
    A particle shape. The footprint is every site whose prior occupation
    blocks an arrival, the occupancy is what a successful arrival fills.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str
    footprint: Tuple[Offset, ...] = Field(min_length=1)
    occupancy: Tuple[Offset, ...] = Field(min_length=1)

    @model_validator(mode="before")
    @classmethod
    def _default_occupancy(cls, data: Any) -> Any:
        if isinstance(data, dict) and data.get("occupancy") is None:
            data = {**data, "occupancy": data.get("footprint")}
        return data

    @field_validator("footprint", "occupancy")
    @classmethod
    def _sorted_unique(cls, value: Tuple[Offset, ...]) -> Tuple[Offset, ...]:
        return _normalize(value)

    @model_validator(mode="after")
    def _check_offsets(self) -> "ConfigType":
        dims = {len(offset) for offset in self.footprint + self.occupancy}
        if len(dims) != 1:
            raise ValueError(f"type {self.name!r}: offsets mix dimensions {sorted(dims)}")

        (dimension,) = dims
        if dimension < 1:
            raise ValueError(f"type {self.name!r}: offsets must have at least one coordinate")
        if (0,) * dimension not in self.footprint:
            raise ValueError(f"type {self.name!r}: footprint must contain the origin anchor")
        if not set(self.occupancy) <= set(self.footprint):
            raise ValueError(f"type {self.name!r}: occupancy must be a subset of footprint")

        return self

    @property
    def dimension(self) -> int:
        return len(self.footprint[0])


class Region(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Boundary = "torus"
    shape: Optional[Tuple[int, ...]] = None
    sites: Optional[Tuple[Site, ...]] = None

    @model_validator(mode="after")
    def _check_extent(self) -> "Region":
        if (self.shape is None) == (self.sites is None):
            raise ValueError("region needs exactly one of 'shape' or 'sites'")

        if self.kind == "torus":
            if self.shape is None:
                raise ValueError("a torus region is given by its box 'shape'")
            if not self.shape or min(self.shape) < 1:
                raise ValueError("every torus box dimension must be at least 1")

        if self.shape is not None and (not self.shape or min(self.shape) < 0):
            raise ValueError("box dimensions must be nonnegative")

        if self.sites is not None:
            dims = {len(site) for site in self.sites}
            if len(dims) > 1:
                raise ValueError(f"sites mix dimensions {sorted(dims)}")
            if dims == {0}:
                raise ValueError("sites need at least one coordinate")

        return self

    @property
    def dimension(self) -> Optional[int]:
        if self.shape is not None:
            return len(self.shape)
        return len(self.sites[0]) if self.sites else None

    @property
    def size(self) -> int:
        if self.shape is not None:
            return math.prod(self.shape)
        return len(set(self.sites or ()))


class Model(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str = "custom"
    dimension: int = Field(ge=1)
    region: Region
    types: Tuple[ConfigType, ...] = Field(min_length=1)

    @model_validator(mode="after")
    def _check_dimensions(self) -> "Model":
        region_dimension = self.region.dimension
        if region_dimension is not None and region_dimension != self.dimension:
            raise ValueError(
                f"region has dimension {region_dimension}, model has {self.dimension}"
            )

        for config_type in self.types:
            if config_type.dimension != self.dimension:
                raise ValueError(
                    f"type {config_type.name!r} has dimension {config_type.dimension}, "
                    f"model has {self.dimension}"
                )

        return self

    @property
    def n(self) -> int:
        return self.region.size

    @property
    def k(self) -> int:
        return len(self.types)

    @property
    def multiplicity(self) -> int:
        """Common twin class size, 1 when the classes are uneven"""
        sizes = {len(c) for c in twin_classes(self)}
        return sizes.pop() if len(sizes) == 1 else 1


class ConfigInstance(BaseModel):
    model_config = ConfigDict(frozen=True)

    type_index: int
    anchor: int
    footprint: Tuple[int, ...]
    occupancy: Tuple[int, ...]


class SiteIndex:
    """Lexicographic bijection between region coordinates and 0..n-1"""

    def __init__(self, region: Region) -> None:
        self.region = region
        self._lookup: Dict[Site, int] = {}

        if region.shape is not None:
            self.coords: List[Site] = list(product(*(range(s) for s in region.shape)))
        else:
            self.coords = sorted(set(region.sites or ()))
            self._lookup = {coord: i for i, coord in enumerate(self.coords)}

    def __len__(self) -> int:
        return len(self.coords)

    def locate(self, coord: Site) -> Optional[int]:
        shape = self.region.shape
        if shape is None:
            return self._lookup.get(coord)

        if self.region.kind == "torus":
            coord = tuple(c % s for c, s in zip(coord, shape))
        elif any(c < 0 or c >= s for c, s in zip(coord, shape)):
            return None

        index = 0
        for c, s in zip(coord, shape):
            index = index * s + c
        return index


@lru_cache(maxsize=32)
def site_index(region: Region) -> SiteIndex:
    return SiteIndex(region)


def _translate(anchor: Site, offsets: Tuple[Offset, ...], sites: SiteIndex) -> Optional[Tuple[int, ...]]:
    resolved = set()
    for offset in offsets:
        index = sites.locate(tuple(a + o for a, o in zip(anchor, offset)))
        if index is None:
            return None
        resolved.add(index)

    return tuple(sorted(resolved))


@lru_cache(maxsize=32)
def enumerate_configs(model: Model) -> Tuple[ConfigInstance, ...]:
    """
    Every config of the model, type-major then anchor site index. On a torus
    this is one instance per (type, site); a free region keeps only the
    instances whose footprint lies inside it.
    """

    sites = site_index(model.region)
    instances: List[ConfigInstance] = []
    for type_index, config_type in enumerate(model.types):
        for anchor, coord in enumerate(sites.coords):
            footprint = _translate(coord, config_type.footprint, sites)
            if footprint is None:
                continue

            occupancy = _translate(coord, config_type.occupancy, sites)
            assert occupancy is not None
            instances.append(
                ConfigInstance(
                    type_index=type_index,
                    anchor=anchor,
                    footprint=footprint,
                    occupancy=occupancy,
                )
            )

    logger.debug("model %s: %d config instances", model.name, len(instances))
    return tuple(instances)


def blocks(b: ConfigInstance, c: ConfigInstance) -> bool:
    """Whether a prior successful arrival of b forbids c"""
    return not set(b.occupancy).isdisjoint(c.footprint)


def twin_classes(model: Model) -> List[Tuple[int, ...]]:
    """Groups of type indices sharing one footprint, in first-seen order"""
    groups: Dict[Tuple[Offset, ...], List[int]] = {}
    for index, config_type in enumerate(model.types):
        groups.setdefault(config_type.footprint, []).append(index)

    return [tuple(group) for group in groups.values()]


class ConflictGraph:
    """
    Blocking structure of a model. blocks[i] lists the instances a success of
    i forbids, blocked_by[i] the instances whose success forbids i. Self
    edges are left out. twins[i] are the instances at i's anchor whose type
    shares i's footprint.
    """

    def __init__(
        self,
        model: Model,
        instances: Tuple[ConfigInstance, ...],
        blocks: List[Tuple[int, ...]],
        blocked_by: List[Tuple[int, ...]],
        twins: List[Tuple[int, ...]],
    ) -> None:
        self.model = model
        self.instances = instances
        self.blocks = blocks
        self.blocked_by = blocked_by
        self.twins = twins

    def __len__(self) -> int:
        return len(self.instances)

    def edge_count(self) -> int:
        return sum(len(targets) for targets in self.blocks)


@lru_cache(maxsize=32)
def conflict_graph(model: Model) -> ConflictGraph:
    instances = enumerate_configs(model)

    covering: Dict[int, List[int]] = defaultdict(list)
    for index, instance in enumerate(instances):
        for site in instance.footprint:
            covering[site].append(index)

    blocks_: List[Tuple[int, ...]] = []
    blocked_by: List[List[int]] = [[] for _ in instances]
    for index, instance in enumerate(instances):
        targets = sorted(
            {c for site in instance.occupancy for c in covering[site] if c != index}
        )
        blocks_.append(tuple(targets))
        for target in targets:
            blocked_by[target].append(index)

    twin_of = {t: group for group in twin_classes(model) for t in group}
    by_anchor: Dict[Tuple[int, int], int] = {
        (instance.type_index, instance.anchor): index
        for index, instance in enumerate(instances)
    }
    twins: List[Tuple[int, ...]] = []
    for index, instance in enumerate(instances):
        found = (
            by_anchor.get((t, instance.anchor))
            for t in twin_of[instance.type_index]
            if t != instance.type_index
        )
        twins.append(tuple(sorted(i for i in found if i is not None)))

    logger.debug("model %s: conflict graph with %d edges", model.name, sum(map(len, blocks_)))
    return ConflictGraph(
        model=model,
        instances=instances,
        blocks=blocks_,
        blocked_by=[tuple(sources) for sources in blocked_by],
        twins=twins,
    )


def _errors_to_text(error: ValidationError) -> str:
    return "; ".join(
        f"{'.'.join(str(part) for part in e['loc']) or 'model'}: {e['msg']}"
        for e in error.errors()
    )


def load_model(source: Union[str, Path, Mapping[str, Any]]) -> Model:
    """
    Builds a Model from a JSON model file or an already parsed mapping.
    Unknown keys are rejected so that typos never pass silently.
    """

    if isinstance(source, Mapping):
        document: Any = dict(source)
    else:
        path = Path(source)
        try:
            document = json.loads(path.read_text())
        except OSError as e:
            raise ModelInvalidError(f"cannot read model file {path}: {e}") from e
        except json.JSONDecodeError as e:
            raise ModelInvalidError(f"model file {path} is not valid JSON: {e}") from e

    try:
        return Model.model_validate(document)
    except ValidationError as e:
        raise ModelInvalidError(_errors_to_text(e)) from e


def _origin(dimension: int) -> Offset:
    return (0,) * dimension


def _axis_neighbours(dimension: int) -> Tuple[Offset, ...]:
    steps: List[Offset] = [_origin(dimension)]
    for axis in range(dimension):
        for sign in (-1, 1):
            step = [0] * dimension
            step[axis] = sign
            steps.append(tuple(step))
    return tuple(steps)


HOLE_LEFT = ConfigType(name="hole-left", footprint=((0,), (1,)), occupancy=((0,),))
HOLE_RIGHT = ConfigType(name="hole-right", footprint=((0,), (1,)), occupancy=((1,),))

BUILTIN_TYPES: Dict[str, Tuple[ConfigType, ...]] = {
    "dimer-1d": (ConfigType(name="dimer", footprint=((0,), (1,))),),
    "monomer-1d": (ConfigType(name="monomer", footprint=((0,),)),),
    "monomer-excl-1d": (
        ConfigType(name="monomer", footprint=_axis_neighbours(1), occupancy=((0,),)),
    ),
    "monomer-excl-2d": (
        ConfigType(name="monomer", footprint=_axis_neighbours(2), occupancy=((0, 0),)),
    ),
    "anni-pair": (HOLE_LEFT, HOLE_RIGHT),
    "mixed-2d": (
        ConfigType(name="corner", footprint=((0, 0), (0, 1), (1, 1))),
        ConfigType(name="gapped", footprint=((0, 0), (2, 0))),
    ),
}


def builtin_model(name: str, shape: Tuple[int, ...], boundary: Boundary = "torus") -> Model:
    try:
        types = BUILTIN_TYPES[name]
    except KeyError:
        raise UsageError(
            f"unknown builtin model {name!r}, choose from {', '.join(BUILTIN_TYPES)}"
        ) from None

    dimension = types[0].dimension
    if len(shape) != dimension:
        raise UsageError(f"builtin {name!r} is {dimension}-dimensional, got shape {shape}")

    try:
        return Model(
            name=name,
            dimension=dimension,
            region=Region(kind=boundary, shape=tuple(shape)),
            types=types,
        )
    except ValidationError as e:
        raise ModelInvalidError(_errors_to_text(e)) from e


def shape_for_size(name: str, n: int) -> Tuple[int, ...]:
    """Square box for 2-D builtins, a line of n sites otherwise"""
    dimension = BUILTIN_TYPES[name][0].dimension if name in BUILTIN_TYPES else 1
    if dimension == 1:
        return (n,)

    side = round(n ** (1.0 / dimension))
    if side**dimension != n:
        raise UsageError(f"size {n} is not a perfect {dimension}-th power for builtin {name!r}")
    return (side,) * dimension


def _family_member(name: str, boundary: Boundary, n: int) -> Model:
    return builtin_model(name, shape_for_size(name, n), boundary)


def model_family(name: str, boundary: Boundary = "torus") -> Callable[[int], Model]:
    if name not in BUILTIN_TYPES:
        raise UsageError(f"unknown builtin model {name!r}")
    return partial(_family_member, name, boundary)


def with_boundary(model: Model, boundary: Boundary) -> Model:
    """The same box under another boundary mode"""
    if model.region.shape is None:
        raise UsageError(f"model {model.name!r} has an explicit site set, it cannot be rewrapped")

    region = Region(kind=boundary, shape=model.region.shape)
    return model.model_copy(update={"region": region})
