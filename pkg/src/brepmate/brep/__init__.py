from .model import (
    Assembly,
    Entity,
    FUNCTION_KINDS,
    GeometricSummary,
    Instance,
    KIND_INDEX,
    MATE_TYPES,
    MATE_TYPE_INDEX,
    Mate,
    McfRef,
    ParametricFunction,
    Part,
    TriangleMesh,
)
from .io import (
    assembly_from_dict,
    assembly_to_dict,
    load_assembly,
    load_part,
    mate_from_dict,
    mate_to_dict,
    part_from_dict,
    part_to_dict,
    save_assembly,
    save_part,
)
from .tessellate import tessellate

__all__ = [
    "Assembly", "Entity", "FUNCTION_KINDS", "GeometricSummary", "Instance",
    "KIND_INDEX", "MATE_TYPES", "MATE_TYPE_INDEX", "Mate", "McfRef",
    "ParametricFunction", "Part", "TriangleMesh",
    "assembly_from_dict", "assembly_to_dict", "load_assembly", "load_part",
    "mate_from_dict", "mate_to_dict", "part_from_dict", "part_to_dict",
    "save_assembly", "save_part", "tessellate",
]
