"""Component relationship networks from IFC building models."""

from .export import export_csv, export_graphml, export_json, load_json
from .geometry import SpatialClass, SpatialRelation, spatial_relation
from .model import Component, extract_components
from .network import Edge, Network, Node, Tolerances, build_network, network_stats
from .relations import EdgeKind
from .step import EntityTable, parse_step

__all__ = [
    "Component", "Edge", "EdgeKind", "EntityTable", "Network", "Node", "SpatialClass", "SpatialRelation",
    "Tolerances", "build_network", "export_csv", "export_graphml", "export_json", "extract_components",
    "load_json", "network_stats", "parse_step", "spatial_relation",
]
