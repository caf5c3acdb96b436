"""Double-pushout graph rewriting with enumeration of non-isomorphic derivations."""

__version__ = "0.1.0"

from .graph import (GraphError, LabeledGraph, ParseError, UnionGraph, connected_components,
                    disjoint_union, parse_graph, read_graph, render_graph)
from .canon import canonical_code, canonical_form, canonical_graph, encode_derivation, is_isomorphic
from .perm import PermGroup, build_group, min_image, pointwise_stabilizer
from .rule import IllFormedRule, Rule, apply, invert_rule, parse_rule, read_rule, render_rule
from .match import build_database, enumerate_monomorphisms
from .ede import Derivation, EnumerationMode, Enumerator, enumerate_derivations
from .oracle import OracleBudget, brute_force_derivations
from .network import ExpansionPolicy, ReactionNetwork, expand, export_dot, export_json, import_json

__all__ = [
    "GraphError", "LabeledGraph", "ParseError", "UnionGraph", "connected_components", "disjoint_union",
    "parse_graph", "read_graph", "render_graph",
    "canonical_code", "canonical_form", "canonical_graph", "encode_derivation", "is_isomorphic",
    "PermGroup", "build_group", "min_image", "pointwise_stabilizer",
    "IllFormedRule", "Rule", "apply", "invert_rule", "parse_rule", "read_rule", "render_rule",
    "build_database", "enumerate_monomorphisms",
    "Derivation", "EnumerationMode", "Enumerator", "enumerate_derivations",
    "OracleBudget", "brute_force_derivations",
    "ExpansionPolicy", "ReactionNetwork", "expand", "export_dot", "export_json", "import_json",
]
