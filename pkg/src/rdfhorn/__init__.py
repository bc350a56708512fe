"""Deciding RDF entailment and satisfiability through Horn frame logic."""

from .datatypes import DatatypeMap, is_definite, load_datatype_map, normalize, xsd_map
from .dllite import DlChecker, DlKnowledgeBase, export_dllite, parse_dll
from .embedding import psi, psi_erdfs_v, standard_use, tr, tr_erdfs
from .engine import Engine, FactStore, Limits, materialize, query
from .entailment import EntailmentResult, Prepared, Verdict, decide, prepare, satisfiable, theory_for
from .errors import RdfHornError
from .ntriples import load_graph, parse_ntriples, serialize
from .terms import RDF, RDFS, XSD, BNode, DatatypeMode, Graph, PlainLiteral, Regime, Triple, TypedLiteral, URI

__version__ = "0.1.0"

__all__ = [
    "URI", "BNode", "PlainLiteral", "TypedLiteral", "Triple", "Graph", "Regime", "DatatypeMode",
    "RDF", "RDFS", "XSD",
    "DatatypeMap", "xsd_map", "load_datatype_map", "is_definite", "normalize",
    "tr", "psi", "tr_erdfs", "psi_erdfs_v", "standard_use",
    "Engine", "FactStore", "Limits", "materialize", "query",
    "decide", "satisfiable", "prepare", "Prepared", "EntailmentResult", "Verdict", "theory_for",
    "export_dllite", "parse_dll", "DlKnowledgeBase", "DlChecker",
    "parse_ntriples", "load_graph", "serialize", "RdfHornError",
]
