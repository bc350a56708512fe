import itertools
import random

import pytest
from hypothesis import given

from graphs import graphs, random_generalized_graph
from rdfhorn.errors import ParseError
from rdfhorn.ntriples import format_term, load_graph, parse_ntriples, serialize
from rdfhorn.terms import RDF, XSD, BNode, Graph, PlainLiteral, Triple, TypedLiteral, URI


def isomorphic(g: Graph, h: Graph) -> bool:
    """Brute force over all bijections between the blank nodes."""
    bg, bh = g.blank_nodes(), h.blank_nodes()
    if len(g) != len(h) or len(bg) != len(bh):
        return False
    target = set(h.triples)
    for perm in itertools.permutations(bh):
        m = dict(zip(bg, perm))
        if {Triple(*(m.get(x, x) for x in t)) for t in g.triples} == target:
            return True
    return False


def test_single_ground_line():
    g = parse_ntriples("<urn:o> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <urn:A> .\n")
    assert list(g) == [Triple(URI("urn:o"), RDF.type, URI("urn:A"))] and g.is_ground


def test_blank_self_loop():
    (t,) = parse_ntriples("_:x <urn:R> _:x .")
    assert t == Triple(BNode("x"), URI("urn:R"), BNode("x"))


def test_generalized_literal_subject():
    (t,) = parse_ntriples('"lit" <urn:p> <urn:o> .')
    assert t.subject == PlainLiteral("lit") and not t.is_normal


def test_literal_forms_and_escapes():
    text = ('<urn:s> <urn:p> "a\\"b\\n\\u00e9"@EN .\n'
            '<urn:s> <urn:p> "1"^^<http://www.w3.org/2001/XMLSchema#integer> .\n'
            '# comment line\n\n'
            '<urn:s> <urn:p> "x" .  # trailing comment\n')
    g = parse_ntriples(text)
    assert PlainLiteral('a"b\né', "en") in g.terms()
    assert TypedLiteral("1", XSD.integer) in g.terms()
    assert PlainLiteral("x") in g.terms()


def test_prefix_sugar():
    g = parse_ntriples("@prefix ex: <http://example.org/> .\nex:o a ex:A .\nex:o rdf:type xsd:string .")
    assert Triple(URI("http://example.org/o"), RDF.type, URI("http://example.org/A")) in g
    assert Triple(URI("http://example.org/o"), RDF.type, XSD.string) in g


def test_duplicates_collapse():
    assert len(parse_ntriples("<urn:a> <urn:b> <urn:c> .\n<urn:a> <urn:b> <urn:c> .")) == 1


@pytest.mark.parametrize("text, line, col", [
    ("<urn:a> <urn:b> <urn:c>", 1, 24),
    ("<urn:a> <urn:b> <urn:c> .\n<urn:a <urn:b> <urn:c> .", 2, 1),  # points at the start of the bad IRI
    ('<urn:a> <urn:b> "open .', 1, 17),
    ("<urn:a> <urn:b> .", 1, 17),
    ("<urn:a> <urn:b> <urn:c> .\n\n  _: <urn:b> <urn:c> .", 3, 3),
    ("<urn:a> <urn:b> nope:c .", 1, 17),
])
def test_parse_errors_carry_position(text, line, col):
    with pytest.raises(ParseError) as e:
        parse_ntriples(text)
    assert e.value.code == "E_PARSE"
    assert (e.value.line, e.value.column) == (line, col)


def test_serialize_examples():
    assert serialize(Graph()) == ""
    assert serialize(Graph([(URI("urn:a"), URI("urn:b"), URI("urn:c"))])) == "<urn:a> <urn:b> <urn:c> .\n"
    g = Graph([(BNode("zz"), URI("urn:p"), BNode("aa")), (BNode("aa"), URI("urn:q"), URI("urn:o"))])
    assert serialize(g) == "_:b0 <urn:p> _:b1 .\n_:b1 <urn:q> <urn:o> .\n"


def test_serialize_is_stable_under_blank_renaming():
    g = Graph([(BNode("x"), URI("urn:p"), URI("urn:o")), (BNode("y"), URI("urn:q"), URI("urn:o"))])
    h = Graph([(BNode("m"), URI("urn:p"), URI("urn:o")), (BNode("a"), URI("urn:q"), URI("urn:o"))])
    assert serialize(g) == serialize(h)


def test_format_term():
    assert format_term(TypedLiteral("<a/>", RDF.XMLLiteral)) == \
        '"<a/>"^^<http://www.w3.org/1999/02/22-rdf-syntax-ns#XMLLiteral>'
    assert format_term(PlainLiteral("tab\there")) == '"tab\\there"'


@given(graphs)
def test_round_trip_property(g):
    assert isomorphic(parse_ntriples(serialize(g)), g)


def test_round_trip_1000_random_graphs():
    rng = random.Random(1000)
    for _ in range(1000):
        g = random_generalized_graph(rng, 10)
        out = serialize(g)
        assert isomorphic(parse_ntriples(out), g)
        assert serialize(parse_ntriples(out)) == out


def test_load_graph(tmp_path):
    p = tmp_path / "g.nt"
    p.write_text("<urn:a> <urn:b> \"é\" .\n", encoding="utf-8")
    assert PlainLiteral("é") in load_graph(p).terms()
