import io
import json
import re
import subprocess
import sys
from pathlib import Path

import pytest

from rdfhorn.cli import main
from rdfhorn.ntriples import parse_ntriples

FIX = Path(__file__).parent / "fixtures"
VERDICT = re.compile(r"^VERDICT: (ENTAILED|NOT-ENTAILED)( via-inconsistency)?$")


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main([str(a) for a in argv], out, err)
    return code, out.getvalue(), err.getvalue()


def test_intro_rdfs_entailed():
    code, out, _ = run("entail", "--regime", "rdfs", FIX / "intro_S.nt", FIX / "intro_E.nt")
    assert code == 0 and out.splitlines()[0] == "VERDICT: ENTAILED"


def test_intro_rdf_not_entailed():
    code, out, _ = run("entail", "--regime", "rdf", FIX / "intro_S.nt", FIX / "intro_E.nt")
    assert code == 1 and out.splitlines()[0] == "VERDICT: NOT-ENTAILED"


def test_parent_erdfs():
    assert run("entail", "--regime", "erdfs", FIX / "parent_S.nt", FIX / "parent_E.nt")[0] == 0
    assert run("entail", "--regime", "rdfs", FIX / "parent_S.nt", FIX / "parent_E.nt")[0] == 1


def test_clash_sat():
    code, out, _ = run("sat", "--regime", "rdfs", "--datatypes", "d", "--dtmap", FIX / "xsd.json",
                       FIX / "clash_S.nt")
    assert code == 1 and out.strip() == "UNSATISFIABLE"
    code, out, _ = run("sat", "--regime", "rdfs", "--datatypes", "dstar", FIX / "clash_S.nt")
    assert code == 0 and out.strip() == "SATISFIABLE"


def test_inconsistency_verdict_line(tmp_path):
    e = tmp_path / "e.nt"
    e.write_text("<urn:a> <urn:b> <urn:c> .\n")
    code, out, _ = run("entail", "--datatypes", "d", FIX / "clash_S.nt", e)
    assert code == 0 and out.splitlines()[0] == "VERDICT: ENTAILED via-inconsistency"


def test_verdict_grammar_witness_and_stats(tmp_path):
    e = tmp_path / "e.nt"
    e.write_text("_:w <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://example.org/B> .\n")
    code, out, _ = run("entail", "--stats", FIX / "intro_S.nt", e)
    lines = out.splitlines()
    assert code == 0 and VERDICT.match(lines[0])
    assert "WITNESS: _:w -> <http://example.org/o>" in lines
    stats = json.loads(next(l for l in lines if l.startswith("STATS: "))[7:])
    assert {"rounds", "facts", "derived", "rule_applications", "elapsed_ms"} <= set(stats)


def test_dump_theory():
    code, out, _ = run("entail", "--dump-theory", FIX / "intro_S.nt", FIX / "intro_E.nt")
    assert code == 0 and "data(" in out and "->" in out


@pytest.mark.parametrize("argv", [
    ["entail", "--regime", "owl", "a", "b"],
    ["entail", "only-one"],
    ["bogus"],
    [],
    ["sat", "/nonexistent/file.nt"],
])
def test_usage_errors_exit_2(argv):
    code, _, err = run(*argv)
    assert code == 2 and err


def test_parse_error_exit_2(tmp_path):
    bad = tmp_path / "bad.nt"
    bad.write_text("<urn:a> <urn:b> .\n")
    code, _, err = run("sat", bad)
    assert code == 2 and "E_PARSE" in err and "line 1" in err


def test_resource_limit_exit_2():
    code, _, err = run("sat", "--max-facts", "5", FIX / "intro_S.nt")
    assert code == 2 and "E_RESOURCE_LIMIT" in err


def test_global_flags_before_subcommand():
    code, _, err = run("--max-facts", "5", "sat", FIX / "intro_S.nt")
    assert code == 2


def test_normalize():
    code, out, _ = run("normalize", "--dtmap", FIX / "xsd.json", FIX / "literals.nt")
    g = parse_ntriples(out)
    assert code == 0 and len(g) == 2


def test_export_dllite():
    code, out, _ = run("export-dllite", FIX / "parent_S.nt")
    assert code == 0 and "SubClassOf(Exists(<http://example.org/parent>) <http://example.org/Person>)" in out
    code, _, err = run("export-dllite", FIX / "clash_S.nt")
    assert code == 2 and "E_NOT_GROUND" in err


def test_gen_path_system(tmp_path):
    code, out, _ = run("gen-reduction", "path-system", FIX / "path_system.json", "--out", tmp_path)
    assert code == 0 and "expected ENTAILED" in out
    expected = json.loads((tmp_path / "expected.json").read_text())
    S = tmp_path / "S.nt"
    for name, verdict in expected["queries"].items():
        assert run("entail", S, tmp_path / name)[1].splitlines()[0] == f"VERDICT: {verdict}"
    assert run("entail", S, tmp_path / "E_any.nt")[0] == 0


def test_gen_k_coloring(tmp_path):
    code, out, _ = run("gen-reduction", "k-coloring", FIX / "triangle.json", "--out", tmp_path)
    assert code == 0 and "colorable=True" in out
    assert json.loads((tmp_path / "expected.json").read_text())["expected"] == "NOT-ENTAILED"
    code, _, err = run("entail", "--regime", "simple", "--datatypes", "d", "--dtmap", tmp_path / "dtmap.json",
                       tmp_path / "S.nt", tmp_path / "H.nt")
    assert code == 2 and "E_NOT_DEFINITE" in err


def test_gen_random_with_seed(tmp_path):
    spec = tmp_path / "r.json"
    spec.write_text(json.dumps({"random": {"nodes": 7, "tuples": 9}}))
    a = run("gen-reduction", "path-system", spec, "--seed", "5")[1]
    b = run("gen-reduction", "path-system", spec, "--seed", "5")[1]
    assert a == b


def test_console_script_entry_point():
    r = subprocess.run([sys.executable, "-m", "rdfhorn.cli", "entail", "--regime", "rdf",
                        str(FIX / "intro_S.nt"), str(FIX / "intro_E.nt")], capture_output=True, text=True)
    assert r.returncode == 1 and r.stdout.startswith("VERDICT: NOT-ENTAILED")
