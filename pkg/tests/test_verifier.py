import ast
import copy
import json
from collections import Counter
from pathlib import Path

import pytest

import cachebound.verifier as verifier
from cachebound.certificates import table2_certificate
from cachebound.verifier import check_table_row, row_kinds, verify_document

from support import mutation_outcomes, tight_documents


def test_imports_only_grammar():
    tree = ast.parse(Path(verifier.__file__).read_text())
    local = set()
    for node in ast.walk(tree):
        if isinstance(node, ast.ImportFrom) and node.level:
            if node.module:
                local.add(node.module)
            else:
                local.update(a.name for a in node.names)
    assert local <= {"grammar", "errors"}


def test_table2_accepted():
    assert verify_document(table2_certificate().to_document())


def test_table2_row_ingredients():
    kinds = row_kinds(table2_certificate().to_document())
    assert kinds[3][1] == ("s",)      # H(Z2) + H(X210) >= H(Z0,X210) needs the cache swap
    assert "a" in kinds[0][1] and "s" in kinds[0][1]
    assert all(rel == ">=" for rel, _ in kinds)


def test_each_table_row_is_needed_as_stated():
    doc = table2_certificate().to_document()
    # r3 is H(W2,X210) + H(W2,Z0) - H(W2,Z1,X210) >= F; false without the extra file
    assert check_table_row(doc, {"F": -1, "H(W2,X210)": 1, "H(W2,Z0)": 1, "H(W2,Z1,X210)": -1})
    assert not check_table_row(doc, {"F": -2, "H(W2,X210)": 1, "H(W2,Z0)": 1, "H(W2,Z1,X210)": -1})


def test_symmetry_is_required():
    doc = table2_certificate().to_document()
    doc["symmetry"] = "none"
    v = verify_document(doc)
    assert not v and v.row is not None


def test_reject_reports_row_and_residual():
    doc = json.loads(tight_documents()[1])
    doc["rows"][3]["terms"] = dict(doc["rows"][3]["terms"])
    key = sorted(doc["rows"][3]["terms"])[0]
    doc["rows"][3]["terms"][key] = "7"
    v = verify_document(doc)
    assert not v and v.row == 3 and v.residual
    assert "row 4" in v.describe()


@pytest.mark.parametrize("patch", [
    {"version": 3},
    {"level": "summary"},
    {"symmetry": {"action": "twist"}},
    {"target": {"m": "1", "r": "1"}},
    {"model": {"n_files": 3, "n_users": 3, "demands": ["201", "201"]}},
    {"symmetry": {"action": "user-permutation", "mode": "orbit", "group": ["120"]}},
])
def test_malformed_rejected(patch):
    doc = table2_certificate().to_document()
    doc.update(patch)
    assert not verify_document(doc)


def test_unknown_term_rejected():
    doc = table2_certificate().to_document()
    doc["rows"][0]["terms"]["H(Z0,X999)"] = "1"
    assert not verify_document(doc)
    doc = table2_certificate().to_document()
    doc["rows"][0]["terms"]["H(X210,Z0)"] = doc["rows"][0]["terms"].pop("H(Z0,X210)")
    assert "canonical" in verify_document(doc).reason


def test_negative_multiplier_rejected():
    doc = json.loads(tight_documents()[1])
    doc["rows"][0]["multiplier"] = "-1"
    assert not verify_document(doc)


def test_thousand_single_mutations_rejected():
    outcomes = mutation_outcomes()
    assert len(outcomes) >= 1000
    accepted = [o for o in outcomes if o[2]]
    assert not accepted, Counter((lvl, kind) for lvl, kind, _ in accepted)
    kinds = Counter(kind for _, kind, _ in outcomes)
    assert len(kinds) >= 6


def test_verdicts_deterministic():
    doc = json.loads(tight_documents()[2])
    bad = copy.deepcopy(doc)
    bad["target"]["c"] = "100"
    assert [verify_document(doc).describe() for _ in range(2)] == ["Accept"] * 2
    assert verify_document(bad).describe() == verify_document(bad).describe()
