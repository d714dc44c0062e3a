import pytest
from mpmath import mp

from qident.catalog import (
    Catalog,
    ModulusLess,
    NotInQPowerLattice,
    catalog_path,
    default_catalog,
    load,
    parse_identity,
)
from qident.errors import DSLSyntaxError, DuplicateIdError, NotFoundError, UndeclaredSymbolError
from qident.expr import Evaluator, free_symbols
from qident.qcore import TruncationControl
from qident.verifier import SampleConfig, sample_point

CATALOG = default_catalog()

REQUIRED = (
    [f"U{k}" for k in range(1, 15)]
    + [f"B{k}" for k in range(1, 21)]
    + [f"L{k}" for k in range(1, 10)]
    + [f"I{k}" for k in range(1, 14)]
    + ["C1"]
)
# U8 is a single equality; its chain siblings carry several forms
MULTI_FORM = ["U9", "U10", "U11", "U12", "L1", "L4", "L6", "L7", "L8", "I9"]

ENTRY = """\
id: T1
paper: (test)
symbols: a, b, z[0.3,0.9]
constraint: |b/a| < |z| < 1
lhs: psi(a; b; q; z)
rhs: qpoch_inf(q, b/a, a*z, q/(a*z); q) / qpoch_inf(b, q/a, z, b/(a*z); q)
"""


def write(tmp_path, name, text):
    (tmp_path / name).write_text(text, encoding="utf-8")


def test_empty_directory(tmp_path):
    assert load(tmp_path) == []
    assert len(Catalog.from_path(tmp_path)) == 0


def test_shipped_catalog_covers_required_entries():
    ids = set(CATALOG.list_ids())
    assert len(ids) >= 45
    assert not set(REQUIRED) - ids


def test_catalog_path_env_override(tmp_path, monkeypatch):
    monkeypatch.setenv("QIDENT_CATALOG", str(tmp_path))
    assert catalog_path() == tmp_path


def test_undeclared_symbol(tmp_path):
    write(tmp_path, "t.qid", ENTRY.replace("rhs: qpoch_inf(q,", "rhs: w * qpoch_inf(q,"))
    with pytest.raises(UndeclaredSymbolError):
        load(tmp_path)


def test_constraint_with_undeclared_symbol():
    with pytest.raises(UndeclaredSymbolError):
        parse_identity(ENTRY.replace("|b/a| < |z|", "|c/a| < |z|"))


def test_duplicate_ids_rejected(tmp_path):
    write(tmp_path, "a.qid", ENTRY)
    write(tmp_path, "b.qid", ENTRY)
    with pytest.raises(DuplicateIdError):
        load(tmp_path)


def test_duplicate_alias_rejected(tmp_path):
    write(tmp_path, "a.qid", ENTRY.replace("paper:", "aliases: x1\npaper:"))
    write(tmp_path, "b.qid", ENTRY.replace("id: T1", "id: T2").replace("paper:", "aliases: x1\npaper:"))
    with pytest.raises(DuplicateIdError):
        load(tmp_path)


def test_bad_expression_reports_syntax_error():
    with pytest.raises(DSLSyntaxError):
        parse_identity(ENTRY.replace("lhs: psi(a; b; q; z)", "lhs: psi(a; b; q; z"))


def test_missing_rhs_rejected():
    text = "\n".join(line for line in ENTRY.splitlines() if not line.startswith("rhs"))
    with pytest.raises(DSLSyntaxError):
        parse_identity(text)


def test_get_b1():
    b1 = CATALOG.get("B1")
    assert b1.paper_label == "(Rama1psi1)"
    assert {s.name for s in b1.symbols} == {"a", "b", "z"}
    chain = [c for c in b1.constraints if isinstance(c, ModulusLess)]
    assert len(chain) == 2


def test_get_zz_uncorrected_alias():
    ident = CATALOG.get("ZZ-uncorrected")
    assert ident.id == "B10" and ident.negative_variant is not None
    assert ident.negative_variant != ident.rhs_forms[0]


def test_get_missing():
    with pytest.raises(NotFoundError):
        CATALOG.get("nope")


@pytest.mark.parametrize("ident", list(CATALOG), ids=CATALOG.list_ids())
def test_entry_invariants(ident):
    declared = {s.name for s in ident.symbols} | {name for name, _ in ident.lets} | {"q"}
    assert ident.rhs_forms
    for _, e in ident.sides():
        assert free_symbols(e) <= declared | {"i", "omega"}
    for c in ident.constraints:
        assert c.symbols() <= declared


@pytest.mark.parametrize("ident", list(CATALOG), ids=CATALOG.list_ids())
def test_entry_constraints_satisfiable(ident):
    env = sample_point(ident, SampleConfig(seed=1), 0)
    ctl = TruncationControl.for_digits(20)
    with mp.workdps(30):
        ev = Evaluator(ident.bind(env.raw(), ctl), ctl)
        assert all(c.holds(ev) for c in ident.all_constraints)


def test_denominators_get_lattice_guards():
    guards = [c for c in CATALOG.get("B1").auto_constraints if isinstance(c, NotInQPowerLattice)]
    assert guards


@pytest.mark.parametrize("ident_id", MULTI_FORM)
def test_multi_form_entries(ident_id):
    assert len(CATALOG.get(ident_id).rhs_forms) >= 2


def test_l1_has_four_forms():
    assert len(CATALOG.get("L1").rhs_forms) == 4
