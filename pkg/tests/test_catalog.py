import csv
import io
import math

import pytest

from rrkernel import catalog as cat
from rrkernel.errors import UnknownIdentity
from rrkernel.report import IdentityReport

FAST = ["EQ3", "EQ21", "OMEGA2-ALG", "C-VALUE", "EX12", "EQ41"]


def test_ids_unique_and_sorted():
    ids = cat.catalog_ids()
    assert ids == sorted(set(ids))
    assert len(ids) == len(cat.CATALOG)
    for i, e in cat.CATALOG.items():
        assert e.id == i
        assert e.kind in ("identity", "probe")
        assert e.default_tol > 0 and e.equation_ref


def test_acceptance_ids_present():
    for i in ("EQ3", "EQ5", "EQ61", "EQ6", "EQ7", "EQ21", "EQ55", "OMEGA2-ALG", "OMEGA-COMP",
              "THM5", "COR2", "THM6", "COR3", "THM11", "SOLVER-SIN", "SOLVER-QUINTIC",
              "C-VALUE", "C-QUAD", "THM9", "EQ41", "JACOBI", "EQ70"):
        assert i in cat.CATALOG


def test_resolve_ids():
    assert cat.resolve_ids(["all"]) == cat.catalog_ids()
    assert cat.resolve_ids([]) == cat.catalog_ids()
    assert cat.resolve_ids(["EQ3", "C-VALUE", "EQ3"]) == ["C-VALUE", "EQ3"]
    with pytest.raises(UnknownIdentity):
        cat.resolve_ids(["NOPE"])
    with pytest.raises(UnknownIdentity):
        cat.get_entry("NOPE")


def test_run_is_deterministic():
    a = cat.run_catalog(FAST).to_dict()
    b = cat.run_catalog(list(reversed(FAST))).to_dict()
    assert a == b
    assert a["schema_version"] == cat.SCHEMA_VERSION
    assert [r["id"] for r in a["identities"]] == sorted(r["id"] for r in a["identities"])
    assert all("wall_s" not in r for r in a["identities"])


def test_summary_counts_match_reports():
    run = cat.run_catalog(FAST)
    s = run.summary
    ident = [r for r in run.reports if r.kind == "identity"]
    probes = [r for r in run.reports if r.kind == "probe"]
    assert s["total"] == len(run.reports) == len(ident) + len(probes)
    assert s["passed"] + s["failed"] == s["identities"] == len(ident)
    assert s["probes"] == len(probes)
    assert s["probes_matched"] == sum(r.passed for r in probes)
    assert not run.failed


def test_probes_do_not_fail_the_run():
    run = cat.run_catalog(["EX12"])
    assert all(not r.passed for r in run.reports)
    assert run.summary["failed"] == 0
    assert not run.failed


def test_tolerance_override_makes_failures():
    run = cat.run_catalog(["EQ3"], tol_override=1e-300)
    assert run.failed
    # one grid point is exact to the last bit and still passes
    assert run.summary["failed"] == sum(r.abs_resid > 0 for r in run.reports) >= 3


def test_timing_only_on_request():
    run = cat.run_catalog(["C-VALUE"], timing=True)
    d = run.to_dict()
    assert d["identities"][0]["wall_s"] >= 0
    assert "wall_s" in run.to_csv().splitlines()[0]


def test_csv_export():
    run = cat.run_catalog(["EQ21"])
    rows = list(csv.reader(io.StringIO(run.to_csv())))
    assert tuple(rows[0]) == cat.CSV_FIELDS
    assert len(rows) == 1 + 3
    assert all(r[0] == "EQ21" and r[8] == "true" for r in rows[1:])


def test_csv_empty():
    assert cat.reports_to_csv([]).strip() == ",".join(cat.CSV_FIELDS)


def test_errors_become_failure_reports():
    def boom(env, tol, **kw):
        raise ZeroDivisionError("bad")
    entry = cat.CatalogEntry("X", "test", ({"a": 1.0},), 1e-8, boom)
    (rep,) = cat.run_entry(entry, cat._Contexts())
    assert not rep.passed
    assert "ZeroDivisionError" in rep.notes
    assert math.isnan(rep.lhs)


def test_failure_report_serializes():
    d = IdentityReport.failure("X", {}, 1e-8, "why").to_dict()
    assert d["lhs"] == "nan" and d["abs_resid"] == "inf"


def test_report_pass_rule():
    rep = IdentityReport.build("X", {}, 1e6, 1e6 + 1.0, 1e-5)
    assert rep.abs_resid == 1.0 and rep.passed
    rep = IdentityReport.build("X", {}, 1e-12, 2e-12, 1e-13)
    assert not rep.passed
