# backend/tests/test_reproduce_service.py
# Tests for the side-by-side reproduction reports

import pytest

from app.services.reproduce_service import ReproductionReport, figure1, reproduce, table2, table5
from app.utils.constants import TABLE2_CORRECTED, TABLE5_ROWS, TableId


def test_report_comparison_rules():
    """Test two-sided, one-sided and informational rows."""
    report = ReproductionReport(TableId.TABLE4)
    report.compare("exact", 1.0, 1.00005, 1e-4)
    report.compare("improved", -2.0, -2.1, 5e-4, one_sided=True)
    report.compare("informational", 0.27, 0.5, None)
    assert report.passed
    assert report.rows[2]["passed"] is None

    report.compare("missing", 1.0, None, 1e-4)
    assert not report.passed


def test_one_sided_rows_reject_worse_values():
    """Test that a one-sided row fails above its slack and an informational miss does not."""
    report = ReproductionReport(TableId.TABLE5)
    report.compare("above", -13.397977, -13.39, 0.005, one_sided=True)
    assert not report.passed
    informational = ReproductionReport(TableId.TABLE5)
    informational.compare("far", 0.72, 0.74, None)
    assert informational.passed


@pytest.mark.slow
def test_table1_reproduces():
    """Test the energies and moments table with the Ansatz boldface gate."""
    report = reproduce(TableId.TABLE1)
    assert report.passed
    assert any("Ansatz K=1" in row["quantity"] for row in report.rows)


@pytest.mark.slow
def test_table2_reproduces():
    """Test the critical depths with the corrected (3, 4, 3) entry."""
    report = table2(include_swave=False)
    assert report.passed
    corrected = [row for row in report.rows if "(corrected)" in row["quantity"]]
    assert len(corrected) == len(TABLE2_CORRECTED)
    printed = [row for row in report.rows if "(printed)" in row["quantity"]]
    assert all(row["passed"] is None for row in printed)


@pytest.mark.slow
def test_table3_reproduces():
    """Test the threshold coefficients and Hellmann-Feynman slopes."""
    assert reproduce(TableId.TABLE3).passed


@pytest.mark.slow
def test_table4_reproduces():
    """Test the deuteron table."""
    assert reproduce(TableId.TABLE4, restarts=4).passed


@pytest.mark.slow
def test_table5_reproduces():
    """Test the quantum-dot table with stable quadrature on every row."""
    report = table5()
    assert report.passed
    flagged = [row for row in report.rows if row["quantity"].endswith("quadrature flagged")]
    assert len(flagged) == len(TABLE5_ROWS)


@pytest.mark.slow
def test_figure1_curves_share_an_asymptote():
    """Test monotone v0_c(h) curves converging on one asymptote."""
    report = figure1()
    assert report.passed
    assert {row["mesh_size"] for row in report.rows} == {500, 700, 1000}
    assert all(row["beta0"] == pytest.approx(1.342002, abs=1e-3) for row in report.rows)
