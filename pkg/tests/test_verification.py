import pytest

from ncl import PreconditionViolation
from utils import MulffsError
from verification import VerificationReport, descriptor_for, oracle_check, verify_ncl


def test_verify_ncl_passes():
    report = verify_ncl(7)
    assert report.passed
    names = {c.name for c in report.checks}
    assert "schroder.ncl_count[n=7]" in names
    assert "ncl1.bijection[n=7]" in names
    assert "s_encoding.round_trip[n=6]" in names


def test_verify_ncl_rejects_large_sizes():
    with pytest.raises(PreconditionViolation):
        verify_ncl(13)


def broken_check():
    raise MulffsError("boom")


def test_report_records_failures():
    report = VerificationReport()
    report.add("ok", True)
    report.run("broken", broken_check)
    report.run("false", lambda: False)
    assert not report.passed
    assert [c.name for c in report.failures] == ["broken", "false"]
    assert report.failures[0].detail == "MulffsError: boom"
    assert report.to_dict()["status"] == "failed"


@pytest.mark.parametrize("dim_kind", ["scalar", "matrix2"])
def test_oracle_check_passes(dim_kind):
    report = oracle_check(3, dim_kind, seed=1, trials=5)
    assert report.passed, [c.to_dict() for c in report.failures]
    assert len(report.checks) == 5 * 8
    assert "t_twisted_multiplicativity[trial=4]" in {c.name for c in report.checks}


def test_unknown_dim_kind():
    with pytest.raises(ValueError):
        descriptor_for("matrix7")
