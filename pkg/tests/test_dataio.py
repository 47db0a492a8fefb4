"""File parsing, canonical formatting, and report round-trips."""

import io
import json

import numpy as np
import pytest

from twostate import MarkovParams, generate
from twostate.dataio import (
    AnalysisReport,
    CurveFileError,
    SequenceFormatError,
    StudyFileError,
    curve_text,
    fmt,
    funnel_table_text,
    parse_curve,
    parse_sequence,
    parse_studies,
    parse_study_records,
    round9,
    sequence_text,
    write_curve,
    write_sequence,
    write_text_atomic,
)
from twostate.estimate import RunFit, RunFitMethod, ScatterFit


class TestParseStudies:
    def test_successes_converted(self):
        ds = parse_studies(io.StringIO("study_id,n,successes,p_bar\ns1,100,58,\n"))
        assert ds.points == [(100, 0.58, "s1")]

    def test_p_bar_column(self):
        ds = parse_studies(io.StringIO("study_id,n,p_bar\ns1,100,0.58\n"))
        assert ds.points == [(100, 0.58, "s1")]

    def test_group_and_tab_delimited(self):
        records = parse_study_records(
            io.StringIO("study_id\tn\tsuccesses\tgroup\ns1\t10\t5\tcaptive\n")
        )
        assert records[0].group == "captive" and records[0].p_bar == 0.5

    def test_zero_n_rejected_with_line_number(self):
        with pytest.raises(StudyFileError, match="line 2"):
            parse_studies(io.StringIO("study_id,n,p_bar\ns1,0,0.5\n"))

    def test_both_values_rejected(self):
        with pytest.raises(StudyFileError, match="exactly one"):
            parse_studies(io.StringIO("study_id,n,successes,p_bar\ns1,100,58,0.58\n"))

    def test_neither_value_rejected(self):
        with pytest.raises(StudyFileError, match="exactly one"):
            parse_studies(io.StringIO("study_id,n,successes,p_bar\ns1,100,,\n"))

    def test_out_of_range_p_bar(self):
        with pytest.raises(StudyFileError, match=r"p_bar must lie in \[0, 1\]"):
            parse_studies(io.StringIO("study_id,n,p_bar\ns1,100,1.2\n"))

    def test_all_problems_reported(self):
        bad = "study_id,n,p_bar\ns1,0,0.5\ns2,100,2.0\ns3,100,0.5\n"
        with pytest.raises(StudyFileError) as err:
            parse_studies(io.StringIO(bad))
        assert "line 2" in str(err.value) and "line 3" in str(err.value)

    def test_missing_column(self):
        with pytest.raises(StudyFileError, match="header"):
            parse_studies(io.StringIO("study_id,size\ns1,100\n"))

    def test_bundled_fixture_loads(self):
        import pathlib

        path = pathlib.Path(__file__).parent / "data" / "handedness_synthetic.csv"
        ds = parse_studies(path)
        assert len(ds) == 2000
        assert ds.sizes.min() >= 50


class TestParseSequence:
    def test_binary_characters(self):
        seq = parse_sequence(io.StringIO("0110"))
        assert seq.states.tolist() == [0, 1, 1, 0]

    def test_whitespace_ignored(self):
        seq = parse_sequence(io.StringIO("01\n1 0\t1"))
        assert seq.states.tolist() == [0, 1, 1, 0, 1]

    def test_alphabet_tokens(self):
        seq = parse_sequence(io.StringIO("on off on"), alphabet=("on", "off"))
        assert seq.states.tolist() == [1, 0, 1]

    def test_third_symbol_position(self):
        with pytest.raises(SequenceFormatError, match="position 3"):
            parse_sequence(io.StringIO("012"))

    def test_third_token_position(self):
        with pytest.raises(SequenceFormatError, match="position 2"):
            parse_sequence(io.StringIO("on maybe off"), alphabet=("on", "off"))

    def test_empty_file(self):
        with pytest.raises(SequenceFormatError):
            parse_sequence(io.StringIO("  \n"))

    def test_write_read_round_trip(self, tmp_path):
        seq = generate(MarkovParams(0.65, 0.25), 500, 3)
        path = tmp_path / "seq.txt"
        write_sequence(path, seq)
        assert np.array_equal(parse_sequence(path).states, seq.states)


class TestCurveIO:
    def test_round_trip(self, tmp_path):
        curve = {1: 0.5, 2: 0.25, 3: 0.25}
        path = tmp_path / "curve.csv"
        write_curve(path, curve)
        assert parse_curve(path) == curve

    def test_headerless_and_whitespace(self):
        assert parse_curve(io.StringIO("1 0.75\n2 0.25\n")) == {1: 0.75, 2: 0.25}

    def test_duplicate_length_rejected(self):
        with pytest.raises(CurveFileError, match="duplicate"):
            parse_curve(io.StringIO("m,frequency\n1,0.5\n1,0.5\n"))

    def test_bad_row(self):
        with pytest.raises(CurveFileError, match="line 2"):
            parse_curve(io.StringIO("m,frequency\n0,0.5\n"))

    def test_canonical_format(self):
        text = curve_text({1: 1 / 3, 2: 2 / 3})
        assert text == "m,frequency\n1,0.333333333\n2,0.666666667\n"


class TestFormatting:
    def test_nine_significant_digits(self):
        assert fmt(0.123456789123) == "0.123456789"
        assert fmt(1.0) == "1"
        assert round9(1 / 3) == 0.333333333

    def test_funnel_table_clamps_for_display(self):
        text = funnel_table_text([10.0], np.array([-0.2]), np.array([1.3]))
        assert text.splitlines()[1] == "10,0,1"


class TestAnalysisReport:
    def make_report(self):
        return AnalysisReport.build(
            command="fit-scatter",
            version="0.1.0",
            seed=None,
            inputs={"studies": {"path": "x.csv", "sha256": "00"}},
            scatter_fit=ScatterFit(0.5811825607, 1.13833017, 0.63514396, 0.49369833, 0.95, 2000),
            details={"level": 0.95, "min_p": None, "min_q": None},
        )

    def test_json_round_trip(self):
        report = self.make_report()
        assert AnalysisReport.from_json(report.to_json()) == report

    def test_run_fit_round_trip(self):
        report = AnalysisReport.build(
            command="fit-runs",
            version="0.1.0",
            seed=7,
            inputs={},
            run_fit=RunFit(0.25, 0.65, 0.00123456789, RunFitMethod.SIMULATED_LEAST_SQUARES),
            run_curves={"on": {1: 0.75, 2: 0.25}, "off": {1: 0.5, 2: 0.5}},
        )
        back = AnalysisReport.from_json(report.to_json())
        assert back == report
        assert back.run_fit.method is RunFitMethod.SIMULATED_LEAST_SQUARES
        assert back.run_curves["on"][1] == 0.75  # integer keys restored

    def test_serialization_is_deterministic(self):
        assert self.make_report().to_json() == self.make_report().to_json()

    def test_payload_floats_are_canonical(self):
        report = self.make_report()
        data = json.loads(report.to_json())
        assert data["scatter_fit"]["pinf_hat"] == round9(0.5811825607)


class TestAtomicWrite:
    def test_writes_and_replaces(self, tmp_path):
        path = tmp_path / "out.txt"
        write_text_atomic(path, "first\n")
        write_text_atomic(path, "second\n")
        assert path.read_text() == "second\n"
        assert list(tmp_path.iterdir()) == [path]  # no temp leftovers
