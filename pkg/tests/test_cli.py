import json
from unittest.mock import MagicMock, patch

import pandas as pd
import pytest

from avvi.analysis_service import AnalysisResult
from avvi.sampling_oracle import OracleReport
from avvi.parametric_sweep import Mode
from avvi_cli import EXIT_FAILED, EXIT_OK, EXIT_USAGE, main
from scripts.instance_io import dumps_instance, save_instance


@pytest.fixture
def family_file(tmp_path, p1_n2):
    path = tmp_path / "p1_n2.json"
    save_instance(p1_n2, path)
    return path


@pytest.fixture
def mock_service():
    service = MagicMock()
    service.run.return_value = AnalysisResult({"structural": "exact", "chi_weak": 3, "chi_pareto": 3})
    return service


@pytest.mark.cli
def test_gen_writes_the_canonical_instance(tmp_path, pp_n4_p2):
    out = tmp_path / "pp.json"
    assert main(["gen", "--n", "4", "--p", "2", "-o", str(out)]) == EXIT_OK
    text = out.read_text(encoding="utf-8")
    assert text == dumps_instance(pp_n4_p2)
    data = json.loads(text)
    assert data["constraints"]["A"][0] == ["-1", "0", "0", "-1"]
    assert data["meta"] == {"family": "pp", "n": 4, "p": 2}


@pytest.mark.cli
def test_gen_is_byte_stable(tmp_path):
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    main(["gen", "--n", "6", "--p", "1", "-o", str(first)])
    main(["gen", "--n", "6", "--p", "1", "-o", str(second)])
    assert first.read_bytes() == second.read_bytes()


@pytest.mark.cli
def test_gen_to_stdout(capsys):
    assert main(["gen", "--n", "2"]) == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert data["constraints"] is None
    assert data["operators"][0]["M"] == [["0", "1"], ["-1", "0"]]


@pytest.mark.cli
def test_gen_rejects_odd_dimension(capsys):
    assert main(["gen", "--n", "3", "--p", "0"]) == EXIT_USAGE
    assert "n must be even" in capsys.readouterr().err


@pytest.mark.cli
def test_usage_errors():
    assert main([]) == EXIT_USAGE
    assert main(["gen"]) == EXIT_USAGE
    assert main(["analyze", "x.json", "--mode", "strong"]) == EXIT_USAGE


@pytest.mark.cli
def test_analyze_reports_counts(tmp_path, family_file):
    out = tmp_path / "report.json"
    assert main(["analyze", str(family_file), "--no-timing", "-o", str(out)]) == EXIT_OK
    report = json.loads(out.read_text(encoding="utf-8"))
    assert report["structural"] == "exact"
    assert report["chi_weak"] == 2
    assert report["chi_pareto"] == 2
    assert report["critical_values"] == ["1/2"]
    assert report["weak"]["cells"][0]["lo_closed"] is True
    assert "timing" not in report


@pytest.mark.cli
def test_analyze_is_byte_stable(tmp_path, family_file):
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    main(["analyze", str(family_file), "--no-timing", "-o", str(first)])
    main(["analyze", str(family_file), "--no-timing", "-o", str(second)])
    assert first.read_bytes() == second.read_bytes()


@pytest.mark.cli
def test_analyze_exports_curve_samples(tmp_path, family_file):
    csv_path = tmp_path / "curves.csv"
    args = ["analyze", str(family_file), "--mode", "weak", "--no-timing", "-o", str(tmp_path / "r.json")]
    assert main(args + ["--curve-csv", str(csv_path), "--csv-samples", "5"]) == EXIT_OK
    frame = pd.read_csv(csv_path)
    assert list(frame.columns) == ["xi1", "x_1", "x_2", "cell_id", "pattern", "component_id"]
    assert len(frame) == 10
    assert sorted(frame["component_id"].unique().tolist()) == [0, 1]
    assert (frame["x_1"] + frame["x_2"]).abs().max() < 1e-9


@pytest.mark.cli
@patch("avvi_cli.AvviAnalysisService")
def test_analyze_passes_flags_to_the_service(service_cls, mock_service, family_file, capsys):
    service_cls.return_value = mock_service
    args = ["analyze", str(family_file), "--mode", "pareto", "--degraded", "--oracle", "--grid", "50"]
    assert main(args) == EXIT_OK
    kwargs = service_cls.call_args.kwargs
    assert kwargs["modes"] == [Mode.PARETO]
    assert kwargs["exact"] is False
    assert kwargs["oracle"] is True
    assert kwargs["grid"] == 50
    assert json.loads(capsys.readouterr().out)["chi_weak"] == 3


@pytest.mark.cli
def test_analyze_rejects_malformed_instances(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"n": 2, "m": 1, "operators": [{"M": [[1, 0], [0, 1]], "q": ["1/0", 0]}]}', encoding="utf-8")
    assert main(["analyze", str(bad)]) == EXIT_USAGE
    assert "error" in capsys.readouterr().err
    assert main(["analyze", str(tmp_path / "missing.json")]) == EXIT_USAGE


@pytest.mark.cli
def test_bounds_table(capsys):
    assert main(["bounds", "2", "4", "0"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "3188646" in out
    rows = {line.split()[0]: line.split()[1] for line in out.splitlines()[1:]}
    assert rows == {"general_upper": "3188646", "skew_bicriteria_upper": "5", "lower_monotone": "3"}


@pytest.mark.cli
def test_bounds_marks_inapplicable_rows(capsys):
    assert main(["bounds", "1", "4", "0"]) == EXIT_OK
    assert capsys.readouterr().out.count("Inapplicable") == 2
    assert main(["bounds", "0", "4", "0"]) == EXIT_USAGE


@pytest.mark.cli
@patch("avvi_cli.VerificationRunner")
def test_verify_exit_codes(runner_cls, capsys):
    runner = MagicMock()
    runner.run.return_value = ({"pp": pd.DataFrame([{"instance": "pp(n=2,p=0)", "passed": False}])}, False)
    runner_cls.return_value = runner
    assert main(["verify", "--suite", "pp", "--n-max", "4"]) == EXIT_FAILED
    assert "FAILED" in capsys.readouterr().out
    runner_cls.assert_called_once_with(n_max=4, seed=0)

    runner.run.return_value = ({"pp": pd.DataFrame([{"passed": True}])}, True)
    assert main(["verify", "--suite", "pp"]) == EXIT_OK


@pytest.mark.cli
@patch("avvi_cli.sampling_oracle")
def test_oracle_command(oracle, family_file, capsys):
    oracle.return_value = OracleReport(2, 400, True, Mode.WEAK, 2000)
    assert main(["oracle", str(family_file), "--eps", "0.1"]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report == {"clipped": True, "count": 2, "grid_resolution": 2000, "heuristic": True, "mode": "weak", "points": 400}
    assert oracle.call_args.kwargs["eps"] == 0.1
