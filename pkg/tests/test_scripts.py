import json
from fractions import Fraction

import pytest

from avvi.analysis_service import AvviAnalysisService
from avvi.model import UNCONSTRAINED
from avvi.parametric_sweep import Mode
from scripts.curve_exporter import curve_frame
from scripts.instance_io import InstanceFormatError, dumps_instance, load_instance, parse_instance, save_instance
from scripts.verification_suites import VerificationRunner, random_skew
from tests.conftest import vec


def instance_text(**overrides) -> str:
    data = {"n": 2, "m": 2, "operators": [{"M": [[0, 1], [-1, 0]], "q": [-1, -1]}, {"M": [[0, -1], [1, 0]], "q": ["-1", "-2/4"]}]}
    data.update(overrides)
    return json.dumps(data)


@pytest.mark.cli
def test_parse_accepts_integers_and_rational_strings():
    problem = parse_instance(instance_text())
    assert problem.operators[1].q == vec(-1, "-1/2")
    assert problem.constraint == UNCONSTRAINED
    assert problem.meta == {}


@pytest.mark.cli
def test_parse_constraints():
    problem = parse_instance(instance_text(constraints={"A": [[-1, -1]], "b": ["-1"]}))
    assert problem.p == 1
    assert problem.constraint.b == vec(-1)


@pytest.mark.cli
@pytest.mark.parametrize(
    "text",
    [
        "{not json",
        instance_text(m=3),
        instance_text(n=3),
        instance_text(operators=[{"M": [[0, 1], [-1, 0]], "q": [0.5, 1]}] * 2),
        instance_text(operators=[{"M": [[0, 1], [-1, 0]], "q": ["1/0", 1]}] * 2),
        instance_text(operators=[{"M": [[0, 1], [-1, 0]], "q": [True, 1]}] * 2),
        instance_text(constraints={"A": [[1, 0]], "b": [1, 2]}),
        instance_text(constraints={"A": [[1, 0, 0]], "b": [1]}),
        instance_text(constraints={"A": [], "b": []}),
    ],
)
def test_parse_rejects_malformed_instances(text):
    with pytest.raises(InstanceFormatError):
        parse_instance(text)


@pytest.mark.cli
def test_save_and_load(tmp_path, pp_n4_p2):
    path = save_instance(pp_n4_p2, tmp_path / "nested" / "pp.json")
    loaded = load_instance(path)
    assert loaded.operators == pp_n4_p2.operators
    assert loaded.constraint == pp_n4_p2.constraint
    assert dumps_instance(loaded) == path.read_text(encoding="utf-8")
    with pytest.raises(InstanceFormatError, match="cannot read"):
        load_instance(tmp_path / "absent.json")


@pytest.mark.sweep
def test_curve_frame(p1_n4):
    result = AvviAnalysisService(modes=[Mode.WEAK], timing=False).run(p1_n4)
    frame = curve_frame(result, Mode.WEAK, samples=4)
    assert len(frame) == 12
    assert frame["cell_id"].nunique() == 3
    assert frame["xi1"].between(0, 1).all()
    with pytest.raises(ValueError):
        curve_frame(result, Mode.PARETO)
    with pytest.raises(ValueError):
        curve_frame(result, Mode.WEAK, samples=0)


@pytest.mark.exact
def test_random_skew(rng):
    M = random_skew(rng, 4)
    assert all(M[i, j] == -M[j, i] for i in range(4) for j in range(4))


@pytest.mark.exact
def test_runner_cayley_suite():
    tables, passed = VerificationRunner(n_max=4, progress=False).run("cayley")
    assert passed
    assert tables["cayley"]["n"].tolist() == [2, 4]
    assert tables["cayley"]["matrices"].sum() == 200


@pytest.mark.sweep
def test_runner_family_suite():
    tables, _ = VerificationRunner(n_max=2, progress=False).run("pp")
    frame = tables["pp"]
    assert frame["instance"].tolist() == ["pp(n=2,p=0)", "pp(n=2,p=1)"]
    assert frame["chi_weak"].tolist() == frame["expected"].tolist() == [2, 3]
    assert (frame["chi_pareto"] == frame["expected"]).all()
    assert frame["criticals_ok"].all()


@pytest.mark.exact
def test_runner_rejects_bad_arguments():
    with pytest.raises(ValueError):
        VerificationRunner(n_max=1)
    with pytest.raises(ValueError, match="unknown suite"):
        VerificationRunner(progress=False).run("bogus")


@pytest.fixture
def small_runner():
    return VerificationRunner(n_max=2, progress=False)


@pytest.mark.suites
@pytest.mark.solver
def test_runner_scalarization_suite(small_runner):
    tables, passed = small_runner.run("scalarization")
    frame = tables["scalarization"]
    assert passed
    assert frame["instance"].tolist() == ["pp(n=2,p=0)", "pp(n=2,p=1)"]
    assert (frame["witnesses"] > 0).all()
    assert frame["failures"].sum() == 0


@pytest.mark.suites
@pytest.mark.solver
def test_runner_convexity_suite(small_runner):
    tables, passed = small_runner.run("convexity")
    frame = tables["convexity"]
    assert passed
    assert frame["pairs"].iloc[0] == frame["midpoints_solving"].iloc[0] > 0


@pytest.mark.suites
@pytest.mark.sweep
def test_runner_separation_suite(small_runner):
    tables, passed = small_runner.run("separation")
    frame = tables["separation"]
    assert passed
    assert frame["instance"].tolist() == ["pp(n=2,p=1)"]
    assert frame["distances"].iloc[0] == [Fraction(1, 2)]


@pytest.mark.suites
@pytest.mark.sweep
def test_runner_lift_suite(small_runner):
    tables, passed = small_runner.run("lift")
    frame = tables["lift"]
    assert passed
    assert frame["instance"].tolist() == ["pp(n=2,p=0)"]
    row = frame.iloc[0]
    assert row["expected"] == row["original"] == row["variable_lift"] == row["criterion_lift_oracle"] == 2


@pytest.mark.suites
@pytest.mark.oracle
def test_runner_oracle_suite(small_runner):
    tables, passed = small_runner.run("oracle")
    frame = tables["oracle"]
    assert passed
    assert frame["structural"].tolist() == frame["oracle"].tolist() == [2, 3]
