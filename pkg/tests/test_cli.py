import json
import subprocess
import sys

import pytest

from adjsym.cli import Report, UsageError, combo_coordinates, format_combo, parse_system, read_system_text, run
from adjsym.expr import ParseError
from systems import PGKDV_SPACE, coef


def records(*argv):
    code, out = run([*argv, "--format", "records"])
    return code, json.loads(out) if out.strip().startswith("{") else out


def test_check_all_objects():
    code, rep = records("check", "--system", "pgkdv")
    assert code == 0 and rep["ok"]
    assert rep["results"]["P4"]["R"] == "-3*p*t*D_t - p*x*D_x - (2*p + 2)"


def test_check_unknown_name_is_usage_error():
    code, out = run(["check", "--system", "pgkdv", "P9"])
    assert code == 2 and out.startswith("error:")


def test_missing_system_file():
    assert run(["check", "--system", "/nonexistent.sys"])[0] == 2


def test_bad_subcommand():
    assert run(["frobnicate"])[0] == 2


@pytest.mark.parametrize("which, dim", [("symm", 4), ("adjsymm", 3), ("multiplier", 2)])
@pytest.mark.parametrize("params", [[], ["--param", "p=3"]])
def test_solve_dimensions(which, dim, params):
    code, rep = records("solve", "--system", "pgkdv", which, *params)
    assert code == 0 and rep["results"]["dimension"] == dim


def test_actions_match_golden_tables():
    code, rep = records("actions", "--system", "pgkdv", "--golden", "pgkdv")
    assert code == 0 and rep["ok"]
    assert rep["results"]["action1"]["cells"]["Q3"]["P4"] == "(2*p - 4)*Q3"


def test_brackets_S3():
    code, rep = records("brackets", "--system", "pgkdv", "--action", "3", "--Q", "Q3")
    assert code == 0
    assert rep["certificates"]["commutator"] == "ideal-kernel"
    assert rep["certificates"]["jacobi_zero"] and rep["certificates"]["preimage_shift_independent"]


def test_brackets_S2_without_scaling_fails():
    code, rep = records("brackets", "--system", "pgkdv", "--action", "2", "--Q", "Q3")
    assert code == 1 and not rep["ok"] and rep["errors"]


def test_brackets_S2_with_scaling():
    code, rep = records("brackets", "--system", "pgkdv", "--action", "2", "--Q", "Q3", "--scaling")
    assert code == 0
    assert rep["certificates"]["commutator"] == "scaling-decomposition"


def test_noether_command():
    code, rep = records("noether", "--system", "pgkdv", "--Q", "Q3")
    assert code == 0 and rep["ok"]


def test_records_are_deterministic_and_round_trip():
    a = run(["actions", "--system", "pgkdv", "--format", "records"])[1]
    b = run(["actions", "--system", "pgkdv", "--format", "records"])[1]
    assert a == b
    assert Report.from_records(a).to_records() == a


def test_text_format():
    code, out = run(["solve", "--system", "pgkdv", "symm"])
    assert code == 0 and "dimension: 4" in out


def test_param_specialization_removes_parameter():
    code, rep = records("check", "--system", "pgkdv", "--param", "p=3", "P4")
    assert code == 0
    assert rep["results"]["P4"]["value"] == "u - 9*t*u_t - 3*x*u_x"


def test_wave_system_bundled():
    code, rep = records("check", "--system", "wave")
    assert code == 0 and rep["ok"]


def test_parse_error_location():
    text = read_system_text("pgkdv").replace("symmetry P2 = -u_x", "symmetry P2 = -u_x +")
    with pytest.raises(ParseError) as err:
        parse_system(text)
    assert err.value.line > 0


def test_unknown_section():
    with pytest.raises(ParseError):
        parse_system("[bogus]\n")


def test_system_file_on_disk(tmp_path):
    f = tmp_path / "kdv.sys"
    f.write_text(read_system_text("pgkdv").replace("scaling = P4", ""))
    assert run(["check", "--system", str(f), "Q3"])[0] == 0


def test_combo_coordinates():
    c1 = PGKDV_SPACE.with_params("c1").parse_coef("(p-4)*c1")
    assert combo_coordinates("(p-4)*c1*Q1 - Q2", ["Q1", "Q2", "Q3"], PGKDV_SPACE, ["c1"]) == [c1, -1, 0]
    assert format_combo([0, 0, coef("2*p-4")], ["Q1", "Q2", "Q3"]) == "(2*p - 4)*Q3"


def test_combo_must_be_linear():
    with pytest.raises(UsageError):
        combo_coordinates("Q1*Q2", ["Q1", "Q2"], PGKDV_SPACE)
    with pytest.raises(UsageError):
        combo_coordinates("Q1 + 1", ["Q1", "Q2"], PGKDV_SPACE)


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "adjsym", "solve", "--system", "pgkdv", "multiplier"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and "dimension: 2" in r.stdout
