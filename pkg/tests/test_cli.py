import csv
import io
import json
import math
from pathlib import Path

import jsonschema
import pytest

from quantcirc.cli import EXIT_INVALID, EXIT_NONCONVERGED, EXIT_OK, EXIT_USAGE, number, round_sig, run

DATA = Path(__file__).parent / "data"
NETLISTS = DATA / "netlists"
GOLDEN = DATA / "golden"
SCHEMA = json.loads((Path(__file__).parents[1] / "schemas" / "quantize.schema.json").read_text())
VERBS = ["quantize", "spectrum", "sweep", "bath", "fdt", "variance", "scatter"]


def call(*argv):
    out = io.StringIO()
    code = run([str(a) for a in argv], out)
    return code, out.getvalue()


def rows(text):
    return list(csv.reader(io.StringIO(text)))


@pytest.mark.parametrize("name", ["lc", "coupled_lc", "cpb", "transmon", "fluxonium", "dc_squid"])
def test_quantize_golden_files(name):
    code, out = call("quantize", NETLISTS / f"{name}.net")
    assert code == EXIT_OK
    assert out == (GOLDEN / f"{name}.json").read_text()
    jsonschema.validate(json.loads(out), SCHEMA)


def test_quantize_lc_frequency():
    _, out = call("quantize", NETLISTS / "lc.net")
    f = json.loads(out)["modes"]["frequencies_hz"][0]
    assert f == pytest.approx(1.5915e9, rel=1e-4)


def test_quantize_to_file(tmp_path):
    target = tmp_path / "out.json"
    code, out = call("quantize", NETLISTS / "transmon.net", "-o", target)
    assert code == EXIT_OK and out == ""
    assert json.loads(target.read_text())["atom"]["regime"]["nearest_family"] == "transmon"


@pytest.mark.parametrize("verb", VERBS)
def test_help_for_every_verb(verb, capsys):
    assert call(verb, "--help")[0] == EXIT_OK
    assert "usage" in capsys.readouterr().out


@pytest.mark.parametrize(
    "argv",
    [
        ["quantize", "x.net", "--bogus"],
        ["frobnicate"],
        [],
        ["sweep", "x.net", "--param", "ej", "--from", "0", "--to", "1"],
        ["quantize", "does-not-exist.net"],
        ["bath", "--delta-omega", "1e8", "--omega-max", "1e9"],
    ],
)
def test_usage_errors(argv):
    assert call(*argv)[0] == EXIT_USAGE


def test_invalid_netlist_reports_violations(tmp_path, capsys):
    bad = tmp_path / "bad.net"
    bad.write_text("L1 1 0 1n\nC1 2 0 1p\nL2 2 0 1n\n")
    assert call("quantize", bad)[0] == EXIT_INVALID
    assert "capacitive sub-network not spanning" in capsys.readouterr().err


def test_parse_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.net"
    bad.write_text("C1 1 0 1p\nX1 1 0 3\n")
    assert call("quantize", bad)[0] == EXIT_INVALID
    assert "line 2" in capsys.readouterr().err


def test_spectrum_needs_single_node():
    assert call("spectrum", NETLISTS / "coupled_lc.net")[0] == EXIT_INVALID


def test_spectrum_nonconvergence_exit_code():
    assert call("spectrum", NETLISTS / "fluxonium.net", "--size", "6")[0] == EXIT_NONCONVERGED


def test_spectrum_csv_and_json():
    code, out = call("spectrum", NETLISTS / "transmon.net", "--levels", "3")
    assert code == EXIT_OK
    table = rows(out)
    assert table[0] == ["level", "energy_hz"]
    assert len(table) == 4
    code, out = call("spectrum", NETLISTS / "transmon.net", "--levels", "3", "--format", "json")
    assert len(json.loads(out)["levels_hz"]) == 3


def test_fluxonium_sweep_sweet_spots():
    code, out = call(
        "sweep", NETLISTS / "fluxonium.net", "--param", "phi_ext", "--from", "0", "--to", "2pi",
        "--points", "21", "--levels", "3",
    )
    assert code == EXIT_OK
    table = rows(out)
    assert table[0] == ["param_value", "E0", "E1", "E2", "d(omega_ge)/dparam"]
    body = [[float(x) for x in r] for r in table[1:]]
    assert len(body) == 21
    scale = max(abs(r[2] - r[1]) for r in body)
    assert body[10][0] == pytest.approx(math.pi, rel=1e-11)
    for i in (0, 10, 20):
        assert abs(body[i][-1]) <= 1e-8 * scale
    assert max(abs(r[-1]) for r in body) > 1e-3 * scale


def test_sweep_workers_preserve_order():
    argv = ["sweep", NETLISTS / "cpb.net", "--param", "n_g", "--from", "0", "--to", "1", "--points", "7"]
    assert call(*argv) == call(*argv, "--workers", "3")


def test_variance_example():
    code, out = call("variance", "--L", "1n", "--C", "10p", "--R", "50", "--T", "0.02", "--wc-ratio", "10")
    assert code == EXIT_OK
    table = rows(out)
    assert table[0] == ["quantity", "closed", "quadrature", "relative_difference"]
    for r in table[1:]:
        assert abs(float(r[3])) < 0.005


def test_variance_large_cutoff_outside_range():
    argv = ["variance", "--L", "1n", "--C", "10p", "--R", "0.01", "--T", "0", "--form", "large_cutoff"]
    assert call(*argv)[0] == EXIT_INVALID


def test_bath_csv():
    code, out = call("bath", "--R", "50", "--delta-omega", "1e8", "--omega-max", "1e9")
    table = rows(out)
    assert table[0] == ["L0", ""] and table[1] == ["m", "omega_m", "C_m", "L_m"]
    assert len(table) == 12
    assert len({r[3] for r in table[2:]}) == 1


def test_bath_rejects_active_admittance(tmp_path):
    path = tmp_path / "y.csv"
    path.write_text("omega_rad_s,re_Y_S,im_Y_S\n1e9,-0.02,0\n2e9,0.02,0\n")
    assert call("bath", "--admittance-csv", path, "--delta-omega", "1e8", "--omega-max", "1e9")[0] == EXIT_INVALID


@pytest.mark.parametrize("kind", ["vv", "phiphi", "nyquist", "johnson"])
def test_fdt_kinds(kind):
    code, out = call("fdt", "--R", "50", "--T", "0.1", "--omega-from", "1e9", "--omega-to", "1e10",
                     "--points", "5", "--kind", kind)
    assert code == EXIT_OK
    assert len(rows(out)) == 6


def test_fdt_negative_frequencies():
    code, out = call("fdt", "--R", "50", "--T", "0", "--omega-from=-1e10", "--omega-to=-1e9", "--points", "3")
    assert code == EXIT_OK
    assert all(float(r[1]) == 0 for r in rows(out)[1:])


def test_scatter_unitarity():
    code, out = call("scatter", "--omega-a", "3e10", "--gamma", "3e7", "--from=-3e8", "--to", "3e8", "--points", "11")
    assert code == EXIT_OK
    for r in rows(out)[1:]:
        assert math.hypot(float(r[3]), float(r[4])) == pytest.approx(1.0, rel=1e-11)


def test_scatter_rejects_strong_damping():
    assert call("scatter", "--omega-a", "1e9", "--gamma", "5e8", "--from", "0", "--to", "1")[0] == EXIT_INVALID


def test_output_is_deterministic():
    argv = ["sweep", NETLISTS / "transmon.net", "--param", "n_g", "--from", "0", "--to", "0.5", "--points", "3"]
    assert call(*argv) == call(*argv)


@pytest.mark.parametrize(
    "text, value",
    [("pi", math.pi), ("2pi", 2 * math.pi), ("-pi/2", -math.pi / 2), ("0.5*pi", math.pi / 2), ("10p", 1e-11), ("1e3", 1e3)],
)
def test_number_parser(text, value):
    assert number(text) == pytest.approx(value, rel=1e-15)


def test_round_sig():
    assert round_sig({"a": [1.23456789012345e9, float("inf")], "b": 3}) == {"a": [1.23456789012e9, float("inf")], "b": 3}
