import json

from divisorlab.cli import main
from divisorlab.error_terms import ErrorTermKind, error_term
from divisorlab.moments import moment
from divisorlab.sieves import TableKind, load_table
from divisorlab.spacing import BoxSpec, SpacingForm, count_box


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_eval_matches_library(capsys):
    code, out, _ = run(capsys, "eval", "--kind", "delta", "--x", "10")
    assert code == 0
    assert float(out.strip()) == error_term(ErrorTermKind.DELTA, 10)
    assert out.strip().startswith("2.4298")


def test_eval_scientific_notation(capsys):
    code, out, _ = run(capsys, "eval", "--kind", "circle", "--x", "1e2")
    assert code == 0
    assert float(out.strip()) == error_term(ErrorTermKind.CIRCLE, 100)


def test_sieve_roundtrip(tmp_path, capsys):
    path = tmp_path / "d.dvt"
    code, _, _ = run(capsys, "--output", str(path), "sieve", "--kind", "divisor",
                     "--limit", "100")
    assert code == 0
    table = load_table(path, expected_kind=TableKind.DIVISOR)
    assert table.limit == 100 and table.value(12) == 6


def test_moment_csv_row(capsys, tmp_path):
    out_file = tmp_path / "m.csv"
    code, _, _ = run(capsys, "--output", str(out_file), "moment", "--kind",
                     "delta", "--power", "1", "--from", "1", "--to", "100")
    assert code == 0
    header, row = out_file.read_text().strip().splitlines()
    assert header == "kind,power,X,integral,main_term,residual"
    cells = row.split(",")
    assert cells[0] == "delta" and cells[1] == "1"
    expected = moment(ErrorTermKind.DELTA, 1, (1, 100)).integral
    assert float(cells[3]) == expected
    assert cells[4] == "" and cells[5] == ""   # no theory constant for power 1


def test_moment_reruns_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run(capsys, "--output", str(a), "moment", "--kind", "circle", "--power",
        "2", "--to", "200")
    run(capsys, "--output", str(b), "moment", "--kind", "circle", "--power",
        "2", "--to", "200")
    assert a.read_bytes() == b.read_bytes()


def test_moment_json(capsys):
    code, out, _ = run(capsys, "--format", "json", "moment", "--kind", "delta",
                       "--power", "1", "--to", "100")
    assert code == 0
    doc = json.loads(out)
    assert doc["integral"] == moment(ErrorTermKind.DELTA, 1, (1, 100)).integral
    assert doc["partition_count"] == 99
    assert "main_term" not in doc


def test_spacing_json_carries_full_spec(capsys):
    code, out, _ = run(capsys, "--format", "json", "spacing", "--form",
                       "near-integer", "--K", "500", "--delta", "0.01",
                       "--alpha", "2", "--beta", "0.25")
    assert code == 0
    doc = json.loads(out)
    assert doc["alpha"] == 2.0 and doc["beta"] == 0.25
    assert doc["count"] >= 0 and doc["bound_2_16"] is None


def test_voronoi_value(capsys):
    code, out, _ = run(capsys, "voronoi", "--kind", "delta", "--truncation",
                       "2", "--x", "1")
    assert code == 0
    assert abs(float(out.strip()) - 0.08194208036257869) < 1e-12


def test_voronoi_remainder_csv(capsys):
    code, out, _ = run(capsys, "voronoi", "--kind", "delta", "--truncation",
                       "32", "--scale", "1000", "--seed", "42")
    assert code == 0
    header, row = out.strip().splitlines()
    assert header.startswith("kind,X,N,")
    assert row.split(",")[2] == "32"


def test_spacing_csv_schema(capsys):
    code, out, _ = run(capsys, "spacing", "--form", "three-root", "--M", "8",
                       "--Mp", "8", "--delta", "0.01")
    assert code == 0
    header, row = out.strip().splitlines()
    assert header == "form,M,Mp,K,L,delta,count,bound_2_15,bound_2_16,ratio"
    cells = row.split(",")
    spec = BoxSpec(form=SpacingForm.THREE_ROOT, M=8, Mp=8, delta=0.01)
    res = count_box(spec)
    assert cells[0] == "three-root"
    assert int(cells[6]) == res.count
    assert float(cells[7]) == res.bound_primary
    assert cells[8] == ""        # single-bound form
    assert float(cells[9]) == res.ratio


def test_spacing_two_bound_form(capsys):
    code, out, _ = run(capsys, "spacing", "--form", "four-root-minus", "--M",
                       "8", "--Mp", "8", "--K", "8", "--L", "8", "--delta",
                       "0.001")
    assert code == 0
    row = out.strip().splitlines()[1].split(",")
    assert row[7] != "" and row[8] != ""


def test_constants_json(capsys):
    code, out, _ = run(capsys, "constants", "--name", "cubic_coefficient",
                       "--cutoff", "100")
    assert code == 0
    doc = json.loads(out)
    assert doc["name"] == "cubic_coefficient"
    assert doc["cutoff"] == 100
    assert doc["value"] > 0 and doc["tail_bound"] > 0
    assert "timestamp" in doc


def test_constants_reruns_identical_modulo_timestamp(capsys):
    _, out1, _ = run(capsys, "constants", "--name", "cubic_diagonal",
                     "--cutoff", "64")
    _, out2, _ = run(capsys, "constants", "--name", "cubic_diagonal",
                     "--cutoff", "64")
    d1, d2 = json.loads(out1), json.loads(out2)
    d1.pop("timestamp")
    d2.pop("timestamp")
    assert d1 == d2


def test_fit_json_roundtrip(capsys):
    code, out, _ = run(capsys, "--format", "json", "fit", "--kind", "delta",
                       "--power", "2", "--grid", "100,400,1600,6400",
                       "--cutoff", "16")
    assert code == 0
    doc = json.loads(out)
    assert doc["power"] == 2
    assert len(doc["residual_series"]) == 4
    assert doc["main_exponent"] == 1.5


def test_short_interval_json(capsys):
    code, out, _ = run(capsys, "short-interval", "--kind", "delta", "--power",
                       "4", "--x", "1000", "--h", "1000")
    assert code == 0
    doc = json.loads(out)
    assert doc["in_asymptotic_range"] is True
    assert doc["ratio"] == doc["moment"] / doc["main_term"]


def test_power_out_of_range_is_usage_error(capsys):
    code, _, err = run(capsys, "moment", "--kind", "delta", "--power", "12",
                       "--to", "100")
    assert code == 1
    assert "1..9" in err


def test_unknown_command_is_usage_error(capsys):
    code, _, _ = run(capsys, "frobnicate")
    assert code == 1


def test_missing_required_flag_is_usage_error(capsys):
    code, _, _ = run(capsys, "eval", "--kind", "delta")
    assert code == 1


def test_compute_error_exit_code(capsys):
    code, _, err = run(capsys, "eval", "--kind", "delta", "--x", "0.5")
    assert code == 2
    assert "x >= 1" in err


def test_cache_dir_reuse(tmp_path, capsys):
    cache = tmp_path / "cache"
    code, _, _ = run(capsys, "--cache-dir", str(cache), "moment", "--kind",
                     "delta", "--power", "1", "--to", "50")
    assert code == 0
    cached = list(cache.iterdir())
    assert len(cached) == 1 and cached[0].name.startswith("divisor-")
    # second run loads the cached table (still succeeds, same answer)
    code, _, _ = run(capsys, "--cache-dir", str(cache), "moment", "--kind",
                     "delta", "--power", "1", "--to", "50")
    assert code == 0


def test_cache_env_var(tmp_path, capsys, monkeypatch):
    cache = tmp_path / "envcache"
    monkeypatch.setenv("DIVISORLAB_CACHE", str(cache))
    code, _, _ = run(capsys, "moment", "--kind", "circle", "--power", "1",
                     "--to", "40")
    assert code == 0
    assert any(p.name.startswith("two-squares-") for p in cache.iterdir())


def test_module_entry_point():
    import subprocess
    import sys
    proc = subprocess.run(
        [sys.executable, "-m", "divisorlab.cli", "eval", "--kind", "delta",
         "--x", "10"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.strip().startswith("2.4298")
    bad = subprocess.run(
        [sys.executable, "-m", "divisorlab.cli", "moment", "--kind", "delta",
         "--power", "12", "--to", "10"], capture_output=True, text=True)
    assert bad.returncode == 1
