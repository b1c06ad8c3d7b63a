import json

import pytest

from pqharmonic import (
    ClassParams,
    ExtremalWeights,
    HarmonicSeries,
    OperatorParams,
    extremal_function,
    margin,
    multiplier,
    read_series,
    write_series,
)
from pqharmonic.cli import main

CANON_OP = {"p": 0.9, "q": 0.5, "ell": 3, "delta": 1.0, "t": 1}
CANON_CLASS = {"operator": CANON_OP, "sigma": 0.3}


@pytest.fixture()
def class_file(tmp_path):
    path = tmp_path / "class.json"
    path.write_text(json.dumps(CANON_CLASS))
    return str(path)


@pytest.fixture()
def monomial_file(tmp_path):
    path = tmp_path / "f.json"
    write_series(HarmonicSeries.monomial(3), path)
    return str(path)


class TestBracket:
    def test_prints_plain_value(self, capsys):
        assert main(["bracket", "--p", "0.9", "--q", "0.5", "--x", "2"]) == 0
        assert capsys.readouterr().out.strip() == "1.4"

    def test_one_parameter_form(self, capsys):
        assert main(["bracket", "--q", "0.5", "--x", "3"]) == 0
        assert capsys.readouterr().out.strip() == "1.75"

    def test_json_format(self, capsys):
        assert main(["bracket", "--p", "0.9", "--q", "0.5", "--x", "2", "--format", "json"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["value"] == pytest.approx(1.4, rel=1e-15)
        assert doc["p"] == 0.9 and doc["q"] == 0.5 and doc["x"] == 2.0

    def test_domain_error_exits_two(self, capsys):
        assert main(["bracket", "--p", "0.5", "--q", "0.9", "--x", "2"]) == 2
        err = json.loads(capsys.readouterr().err)
        assert err["error"]["type"] == "DomainError"


class TestApply:
    def test_identity_configuration_round_trip(self, tmp_path, capsys):
        params = tmp_path / "op.json"
        params.write_text(json.dumps({"p": 0.9, "q": 0.5, "ell": 3, "delta": -2.0, "t": 0}))
        f = HarmonicSeries(3, 6, {4: 0.25 + 1j, 6: -0.5}, {3: 0.5})
        src = tmp_path / "f.json"
        write_series(f, src)
        out = tmp_path / "Hf.json"
        assert main(["apply", "--params", str(params), "--in", str(src), "--out", str(out)]) == 0
        assert read_series(out) == f

    def test_weights_applied(self, tmp_path):
        params = tmp_path / "op.json"
        params.write_text(json.dumps(CANON_OP))
        src = tmp_path / "f.json"
        write_series(HarmonicSeries(3, 4, {4: 1.0}, {}), src)
        out = tmp_path / "Hf.json"
        assert main(["apply", "--params", str(params), "--in", str(src), "--out", str(out)]) == 0
        op = OperatorParams.from_dict(CANON_OP)
        assert read_series(out).a[4] == pytest.approx(multiplier(4, op), rel=1e-15)


class TestCheck:
    def test_monomial_report(self, class_file, monomial_file, capsys):
        assert main(["check", "--class", class_file, "--in", monomial_file, "--grid", "8x16", "--rmax", "0.9"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["margin"] == pytest.approx(2.1, rel=1e-12)
        assert doc["min_re"] == 2.0
        assert doc["sufficient_verdict"] is True and doc["analytic_verdict"] is True
        assert doc["degenerate"] is False
        assert doc["grid"]["angles_per_radius"] == 16

    def test_analytic_failure_exits_one(self, class_file, tmp_path, capsys):
        # the co-analytic unit-weight extremal has margin 0 but fails the
        # sampled analytic condition
        cp = ClassParams.from_dict(CANON_CLASS)
        ext = extremal_function(ExtremalWeights.unit("co-analytic", 3), cp)
        src = tmp_path / "ext.json"
        write_series(ext, src)
        assert main(["check", "--class", class_file, "--in", str(src), "--grid", "8x16"]) == 1
        doc = json.loads(capsys.readouterr().out)
        assert doc["analytic_verdict"] is False

    def test_text_format(self, class_file, monomial_file, capsys, monkeypatch):
        monkeypatch.setenv("NO_COLOR", "1")
        assert main(["check", "--class", class_file, "--in", monomial_file,
                     "--grid", "8x16", "--format", "text"]) == 0
        out = capsys.readouterr().out
        assert "analytic_verdict   PASS" in out
        assert "\x1b[" not in out  # NO_COLOR respected

    def test_bad_grid_spec_exits_two(self, class_file, monomial_file, capsys):
        assert main(["check", "--class", class_file, "--in", monomial_file, "--grid", "64"]) == 2


class TestExtremal:
    def test_unit_weight_margin_zero(self, class_file, tmp_path, capsys):
        out = tmp_path / "ext.json"
        assert main(["extremal", "--class", class_file, "--kappa", "4", "--out", str(out)]) == 0
        cp = ClassParams.from_dict(CANON_CLASS)
        f = read_series(out)
        assert abs(margin(f, cp)) <= 1e-12 * cp.bound

    def test_split_weight(self, class_file, capsys):
        assert main(["extremal", "--class", class_file, "--kappa", "4", "--mu", "0.5"]) == 0
        f = HarmonicSeries.from_dict(json.loads(capsys.readouterr().out))
        cp = ClassParams.from_dict(CANON_CLASS)
        assert margin(f, cp) == pytest.approx(1.05, rel=1e-12)

    def test_co_analytic_part(self, class_file, capsys):
        assert main(["extremal", "--class", class_file, "--kappa", "3", "--part", "co-analytic"]) == 0
        f = HarmonicSeries.from_dict(json.loads(capsys.readouterr().out))
        assert set(f.b) == {3} and not f.a

    def test_kappa_at_valence_analytic_gives_monomial(self, class_file, capsys):
        assert main(["extremal", "--class", class_file, "--kappa", "3"]) == 0
        f = HarmonicSeries.from_dict(json.loads(capsys.readouterr().out))
        assert f == HarmonicSeries.monomial(3)

    def test_bad_mu_exits_two(self, class_file, capsys):
        assert main(["extremal", "--class", class_file, "--kappa", "4", "--mu", "1.5"]) == 2


class TestConvolveAndBernardi:
    def test_convolve(self, tmp_path, capsys):
        f = HarmonicSeries(3, 5, {4: 0.5, 5: 2.0}, {3: 0.5})
        m = HarmonicSeries(3, 5, {4: 0.25}, {3: 2.0, 4: 5.0})
        fa, mb = tmp_path / "f.json", tmp_path / "m.json"
        write_series(f, fa)
        write_series(m, mb)
        assert main(["convolve", "--in", str(fa), str(mb)]) == 0
        got = HarmonicSeries.from_dict(json.loads(capsys.readouterr().out))
        assert got == HarmonicSeries(3, 5, {4: 0.125}, {3: 1.0})

    def test_bernardi(self, tmp_path, capsys):
        src = tmp_path / "f.json"
        write_series(HarmonicSeries(3, 4, {4: 1.0}, {3: 0.5}), src)
        assert main(["bernardi", "--u", "1", "--in", str(src)]) == 0
        got = HarmonicSeries.from_dict(json.loads(capsys.readouterr().out))
        assert got.a[4] == pytest.approx(0.8, rel=1e-15)
        assert got.b[3] == 0.5


class TestVerify:
    def test_small_run_writes_reports(self, class_file, tmp_path, capsys):
        outdir = tmp_path / "reports"
        code = main(
            ["verify", "--class", class_file, "--trials", "5", "--truncation", "8",
             "--grid", "8x16", "--rmax", "0.9", "--seed", "7",
             "--suites", "sufficiency,convex", "--out", str(outdir)]
        )
        assert code == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 2
        assert "suite=sufficiency" in lines[0] and "pass=5" in lines[0]
        for suite in ("sufficiency", "convex"):
            doc = json.loads((outdir / f"report-{suite}-7.json").read_text())
            assert doc["summary"] == {"pass": 5, "fail": 0, "singular": 0}

    def test_reruns_are_byte_identical(self, class_file, tmp_path):
        args = ["verify", "--class", class_file, "--trials", "4", "--truncation", "8",
                "--grid", "4x8", "--rmax", "0.9", "--seed", "3", "--suites", "convolution"]
        first, second = tmp_path / "r1", tmp_path / "r2"
        assert main(args + ["--out", str(first)]) == 0
        assert main(args + ["--out", str(second)]) == 0
        name = "report-convolution-3.json"
        assert (first / name).read_bytes() == (second / name).read_bytes()


class TestErrorHandling:
    def test_malformed_json_exits_two_with_error_object(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        out = tmp_path / "class.json"
        out.write_text(json.dumps(CANON_CLASS))
        assert main(["check", "--class", str(out), "--in", str(bad)]) == 2
        err = json.loads(capsys.readouterr().err)
        assert err["error"]["type"] == "JSONDecodeError"

    def test_schema_violation_exits_two(self, tmp_path, capsys):
        doc = tmp_path / "f.json"
        doc.write_text(json.dumps({"ell": 3, "truncation": 3, "a": {}, "b": {}, "bogus": 1}))
        cls = tmp_path / "class.json"
        cls.write_text(json.dumps(CANON_CLASS))
        assert main(["check", "--class", str(cls), "--in", str(doc)]) == 2
        assert json.loads(capsys.readouterr().err)["error"]["type"] == "SchemaError"

    def test_missing_file_exits_two(self, class_file, capsys):
        assert main(["check", "--class", class_file, "--in", "/nonexistent.json"]) == 2

    def test_unknown_flag_rejected(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["bracket", "--q", "0.5", "--x", "1", "--frob", "1"])
        assert exc.value.code == 2
