import os

import numpy as np
import pytest

from meanfield.cli import main, run

DISK_INI = """\
[domain]
variant = disk
center = 0, 0
radius = 1
h = 1/64

[field]
name = radial_power
center = 0, 0
p = 1
"""

SQUARE_INI = """\
[domain]
variant = rectangle
lo = 0, 0
hi = 1, 1
h = 1/32

[field]
name = harmonic_poly
id = x2-y2

[sampler]
spacing = 0.25
"""


def write_cfg(tmp_path, text, name="run.ini"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def read_report(out_dir):
    with open(os.path.join(out_dir, "report.txt")) as fh:
        return fh.read()


def result_value(report, key):
    lines = report.split("[results]", 1)[1].splitlines()
    for line in lines:
        if line.startswith(key + " = "):
            return line.split(" = ", 1)[1]
    raise KeyError(key)


class TestClassifyCommand:
    def test_harmonic_passes(self, tmp_path):
        cfg = write_cfg(tmp_path, SQUARE_INI)
        out = str(tmp_path / "out")
        assert run("classify", cfg, out, quiet=True) == 0
        report = read_report(out)
        assert result_value(report, "harmonic.verdict") == "pass"
        assert float(result_value(report, "harmonic.worst_margin")) <= 1e-10
        assert result_value(report, "subharmonic.verdict") == "pass"

    def test_byte_identical_reruns(self, tmp_path):
        cfg = write_cfg(tmp_path, SQUARE_INI)
        out1, out2 = str(tmp_path / "a"), str(tmp_path / "b")
        assert run("classify", cfg, out1, quiet=True) == 0
        assert run("classify", cfg, out2, quiet=True) == 0
        assert read_report(out1) == read_report(out2)


class TestTorsionCommand:
    def test_disk_constants(self, tmp_path):
        cfg = write_cfg(tmp_path, DISK_INI)
        out = str(tmp_path / "out")
        assert run("torsion", cfg, out, quiet=True) == 0
        report = read_report(out)
        assert 0.99 <= float(result_value(report, "c1")) <= 1.01
        assert 0.99 <= float(result_value(report, "c2")) <= 1.01
        assert float(result_value(report, "serrin_deficit")) <= 1e-3
        assert os.path.exists(os.path.join(out, "torsion_v.grid"))
        assert os.path.exists(os.path.join(out, "torsion_q.csv"))

    def test_h_override(self, tmp_path):
        cfg = write_cfg(tmp_path, DISK_INI)
        out = str(tmp_path / "out")
        assert run("torsion", cfg, out, h_override="1/32", quiet=True) == 0
        assert "domain.h = 1/32" in read_report(out)

    def test_nonconvergence_exit_code(self, tmp_path):
        cfg = write_cfg(tmp_path, DISK_INI + "\n[torsion]\nmaxiter = 1\n")
        assert run("torsion", cfg, str(tmp_path / "out"), quiet=True) == 3


class TestMeansCommand:
    def test_csv_emitted(self, tmp_path):
        cfg = write_cfg(tmp_path, SQUARE_INI + "\n[means]\nkappa = 0.5\n")
        out = str(tmp_path / "out")
        assert run("means", cfg, out, quiet=True) == 0
        rows = np.loadtxt(os.path.join(out, "means.csv"), delimiter=",",
                          skiprows=1)
        assert rows.shape[1] == 6  # cx, cy, r, B, S, S_at_kappa_r
        assert np.all(np.isfinite(rows))
        # Harmonic field: B = S = S(kappa r) along each row.
        assert np.abs(rows[:, 3] - rows[:, 4]).max() <= 1e-10
        assert np.abs(rows[:, 3] - rows[:, 5]).max() <= 1e-10


class TestBeardonCommand:
    def test_threshold_for_square_norm(self, tmp_path):
        cfg = write_cfg(tmp_path, DISK_INI)
        out = str(tmp_path / "out")
        assert run("beardon", cfg, out, quiet=True) == 0
        report = read_report(out)
        kstar = float(result_value(report, "threshold.kappa_star"))
        assert kstar == pytest.approx(np.sqrt(0.5), abs=2e-3)


class TestBlowupCommand:
    def test_interval_closed_forms(self, tmp_path):
        cfg = write_cfg(tmp_path, """\
[domain]
variant = interval
a = 0
b = 1

[blowup]
ks = 3, 10
""")
        out = str(tmp_path / "out")
        assert run("blowup", cfg, out, quiet=True) == 0
        rows = np.loadtxt(os.path.join(out, "blowup.csv"), delimiter=",",
                          skiprows=1)
        assert rows[0][2] == 3.0 and rows[1][2] == 10.0
        assert rows[0][3] == pytest.approx(13 / 9)
        assert rows[1][3] == pytest.approx(1.81)


class TestPowersCommand:
    def test_kappa_min_column(self, tmp_path):
        out = str(tmp_path / "out")
        assert run("powers", None, out, quiet=True) == 0
        rows = np.loadtxt(os.path.join(out, "powers.csv"), delimiter=",",
                          skiprows=1)
        by_p = {int(r[0]): r[2] for r in rows}
        assert by_p[1] == pytest.approx(0.7071, abs=5e-5)
        assert by_p[2] == pytest.approx(0.7598, abs=5e-5)
        # (2/8)^(1/6): direct evaluation of the contraction formula.
        assert by_p[3] == pytest.approx(0.7937, abs=5e-5)
        assert by_p[4] == pytest.approx(0.8178, abs=5e-5)


class TestHarnackCommand:
    def test_disk_suite_holds(self, tmp_path):
        cfg = write_cfg(tmp_path, DISK_INI)
        out = str(tmp_path / "out")
        assert run("harnack", cfg, out, quiet=True) == 0
        report = read_report(out)
        holds = [line for line in report.splitlines()
                 if line.endswith(".holds = true")]
        assert len(holds) >= 5
        assert ".holds = false" not in report


class TestErrorPaths:
    def test_missing_config(self, tmp_path):
        assert run("classify", str(tmp_path / "nope.ini"),
                   str(tmp_path / "out"), quiet=True) == 2

    def test_unknown_command(self, tmp_path):
        assert run("frobnicate", None, str(tmp_path / "out"), quiet=True) == 2

    def test_unknown_key(self, tmp_path):
        cfg = write_cfg(tmp_path, "[domain]\nvariantt = disk\n")
        assert run("classify", cfg, str(tmp_path / "out"), quiet=True) == 2

    def test_bad_number(self, tmp_path):
        cfg = write_cfg(tmp_path, "[domain]\nh = banana\n")
        assert run("torsion", cfg, str(tmp_path / "out"), quiet=True) == 2

    def test_field_domain_dimension_clash(self, tmp_path):
        cfg = write_cfg(tmp_path, """\
[domain]
variant = interval

[field]
name = harmonic_poly
""")
        assert run("classify", cfg, str(tmp_path / "out"), quiet=True) == 2

    def test_main_entrypoint(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, SQUARE_INI)
        code = main(["classify", "--config", cfg, "--out",
                     str(tmp_path / "out"), "--quiet"])
        assert code == 0
