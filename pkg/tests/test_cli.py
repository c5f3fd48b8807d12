import subprocess
import sys

import pytest

from llgfrac.cli import EXIT_IO, EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE, build_parser, main, resolve
from llgfrac.harness import read_csv

QUICK = ["--n", "101", "--refine", "T/10,T/20"]


def resolved(argv):
    return resolve(build_parser().parse_args(argv))


class TestExitCodes:
    def test_success_to_file(self, tmp_path):
        out = tmp_path / "t.csv"
        assert main(["temporal", *QUICK, "--out", str(out)]) == EXIT_OK
        rows = read_csv(out)
        assert len(rows) == 3 and rows[-1]["k"] == "order_k"

    def test_success_to_stdout(self, capsys):
        assert main(["norm", *QUICK, "--no-timing"]) == EXIT_OK
        out = capsys.readouterr().out
        assert out.splitlines()[0] == "k,h,norm_deviation"

    @pytest.mark.parametrize("argv", [[], ["temporal", "--bogus"], ["temporal", "--alpha", "x"],
                                      ["run"], ["temporal", "--refine", "T/3,T/3", "--n", "11"],
                                      ["temporal", "--refine", "0.03", "--n", "11"],
                                      ["coupled3d", "--refine", "1/60"], ["table", "9"]])
    def test_usage_errors(self, argv, capsys):
        assert main(argv) == EXIT_USAGE
        assert "error" in capsys.readouterr().err

    def test_numerical_failure(self, capsys):
        argv = ["temporal", "--scheme", "cn-midpoint", "--n", "201", "--refine", "T/2"]
        assert main(argv) == EXIT_NUMERICAL
        assert "row 0" in capsys.readouterr().err

    def test_io_failure(self, tmp_path):
        assert main(["temporal", *QUICK, "--out", str(tmp_path / "no" / "x.csv")]) == EXIT_IO

    def test_missing_config(self, tmp_path):
        assert main(["temporal", "--config", str(tmp_path / "absent.cfg")]) == EXIT_IO

    def test_help(self, capsys):
        assert main(["--help"]) == EXIT_OK


class TestConfigPrecedence:
    def write(self, tmp_path, text):
        path = tmp_path / "study.cfg"
        path.write_text(text)
        return str(path)

    def test_defaults(self):
        cfg, out, timing = resolved(["temporal"])
        assert cfg.alpha == 0.01 and cfg.n == 2001 and len(cfg.refine) == 5
        assert out is None and timing

    def test_config_beats_defaults(self, tmp_path):
        path = self.write(tmp_path, "# study file\nalpha = 0.2\nn=51  # coarse\nrefine = T/4, T/8\n\n")
        cfg, _, _ = resolved(["temporal", "--config", path])
        assert cfg.alpha == 0.2 and cfg.n == 51 and cfg.refine == (0.025, 0.0125)

    def test_flags_beat_config(self, tmp_path):
        path = self.write(tmp_path, "alpha = 0.2\nn = 51\nscheme = explicit\n")
        cfg, _, _ = resolved(["temporal", "--config", path, "--alpha", "0.3"])
        assert cfg.alpha == 0.3 and cfg.n == 51 and cfg.scheme.value == "explicit"

    def test_config_selects_study(self, tmp_path):
        path = self.write(tmp_path, "study = norm\ndim = 3\nno_timing = yes\n")
        cfg, _, timing = resolved(["run", "--config", path])
        assert cfg.study.value == "norm" and cfg.dim == 3 and not timing

    def test_bad_config_line(self, tmp_path):
        path = self.write(tmp_path, "alpha 0.2\n")
        assert main(["temporal", "--config", path]) == EXIT_USAGE

    def test_unknown_config_key(self, tmp_path):
        path = self.write(tmp_path, "colour = blue\n")
        assert main(["temporal", "--config", path]) == EXIT_USAGE

    def test_final_time_rescales_default_steps(self):
        cfg, _, _ = resolved(["temporal", "--T", "0.2"])
        assert cfg.refine[0] == pytest.approx(0.2 / 80)

    def test_forcing_position(self):
        assert resolved(["temporal", "--forcing-at", "left"])[0].forcing_offset == 0.0
        assert resolved(["temporal"])[0].forcing_offset == 0.5

    def test_table_command(self):
        cfg, _, _ = resolved(["table", "4", "--allow-large"])
        assert cfg.study.value == "coupled3d" and cfg.allow_large


def test_module_entry_point(tmp_path):
    out = tmp_path / "s.csv"
    proc = subprocess.run([sys.executable, "-m", "llgfrac", "stability", *QUICK, "--out", str(out)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    header = out.read_text().splitlines()[0]
    assert header == "k,h,linf,l2,h1,norm_deviation,seconds"
