import subprocess
import sys

from fig_helpers import row, write_stats
from forageq_figures.cli import cli


class TestCli:
    def test_renders_and_prints_paths(self, tmp_path, capsys):
        results = tmp_path / "results"
        write_stats(results / "run" / "stats.csv", [row()])
        out = tmp_path / "charts"
        assert cli(["--results", str(results), "--out", str(out)]) == 0
        printed = capsys.readouterr().out.strip().splitlines()
        assert len(printed) == 6
        assert all(line.endswith(".png") for line in printed)

    def test_missing_results_dir_fails_with_path(self, tmp_path, capsys):
        missing = tmp_path / "absent"
        code = cli(["--results", str(missing), "--out", str(tmp_path / "o")])
        assert code == 1
        err = capsys.readouterr().err
        assert err.startswith("error:")
        assert str(missing) in err

    def test_malformed_file_fails_naming_it(self, tmp_path, capsys):
        results = tmp_path / "results"
        bad = results / "run" / "stats.csv"
        bad.parent.mkdir(parents=True)
        bad.write_text("not,a,stats,file\n1,2,3,4\n")
        code = cli(["--results", str(results), "--out", str(tmp_path / "o")])
        assert code == 1
        assert str(bad) in capsys.readouterr().err

    def test_header_only_warns_but_succeeds(self, tmp_path, capsys):
        results = tmp_path / "results"
        write_stats(results / "run" / "stats.csv", [], n_agents=1)
        assert cli(["--results", str(results),
                    "--out", str(tmp_path / "o")]) == 0
        assert "warning" in capsys.readouterr().err

    def test_missing_arguments_exit_two(self, capsys):
        assert cli([]) == 2
        capsys.readouterr()

    def test_help_exits_zero(self, capsys):
        assert cli(["--help"]) == 0
        assert "--results" in capsys.readouterr().out

    def test_module_entry_point(self, tmp_path):
        results = tmp_path / "results"
        write_stats(results / "run" / "stats.csv", [row()])
        proc = subprocess.run(
            [sys.executable, "-m", "forageq_figures.cli",
             "--results", str(results), "--out", str(tmp_path / "o")],
            capture_output=True, text=True)
        assert proc.returncode == 0
        assert proc.stdout.count(".png") == 6
