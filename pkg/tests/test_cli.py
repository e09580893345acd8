import numpy as np
import pytest

from gsmap.cli import main
from gsmap.dataio import load_csv, write_embedding_csv, write_idx


def test_embed_generated(tmp_path, capsys):
    out = tmp_path / "e.csv"
    assert main(["embed", "--generate", "sim:4,20,8,1", "--b", "1", "--epochs", "50", "--out", str(out)]) == 0
    b = load_csv(out, has_header=True, label_column=-1)
    assert b.data.values.shape == (80, 2)
    assert set(b.data.labels) == {1, 2, 3, 4}
    err = capsys.readouterr().err
    for stage in ("knn:", "affinity:", "init:", "optimize:"):
        assert stage in err


def test_embed_is_byte_reproducible(tmp_path):
    args = ["embed", "--generate", "sim:3,20,6,2", "--b", "0.5", "--epochs", "40", "--seed", "3"]
    main(args + ["--out", str(tmp_path / "a.csv")])
    main(args + ["--out", str(tmp_path / "b.csv")])
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


@pytest.mark.parametrize("flags", [["--b", "0"], ["--b", "-1"], ["--b", "1", "--k", "1"],
                                   ["--b", "1", "--epochs", "0"], ["--b", "1", "--neg", "0"],
                                   ["--b", "1", "--lr", "0"], ["--b", "1", "--generate", "blobs"],
                                   ["--b", "1", "--generate", "sim:10,99"],
                                   ["--b", "1", "--k", "500"]])
def test_config_errors_exit_3(tmp_path, flags):
    argv = ["embed", "--out", str(tmp_path / "e.csv")] + flags
    if "--generate" not in flags:
        argv += ["--generate", "sim:2,10,4"]
    assert main(argv) == 3
    assert not (tmp_path / "e.csv").exists()


def test_missing_b_is_config_error():
    with pytest.raises(SystemExit) as exc:
        main(["embed", "--generate", "sim"])
    assert exc.value.code == 3


def test_missing_input_exit_2(tmp_path):
    assert main(["embed", "--input", str(tmp_path / "nope.csv"), "--b", "1"]) == 2


def test_csv_input_with_labels_and_conditions(tmp_path):
    rng = np.random.default_rng(0)
    cond = np.repeat([0, 1, 2], 20)
    X = rng.normal(size=(60, 4)) + cond[:, None] * 50
    rows = ["s1,s2,s3,s4,cond,lab"] + [",".join(map(repr, x)) + f",{c},{c}" for x, c in zip(X.tolist(), cond)]
    (tmp_path / "d.csv").write_text("\n".join(rows) + "\n")
    out = tmp_path / "e.csv"
    rc = main(["embed", "--input", str(tmp_path / "d.csv"), "--header", "--label-column", "5",
               "--condition-column", "4", "--b", "2", "--epochs", "30", "--out", str(out)])
    assert rc == 0
    assert load_csv(out, has_header=True).data.values.shape == (60, 3)


def test_idx_input(tmp_path):
    rng = np.random.default_rng(1)
    imgs = np.concatenate([rng.integers(0, 60, (15, 4, 4)), rng.integers(180, 255, (15, 4, 4))])
    write_idx(tmp_path / "img.gz", imgs)
    write_idx(tmp_path / "lab.gz", np.repeat([0, 1], 15), labels=True)
    out = tmp_path / "e.csv"
    rc = main(["embed", "--idx", f"{tmp_path / 'img.gz'},{tmp_path / 'lab.gz'}", "--k", "5", "--b", "1",
               "--epochs", "50", "--out", str(out)])
    assert rc == 0
    assert load_csv(out, has_header=True, label_column=-1).data.labels.tolist() == [0] * 15 + [1] * 15


def test_threads_from_env(tmp_path, monkeypatch):
    monkeypatch.setenv("GSM_THREADS", "zero")
    assert main(["embed", "--generate", "sim:2,10,4", "--b", "1", "--out", str(tmp_path / "e.csv")]) == 3
    monkeypatch.setenv("GSM_THREADS", "2")
    assert main(["embed", "--generate", "sim:2,10,4", "--b", "1", "--epochs", "5",
                 "--out", str(tmp_path / "e.csv")]) == 0


class TestCurve:
    def test_defaults(self, tmp_path):
        out = tmp_path / "c.csv"
        assert main(["curve", "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "dist,Q_b0.5,Q_b1,Q_b2,Q_b5,Q_b10"
        assert len(lines) == 502
        row1 = [float(x) for x in lines[101].split(",")]
        assert row1[0] == 1.0
        np.testing.assert_allclose(row1[1:], 0.5, atol=1e-12)
        row3 = [float(x) for x in lines[301].split(",")]
        assert row3[0] == 3.0 and all(a > b for a, b in zip(row3[1:], row3[2:]))
        svg = (tmp_path / "c.svg").read_text()
        assert svg.count("<polyline") == 5

    def test_single_b(self, tmp_path):
        out = tmp_path / "c.csv"
        assert main(["curve", "--b", "1", "--out", str(out)]) == 0
        row = out.read_text().splitlines()[201].split(",")
        assert row[0] == "2.0" and float(row[1]) == pytest.approx(0.33333, abs=1e-5)

    def test_invalid_b(self, tmp_path):
        assert main(["curve", "--b", "1,0", "--out", str(tmp_path / "c.csv")]) == 3


class TestMetricsCommand:
    def test_perfect(self, tmp_path, capsys):
        emb = np.array([[0, 0], [0, 1], [50, 50], [50, 51.0]])
        write_embedding_csv(emb, tmp_path / "e.csv", labels=[1, 1, 2, 2], header=True)
        assert main(["metrics", str(tmp_path / "e.csv")]) == 0
        assert "cluster_error=0\n" in capsys.readouterr().out

    def test_separate_label_file(self, tmp_path, capsys):
        write_embedding_csv(np.array([[0, 0], [0, 1], [50, 50.0]]), tmp_path / "e.csv")
        (tmp_path / "l.csv").write_text("3\n3\n4\n")
        assert main(["metrics", str(tmp_path / "e.csv"), "--labels", str(tmp_path / "l.csv")]) == 0
        assert "cluster_error=0\n" in capsys.readouterr().out

    def test_mismatched_labels(self, tmp_path):
        write_embedding_csv(np.zeros((3, 2)), tmp_path / "e.csv")
        (tmp_path / "l.csv").write_text("1\n2\n")
        assert main(["metrics", str(tmp_path / "e.csv"), "--labels", str(tmp_path / "l.csv")]) == 2

    def test_with_knn_preservation(self, tmp_path, capsys):
        out = tmp_path / "e.csv"
        main(["embed", "--generate", "sim:3,20,6", "--b", "1", "--epochs", "100", "--out", str(out)])
        capsys.readouterr()
        assert main(["metrics", str(out), "--generate", "sim:3,20,6", "--k", "5"]) == 0
        report = dict(line.split("=") for line in capsys.readouterr().out.split())
        assert 0 < float(report["knn_preservation"]) <= 1
        assert float(report["cluster_error"]) == 0


class TestPlot:
    def test_three_points(self, tmp_path):
        write_embedding_csv(np.array([[0, 0], [1, 1], [2, 0.5]]), tmp_path / "e.csv", labels=[0, 1, 1],
                            header=True)
        assert main(["plot", str(tmp_path / "e.csv"), "--out", str(tmp_path / "p.svg")]) == 0
        svg = (tmp_path / "p.svg").read_text()
        assert svg.count("<circle") == 3
        assert svg.startswith("<svg")

    def test_three_dimensional_rejected(self, tmp_path):
        write_embedding_csv(np.zeros((4, 3)), tmp_path / "e.csv")
        assert main(["plot", str(tmp_path / "e.csv"), "--out", str(tmp_path / "p.svg")]) == 2

    def test_empty(self, tmp_path):
        (tmp_path / "e.csv").write_text("")
        assert main(["plot", str(tmp_path / "e.csv"), "--out", str(tmp_path / "p.svg")]) == 2


def test_module_entry_point():
    import subprocess
    import sys

    out = subprocess.run([sys.executable, "-m", "gsmap", "--help"], capture_output=True, text=True)
    assert out.returncode == 0 and "embed" in out.stdout
