import subprocess
import sys

import numpy as np
import pytest

from conftest import random_dataset
from treelab.cli import (
    EXIT_BAD_PARAMS,
    EXIT_DATASET_ERROR,
    EXIT_OUTPUT_ERROR,
    EXIT_SCHEMA_MISMATCH,
    EXIT_TRACE_GUARDRAIL,
    REPORT_COLUMNS,
    main,
    parse_fold_spec,
)
from treelab.cli import CliError


def write_dataset_csv(path, data, with_labels=True):
    header = list(data.attr_names) + ([data.label_name] if with_labels else [])
    lines = [",".join(header)]
    for i in range(data.n_rows):
        cells = [repr(float(v)) for v in data.values[i]]
        if with_labels:
            cells.append(data.class_names[data.labels[i]])
        lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n")
    return path


@pytest.fixture()
def toy_csv(tmp_path):
    rng = np.random.default_rng(2024)
    data = random_dataset(rng, 8, 2, 0, 2)
    return write_dataset_csv(tmp_path / "toy.csv", data)


@pytest.fixture()
def train_test_csvs(tmp_path):
    rng = np.random.default_rng(77)
    data = random_dataset(rng, 30, 2, 1, 2)
    train = write_dataset_csv(tmp_path / "train.csv", data)
    # test file: first 6 rows, no label column
    header = ",".join(data.attr_names)
    lines = [header] + [
        ",".join(repr(float(v)) for v in data.values[i]) for i in range(6)
    ]
    test = tmp_path / "test.csv"
    test.write_text("\n".join(lines) + "\n")
    return train, test


def test_benchmark_defaults_match_protocol():
    # b=100, c=5, d=20 are the benchmark defaults.
    parser = __import__("treelab.cli", fromlist=["build_parser"]).build_parser()
    args = parser.parse_args(
        ["benchmark", "--dataset", "x.csv", "--folds", "10", "--out", "r.csv"]
    )
    assert (args.bootstraps, args.min_count, args.max_depth) == (100, 5, 20)
    assert args.jobs == 1 and args.timing == "cpu" and args.seed == 0


def test_trace_golden_lines(tmp_path):
    # toy 4-row set, test rows on both sides of the 2.5 split
    train = tmp_path / "train.csv"
    train.write_text("a,label\n1,A\n2,A\n3,B\n4,B\n")
    test = tmp_path / "test.csv"
    test.write_text("a\n1\n4\n")
    out = tmp_path / "trace.txt"
    from conftest import find_full_coverage_seed

    seed = find_full_coverage_seed(4)
    code = main([
        "trace", "--train", str(train), "--test", str(test),
        "--algorithm", "batched", "--min-count", "1", "--seed", str(seed),
        "--out", str(out),
    ])
    assert code == 0
    assert out.read_text().splitlines() == [
        "# depth\tpath\ttrain\ttest\trow\taction",
        "0\t-\t4\t2\t-\tsplit 0 le 2.5",
        "1\ti\t2\t1\t-\tleaf 1",
        "1\tv\t2\t1\t-\tleaf 0",
    ]


class TestFoldSpec:
    def test_single_and_list(self):
        assert parse_fold_spec("10", 100) == [10]
        assert parse_fold_spec("2,5,10", 100) == [2, 5, 10]

    def test_inclusive_range(self):
        assert parse_fold_spec("10:40:10", 100) == [10, 20, 30, 40]

    def test_mixed(self):
        assert parse_fold_spec("2,10:20:5", 100) == [2, 10, 15, 20]

    def test_out_of_range(self):
        with pytest.raises(CliError):
            parse_fold_spec("150", 100)
        with pytest.raises(CliError):
            parse_fold_spec("1", 100)

    def test_garbage(self):
        with pytest.raises(CliError):
            parse_fold_spec("ten", 100)


class TestBenchmark:
    def test_writes_rows_and_identical_accuracy(self, toy_csv, tmp_path):
        out = tmp_path / "report.csv"
        code = main([
            "benchmark", "--dataset", str(toy_csv), "--folds", "2",
            "--bootstraps", "1", "--min-count", "2", "--seed", "3",
            "--out", str(out),
        ])
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == (
            "dataset,algorithm,k,b,c,d,seed,cpu_seconds,nodes_explored,"
            "peak_stack_words,model_words,accuracy"
        )
        assert lines[0] == ",".join(REPORT_COLUMNS)
        assert len(lines) == 4  # header + one row per algorithm
        accuracies = {line.split(",")[-1] for line in lines[1:]}
        assert len(accuracies) == 1
        tags = [line.split(",")[1] for line in lines[1:]]
        assert tags == ["DT", "L-DT", "BL-DT"]
        plot = tmp_path / "report_plot.csv"
        assert plot.exists()
        assert len(plot.read_text().splitlines()) == 4

    def test_node_count_directions_at_ten_folds(self, tmp_path):
        rng = np.random.default_rng(404)
        data = random_dataset(rng, 120, 4, 0, 2)
        csv_path = write_dataset_csv(tmp_path / "mid.csv", data)
        out = tmp_path / "mid_report.csv"
        code = main([
            "benchmark", "--dataset", str(csv_path), "--folds", "10",
            "--bootstraps", "2", "--seed", "5", "--out", str(out),
        ])
        assert code == 0
        rows = [line.split(",") for line in out.read_text().splitlines()[1:]]
        nodes = {row[1]: int(row[8]) for row in rows}
        assert nodes["BL-DT"] < nodes["DT"]
        assert nodes["L-DT"] > nodes["DT"]

    def test_breast_node_directions_at_10_and_40_folds(self, breast_csv, tmp_path):
        # per-bootstrap node orderings on the reference dataset: the batched
        # pass explores less than the eager build, the per-row walks more
        out = tmp_path / "breast_report.csv"
        code = main([
            "benchmark", "--dataset", str(breast_csv), "--folds", "10,40",
            "--bootstraps", "1", "--seed", "17", "--out", str(out),
        ])
        assert code == 0
        rows = [line.split(",") for line in out.read_text().splitlines()[1:]]
        by_k = {}
        for row in rows:
            by_k.setdefault(int(row[2]), {})[row[1]] = int(row[8])
        for k in (10, 40):
            assert by_k[k]["BL-DT"] < by_k[k]["DT"]
        assert by_k[10]["L-DT"] > by_k[10]["DT"]

    def test_loocv_lazy_equals_batched(self, tmp_path):
        rng = np.random.default_rng(88)
        data = random_dataset(rng, 30, 2, 1, 2)
        csv_path = write_dataset_csv(tmp_path / "loo.csv", data)
        out = tmp_path / "loo_report.csv"
        code = main([
            "benchmark", "--dataset", str(csv_path), "--folds", "30",
            "--algorithms", "lazy,batched", "--bootstraps", "2",
            "--seed", "1", "--out", str(out),
        ])
        assert code == 0
        rows = [line.split(",") for line in out.read_text().splitlines()[1:]]
        nodes = {row[1]: int(row[8]) for row in rows}
        assert nodes["L-DT"] == nodes["BL-DT"]

    def test_deterministic_reports_with_timing_off(self, toy_csv, tmp_path):
        args = [
            "benchmark", "--dataset", str(toy_csv), "--folds", "2,3",
            "--bootstraps", "2", "--min-count", "2", "--seed", "11",
            "--jobs", "1", "--timing", "off",
        ]
        out_a, out_b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(args + ["--out", str(out_a)]) == 0
        assert main(args + ["--out", str(out_b)]) == 0
        assert out_a.read_bytes() == out_b.read_bytes()
        plot_a = tmp_path / "a_plot.csv"
        plot_b = tmp_path / "b_plot.csv"
        assert plot_a.read_bytes() == plot_b.read_bytes()

    def test_jobs_do_not_change_results(self, toy_csv, tmp_path):
        base = [
            "benchmark", "--dataset", str(toy_csv), "--folds", "3",
            "--bootstraps", "1", "--min-count", "2", "--seed", "4",
            "--timing", "off",
        ]
        out_serial = tmp_path / "serial.csv"
        out_parallel = tmp_path / "parallel.csv"
        assert main(base + ["--out", str(out_serial)]) == 0
        assert main(base + ["--jobs", "2", "--out", str(out_parallel)]) == 0
        assert out_serial.read_bytes() == out_parallel.read_bytes()

    def test_env_seed_overrides_flag(self, toy_csv, tmp_path, monkeypatch):
        out_env = tmp_path / "env.csv"
        out_flag = tmp_path / "flag.csv"
        args = [
            "benchmark", "--dataset", str(toy_csv), "--folds", "2",
            "--bootstraps", "1", "--min-count", "2", "--timing", "off",
        ]
        monkeypatch.setenv("TREELAB_SEED", "9090")
        assert main(args + ["--seed", "1", "--out", str(out_env)]) == 0
        monkeypatch.delenv("TREELAB_SEED")
        assert main(args + ["--seed", "9090", "--out", str(out_flag)]) == 0
        assert out_env.read_text() == out_flag.read_text()

    def test_exit_codes(self, toy_csv, tmp_path):
        out = tmp_path / "x.csv"
        assert main([
            "benchmark", "--dataset", str(tmp_path / "absent.csv"),
            "--folds", "2", "--out", str(out),
        ]) == EXIT_DATASET_ERROR
        assert main([
            "benchmark", "--dataset", str(toy_csv), "--folds", "9999",
            "--out", str(out),
        ]) == EXIT_BAD_PARAMS
        assert main([
            "benchmark", "--dataset", str(toy_csv), "--folds", "2",
            "--bootstraps", "1", "--out", str(tmp_path / "nodir" / "x.csv"),
        ]) == EXIT_OUTPUT_ERROR


class TestPredict:
    def test_probabilities_quantized_and_identical(self, train_test_csvs, tmp_path):
        train, test = train_test_csvs
        outputs = {}
        for algorithm in ("dt", "batched", "lazy"):
            out = tmp_path / f"pred_{algorithm}.csv"
            code = main([
                "predict", "--train", str(train), "--test", str(test),
                "--algorithm", algorithm, "--bootstraps", "4",
                "--min-count", "2", "--seed", "6", "--out", str(out),
            ])
            assert code == 0
            outputs[algorithm] = out.read_bytes()
        assert outputs["dt"] == outputs["batched"] == outputs["lazy"]
        lines = outputs["dt"].decode().splitlines()
        assert lines[0].startswith("prob_")
        for line in lines[1:]:
            *probs, _ = line.split(",")
            for p in probs:
                assert float(p) in {0.0, 0.25, 0.5, 0.75, 1.0}

    def test_pure_training_set(self, tmp_path):
        train = tmp_path / "pure.csv"
        train.write_text("a,label\n1,x\n2,x\n3,x\n4,y\n")
        test = tmp_path / "t.csv"
        test.write_text("a\n1\n9\n")
        out = tmp_path / "pred.csv"
        # min-count 5 > 3 rows: every tree is a single leaf on the majority
        code = main([
            "predict", "--train", str(train), "--test", str(test),
            "--bootstraps", "1", "--seed", "12", "--out", str(out),
        ])
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "prob_x,prob_y,prediction"

    def test_schema_mismatch(self, train_test_csvs, tmp_path):
        train, _ = train_test_csvs
        bad = tmp_path / "bad.csv"
        bad.write_text("only_one\n1\n")
        out = tmp_path / "pred.csv"
        assert main([
            "predict", "--train", str(train), "--test", str(bad),
            "--out", str(out),
        ]) == EXIT_SCHEMA_MISMATCH


class TestTrace:
    def test_batched_visits_nodes_once(self, train_test_csvs, tmp_path):
        train, test = train_test_csvs
        out = tmp_path / "trace.txt"
        code = main([
            "trace", "--train", str(train), "--test", str(test),
            "--algorithm", "batched", "--min-count", "2", "--seed", "2",
            "--out", str(out),
        ])
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0].startswith("#")
        paths = [line.split("\t")[1] for line in lines[1:]]
        assert len(paths) == len(set(paths))

    def test_lazy_repeats_shared_prefix(self, train_test_csvs, tmp_path):
        train, test = train_test_csvs
        out = tmp_path / "trace_lazy.txt"
        code = main([
            "trace", "--train", str(train), "--test", str(test),
            "--algorithm", "lazy", "--min-count", "2", "--seed", "2",
            "--out", str(out),
        ])
        assert code == 0
        lines = out.read_text().splitlines()[1:]
        roots = [line for line in lines if line.split("\t")[1] == "-"]
        assert len(roots) == 6  # one root visit per test row

    def test_eager_trace_is_full_preorder_and_test_independent(
        self, train_test_csvs, tmp_path
    ):
        train, test = train_test_csvs
        single = tmp_path / "single.csv"
        with open(test) as handle:
            lines = handle.read().splitlines()
        single.write_text("\n".join(lines[:2]) + "\n")
        out_full = tmp_path / "trace_full.txt"
        out_single = tmp_path / "trace_single.txt"
        for test_path, out in ((test, out_full), (single, out_single)):
            assert main([
                "trace", "--train", str(train), "--test", str(test_path),
                "--algorithm", "dt", "--min-count", "2", "--seed", "2",
                "--out", str(out),
            ]) == 0
        assert out_full.read_bytes() == out_single.read_bytes()

    def test_guardrail(self, tmp_path):
        rng = np.random.default_rng(3)
        data = random_dataset(rng, 80, 3, 0, 2)
        train = write_dataset_csv(tmp_path / "big.csv", data)
        test = tmp_path / "bigtest.csv"
        header = ",".join(data.attr_names)
        rows = [",".join(repr(float(v)) for v in data.values[i]) for i in range(80)]
        test.write_text("\n".join([header] + rows) + "\n")
        out = tmp_path / "trace.txt"
        args = [
            "trace", "--train", str(train), "--test", str(test),
            "--algorithm", "lazy", "--bootstraps", "30", "--min-count", "2",
            "--seed", "1", "--out", str(out),
        ]
        assert main(args) == EXIT_TRACE_GUARDRAIL
        assert not out.exists()
        assert main(args + ["--force"]) == 0
        assert out.exists()


def test_module_entry_point(toy_csv, tmp_path):
    out = tmp_path / "smoke.csv"
    proc = subprocess.run(
        [sys.executable, "-m", "treelab", "benchmark", "--dataset", str(toy_csv),
         "--folds", "2", "--bootstraps", "1", "--min-count", "2",
         "--out", str(out)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert out.exists()
