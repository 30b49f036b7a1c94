import hashlib
import json
import subprocess
import sys

import pytest

from kcqa import parse_mrqa, write_annotations, write_mrqa
from kcqa.cli import main

from conftest import build_corpus


@pytest.fixture
def workdir(tmp_path):
    """Dataset + annotations + catalog files for a 25-instance corpus."""
    dataset, annotations, catalog = build_corpus(25, entities_per_type=12, seed=4)
    dataset_path = tmp_path / "dataset.jsonl.gz"
    annotations_path = tmp_path / "annotations.jsonl"
    catalog_path = tmp_path / "catalog.jsonl"
    write_mrqa(dataset, dataset_path)
    write_annotations(annotations, annotations_path)
    with open(catalog_path, "w") as fh:
        for entity in catalog.entities:
            fh.write(json.dumps({
                "id": entity.id, "name": entity.name, "type": entity.entity_type.value,
                "popularity": entity.popularity, "aliases": list(entity.aliases),
            }) + "\n")
    return tmp_path, dataset, annotations, catalog


def run_cli(*args) -> int:
    return main([str(a) for a in args])


def sha256(path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def predictions_from_dataset(path, out_path, text_fn):
    dataset = parse_mrqa(path)
    preds = {inst.qid: text_fn(inst) for inst in dataset.instances}
    out_path.write_text(json.dumps(preds))


class TestSubstituteCommand:
    def test_corpus_substitution_writes_outputs(self, workdir):
        tmp, *_ = workdir
        code = run_cli(
            "substitute", "--policy", "corpus",
            "--input", tmp / "dataset.jsonl.gz",
            "--annotations", tmp / "annotations.jsonl",
            "--seed", "7",
            "--out", tmp / "sub.jsonl.gz",
            "--records", tmp / "records.jsonl",
            "--manifest", tmp / "manifest.json",
        )
        assert code == 0
        assert (tmp / "sub.jsonl.gz").exists()
        assert (tmp / "records.jsonl").exists()
        manifest = json.loads((tmp / "manifest.json").read_text())
        assert manifest["global_seed"] == 7
        assert manifest["n_substituted"] == 25

    def test_same_seed_byte_identical(self, workdir):
        tmp, *_ = workdir
        digests = []
        for suffix in ("a", "b"):
            run_cli(
                "substitute", "--policy", "corpus",
                "--input", tmp / "dataset.jsonl.gz",
                "--annotations", tmp / "annotations.jsonl",
                "--seed", "7",
                "--out", tmp / f"sub-{suffix}.jsonl.gz",
                "--records", tmp / f"records-{suffix}.jsonl",
            )
            digests.append((sha256(tmp / f"sub-{suffix}.jsonl.gz"),
                            sha256(tmp / f"records-{suffix}.jsonl")))
        assert digests[0] == digests[1]

    def test_parallelism_does_not_change_bytes(self, workdir):
        tmp, *_ = workdir
        digests = []
        for workers in ("1", "8"):
            run_cli(
                "substitute", "--policy", "corpus",
                "--input", tmp / "dataset.jsonl.gz",
                "--annotations", tmp / "annotations.jsonl",
                "--seed", "7", "--parallelism", workers,
                "--out", tmp / f"sub-p{workers}.jsonl.gz",
                "--records", tmp / f"records-p{workers}.jsonl",
            )
            digests.append((sha256(tmp / f"sub-p{workers}.jsonl.gz"),
                            sha256(tmp / f"records-p{workers}.jsonl")))
        assert digests[0] == digests[1]

    def test_popularity_requires_bounds(self, workdir):
        tmp, *_ = workdir
        with pytest.raises(SystemExit) as excinfo:
            run_cli(
                "substitute", "--policy", "popularity",
                "--input", tmp / "dataset.jsonl.gz",
                "--annotations", tmp / "annotations.jsonl",
                "--catalog", tmp / "catalog.jsonl",
                "--seed", "7",
                "--out", tmp / "x.jsonl", "--records", tmp / "r.jsonl",
            )
        assert excinfo.value.code == 2

    def test_policy_flag_mismatch_is_usage_error(self, workdir):
        tmp, *_ = workdir
        with pytest.raises(SystemExit) as excinfo:
            run_cli(
                "substitute", "--policy", "corpus", "--pop-lower", "10",
                "--input", tmp / "dataset.jsonl.gz",
                "--annotations", tmp / "annotations.jsonl",
                "--seed", "7",
                "--out", tmp / "x.jsonl", "--records", tmp / "r.jsonl",
            )
        assert excinfo.value.code == 2

    def test_missing_input_is_data_error(self, workdir):
        tmp, *_ = workdir
        code = run_cli(
            "substitute", "--policy", "corpus",
            "--input", tmp / "nope.jsonl",
            "--annotations", tmp / "annotations.jsonl",
            "--seed", "7",
            "--out", tmp / "x.jsonl", "--records", tmp / "r.jsonl",
        )
        assert code == 1


class TestPipeline:
    def test_filter_substitute_evaluate_report(self, workdir):
        tmp, *_ = workdir
        assert run_cli(
            "filter",
            "--input", tmp / "dataset.jsonl.gz",
            "--annotations", tmp / "annotations.jsonl",
            "--out", tmp / "filtered.jsonl.gz",
            "--skipped", tmp / "skipped.jsonl",
        ) == 0
        assert run_cli(
            "substitute", "--policy", "corpus",
            "--input", tmp / "filtered.jsonl.gz",
            "--annotations", tmp / "annotations.jsonl",
            "--seed", "11",
            "--out", tmp / "sub.jsonl.gz",
            "--records", tmp / "records.jsonl",
        ) == 0

        predictions_from_dataset(
            tmp / "filtered.jsonl.gz", tmp / "orig-preds.json",
            lambda inst: inst.gold_answers[0],
        )
        predictions_from_dataset(
            tmp / "sub.jsonl.gz", tmp / "sub-preds.json",
            lambda inst: inst.gold_answers[0],
        )
        assert run_cli(
            "evaluate",
            "--dataset", tmp / "filtered.jsonl.gz",
            "--records", tmp / "records.jsonl",
            "--original-preds", tmp / "orig-preds.json",
            "--substituted-preds", tmp / "sub-preds.json",
            "--out", tmp / "report.json",
        ) == 0
        report = json.loads((tmp / "report.json").read_text())
        assert report["memorization_ratio"] == 0.0
        assert report["percent"]["substitute"] == 100.0

        assert run_cli(
            "report",
            "--report", tmp / "report.json",
            "--out", tmp / "report.txt",
            "--tsv", tmp / "report.tsv",
            "--figures", tmp / "figures",
        ) == 0
        assert "M_R" in (tmp / "report.txt").read_text()
        assert (tmp / "report.tsv").read_text().startswith("set\t")
        assert (tmp / "figures" / "categories.png").stat().st_size > 0

    def test_annotate_heuristic(self, tmp_path):
        from kcqa import Dataset, write_mrqa
        from conftest import make_instance

        dataset = Dataset(header={}, instances=[
            make_instance("q1", "April 6, 1917", "War came on April 6, 1917 to stay."),
            make_instance("q2", "3.2 million", "There were 3.2 million farmers."),
            make_instance("q3", "running quickly", "He was running quickly."),
        ])
        write_mrqa(dataset, tmp_path / "ds.jsonl")
        assert run_cli(
            "annotate", "--input", tmp_path / "ds.jsonl", "--out", tmp_path / "ann.jsonl"
        ) == 0
        lines = [json.loads(l) for l in (tmp_path / "ann.jsonl").read_text().splitlines()]
        assert {l["qid"]: l["type"] for l in lines} == {"q1": "DAT", "q2": "NUM"}
        assert all(l["source"] == "heuristic" for l in lines)

    def test_split_overlap(self, workdir):
        tmp, dataset, *_ = workdir
        half = len(dataset.instances) // 2
        from kcqa import Dataset

        write_mrqa(Dataset(instances=dataset.instances[:half]), tmp / "train.jsonl")
        write_mrqa(Dataset(instances=dataset.instances[half:]), tmp / "dev.jsonl")
        assert run_cli(
            "split-overlap",
            "--dev", tmp / "dev.jsonl", "--train", tmp / "train.jsonl",
            "--out-ao", tmp / "ao.jsonl", "--out-nao", tmp / "nao.jsonl",
        ) == 0
        ao = parse_mrqa(tmp / "ao.jsonl")
        nao = parse_mrqa(tmp / "nao.jsonl")
        assert len(ao) + len(nao) == len(dataset.instances[half:])

    def test_popularity_suite(self, workdir):
        tmp, *_ = workdir
        assert run_cli(
            "popularity-suite",
            "--input", tmp / "dataset.jsonl.gz",
            "--annotations", tmp / "annotations.jsonl",
            "--catalog", tmp / "catalog.jsonl",
            "--entity-type", "PER", "--buckets", "5", "--seed", "3",
            "--out-dir", tmp / "suite",
        ) == 0
        manifest = json.loads((tmp / "suite" / "manifest.json").read_text())
        assert manifest["global_seed"] == 3
        assert len(manifest["buckets"]) == 5
        for i in range(5):
            assert (tmp / "suite" / f"bucket-{i}.jsonl.gz").exists()
            assert (tmp / "suite" / f"bucket-{i}.records.jsonl").exists()

    def test_augment_and_refusal_on_augmented_input(self, workdir):
        tmp, *_ = workdir
        assert run_cli(
            "augment",
            "--input", tmp / "dataset.jsonl.gz",
            "--annotations", tmp / "annotations.jsonl",
            "--seed", "5",
            "--out", tmp / "mixed.jsonl.gz",
            "--records", tmp / "mix-records.jsonl",
            "--manifest", tmp / "mix-manifest.json",
        ) == 0
        manifest = json.loads((tmp / "mix-manifest.json").read_text())
        assert manifest["global_seed"] == 5
        assert manifest["n_original"] == 25
        assert manifest["n_substituted"] == 25  # every context contains its answer

        # feeding the mixed output back in is refused without --force
        code = run_cli(
            "augment",
            "--input", tmp / "mixed.jsonl.gz",
            "--annotations", tmp / "annotations.jsonl",
            "--seed", "5",
            "--out", tmp / "mixed2.jsonl.gz",
            "--records", tmp / "r2.jsonl",
            "--manifest", tmp / "m2.json",
        )
        assert code == 1

    def test_evaluate_stratified_by_type_pair(self, workdir):
        tmp, *_ = workdir
        assert run_cli(
            "substitute", "--policy", "type-swap",
            "--input", tmp / "dataset.jsonl.gz",
            "--annotations", tmp / "annotations.jsonl",
            "--seed", "13",
            "--out", tmp / "swapped.jsonl.gz",
            "--records", tmp / "swap-records.jsonl",
        ) == 0
        predictions_from_dataset(
            tmp / "dataset.jsonl.gz", tmp / "op.json", lambda i: i.gold_answers[0]
        )
        predictions_from_dataset(
            tmp / "swapped.jsonl.gz", tmp / "sp.json", lambda i: i.gold_answers[0]
        )
        assert run_cli(
            "evaluate",
            "--dataset", tmp / "dataset.jsonl.gz",
            "--records", tmp / "swap-records.jsonl",
            "--original-preds", tmp / "op.json",
            "--substituted-preds", tmp / "sp.json",
            "--stratify", "type-pair",
            "--out", tmp / "swap-report.json",
        ) == 0
        report = json.loads((tmp / "swap-report.json").read_text())
        assert report["strata"]
        for key in report["strata"]:
            orig, sub = key.split("->")
            assert orig != sub
        assert run_cli(
            "report", "--report", tmp / "swap-report.json",
            "--out", tmp / "swap-report.txt",
            "--figures", tmp / "swap-figures",
        ) == 0
        assert (tmp / "swap-figures" / "typeswap_matrix.png").stat().st_size > 0

    def test_evaluate_samples_other_predictions(self, workdir):
        tmp, *_ = workdir
        run_cli(
            "substitute", "--policy", "corpus",
            "--input", tmp / "dataset.jsonl.gz",
            "--annotations", tmp / "annotations.jsonl",
            "--seed", "11",
            "--out", tmp / "sub.jsonl.gz",
            "--records", tmp / "records.jsonl",
        )
        predictions_from_dataset(
            tmp / "dataset.jsonl.gz", tmp / "op.json", lambda i: i.gold_answers[0]
        )
        # the reader answers nonsense on the substituted set: everything is Other
        predictions_from_dataset(
            tmp / "sub.jsonl.gz", tmp / "sp.json", lambda i: "mumbling"
        )
        assert run_cli(
            "evaluate",
            "--dataset", tmp / "dataset.jsonl.gz",
            "--records", tmp / "records.jsonl",
            "--original-preds", tmp / "op.json",
            "--substituted-preds", tmp / "sp.json",
            "--out", tmp / "r.json",
            "--sample-other", tmp / "others.jsonl",
            "--sample-other-count", "10",
            "--substituted", tmp / "sub.jsonl.gz",
            "--seed", "2",
        ) == 0
        rows = [json.loads(l) for l in (tmp / "others.jsonl").read_text().splitlines()]
        assert len(rows) == 10
        assert all(row["prediction"] == "mumbling" for row in rows)
        assert all(row["substitute_answer"] in row["context"] for row in rows)

    def test_evaluate_sample_other_requires_companions(self, workdir):
        tmp, *_ = workdir
        with pytest.raises(SystemExit) as excinfo:
            run_cli(
                "evaluate",
                "--dataset", tmp / "dataset.jsonl.gz",
                "--records", tmp / "records.jsonl",
                "--original-preds", tmp / "op.json",
                "--substituted-preds", tmp / "sp.json",
                "--out", tmp / "r.json",
                "--sample-other", tmp / "others.jsonl",
            )
        assert excinfo.value.code == 2


class TestConsoleEntry:
    def test_module_invocation(self, workdir):
        tmp, *_ = workdir
        proc = subprocess.run(
            [sys.executable, "-m", "kcqa", "substitute", "--policy", "corpus",
             "--input", str(tmp / "dataset.jsonl.gz"),
             "--annotations", str(tmp / "annotations.jsonl"),
             "--seed", "7",
             "--out", str(tmp / "sub-proc.jsonl.gz"),
             "--records", str(tmp / "records-proc.jsonl")],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0, proc.stderr
        assert proc.stdout == ""  # data goes to files, diagnostics to stderr
        assert "substituted" in proc.stderr

    def test_usage_error_exit_code(self):
        proc = subprocess.run(
            [sys.executable, "-m", "kcqa", "substitute", "--policy", "bogus"],
            capture_output=True, text=True,
        )
        assert proc.returncode == 2
