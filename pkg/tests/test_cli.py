import json

import numpy as np
import pytest

from lutpack.cli import EXIT_OK, EXIT_USAGE, EXIT_VERIFY_FAIL, main
from lutpack.mask import mask_to_text
from lutpack.tableio import table_to_text
from conftest import (
    FAMILY_GEN,
    FAMILY_S0_STORED,
    FAMILY_S1,
    FAMILY_S3,
    random_mask,
    random_table,
)
from lutpack import CareMask, Table


@pytest.fixture
def family_files(tmp_path):
    values = FAMILY_S0_STORED + FAMILY_S1 + FAMILY_GEN + FAMILY_S3
    table_path = tmp_path / "family.tbl"
    table_path.write_text(table_to_text(Table(4, 4, values)))
    flags = np.ones(16, dtype=bool)
    flags[1] = False
    mask_path = tmp_path / "family.mask"
    mask_path.write_text(mask_to_text(CareMask(flags)))
    return table_path, mask_path


class TestCompress:
    def test_writes_three_outputs(self, tmp_path, family_files, capsys):
        table_path, mask_path = family_files
        out = tmp_path / "out"
        rc = main([
            "compress", "--table", str(table_path), "--mask", str(mask_path),
            "--out", str(out),
        ])
        assert rc == EXIT_OK
        assert (out / "family.v").exists()
        assert (out / "family.plan").exists()
        assert (out / "family.report").exists()
        stdout = capsys.readouterr().out
        assert "chosen plan:" in stdout
        assert "module family (" in (out / "family.v").read_text()

    def test_json_report(self, tmp_path, family_files, capsys):
        table_path, mask_path = family_files
        rc = main([
            "compress", "--table", str(table_path), "--mask", str(mask_path),
            "--out", str(tmp_path / "out"), "--json",
        ])
        assert rc == EXIT_OK
        data = json.loads(capsys.readouterr().out)
        assert data["chosen"] == "w_lb_in=2,w_lb_out=0"
        chosen = [r for r in data["rows"] if r["label"] == data["chosen"]][0]
        assert chosen["bits_total"] == 44
        assert (chosen["ust_before"], chosen["ust_after"]) == (2, 1)

    def test_custom_name(self, tmp_path, family_files):
        table_path, _ = family_files
        out = tmp_path / "out"
        rc = main([
            "compress", "--table", str(table_path), "--out", str(out),
            "--name", "my_rom",
        ])
        assert rc == EXIT_OK
        assert (out / "my_rom.v").exists()

    def test_missing_table_file(self, tmp_path, capsys):
        rc = main([
            "compress", "--table", str(tmp_path / "nope.tbl"),
            "--out", str(tmp_path),
        ])
        assert rc == EXIT_USAGE
        assert "error:" in capsys.readouterr().err

    def test_mask_size_mismatch(self, tmp_path, family_files, capsys):
        table_path, _ = family_files
        bad_mask = tmp_path / "bad.mask"
        bad_mask.write_text("1\n0\n1\n0\n")
        rc = main([
            "compress", "--table", str(table_path), "--mask", str(bad_mask),
            "--out", str(tmp_path),
        ])
        assert rc == EXIT_USAGE

    def test_w_in_cap(self, tmp_path, capsys):
        rng = np.random.default_rng(59)
        table_path = tmp_path / "big.tbl"
        table_path.write_text(table_to_text(random_table(rng, 7, 4)))
        rc = main([
            "compress", "--table", str(table_path), "--out", str(tmp_path),
            "--max-win", "6",
        ])
        assert rc == EXIT_USAGE

    def test_tsize_flags_must_pair(self, tmp_path, family_files):
        table_path, _ = family_files
        rc = main([
            "compress", "--table", str(table_path), "--out", str(tmp_path),
            "--min-tsize", "2",
        ])
        assert rc == EXIT_USAGE


class TestMask:
    def test_build_mask_from_observations(self, tmp_path, capsys):
        obs = tmp_path / "seen.txt"
        obs.write_text("0x0\n0x3\n0011\n0x7\n")
        out = tmp_path / "m.mask"
        rc = main(["mask", "--obs", str(obs), "--win", "4", "--out", str(out)])
        assert rc == EXIT_OK
        text = out.read_text()
        flags = [c == "1" for c in text.split()]
        assert len(flags) == 16
        assert [i for i, f in enumerate(flags) if f] == [0, 3, 7]
        assert "care fraction 0.1875" in capsys.readouterr().out

    def test_bad_observation_line(self, tmp_path, capsys):
        obs = tmp_path / "seen.txt"
        obs.write_text("0x0\nbananas\n")
        rc = main(["mask", "--obs", str(obs), "--win", "4",
                   "--out", str(tmp_path / "m.mask")])
        assert rc == EXIT_USAGE


class TestVerify:
    def test_pass_and_fail(self, tmp_path, family_files, capsys):
        table_path, mask_path = family_files
        out = tmp_path / "out"
        assert main([
            "compress", "--table", str(table_path), "--mask", str(mask_path),
            "--out", str(out),
        ]) == EXIT_OK
        capsys.readouterr()  # discard the compress report
        plan = out / "family.plan"
        rc = main([
            "verify", "--table", str(table_path), "--mask", str(mask_path),
            "--plan", str(plan), "--json",
        ])
        assert rc == EXIT_OK
        data = json.loads(capsys.readouterr().out)
        assert data["ok"] is True
        assert data["changed_dontcares"] == 1

        # without the mask the rewritten entry becomes a care mismatch
        rc = main([
            "verify", "--table", str(table_path), "--plan", str(plan),
        ])
        assert rc == EXIT_VERIFY_FAIL
        assert "FAIL: 1 care mismatches" in capsys.readouterr().out

    def test_size_mismatch(self, tmp_path, family_files, capsys):
        table_path, mask_path = family_files
        out = tmp_path / "out"
        main(["compress", "--table", str(table_path), "--mask",
              str(mask_path), "--out", str(out)])
        other = tmp_path / "other.tbl"
        other.write_text(table_to_text(Table(3, 4, list(range(8)))))
        rc = main([
            "verify", "--table", str(other),
            "--plan", str(out / "family.plan"),
        ])
        assert rc == EXIT_USAGE

    def test_garbage_plan_file(self, tmp_path, family_files):
        table_path, _ = family_files
        bad = tmp_path / "bad.plan"
        bad.write_text("garbage\n")
        rc = main(["verify", "--table", str(table_path), "--plan", str(bad)])
        assert rc == EXIT_USAGE


class TestBatch:
    def make_corpus(self, tmp_path, count=5):
        rng = np.random.default_rng(61)
        d = tmp_path / "corpus"
        d.mkdir()
        for i in range(count):
            table = random_table(rng, 6, 4)
            (d / f"t{i}.tbl").write_text(table_to_text(table))
            if i % 2 == 0:
                (d / f"t{i}.mask").write_text(
                    mask_to_text(random_mask(rng, 6, 0.5))
                )
        return d

    def test_batch_outputs_every_table(self, tmp_path, capsys):
        d = self.make_corpus(tmp_path)
        out = tmp_path / "out"
        rc = main(["batch", "--dir", str(d), "--out", str(out)])
        assert rc == EXIT_OK
        for i in range(5):
            assert (out / f"t{i}.v").exists()
            assert (out / f"t{i}.plan").exists()
        stdout = capsys.readouterr().out
        assert "batch: 5 ok, 0 failed" in stdout
        assert "total bits:" in stdout

    def test_batch_compare_json(self, tmp_path, capsys):
        d = self.make_corpus(tmp_path)
        rc = main([
            "batch", "--dir", str(d), "--out", str(tmp_path / "out"),
            "--compare", "--json",
        ])
        assert rc == EXIT_OK
        data = json.loads(capsys.readouterr().out)
        assert data["tables"] == 5
        assert data["failed"] == 0
        assert "median_bits_reduction_pct" in data
        assert "geomean_bits_reduction_pct" in data
        for r in data["results"]:
            assert r["bits"] <= r["bits_allcare"]

    def test_batch_parallel_matches_serial(self, tmp_path, capsys):
        d = self.make_corpus(tmp_path)
        rc = main(["batch", "--dir", str(d), "--out",
                   str(tmp_path / "o1"), "--json"])
        assert rc == EXIT_OK
        serial = json.loads(capsys.readouterr().out)
        rc = main(["batch", "--dir", str(d), "--out",
                   str(tmp_path / "o2"), "--json", "--threads", "2"])
        assert rc == EXIT_OK
        parallel = json.loads(capsys.readouterr().out)
        assert serial["results"] == parallel["results"]
        assert (tmp_path / "o1" / "t3.plan").read_text() == (
            tmp_path / "o2" / "t3.plan"
        ).read_text()

    def test_batch_empty_dir(self, tmp_path, capsys):
        d = tmp_path / "empty"
        d.mkdir()
        rc = main(["batch", "--dir", str(d), "--out", str(tmp_path / "out")])
        assert rc == EXIT_USAGE
        assert "no tables found" in capsys.readouterr().err

    def test_batch_reports_per_table_failure(self, tmp_path, capsys):
        d = self.make_corpus(tmp_path, count=2)
        (d / "zz_broken.tbl").write_text("not hex at all\n")
        rc = main(["batch", "--dir", str(d), "--out", str(tmp_path / "out")])
        assert rc == EXIT_USAGE
        stdout = capsys.readouterr().out
        assert "batch: 2 ok, 1 failed" in stdout
        assert "zz_broken: FAILED" in stdout
