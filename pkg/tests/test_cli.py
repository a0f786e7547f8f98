import csv
import json

from simplexfold import cli


def run(args):
    return cli.main(args)


class TestTables:
    def test_json_format(self, tmp_path):
        out = tmp_path / "t"
        assert run(["tables", "--out-dir", str(out), "--seed", "0"]) == 0
        files = sorted(p.name for p in out.glob("*.json"))
        assert "cheb_2.json" in files and "tri_f9.json" in files
        report = json.loads((out / "verification.json").read_text())
        assert report["failures"] == []
        assert (out / "manifest.json").exists()

    def test_csv_format_parseable(self, tmp_path):
        out = tmp_path / "t"
        assert run(["tables", "--out-dir", str(out), "--format", "csv",
                    "--seed", "0"]) == 0
        with open(out / "tri_f2.csv") as fh:
            rows = list(csv.DictReader(fh))
        assert {r["component"] for r in rows} == {"1", "2", "3"}

    def test_corrupted_catalog_nonzero_exit(self, tmp_path, monkeypatch):
        from simplexfold import folding
        good = folding.catalog_factors

        def corrupt(name):
            fac = good(name)
            if name == "tri:f2":
                return folding.FoldFactors(fac.l, fac.q,
                                           (fac.m[0] + 1,) + fac.m[1:])
            return fac

        monkeypatch.setattr(cli.folding, "catalog_factors", corrupt)
        assert run(["tables", "--out-dir", str(tmp_path / "t"),
                    "--seed", "0"]) == 1


class TestConeBuild:
    def test_small_cone(self, tmp_path):
        out = tmp_path / "cone.json"
        assert run(["cone-build", "--n", "1", "--k", "1", "--N", "0",
                    "--out", str(out), "--seed", "0"]) == 0
        data = json.loads(out.read_text())
        assert sorted(data["rays"]) == [["0/1", "1/1"], ["1/1", "-1/1"]]


class TestSolveFold:
    def test_builtin_interval(self, tmp_path):
        out = tmp_path / "sol.json"
        assert run(["solve-fold", "--builtin", "interval:2",
                    "--out", str(out), "--seed", "0"]) == 0
        data = json.loads(out.read_text())
        assert len(data["solutions"]) == 1
        assert data["solutions"][0]["params"]["m1"] == "4"

    def test_template_json(self, tmp_path):
        from simplexfold import folding
        tpl_path = tmp_path / "tpl.json"
        tpl_path.write_text(json.dumps(folding.interval_fold_template(1).to_json()))
        out = tmp_path / "sol.json"
        assert run(["solve-fold", "--template", str(tpl_path),
                    "--out", str(out), "--seed", "0"]) == 0
        data = json.loads(out.read_text())
        assert len(data["solutions"]) == 1


class TestVerifyFold:
    def test_catalog_ok(self, tmp_path):
        out = tmp_path / "rep.json"
        assert run(["verify-fold", "--catalog", "cheb:4", "--out", str(out)]) == 0
        data = json.loads(out.read_text())
        assert all(v["ok"] for v in data.values())

    def test_map_file(self, tmp_path):
        from simplexfold import folding
        mp = tmp_path / "map.json"
        mp.write_text(json.dumps(folding.catalog("tri:f2").to_json()))
        assert run(["verify-fold", "--map", str(mp)]) == 0


class TestFig6:
    def test_tiny_run(self, tmp_path):
        out = tmp_path / "f6"
        assert run(["fig6", "--count", "2", "--seed", "5", "--N", "2",
                    "--window", "200", "--burn-in", "20",
                    "--out-dir", str(out)]) == 0
        with open(out / "fig6.csv") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 3  # prepended fold row + 2 deformations
        assert rows[0]["index"] == "0" and rows[0]["l2_distance"] == "0"
        manifest = json.loads((out / "manifest.json").read_text())
        assert "period_boundary_convention" in manifest["metadata"]

    def test_deterministic_outputs(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            run(["fig6", "--count", "2", "--seed", "9", "--N", "2",
                 "--window", "100", "--burn-in", "10", "--out-dir", str(out)])
        assert (a / "fig6.csv").read_bytes() == (b / "fig6.csv").read_bytes()


class TestDeformSample:
    def test_sample_directory(self, tmp_path):
        from simplexfold import folding
        cone_path = tmp_path / "cone.json"
        run(["cone-build", "--n", "2", "--k", "2", "--N", "1",
             "--out", str(cone_path), "--seed", "0"])
        map_path = tmp_path / "f2.json"
        map_path.write_text(json.dumps(folding.catalog("tri:f2").to_json()))
        out = tmp_path / "defs"
        assert run(["deform-sample", "--map", str(map_path),
                    "--cone", str(cone_path), "--eps", "0.05",
                    "--count", "4", "--seed", "1", "--out", str(out)]) == 0
        from simplexfold import simplex
        from simplexfold.maps import SimplexMap
        f2 = folding.catalog("tri:f2")
        files = sorted(out.glob("deform_*.json"))
        assert len(files) == 4
        for p in files:
            g = SimplexMap.from_json(json.loads(p.read_text()))
            assert simplex.l2_distance(f2, g) <= 0.05 + 1e-9


class TestFig7:
    def test_small_run(self, tmp_path):
        out = tmp_path / "f7"
        assert run(["fig7", "--count", "10", "--seed", "4",
                    "--out-dir", str(out)]) == 0
        fit = json.loads((out / "fit.json").read_text())
        assert fit["low_sample"] is True
        assert fit["absorbed"] + fit["unabsorbed"] == 10
        with open(out / "fixation.csv") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == fit["absorbed"]
        assert {r["vertex"] for r in rows} <= {"0", "1", "2"}

    def test_seed_recorded_when_drawn(self, tmp_path):
        out = tmp_path / "f7"
        run(["fig7", "--count", "5", "--out-dir", str(out)])
        manifest = json.loads((out / "manifest.json").read_text())
        assert isinstance(manifest["master_seed"], int)


class TestMeasureTest:
    def test_orders(self, tmp_path):
        out = tmp_path / "ks.json"
        assert run(["measure-test", "--d", "1,2", "--samples", "20000",
                    "--seed", "3", "--out", str(out)]) == 0
        data = json.loads(out.read_text())
        assert set(data) == {"1", "2"}
        assert all(v < 0.05 for v in data.values())


class TestPreimageCount:
    def test_cheb3(self, tmp_path):
        out = tmp_path / "pre.json"
        assert run(["preimage-count", "--catalog", "cheb:3", "--target", "0.37",
                    "--seed", "2", "--out", str(out)]) == 0
        data = json.loads(out.read_text())
        assert data["count"] == 3


def test_manifest_hashes_outputs(tmp_path):
    import hashlib
    out = tmp_path / "t"
    run(["tables", "--out-dir", str(out), "--seed", "0"])
    manifest = json.loads((out / "manifest.json").read_text())
    for name, digest in manifest["outputs"].items():
        assert hashlib.sha256((out / name).read_bytes()).hexdigest() == digest
