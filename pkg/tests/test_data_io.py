import json

import numpy as np
import pytest

from doseforge import __version__
from doseforge.data import Dataset, PairedDataset, ingest_csv
from doseforge.errors import DataError
from doseforge.models import Likelihood, LikelihoodKind, Link
from doseforge.output import Provenance, config_hash, read_csv_table, svg_curves, write_csv, write_json


def _write(tmp_path, text, name="in.csv"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_summary_schema(tmp_path):
    p = _write(tmp_path, "# comment\ndose,mean,se,n\n0,1.5,0.4,42\n16,2.3,0.4,41\n")
    ds = ingest_csv(p, "summary")
    assert ds.likelihood.kind is LikelihoodKind.NORMAL_SUMMARY
    assert ds.se.tolist() == [0.4, 0.4] and ds.trials.tolist() == [42, 41]


def test_zero_se_names_the_line(tmp_path):
    p = _write(tmp_path, "dose,mean,se,n\n0,1.5,0.4,42\n16,2.3,0,41\n")
    with pytest.raises(DataError, match="line 3"):
        ingest_csv(p, "summary")


def test_malformed_field(tmp_path):
    p = _write(tmp_path, "dose,y_eff,y_tox\n0,abc,0\n")
    with pytest.raises(DataError, match="malformed"):
        ingest_csv(p, "individual")


def test_missing_field_and_short_row(tmp_path):
    with pytest.raises(DataError, match="missing"):
        ingest_csv(_write(tmp_path, "dose,y_eff,y_tox\n0,,1\n"), "individual")
    with pytest.raises(DataError, match="expected 3 fields"):
        ingest_csv(_write(tmp_path, "dose,y_eff,y_tox\n0,1\n"), "individual")


def test_missing_columns_and_unknown_schema(tmp_path):
    p = _write(tmp_path, "dose,mean\n0,1\n")
    with pytest.raises(DataError, match="lacks columns"):
        ingest_csv(p, "summary")
    with pytest.raises(DataError, match="unknown CSV schema"):
        ingest_csv(p, "wide")
    with pytest.raises(DataError):
        ingest_csv(_write(tmp_path, "\n# only comments\n", "e.csv"), "summary")


def test_individual_with_severity(tmp_path):
    p = _write(tmp_path, "dose,y_eff,y_tox,severity\n0,1.0,0,0.01\n1,6.0,1,0.3\n")
    pd = ingest_csv(p, "individual")
    assert isinstance(pd, PairedDataset) and pd.severity.tolist() == [0.01, 0.3]


def test_counts_schema(tmp_path):
    p = _write(tmp_path, "dose,events,n\n0,2,42\n48,17,44\n")
    ds = ingest_csv(p, "counts", likelihood=Likelihood(LikelihoodKind.BINOMIAL, Link.PROBIT))
    assert ds.likelihood.link is Link.PROBIT and ds.response.tolist() == [2, 17]
    with pytest.raises(DataError):
        ingest_csv(_write(tmp_path, "dose,events,n\n0,50,42\n", "bad.csv"), "counts")


def test_categorical_k_inferred_and_range(tmp_path):
    p = _write(tmp_path, "dose,category\n0,1\n0,3\n1,2\n")
    assert ingest_csv(p, "categorical").likelihood.n_categories == 3
    assert ingest_csv(p, "categorical", n_categories=5).likelihood.n_categories == 5
    with pytest.raises(DataError, match="out of 1..2"):
        ingest_csv(p, "categorical", n_categories=2)
    with pytest.raises(DataError, match="positive integer"):
        ingest_csv(_write(tmp_path, "dose,category\n0,1.5\n", "c.csv"), "categorical")


def test_dataset_validation():
    normal = Likelihood(LikelihoodKind.NORMAL)
    with pytest.raises(DataError):
        Dataset([0, 1], [1.0], normal)
    with pytest.raises(DataError):
        Dataset([-1.0], [1.0], normal)
    with pytest.raises(DataError):
        Dataset([0.0], [np.nan], normal)
    with pytest.raises(DataError):
        Dataset([0.0], [0.5], Likelihood(LikelihoodKind.BERNOULLI))
    with pytest.raises(DataError):
        Dataset([0.0], [1.5], Likelihood(LikelihoodKind.POISSON))
    with pytest.raises(DataError):
        Dataset([0.0], [1.0], normal, se=[0.1])


# --- writers ------------------------------------------------------------------

def test_provenance_line():
    prov = Provenance("ab" * 32, 11)
    assert prov.line() == f"# doseforge {__version__} config_sha256={'ab' * 32} seed=11"


def test_config_hash_is_order_free():
    assert config_hash({"a": 1, "b": [1, 2]}) == config_hash({"b": [1, 2], "a": 1})
    assert config_hash({"a": 1}) != config_hash({"a": 2})


def test_csv_round_trip(tmp_path):
    prov = Provenance(config_hash({"x": 1}), 3)
    p = write_csv(tmp_path / "o" / "t.csv", ("dose", "mean"), [(0.0, 1.0 / 3), (1, 2.5)], prov)
    lines = p.read_text().splitlines()
    assert lines[0] == prov.line() and lines[2] == "0,0.3333333333"
    header, body = read_csv_table(p)
    assert header == ["dose", "mean"] and body.shape == (2, 2)


def test_json_strict_and_stamped(tmp_path):
    p = write_json(tmp_path / "r.json", {"x": float("inf"), "a": np.arange(2)}, Provenance("h", 1))
    d = json.loads(p.read_text())
    assert d["x"] is None and d["a"] == [0, 1] and d["provenance"]["seed"] == 1


def test_svg_writer(tmp_path):
    x = np.linspace(0, 1, 5)
    p = svg_curves(tmp_path / "c.svg", [("m", x, x, x - 0.1, x + 0.1)], prov=Provenance("h", 0))
    text = p.read_text()
    assert text.startswith("<svg") and "doseforge" in text and text.rstrip().endswith("</svg>")
