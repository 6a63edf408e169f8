# tests/test_adapters.py

import json

import numpy as np
import pandas as pd
import pytest

from ptorus.adapters.exceptions import SpecLoadError
from ptorus.adapters.samples_loader import SamplesLoader
from ptorus.adapters.spec_loader import SpecLoader
from ptorus.adapters.writers import ResultWriter
from ptorus.domain.enums import CommandType
from ptorus.domain.models.job import JobConfig


@pytest.fixture
def job() -> JobConfig:
    return JobConfig(command=CommandType.SEQ_LIMIT, params={"p": 2}, seed=3)


def test_samples_loader_reads_comments(samples_csv, interior_points):
    points = SamplesLoader().load(samples_csv)
    assert np.allclose(points, interior_points)


def test_samples_csv_fields_are_plain_floats(samples_csv):
    """Поля выборки - обычные десятичные числа, без repr numpy-скаляров."""
    rows = open(samples_csv, encoding="utf-8").read().splitlines()[2:]
    assert len(rows) == 40
    for row in rows:
        re_text, im_text = row.split(",")
        assert float(re_text) == float(re_text.strip())
        assert float(im_text) >= 3.0


@pytest.mark.parametrize(
    "content",
    ["x,y\n1,2\n", "re,im\n1,abc\n"],
)
def test_samples_loader_rejects_bad_files(tmp_path, content):
    path = tmp_path / "bad.csv"
    path.write_text(content, encoding="utf-8")
    with pytest.raises(SpecLoadError):
        SamplesLoader().load(str(path))


def test_spec_loader_accepts_plain_list(tmp_path):
    path = tmp_path / "list.json"
    path.write_text(json.dumps([{"k": {"kind": "affine", "a": 1}, "l": {"kind": "affine", "a": 2}}]), encoding="utf-8")
    assert len(SpecLoader().load_batch(str(path)).specs) == 1
    path.write_text("[1, 2]", encoding="utf-8")
    with pytest.raises(SpecLoadError):
        SpecLoader().load_config(str(path))


def test_writer_csv_to_stdout(capsys, job):
    ResultWriter().write_csv(None, pd.DataFrame({"im": [2.0], "re": [1.0]}), job, "limit_set")
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("# ptorus schema=1 command=seq-limit")
    assert lines[2] == "# seed=3"
    assert lines[4] == "re,im"


def test_writer_json_header(tmp_path, job):
    path = ResultWriter().write_json(str(tmp_path / "out.json"), {"limit": {"p": 2}}, job)
    with open(path, encoding="utf-8") as handle:
        document = json.load(handle)
    assert document["header"]["config_hash"] == job.config_hash
    assert document["limit"] == {"p": 2}


def test_config_hash_depends_on_params():
    first = JobConfig(command=CommandType.SEQ_LIMIT, params={"p": 2})
    second = JobConfig(command=CommandType.SEQ_LIMIT, params={"p": 3})
    assert first.config_hash != second.config_hash
    assert first.config_hash == JobConfig(command=CommandType.SEQ_LIMIT, params={"p": 2}, outputs={"out": "x"}).config_hash
