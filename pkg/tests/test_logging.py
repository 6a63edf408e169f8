# tests/test_logging.py

import pytest

from ptorus.adapters.exceptions import NewtonDiverged
from ptorus.config import app_settings
from ptorus.main import main
from ptorus.utils.logging import domain_fields, get_job_logger, reset_loggers


@pytest.fixture
def fresh_logs(tmp_path, monkeypatch):
    """Логи пишутся в отдельный каталог теста, после теста логгеры пересоздаются."""
    monkeypatch.setenv("PTORUS_LOG_DIR", str(tmp_path))
    reset_loggers()
    yield tmp_path
    reset_loggers()


def _summary(log_dir):
    return (log_dir / "ptorus_summary.log").read_text(encoding="utf-8").splitlines()


def _main_log(log_dir):
    return (log_dir / "ptorus.log").read_text(encoding="utf-8")


def test_domain_fields_order_and_format():
    params = {"seed": 3, "mu": 1 + 1.5j, "slope": "1/2", "q_max": 20, "png": None, "guess": [0.5, -2.0]}
    assert domain_fields(params) == "slope=1/2 q_max=20 mu=1+1.5i guess=0.5-2i seed=3"
    assert domain_fields({"count": 5}) == "-"


def test_job_block_in_summary(fresh_logs):
    job_logger = get_job_logger("test")
    job_id = job_logger.start_job_block("maskit-cusp", {"slope": "1/2", "seed": 0})
    job_logger.log_step_ok(1, "Каспа", "mu = 1+1.732i")
    job_logger.log_result_summary("одна каспа", total=1)
    job_logger.end_job_block()

    lines = _summary(fresh_logs)
    assert len(lines) == 4
    assert all(f"job={job_id} cmd=maskit-cusp" in line for line in lines)
    events = [line.split(" | ")[3].split(" ")[0] for line in lines]
    assert events == ["START", "STEP", "RESULT", "END"]
    assert "START | slope=1/2 seed=0 | params=" in lines[0]
    assert "success=True | exit=0" in lines[-1]

    main_log = _main_log(fresh_logs)
    assert f"[{job_id}] maskit-cusp | slope=1/2 seed=0" in main_log
    assert f"[{job_id}] шаг 1 Каспа - ок" in main_log
    assert f"[{job_id}] maskit-cusp готово за" in main_log


def test_error_block_carries_type_and_slope(fresh_logs):
    job_logger = get_job_logger("test")
    job_id = job_logger.start_job_block("maskit-trace", {"q_max": 13})
    error = NewtonDiverged("нет сходимости", slope="5/13")
    job_logger.log_step_error(1, "Трассировка границы", error)
    job_logger.end_job_block(error=error)

    end = _summary(fresh_logs)[-1]
    assert f"job={job_id} cmd=maskit-trace" in end
    assert "success=False | exit=1" in end
    assert "NewtonDiverged slope=5/13" in end
    assert f"[{job_id}] шаг 1 Трассировка границы - ошибка NewtonDiverged slope=5/13" in _main_log(fresh_logs)


def test_log_detail_only_in_debug(fresh_logs, monkeypatch):
    job_logger = get_job_logger("test")
    job_logger.log_detail("скрытая деталь")
    monkeypatch.setattr(app_settings, "debug", True)
    job_logger.log_detail("видимая деталь")

    main_log = _main_log(fresh_logs)
    assert "скрытая деталь" not in main_log
    assert "[-] видимая деталь" in main_log


def test_failed_command_closes_block(fresh_logs, tmp_path):
    assert main(["maskit", "cusp", "1/2", "--guess", "1,-1", "--out", str(tmp_path / "c.json")]) == 1

    summary = "\n".join(_summary(fresh_logs))
    assert "cmd=maskit-cusp | START | slope=1/2 guess=1-1i" in summary
    assert "success=False | exit=1" in summary
    assert "NoUpperHalfPlaneRoot" in summary
    assert "- ошибка NoUpperHalfPlaneRoot" in _main_log(fresh_logs)
