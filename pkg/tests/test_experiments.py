import math

import pytest

from adjstate.errors import ConfigError, UndefinedCellError
from adjstate.estimators import AE, POVM
from adjstate.experiments import (
    CSV_HEADER,
    CellResult,
    SweepConfig,
    SweepReport,
    derive_seed,
    emit_csv,
    emit_raw,
    normalized_rmse,
    parse_sweep_config,
    run_sweep,
)
from adjstate.graph import MotifKind

TRI = MotifKind.triangle()


def test_normalized_rmse_examples():
    assert normalized_rmse([1, 2, 3], [1, 2, 3]) == 0.0
    assert normalized_rmse([0, 0], [5, 5]) == 1.0
    assert normalized_rmse([2], [4]) == 0.5
    with pytest.raises(UndefinedCellError):
        normalized_rmse([1, 1], [0, 0])
    with pytest.raises(ValueError):
        normalized_rmse([1], [1, 2])


def test_derive_seed_stable():
    assert derive_seed(0, "graph", 16, 0.2, 3) == derive_seed(0, "graph", 16, 0.2, 3)
    assert derive_seed(0, "graph", 16, 0.2, 3) != derive_seed(0, "graph", 16, 0.2, 4)
    assert 0 <= derive_seed("x") < 2**64


def test_emit_csv_empty_and_single(tmp_path):
    out = tmp_path / "a.csv"
    emit_csv(SweepReport(), out)
    assert out.read_text() == ",".join(CSV_HEADER) + "\n"
    cell = CellResult(4, 0.5, "triangle", "ae", 0.05, 0.05, 3, 1.0, 0.1, 0, 74)
    emit_csv(SweepReport([cell]), out)
    lines = out.read_text().splitlines()
    assert len(lines) == 2
    assert lines[1] == "4,0.5,triangle,ae,0.050000000000000003,0.050000000000000003,3,1,0.10000000000000001,0"


def small_cfg(**kw):
    base = dict(n_values=(8,), edge_probs=(0.3, 0.6), instances=10, motifs=(TRI, MotifKind.cycle(4)))
    base.update(kw)
    return SweepConfig(**base)


def test_determinism_across_runs_and_workers(tmp_path):
    paths = []
    for i, workers in enumerate((1, 1, 2)):
        path = tmp_path / f"{i}.csv"
        emit_csv(run_sweep(small_cfg(workers=workers)), path)
        paths.append(path.read_bytes())
    assert paths[0] == paths[1] == paths[2]


def test_adding_cells_keeps_existing_numbers():
    a = run_sweep(small_cfg())
    b = run_sweep(small_cfg(edge_probs=(0.3, 0.45, 0.6), motifs=(TRI, MotifKind.cycle(4), MotifKind.clique(4))))
    for cell in a.cells:
        assert b.cell(*cell.key).normalized_rmse == cell.normalized_rmse


def test_exact_estimator_gives_zero_rmse():
    cfg = SweepConfig(n_values=(4,), edge_probs=(1.0,), instances=3, motifs=(TRI,), methods=(AE,), ae_scale=0.0)
    (cell,) = run_sweep(cfg).cells
    assert cell.normalized_rmse == 0.0 and cell.mean_true_count == 4


def test_noise_dominated_povm():
    cfg = SweepConfig(n_values=(16,), edge_probs=(0.3,), instances=20, motifs=(MotifKind.clique(4),),
                      accuracies=((1.0, 0.5),), methods=(POVM,))
    (cell,) = run_sweep(cfg).cells
    assert cell.shots_or_queries == 1
    assert cell.normalized_rmse >= 1.0


def test_skipped_and_undefined_cells(tmp_path):
    cfg = SweepConfig(n_values=(4,), edge_probs=(0.0, 0.1), instances=5, motifs=(TRI,), methods=(POVM,))
    report = run_sweep(cfg)
    empty = report.cell(4, 0.0, TRI, POVM)
    assert empty.skipped == 5 and empty.instances == 0 and empty.undefined
    sparse = report.cell(4, 0.1, TRI, POVM)
    assert sparse.undefined  # no triangles at this density for these seeds
    out = tmp_path / "s.csv"
    emit_csv(report, out)
    assert out.read_text().splitlines()[1].endswith(",nan,5")


def test_raw_dump(tmp_path):
    report = run_sweep(small_cfg(instances=4))
    out = tmp_path / "raw.csv"
    emit_raw(report, out)
    lines = out.read_text().splitlines()
    assert lines[0].startswith("n,p_e,motif,method")
    assert len(lines) == 1 + sum(c.instances for c in report.cells)


def test_monotonic_precision():
    # Small dense graphs keep p*T near or above 1. At N=16 almost every shot misses,
    # so the RMSE is flat in epsilon and the comparison carries no signal.
    cfg = SweepConfig(n_values=(4, 5, 6), edge_probs=(0.7, 0.8, 0.9), instances=400, motifs=(TRI,),
                      accuracies=((0.2, 0.05), (0.1, 0.05), (0.05, 0.05)), methods=(POVM,))
    report = run_sweep(cfg)
    comparisons = violations = 0
    for n in cfg.n_values:
        for p_e in cfg.edge_probs:
            errs = [report.cell(n, p_e, TRI, POVM, e, 0.05).normalized_rmse for e, _ in cfg.accuracies]
            for a, b in zip(errs, errs[1:]):
                comparisons += 1
                violations += not b < a
    assert comparisons == 18
    assert violations <= 1


@pytest.mark.parametrize("text", [
    "not json", "[1, 2]", '{"bogus": 1}', '{"instances": 1}', '{"edge_probs": [1.5]}',
    '{"motifs": ["square"]}', '{"methods": ["magic"]}', '{"n_values": ["x"]}', '{"epsilon": 0}',
])
def test_malformed_config(text):
    with pytest.raises(ConfigError):
        parse_sweep_config(text)


def test_config_parsing():
    cfg = parse_sweep_config('{"n_values": [8], "motifs": ["cycle:5"], "epsilon": 0.1, "delta": 0.2,'
                             ' "master_seed": 3, "output": "x.csv"}')
    assert cfg.n_values == (8,) and cfg.motifs == (MotifKind.cycle(5),)
    assert cfg.accuracies == ((0.1, 0.2),) and cfg.master_seed == 3 and cfg.output == "x.csv"
    assert parse_sweep_config("{}") == SweepConfig()


def test_nan_helper_cells_are_not_ranked():
    cell = CellResult(4, 0.1, "triangle", "povm", 0.05, 0.05, 0, 0.0, math.nan, 5, 738)
    assert cell.undefined
