import pytest

from valetplan.pipeline import (ENV_OUT, ENV_WORKERS, RunStore, Solution1, count_matrix,
                                default_out_root, default_workers, parallel_map, run_solution2)

TABLE = [[8, 2, 0], [24, 2, 0], [48, 4, 0], [40, 12, 0], [16, 26, 0]]


def test_parallel_map_keeps_order():
    items = list(range(20))
    assert parallel_map(str, items, 3) == [str(i) for i in items]
    assert parallel_map(str, items, 1) == [str(i) for i in items]
    assert parallel_map(str, [], 4) == []


def test_env_defaults(monkeypatch, tmp_path):
    monkeypatch.delenv(ENV_WORKERS, raising=False)
    monkeypatch.delenv(ENV_OUT, raising=False)
    assert default_workers() == 1
    assert str(default_out_root()) == "runs"
    monkeypatch.setenv(ENV_WORKERS, "3")
    monkeypatch.setenv(ENV_OUT, str(tmp_path))
    assert default_workers() == 3
    assert default_out_root() == tmp_path
    monkeypatch.setenv(ENV_WORKERS, "many")
    with pytest.raises(ValueError):
        default_workers()


def test_solution_shape(sol15):
    assert sol15.capacity == 5 and sol15.n_packings == 4
    assert [r.id for r in sol15.layouts] == [1, 2, 3]
    assert all(r.feasible for r in sol15.layouts)
    assert [len(r.exit_seqs) for r in sol15.layouts] == [56, 34, 1]
    assert sol15.layout(3).park_seqs == [tuple(reversed(s)) for s in sol15.layout(3).exit_seqs]
    with pytest.raises(KeyError):
        sol15.layout(4)


def test_run_store_reuses_artifacts(cfg15, sol15, run_root):
    store = RunStore(cfg15, run_root)
    assert store.path.name == cfg15.digest()
    for name in ("config.json", "layouts.json", "conditions.json", "sequences.json",
                 "precedence.json", "precedence_layout2.dot"):
        assert store.has(name), name
    before = store.file("conditions.json").stat().st_mtime_ns
    again = store.solution1(workers=1)
    assert store.file("conditions.json").stat().st_mtime_ns == before
    assert again.conditions_json() == sol15.conditions_json()
    assert again.sequences_json() == sol15.sequences_json()
    assert again.layouts_json() == sol15.layouts_json()


def test_solution_json_round_trip(cfg15, sol15):
    back = Solution1.from_json(cfg15, sol15.layouts_json(), sol15.conditions_json(),
                               sol15.sequences_json())
    assert back.conditions_json() == sol15.conditions_json()
    assert [r.exit_seqs for r in back.layouts] == [r.exit_seqs for r in sol15.layouts]


def test_pair_count_matrix(sol15):
    m = count_matrix(run_solution2(sol15))
    assert m["layouts"] == [1, 2, 3]
    assert m["orders"][0] == [0, 1, 2, 3, 4] and m["orders"][4] == [4, 0, 1, 2, 3]
    assert m["counts"] == TABLE


def test_solution2_with_explicit_order(sol15):
    out = run_solution2(sol15, orders=[(4, 0, 1, 2, 3)], first=True)
    assert [d["count"] for d in out] == [1, 1, 0]
    assert out[1]["pairs"][0]["park"][0] in range(5)


def test_solution2_files(cfg15, sol15, run_root):
    store = RunStore(cfg15, run_root)
    store.solution2(sol15)
    assert store.read("pair_counts.json")["counts"] == TABLE
    pairs = store.read("pairs.json")
    entry = next(d for d in pairs if d["layout"] == 2 and d["pi"] == [4, 0, 1, 2, 3])
    assert {"park": [4, 2, 3, 1, 0], "exit": [0, 4, 2, 3, 1]} in entry["pairs"]
