import json

import numpy as np
import pytest

from ciph import BracketMatrix, FormatError, Tensor4, integrate
from ciph.dynamics import quadratic_linear_model
from ciph.fileio import (
    load_directions,
    load_matrix,
    load_model,
    load_tensor,
    save_matrix,
    save_tensor,
    write_trajectory_csv,
)

from conftest import EPS_ENTRIES


def write_json(path, payload) -> str:
    path.write_text(json.dumps(payload), encoding="utf-8")
    return str(path)


class TestTensorFormat:
    def test_round_trip(self, tmp_path, golden_eps):
        p = tmp_path / "eps.json"
        save_tensor(golden_eps, p)
        assert load_tensor(p) == golden_eps

    def test_omitted_entries_are_zero(self, tmp_path):
        p = write_json(tmp_path / "t.json", {"n": 2, "entries": []})
        assert load_tensor(p) == Tensor4.zeros(2)

    def test_duplicate_entry_rejected(self, tmp_path):
        payload = {
            "n": 2,
            "entries": [
                {"i": 1, "j": 1, "k": 1, "l": 1, "v": 1.0},
                {"i": 1, "j": 1, "k": 1, "l": 1, "v": 2.0},
            ],
        }
        p = write_json(tmp_path / "dup.json", payload)
        with pytest.raises(FormatError, match=r"duplicate entry for index \(1, 1, 1, 1\)"):
            load_tensor(p)

    def test_out_of_range_index_names_entry(self, tmp_path):
        payload = {"n": 2, "entries": [{"i": 3, "j": 1, "k": 1, "l": 1, "v": 1.0}]}
        p = write_json(tmp_path / "oob.json", payload)
        with pytest.raises(FormatError, match="entry #1"):
            load_tensor(p)

    def test_malformed_entry_names_position(self, tmp_path):
        payload = {"n": 2, "entries": [{"i": 1, "j": 1, "k": 1, "v": 1.0}]}
        p = write_json(tmp_path / "bad.json", payload)
        with pytest.raises(FormatError, match="entry #1"):
            load_tensor(p)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FormatError):
            load_tensor(tmp_path / "nope.json")

    def test_not_json(self, tmp_path):
        p = tmp_path / "garbage.json"
        p.write_text("{not json", encoding="utf-8")
        with pytest.raises(FormatError):
            load_tensor(p)

    def test_save_omits_zeros_and_orders_entries(self, tmp_path, golden_eps):
        p = tmp_path / "eps.json"
        save_tensor(golden_eps, p)
        data = json.loads(p.read_text())
        assert len(data["entries"]) == len(EPS_ENTRIES)
        keys = [(e["i"], e["j"], e["k"], e["l"]) for e in data["entries"]]
        assert keys == sorted(keys)


class TestMatrixFormat:
    def test_round_trip(self, tmp_path, j_std):
        p = tmp_path / "J.json"
        save_matrix(j_std, p)
        assert load_matrix(p) == j_std

    def test_shape_mismatch(self, tmp_path):
        p = write_json(tmp_path / "bad.json", {"n": 2, "rows": [[0.0, 1.0]]})
        with pytest.raises(FormatError):
            load_matrix(p)


class TestDirectionsFormat:
    def test_load(self, tmp_path):
        p = write_json(tmp_path / "dirs.json", {"directions": [[1.0, 0.0], [0.0, 1.0]]})
        dirs = load_directions(p, 2)
        assert len(dirs) == 2
        assert np.array_equal(dirs[0], [1.0, 0.0])

    def test_wrong_length(self, tmp_path):
        p = write_json(tmp_path / "dirs.json", {"directions": [[1.0, 0.0, 0.0]]})
        with pytest.raises(FormatError, match="direction #1"):
            load_directions(p, 2)

    def test_empty(self, tmp_path):
        p = write_json(tmp_path / "dirs.json", {"directions": []})
        with pytest.raises(FormatError):
            load_directions(p, 2)


class TestModelFormat:
    def test_builtin_model(self, tmp_path):
        p = write_json(tmp_path / "m.json", {"builtin": "quadratic-linear"})
        model = load_model(p)
        assert model.name == "quadratic-linear"
        assert model.n == 2

    def test_builtin_with_params(self, tmp_path):
        p = write_json(
            tmp_path / "m.json", {"builtin": "heat-exchanger", "params": {"conductance": 2.0}}
        )
        model = load_model(p)
        assert model.gamma.value([0.0, 0.0]) == pytest.approx(2.0)

    def test_explicit_polynomial_model(self, tmp_path):
        payload = {
            "n": 2,
            "H": {"poly": [[[2, 0], 0.5], [[0, 2], 0.5]]},
            "S": {"poly": [[[1, 0], 1.0], [[0, 1], 1.0]]},
            "gamma": {"poly": [[[0, 0], 1.0]]},
            "J": {"n": 2, "rows": [[0.0, 1.0], [-1.0, 0.0]]},
        }
        p = write_json(tmp_path / "m.json", payload)
        model = load_model(p)
        assert model.H.value([1.0, 0.0]) == 0.5
        assert model.S.value([1.0, 1.0]) == 2.0

    def test_builtin_field_spec(self, tmp_path):
        payload = {
            "n": 2,
            "H": {"builtin": "exp_sum"},
            "S": {"poly": [[[1, 0], 1.0], [[0, 1], 1.0]]},
            "gamma": {"builtin": "exp_neg_sum", "params": {"scale": 1.0}},
            "J": {"n": 2, "rows": [[0.0, 1.0], [-1.0, 0.0]]},
        }
        p = write_json(tmp_path / "m.json", payload)
        model = load_model(p)
        assert model.H.value([0.0, 0.0]) == pytest.approx(2.0)

    def test_constant_w_and_schedule(self, tmp_path):
        payload = {
            "builtin": "quadratic-linear",
            "W": {"constant": [0.1, -0.1]},
            "g": {"rows": [[1.0], [0.0]]},
            "u": {"times": [0.0, 1.0], "values": [[0.5], [0.0]]},
        }
        p = write_json(tmp_path / "m.json", payload)
        model = load_model(p)
        assert np.array_equal(model.W([0.0, 0.0], None), [0.1, -0.1])
        assert np.array_equal(model.u(0.5), [0.5])
        assert np.array_equal(model.u(1.5), [0.0])
        assert np.array_equal(model.u(-0.5), [0.0])

    def test_polynomial_w_components(self, tmp_path):
        payload = {
            "builtin": "quadratic-linear",
            "W": {"poly": [[[[1, 0], 1.0]], [[[0, 0], 2.0]]]},
        }
        model = load_model(write_json(tmp_path / "m.json", payload))
        assert np.array_equal(model.W([3.0, 0.0], None), [3.0, 2.0])

    def test_missing_field_reported(self, tmp_path):
        p = write_json(tmp_path / "m.json", {"n": 2, "H": {"poly": []}})
        with pytest.raises(FormatError):
            load_model(p)

    def test_bad_schedule_rejected(self, tmp_path):
        payload = {
            "builtin": "quadratic-linear",
            "g": {"rows": [[1.0], [0.0]]},
            "u": {"times": [1.0, 0.5], "values": [[1.0], [2.0]]},
        }
        with pytest.raises(FormatError, match="strictly increasing"):
            load_model(write_json(tmp_path / "m.json", payload))


class TestTrajectoryCsv:
    def test_header_and_shape(self, tmp_path):
        model = quadratic_linear_model()
        tr = integrate(model, [1.0, 0.0], t_end=0.01, dt=1e-3)
        p = tmp_path / "traj.csv"
        write_trajectory_csv(model, tr, p)
        lines = p.read_text().strip().split("\n")
        assert lines[0] == "t,x1,x2,H,S,sigma_int,energy_defect"
        assert len(lines) == 1 + len(tr)
        first = lines[1].split(",")
        assert float(first[0]) == 0.0
        assert float(first[1]) == 1.0

    def test_full_precision_round_trip(self, tmp_path):
        model = quadratic_linear_model()
        tr = integrate(model, [1.0, 0.0], t_end=0.01, dt=1e-3)
        p = tmp_path / "traj.csv"
        write_trajectory_csv(model, tr, p)
        rows = [line.split(",") for line in p.read_text().strip().split("\n")[1:]]
        parsed = np.array([[float(v) for v in row] for row in rows])
        assert np.array_equal(parsed[:, 3], tr.H_values)  # 17 digits round-trip exactly

    def test_energy_defect_is_drift_for_isolated_model(self, tmp_path):
        model = quadratic_linear_model()
        tr = integrate(model, [1.0, 0.0], t_end=0.01, dt=1e-3)
        p = tmp_path / "traj.csv"
        write_trajectory_csv(model, tr, p)
        rows = [line.split(",") for line in p.read_text().strip().split("\n")[1:]]
        defects = np.array([float(r[-1]) for r in rows])
        assert np.array_equal(defects, tr.H_values - tr.H_values[0])

    def test_byte_determinism(self, tmp_path):
        model = quadratic_linear_model()
        tr = integrate(model, [1.0, 0.0], t_end=0.01, dt=1e-3)
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        write_trajectory_csv(model, tr, p1)
        write_trajectory_csv(model, tr, p2)
        assert p1.read_bytes() == p2.read_bytes()
