import json
import math

import pytest

from partmaxent.cli import dumps, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_estimate_hardy_ramanujan(capsys):
    code, out, _ = run(capsys, "estimate", "-J", "1", "-a", "1", "-n", "100")
    assert code == 0
    body = json.loads(out)
    assert body["M"] == pytest.approx(2.5650996, abs=1e-7)
    assert body["b"] == "1"
    assert body["c"] == pytest.approx(0.1443376, abs=1e-7)
    assert body["refined"]["estimate"] / 190569292 == pytest.approx(1, abs=0.03)


def test_estimate_ladder_and_mode(capsys):
    code, out, _ = run(capsys, "estimate", "-J", "1,2", "-a", "1,1", "-n", "7,16", "--mode", "leading")
    body = json.loads(out)
    assert code == 0 and len(body) == 2
    assert body[0]["feasible"] is False and body[0]["leading"]["estimate"] == 0
    assert "refined" not in body[1]


def test_count_parity(capsys):
    code, out, _ = run(capsys, "count", "-J", "1,2", "-N", "3,4")
    assert code == 0
    assert out.strip() == '{"count":"0","feasible":false}'


def test_count_big_is_string(capsys):
    _, out, _ = run(capsys, "count", "-J", "1", "-N", "200")
    assert json.loads(out)["count"] == "3972999029388"


def test_solve_and_forward(capsys):
    code, out, _ = run(capsys, "solve", "-J", "1", "-a", "1")
    assert code == 0
    beta = json.loads(out)["beta"]["1"]
    assert beta == pytest.approx(math.pi / math.sqrt(6), rel=1e-11)
    code, out, _ = run(capsys, "forward", "-J", "1,2,3", "-b", "4.0,-8.5,4.6")
    assert json.loads(out)["alpha"]["1"] == pytest.approx(4.31168, rel=1e-5)


def test_exit_codes(capsys):
    assert run(capsys, "solve", "-J", "0,1,2", "-a", "1,1,3")[0] == 2
    assert run(capsys, "solve", "-J", "1", "-a", "-1")[0] == 3
    assert run(capsys, "forward", "-J", "1,2", "-b", "1,-3")[0] == 3
    assert run(capsys, "estimate", "-J", "1")[0] == 3
    with pytest.raises(SystemExit) as info:
        main(["nonsense"])
    assert info.value.code == 3


def test_shape_csv(capsys, tmp_path):
    path = tmp_path / "shape.csv"
    code, _, _ = run(capsys, "shape", "-J", "1,2,3", "-b", "4.0,-8.5,4.6", "--grid", "0.01:5:500",
                     "--out", str(path))
    lines = path.read_text().splitlines()
    assert code == 0 and lines[0] == "t,phi" and len(lines) == 501
    vals = [float(line.split(",")[1]) for line in lines[1:]]
    assert all(a >= b for a, b in zip(vals, vals[1:]))


def test_sample_reproducible(capsys):
    args = ("sample", "-J", "1,2", "-N", "20,60", "--exact", "--samples", "4", "--seed", "9")
    first = run(capsys, *args)[1]
    assert first == run(capsys, *args)[1]
    body = json.loads(first)
    for lam in body["partitions"]:
        assert sum(int(k) * m for k, m in lam.items()) == 20
        assert sum(int(k) ** 2 * m for k, m in lam.items()) == 60


def test_sample_csv(capsys):
    code, out, _ = run(capsys, "sample", "-J", "1", "-a", "1", "-n", "100", "--samples", "3",
                       "--format", "csv", "--grid", "0.5:2:4")
    assert code == 0 and out.splitlines()[0] == "t,phi" and len(out.splitlines()) == 5


def test_qj(capsys):
    _, out, _ = run(capsys, "qj", "-J", "1,2")
    body = json.loads(out)
    assert body["cardinality"] == 2
    assert {"1": "1/2", "2": "1/2"} in body["polys"]


def test_validate_subset(capsys):
    code, out, _ = run(capsys, "validate", "qj_cardinalities", "lattice_density")
    assert code == 0
    assert out.count("PASS") == 2


def test_dumps_twelve_digits():
    assert dumps({"x": math.pi, "y": [1, None, True], "z": float("inf")}) == \
        '{"x":3.14159265359,"y":[1,null,true],"z":null}'
