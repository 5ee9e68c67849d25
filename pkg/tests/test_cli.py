import json
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, strategies as st

from alphadpp.cli import format_number, main
from alphadpp.errors import KernelFileError
from alphadpp.kernelfile import parse_kernel, read_kernel, write_kernel

from oracles import random_complex


def write(tmp_path, name, real, imag=None):
    doc = {"dim": len(real), "real": real}
    if imag is not None:
        doc["imag"] = imag
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_alphadet_ones(tmp_path, capsys):
    f = write(tmp_path, "ones3.json", [[1, 1, 1]] * 3)
    assert run(capsys, "alphadet", f, "--alpha", "1") == (0, "6\n", "")


def test_alphadet_determinant(tmp_path, capsys):
    A = random_complex(np.random.default_rng(0), 3)
    f = write(tmp_path, "a.json", A.real.tolist(), A.imag.tolist())
    code, out, _ = run(capsys, "alphadet", f, "--alpha", "-1")
    assert code == 0
    assert complex(out.strip()) == pytest.approx(np.linalg.det(A), abs=1e-11)


def test_alphadet_zero(tmp_path, capsys):
    f = write(tmp_path, "z.json", [[0, 0], [0, 0]])
    assert run(capsys, "alphadet", f, "--alpha", "0.5")[:2] == (0, "0\n")


def test_parse_error_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "alphadet", str(bad), "--alpha", "1")[0] == 2
    f = write(tmp_path, "shape.json", [[1, 2]])
    assert run(capsys, "check", f, "--alpha", "1")[0] == 2
    assert run(capsys, "check", str(tmp_path / "missing.json"), "--alpha", "1")[0] == 2
    f = write(tmp_path, "ok.json", [[0.5]])
    assert run(capsys, "check", f, "--alpha", "0")[0] == 2


def test_size_bound_exit_3(tmp_path, capsys):
    f = write(tmp_path, "big.json", np.eye(21).tolist())
    assert run(capsys, "alphadet", f, "--alpha", "1")[0] == 3
    f = write(tmp_path, "big13.json", (0.1 * np.eye(13)).tolist())
    assert run(capsys, "check", f, "--alpha", "-1")[0] == 3


def test_check_reports(tmp_path, capsys):
    f = write(tmp_path, "neg.json", [[-1]])
    code, out, _ = run(capsys, "check", f, "--alpha", "2")
    doc = json.loads(out)
    assert code == 1 and doc["status"] == "Reject"
    assert doc["witness"]["condition"] == "det(I + alpha K_S) > 0"
    assert doc["witness"]["value"]["re"] == pytest.approx(-1)

    f = write(tmp_path, "herm.json", [[1.0, 0.5], [0.5, 1.2]])  # eigenvalues in [0, 2]
    code, out, _ = run(capsys, "check", f, "--alpha", "-0.5")
    doc = json.loads(out)
    assert code == 0 and doc["status"] == "AcceptExact"
    assert doc["selfadjoint_check"]["status"] == "AcceptExact"

    code, out, _ = run(capsys, "check", f, "--alpha", "-0.4")
    doc = json.loads(out)
    assert code == 1 and doc["witness"]["condition"] == "-1/alpha is a positive integer"


def test_check_positive_reports_bound(tmp_path, capsys):
    f = write(tmp_path, "c.json", [[0.4]])
    code, out, _ = run(capsys, "check", f, "--alpha", "1", "--n-max", "3")
    doc = json.loads(out)
    assert code == 0 and doc["status"] == "AcceptUpToBound" and doc["n_max"] == 3


def test_divisible_reports(tmp_path, capsys):
    f = write(tmp_path, "c.json", [[0.4]])
    code, out, _ = run(capsys, "divisible", f, "--alpha", "-1")
    assert code == 1 and json.loads(out)["status"] == "NeverDivisible"
    code, out, _ = run(capsys, "divisible", f, "--alpha", "1")
    assert code == 0 and json.loads(out)["status"] == "DivisibleUpToBound"

    J = 0.2 * np.array([[1.0, -0.3, -0.3], [-0.3, 1.0, -0.3], [-0.3, -0.3, 1.0]])
    K = J @ np.linalg.inv(np.eye(3) - J)
    f = write(tmp_path, "tri.json", K.tolist())
    code, out, _ = run(capsys, "divisible", f, "--alpha", "1")
    doc = json.loads(out)
    assert code == 1 and doc["witness"]["cycle"] == [0, 1, 2]


def test_sample_lines(tmp_path, capsys):
    f = write(tmp_path, "b.json", [[0.3]])
    code, out, _ = run(capsys, "sample", f, "--alpha", "-1", "--count", "10", "--seed", "4")
    lines = out.splitlines()
    assert code == 0 and len(lines) == 10 and set(lines) <= {"0", "1"}
    assert run(capsys, "sample", f, "--alpha", "-1", "--count", "10", "--seed", "4")[1] == out


def test_sample_validate(tmp_path, capsys):
    f = write(tmp_path, "h.json", [[0.6, 0.2], [0.2, 0.5]], [[0, 0.1], [-0.1, 0]])
    code, out, _ = run(capsys, "sample", f, "--alpha", "-0.5", "--count", "20000", "--validate")
    *draws, report = out.splitlines()
    assert code == 0 and len(draws) == 20000
    doc = json.loads(report)
    assert doc["passed"] and doc["count"] == 20000


def test_sample_truncation_exit_4(tmp_path, capsys):
    f = write(tmp_path, "heavy.json", [[50.0]])
    code, _, err = run(capsys, "sample", f, "--alpha", "1")
    assert code == 4 and "captured mass" in err


def test_expand_order_zero(tmp_path, capsys):
    f = write(tmp_path, "h.json", [[0.6, 0.2], [0.2, 0.5]])
    code, out, _ = run(capsys, "expand", f, "--alpha", "1", "--order", "0")
    assert code == 0 and out.splitlines()[0] == "() 1"


def test_expand_determinant_polynomial(tmp_path, capsys):
    A = np.array([[0.6, 0.2], [0.3, 0.5]])
    f = write(tmp_path, "a.json", A.tolist())
    code, out, _ = run(capsys, "expand", f, "--alpha", "-1", "--order", "2")
    lines = dict(line.split(" ", 1) for line in out.splitlines())
    # det(I + Z A) = 1 + a11 z1 + a22 z2 + det(A) z1 z2
    assert float(lines["(1,0)"]) == pytest.approx(0.6)
    assert float(lines["(0,1)"]) == pytest.approx(0.5)
    assert float(lines["(1,1)"]) == pytest.approx(np.linalg.det(A))
    assert float(lines["(2,0)"]) == 0 and float(lines["(0,2)"]) == 0
    assert float(lines["residual"]) < 1e-8


@pytest.mark.parametrize("alpha,order", [("1", 6), ("0.5", 3), ("-0.5", 4), ("2", 1)])
def test_expand_residual_small(tmp_path, capsys, alpha, order):
    f = write(tmp_path, "h.json", [[0.6, 0.2], [0.2, 0.5]], [[0, 0.1], [-0.1, 0]])
    code, out, _ = run(capsys, "expand", f, "--alpha", alpha, "--order", str(order))
    assert code == 0 and float(out.splitlines()[-1].split()[1]) < 1e-8


def test_expand_explicit_z_outside_domain(tmp_path, capsys):
    f = write(tmp_path, "c.json", [[2.0]])
    assert run(capsys, "expand", f, "--alpha", "1", "--z", "0.9")[0] == 2


def test_format_number():
    assert format_number(6.0000000000001) == "6"
    assert format_number(-2) == "-2"
    assert format_number(-1e-15) == "0"
    assert format_number(1.5 - 2j) == "1.5-2j"


def test_kernel_file_round_trip(tmp_path):
    rng = np.random.default_rng(3)
    A = random_complex(rng, 4)
    path = tmp_path / "k.json"
    write_kernel(path, A, {"name": "random"})
    K, meta = read_kernel(path)
    np.testing.assert_array_equal(K.entries, A)
    assert meta == {"name": "random"}


@given(st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=4, max_size=4),
       st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=4, max_size=4))
def test_kernel_file_round_trip_property(re, im):
    A = (np.array(re) + 1j * np.array(im)).reshape(2, 2)
    doc = json.loads(json.dumps({"dim": 2, "real": A.real.tolist(), "imag": A.imag.tolist()}))
    np.testing.assert_array_equal(parse_kernel(doc)[0].entries, A)


@pytest.mark.parametrize("doc", [
    [], {"real": [[1]]}, {"dim": 0, "real": []}, {"dim": 1}, {"dim": 1, "real": [["x"]]},
    {"dim": 1, "real": [[1]], "imag": [[1, 2]]}, {"dim": True, "real": [[1]]},
    {"dim": 1, "real": [[1]], "metadata": 3},
])
def test_kernel_file_rejects(doc):
    with pytest.raises(KernelFileError):
        parse_kernel(doc)


def test_module_entry_point(tmp_path):
    f = write(tmp_path, "ones3.json", [[1, 1, 1]] * 3)
    proc = subprocess.run([sys.executable, "-m", "alphadpp", "alphadet", f, "--alpha", "2"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "15\n"
