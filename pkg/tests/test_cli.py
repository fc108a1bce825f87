import io
import contextlib
import os

import pytest

from algebroids.cli import main

HERE = os.path.dirname(__file__)
DATA = os.path.join(HERE, "data")
GOLDEN = os.path.join(DATA, "golden")
ROOT = os.path.dirname(HERE)


def run_cli(argv):
    buf = io.StringIO()
    cwd = os.getcwd()
    os.chdir(ROOT)
    try:
        with contextlib.redirect_stdout(buf):
            code = main(argv)
    finally:
        os.chdir(cwd)
    return code, buf.getvalue()


GOLDEN_CASES = [
    ("check-algebroid", "two_dim_algebra.alg", []),
    ("check-coalgebroid", "two_dim_algebra.alg", []),
    ("check-bialgebroid", "poisson.alg", []),
    ("check-linfty", "poisson.alg", []),
    ("check-morphism", "morphism.alg", []),
    ("bracket", "two_dim_algebra.alg", []),
    ("ce-diff", "two_dim_algebra.alg", []),
    ("schouten", "two_dim_algebra.alg", []),
    ("bv", "two_dim_algebra.alg", []),
    ("lift", "morphism.alg", []),
    ("legendre", "two_dim_algebra.alg", []),
    ("construct", "constructs.alg", []),
    ("round-trip", "poisson.alg", []),
    ("check-bialgebroid", "poisson.alg", ["--json", "--residuals"]),
    ("check-algebroid", "two_dim_algebra.alg", ["--json"]),
]


@pytest.mark.parametrize("sub,fname,flags", GOLDEN_CASES,
                         ids=[c[0] + ("-json" if "--json" in c[2] else "")
                              for c in GOLDEN_CASES])
def test_golden(sub, fname, flags):
    code, out = run_cli([sub, f"tests/data/{fname}"] + flags)
    tag = sub + ("-json" if "--json" in flags else "")
    with open(os.path.join(GOLDEN, f"{tag}.txt")) as fh:
        golden = fh.read()
    assert golden == f"# exit={code}\n" + out


def test_json_deterministic():
    runs = [run_cli(["check-bialgebroid", "tests/data/poisson.alg", "--json"])
            for _ in range(2)]
    assert runs[0] == runs[1]


def test_parse_error_exit_code():
    code, _ = run_cli(["check-algebroid", "tests/data/bad_order.alg"])
    assert code == 2


def test_missing_file_exit_code():
    code, _ = run_cli(["check-algebroid", "tests/data/does_not_exist.alg"])
    assert code == 2


def test_missing_section_exit_code():
    code, _ = run_cli(["check-bialgebroid", "tests/data/two_dim_algebra.alg"])
    assert code == 2


def test_failure_exit_code(tmp_path):
    bad = tmp_path / "broken.alg"
    bad.write_text("""\
chart pt

algebroid V
  base pt
  fiber xi1 0
  fiber xi2 0
  fiber xi3 0
  bracket xi1 xi2 xi1 = 1
  bracket xi1 xi3 xi2 = 1
""")
    code, out = run_cli(["check-algebroid", str(bad)])
    assert code == 1
    assert "FAIL" in out


def test_residuals_flag_prints_polynomials(tmp_path):
    bad = tmp_path / "broken.alg"
    bad.write_text("""\
chart pt

algebroid V
  base pt
  fiber xi1 0
  fiber xi2 0
  fiber xi3 0
  bracket xi1 xi2 xi1 = 1
  bracket xi1 xi3 xi2 = 1
""")
    _, out = run_cli(["check-algebroid", str(bad), "--residuals"])
    assert "residual:" in out


def test_name_filter():
    code, out = run_cli(["construct", "tests/data/constructs.alg",
                         "--name", "tangent"])
    assert code == 0
    assert "[T]" in out and "[A]" not in out


def test_seed_changes_only_detail():
    _, a = run_cli(["legendre", "tests/data/two_dim_algebra.alg", "--seed", "1"])
    assert "seed=1" in a and "PASS" in a
