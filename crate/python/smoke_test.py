#!/usr/bin/env python3
"""Smoke test for the difforder_py extension module.

Builds nothing itself: it locates the cdylib produced by
`cargo build -p difforder-py`, imports it under the module name the
interpreter expects, and exercises parsing, field application, the
derivative chain, classification on the corpus, and report
re-verification.
"""

import json
import shutil
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]


def load_module():
    candidates = sorted(ROOT.glob("target/*/libdifforder_py.so")) + sorted(
        ROOT.glob("target/*/difforder_py.so")
    )
    if not candidates:
        sys.exit("no built extension found; run `cargo build -p difforder-py` first")
    tmp = Path(tempfile.mkdtemp(prefix="difforder_py_"))
    shutil.copy2(candidates[-1], tmp / "difforder_py.so")
    sys.path.insert(0, str(tmp))
    import difforder_py

    return difforder_py


def corpus(name):
    return (ROOT / "corpus" / name).read_text()


def main():
    m = load_module()

    # Parsing, display, application, chain terms.
    sys_obj = m.System("x1' = 1\nx2' = x1*x2")
    assert str(sys_obj) == "x1' = 1; x2' = x1*x2", str(sys_obj)
    assert sys_obj.x1 == "1" and sys_obj.x2 == "x1*x2"
    assert sys_obj.apply("x2") == "x1*x2"
    assert sys_obj.chain(0) == "-x1", sys_obj.chain(0)
    assert sys_obj.verdict() == "1"

    # Malformed input surfaces as ValueError with a position.
    try:
        m.System("x1' = (")
    except ValueError as e:
        assert "line 1" in str(e), e
    else:
        raise AssertionError("expected ValueError for malformed input")

    # Corpus verdicts through the module-level function.
    expected = {
        "order0.sys": "0",
        "order1.sys": "1",
        "order2.sys": "2",
        "riccati.sys": "3",
    }
    for name, want in expected.items():
        got = m.verdict(corpus(name))
        assert got == want, f"{name}: expected {want}, got {got}"

    # The van der Pol field under tightened bounds.
    got = m.verdict(
        corpus("vdp.sys"),
        max_degree=4,
        max_n=2,
        max_denom_power=2,
        darboux_degree=2,
        cofactor_height=1,
        series_order=6,
        trials=5,
    )
    assert got == "at_least_4_within_bounds", got

    # Full report: valid JSON, expected witness, re-verifiable; a
    # tampered copy must fail re-verification.
    text = m.classify_json(corpus("riccati.sys"))
    doc = json.loads(text)
    assert doc["schema"] == "v1"
    assert doc["verdict"] == "3"
    assert doc["witness"]["kind"] == "order_3"
    assert [1, 0, "-2"] in doc["series"]["coefficients"]
    assert m.reverify_json(text) is True

    doc["chain"]["b1"] = "7"
    assert m.reverify_json(json.dumps(doc)) is False

    print("smoke test passed")


if __name__ == "__main__":
    main()
