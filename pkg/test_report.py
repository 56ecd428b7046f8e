"""report.py 测试"""

import json

from deckbench.core.errors import Verdict
from deckbench.core.linalg import ExactMatrix
from deckbench.core.report import ReportGenerator


def sample():
    return ExactMatrix.build([[0, 2], [1, 10 ** 30]], ["A_,A_", "Bg"], ["B?", "Bw"])


def test_json_is_sorted_and_unicode():
    text = ReportGenerator.to_json({"b": 1, "a": "图"})
    assert text.index('"a"') < text.index('"b"')
    assert "图" in text
    assert json.loads(text) == {"a": "图", "b": 1}


def test_matrix_csv_keeps_big_integers():
    lines = ReportGenerator.matrix_to_csv(sample()).splitlines()
    assert lines[0] == "sequence,B?,Bw"
    assert lines[1] == '"A_,A_",0,2'
    assert lines[2] == "Bg,1," + str(10 ** 30)


def test_matrix_text():
    text = ReportGenerator.matrix_to_text(sample(), title="M")
    assert "[*] M" in text
    assert "2 x 2" in text
    empty = ExactMatrix.build([], col_labels=["B?"])
    assert "0 x 1" in ReportGenerator.matrix_to_text(empty)


def test_verdicts_text():
    ok = Verdict("eq1")
    ok.record(True)
    bad = Verdict("kelly")
    for i in range(12):
        bad.record(False, case=i)
    text = ReportGenerator.verdicts_to_text([ok, bad, Verdict("empty")])
    assert "[+] OK eq1 (1 cases)" in text
    assert "ERROR: kelly failed 12/12" in text
    assert "还有 2 条" in text
    assert "[!] ERROR: empty checked no cases" in text


def test_write_creates_directories(tmp_path, capsys):
    target = tmp_path / "a" / "b" / "out.txt"
    ReportGenerator.write("hello", str(target))
    assert target.read_text(encoding="utf-8") == "hello\n"
    ReportGenerator.write("to stdout", None)
    assert capsys.readouterr().out == "to stdout\n"
