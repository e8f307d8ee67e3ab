import json

from houghton_kit.classify import classify
from houghton_kit.cli import cli_main
from houghton_kit.elements import from_cycles, generator, houghton_generators, transposition
from houghton_kit.subgroups import GeneratedSubgroup, delta_k


def write_subgroup(tmp_path, group, name="group.json"):
    path = tmp_path / name
    path.write_text(json.dumps(group.to_json_dict()))
    return str(path)


def h3():
    return GeneratedSubgroup.from_elements(3, houghton_generators(3))


# -- classifier -----------------------------------------------------------------


def test_classify_full_group():
    report = classify(h3())
    assert report.full_hirsch
    assert report.level["status"] == "level"
    assert report.verdict == "type F_2, not FP_3, max-n"
    assert not report.conditional


def test_classify_delta2():
    report = classify(delta_k(3, 2))
    assert report.full_hirsch
    assert report.level["status"] == "level"
    assert report.congruence_lifting == {"status": True, "modulus": 2}
    assert report.orbit_summary["class_count"] == 2
    assert report.orbit_summary["stabilized"]
    assert report.verdict == "type F_2, not FP_3, max-n"
    assert report.certificate["status"] == "certified"


def test_classify_finitary_subgroup_conditional():
    g = GeneratedSubgroup.from_elements(
        3, [from_cycles(3, [[(1, 0), (1, 1), (1, 2)]])]
    )
    report = classify(g)
    assert report.hirsch == 0
    assert not report.full_hirsch
    assert report.conditional
    assert "conditional" in report.verdict
    assert "FP_3" in report.verdict


def test_classify_h2_dichotomy():
    g = GeneratedSubgroup.from_elements(2, houghton_generators(2))
    report = classify(g)
    assert report.full_hirsch
    assert report.conditional
    assert report.verdict == "finitely generated, max-n; not FP_2 unless finite-by-Z"


def test_classify_non_level_reports_reduction():
    from houghton_kit.subgroups import element_with_translation

    h = GeneratedSubgroup.from_elements(3, houghton_generators(3))
    a = element_with_translation(h, (1, 2, -3))
    b = element_with_translation(h, (2, 1, -3))
    g = GeneratedSubgroup.from_elements(3, [a, b])
    report = classify(g)
    assert report.full_hirsch
    assert report.level["status"] == "not-level"
    assert report.level["witness_pair"] == [2, 1]
    assert report.level["finite_index_level_reduction"]["modulus"] == 3
    assert report.certificate["status"] == "no-certificate"
    assert report.verdict == "type F_2, not FP_3, max-n"


def test_report_json_roundtrip():
    report = classify(delta_k(3, 2))
    data = report.to_json_dict()
    assert data["schema"] == "houghton-kit/1"
    again = json.loads(json.dumps(data))
    assert again == data


def test_classify_deterministic():
    a = classify(delta_k(3, 2), seed=7).to_json_dict()
    b = classify(delta_k(3, 2), seed=7).to_json_dict()
    assert a == b


# -- CLI ------------------------------------------------------------------------


def test_cli_element_cycles(tmp_path, capsys):
    path = tmp_path / "g2.json"
    path.write_text(generator(2, 2).to_json())
    assert cli_main(["element", "cycles", "--file", str(path)]) == 0
    out = capsys.readouterr().out
    assert "infinite cycles: 1" in out


def test_cli_element_parse_word(capsys):
    assert cli_main(["element", "parse", "--word", "g2^2", "--n", "2"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["t"] == [2, -2]


def test_cli_element_compose(tmp_path, capsys):
    a = tmp_path / "a.json"
    a.write_text(generator(3, 2).to_json())
    b = tmp_path / "b.json"
    b.write_text(generator(3, 3).to_json())
    assert cli_main(["element", "compose", "--file", str(a), "--file", str(b)]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["t"] == [2, -1, -1]


def test_cli_subgroup_reports(tmp_path, capsys):
    path = write_subgroup(tmp_path, delta_k(3, 2))
    assert cli_main(["--json", "subgroup", "lattice", "--subgroup", path]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["index_in_zero_sum"] == 4
    assert cli_main(["--json", "subgroup", "hirsch", "--subgroup", path]) == 0
    assert json.loads(capsys.readouterr().out) == {"hirsch": 2, "full": True}
    assert cli_main(["--json", "subgroup", "level", "--subgroup", path]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["level"] is True and data["modulus"] == 2
    assert cli_main(["--json", "subgroup", "orbits", "--subgroup", path, "--window", "30"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["class_count"] == 2


def test_cli_blocks_roundtrip(tmp_path, capsys):
    g2sq = generator(2, 2) ** 2
    swap = transposition(2, (1, 0), (1, 1))
    pair_swap = from_cycles(2, [[(1, 0), (1, 2)], [(1, 1), (1, 3)]])
    group = GeneratedSubgroup.from_elements(2, [g2sq, swap, pair_swap])
    spath = write_subgroup(tmp_path, group)
    assert cli_main(["--json", "blocks", "find", "--subgroup", spath, "--window", "40"]) == 0
    found = json.loads(capsys.readouterr().out)
    assert found["systems"] == [[[[1, 0], [1, 1]]]]
    bpath = tmp_path / "blocks.json"
    bpath.write_text(json.dumps(found["systems"][0]))
    assert cli_main(
        ["--json", "blocks", "verify", "--subgroup", spath, "--blocks", str(bpath)]
    ) == 0
    assert json.loads(capsys.readouterr().out)["valid"] is True
    assert cli_main(
        ["--json", "blocks", "quotient", "--subgroup", spath, "--blocks", str(bpath), "--window", "60"]
    ) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["induced"][0]["t"] == [1, -1]
    assert data["kernel_generators"] == [1]


def test_cli_wreath(tmp_path, capsys):
    g2sq = generator(2, 2) ** 2
    swap = transposition(2, (1, 0), (1, 1))
    pair_swap = from_cycles(2, [[(1, 0), (1, 2)], [(1, 1), (1, 3)]])
    group = GeneratedSubgroup.from_elements(2, [g2sq, swap, pair_swap])
    spath = write_subgroup(tmp_path, group)
    bpath = tmp_path / "blocks.json"
    bpath.write_text(json.dumps([[[1, 0], [1, 1]]]))
    assert cli_main(
        ["--json", "wreath", "embed", "--subgroup", spath, "--blocks", str(bpath)]
    ) == 0
    data = json.loads(capsys.readouterr().out)
    assert len(data["embedded"]) == 3
    assert cli_main(
        [
            "--json", "wreath", "verify", "--subgroup", spath, "--blocks", str(bpath),
            "--samples", "40", "--seed", "1",
        ]
    ) == 0
    assert json.loads(capsys.readouterr().out)["ok"] is True


def test_cli_bns(capsys):
    assert cli_main(["bns", "sigma", "--n", "3", "--chi", "t1", "--m", "1"]) == 0
    assert "not in Sigma^1" in capsys.readouterr().out
    assert cli_main(["--json", "bns", "type", "--n", "4", "--kernel", "t1+t2"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["type_f_max"] == 1
    assert cli_main(
        ["--json", "bns", "certificate", "--n", "3", "--lattice", "1,2,-3;2,1,-3"]
    ) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["certified"] is False and data["offending"] == [2, 1]


def test_cli_classify_json(tmp_path, capsys):
    path = write_subgroup(tmp_path, delta_k(3, 2))
    assert cli_main(["--json", "classify", "--subgroup", path]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["schema"] == "houghton-kit/1"
    assert data["verdict"] == "type F_2, not FP_3, max-n"
    assert data["orbit_summary"]["class_count"] == 2


def test_cli_invalid_input_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"n": 2, "t": [1, 0], "threshold": 0, "head": []}))
    assert cli_main(["element", "cycles", "--file", str(bad)]) == 2
    assert cli_main(["element", "parse", "--word", "h1", "--n", "2"]) == 2
    assert cli_main(["nonsense"]) == 2
    capsys.readouterr()


def test_cli_inconclusive_exit_3(tmp_path, capsys):
    # (1,0) and (1,1) are joined only through the detour point (1,25), which
    # the doubling closure sees but the first closure does not
    gens = [
        from_cycles(2, [[(1, 0), (1, 25)]]),
        from_cycles(2, [[(1, 1), (1, 25)]]),
    ]
    group = GeneratedSubgroup.from_elements(2, gens)
    path = write_subgroup(tmp_path, group)
    code = cli_main(["subgroup", "orbits", "--subgroup", path, "--window", "10"])
    capsys.readouterr()
    assert code == 3


def test_full_hirsch_verdicts_exact_for_n_at_least_3():
    from houghton_kit.subgroups import element_with_translation

    h = GeneratedSubgroup.from_elements(3, houghton_generators(3))
    non_level = GeneratedSubgroup.from_elements(
        3,
        [
            element_with_translation(h, (1, 2, -3)),
            element_with_translation(h, (2, 1, -3)),
        ],
    )
    samples = [
        h3(),
        GeneratedSubgroup.from_elements(4, houghton_generators(4)),
        delta_k(3, 2),
        delta_k(3, 3),
        delta_k(4, 2),
        non_level,
    ]
    for group in samples:
        report = classify(group, window=24)
        assert report.full_hirsch
        n = group.n
        assert report.verdict == f"type F_{n - 1}, not FP_{n}, max-n"
        assert not report.conditional


def test_n2_full_hirsch_never_unconditional():
    for group in (
        GeneratedSubgroup.from_elements(2, houghton_generators(2)),
        delta_k(2, 2),
    ):
        report = classify(group, window=24)
        assert report.full_hirsch
        assert report.conditional
        assert "unless" in report.verdict
