import json

from contcount import cli, harness


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_counter_run_csv(tmp_path, capsys):
    stream = tmp_path / "stream.txt"
    stream.write_text("# three unit updates\n1\n1\n1\n")
    code, out, err = run_cli(capsys, "counter", "run", "--mech", "treesum",
                             "--n", "8", "--m", "1", "--zero-noise",
                             "--stream", str(stream))
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "t,coord,true_x,released_y,in_envelope"
    assert lines[1] == "1,0,1.0,1.0,1"
    assert lines[3] == "3,0,3.0,3.0,1"


def test_counter_run_validation_error(tmp_path, capsys):
    stream = tmp_path / "stream.txt"
    stream.write_text("1\n")
    code, out, err = run_cli(capsys, "counter", "run", "--mech", "treesum",
                             "--n", "0", "--m", "1", "--stream", str(stream))
    assert code == 1
    assert "n must be >= 1" in err


def test_counter_run_wrapped(tmp_path, capsys):
    stream = tmp_path / "stream.txt"
    stream.write_text("1\n1\n")
    code, out, _ = run_cli(capsys, "counter", "run", "--mech", "perfect",
                           "--wrap", "clamp", "--wrap", "under", "--wrap", "mono",
                           "--n", "4", "--m", "1", "--stream", str(stream))
    assert code == 0


def test_game_run_json(capsys):
    code, out, _ = run_cli(capsys, "game", "run", "--game", "resource",
                           "--instance", "paper:sec1.1", "--mech", "empty",
                           "--json")
    assert code == 0
    summary = json.loads(out)
    assert summary["trials"] == 1
    assert summary["mechanism"] == "empty"


def test_game_run_with_config(tmp_path, capsys):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("game = resource\ninstance = paper:noinfo\nmech = empty\n"
                   "strategy = scripted:fear-a-twin\ninst.n = 5\n")
    out_csv = tmp_path / "trials.csv"
    code, out, _ = run_cli(capsys, "game", "run", "--config", str(cfg),
                           "--out", str(out_csv))
    assert code == 0
    assert out_csv.exists()
    assert "mean_ratio" in out


def test_game_run_missing_instance(capsys):
    code, _, err = run_cli(capsys, "game", "run", "--game", "resource")
    assert code == 1
    assert "instance" in err


def test_opt_command(tmp_path, capsys):
    inst = tmp_path / "inst.txt"
    inst.write_text("2 2\n1.0 0.5\n0.8 0.8\n0 1\n0 1\n")
    code, out, _ = run_cli(capsys, "opt", "--game", "resource", "--instance", str(inst))
    assert code == 0
    assert "value = 1.8" in out
    assert "method = matching" in out


def test_reproduce_pass_and_fail(capsys, monkeypatch):
    code, out, _ = run_cli(capsys, "reproduce", "lemma:cut-cycle")
    assert code == 0
    assert "=> PASS" in out

    def failing(seed=0, **_):
        return harness.ScenarioReport("x", "", False, {}, ["nope"])

    monkeypatch.setitem(harness._SCENARIOS, "x", ("always fails", failing))
    code, out, _ = run_cli(capsys, "reproduce", "x")
    assert code == 2
    assert "=> FAIL" in out


def test_reproduce_greedy4(capsys):
    code, out, _ = run_cli(capsys, "reproduce", "thm:greedy4", "--trials", "25")
    assert code == 0
    assert "=> PASS" in out


def test_reproduce_unknown(capsys):
    code, _, err = run_cli(capsys, "reproduce", "thm:unknown")
    assert code == 1
    assert "unknown scenario" in err


def test_unknown_flag_exits_one(capsys):
    code, _, err = run_cli(capsys, "list-scenarios", "--bogus")
    assert code == 1
    assert "usage" in err.lower()
    # --help still exits 0
    assert run_cli(capsys, "--help")[0] == 0


def test_reproduce_json(capsys):
    code, out, _ = run_cli(capsys, "reproduce", "lemma:future-lb", "--json")
    assert code == 0
    payload = json.loads(out)
    assert payload["passed"] is True
    assert payload["measured"]["sw"] == 1.0


def test_list_scenarios(capsys):
    code, out, _ = run_cli(capsys, "list-scenarios")
    assert code == 0
    assert "thm:greedy4" in out
    assert "prop:private-beats-perfect" in out


def test_help_documents_every_flag():
    # no undocumented flags: each registered option string appears in the help
    run = cli.build_parser()
    # walk subparsers and check option strings show up in their own help text
    subparsers = [a for a in run._actions if hasattr(a, "choices") and a.choices]
    for action in subparsers:
        for name, subparser in action.choices.items():
            help_text = subparser.format_help()
            for act in subparser._actions:
                for opt in act.option_strings:
                    assert opt in help_text, f"{name}: {opt} missing from --help"
            nested = [a for a in subparser._actions if hasattr(a, "choices") and a.choices
                      and not isinstance(a.choices, (list, tuple))]
            for n_action in nested:
                if not hasattr(n_action.choices, "items"):
                    continue
                for _, nsub in n_action.choices.items():
                    if not hasattr(nsub, "format_help"):
                        continue
                    ntext = nsub.format_help()
                    for act in nsub._actions:
                        for opt in act.option_strings:
                            assert opt in ntext
