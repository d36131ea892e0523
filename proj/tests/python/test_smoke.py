import numpy as np
import pytest

import ptres


def test_markov_has_no_memory():
    ch = [ptres.random_channel(2, 2, 2, seed=s) for s in (1, 2)]
    t = ptres.markov_process(ch, np.diag([0.7, 0.3]))
    assert t.validate()["pass"]
    assert t.steps == 2
    assert t.legs == ["o0", "i0", "o1", "i1", "o2"]
    assert ptres.non_markovianity(t)["value"] < 1e-9


def test_swap_example_has_two_bits(tmp_path):
    path = str(tmp_path / "swap.json")
    code, _, _ = ptres.run_command(["example", "swap2", "--out", path])
    assert code == 0
    t = ptres.read_process(path)
    rep = ptres.non_markovianity(t)
    assert abs(rep["value"] - 2.0) < 1e-9
    assert rep["exact"]
    verdict, _ = ptres.check_membership("q,none", t)
    assert verdict == "NotFree"


def test_bell_robustness():
    t = ptres.markov_open_process([ptres.identity_channel(2)])
    rep = ptres.global_robustness(t)
    assert abs(rep["value"] - 1.0) < 1e-6
    assert rep["witness"].validate(1e-7)["pass"]
    eq = ptres.thm3_check(t)
    assert eq["pass"] and abs(eq["dmax"] - 1.0) < 1e-6


def test_signatures_and_samples():
    assert ptres.memory_signature("q,none") == ("1", "1")
    assert ptres.memory_signature("eb,q") == ("inf", "1")
    assert len(ptres.theories()) == 9
    s = ptres.sample_free_process("q,none", seed=4)
    assert ptres.check_membership("q,none", s, 1e-7)[0] == "Free"


def test_left_action_paths_agree():
    t = ptres.random_process_tensor(2, seed=3)
    z = ptres.random_free_superprocess("q,q", 2, seed=5)
    a = ptres.left_action(t, z, "circuit").choi
    b = ptres.left_action(t, z, "contraction").choi
    assert np.max(np.abs(a - b)) < 1e-10


def test_errors_are_typed():
    t = ptres.markov_open_process([ptres.identity_channel(2)])
    with pytest.raises(ptres.CapabilityError):
        ptres.global_robustness(t, "product")
    bad = t.with_choi(2 * t.choi)
    with pytest.raises(ptres.DomainError):
        ptres.check_membership("q,none", bad)
    with pytest.raises(ValueError):
        ptres.QuantumChannel(np.eye(4), [2], [2], True)
