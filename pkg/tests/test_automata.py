import itertools

import numpy as np
import pytest

from qfa import automata, linalg, semantics
from qfa.automata import (
    HALT_ON_ENTER,
    LEFT_END,
    RIGHT_END,
    ClassicalAutomaton,
    is_reversible,
    make_qfa,
    prfa_to_qfa,
    rfa_to_prfa,
    validate,
    validate_classical,
    validate_prfa,
)
from qfa.constructions import (
    astar_bstar_dfa,
    block_dfa,
    example_qfa,
    parity_prfa_trio,
    random_prfa,
)


def brute_force_reversibility(c):
    """Independent predecessor count per (target, symbol)."""
    bad = []
    symbols = set(a for (_, a) in c.transitions)
    for a in sorted(symbols):
        for t in range(c.n_states):
            sources = [s for s in range(c.n_states) if c.transitions.get((s, a)) == t]
            if len(sources) > 1:
                bad.append((t, a, sources))
    return bad


class TestValidate:
    def test_worked_example_clean(self):
        assert validate(example_qfa()) == []

    def test_scaled_matrix_flagged(self):
        q = example_qfa()
        broken = dict(q.unitaries)
        broken["a"] = broken["a"] * 1.1
        bad = automata.QuantumAutomaton(
            states=q.states,
            alphabet=q.alphabet,
            accepting=q.accepting,
            rejecting=q.rejecting,
            initial=q.initial,
            unitaries=broken,
        )
        problems = validate(bad)
        assert len(problems) == 1
        assert "'a'" in problems[0] and "unitarity" in problems[0]

    def test_overlapping_partition_flagged(self):
        q = example_qfa()
        bad = automata.QuantumAutomaton(
            states=q.states,
            alphabet=q.alphabet,
            accepting=frozenset({2, 3}),
            rejecting=q.rejecting,
            initial=q.initial,
            unitaries=q.unitaries,
        )
        assert any("overlap" in p for p in validate(bad))

    def test_unnormalized_initial_flagged(self):
        q = example_qfa()
        bad = automata.QuantumAutomaton(
            states=q.states,
            alphabet=q.alphabet,
            accepting=q.accepting,
            rejecting=q.rejecting,
            initial=q.initial * 2.0,
            unitaries=q.unitaries,
        )
        assert any("norm" in p for p in validate(bad))

    def test_validated_automata_run_everywhere(self):
        q = example_qfa()
        assert validate(q) == []
        semantics.run_measure_many(q, "aaa")
        semantics.run_measure_once(q, "aaa")
        semantics.run_multiscan(q, "aaa", 2)


class TestMakeQfa:
    def test_missing_left_end_becomes_identity(self):
        q = example_qfa()
        assert np.array_equal(linalg.to_dense(q.unitaries[LEFT_END]), np.eye(4, dtype=complex))

    def test_rejects_unknown_symbols(self):
        with pytest.raises(ValueError):
            make_qfa(
                states=("q0",),
                alphabet=("a",),
                accepting=(),
                rejecting=(),
                initial=(1.0,),
                partial_unitaries={"z": {"q0": (1.0,)}},
            )


class TestIsReversible:
    def test_self_loop_single_state(self):
        c = ClassicalAutomaton(
            states=("s",),
            alphabet=("a",),
            start=0,
            accepting=frozenset({0}),
            transitions={(0, "a"): 0},
        )
        flag, tuples = is_reversible(c)
        assert flag and tuples == []

    def test_astar_bstar_not_reversible(self):
        c = astar_bstar_dfa()
        flag, tuples = is_reversible(c)
        assert not flag
        # the dead state has two a-predecessors
        assert ("qb", "dead", "dead", "a") in tuples

    def test_block_dfa_witnesses(self):
        c = block_dfa(1)
        flag, tuples = is_reversible(c)
        assert not flag
        merge_targets = {t for (_, _, t, _) in tuples}
        assert "F" in merge_targets or "D" in merge_targets

    def test_matches_brute_force(self):
        for c in (astar_bstar_dfa(), block_dfa(1), block_dfa(2)):
            flag, tuples = is_reversible(c)
            oracle = brute_force_reversibility(c)
            assert flag == (not oracle)
            pair_count = sum(len(srcs) * (len(srcs) - 1) // 2 for (_, _, srcs) in oracle)
            assert len(tuples) == pair_count


class TestRfaToPrfa:
    def test_two_cycle_parity(self):
        rfa = parity_prfa_trio()[0][0]
        p = rfa_to_prfa(rfa)
        assert validate_prfa(p) == []
        assert all(prob == 1.0 for edges in p.transitions.values() for _, prob in edges)
        assert p.initial_distribution == ((rfa.start, 1.0),)

    def test_language_preserved(self):
        for rfa in parity_prfa_trio()[0]:
            p = rfa_to_prfa(rfa)
            for j in range(13):
                word = "a" * j
                expected = semantics.run_dfa(rfa, word)
                out = semantics.run_prfa(p, word)
                assert out.p_acc == pytest.approx(1.0 if expected else 0.0, abs=1e-12)

    def test_non_reversible_rejected(self):
        c = ClassicalAutomaton(
            states=("u", "v", "acc"),
            alphabet=("a",),
            start=0,
            accepting=frozenset({2}),
            rejecting=frozenset(),
            transitions={
                (0, LEFT_END): 0,
                (1, LEFT_END): 1,
                (0, "a"): 1,
                (1, "a"): 1,
                (0, RIGHT_END): 2,
                (1, RIGHT_END): 2,
            },
            halting_mode=HALT_ON_ENTER,
        )
        with pytest.raises(ValueError):
            rfa_to_prfa(c)


class TestPrfaToQfa:
    def test_deterministic_rfa_gives_unit_amplitudes(self):
        rfa = parity_prfa_trio()[0][0]
        q = prfa_to_qfa(rfa_to_prfa(rfa))
        assert validate(q) == []
        for j in range(10):
            out = semantics.run_measure_many(q, "a" * j)
            assert min(abs(out.p_acc - 0.0), abs(out.p_acc - 1.0)) <= 1e-9

    def test_majority_bundle_probability(self):
        _, trio = parity_prfa_trio()
        q = prfa_to_qfa(trio)
        for j in range(0, 30):
            out = semantics.run_measure_many(q, "a" * j)
            member = j >= 3 and j % 2 == 1
            correct = out.p_acc if member else out.p_rej
            assert correct >= 2.0 / 3.0 - 1e-9

    def test_half_probability_edge(self):
        p = automata.ProbabilisticAutomaton(
            states=("s", "t", "u", "acc", "rej", "acc2"),
            alphabet=("a",),
            initial_distribution=((0, 1.0),),
            accepting=frozenset({3, 5}),
            rejecting=frozenset({4}),
            transitions={
                (0, "a"): [(1, 0.5), (2, 0.5)],
                (1, "a"): [(3, 1.0)],
                (2, "a"): [(4, 1.0)],
                (0, RIGHT_END): [(5, 1.0)],
                (1, RIGHT_END): [(3, 1.0)],
                (2, RIGHT_END): [(4, 1.0)],
            },
        )
        assert validate_prfa(p) == []
        q = prfa_to_qfa(p)
        amp = linalg.to_dense(q.unitaries["a"])[0, 1]
        assert amp == pytest.approx(1.0 / np.sqrt(2.0), abs=1e-15)

    def test_outcomes_match_on_random_prfas(self):
        for seed in range(4):
            p = random_prfa(seed)
            assert validate_prfa(p) == []
            q = prfa_to_qfa(p)
            assert validate(q) == []
            for word in itertools.chain.from_iterable(
                itertools.product("ab", repeat=k) for k in range(7)
            ):
                o1 = semantics.run_prfa(p, word)
                o2 = semantics.run_measure_many(q, word)
                assert o1.p_acc == pytest.approx(o2.p_acc, abs=1e-9)
                assert o1.p_rej == pytest.approx(o2.p_rej, abs=1e-9)
                assert o1.p_non == pytest.approx(o2.p_non, abs=1e-9)


class TestClassicalValidation:
    def test_halting_state_with_outgoing_flagged(self):
        c = ClassicalAutomaton(
            states=("s", "acc"),
            alphabet=("a",),
            start=0,
            accepting=frozenset({1}),
            rejecting=frozenset(),
            transitions={
                (0, LEFT_END): 0,
                (0, "a"): 1,
                (0, RIGHT_END): 1,
                (1, "a"): 0,
            },
            halting_mode=HALT_ON_ENTER,
        )
        assert any("outgoing" in p for p in validate_classical(c))

    def test_missing_transition_flagged(self):
        c = ClassicalAutomaton(
            states=("s",),
            alphabet=("a", "b"),
            start=0,
            accepting=frozenset(),
            transitions={(0, "a"): 0},
        )
        assert any("missing" in p for p in validate_classical(c))
