import random
from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import HandSim, random_table, scan_exact
from vanilla.core import KeyEvent
from vanilla.engine import Session, WindowHidden, new_session
from vanilla.storage import build_store

NAMED = {"space", "escape", "backspace", "enter"}


def event_for(token: str) -> KeyEvent:
    return KeyEvent.named(token) if token in NAMED else KeyEvent.literal(token)


def drive(session: Session, tokens):
    return [session.process_key(event_for(t)) for t in tokens]


def session_for(table, **overrides) -> Session:
    behavior = replace(table.behavior, **overrides) if overrides else table.behavior
    return Session(build_store(table), behavior, table.keynames)


def assert_agrees(output, step):
    """One engine output against one hand-simulation step record."""
    assert list(output.commits) == step["commits"]
    assert output.handled == step["handled"]
    assert output.beep == step["beep"]
    assert output.view.composing == step["composing"]
    if step["window"] is None:
        assert output.window is None
    else:
        assert output.window is not None
        assert [(c.label, c.text) for c in output.window.items] == step["window"]
        assert output.window.page == step["page"]


def run_both(table, tokens, **overrides):
    behavior = replace(table.behavior, **overrides) if overrides else table.behavior
    sim = HandSim(table.chardefs, table.keynames, behavior)
    session = Session(build_store(table), behavior, table.keynames)
    outputs = drive(session, tokens)
    steps = sim.run(tokens)
    for output, step in zip(outputs, steps):
        assert_agrees(output, step)
    return outputs


class TestNewSession:
    def test_fresh_state(self, t1):
        session = session_for(t1)
        assert session.reading == []
        assert session.current_window() is None

    def test_fresh_view_empty(self, t1):
        assert session_for(t1).current_view().composing == ""

    def test_sessions_independent(self, t1):
        store = build_store(t1)
        one = new_session(store, t1.behavior, t1.keynames)
        other = new_session(store, t1.behavior, t1.keynames)
        one.process_key(KeyEvent.literal("a"))
        assert other.current_view().composing == ""


class TestGoldenTransitions:
    """The seven derived key-sequence examples, checked against the
    hand simulation and pinned byte-exact."""

    def test_ab_space_commits(self, t1):
        outputs = run_both(t1, ["a", "b", "space"])
        assert outputs[-1].commits == ("明",)
        assert outputs[-1].view.composing == ""

    def test_space_opens_window_then_select(self, t1):
        outputs = run_both(t1, ["a", "space", "2"])
        window = outputs[1].window
        assert [(c.label, c.text) for c in window.items] == [("1", "日"), ("2", "月")]
        assert outputs[1].commits == ()
        assert outputs[2].commits == ("月",)

    def test_double_space_selects_first(self, t1):
        outputs = run_both(t1, ["a", "space", "space"])
        assert outputs[-1].commits == ("日",)

    def test_escape_clears(self, t1):
        outputs = run_both(t1, ["a", "escape"])
        assert outputs[-1].commits == ()
        assert outputs[-1].view.composing == ""
        assert outputs[-1].handled

    def test_passthrough_on_empty(self, t1):
        outputs = run_both(t1, ["z"])
        assert outputs[0].handled is False

    def test_commit_at_max(self, t1):
        outputs = run_both(t1, ["a", "b"], commit_at_max=True)
        assert outputs[-1].commits == ("明",)

    def test_autocompose_shows_window(self, t1):
        outputs = run_both(t1, ["a"], autocompose=True)
        window = outputs[0].window
        assert window is not None
        assert [(c.label, c.text) for c in window.items] == [("1", "日"), ("2", "月")]


class TestTransitionEdges:
    def test_overflow_beeps(self, t1):
        outputs = run_both(t1, ["a", "b", "a"])
        assert outputs[-1].beep
        assert outputs[-1].view.composing == "AB"

    def test_space_on_empty_passes_through(self, t1):
        outputs = run_both(t1, ["space"])
        assert outputs[0].handled is False

    def test_space_no_candidates_beeps(self, t1):
        # "ba" is not a chardef sequence
        outputs = run_both(t1, ["b", "a", "space"])
        assert outputs[-1].beep
        assert outputs[-1].view.composing == "BA"

    def test_backspace_hides_window_keeps_reading(self, t1):
        outputs = run_both(t1, ["a", "space", "backspace"])
        assert outputs[-1].window is None
        assert outputs[-1].view.composing == "A"

    def test_backspace_drops_last_key(self, t1):
        outputs = run_both(t1, ["a", "b", "backspace"])
        assert outputs[-1].view.composing == "A"

    def test_backspace_on_empty_passes_through(self, t1):
        outputs = run_both(t1, ["backspace"])
        assert outputs[0].handled is False

    def test_enter_commits_raw_reading(self, t1):
        outputs = run_both(t1, ["a", "b", "enter"])
        assert outputs[-1].commits == ("ab",)

    def test_enter_on_empty_passes_through(self, t1):
        outputs = run_both(t1, ["enter"])
        assert outputs[0].handled is False

    def test_unmapped_char_with_reading_beeps(self, t1):
        outputs = run_both(t1, ["a", "z"])
        assert outputs[-1].beep
        assert outputs[-1].view.composing == "A"

    def test_selection_label_off_page_beeps(self, t1):
        # window for "a" has 2 items; label "3" exists but is unassigned
        outputs = run_both(t1, ["a", "space", "3"])
        assert outputs[-1].beep
        assert outputs[-1].commits == ()

    def test_commit_at_max_zero_candidates_keeps_partial_input(self, t1):
        outputs = run_both(t1, ["b", "a"], commit_at_max=True)
        assert outputs[-1].beep
        assert outputs[-1].view.composing == "B"

    def test_selection_beats_keyname_when_window_visible(self, t1):
        # make 'a' both a keyname and a selection key
        outputs = run_both(t1, ["b", "a"], selection_keys="a23", autocompose=True)
        # window for "b" shows 木 under label 'a'; pressing 'a' selects it
        assert outputs[-1].commits == ("木",)

    def test_selection_char_ordinary_when_window_hidden(self, t1):
        outputs = run_both(t1, ["1"], selection_keys="123")
        assert outputs[0].handled is False

    def test_ctrl_modified_key_passes_through(self, t1):
        session = session_for(t1)
        session.process_key(KeyEvent.literal("a"))
        output = session.process_key(KeyEvent.literal("b", "ctrl"))
        assert output.handled is False
        assert session.current_view().composing == "A"

    def test_space_advances_page_when_not_space_selects_first(self, t1):
        outputs = run_both(
            t1, ["a", "space", "space"], selection_keys="1", space_selects_first=False
        )
        window = outputs[-1].window
        assert window.page == 1
        assert [(c.label, c.text) for c in window.items] == [("1", "月")]


class TestPaging:
    def make_table(self):
        rng = random.Random(0)
        from vanilla.cintable import parse_cin
        lines = ["%selkey 123", "%keyname begin", "a A", "%keyname end", "%chardef begin"]
        lines += [f"a {chr(0x4E00 + i)}" for i in range(5)]
        lines.append("%chardef end")
        table, diags = parse_cin("\n".join(lines) + "\n")
        assert not diags
        return table

    def test_next_page_labels_reassigned(self):
        table = self.make_table()
        session = session_for(table)
        drive(session, ["a", "space"])
        output = session.page_candidates("next")
        window = output.window
        assert window.page == 1
        assert [(c.label, c.text) for c in window.items] == [
            ("1", chr(0x4E00 + 3)), ("2", chr(0x4E00 + 4)),
        ]

    def test_single_page_wraps_to_itself(self, t1):
        session = session_for(t1)
        drive(session, ["a", "space"])
        output = session.page_candidates("next")
        assert output.window.page == 0

    def test_prev_wraps(self):
        table = self.make_table()
        session = session_for(table)
        drive(session, ["a", "space"])
        output = session.page_candidates("prev")
        assert output.window.page == 1

    def test_hidden_window_raises(self, t1):
        with pytest.raises(WindowHidden):
            session_for(t1).page_candidates("next")


class TestCurrentView:
    def test_labels_not_key_chars(self, t1):
        session = session_for(t1)
        session.process_key(KeyEvent.literal("a"))
        assert session.current_view().composing == "A"

    def test_two_keys(self, t1):
        session = session_for(t1)
        drive(session, ["a", "b"])
        view = session.current_view()
        assert view.composing == "AB"
        assert view.cursor == 2


class TestProperties:
    def test_determinism(self, t1):
        tokens = ["a", "b", "space", "a", "space", "2", "z", "a", "escape"]
        first = run_both(t1, tokens)
        second = run_both(t1, tokens)
        assert [o.commits for o in first] == [o.commits for o in second]

    def test_commit_oracle_t1(self, t1):
        self._check_commit_oracle(t1)

    def test_commit_oracle_random_tables(self):
        rng = random.Random(31337)
        for _ in range(30):
            self._check_commit_oracle(
                random_table(rng, plain_selkeys=True, force_defaults=True)
            )

    def _check_commit_oracle(self, table):
        """Typing any chardef sequence then space commits the unique
        candidate, or opens the window when there are several."""
        assert not table.behavior.commit_at_max
        for seq in sorted({s for s, _ in table.chardefs}):
            session = session_for(table)
            outputs = drive(session, list(seq) + ["space"])
            expected = scan_exact(table.chardefs, seq)
            last = outputs[-1]
            if len(expected) == 1:
                assert last.commits == (expected[0],)
                assert last.window is None
            else:
                assert last.commits == ()
                assert last.window is not None
                assert last.window.items[0].text == expected[0]

    @given(st.data())
    @settings(max_examples=30, deadline=None)
    def test_reading_never_exceeds_max(self, data):
        rng = random.Random(data.draw(st.integers(0, 2**32)))
        table = random_table(rng)
        session = session_for(table)
        alphabet = sorted(table.keynames) + list(NAMED) + ["z", "!", "1"]
        tokens = data.draw(st.lists(st.sampled_from(alphabet), max_size=300))
        for token in tokens:
            session.process_key(event_for(token))
            assert len(session.reading) <= table.behavior.max_seq_len

    def test_passthrough_leaves_state_identical(self, t1):
        session = session_for(t1)
        drive(session, ["a"])
        before = (list(session.reading), session.window_visible, session._page)
        output = session.process_key(KeyEvent.literal("b", "ctrl"))
        assert output.handled is False
        assert (list(session.reading), session.window_visible, session._page) == before

    def test_commits_come_from_table_or_reading(self):
        rng = random.Random(2718)
        for _ in range(10):
            table = random_table(rng)
            texts = {t for _, t in table.chardefs}
            session = session_for(table)
            alphabet = sorted(table.keynames) + list(NAMED) + list(table.behavior.selection_keys)
            for _ in range(500):
                token = rng.choice(alphabet)
                output = session.process_key(event_for(token))
                for committed in output.commits:
                    assert committed in texts or all(c in table.keynames for c in committed)

    def test_random_streams_match_hand_simulation(self):
        rng = random.Random(5150)
        for _ in range(20):
            table = random_table(rng)
            alphabet = sorted(table.keynames) + list(NAMED) + ["z", "9"]
            tokens = [rng.choice(alphabet) for _ in range(200)]
            run_both(table, tokens)
