"""Composition state machine over a table store.

A Session consumes KeyEvents and produces EngineOutputs describing
commits, the composition view, the candidate window, beeps and
passthroughs.  The transition rules:

  1. A keyname char (window hidden, or visible but not a selection key)
     appends to the reading if the result fits max_seq_len, else beeps.
     With autocompose on, the window shows whenever the new reading has
     candidates.  At max length with commit_at_max: a unique candidate
     commits, several open the window, none beeps and the key is
     dropped.
  2. Space with a hidden window looks up the reading: one candidate
     commits, several open the window, none beeps.  With the window
     visible, space commits the first candidate of the current page
     when space_selects_first, otherwise advances one page (wrapping).
  3. A selection key with the window visible commits the candidate
     carrying that label on the current page (beep if the label has no
     candidate on this page).  This beats rule 1 for chars that are
     both keynames and selection keys.
  4. Backspace hides a visible window (keeping the reading), else drops
     the last reading key; on an empty session it passes through.
  5. Escape clears reading and window; on an empty session it passes
     through.
  6. Enter commits the raw reading chars verbatim; empty passes
     through.
  7. Anything else passes through on an empty session and beeps
     otherwise.

Ctrl- or alt-modified keys always pass through; the engine only ever
consumes plain (possibly shifted) keys.
"""

from __future__ import annotations

from dataclasses import dataclass

from .cintable import BehaviorConfig
from .core import (
    Candidate,
    CandidateList,
    CompositionView,
    KeyEvent,
    ServiceContext,
    VanillaError,
)


class WindowHidden(VanillaError):
    def __init__(self):
        super().__init__("candidate window is hidden")


@dataclass(frozen=True)
class EngineOutput:
    handled: bool
    view: CompositionView
    commits: tuple[str, ...] = ()
    window: CandidateList | None = None
    beep: bool = False


class Session:
    """Live composition state bound to one store; exclusively owned."""

    def __init__(self, store, config: BehaviorConfig, keynames: dict[str, str],
                 ctx: ServiceContext | None = None):
        self.store = store
        self.config = config
        self.keynames = dict(keynames)
        self.ctx = ctx or ServiceContext()
        self.reading: list[str] = []
        self._candidates: list[str] = []  # all candidates when window visible
        self._page = 0
        self.window_visible = False

    # -- views ---------------------------------------------------------

    def current_view(self) -> CompositionView:
        composing = "".join(self.keynames[c] for c in self.reading)
        return CompositionView(composing=composing, cursor=len(composing))

    @property
    def page_size(self) -> int:
        return len(self.config.selection_keys)

    @property
    def page_count(self) -> int:
        return max(1, -(-len(self._candidates) // self.page_size))

    def current_window(self) -> CandidateList | None:
        if not self.window_visible:
            return None
        start = self._page * self.page_size
        items = tuple(
            Candidate(label=self.config.selection_keys[i], text=text)
            for i, text in enumerate(self._candidates[start:start + self.page_size])
        )
        return CandidateList(items=items, highlighted=0, page=self._page,
                             page_size=self.page_size)

    # -- transitions ---------------------------------------------------

    def process_key(self, event: KeyEvent) -> EngineOutput:
        if event.modifiers & {"ctrl", "alt"}:
            return self._passthrough()
        if event.name == "space":
            return self._on_space()
        if event.name == "backspace":
            return self._on_backspace()
        if event.name == "escape":
            return self._on_escape()
        if event.name == "enter":
            return self._on_enter()
        char = event.char
        if self.window_visible and char in self.config.selection_keys:
            return self._on_selection(char)
        if char in self.keynames:
            return self._on_keyname(char)
        if not self.reading and not self.window_visible:
            return self._passthrough()
        return self._out(beep=True)

    def page_candidates(self, direction: str) -> EngineOutput:
        if not self.window_visible:
            raise WindowHidden()
        step = 1 if direction == "next" else -1
        self._page = (self._page + step) % self.page_count
        return self._out()

    # -- rule bodies ---------------------------------------------------

    def _on_keyname(self, char: str) -> EngineOutput:
        if len(self.reading) + 1 > self.config.max_seq_len:
            return self._out(beep=True)
        self.reading.append(char)
        sequence = "".join(self.reading)
        candidates = self.store.lookup_exact(sequence)
        self._hide_window()
        if len(self.reading) == self.config.max_seq_len and self.config.commit_at_max:
            if len(candidates) == 1:
                return self._commit(candidates[0])
            if len(candidates) > 1:
                self._show_window(candidates)
                return self._out()
            self.reading.pop()
            return self._out(beep=True)
        if self.config.autocompose and candidates:
            self._show_window(candidates)
        return self._out()

    def _on_space(self) -> EngineOutput:
        if self.window_visible:
            if self.config.space_selects_first:
                text = self._candidates[self._page * self.page_size]
                return self._commit(text)
            self._page = (self._page + 1) % self.page_count
            return self._out()
        if not self.reading:
            return self._passthrough()
        candidates = self.store.lookup_exact("".join(self.reading))
        if len(candidates) == 1:
            return self._commit(candidates[0])
        if candidates:
            self._show_window(candidates)
            return self._out()
        return self._out(beep=True)

    def _on_selection(self, char: str) -> EngineOutput:
        offset = self.config.selection_keys.index(char)
        index = self._page * self.page_size + offset
        if offset >= self.page_size or index >= len(self._candidates):
            return self._out(beep=True)
        return self._commit(self._candidates[index])

    def _on_backspace(self) -> EngineOutput:
        if self.window_visible:
            self._hide_window()
            return self._out()
        if self.reading:
            self.reading.pop()
            return self._out()
        return self._passthrough()

    def _on_escape(self) -> EngineOutput:
        if self.reading or self.window_visible:
            self.reading.clear()
            self._hide_window()
            return self._out()
        return self._passthrough()

    def _on_enter(self) -> EngineOutput:
        if self.reading:
            return self._commit("".join(self.reading))
        return self._passthrough()

    # -- helpers -------------------------------------------------------

    def _show_window(self, candidates: list[str]):
        self._candidates = list(candidates)
        self._page = 0
        self.window_visible = True

    def _hide_window(self):
        self._candidates = []
        self._page = 0
        self.window_visible = False

    def _commit(self, text: str) -> EngineOutput:
        self.reading.clear()
        self._hide_window()
        return self._out(commits=(text,))

    def _out(self, commits: tuple[str, ...] = (), beep: bool = False) -> EngineOutput:
        if beep:
            self.ctx.beep()
        return EngineOutput(
            handled=True,
            view=self.current_view(),
            commits=commits,
            window=self.current_window(),
            beep=beep,
        )

    def _passthrough(self) -> EngineOutput:
        return EngineOutput(handled=False, view=self.current_view(),
                            window=self.current_window())


def new_session(store, config: BehaviorConfig, keynames: dict[str, str],
                ctx: ServiceContext | None = None) -> Session:
    return Session(store, config, keynames, ctx=ctx)
