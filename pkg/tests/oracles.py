"""Independent oracles used to compute expected values.

Everything here is deliberately naive and separate from the package
implementation: linear scans over the raw chardef list, a recursive
glob matcher, and a from-the-rules hand simulation of the composition
state machine.
"""

from __future__ import annotations

import math
import random
import string

from vanilla.cintable import BehaviorConfig, CinTable

CJK = [chr(c) for c in range(0x4E00, 0x4E00 + 400)]


# -- linear-scan lookups ----------------------------------------------

def scan_exact(chardefs, sequence):
    return [t for s, t in chardefs if s == sequence]


def scan_extensions(chardefs, sequence):
    return any(s != sequence and s.startswith(sequence) for s, _ in chardefs)


def glob_match(pattern, text):
    """Character-by-character wildcard match, no regex."""
    if not pattern:
        return not text
    head, rest = pattern[0], pattern[1:]
    if head == "*":
        return any(glob_match(rest, text[i:]) for i in range(len(text) + 1))
    if head == "?":
        return bool(text) and glob_match(rest, text[1:])
    return bool(text) and text[0] == head and glob_match(rest, text[1:])


def scan_glob(chardefs, pattern):
    sequences = sorted({s for s, _ in chardefs})
    return [(s, scan_exact(chardefs, s)) for s in sequences if glob_match(pattern, s)]


# -- hand simulation of the composition rules -------------------------

class HandSim:
    """Rule-by-rule simulation of the engine, kept independent of it."""

    def __init__(self, chardefs, keynames, cfg: BehaviorConfig):
        self.chardefs = list(chardefs)
        self.keynames = dict(keynames)
        self.cfg = cfg
        self.reading = ""
        self.cands = None  # list of texts when window visible
        self.page = 0

    def _lookup(self, reading):
        return [t for s, t in self.chardefs if s == reading]

    @property
    def psz(self):
        return len(self.cfg.selection_keys)

    def _pages(self):
        return max(1, math.ceil(len(self.cands) / self.psz))

    def _hide(self):
        self.cands = None
        self.page = 0

    def key(self, token):
        """token: single char, or one of 'space', 'escape', 'backspace', 'enter'.

        Returns a step record dict.
        """
        commits = []
        handled = True
        beep = False
        if token == "space":
            if self.cands is not None:
                if self.cfg.space_selects_first:
                    commits.append(self.cands[self.page * self.psz])
                    self.reading = ""
                    self._hide()
                else:
                    self.page = (self.page + 1) % self._pages()
            elif self.reading:
                found = self._lookup(self.reading)
                if len(found) == 1:
                    commits.append(found[0])
                    self.reading = ""
                elif found:
                    self.cands = found
                    self.page = 0
                else:
                    beep = True
            else:
                handled = False
        elif token == "backspace":
            if self.cands is not None:
                self._hide()
            elif self.reading:
                self.reading = self.reading[:-1]
            else:
                handled = False
        elif token == "escape":
            if self.reading or self.cands is not None:
                self.reading = ""
                self._hide()
            else:
                handled = False
        elif token == "enter":
            if self.reading:
                commits.append(self.reading)
                self.reading = ""
                self._hide()
            else:
                handled = False
        elif self.cands is not None and token in self.cfg.selection_keys:
            index = self.page * self.psz + self.cfg.selection_keys.index(token)
            if index < len(self.cands):
                commits.append(self.cands[index])
                self.reading = ""
                self._hide()
            else:
                beep = True
        elif token in self.keynames:
            if len(self.reading) + 1 > self.cfg.max_seq_len:
                beep = True
            else:
                self.reading += token
                found = self._lookup(self.reading)
                self._hide()
                if len(self.reading) == self.cfg.max_seq_len and self.cfg.commit_at_max:
                    if len(found) == 1:
                        commits.append(found[0])
                        self.reading = ""
                    elif found:
                        self.cands = found
                    else:
                        beep = True
                        self.reading = self.reading[:-1]
                elif self.cfg.autocompose and found:
                    self.cands = found
        elif self.reading or self.cands is not None:
            beep = True
        else:
            handled = False
        return self._record(commits, handled, beep)

    def _record(self, commits, handled, beep):
        window = None
        if self.cands is not None:
            start = self.page * self.psz
            window = [
                (self.cfg.selection_keys[i], t)
                for i, t in enumerate(self.cands[start:start + self.psz])
            ]
        return {
            "commits": list(commits),
            "handled": handled,
            "beep": beep,
            "composing": "".join(self.keynames[c] for c in self.reading),
            "window": window,
            "page": self.page if self.cands is not None else 0,
        }

    def run(self, tokens):
        return [self.key(t) for t in tokens]


# -- random generators ------------------------------------------------

def random_table(rng: random.Random, max_entries=30, plain_selkeys=False,
                 force_defaults=False) -> CinTable:
    """A structurally valid random table.

    plain_selkeys keeps selection keys disjoint from keynames (digits vs
    letters); force_defaults pins autocompose/commit_at_max off so the
    type-then-space behavior is exercised in isolation.
    """
    keys = rng.sample(string.ascii_lowercase, rng.randint(2, 8))
    keynames = {k: rng.choice([k.upper(), rng.choice(CJK)]) for k in keys}
    n = rng.randint(1, max_entries)
    seen = set()
    chardefs = []
    for _ in range(n):
        seq = "".join(rng.choice(keys) for _ in range(rng.randint(1, 4)))
        text = "".join(rng.choice(CJK) for _ in range(rng.randint(1, 2)))
        if (seq, text) in seen:
            continue
        seen.add((seq, text))
        chardefs.append((seq, text))
    longest = max(len(s) for s, _ in chardefs)
    if plain_selkeys:
        selkeys = "".join(rng.sample(string.digits, rng.randint(2, 9)))
    else:
        pool = string.digits + string.ascii_lowercase
        selkeys = "".join(rng.sample(pool, rng.randint(2, 9)))
    behavior = BehaviorConfig(
        autocompose=False if force_defaults else rng.random() < 0.5,
        max_seq_len=rng.choice([longest, longest + 1, longest + 2]),
        commit_at_max=False if force_defaults else rng.random() < 0.5,
        selection_keys=selkeys,
        space_selects_first=True if force_defaults else rng.random() < 0.7,
    )
    return CinTable(
        ename="t" + str(rng.randrange(10**6)),
        cname=rng.choice(CJK) + rng.choice(CJK),
        keynames=keynames,
        chardefs=tuple(chardefs),
        behavior=behavior,
    )


def random_pattern(rng: random.Random, key_chars, max_len=6) -> str:
    alphabet = sorted(key_chars) + ["*", "?"]
    return "".join(rng.choice(alphabet) for _ in range(rng.randint(1, max_len)))
