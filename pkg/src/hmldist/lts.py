"""Labelled transition systems: representation, Aldebaran I/O, example families and traces."""

from __future__ import annotations

import random
from collections.abc import Iterable, Sequence

TraceWord = tuple  # tuple[str, ...] of action labels


class AutParseError(ValueError):
    """Raised for malformed ``.aut`` input; carries the 1-based line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class Lts:
    """An immutable finite LTS with dense state ids and interned action labels.

    Actions are identified by their index into ``actions``. Transitions are kept
    as a sorted, duplicate-free tuple of ``(source, action_id, target)`` triples,
    and regrouped into sorted successor tuples per ``(action, state)``.
    """

    def __init__(
        self,
        num_states: int,
        actions: Sequence[str],
        transitions: Iterable[tuple[int, int, int]],
        initial: int = 0,
        state_names: Sequence[str] | None = None,
    ):
        if num_states < 0:
            raise ValueError("number of states must be non-negative")
        actions = tuple(actions)
        if len(set(actions)) != len(actions) or any(not a for a in actions):
            raise ValueError("action labels must be unique and non-empty")
        if state_names is not None and len(state_names) != num_states:
            raise ValueError("state_names must name every state")
        triples = sorted(set(transitions))
        for src, a, dst in triples:
            if not (0 <= src < num_states and 0 <= dst < num_states):
                raise ValueError(f"transition ({src}, {a}, {dst}) has an endpoint out of range")
            if not 0 <= a < len(actions):
                raise ValueError(f"transition ({src}, {a}, {dst}) uses an unknown action id")

        self.num_states = num_states
        self.actions = actions
        self.initial = initial
        self.state_names = tuple(state_names) if state_names is not None else None
        self.transitions = tuple(triples)
        self._action_ids = {label: i for i, label in enumerate(actions)}

        succ: list[list[list[int]]] = [[[] for _ in range(num_states)] for _ in actions]
        for src, a, dst in triples:
            succ[a][src].append(dst)
        # triples are sorted, so every successor list is already sorted
        self._succ = tuple(tuple(tuple(ts) for ts in per_state) for per_state in succ)
        self._pred_masks: list[list[int]] | None = None
        self._preds: tuple[tuple[tuple[int, ...], ...], ...] | None = None

    def __repr__(self):
        return (
            f"Lts(states={self.num_states}, actions={len(self.actions)}, "
            f"transitions={len(self.transitions)})"
        )

    @property
    def num_actions(self) -> int:
        return len(self.actions)

    @property
    def num_transitions(self) -> int:
        return len(self.transitions)

    @property
    def all_states_mask(self) -> int:
        return (1 << self.num_states) - 1

    def action_id(self, label: str) -> int | None:
        """Return the id of ``label`` or None if the LTS does not use it."""
        return self._action_ids.get(label)

    def successors(self, s: int, a: int) -> tuple[int, ...]:
        return self._succ[a][s]

    def predecessors(self, s: int, a: int) -> tuple[int, ...]:
        if self._preds is None:
            preds: list[list[list[int]]] = [[[] for _ in range(self.num_states)] for _ in self.actions]
            for src, act, dst in self.transitions:
                preds[act][dst].append(src)
            self._preds = tuple(tuple(tuple(ps) for ps in per_state) for per_state in preds)
        return self._preds[a][s]

    def state_name(self, s: int) -> str:
        return self.state_names[s] if self.state_names is not None else str(s)

    def state_by_name(self, name: str) -> int:
        """Resolve a state given as a decimal index or as one of ``state_names``."""
        if self.state_names is not None and name in self.state_names:
            return self.state_names.index(name)
        try:
            s = int(name)
        except ValueError:
            raise KeyError(f"unknown state {name!r}") from None
        if not 0 <= s < self.num_states:
            raise KeyError(f"state {s} out of range 0..{self.num_states - 1}")
        return s

    def labelled_triples(self) -> set[tuple[int, str, int]]:
        return {(src, self.actions[a], dst) for src, a, dst in self.transitions}

    def pre_image(self, a: int, mask: int) -> int:
        """Bit mask of states with an ``a``-successor inside ``mask``."""
        if self._pred_masks is None:
            preds = [[0] * self.num_states for _ in self.actions]
            for src, act, dst in self.transitions:
                preds[act][dst] |= 1 << src
            self._pred_masks = preds
        preds_a = self._pred_masks[a]
        result = 0
        while mask:
            low = mask & -mask
            result |= preds_a[low.bit_length() - 1]
            mask ^= low
        return result


def mask_to_set(mask: int) -> frozenset[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return frozenset(out)


def set_to_mask(states: Iterable[int]) -> int:
    mask = 0
    for s in states:
        mask |= 1 << s
    return mask


# --- Aldebaran .aut format -------------------------------------------------

def _parse_header(line: str, lineno: int) -> tuple[int, int, int]:
    text = line.strip()
    if not text.startswith("des"):
        raise AutParseError("expected header 'des (initial, transitions, states)'", lineno)
    inner = text[3:].strip()
    if not (inner.startswith("(") and inner.endswith(")")):
        raise AutParseError("malformed header", lineno)
    parts = [p.strip() for p in inner[1:-1].split(",")]
    if len(parts) != 3:
        raise AutParseError("header needs exactly three fields", lineno)
    try:
        init, m, n = (int(p) for p in parts)
    except ValueError:
        raise AutParseError("header fields must be integers", lineno) from None
    if min(init, m, n) < 0:
        raise AutParseError("header fields must be non-negative", lineno)
    return init, m, n


def _parse_transition(line: str, lineno: int, n: int) -> tuple[int, str, int]:
    text = line.strip()
    if not (text.startswith("(") and text.endswith(")")):
        raise AutParseError("expected '(source, label, target)'", lineno)
    inner = text[1:-1]
    if "," not in inner:
        raise AutParseError("expected '(source, label, target)'", lineno)
    src_text, rest = inner.split(",", 1)
    if "," not in rest:
        raise AutParseError("expected '(source, label, target)'", lineno)
    label, dst_text = rest.rsplit(",", 1)
    label = label.strip()
    if len(label) >= 2 and label[0] == '"' and label[-1] == '"':
        label = label[1:-1]
    if not label:
        raise AutParseError("empty action label", lineno)
    try:
        src, dst = int(src_text), int(dst_text)
    except ValueError:
        raise AutParseError("state ids must be integers", lineno) from None
    for state in (src, dst):
        if not 0 <= state < n:
            raise AutParseError(f"state {state} out of range for {n} states", lineno)
    return src, label, dst


def parse_aut(data: str | bytes) -> Lts:
    """Parse an Aldebaran ``.aut`` file. Labels are interned in order of first use."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    lines = [(i + 1, line) for i, line in enumerate(data.splitlines()) if line.strip()]
    if not lines:
        raise AutParseError("empty input", 1)
    lineno, header = lines[0]
    init, m, n = _parse_header(header, lineno)
    if n > 0 and init >= n:
        raise AutParseError(f"initial state {init} out of range for {n} states", lineno)

    body = lines[1:]
    if len(body) != m:
        last = body[-1][0] if body else lineno
        raise AutParseError(f"header announces {m} transitions, found {len(body)}", last)
    actions: dict[str, int] = {}
    triples = []
    for lineno, line in body:
        src, label, dst = _parse_transition(line, lineno, n)
        a = actions.setdefault(label, len(actions))
        triples.append((src, a, dst))
    return Lts(n, list(actions), triples, initial=init)


def _quote_label(label: str) -> str:
    return label if label.isalnum() else f'"{label}"'


def write_aut(lts: Lts) -> str:
    lines = [f"des ({lts.initial},{lts.num_transitions},{lts.num_states})"]
    for src, a, dst in lts.transitions:
        lines.append(f"({src},{_quote_label(lts.actions[a])},{dst})")
    return "\n".join(lines) + "\n"


# --- example families --------------------------------------------------------

def gen_chain_a(n: int) -> Lts:
    """The chain x_n -a-> x_{n-1} -a-> ... -a-> x_0; state x_i has id i."""
    if n < 0:
        raise ValueError("n must be non-negative")
    transitions = [(i, 0, i - 1) for i in range(1, n + 1)]
    return Lts(n + 1, ["a"], transitions, state_names=[f"x{i}" for i in range(n + 1)])


def gen_ladder_b(n: int) -> Lts:
    """Two a-chains x and y with alternating cross edges and a loop on y_0.

    State x_i has id i and y_i has id n + 1 + i.
    """
    if n < 0:
        raise ValueError("n must be non-negative")

    def x(i):
        return i

    def y(i):
        return n + 1 + i

    transitions = [(y(0), 0, y(0))]
    for i in range(1, n + 1):
        transitions.append((y(i), 0, y(i - 1)))
        transitions.append((x(i), 0, x(i - 1)))
        if i % 2 == 0:
            transitions.append((y(i), 0, x(i - 1)))
        else:
            transitions.append((x(i), 0, y(i - 1)))
    names = [f"x{i}" for i in range(n + 1)] + [f"y{i}" for i in range(n + 1)]
    return Lts(2 * (n + 1), ["a"], transitions, state_names=names)


def gen_example_m() -> Lts:
    """s0 -a-> s1 -a-> s2 and s1 -b-> s0."""
    return Lts(3, ["a", "b"], [(0, 0, 1), (1, 0, 2), (1, 1, 0)], state_names=["s0", "s1", "s2"])


def random_lts(
    num_states: int,
    num_actions: int = 2,
    density: float = 2.0,
    seed: int | None = None,
    rng: random.Random | None = None,
) -> Lts:
    """Uniformly random LTS with ``round(density * num_states)`` distinct transitions.

    ``density`` is the mean out-degree. Actions are labelled a, b, c, ...
    """
    if num_states < 1 or num_actions < 1:
        raise ValueError("need at least one state and one action")
    rng = rng or random.Random(seed)
    total = num_states * num_actions * num_states
    m = min(total, max(0, round(density * num_states)))
    picks = rng.sample(range(total), m)
    transitions = []
    for code in picks:
        src, rest = divmod(code, num_actions * num_states)
        a, dst = divmod(rest, num_states)
        transitions.append((src, a, dst))
    labels = [_action_name(i) for i in range(num_actions)]
    return Lts(num_states, labels, transitions)


def _action_name(i: int) -> str:
    letters = "abcdefghijklmnopqrstuvwxyz"
    return letters[i] if i < len(letters) else f"a{i}"


# --- traces ------------------------------------------------------------------

def traces_up_to(lts: Lts, s: int, max_len: int) -> set[TraceWord]:
    """All traces of ``s`` of length at most ``max_len``, as tuples of labels."""
    if max_len < 0:
        raise ValueError("max_len must be non-negative")
    result: set[TraceWord] = {()}
    frontier: dict[TraceWord, frozenset[int]] = {(): frozenset([s])}
    for _ in range(max_len):
        nxt: dict[TraceWord, frozenset[int]] = {}
        for word, states in frontier.items():
            for a, label in enumerate(lts.actions):
                targets = frozenset(t for u in states for t in lts.successors(u, a))
                if targets:
                    nxt[word + (label,)] = targets
        if not nxt:
            break
        result.update(nxt)
        frontier = nxt
    return result


def has_trace(lts: Lts, s: int, word: Sequence[str]) -> bool:
    current = {s}
    for label in word:
        a = lts.action_id(label)
        if a is None:
            return False
        current = {t for u in current for t in lts.successors(u, a)}
        if not current:
            return False
    return True
