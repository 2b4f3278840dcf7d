"""Games, strategies, and value computations.

A game draws a :class:`Round` (one question per player, ``None`` for players
that are not queried) and decides acceptance from the answers.  Finite games
additionally enumerate their rounds with exact rational weights, which is what
the exact evaluators consume.  Randomised evaluation draws rounds in fixed-size
chunks, each chunk seeded from its own counter-based stream, so results do not
depend on how chunks are spread over workers.
"""

from __future__ import annotations

import itertools
import math
import multiprocessing
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial, lcm
from typing import Any, Callable, Iterable, Mapping, Sequence

import numpy as np

from .errors import InputError, InvalidGame, InvariantError, StrategyError, TooLarge
from .rng import stream

BRUTE_FORCE_CAP = 10**7
QUANTUM_DIM_CAP = 2**12
MC_CHUNK = 4096
PSD_FLOOR = -1e-10
COMPLETENESS_TOL = 1e-10
IMAG_TOL = 1e-9


@dataclass(frozen=True)
class Round:
    """One referee draw.

    ``context`` holds referee-private data the checker needs (a clause, sign
    bits, which sub-test ran); it is never shown to players.
    """

    questions: tuple
    context: Any = None
    auto_accept: bool = False

    @property
    def queried(self) -> list[int]:
        return [i for i, q in enumerate(self.questions) if q is not None]


class Game:
    """Base class: subclasses implement ``sample`` and ``check``; finite ones ``rounds``."""

    r: int = 2
    name: str = "game"
    xor: bool = False
    symmetric: bool = False
    answer_alphabet: Sequence | None = None

    def sample(self, rng: np.random.Generator) -> Round:
        raise NotImplementedError

    def check(self, rnd: Round, answers: Sequence) -> bool:
        raise NotImplementedError

    def rounds(self) -> list[tuple[Round, Fraction]]:
        raise TooLarge(f"{self.name}: exhaustive round enumeration not available")

    def accepts(self, rnd: Round, answers: Sequence) -> bool:
        return rnd.auto_accept or bool(self.check(rnd, answers))

    def describe(self) -> dict:
        return {"name": self.name, "players": self.r, "xor": self.xor, "symmetric": self.symmetric}


def merge_rounds(pairs: Iterable[tuple[Round, Fraction]]) -> list[tuple[Round, Fraction]]:
    """Combine identical rounds, dropping zero weights; order of first appearance kept."""
    acc: dict[Round, Fraction] = {}
    for rnd, w in pairs:
        if w:
            acc[rnd] = acc.get(rnd, Fraction(0)) + w
    return list(acc.items())


def check_distribution(pairs: Sequence[tuple[Round, Fraction]]):
    total = Fraction(0)
    for _, w in pairs:
        if not isinstance(w, Fraction) or w <= 0:
            raise InvalidGame(f"weight {w!r} is not a positive rational")
        total += w
    if total != 1:
        raise InvalidGame(f"weights sum to {total}, not 1")


class TableGame(Game):
    """Game given by an explicit round list with exact weights.

    ``predicate(questions, answers)`` or ``accept`` (a set of accepted
    ``(questions, answers)`` pairs) defines V for plain tables; compiled games
    pass ``checker(round, answers)`` instead so round context is available.
    """

    def __init__(
        self,
        r: int,
        dist: Sequence,
        answers: Sequence | None = None,
        predicate: Callable | None = None,
        accept: Iterable | None = None,
        checker: Callable | None = None,
        xor: bool = False,
        symmetric: bool = False,
        name: str = "table",
        verify_symmetry: bool = True,
    ):
        if r < 2:
            raise InvalidGame("a game needs at least two players")
        self.r = r
        self.name = name
        self.xor = xor
        self.answer_alphabet = list(answers) if answers is not None else None
        pairs = []
        for item, w in dist:
            rnd = item if isinstance(item, Round) else Round(tuple(item))
            if len(rnd.questions) != r:
                raise InvalidGame(f"question tuple {rnd.questions} has wrong length")
            pairs.append((rnd, Fraction(w)))
        self._rounds = merge_rounds(pairs)
        check_distribution(self._rounds)
        if sum(v is not None for v in (predicate, accept, checker)) != 1:
            raise InvalidGame("give exactly one of predicate, accept, checker")
        if accept is not None:
            table = {(tuple(q), tuple(a)) for q, a in accept}
            self.accept_table = table
            predicate = lambda q, a: (tuple(q), tuple(a)) in table  # noqa: E731
        else:
            self.accept_table = None
        if predicate is not None:
            self._checker = lambda rnd, a: predicate(rnd.questions, tuple(a))
        else:
            self._checker = checker
        self._cum = None
        self.symmetric = False
        if symmetric:
            if verify_symmetry and self.answer_alphabet is not None:
                verify_symmetric(self)
            self.symmetric = True

    def rounds(self):
        return list(self._rounds)

    def check(self, rnd, answers):
        return bool(self._checker(rnd, answers))

    def sample(self, rng):
        if self._cum is None:
            den = lcm(*(w.denominator for _, w in self._rounds))
            ints = [w.numerator * (den // w.denominator) for _, w in self._rounds]
            self._cum = (den, list(itertools.accumulate(ints)))
        den, cum = self._cum
        u = _uniform_int(rng, den)
        lo, hi = 0, len(cum) - 1
        while lo < hi:
            mid = (lo + hi) // 2
            if cum[mid] > u:
                hi = mid
            else:
                lo = mid + 1
        return self._rounds[lo][0]

    def questions_of(self, player: int) -> list:
        seen = {}
        for rnd, _ in self._rounds:
            q = rnd.questions[player]
            if q is not None:
                seen.setdefault(q, None)
        return list(seen)

    def question_set(self) -> list:
        seen = {}
        for i in range(self.r):
            for q in self.questions_of(i):
                seen.setdefault(q, None)
        return list(seen)

    @property
    def size(self) -> int:
        if self.answer_alphabet is None:
            raise InputError("answer alphabet is not finite")
        return len(self.question_set()) * len(self.answer_alphabet)


def _uniform_int(rng: np.random.Generator, n: int) -> int:
    if n < 2**62:
        return int(rng.integers(0, n))
    # arbitrary-size bound: rejection on random bit strings
    bits = n.bit_length()
    while True:
        words = rng.integers(0, 2**32, size=(bits + 31) // 32, dtype=np.uint64)
        v = 0
        for w in words:
            v = (v << 32) | int(w)
        v >>= 32 * len(words) - bits
        if v < n:
            return v


def compile_rounds(game: Game, name: str | None = None, cap: int = 10**6) -> TableGame:
    """Explicit table form of a finite game; V delegates to the game's checker."""
    pairs = game.rounds()
    if len(pairs) > cap:
        raise TooLarge(f"{len(pairs)} rounds exceed cap {cap}")

    def checker(rnd, answers):
        return rnd.auto_accept or game.check(rnd, answers)

    out = TableGame(
        game.r,
        pairs,
        answers=game.answer_alphabet,
        checker=checker,
        xor=game.xor,
        name=name or f"{game.name}-table",
    )
    out.symmetric = game.symmetric
    return out


def verify_symmetric(game: TableGame) -> None:
    """Raise InvalidGame unless pi and V are invariant under player permutations."""
    weights = {rnd.questions: w for rnd, w in game.rounds() if rnd.context is None}
    if len(weights) != len(game.rounds()):
        raise InvalidGame("symmetry check needs context-free rounds")
    answers = game.answer_alphabet
    for perm in itertools.permutations(range(game.r)):
        for q, w in weights.items():
            pq = tuple(q[perm[i]] for i in range(game.r))
            if weights.get(pq) != w:
                raise InvalidGame(f"pi not symmetric at {q}")
            for a in itertools.product(answers, repeat=game.r):
                pa = tuple(a[perm[i]] for i in range(game.r))
                if game.check(Round(q), a) != game.check(Round(pq), pa):
                    raise InvalidGame(f"V not symmetric at {q}, {a}")


# ---------------------------------------------------------------------------
# strategies


class Strategy:
    def respond(self, rnd: Round, rng: np.random.Generator) -> tuple:
        raise NotImplementedError


class DeterministicStrategy(Strategy):
    """One answer function per player (mapping or callable question -> answer)."""

    def __init__(self, functions: Sequence):
        self.functions = list(functions)

    @property
    def r(self) -> int:
        return len(self.functions)

    def answer(self, player: int, question):
        f = self.functions[player]
        if callable(f):
            return f(question)
        try:
            return f[question]
        except KeyError:
            raise StrategyError(f"player {player} has no answer for question {question!r}") from None

    def respond(self, rnd, rng=None):
        if len(rnd.questions) > len(self.functions):
            raise StrategyError(f"strategy for {self.r} players used on {len(rnd.questions)}")
        return tuple(None if q is None else self.answer(i, q) for i, q in enumerate(rnd.questions))


class SymmetricStrategy(DeterministicStrategy):
    """Every player uses the same answer function."""

    def __init__(self, function, r: int):
        super().__init__([function] * r)


class LocalRandomStrategy(Strategy):
    """Players answer independently with private randomness: f(player, q, rng)."""

    def __init__(self, function: Callable, r: int):
        self.function = function
        self.r = r

    def respond(self, rnd, rng):
        return tuple(None if q is None else self.function(i, q, rng) for i, q in enumerate(rnd.questions))


def _check_povm(ops: Mapping, dim: int, where: str):
    total = np.zeros((dim, dim), dtype=complex)
    for a, m in ops.items():
        m = np.asarray(m)
        if m.shape != (dim, dim):
            raise InvariantError(f"{where}: element {a!r} has shape {m.shape}, expected {(dim, dim)}")
        if np.abs(m - m.conj().T).max() > 1e-10:
            raise InvariantError(f"{where}: element {a!r} is not Hermitian")
        lo = np.linalg.eigvalsh(m).min()
        if lo < PSD_FLOOR:
            raise InvariantError(f"{where}: element {a!r} has eigenvalue {lo:.3e}")
        total = total + m
    if np.abs(total - np.eye(dim)).max() > COMPLETENESS_TOL:
        raise InvariantError(f"{where}: elements do not sum to identity")


class QuantumStrategy(Strategy):
    """Shared state on r registers plus a POVM per player and question."""

    def __init__(self, dims: Sequence[int], state, povms: Sequence[Mapping], validate: bool = True):
        self.dims = tuple(int(d) for d in dims)
        self.r = len(self.dims)
        psi = np.asarray(state, dtype=complex).reshape(-1)
        if psi.size != int(np.prod(self.dims)):
            raise InvariantError(f"state has {psi.size} amplitudes, dims give {np.prod(self.dims)}")
        self.state = psi
        if len(povms) != self.r:
            raise InvariantError("need one POVM family per player")
        self.povms = [
            {q: {a: np.asarray(m, dtype=complex) for a, m in ops.items()} for q, ops in fam.items()}
            for fam in povms
        ]
        if validate:
            self.validate()

    def validate(self):
        nrm = np.linalg.norm(self.state)
        if abs(nrm - 1) > 1e-10:
            raise InvariantError(f"state norm {nrm!r} differs from 1")
        for i, fam in enumerate(self.povms):
            for q, ops in fam.items():
                _check_povm(ops, self.dims[i], f"player {i} question {q!r}")

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims))

    def joint_distribution(self, questions: Sequence) -> tuple[list[list], np.ndarray]:
        """Answer labels per queried player and the joint outcome probabilities."""
        psi = self.state.reshape(self.dims)
        x = psi
        labels = []
        for i, q in enumerate(questions):
            if q is None:
                continue
            try:
                ops = self.povms[i][q]
            except KeyError:
                raise StrategyError(f"player {i} has no measurement for {q!r}") from None
            names = list(ops)
            stack = np.stack([ops[a] for a in names])  # (k, d, d)
            # contract the register index of x with the ket index of each element
            x = np.tensordot(x, stack, axes=([i], [2]))  # rest..., k, d
            x = np.moveaxis(x, -1, i)
            labels.append(names)
        probs = np.tensordot(psi.conj(), x, axes=(list(range(self.r)), list(range(self.r))))
        probs = np.asarray(probs)
        if np.abs(probs.imag).max(initial=0.0) > IMAG_TOL:
            raise InvariantError("outcome probabilities have an imaginary part")
        return labels, probs.real

    def respond(self, rnd, rng):
        labels, probs = self.joint_distribution(rnd.questions)
        flat = np.clip(probs.reshape(-1), 0, None)
        idx = int(rng.choice(flat.size, p=flat / flat.sum())) if flat.size else 0
        combo = np.unravel_index(idx, probs.shape) if probs.ndim else ()
        out = [None] * len(rnd.questions)
        for k, i in enumerate(rnd.queried):
            out[i] = labels[k][combo[k]]
        return tuple(out)


# ---------------------------------------------------------------------------
# exact values


def evaluate_deterministic(game: Game, strat: Strategy) -> Fraction:
    total = Fraction(0)
    for rnd, w in game.rounds():
        if rnd.auto_accept:
            total += w
            continue
        answers = strat.respond(rnd, None)
        if game.check(rnd, answers):
            total += w
    return total


def evaluate_quantum(game: Game, qs: QuantumStrategy, dim_cap: int = QUANTUM_DIM_CAP) -> float:
    if qs.total_dim > dim_cap:
        raise TooLarge(f"tensor dimension {qs.total_dim} exceeds cap {dim_cap}")
    if qs.r != game.r:
        raise StrategyError(f"{qs.r}-player strategy on a {game.r}-player game")
    value = 0.0
    for rnd, w in game.rounds():
        if rnd.auto_accept:
            value += float(w)
            continue
        labels, probs = qs.joint_distribution(rnd.questions)
        acc = 0.0
        for combo in itertools.product(*[range(len(lab)) for lab in labels]):
            answers = [None] * game.r
            for k, i in enumerate(rnd.queried):
                answers[i] = labels[k][combo[k]]
            if game.check(rnd, tuple(answers)):
                acc += probs[combo]
        value += float(w) * acc
    return value


def classical_value_bruteforce(
    game: Game, cap: int = BRUTE_FORCE_CAP, identical: bool = False
) -> Fraction:
    """Exact max over deterministic strategies (last player best-responds).

    ``identical=True`` restricts to strategies where all players share one
    answer function; only meaningful when the caller knows it is lossless.
    """
    if game.answer_alphabet is None:
        raise InputError("brute force needs a finite answer alphabet")
    alphabet = list(game.answer_alphabet)
    na = len(alphabet)
    pairs = game.rounds()
    r = game.r
    qsets = []
    for i in range(r):
        seen = {}
        for rnd, _ in pairs:
            q = rnd.questions[i]
            if q is not None and not rnd.auto_accept:
                seen.setdefault(q, len(seen))
        qsets.append(seen)
    if identical:
        union = {}
        for s in qsets:
            for q in s:
                union.setdefault(q, len(union))
        qsets = [union] * r
        space = na ** len(union)
    else:
        space = na ** sum(len(s) for s in qsets)
    if space > cap:
        raise TooLarge(f"strategy space {space} exceeds cap {cap}")

    den = lcm(*(w.denominator for _, w in pairs))
    base = Fraction(0)
    live = []
    for rnd, w in pairs:
        if rnd.auto_accept:
            base += w
        else:
            live.append((rnd, w.numerator * (den // w.denominator)))
    if not live:
        return base
    dtype = np.int64 if den < 2**62 // max(1, len(live)) else object

    # acceptance table per round over the full answer cube (unqueried axes ignored)
    nl = len(live)
    table = np.zeros((nl,) + (na,) * r, dtype=dtype)
    for k, (rnd, w) in enumerate(live):
        axes = [range(na) if q is not None else [0] for q in rnd.questions]
        for combo in itertools.product(*axes):
            answers = tuple(alphabet[c] if q is not None else None for c, q in zip(combo, rnd.questions))
            if game.check(rnd, answers):
                idx = tuple(c if q is not None else slice(None) for c, q in zip(combo, rnd.questions))
                table[(k,) + idx] = w
    qidx = np.array(
        [[qsets[i][rnd.questions[i]] if rnd.questions[i] is not None else 0 for i in range(r)] for rnd, _ in live]
    )
    rows = np.arange(nl)

    if identical:
        nq = len(qsets[0])
        best = None
        for f in itertools.product(range(na), repeat=nq):
            f = np.array(f, dtype=np.int64).reshape(1, -1) if nq else np.zeros((1, 0), dtype=np.int64)
            idx = (rows,) + tuple(f[0][qidx[:, i]] if nq else np.zeros(nl, dtype=np.int64) for i in range(r))
            val = table[idx].sum()
            best = val if best is None or val > best else best
        return base + Fraction(int(best), den)

    # enumerate players 0..r-2, best-respond with the last player
    last_q = len(qsets[r - 1])
    last_cols = qidx[:, r - 1]
    last_asked = np.array([rnd.questions[r - 1] is not None for rnd, _ in live])
    onehot = np.zeros((nl, last_q + 1), dtype=dtype)
    onehot[rows, np.where(last_asked, last_cols, last_q)] = 1
    sizes = [len(qsets[i]) for i in range(r - 1)]
    total_q = sum(sizes)
    offsets = np.cumsum([0] + sizes)
    nstrat = na**total_q
    batch = max(1, min(nstrat, 2**20 // max(1, nl * na)))
    best = None
    for start in range(0, nstrat, batch):
        ids = np.arange(start, min(nstrat, start + batch), dtype=np.int64)
        digits = np.zeros((ids.size, max(total_q, 1)), dtype=np.int64)
        rem = ids.copy()
        for j in range(total_q):
            digits[:, j] = rem % na
            rem //= na
        idx = [rows[None, :]]
        for i in range(r - 1):
            if sizes[i]:
                idx.append(digits[:, offsets[i] + qidx[:, i]])
            else:
                idx.append(np.zeros((1, nl), dtype=np.int64))
        sub = table[tuple(idx)]  # (batch, nl, na)
        # m[b, question of last player, a] = sum of accepted weight
        m = np.einsum("bka,kq->bqa", sub, onehot) if dtype is np.int64 else np.tensordot(sub, onehot, axes=([1], [0])).transpose(0, 2, 1)
        vals = m[:, :last_q, :].max(axis=2).sum(axis=1) + m[:, last_q, 0]
        cand = vals.max()
        best = cand if best is None or cand > best else best
    return base + Fraction(int(best), den)


# ---------------------------------------------------------------------------
# Monte Carlo


@dataclass(frozen=True)
class RoundTranscript:
    questions: tuple
    answers: tuple
    accept: bool
    chunk: int
    index: int


@dataclass
class MonteCarloResult:
    estimate: float
    half_width: float
    accepted: int
    rounds: int
    seed: int
    rejections: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "estimate": self.estimate,
            "half_width": self.half_width,
            "accepted": self.accepted,
            "rounds": self.rounds,
            "seed": self.seed,
        }


def hoeffding_half_width(rounds: int, confidence: float = 0.99) -> float:
    return math.sqrt(math.log(2 / (1 - confidence)) / (2 * rounds))


# game and strategy handed to forked workers without pickling (they may hold closures)
_SHARED: dict = {}


def _run_shared(args):
    seed, chunk, count, keep = args
    return _run_chunk((_SHARED["game"], _SHARED["strat"], seed, chunk, count, keep))


def _run_chunk(args):
    game, strat, seed, chunk, count, keep = args
    ref = stream(seed, "referee", chunk)
    pl = stream(seed, "players", chunk)
    accepted = 0
    bad = []
    for k in range(count):
        rnd = game.sample(ref)
        answers = strat.respond(rnd, pl)
        ok = game.accepts(rnd, answers)
        accepted += ok
        if not ok and len(bad) < keep:
            bad.append(RoundTranscript(rnd.questions, tuple(answers), False, chunk, k))
    return accepted, bad


def monte_carlo_value(
    game: Game,
    strat: Strategy,
    rounds: int,
    seed: int = 0,
    jobs: int = 1,
    chunk: int = MC_CHUNK,
    keep_rejections: int = 0,
) -> MonteCarloResult:
    """i.i.d. referee rounds; identical output for any ``jobs``."""
    if rounds < 1:
        raise InputError("rounds must be >= 1")
    tasks = []
    for c, start in enumerate(range(0, rounds, chunk)):
        tasks.append((game, strat, seed, c, min(chunk, rounds - start), keep_rejections))
    if jobs > 1 and len(tasks) > 1 and "fork" in multiprocessing.get_all_start_methods():
        _SHARED.update(game=game, strat=strat)
        try:
            ctx = multiprocessing.get_context("fork")
            with ProcessPoolExecutor(max_workers=jobs, mp_context=ctx) as pool:
                results = list(pool.map(_run_shared, [t[2:] for t in tasks]))
        finally:
            _SHARED.clear()
    else:
        results = [_run_chunk(t) for t in tasks]
    accepted = sum(a for a, _ in results)
    bad = [t for _, b in results for t in b][:keep_rejections]
    return MonteCarloResult(accepted / rounds, hoeffding_half_width(rounds), accepted, rounds, seed, bad)


def replay_round(game: Game, strat: Strategy, seed: int, chunk: int, index: int) -> RoundTranscript:
    ref = stream(seed, "referee", chunk)
    pl = stream(seed, "players", chunk)
    for k in range(index + 1):
        rnd = game.sample(ref)
        answers = strat.respond(rnd, pl)
    return RoundTranscript(rnd.questions, tuple(answers), game.accepts(rnd, answers), chunk, index)


# ---------------------------------------------------------------------------
# symmetrisation


def permute_registers(tensor: np.ndarray, perm: Sequence[int]) -> np.ndarray:
    """Register i of the result holds register perm[i] of ``tensor``."""
    return np.transpose(tensor, axes=list(perm))


def symmetrize(game: Game, qs: QuantumStrategy) -> QuantumStrategy:
    """Permutation-invariant strategy with identical POVMs and the same value.

    Registers are padded to a common dimension D and each player receives a
    label register holding the index of the original player it impersonates.
    """
    if not game.symmetric:
        raise InvalidGame("symmetrisation needs a symmetric game")
    r = qs.r
    dmax = max(qs.dims)
    psi = np.zeros((dmax,) * r, dtype=complex)
    psi[tuple(slice(0, d) for d in qs.dims)] = qs.state.reshape(qs.dims)
    big = np.zeros((r, dmax) * r, dtype=complex)
    norm = 1 / math.sqrt(factorial(r))
    for perm in itertools.permutations(range(r)):
        label_idx = []
        for i in range(r):
            label_idx += [perm[i], slice(None)]
        big[tuple(label_idx)] = norm * permute_registers(psi, perm)
    state = big.reshape((r * dmax,) * r)

    questions = {}
    for fam in qs.povms:
        for q in fam:
            questions.setdefault(q, None)
    povm = {}
    for q in questions:
        answers = {}
        for fam in qs.povms:
            for a in fam.get(q, {}):
                answers.setdefault(a, None)
        answers = list(answers) or [None]
        ops = {a: np.zeros((r * dmax, r * dmax), dtype=complex) for a in answers}
        for j in range(r):
            d = qs.dims[j]
            fam = qs.povms[j].get(q)
            blk = slice(j * dmax, (j + 1) * dmax)
            for n, a in enumerate(answers):
                el = np.zeros((dmax, dmax), dtype=complex)
                if fam is not None and a in fam:
                    el[:d, :d] = fam[a]
                elif fam is None and n == 0:
                    el[:d, :d] = np.eye(d)
                if n == 0:
                    el[d:, d:] = np.eye(dmax - d)
                ops[a][blk, blk] = el
        povm[q] = ops
    return QuantumStrategy((r * dmax,) * r, state.reshape(-1), [povm] * r)


def is_permutation_invariant(state: np.ndarray, r: int, tol: float = 1e-10) -> bool:
    d = round(state.size ** (1 / r))
    t = state.reshape((d,) * r)
    return all(np.abs(permute_registers(t, p) - t).max() <= tol for p in itertools.permutations(range(r)))


def xor_bias(value: float) -> float:
    if not -1e-12 <= value <= 1 + 1e-12:
        raise InputError(f"value {value} outside [0, 1]")
    return 2 * value - 1


# ---------------------------------------------------------------------------
# small named games


def chsh_game() -> TableGame:
    """Two players, bits in and out; win iff a XOR b = x AND y."""
    dist = [((x, y), Fraction(1, 4)) for x in (0, 1) for y in (0, 1)]
    return TableGame(2, dist, answers=(0, 1), predicate=_chsh_pred, xor=True, name="chsh")


def _chsh_pred(q, a):
    return (a[0] ^ a[1]) == (q[0] & q[1])


def parity_game(r: int, target: int = 1) -> TableGame:
    """One question; win iff the answer bits XOR to ``target``."""
    return TableGame(
        r,
        [((0,) * r, Fraction(1))],
        answers=(0, 1),
        predicate=lambda q, a: (sum(a) % 2) == target,
        xor=True,
        name=f"parity{r}",
    )


def constant_game(r: int, value: bool, questions: int = 1) -> TableGame:
    dist = [((i,) * r, Fraction(1, questions)) for i in range(questions)]
    return TableGame(r, dist, answers=(0, 1), predicate=lambda q, a: value, name="always" if value else "never")


NAMED_CHECKERS: dict[str, Callable] = {
    "chsh": _chsh_pred,
    "parity": lambda q, a: sum(a) % 2 == 1,
    "always": lambda q, a: True,
    "never": lambda q, a: False,
}
