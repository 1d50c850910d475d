from typing import Callable, Sequence

import numpy as np

from schemas.decode import DecodeConfig, Hypothesis

# prefix -> log-probabilities over the output space for the next step
StepScorer = Callable[[Sequence[int]], np.ndarray]


def _rank_key(score: float, units: list[int]) -> tuple[float, int, list[int]]:
    return (-score, len(units), units)


def beam_search(score_step: StepScorer, eos: int, config: DecodeConfig, width: int | None = None) -> list[Hypothesis]:
    """
    Beam search over any step scorer.

    Every alive hypothesis is extended by every token; the best `width` extensions survive. An extension ending in
    eos, or reaching max_length, is finished and leaves the beam. With alpha = 0 the search stops as soon as the
    best finished score is at least the best alive score, since log-probabilities never increase a score.

    Returns:
        list[Hypothesis]: Finished hypotheses, best first by score / length^alpha, then shorter, then lexicographic.
    """
    width = config.width if width is None else width
    alive: list[tuple[float, list[int]]] = [(0.0, [])]
    finished: list[Hypothesis] = []
    for _ in range(config.max_length):
        candidates: list[tuple[float, list[int]]] = []
        for score, units in alive:
            log_probs = np.asarray(score_step(units), dtype = np.float64)
            for token, log_prob in enumerate(log_probs):
                candidates.append((score + float(log_prob), units + [token]))
        candidates.sort(key = lambda candidate: _rank_key(*candidate))

        alive = []
        for score, units in candidates[:width]:
            if units[-1] == eos or len(units) == config.max_length:
                finished.append(Hypothesis(units = units, score = score, finished = True))
            else:
                alive.append((score, units))
        if not alive:
            break
        if config.alpha == 0 and finished and max(h.score for h in finished) >= alive[0][0]:
            break
    return sorted(finished, key = lambda h: (-h.normalized(config.alpha), len(h.units), h.units))


def greedy_search(score_step: StepScorer, eos: int, max_length: int) -> Hypothesis:
    """Argmax at every step (ties to the lowest id) until eos or max_length; identical to a beam of 1."""
    return beam_search(score_step, eos, DecodeConfig(strategy = "greedy", max_length = max_length))[0]


def exhaustive_search(score_step: StepScorer, eos: int, space: int, max_length: int) -> list[Hypothesis]:
    """Enumerates every finished output; the reference for beam search at tiny scale."""
    outcomes: list[Hypothesis] = []
    frontier: list[tuple[float, list[int]]] = [(0.0, [])]
    while frontier:
        score, units = frontier.pop()
        log_probs = np.asarray(score_step(units), dtype = np.float64)
        for token in range(space):
            extended = (score + float(log_probs[token]), units + [token])
            if token == eos or len(extended[1]) == max_length:
                outcomes.append(Hypothesis(units = extended[1], score = extended[0], finished = True))
            else:
                frontier.append(extended)
    return sorted(outcomes, key = lambda h: _rank_key(h.score, h.units))
