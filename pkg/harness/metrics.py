from collections import Counter
from typing import Hashable, Literal, Sequence

from editdistance import eval as levenshtein
from sacrebleu.metrics import BLEU

from core.errors import ConfigError, DimensionError, EmptyInputError

Level = Literal["word", "char", "phone"]


def tokenize(text: str | Sequence[str], level: Level) -> list[str]:
    """Word level splits on whitespace, char level drops spaces, phone level takes a label sequence as is."""
    if level == "phone":
        return [text] if isinstance(text, str) else list(text)
    joined = text if isinstance(text, str) else " ".join(text)
    if level == "word":
        return joined.split()
    return [char for char in joined if not char.isspace()]


def edit_distance_rate(hypothesis: Sequence[Hashable], reference: Sequence[Hashable]) -> float:
    """
    Levenshtein(hyp, ref) / len(ref).

    Raises:
        EmptyInputError: If the reference is empty.
    """
    if not reference:
        raise EmptyInputError("error rate needs a non-empty reference")
    return levenshtein(list(hypothesis), list(reference)) / len(reference)


def corpus_error_rate(hypotheses: Sequence[Sequence[Hashable]], references: Sequence[Sequence[Hashable]]) -> float:
    """Total edits over total reference tokens, the way WER/CER/PER are reported for a test set."""
    if len(hypotheses) != len(references):
        raise DimensionError(f"{len(hypotheses)} hypotheses for {len(references)} references")
    tokens = sum(len(reference) for reference in references)
    if tokens == 0:
        raise EmptyInputError("error rate needs a non-empty reference")
    return sum(levenshtein(list(h), list(r)) for h, r in zip(hypotheses, references)) / tokens


def error_rate(hypothesis: str | Sequence[str], reference: str | Sequence[str], level: Level) -> float:
    """WER, CER or PER depending on level."""
    return edit_distance_rate(tokenize(hypothesis, level), tokenize(reference, level))


def is_slot_marker(label: str) -> bool:
    return len(label) > 2 and label.startswith("<") and label.endswith(">")


def extract_slots(labels: Sequence[str]) -> list[tuple[str, str]]:
    """(slot type, value) pairs: each marker closes the transcript characters since the previous marker."""
    pairs: list[tuple[str, str]] = []
    value: list[str] = []
    for label in labels:
        if is_slot_marker(label):
            pairs.append((label[1:-1], "".join(value)))
            value = []
        else:
            value.append(label)
    return pairs


def slot_f1(hypothesis: Sequence[str], reference: Sequence[str]) -> float:
    """Micro F1 over (slot type, value) pairs; two sequences without any slot agree perfectly."""
    predicted, expected = Counter(extract_slots(hypothesis)), Counter(extract_slots(reference))
    if not predicted and not expected:
        return 1.0
    hits = sum((predicted & expected).values())
    if hits == 0:
        return 0.0
    precision = hits / sum(predicted.values())
    recall = hits / sum(expected.values())
    return 2 * precision * recall / (precision + recall)


def corpus_slot_f1(hypotheses: Sequence[Sequence[str]], references: Sequence[Sequence[str]]) -> float:
    if len(hypotheses) != len(references):
        raise DimensionError(f"{len(hypotheses)} hypotheses for {len(references)} references")
    predicted: Counter[tuple[str, str]] = Counter()
    expected: Counter[tuple[str, str]] = Counter()
    hits = 0
    for hypothesis, reference in zip(hypotheses, references):
        p, e = Counter(extract_slots(hypothesis)), Counter(extract_slots(reference))
        predicted += p
        expected += e
        hits += sum((p & e).values())
    if not predicted and not expected:
        return 1.0
    if hits == 0:
        return 0.0
    precision, recall = hits / sum(predicted.values()), hits / sum(expected.values())
    return 2 * precision * recall / (precision + recall)


def bleu(hypotheses: Sequence[Sequence[Hashable]], references: Sequence[Sequence[Hashable]]) -> float:
    """
    Corpus BLEU up to 4-grams with brevity penalty and add-one smoothing of the 2- to 4-gram precisions.
    Tokens are compared as given; no further tokenization.

    Raises:
        DimensionError: If the corpora have different lengths.
    """
    if len(hypotheses) != len(references):
        raise DimensionError(f"{len(hypotheses)} hypotheses for {len(references)} references")
    if not hypotheses:
        raise EmptyInputError("BLEU of an empty corpus")
    metric = BLEU(tokenize = "none", smooth_method = "add-k", smooth_value = 1, force = True)
    hyps = [" ".join(str(token) for token in hypothesis) for hypothesis in hypotheses]
    refs = [" ".join(str(token) for token in reference) for reference in references]
    return float(metric.corpus_score(hyps, [refs]).score)


def auto_bleu(tokens: Sequence[Hashable], n: int = 1) -> float:
    """
    Within-utterance repetition: the share of the utterance's n-grams that occur more than once in it.

    Raises:
        ConfigError: If n < 1.
        EmptyInputError: If the utterance is shorter than n.
    """
    if n < 1:
        raise ConfigError(f"n-gram order must be positive, got {n}")
    if len(tokens) < n:
        raise EmptyInputError(f"an utterance of {len(tokens)} tokens has no {n}-grams")
    grams = [tuple(tokens[index:index + n]) for index in range(len(tokens) - n + 1)]
    counts = Counter(grams)
    return sum(1 for gram in grams if counts[gram] > 1) / len(grams)


def accuracy(predictions: Sequence[Sequence[str]], references: Sequence[Sequence[str]]) -> float:
    """Exact-match accuracy of label sequences; an empty set scores 0."""
    if len(predictions) != len(references):
        raise DimensionError(f"{len(predictions)} predictions for {len(references)} references")
    if not references:
        return 0.0
    return sum(list(p) == list(r) for p, r in zip(predictions, references)) / len(references)
