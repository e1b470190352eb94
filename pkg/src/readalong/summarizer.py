"""One keyphrase per region, for spoken announcements while wheel-scrubbing.

Unsupervised scoring: region-level tf-idf over the document's regions with a
first-sentence position bonus and a length normalizer. Candidates are
contiguous token n-grams (1..4) within a single sentence, with no stopword at
either edge, so the winner is always a speakable snippet of the region.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

from .ingest import split_sentence_spans
from .model import Document, Keyphrase, Region

MAX_PHRASE_TOKENS = 4
FIRST_SENTENCE_BONUS = 1.5

STOPWORDS = frozenset(
    """
    a about above after again against all am an and any are as at be because
    been before being below between both but by can cannot could did do does
    doing down during each few for from further had has have having he her
    here hers herself him himself his how i if in into is it its itself just
    me more most my myself no nor not now of off on once only or other our
    ours ourselves out over own same she should so some such than that the
    their theirs them themselves then there these they this those through to
    too under until up very was we were what when where which while who whom
    why will with you your yours yourself yourselves
    """.split()
)

_TOKEN_RE = re.compile(r"[A-Za-z0-9]+")


@dataclass
class CorpusStats:
    """Region counts needed by the scorer: how many regions contain each token."""

    region_count: int = 0
    df: dict[str, int] = field(default_factory=dict)


def _tokenize(text: str) -> list[tuple[str, int, int]]:
    """Lowercased tokens with their original character offsets."""
    return [(m.group().lower(), m.start(), m.end()) for m in _TOKEN_RE.finditer(text)]


def _eligible(token: str) -> bool:
    return len(token) >= 2 and token not in STOPWORDS


def corpus_stats(document: Document) -> CorpusStats:
    """Per-token counts of text-bearing regions containing that token."""
    stats = CorpusStats()
    for region in document.text_regions():
        stats.region_count += 1
        seen = {tok for tok, _, _ in _tokenize(region.text) if _eligible(tok)}
        for token in seen:
            stats.df[token] = stats.df.get(token, 0) + 1
    return stats


def summarize_region(region: Region, stats: CorpusStats) -> Keyphrase | None:
    """Highest-scoring n-gram of the region, or None with no eligible tokens.

    score(ngram) = sum over tokens of tf(token) * (1 + ln(R / df(token))),
    divided by sqrt(n); times 1.5 when the n-gram starts in the first
    sentence. Ties break to the earliest occurrence, then the shorter n-gram.
    """
    if not region.is_text_bearing:
        raise ValueError(f"region {region.id} ({region.kind.value}) is not text-bearing")

    tokens = _tokenize(region.text)
    if not tokens:
        return None

    tf: dict[str, int] = {}
    for token, _, _ in tokens:
        if _eligible(token):
            tf[token] = tf.get(token, 0) + 1

    def weight(token: str) -> float:
        df = stats.df.get(token)
        if not _eligible(token) or not df:
            return 0.0
        return 1.0 + math.log(stats.region_count / df)

    best: tuple[float, int, int] | None = None  # (-score, start_char, n)
    best_phrase = ""
    best_score = 0.0
    for sent_index, (s_start, s_end) in enumerate(split_sentence_spans(region.text)):
        sent_tokens = [t for t in tokens if t[1] >= s_start and t[2] <= s_end]
        for i in range(len(sent_tokens)):
            if sent_tokens[i][0] in STOPWORDS:
                continue
            for n in range(1, MAX_PHRASE_TOKENS + 1):
                if i + n > len(sent_tokens):
                    break
                window = sent_tokens[i : i + n]
                if window[-1][0] in STOPWORDS:
                    continue
                score = sum(tf.get(tok, 0) * weight(tok) for tok, _, _ in window)
                if score <= 0.0:
                    continue
                score /= math.sqrt(n)
                if sent_index == 0:
                    score *= FIRST_SENTENCE_BONUS
                key = (-score, window[0][1], n)
                if best is None or key < best:
                    best = key
                    best_score = score
                    best_phrase = region.text[window[0][1] : window[-1][2]]

    if best is None:
        return None
    return Keyphrase(region_id=region.id, phrase=best_phrase, score=best_score)


def summarize_document(document: Document, stats: CorpusStats | None = None) -> list[Keyphrase]:
    """Keyphrases for every region in reading order that yields one."""
    if stats is None:
        stats = corpus_stats(document)
    by_id = {r.id: r for r in document.iter_regions()}
    phrases: list[Keyphrase] = []
    for region_id in document.reading_order:
        keyphrase = summarize_region(by_id[region_id], stats)
        if keyphrase is not None:
            phrases.append(keyphrase)
    return phrases
