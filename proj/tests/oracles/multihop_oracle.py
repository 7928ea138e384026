#!/usr/bin/env python3
"""Independent MAP computation for the synthetic multi-hop corpus.

Rebuilds the 20-question chained corpus, scores every fact with tf-idf
cosine (idf = ln((1+N)/(1+df)) + 1 over fact texts and question+answer
texts), ranks by score desc / uid asc, re-ranks at depth 10 from scratch
each round, and prints initial and re-ranked MAP.
"""
import math
import re
from collections import Counter

DEPTH = 10


def tokens(text):
    return re.findall(r"[a-z0-9]+", text.lower())


def corpus(n):
    facts, questions = {}, []
    for i in range(n):
        s = str(i)
        p = "q" + s + "-"
        facts[p + "g1"] = f"beta{s} delta{s} ans{s} link{s}a"
        links = "abcd"
        for t in range(1, 4):
            facts[p + f"g{t + 1}"] = f"ans{s} link{s}{links[t - 1]} link{s}{links[t]} fill{s}{links[t]}"
        for d in range(1, 6):
            facts[p + f"d{d}"] = f"alpha{s} gamma{s} noise{s}x{d}"
        qa = f"alpha{s} beta{s} gamma{s} delta{s}? ans{s}"
        questions.append(("mh" + s, qa, [p + g for g in ("g1", "g2", "g3", "g4")]))
    return facts, questions


def cos(u, v):
    nu = math.sqrt(sum(x * x for x in u.values()))
    nv = math.sqrt(sum(x * x for x in v.values()))
    if nu == 0 or nv == 0:
        return 0.0
    return max(-1.0, min(1.0, sum(x * v.get(k, 0.0) for k, x in u.items()) / (nu * nv)))


def ap(ranked, gold):
    hits, total = 0, 0.0
    for i, u in enumerate(ranked, 1):
        if u in gold:
            hits += 1
            total += hits / i
    return total / len(gold)


def rerank(order, rel, vec, qa):
    sel = [order[0]]
    while len(sel) < DEPTH and len(sel) < len(order):
        window = order[: min(len(order), DEPTH + len(sel))]
        best, best_score = None, 0.0
        for u in window:
            if u in sel:
                continue
            w = sum(rel[k] * cos(vec[u], vec[k]) for k in sel) / sum(rel[k] for k in sel)
            s = w * cos(vec[u], qa)
            if best is None or s > best_score:
                best, best_score = u, s
        sel.append(best)
    return sel + [u for u in order if u not in sel]


def main():
    facts, questions = corpus(20)
    docs = list(facts.values()) + [q[1] for q in questions]
    df = Counter(t for d in docs for t in set(tokens(d)))
    n = len(docs)
    idf = {t: math.log((1 + n) / (1 + c)) + 1 for t, c in df.items()}

    def vectorize(text):
        return {t: c * idf[t] for t, c in Counter(tokens(text)).items() if t in idf}

    vec = {u: vectorize(t) for u, t in facts.items()}
    before, after = [], []
    for qid, qa_text, gold in questions:
        qa = vectorize(qa_text)
        score = {u: cos(qa, vec[u]) for u in facts}
        order = sorted(facts, key=lambda u: (-score[u], u))
        lo, hi = min(score.values()), max(score.values())
        eps = 1e-6
        rel = {u: 1.0 if hi == lo else eps + (1 - eps) * (score[u] - lo) / (hi - lo) for u in facts}
        before.append(ap(order, set(gold)))
        after.append(ap(rerank(order, rel, vec, qa), set(gold)))
    print(f"initial {sum(before) / len(before)!r}")
    print(f"reranked {sum(after) / len(after)!r}")


if __name__ == "__main__":
    main()
