#!/usr/bin/env python3
"""Step-by-step re-ranking oracle for tests/data/rerank_oracle.txt.

Recomputes every candidate score from scratch each round:
  W(j)     = sum_k rel_k * cos(j, k) / sum_k rel_k   over selected k
  score(j) = W(j) * cos(j, qa)
Window: unselected facts at 1-based initial rank <= depth + |selected|.
Prints the final order.
"""
import math
import sys


def cos(u, v):
    nu = math.sqrt(sum(x * x for x in u))
    nv = math.sqrt(sum(x * x for x in v))
    if nu == 0 or nv == 0:
        return 0.0
    return sum(a * b for a, b in zip(u, v)) / (nu * nv)


def main(path):
    facts, qa, depth = [], None, None
    for line in open(path):
        parts = line.split()
        if not parts or parts[0].startswith("#"):
            continue
        if parts[0] == "depth":
            depth = int(parts[1])
        elif parts[0] == "qa":
            qa = [float(x) for x in parts[1:]]
        elif parts[0] == "fact":
            facts.append((parts[1], float(parts[2]), [float(x) for x in parts[3:]]))
    facts.sort(key=lambda f: (-f[1], f[0]))
    # relevance weights are min-max normalized to [1e-6, 1] first
    lo, hi = min(f[1] for f in facts), max(f[1] for f in facts)
    rel = [1e-6 + (1 - 1e-6) * (f[1] - lo) / (hi - lo) for f in facts]
    selected = [0]
    while len(selected) < depth and len(selected) < len(facts):
        window = depth + len(selected)
        best, best_score = None, None
        for j in range(min(window, len(facts))):
            if j in selected:
                continue
            num = sum(rel[k] * cos(facts[j][2], facts[k][2]) for k in selected)
            den = sum(rel[k] for k in selected)
            score = num / den * cos(facts[j][2], qa)
            print(f"  round {len(selected)} cand {facts[j][0]} W={num/den:.6f} "
                  f"qa={cos(facts[j][2], qa):.6f} score={score:.6f}", file=sys.stderr)
            if best is None or score > best_score:
                best, best_score = j, score
        selected.append(best)
    order = [facts[i][0] for i in selected]
    order += [f[0] for i, f in enumerate(facts) if i not in selected]
    print(" ".join(order))


if __name__ == "__main__":
    main(sys.argv[1])
