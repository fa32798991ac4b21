"""Plain IBM Model 1 EM with a NULL source word and add-alpha smoothing.

Independent reference for the lexical table and log-likelihood values frozen
in the alignment tests. Prints t(f|e) after each iteration and the corpus
log-likelihood before each update.
"""
import json
import math
import sys

NULL = "<NULL>"


def train(corpus, iterations, alpha):
    tvocab = sorted({f for _, tgt in corpus for f in tgt})
    cooc = {}
    for src, tgt in corpus:
        for e in [NULL] + src:
            cooc.setdefault(e, set()).update(tgt)
    t = {e: {f: 1.0 / len(fs) for f in fs} for e, fs in cooc.items()}
    floors = {e: 0.0 for e in cooc}

    def prob(e, f):
        return t[e].get(f, floors[e])

    lls = []
    for _ in range(iterations):
        counts = {e: {} for e in cooc}
        ll = 0.0
        for src, tgt in corpus:
            full = [NULL] + src
            for f in tgt:
                z = sum(prob(e, f) for e in full)
                ll += math.log(z)
                for e in full:
                    counts[e][f] = counts[e].get(f, 0.0) + prob(e, f) / z
            ll -= len(tgt) * math.log(len(full))
        lls.append(ll)
        new_t = {}
        for e in cooc:
            total = sum(counts[e].values())
            denom = total + alpha * len(tvocab)
            new_t[e] = {f: (c + alpha) / denom for f, c in counts[e].items()}
            floors[e] = alpha / denom
        t = new_t

    ll = 0.0
    for src, tgt in corpus:
        full = [NULL] + src
        for f in tgt:
            ll += math.log(sum(prob(e, f) for e in full))
        ll -= len(tgt) * math.log(len(full))
    lls.append(ll)
    table = {e: {f: prob(e, f) for f in tvocab} for e in cooc}
    return table, lls


if __name__ == "__main__":
    corpus = [(["a", "b"], ["x", "y"]), (["a"], ["x"])]
    iterations = int(sys.argv[1]) if len(sys.argv) > 1 else 5
    table, lls = train(corpus, iterations, 0.001)
    out = {
        "table": {e: {f: repr(p) for f, p in row.items()} for e, row in table.items()},
        "log_likelihood": [repr(v) for v in lls],
    }
    print(json.dumps(out, indent=1, sort_keys=True))
