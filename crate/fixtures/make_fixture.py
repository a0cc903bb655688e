"""Writes the synthetic study fixture and its golden valence labels.

The labels are computed independently of the Rust code: scipy's tie-corrected
Kruskal-Wallis on each word versus all other ratings of the cohort.
Run from the repository root: python3 fixtures/make_fixture.py
"""
import csv
import random
from collections import defaultdict

from scipy.stats import kruskal

VOCAB = {
    "art": ["painting", "music", "creativity", "museum", "beauty", "culture"],
    "biology": ["cell", "life", "nature", "dna", "evolution", "plant"],
    "chemistry": ["molecule", "reaction", "laboratory", "element", "atom", "experiment"],
    "complex": ["difficult", "system", "problem", "network", "chaos", "mathematics"],
    "life": ["family", "love", "death", "nature", "happiness", "biology"],
    "mathematics": ["number", "equation", "logic", "physics", "problem", "calculus"],
    "physics": ["energy", "atom", "quantum", "equation", "mathematics", "gravity"],
    "school": ["teacher", "student", "exam", "education", "friend", "homework"],
    "system": ["network", "structure", "complex", "computer", "order", "rule"],
    "university": ["student", "education", "research", "degree", "campus", "school"],
}
TENDENCY = defaultdict(lambda: 3.4)
TENDENCY.update({w: 4.6 for w in ["music", "beauty", "love", "happiness", "family", "creativity",
                                  "friend", "nature", "education", "art", "life", "painting"]})
TENDENCY.update({w: 1.5 for w in ["death", "exam", "homework", "chaos", "difficult", "problem"]})
# raw spellings that normalization must fold back
VARIANTS = {"equation": "Equations", "cell": "Cells", "student": "Students", "atom": "ATOM"}
GROUPS = ["trainee", "expert", "academic"]


def rating(rng, word):
    if rng.random() < 0.08:
        return ""
    return str(min(5, max(1, round(rng.gauss(TENDENCY[word], 0.6)))))


def make_tabular(rng):
    rows = []
    for g_idx, group in enumerate(GROUPS):
        for k in range(4):
            pid = f"{group[0]}{k + 1}"
            sparse = group == "trainee" and k == 3
            for c_idx, (cue, words) in enumerate(sorted(VOCAB.items())):
                picks = rng.sample(words[:5] if g_idx == 0 else words, 3)
                cr = rating(rng, cue)
                for pos, w in enumerate(picks, start=1):
                    if sparse and c_idx < 3:
                        text, r = "", ""
                    else:
                        text = VARIANTS.get(w, w) if rng.random() < 0.3 else w
                        r = rating(rng, w)
                    rows.append([pid, "human", group, cue, cr, pos, text, r])
    with open("fixtures/synthetic_12.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["participant_id", "source", "group", "cue", "cue_rating",
                    "position", "association", "association_rating"])
        w.writerows(rows)
    return rows


def make_transcripts(rng):
    # simulated academics: every art answer is art-only vocabulary
    for k in range(4):
        lines = []
        for cue, words in sorted(VOCAB.items()):
            picks = rng.sample(words[:4], 3)
            fields = [cue, rating(rng, cue) or "3"]
            for w in picks:
                fields += [w, rating(rng, w) or "3"]
            lines.append("=".join(f'"{f}"' for f in fields))
        with open(f"fixtures/transcripts/simulated_academic_{k + 1}.txt", "w") as fh:
            fh.write("\n".join(lines) + "\n")


def normalize(text, vocab):
    t = " ".join(text.split()).lower()
    if t.endswith("s") and t[:-1] in vocab:
        t = t[:-1]
    return t


def golden_labels(rows, group):
    people = defaultdict(lambda: defaultdict(list))
    cue_ratings = defaultdict(dict)
    blanks = defaultdict(int)
    for pid, _src, g, cue, cr, pos, text, r in rows:
        if g != group:
            continue
        cue_ratings[pid][cue] = cr
        if text.strip():
            people[pid][cue].append((text, r))
        else:
            blanks[pid] += 1
    kept = [p for p in cue_ratings if blanks[p] + sum(3 - len(v) for v in people[p].values())
            - (10 - len(people[p])) * 0 <= 0.25 * 30]
    vocab = set(VOCAB)
    for p in kept:
        for cue, items in people[p].items():
            for text, _ in items:
                vocab.add(" ".join(text.split()).lower())
    support = defaultdict(set)
    for p in kept:
        for cue, items in people[p].items():
            for text, _ in items:
                support[(cue, normalize(text, vocab))].add(p)
    ratings = defaultdict(list)
    for p in kept:
        for cue in VOCAB:
            cr = cue_ratings[p].get(cue, "")
            ratings[cue].append(int(cr) if cr else 3)
            for text, r in people[p].get(cue, []):
                w = normalize(text, vocab)
                if len(support[(cue, w)]) >= 2:
                    ratings[w].append(int(r) if r else 3)
    out = []
    for word in sorted(ratings):
        own = ratings[word]
        rest = [x for w2, rs in ratings.items() if w2 != word for x in rs]
        if len(own) < 3:
            out.append((word, "neutral", 0.0, 1.0, len(own), len(rest)))
            continue
        if len(set(own + rest)) == 1:
            out.append((word, "neutral", 0.0, 1.0, len(own), len(rest)))
            continue
        h, p = kruskal(own, rest)
        mean_rank_own = sum(sorted(own + rest).index(x) for x in own)  # unused tie-free proxy
        # direction from mean rank: compare midrank means
        pooled = sorted(own + rest)
        def midrank(x):
            lo = pooled.index(x)
            hi = len(pooled) - pooled[::-1].index(x)
            return (lo + 1 + hi) / 2
        mo = sum(midrank(x) for x in own) / len(own)
        mr = sum(midrank(x) for x in rest) / len(rest)
        label = "neutral"
        if p < 0.1:
            label = "positive" if mo > mr else "negative" if mo < mr else "neutral"
        out.append((word, label, h, p, len(own), len(rest)))
    return out


if __name__ == "__main__":
    rng = random.Random(20240601)
    rows = make_tabular(rng)
    make_transcripts(rng)
    for group in GROUPS:
        with open(f"fixtures/golden_labels_human_{group}.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["word", "label", "h", "p", "n_word", "n_rest"])
            for word, label, h, p, n_w, n_r in golden_labels(rows, group):
                w.writerow([word, label, repr(float(h)), repr(float(p)), n_w, n_r])
