#!/usr/bin/env python3
"""Regenerates the deterministic test data under tests/data/.

Outputs
  raw/train.tsv, raw/test.tsv   SemEval-style "ID<TAB>Target<TAB>Tweet<TAB>Stance" files
                                (mostly UTF-8, a few windows-1252 lines) for several targets.
  replay/<prompt>.csv           canned "ID,response" backend answers for every Abortion ID.
  table/                        a hand-built corpus plus prediction files whose confusion
                                matrices are fixed in TABLE_RUNS below.

Usage: python3 tests/fixtures/make_fixtures.py [output_dir]
"""

import csv
import io
import itertools
import random
import sys
from pathlib import Path

TARGET = "Legalization of Abortion"
OTHER_TARGETS = ["Atheism", "Climate Change is a Real Concern", "Feminist Movement"]
LABELS = ["AGAINST", "FAVOR", "NONE"]
WORDS = {"AGAINST": "against", "FAVOR": "in-favor", "NONE": "neutral-or-unclear"}

# Class sizes after cleaning and de-duplication.
TRAIN_COUNTS = {"AGAINST": 334, "FAVOR": 104, "NONE": 162}
TEST_COUNTS = {"AGAINST": 188, "FAVOR": 46, "NONE": 45}
TRAIN_DUPLICATES = 3
TEST_DUPLICATES = 1

OPENERS = {
    "AGAINST": [
        "every life deserves protection from the very start",
        "a heartbeat at six weeks is a person not a choice",
        "we should defend the unborn who cannot speak for themselves",
        "adoption is always a better answer than ending a life",
        "there is nothing compassionate about ending a pregnancy",
        "science says life begins at conception and the law should follow",
        "praying outside the clinic again this morning for the babies",
        "mothers and children both deserve care and support not abortion",
    ],
    "FAVOR": [
        "my body my choice and no politician gets a vote",
        "safe and legal access to care saves women's lives",
        "keep your laws off my body and out of my doctor's office",
        "reproductive rights are human rights full stop",
        "nobody should be forced to carry a pregnancy against their will",
        "trust women to make their own healthcare decisions",
        "funding clinics means fewer unsafe procedures",
        "bodily autonomy is not up for debate",
    ],
    "NONE": [
        "watching the debate tonight with some friends",
        "anyone know when the hearing starts tomorrow",
        "the news coverage today was all over the place",
        "long day at work and still reading the comments",
        "interesting panel at the conference this afternoon",
        "so many opinions on my timeline this week",
        "waiting for the vote count to come in",
        "listening to both sides at the town hall",
    ],
}
MIDDLES = [
    "", "honestly", "again", "today", "right now", "this week", "for real", "period",
    "no question", "as always", "once more", "remember that",
]
HASHTAGS = ["#prolife", "#prochoice", "#life", "#scotus", "#ccot", "#tcot", "#women", "#rights",
            "#debate", "#vote2016", "#freedom", "#faith", "#health", "#justice"]
HANDLES = ["@nytimes", "@Planned_Parent", "@lifenews", "@CNN", "@sarah_j", "@mike1987", "@GOP",
           "@TheDemocrats", "@prolifeyouth", "@Cecile_R"]
CLOSERS = [
    "", "Thoughts?", "Share if you agree.", "Enough said!!", "Retweet please.", "Just saying...",
    "We will not back down.", "Stay informed.",
]

# Tweets whose raw form matters: cleaning goldens and the few-shot example sources.
SPECIAL_TRAIN = [
    ("2312", "I really don't understand how some people are pro-choice. A life is a life no matter "
             "if it's 2 weeks old or 20 years old. #SemST", "AGAINST", "utf-8"),
    ("2401", "It's a free country. Freedom includes freedom of choice. #SemST", "FAVOR", "utf-8"),
    ("2402", "so ready for my abortion debate #SemST", "NONE", "utf-8"),
    ("2403", "RT @createdequalorg: \"We're all human, aren't we? Every human life is worth the same, "
             "and worth saving.\" -J.K. Rowling #… #SemST", "AGAINST", "cp1252"),
    ("2404", "Follow #Patriot --> @Enuffis2Much.  Thanks for following back!!  #Truth #Liberty #Justice "
             "#ProIsrael #WakeUpAmerica #FreeAmirNow #SemST", "NONE", "utf-8"),
    ("2405", "Café talk turned into a “debate” about choice – we disagreed #SemST",
     "NONE", "cp1252"),
]
# A few-shot example that also appears in the test file, so few-shot runs must exclude it.
SPECIAL_TEST = [
    ("10900", "So ready for my abortion debate #SemST", "NONE", "utf-8"),
]


def synth_tweet(rng: random.Random, label: str) -> str:
    parts = []
    if rng.random() < 0.12:
        parts.append("RT " + rng.choice(HANDLES) + ":")
    if rng.random() < 0.25:
        parts.append(rng.choice(HANDLES))
    text = rng.choice(OPENERS[label])
    middle = rng.choice(MIDDLES)
    if middle:
        text = text + " " + middle
    if rng.random() < 0.5:
        text = text[0].upper() + text[1:]
    parts.append(text)
    closer = rng.choice(CLOSERS)
    if closer:
        parts.append(closer)
    if rng.random() < 0.15:
        parts.append("\"" + rng.choice(["so true", "listen", "wow", "read this"]) + "\"")
    for tag in rng.sample(HASHTAGS, rng.randint(0, 3)):
        parts.append(tag)
    if rng.random() < 0.2:
        parts.append(rng.choice(HANDLES))
    parts.append(rng.choice(["#SemST", "#SemST", "#semst"]))
    return " ".join(parts)


def clean_key(text: str) -> str:
    """Rough stand-in for the cleaning step: used only to keep synthetic tweets distinct."""
    words = [("@username" if w.startswith("@") else w.lower()) for w in text.split()]
    return " ".join(w for w in words if w not in ("rt", "#semst"))


def build_split(rng, counts, specials, first_id, duplicates, seen):
    rows = [(i, t, s, enc) for i, t, s, enc in specials]
    remaining = dict(counts)
    for _, _, s, _ in specials:
        remaining[s] -= 1
    for _, t, _, _ in specials:
        seen.add(clean_key(t))
    next_id = first_id
    pool = [label for label in LABELS for _ in range(remaining[label])]
    rng.shuffle(pool)
    for label in pool:
        while True:
            tweet = synth_tweet(rng, label)
            key = clean_key(tweet)
            if key not in seen:
                seen.add(key)
                break
        rows.append((str(next_id), tweet, label, "utf-8"))
        next_id += 1
    # Exact duplicates up to mention handles and case: dropped by de-duplication.
    for original in rng.sample(rows[len(specials):], duplicates):
        _, tweet, label, _ = original
        rows.append((str(next_id), tweet.upper().replace("#SEMST", "#SemST"), label, "utf-8"))
        next_id += 1
    rng.shuffle(rows)
    return rows


def other_target_rows(rng, n, first_id):
    rows = []
    for k in range(n):
        target = OTHER_TARGETS[k % len(OTHER_TARGETS)]
        rows.append((str(first_id + k), f"Thinking about {target.lower()} today {rng.choice(HASHTAGS)} #SemST",
                     rng.choice(LABELS), "utf-8", target))
    return rows


def write_tsv(path: Path, rows):
    with open(path, "wb") as f:
        f.write(b"ID\tTarget\tTweet\tStance\r\n")
        for row in rows:
            rid, tweet, label, enc = row[:4]
            target = row[4] if len(row) > 4 else TARGET
            line = "\t".join([rid, target, tweet, label]) + "\r\n"
            f.write(line.encode(enc))


def noisy_label(rng, gold, accuracy):
    if rng.random() < accuracy:
        return gold
    return rng.choice([label for label in LABELS if label != gold])


def single_word_response(rng, label):
    word = WORDS[label]
    style = rng.random()
    if style < 0.03:
        return "I'm not able to determine the stance from this tweet."
    if style < 0.55:
        return word
    if style < 0.75:
        return word + "."
    if style < 0.9:
        return "'" + word + "'"
    return word.capitalize()


def cot_response(rng, label):
    word = WORDS[label]
    decoy = WORDS[rng.choice(LABELS)]
    opening = rng.choice([
        "The tweet expresses an opinion about the topic.",
        "Let's look at the wording of the tweet first.",
        "The tweeter uses a hashtag and a short statement.",
    ])
    if rng.random() < 0.04:
        return opening + " There is not enough information to decide."
    middle = rng.choice([
        f"At first glance one might read it as '{decoy}', but the context matters.",
        "The key phrase reveals how the tweeter feels.",
        f"It is not obviously {decoy} on its own.",
    ])
    ending = rng.choice([
        f"Therefore, the stance of the tweet is '{word}'.",
        f"So the label is {word}.",
        f"Stance: {word}",
    ])
    return " ".join([opening, middle, ending])


def write_replay(path: Path, rows, kind, seed):
    rng = random.Random(seed)
    accuracy = {"zero_shot": 0.55, "few_shot": 0.65, "CoT": 0.45}[kind]
    out = io.StringIO(newline="")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["ID", "response"])
    for rid, _, gold, _ in rows:
        label = noisy_label(rng, gold, accuracy)
        response = cot_response(rng, label) if kind == "CoT" else single_word_response(rng, label)
        writer.writerow([rid, response])
    path.write_text(out.getvalue(), encoding="utf-8")


# --- Table replay -----------------------------------------------------------------------
# (model_type, prompt_type, set) -> (diagonal, predicted column sums), label order
# AGAINST, FAVOR, NONE. Gold supports are 67/21/32 (vali) and 188/46/45 (test).
SUPPORTS = {"vali": (67, 21, 32), "test": (188, 46, 45)}
TABLE_RUNS = {
    ("llm_chatgpt_turbo_3_5", "zero_shot", "vali"): ((27, 17, 31), (27, 30, 63)),
    ("llm_chatgpt_turbo_3_5", "zero_shot", "test"): ((49, 40, 44), (49, 73, 157)),
    ("llm_chatgpt_turbo_3_5", "few_shot", "vali"): ((46, 20, 28), (49, 33, 38)),
    ("llm_chatgpt_turbo_3_5", "few_shot", "test"): ((96, 44, 40), (98, 84, 97)),
    ("llm_chatgpt_turbo_3_5", "CoT", "vali"): ((13, 10, 31), (13, 18, 89)),
    ("llm_chatgpt_turbo_3_5", "CoT", "test"): ((25, 27, 45), (25, 49, 205)),
    ("llm_flan-t5-large", "zero_shot", "test"): ((58, 21, 1), (92, 186, 1)),
    ("llm_flan-t5-large", "few_shot", "test"): ((88, 19, 2), (131, 145, 3)),
    ("llm_flan-t5-xxl", "zero_shot", "test"): ((124, 34, 28), (146, 82, 51)),
    ("llm_flan-t5-xxl", "few_shot", "test"): ((119, 33, 27), (142, 81, 56)),
}


def complete_matrix(support, diagonal, colsum):
    """Some 3x3 count matrix with the given row sums, diagonal and column sums."""
    row_left = [support[i] - diagonal[i] for i in range(3)]
    col_left = [colsum[j] - diagonal[j] for j in range(3)]
    assert sum(row_left) == sum(col_left) and min(row_left + col_left) >= 0
    for order in itertools.permutations([(i, j) for i in range(3) for j in range(3) if i != j]):
        m = [[diagonal[i] if i == j else 0 for j in range(3)] for i in range(3)]
        r, c = list(row_left), list(col_left)
        for i, j in order:
            take = min(r[i], c[j])
            m[i][j] += take
            r[i] -= take
            c[j] -= take
        if not any(r) and not any(c):
            return m
    raise ValueError(f"no matrix for {support} {diagonal} {colsum}")


def write_table(out_dir: Path):
    rng = random.Random(7)
    records = []  # (id, tweet, label, partition)
    next_id = 50000
    for partition in ("train", "vali", "test"):
        counts = (20, 20, 20) if partition == "train" else SUPPORTS[partition]
        for label, n in zip(LABELS, counts):
            for _ in range(n):
                records.append((str(next_id), f"table fixture tweet {next_id}", label, partition))
                next_id += 1
    corpus = io.StringIO(newline="")
    writer = csv.writer(corpus, lineterminator="\n")
    writer.writerow(["ID", "tweet", "topic", "label", "partition"])
    for rid, tweet, label, partition in records:
        writer.writerow([rid, tweet, "Abortion", label, partition])
    (out_dir / "corpus.csv").write_text(corpus.getvalue(), encoding="utf-8")

    runs = {}
    for (model, prompt, partition), (diagonal, colsum) in TABLE_RUNS.items():
        m = complete_matrix(SUPPORTS[partition], diagonal, colsum)
        by_gold = {label: [r for r in records if r[3] == partition and r[2] == label] for label in LABELS}
        lines = runs.setdefault((model, prompt), [])
        for gi, gold in enumerate(LABELS):
            predicted = [LABELS[pj] for pj in range(3) for _ in range(m[gi][pj])]
            rng.shuffle(predicted)
            for record, label in zip(by_gold[gold], predicted):
                lines.append((record[0], WORDS[label]))
    for (model, prompt), lines in runs.items():
        run_dir = out_dir / model / prompt
        run_dir.mkdir(parents=True, exist_ok=True)
        body = io.StringIO(newline="")
        writer = csv.writer(body, lineterminator="\n")
        writer.writerow(["ID", "stance_predicted"])
        writer.writerows(sorted(lines, key=lambda x: int(x[0])))
        (run_dir / "predictions.csv").write_text(body.getvalue(), encoding="utf-8")


def main():
    out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "data"
    (out_dir / "raw").mkdir(parents=True, exist_ok=True)
    (out_dir / "replay").mkdir(parents=True, exist_ok=True)
    (out_dir / "table").mkdir(parents=True, exist_ok=True)

    rng = random.Random(20160101)
    seen = set()
    train = build_split(rng, TRAIN_COUNTS, SPECIAL_TRAIN, 2500, TRAIN_DUPLICATES, seen)
    test = build_split(rng, TEST_COUNTS, SPECIAL_TEST, 10001, TEST_DUPLICATES, seen)
    write_tsv(out_dir / "raw" / "train.tsv", train + other_target_rows(rng, 30, 4000))
    write_tsv(out_dir / "raw" / "test.tsv", test + other_target_rows(rng, 15, 12000))

    for seed, kind in enumerate(["zero_shot", "few_shot", "CoT"], start=1):
        write_replay(out_dir / "replay" / f"{kind}.csv", train + test, kind, seed)
    write_table(out_dir / "table")


if __name__ == "__main__":
    main()
