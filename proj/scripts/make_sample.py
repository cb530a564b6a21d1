#!/usr/bin/env python3
"""Writes fixtures/sample.tsv: a small synthetic corpus in the mimics-manual layout."""
import argparse
import random

QUERIES = [
    ("jaguar", ["jaguar car", "jaguar animal", "jaguar logo", "jaguar price"]),
    ("python", ["python snake", "python programming", "python download", "python tutorial"]),
    ("headache", ["headache causes", "headache remedies", "headache types"]),
    ("apple", ["apple stock", "apple fruit", "apple store", "apple watch"]),
    ("mercury", ["mercury planet", "mercury element", "mercury poisoning"]),
    ("running shoes", ["running shoes for men", "running shoes for women", "trail running shoes"]),
    ("paris", ["paris hotels", "paris weather", "paris attractions", "paris map"]),
    ("pizza", ["pizza near me", "pizza recipe", "pizza delivery"]),
    ("bass", ["bass guitar", "bass fish", "bass boat"]),
    ("laptop", ["gaming laptop", "cheap laptop", "laptop deals", "laptop reviews"]),
    ("diabetes", ["diabetes symptoms", "diabetes diet", "diabetes treatment"]),
    ("amazon", ["amazon prime", "amazon river", "amazon jobs", "amazon stock"]),
    ("coffee", ["coffee beans", "coffee maker", "coffee shops"]),
    ("java", ["java download", "java island", "java coffee"]),
]

GOOD = [
    "What would you like to know about {q}?",
    "Which {q} are you looking for?",
    "What do you want to do with {q}?",
    "Which {q} do you mean?",
    "Which popular {q} are you looking for?",
    "What would you really like to know about the best {q}?",
]
FAIR = [
    "What are you trying to do?",
    "Do you have {q} in mind?",
    "Who are you shopping for?",
    "Do you have a specific {q} in mind?",
]
BAD = [
    "Select one",
    "{q}?",
    "More about this",
    "Not sure what {q} is, bad results?",
]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--rows", type=int, default=50)
    ap.add_argument("--out", default="fixtures/sample.tsv")
    args = ap.parse_args()
    rng = random.Random(args.seed)

    header = ["query", "question", "option_1", "option_2", "option_3", "option_4", "option_5", "question_label"]
    lines = ["\t".join(header)]
    for _ in range(args.rows):
        q, opts = rng.choice(QUERIES)
        label = rng.choices([2, 1, 0], weights=[5, 3, 2])[0]
        pool = {2: GOOD, 1: FAIR, 0: BAD}[label]
        question = rng.choice(pool).format(q=q)
        if rng.random() < 0.2:
            label = rng.choice([0, 1, 2])
        k = rng.randint(2, min(5, len(opts))) if label else rng.randint(2, 3)
        chosen = rng.sample(opts, min(k, len(opts)))
        chosen += [""] * (5 - len(chosen))
        lines.append("\t".join([q, question] + chosen + [str(label)]))
    with open(args.out, "w") as f:
        f.write("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
