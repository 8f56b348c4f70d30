#!/usr/bin/env python3
"""Generate the bundled synthetic tweet-like NER corpus.

Output is fully determined by --seed. Writes, under --out:
  train_2010.conll, train_2015.conll, test.conll   token<TAB>label
  raw.txt                                          unlabelled text for clustering
and gazetteer lists plus a manifest under --gaz-out.
"""

import argparse
import os
import random

ENTITIES = {
    "person": {
        "old": ["John Smith", "Mary Jones", "Barack Obama", "Justin Bieber", "Lady Gaga",
                "David Beckham", "Taylor Swift", "Tom Hanks"],
        "new": ["Katja Weber", "Ed Sheeran", "Kim Kardashian", "Taylor Swift", "Adele",
                "Harry Styles", "Tom Hanks"],
    },
    "company": {
        "old": ["Google", "Apple", "Microsoft", "Nokia", "MySpace", "Yahoo"],
        "new": ["Google", "Apple", "Uber", "Snapchat", "Tesla", "Netflix"],
    },
    "geo-loc": {
        "old": ["London", "New York", "Paris", "Chicago", "Texas", "Sheffield"],
        "new": ["London", "Berlin", "Tokyo", "New York", "Manchester", "Austin"],
    },
    "facility": {
        "old": ["Wembley Stadium", "Madison Square Garden", "the Louvre"],
        "new": ["O2 Arena", "Wembley Stadium", "Staples Center"],
    },
    "product": {
        "old": ["iPhone", "Xbox", "Windows Vista", "BlackBerry"],
        "new": ["iPhone 6", "PS4", "Apple Watch", "Android"],
    },
    "sportsteam": {
        "old": ["Arsenal", "Chelsea", "Lakers", "Yankees"],
        "new": ["Arsenal", "Liverpool", "Warriors", "Patriots"],
    },
    "movie": {
        "old": ["Avatar", "Inception", "Toy Story"],
        "new": ["Frozen", "Interstellar", "Star Wars"],
    },
    "musicartist": {
        "old": ["Coldplay", "Linkin Park", "Muse"],
        "new": ["One Direction", "Coldplay", "Arctic Monkeys"],
    },
    "tvshow": {
        "old": ["Glee", "Lost", "The Office"],
        "new": ["Game of Thrones", "Breaking Bad", "Sherlock"],
    },
    "other": {
        "old": ["Christmas", "Halloween", "Easter"],
        "new": ["Christmas", "Pentecost", "Thanksgiving"],
    },
}

TEMPLATES = {
    "person": ["just saw {} at the mall", "{} is trending again", "can't believe {} said that",
               "listening to an interview with {} tonight", "met {} today !!"],
    "company": ["{} stock is up", "new job at {} starts monday", "{} announced a new service",
                "why does {} keep changing the app"],
    "geo-loc": ["heading to {} this weekend", "weather in {} is awful", "live from {}",
                "flight to {} delayed again"],
    "facility": ["concert at {} tonight", "queue outside {} is huge", "meet you at {}"],
    "product": ["my {} screen cracked", "finally got the new {}", "{} battery life is terrible"],
    "sportsteam": ["come on {} !", "{} lost again", "watching {} tonight with the lads"],
    "movie": ["watching {} for the third time", "{} was so good", "tickets for {} tonight"],
    "musicartist": ["{} new album is out", "listening to {} on repeat", "{} live was amazing"],
    "tvshow": ["new episode of {} tonight", "{} finale tomorrow", "binge watching {} all day"],
    "other": ["happy {} everyone", "{} plans anyone ?", "cannot wait for {}"],
}

FILLER = ["lol", "omg", "so", "really", "today", "now", "haha", "#tbt", "#fail", "@jess_88",
          "@mike", "http://t.co/x1y2", "at", "the", "with", "and", "of", ":)", "..."]

PLAIN = ["i love mornings", "going to bed now", "so tired today", "this is the best day",
         "coffee first then work", "anyone else awake ?", "cannot sleep again", "rain rain rain",
         "what a game", "good morning world", "monday again ugh", "weekend plans anyone",
         "lunch was great", "new phone who dis", "stuck in traffic"]


def noisy(name, rng):
    if rng.random() < 0.12:
        return name.lower()
    return name


def labelled(words, type_):
    return [(w, ("B-" if i == 0 else "I-") + type_) for i, w in enumerate(words)]


def sentence(rng, vintage, types):
    out = []
    if rng.random() < 0.25:
        out.append((rng.choice(FILLER), "O"))
    n_ent = 1 if rng.random() < 0.8 else 2
    for k in range(n_ent):
        type_ = rng.choice(types)
        name = noisy(rng.choice(ENTITIES[type_][vintage]), rng)
        template = rng.choice(TEMPLATES[type_])
        before, after = template.split("{}")
        for w in before.split():
            out.append((w, "O"))
        out.extend(labelled(name.split(), type_))
        for w in after.split():
            out.append((w, "O"))
        if k + 1 < n_ent:
            out.append(("and", "O"))
    if rng.random() < 0.3:
        out.append((rng.choice(FILLER), "O"))
    return out


def write_conll(path, sentences):
    with open(path, "w", encoding="utf-8") as f:
        for s in sentences:
            for w, l in s:
                f.write(f"{w}\t{l}\n")
            f.write("\n")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=2015)
    ap.add_argument("--out", default="data/synthetic")
    ap.add_argument("--gaz-out", default="data/gazetteers")
    ap.add_argument("--old", type=int, default=80)
    ap.add_argument("--new", type=int, default=80)
    ap.add_argument("--test", type=int, default=40)
    ap.add_argument("--raw", type=int, default=600)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    types = sorted(ENTITIES)
    os.makedirs(args.out, exist_ok=True)
    old = [sentence(rng, "old", types) for _ in range(args.old)]
    new = [sentence(rng, "new", types) for _ in range(args.new)]
    test = [sentence(rng, "new", types) for _ in range(args.test)]
    write_conll(os.path.join(args.out, "train_2010.conll"), old)
    write_conll(os.path.join(args.out, "train_2015.conll"), new)
    write_conll(os.path.join(args.out, "test.conll"), test)

    with open(os.path.join(args.out, "raw.txt"), "w", encoding="utf-8") as f:
        for s in old + new + test:
            f.write(" ".join(w for w, _ in s) + "\n")
        for _ in range(args.raw):
            if rng.random() < 0.5:
                f.write(rng.choice(PLAIN) + "\n")
            else:
                s = sentence(rng, rng.choice(["old", "new"]), types)
                f.write(" ".join(w for w, _ in s) + "\n")

    # Gazetteers cover most, not all, names; aliases are surnames.
    os.makedirs(args.gaz_out, exist_ok=True)
    manifest = []
    for type_, source in [("person", "Freebase_person"), ("company", "Freebase_business"),
                          ("geo-loc", "Freebase_location"), ("sportsteam", "Freebase_sportsteam"),
                          ("product", "Freebase_consumerproduct")]:
        names = sorted(set(ENTITIES[type_]["old"]) | set(ENTITIES[type_]["new"]))
        kept = [n for n in names if rng.random() < 0.8]
        fname = source.lower() + ".txt"
        with open(os.path.join(args.gaz_out, fname), "w", encoding="utf-8") as f:
            f.write("\n".join(kept) + "\n")
        manifest.append(f"{source}\t{fname}\tname\t{type_}")
        if type_ == "person":
            aliases = sorted({n.split()[-1] for n in names if " " in n})
            aname = source.lower() + "_alias.txt"
            with open(os.path.join(args.gaz_out, aname), "w", encoding="utf-8") as f:
                f.write("\n".join(aliases) + "\n")
            manifest.append(f"{source}\t{aname}\talias\t{type_}")
    with open(os.path.join(args.gaz_out, "trigger_words.txt"), "w", encoding="utf-8") as f:
        f.write("tonight\nlive from\nwatching\n")
    manifest.append("triggers\ttrigger_words.txt\tname\t-")
    with open(os.path.join(args.gaz_out, "manifest.tsv"), "w", encoding="utf-8") as f:
        f.write("# source\tpath\talias\tne_type\n")
        f.write("\n".join(manifest) + "\n")


if __name__ == "__main__":
    main()
