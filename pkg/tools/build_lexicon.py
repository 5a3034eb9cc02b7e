"""Compile the embedded part-of-speech lexicon.

Run once, offline, with ``lemminflect`` installed; the output file is
committed so the package has no runtime NLP dependency::

    python tools/build_lexicon.py answers.txt > src/wordlecast/data/pos_lexicon.csv

The word list is one five-letter word per line. Words the lemma tables do
not know are left out and fall back to code 0 at lookup time.
"""
import re
import sys

from lemminflect import getAllLemmas

CODES = {"NOUN": 1, "VERB": 2, "ADJ": 3, "ADV": 4}

# pronouns, determiners, prepositions, conjunctions and numerals
CLOSED_CLASS = {
    "about", "above", "after", "again", "along", "among", "below", "eight",
    "every", "fifty", "forty", "other", "since", "their", "there", "these",
    "those", "three", "until", "where", "which", "while", "whose", "would",
    "could", "might", "shall", "ought", "under", "seven", "sixty",
}


def main(path):
    with open(path, encoding="ascii") as fh:
        words = sorted({w.strip() for w in fh if re.fullmatch(r"[a-z]{5}", w.strip())})
    for word in words:
        if word in CLOSED_CLASS:
            print(f"{word},5")
            continue
        lemmas = getAllLemmas(word)
        if not lemmas:
            continue
        print(f"{word},{CODES.get(next(iter(lemmas)), 5)}")


if __name__ == "__main__":
    main(sys.argv[1])
