"""Exact-rational readability values used by the C++ tests."""
from fractions import Fraction as F


def flesch(words, sentences, syllables):
    return F(206835, 1000) - F(1015, 1000) * F(words, sentences) - F(846, 10) * F(syllables, words)


def fog(words, sentences, complex_words):
    return F(4, 10) * (F(words, sentences) + 100 * F(complex_words, words))


if __name__ == "__main__":
    for args in [(6, 1, 6, 0), (10, 2, 14, 2)]:
        w, s, syl, cx = args
        print(args, float(flesch(w, s, syl)), flesch(w, s, syl), float(fog(w, s, cx)), fog(w, s, cx))
