#!/usr/bin/env python3
"""Regenerates tests/data/golden_normalization.tsv.

Expected values are produced with CPython's unicodedata, which is an
implementation of the Unicode algorithms independent from the ICU-backed
C++ code under test. Recipe: full lowercase, NFD, drop Mn/Mc/Me, NFC,
collapse whitespace runs to single spaces, trim.
"""

import sys
import unicodedata


def normalize(text: str) -> str:
    lowered = text.lower()
    decomposed = unicodedata.normalize("NFD", lowered)
    stripped = "".join(
        ch for ch in decomposed if unicodedata.category(ch) not in ("Mn", "Mc", "Me")
    )
    recomposed = unicodedata.normalize("NFC", stripped)
    return " ".join(recomposed.split())


CASES = [
    # Polytonic Greek: breathings, accents, iota subscript, diaeresis.
    "Θάλασσα",
    "λογος",
    "Ἐν ἀρχῇ ἦν ὁ λόγος",
    "καὶ ὁ λόγος ἦν πρὸς τὸν θεόν",
    "Μῆνιν ἄειδε θεὰ Πηληϊάδεω Ἀχιλῆος",
    "οὐλομένην, ἣ μυρί' Ἀχαιοῖς ἄλγε' ἔθηκε",
    "ἄνδρα μοι ἔννεπε, μοῦσα, πολύτροπον",
    "ὃς μάλα πολλὰ πλάγχθη",
    "τῷ ᾠδείῳ",
    "ᾍδης",
    "ᾨδή",
    "ῥήτωρ",
    "Ῥόδος",
    "ὑἱός",
    "ἀϋπνία",
    "προΐστημι",
    "νηῦς",
    "γλαῦξ",
    "ἡ τῶν Ἑλλήνων πόλις",
    "Πλούταρχος ὁ Χαιρωνεύς",
    "Ψευδο-Πλούταρχος",
    "Περὶ ποταμῶν",
    "Περὶ μουσικῆς",
    "Τὰ ἀρέσκοντα τοῖς φιλοσόφοις",
    "ΘΑΛΑΣΣΑ ΚΑΙ ΠΥΡ",
    "ΟΔΥΣΣΕΥΣ",
    "Σ",
    "ΣΟΦΙΑΣ",
    "σοφίας ς",
    "ὁ ἄνθρωπος· τί ἐστι;",
    "ἆρα γε;",
    "ναί!",
    "ᾖ ᾗ ᾐ ᾑ",
    "ηὗρον",
    "εὕρηκα",
    "ὤ, ὦ, ᾧ",
    "ϊ ϋ ΐ ΰ",
    "ἀγορά, ἀγορᾶς, ἀγορᾷ",
    "δοῦλος καὶ ἐλεύθερος",
    "ξένος ξίφος ἔξω",
    "Greek and Λατινικά mixed: Café",
    "naïve façade",
    "ÅNGSTRÖM",
    "İstanbul",
    "Đuro Živković",
    "Ἅγιος Ὁ Θεός, Ἅγιος Ἰσχυρός",
    "πάντα ῥεῖ καὶ οὐδὲν μένει",
    "ἓν οἶδα ὅτι οὐδὲν οἶδα",
    "γνῶθι σεαυτόν",
    "μηδὲν ἄγαν",
    "ὁ   βίος\tβραχύς,\nἡ δὲ τέχνη μακρή",
    "  περὶ  τῶν   ποταμῶν  ",
    "ζῷον πολιτικόν",
    "τὰ ὄντα ἰέναι τε πάντα καὶ μένειν οὐδέν",
    "Ἡράκλειτος ὁ Ἐφέσιος",
    "ᾯ",
    "ὐ ὔ ὖ",
    "ἶ ἷ",
    "ϐ ϑ ϕ ϖ",
    "·",
    "α·β",
]


def main() -> None:
    out = sys.argv[1] if len(sys.argv) > 1 else "tests/data/golden_normalization.tsv"
    with open(out, "w", encoding="utf-8") as fh:
        fh.write("# input<TAB>expected, \\uXXXX escapes for non-ASCII\n")
        for case in CASES:
            expected = normalize(case)
            enc_in = case.encode("unicode_escape").decode("ascii").replace("\t", "\\t")
            enc_out = expected.encode("unicode_escape").decode("ascii")
            fh.write(f"{enc_in}\t{enc_out}\n")
    print(f"wrote {len(CASES)} cases to {out}")


if __name__ == "__main__":
    main()
