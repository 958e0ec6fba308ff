"""Dictionaries reproducing the "Hank Williams" examples, plus small helpers."""
from ned.canonical import PageKind, PageRecord, build_components
from ned.dictbuild import LinkRow, Source, harvest


def article(title):
    return PageRecord(title, PageKind.ARTICLE)


def link(provenance, string, target, count=0):
    return LinkRow(Source(provenance), string, target, count)


def build(pages, links, edges=(), kb_titles=()):
    cmap = build_components(pages, edges, frozenset(kb_titles))
    return cmap, harvest(pages, cmap, links, kb_titles)


# exact-string entries for "Hank Williams": w = wiki links, W = web links
EXCT_PAGES = [
    article("Hank_Williams"),
    article("Your_Cheatin'_Heart"),
    article("Hank_Williams_(Clickradio_CEO)"),
    article("Hank_Williams_(basketball)"),
    article("Hank_Williams,_Jr."),
    article("Hank_Williams_First_Nation"),
    article("Hank_Williams_III"),
    PageRecord("Hank_Williams_(disambiguation)", PageKind.DISAMBIG),
]
EXCT_LINKS = [
    link("wiki", "Hank Williams", "Hank_Williams", 756),
    link("wiki", "Hank Williams", "Hank_Williams_(Clickradio_CEO)", 1),
    link("wiki", "Hank Williams", "Hank_Williams_(basketball)", 1),
    link("web", "Hank Williams", "Hank_Williams", 936),
    link("web", "Hank Williams", "Your_Cheatin'_Heart", 2),
    link("disambig", "Hank_Williams_(disambiguation)", "Hank_Williams,_Jr."),
    link("disambig", "Hank_Williams_(disambiguation)", "Hank_Williams_First_Nation"),
    link("disambig", "Hank_Williams_(disambiguation)", "Hank_Williams_III"),
]
EXCT_EXPECTED = [
    ("0.9976", "Hank_Williams"),
    ("0.0012", "Your_Cheatin'_Heart"),
    ("0.0006", "Hank_Williams_(Clickradio_CEO)"),
    ("0.0006", "Hank_Williams_(basketball)"),
    ("0.0000", "Hank_Williams,_Jr."),
    ("0.0000", "Hank_Williams_(disambiguation)"),
    ("0.0000", "Hank_Williams_First_Nation"),
    ("0.0000", "Hank_Williams_III"),
]

# other keys whose normalized form is "hankwilliams"
LNRM_LINKS = EXCT_LINKS + [
    link("web", "HANK WILLIAMS", "Hank_Williams", 20),
    link("web", "HANK WILLIAMS", "I'm_So_Lonesome_I_Could_Cry", 1),
    link("disambig", "hank williams", "Hank_Williams_(Clickradio_CEO)"),
    link("disambig", "hank williams", "Hank_Williams_(basketball)"),
    link("disambig", "hank williams", "Hank_Williams_(disambiguation)"),
]
LNRM_EXPECTED = [
    ("0.9524", "Hank_Williams"),
    ("0.0476", "I'm_So_Lonesome_I_Could_Cry"),
    ("0.0000", "Hank_Williams_(Clickradio_CEO)"),
    ("0.0000", "Hank_Williams_(basketball)"),
    ("0.0000", "Hank_Williams_(disambiguation)"),
]

# keys one byte away from "hankwilliams", and one two bytes away
FUZZ_LINKS = EXCT_LINKS + [
    link("wiki", "Tank Williams", "Tank_Williams", 12),
    link("web", "Hanks Williams", "Hank_Williams", 6),
    link("web", "Hanks Williams", "Your_Cheatin'_Heart", 1),
    link("wiki", "Hank Willis", "Hank_Willis", 50),
]
FUZZ_EXPECTED = [
    ("0.6316", "Tank_Williams"),
    ("0.3158", "Hank_Williams"),
    ("0.0526", "Your_Cheatin'_Heart"),
]


def hank_dictionary(links=EXCT_LINKS):
    return build(EXCT_PAGES, links)[1]
