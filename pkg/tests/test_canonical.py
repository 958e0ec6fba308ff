import random
from collections import deque

import pytest

from ned.canonical import (
    CanonicalMap, PageKind, PageRecord, RedirectEdge, UnionFind, build_components,
    canonicalize_title, read_pages, read_redirects, resolve,
)
from ned.errors import EmptyTitle, MalformedRow


class TestCanonicalizeTitle:
    def test_spaces_and_first_letter(self):
        assert canonicalize_title("hank williams") == "Hank_Williams"

    def test_collapses_and_strips_underscores(self):
        assert canonicalize_title("__Abu__Sayyaf_ ") == "Abu_Sayyaf"

    def test_percent_escapes_decoded_once(self):
        assert canonicalize_title("Your_Cheatin%27_Heart") == "Your_Cheatin'_Heart"
        assert canonicalize_title("100%2525") == "100%25"

    def test_only_first_letter_changes(self):
        assert canonicalize_title("iPod") == "IPod"
        assert canonicalize_title("eBay_(company)") == "EBay_(company)"

    def test_multi_character_uppercase_left_alone(self):
        assert canonicalize_title("ßtest") == "ßtest"

    @pytest.mark.parametrize("raw", ["", "   ", "___", "%20"])
    def test_empty(self, raw):
        with pytest.raises(EmptyTitle):
            canonicalize_title(raw)

    def test_idempotent(self):
        for raw in ["a b", "Hank Williams (basketball)", "élan", "x__y"]:
            once = canonicalize_title(raw)
            assert canonicalize_title(once) == once


class TestUnionFind:
    def test_components(self):
        uf = UnionFind("abcde")
        uf.union("a", "b")
        uf.union("c", "d")
        uf.union("b", "d")
        groups = sorted(sorted(g) for g in uf.components().values())
        assert groups == [["a", "b", "c", "d"], ["e"]]

    def test_matches_bfs_oracle(self):
        rng = random.Random(7)
        for _ in range(50):
            nodes = list(range(30))
            edges = [(rng.randrange(30), rng.randrange(30)) for _ in range(rng.randrange(40))]
            uf = UnionFind(nodes)
            adj = {n: set() for n in nodes}
            for a, b in edges:
                uf.union(a, b)
                adj[a].add(b)
                adj[b].add(a)
            for start in nodes:
                seen, queue = {start}, deque([start])
                while queue:
                    for nxt in adj[queue.popleft()]:
                        if nxt not in seen:
                            seen.add(nxt)
                            queue.append(nxt)
                assert {n for n in nodes if uf.find(n) == uf.find(start)} == seen


class TestBuildComponents:
    def test_article_beats_redirect(self):
        pages = [PageRecord("Bud_Abbott", PageKind.ARTICLE), PageRecord("William_Abbott", PageKind.REDIRECT)]
        cmap = build_components(pages, [RedirectEdge("William_Abbott", "Bud_Abbott")])
        assert resolve(cmap, "William_Abbott") == "Bud_Abbott"
        assert resolve(cmap, "Bud_Abbott") == "Bud_Abbott"

    def test_kb_title_preferred(self):
        pages = [PageRecord("ABC_Australia", PageKind.ARTICLE),
                 PageRecord("Australian_Broadcasting_Corporation", PageKind.ARTICLE)]
        edges = [RedirectEdge("ABC_Australia", "Australian_Broadcasting_Corporation")]
        without = build_components(pages, edges)
        assert without.resolve("Australian_Broadcasting_Corporation") == "ABC_Australia"
        with_kb = build_components(pages, edges, frozenset({"Australian_Broadcasting_Corporation"}))
        assert with_kb.resolve("ABC_Australia") == "Australian_Broadcasting_Corporation"

    def test_edge_direction_irrelevant(self):
        pages = [PageRecord("A", PageKind.ARTICLE), PageRecord("B", PageKind.REDIRECT)]
        forward = build_components(pages, [RedirectEdge("B", "A")])
        backward = build_components(pages, [RedirectEdge("A", "B")])
        assert forward.mapping == backward.mapping

    def test_chain_and_cycle(self):
        pages = [PageRecord(t, PageKind.REDIRECT) for t in ("R1", "R2", "R3")] + [PageRecord("Target", PageKind.ARTICLE)]
        edges = [RedirectEdge("R1", "R2"), RedirectEdge("R2", "R3"), RedirectEdge("R3", "R1"),
                 RedirectEdge("R3", "Target")]
        cmap = build_components(pages, edges)
        assert {cmap.resolve(t) for t in ("R1", "R2", "R3", "Target")} == {"Target"}

    def test_unknown_endpoint_is_crawl_only(self):
        cmap = build_components([PageRecord("Known", PageKind.REDIRECT)], [RedirectEdge("Known", "Elsewhere")])
        assert cmap.kind_of["Elsewhere"] is PageKind.CRAWL_ONLY
        # redirect (2) beats crawl-only (3)
        assert cmap.resolve("Elsewhere") == "Known"

    def test_duplicate_page_keeps_best_kind(self):
        pages = [PageRecord("X", PageKind.REDIRECT), PageRecord("X", PageKind.ARTICLE)]
        assert build_components(pages, []).kind_of["X"] is PageKind.ARTICLE

    def test_unseen_title_resolves_to_itself(self):
        cmap = build_components([PageRecord("A", PageKind.ARTICLE)], [])
        assert cmap.resolve("never seen") == "Never_seen"
        assert cmap.canonical_kind("Never_seen") is PageKind.CRAWL_ONLY

    def test_idempotent_resolution(self):
        pages = [PageRecord("A", PageKind.ARTICLE), PageRecord("B", PageKind.REDIRECT)]
        cmap = build_components(pages, [RedirectEdge("B", "A")])
        for t in ("A", "B"):
            assert cmap.resolve(cmap.resolve(t)) == cmap.resolve(t)

    def test_deterministic_under_input_order(self):
        pages = [PageRecord(t, PageKind.REDIRECT) for t in "PQRS"]
        edges = [RedirectEdge("P", "Q"), RedirectEdge("R", "S"), RedirectEdge("Q", "S")]
        first = build_components(pages, edges)
        second = build_components(list(reversed(pages)), list(reversed(edges)))
        assert list(first.rows()) == list(second.rows())
        assert first.resolve("S") == "P"

    def test_route_cluster(self):
        canonical = "Virginia_State_Route_758_(Lee_County)"
        redirects = [
            "Route_102_(Virginia_pre-1933)", "State_Route_102_(Virginia_1928)",
            "State_Route_102_(Virginia_1928-1933)", "State_Route_102_(Virginia_pre-1933)",
            "State_Route_63_(Virginia_1933)", "State_Route_63_(Virginia_1933-1946)",
            "State_Route_63_(Virginia_1940)", "State_Route_63_(Virginia_pre-1946)",
            "State_Route_758_(Lee_County,_Virginia)",
        ]
        pages = [PageRecord(t, PageKind.REDIRECT) for t in redirects] + [PageRecord(canonical, PageKind.ARTICLE)]
        # old route names chain into each other before reaching the article
        edges = [RedirectEdge(a, b) for a, b in zip(redirects, redirects[1:])]
        edges.append(RedirectEdge(redirects[-1], canonical))
        rng = random.Random(5)
        rng.shuffle(pages)
        rng.shuffle(edges)
        cmap = build_components(pages, edges)
        assert len(cmap) == 10
        assert {cmap.resolve(t) for t in redirects + [canonical]} == {canonical}

    def test_canonicals_match_bfs_at_scale(self):
        rng = random.Random(1000)
        kinds = [PageKind.ARTICLE, PageKind.REDIRECT, PageKind.DISAMBIG]
        titles = [f"Page_{i:04d}" for i in range(1000)]
        pages = [PageRecord(t, rng.choice(kinds)) for t in titles]
        kind_of = {p.url_title: p.kind for p in pages}
        pairs = set()
        while len(pairs) < 900:
            a, b = rng.sample(titles, 2)
            pairs.add((a, b))
        edges = [RedirectEdge(a, b) for a, b in sorted(pairs)]
        cmap = build_components(pages, edges)

        adj = {t: set() for t in titles}
        for a, b in pairs:
            adj[a].add(b)
            adj[b].add(a)
        seen_all = set()
        for start in titles:
            if start in seen_all:
                continue
            component, queue = {start}, deque([start])
            while queue:
                for nxt in adj[queue.popleft()]:
                    if nxt not in component:
                        component.add(nxt)
                        queue.append(nxt)
            seen_all |= component
            expected = min(component, key=lambda t: (kind_of[t].preference, t))
            assert {cmap.resolve(t) for t in component} == {expected}
            if any(kind_of[t] is PageKind.ARTICLE for t in component):
                assert kind_of[expected] is PageKind.ARTICLE


class TestFiles:
    def test_round_trip(self, tmp_path):
        pages = [PageRecord("A", PageKind.ARTICLE), PageRecord("B", PageKind.REDIRECT)]
        cmap = build_components(pages, [RedirectEdge("B", "A")])
        path = cmap.save(tmp_path / "canonical.tsv")
        assert path.read_text(encoding="utf-8") == "A\tA\tarticle\nB\tA\tredirect\n"
        assert CanonicalMap.load(path).mapping == cmap.mapping

    def test_read_pages_and_redirects(self, tmp_path):
        (tmp_path / "pages.tsv").write_text("bud Abbott\tarticle\nWilliam Abbott\tredirect\n", encoding="utf-8")
        (tmp_path / "redirects.tsv").write_text("William Abbott\tBud_Abbott\n", encoding="utf-8")
        pages = read_pages(tmp_path / "pages.tsv")
        assert pages[0] == PageRecord("Bud_Abbott", PageKind.ARTICLE)
        assert read_redirects(tmp_path / "redirects.tsv") == [RedirectEdge("William_Abbott", "Bud_Abbott")]

    def test_bad_kind_reports_line(self, tmp_path):
        (tmp_path / "pages.tsv").write_text("A\tarticle\nB\tstub\n", encoding="utf-8")
        with pytest.raises(MalformedRow) as err:
            read_pages(tmp_path / "pages.tsv")
        assert err.value.line_no == 2
