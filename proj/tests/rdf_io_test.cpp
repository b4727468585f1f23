#include <doctest.h>

#include <set>

#include "nibskg/rdf_io.hpp"
#include "nibskg/vocabulary.hpp"
#include "support/test_util.hpp"

using namespace nibskg;
using namespace nibskg::testsupport;

namespace {

std::string triple_fingerprint(const std::string& s, const std::string& p, const ParsedTerm& o) {
    std::string key = s + "\x1E" + p + "\x1E";
    if (o.is_iri) {
        key += "I" + o.iri;
    } else {
        key += "L" + std::to_string(static_cast<int>(o.literal.datatype())) + "\x1F" +
               (o.literal.lang() ? *o.literal.lang() : "") + "\x1F" + o.literal.lexical();
    }
    return key;
}

std::multiset<std::string> store_fingerprints(const Store& store) {
    std::multiset<std::string> out;
    for (const auto& st : store.all_statements()) {
        ParsedTerm term;
        if (st.object.is_iri()) {
            term.is_iri = true;
            term.iri = st.object.iri().full();
        } else {
            term.literal = st.object.literal();
        }
        out.insert(triple_fingerprint(st.subject.full(), st.predicate.full(), term));
    }
    return out;
}

std::multiset<std::string> parsed_fingerprints(const std::vector<ParsedTriple>& triples) {
    std::multiset<std::string> out;
    for (const auto& t : triples) {
        out.insert(triple_fingerprint(t.subject, t.predicate, t.object));
    }
    return out;
}

} // namespace

TEST_CASE("hand-encoded escape example") {
    // Expected line derived character-by-character from the grammar: the
    // quote inside the lexical becomes \" and nothing else changes.
    Store store(kTestNamespace);
    Iri r1 = store.mint_entity(EntityKind::Resource, "subject");
    Iri p1 = store.mint_entity(EntityKind::Property, "prop");
    store.add_statement(r1, p1, Term(Literal::string("a\"b")));
    CHECK(serialize(store) ==
          "<http://localhost:8080/resource/R1> <http://localhost:8080/property/P1> "
          "\"a\\\"b\" .\n");
}

TEST_CASE("escape covers named escapes, control characters and UTF-8 passthrough") {
    CHECK(escape_ntriples("A\\B\"C\nD\rE\tF\x01G\xE2\x82\xAC") ==
          "A\\\\B\\\"C\\nD\\rE\\tF\\u0001G\xE2\x82\xAC");
}

TEST_CASE("empty store serializes to empty text") {
    Store store(kTestNamespace);
    CHECK(serialize(store).empty());
}

TEST_CASE("sorted serialization is byte-stable and insertion-order independent") {
    Store a(kTestNamespace);
    Iri s1 = a.mint_entity(EntityKind::Resource, "s1");
    Iri s2 = a.mint_entity(EntityKind::Resource, "s2");
    Iri p = a.mint_entity(EntityKind::Property, "p");
    a.add_statement(s1, p, Term(Literal::string("x")));
    a.add_statement(s2, p, Term(Literal::string("y")));

    Store b(kTestNamespace);
    Iri t1 = b.mint_entity(EntityKind::Resource, "s1");
    Iri t2 = b.mint_entity(EntityKind::Resource, "s2");
    Iri q = b.mint_entity(EntityKind::Property, "p");
    b.add_statement(t2, q, Term(Literal::string("y")));
    b.add_statement(t1, q, Term(Literal::string("x")));

    CHECK(serialize(a) == serialize(b));
    CHECK(serialize(a) == serialize(a));
}

TEST_CASE("typed literals, language tags and datatypes round-trip") {
    Store store(kTestNamespace);
    Iri s = store.mint_entity(EntityKind::Resource, "s");
    Iri p = store.mint_entity(EntityKind::Property, "p");
    store.add_statement(s, p, Term(Literal::integer(-42)));
    store.add_statement(s, p, Term(Literal::decimal("3.25")));
    store.add_statement(s, p, Term(Literal::boolean(true)));
    store.add_statement(s, p, Term(Literal::string("hallo", "de")));

    std::string text = serialize(store);
    CHECK(text.find("\"-42\"^^<http://www.w3.org/2001/XMLSchema#integer>") != std::string::npos);
    CHECK(text.find("\"3.25\"^^<http://www.w3.org/2001/XMLSchema#decimal>") != std::string::npos);
    CHECK(text.find("\"true\"^^<http://www.w3.org/2001/XMLSchema#boolean>") != std::string::npos);
    CHECK(text.find("\"hallo\"@de") != std::string::npos);

    auto parsed = parse_ntriples(text);
    CHECK(parsed_fingerprints(parsed) == store_fingerprints(store));
}

TEST_CASE("parser rejects malformed lines with located errors") {
    auto expect_parse_error = [](const std::string& text, std::size_t line) {
        try {
            parse_ntriples(text);
            CHECK_MESSAGE(false, "expected ParseError for: " << text);
        } catch (const LocatedError& e) {
            CHECK(e.code() == ErrorCode::ParseError);
            CHECK(e.line() == line);
        }
    };
    expect_parse_error("<a> <b> .", 1);
    expect_parse_error("<http://x/a> <http://x/b> .", 1);
    expect_parse_error("<http://x/a> <http://x/b> \"unterminated .", 1);
    expect_parse_error("<http://x/a> <http://x/b> \"bad\\qescape\" .", 1);
    expect_parse_error("<http://x/a> <http://x/b> \"v\" . junk", 1);
    expect_parse_error("<http://x/a> <http://x/b> \"v\"", 1);
    expect_parse_error("<http://x/a> <http://x/b> \"v\"^^<http://example.org/custom> .", 1);
    expect_parse_error("# fine\n<http://x/a> <http://x/b> <http://x /c> .", 2);
}

TEST_CASE("comments and blank lines are ignored") {
    CHECK(parse_ntriples("").empty());
    CHECK(parse_ntriples("# only a comment\n\n   # another\n").empty());
    auto triples =
        parse_ntriples("# c\n<http://x/a> <http://x/b> \"v\" .\n\n# trailing comment\n");
    CHECK(triples.size() == 1);
}

TEST_CASE("unicode escapes decode to UTF-8") {
    auto triples = parse_ntriples(
        "<http://x/a> <http://x/b> \"A\\u00e9B\\U0001F389C\\u0001\" .\n");
    REQUIRE(triples.size() == 1);
    CHECK(triples[0].object.literal.lexical() == "A\u00e9B\U0001F389C\x01");

    // Surrogates and out-of-range escapes are rejected, not smuggled through.
    CHECK_THROWS_AS(parse_ntriples("<http://x/a> <http://x/b> \"\\uD800\" .\n"), LocatedError);
    CHECK_THROWS_AS(parse_ntriples("<http://x/a> <http://x/b> \"\\U00110000\" .\n"),
                    LocatedError);
}

TEST_CASE("mutated dumps either parse or fail with a located error") {
    auto store = make_random_store(77, 300);
    std::string text = serialize(*store);
    REQUIRE(!text.empty());
    Rng rng(777);
    for (int trial = 0; trial < 300; ++trial) {
        std::string mutated = text;
        std::size_t pos = rng.below(static_cast<std::uint32_t>(mutated.size()));
        switch (rng.below(3)) {
            case 0: mutated[pos] = static_cast<char>(rng.below(256)); break;
            case 1: mutated.erase(pos, 1 + rng.below(4)); break;
            default: mutated.insert(pos, 1, static_cast<char>(rng.below(128)));
        }
        try {
            auto triples = parse_ntriples(mutated);
            CHECK(triples.size() <= store->statement_count() + 2);
        } catch (const LocatedError& e) {
            CHECK(e.code() == ErrorCode::ParseError);
            CHECK(e.line() >= 1);
        } catch (const Error& e) {
            // Mutations inside literals can fabricate bad lexical forms.
            CHECK(e.code() == ErrorCode::InvalidLabel);
        }
    }
}

TEST_CASE("round trip holds on adversarial random stores") {
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        auto store = make_random_store(seed, 400 + seed * 37);
        std::string text = serialize(*store);
        auto parsed = parse_ntriples(text);
        CHECK(parsed_fingerprints(parsed) == store_fingerprints(*store));
        CHECK(serialize(*store) == text);
    }
}

TEST_CASE("snapshot save and load reproduce the store") {
    TempDir dir("snapshot");
    auto fixture = make_seeded_store();
    same_as_link(*fixture.store, fixture.manifest,
                 fixture.manifest.properties[0].terms[1].iri,
                 "http://example.org/onto#iTBS");
    save_snapshot(*fixture.store, dir.file("kg"));

    auto loaded = load_snapshot_files(dir.file("kg"), kTestNamespace);
    CHECK(loaded->entity_count() == fixture.store->entity_count());
    CHECK(loaded->statement_count() == fixture.store->statement_count());
    CHECK(serialize(*loaded) == serialize(*fixture.store));

    // Re-seeding the loaded store finds everything by label and mints nothing.
    std::size_t entities_before = loaded->entity_count();
    VocabularyManifest manifest = seed_rtms_vocabulary(*loaded);
    CHECK(loaded->entity_count() == entities_before);
    CHECK(manifest.total_controlled_terms() == 94);
    CHECK(manifest.properties.size() == 15);
}

TEST_CASE("snapshot restores labels with registry escapes") {
    TempDir dir("regesc");
    Store store(kTestNamespace);
    Iri s = store.mint_entity(EntityKind::Resource, "label with back\\slash");
    save_snapshot(store, dir.file("kg"));
    auto loaded = load_snapshot_files(dir.file("kg"), kTestNamespace);
    auto rec = loaded->entity(s);
    REQUIRE(rec.has_value());
    CHECK(rec->label == "label with back\\slash");
}

TEST_CASE("dangling references are rejected at load") {
    std::string reg = "R1\tResource\ts\nP1\tProperty\tp\n";
    std::string nt =
        "<http://localhost:8080/resource/R1> <http://localhost:8080/property/P1> "
        "<http://localhost:8080/resource/R2> .\n";
    try {
        load_snapshot(nt, reg, kTestNamespace);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DanglingReference);
    }

    std::string nt_bad_subject =
        "<http://localhost:8080/resource/R9> <http://localhost:8080/property/P1> \"v\" .\n";
    CHECK_THROWS_AS(load_snapshot(nt_bad_subject, reg, kTestNamespace), Error);
}

TEST_CASE("external object IRIs are registered on load") {
    std::string reg = "R1\tResource\ts\nP1\tProperty\tp\n";
    std::string nt =
        "<http://localhost:8080/resource/R1> <http://localhost:8080/property/P1> "
        "<http://example.org/elsewhere> .\n";
    auto store = load_snapshot(nt, reg, kTestNamespace);
    CHECK(store->statement_count() == 1);
    CHECK(store->entity_by_full_iri("http://example.org/elsewhere").has_value());
}

TEST_CASE("empty snapshot pair loads to a fresh store") {
    auto store = load_snapshot("", "", kTestNamespace);
    CHECK(store->statement_count() == 0);
    // Only the built-in label predicate is present.
    CHECK(store->entity_count() == 1);
    CHECK(store->entity_by_local_id("P0").has_value());
}

TEST_CASE("label triples are emitted only on request") {
    Store store(kTestNamespace);
    Iri s = store.mint_entity(EntityKind::Resource, "thing");
    Iri p = store.mint_entity(EntityKind::Property, "p");
    store.add_statement(s, p, Term(Literal::string("v")));

    SerializationOptions with_labels;
    with_labels.include_labels = true;
    std::string labeled = serialize(store, with_labels);
    CHECK(labeled.find("<http://localhost:8080/property/P0> \"thing\"") != std::string::npos);
    CHECK(labeled.find("\"label\"") != std::string::npos); // P0 labels itself
    CHECK(serialize(store).find("P0") == std::string::npos);
    // The labeled form still parses.
    CHECK(parse_ntriples(labeled).size() == 4);
}

TEST_CASE("turtle groups by subject and compresses with prefixes") {
    Store store(kTestNamespace);
    Iri s = store.mint_entity(EntityKind::Resource, "s");
    Iri p1 = store.mint_entity(EntityKind::Property, "p1");
    Iri p2 = store.mint_entity(EntityKind::Property, "p2");
    store.add_statement(s, p1, Term(Literal::string("x")));
    store.add_statement(s, p2, Term(Literal::integer(7)));

    SerializationOptions opts;
    opts.format = RdfFormat::Turtle;
    opts.prefix_map = {{"r", std::string(kTestNamespace) + "/resource/"},
                       {"p", std::string(kTestNamespace) + "/property/"},
                       {"xsd", "http://www.w3.org/2001/XMLSchema#"}};
    std::string text = serialize(store, opts);
    CHECK(text.find("@prefix p: <http://localhost:8080/property/> .") != std::string::npos);
    CHECK(text.find("r:R1 p:P1 \"x\" ;\n    p:P2 \"7\"^^xsd:integer .") != std::string::npos);

    SerializationOptions bad;
    bad.format = RdfFormat::Turtle;
    bad.prefix_map = {{"9bad", "http://example.org/"}};
    CHECK_THROWS_AS(serialize(store, bad), Error);
}
