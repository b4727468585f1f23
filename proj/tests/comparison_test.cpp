#include <doctest.h>

#include <algorithm>
#include <set>

#include "nibskg/comparison.hpp"
#include "nibskg/ingest.hpp"
#include "nibskg/rdf_io.hpp"
#include "support/test_util.hpp"

using namespace nibskg;
using namespace nibskg::testsupport;

namespace {

Iri ingest_one(SeededFixture& fixture, const std::string& title,
               std::vector<std::pair<std::string, std::vector<std::string>>> values) {
    StudyRecord record;
    record.title = title;
    record.values = std::move(values);
    auto [contribution, report] =
        record_to_contribution(*fixture.store, fixture.manifest, fixture.tmpl, record);
    return contribution.iri;
}

std::vector<std::string> row_labels(const ComparisonTable& table) {
    std::vector<std::string> labels;
    for (const auto& row : table.rows) labels.push_back(row.property_label);
    return labels;
}

} // namespace

TEST_CASE("minimal decimal rendering") {
    CHECK(minimal_decimal_lexical("70.00") == "70");
    CHECK(minimal_decimal_lexical("0.50") == "0.5");
    CHECK(minimal_decimal_lexical(".5") == "0.5");
    CHECK(minimal_decimal_lexical("007") == "7");
    CHECK(minimal_decimal_lexical("-0.0") == "0");
    CHECK(minimal_decimal_lexical("-12.30") == "-12.3");
    CHECK(minimal_decimal_lexical("+4.2") == "4.2");
}

TEST_CASE("intersection keeps only properties present in every contribution") {
    auto fixture = make_seeded_store();
    Iri a = ingest_one(fixture, "Study A",
                       {{"Type of rTMS", {"iTBS"}}, {"Coil Shape", {"F8"}}});
    Iri b = ingest_one(fixture, "Study B",
                       {{"Type of rTMS", {"cTBS"}}, {"Coil Size", {"70"}}});

    ComparisonTable intersection =
        build_comparison(*fixture.store, fixture.manifest, fixture.tmpl, {a, b},
                         PropertyMode::Intersection, fixed_clock());
    CHECK(row_labels(intersection) == std::vector<std::string>{"Type of rTMS"});

    ComparisonTable union_table = build_comparison(
        *fixture.store, fixture.manifest, fixture.tmpl, {a, b}, PropertyMode::Union,
        fixed_clock());
    // Derived by enumerating both contributions' statements.
    CHECK(row_labels(union_table) ==
          std::vector<std::string>{"Type of rTMS", "Coil Shape", "Coil Size"});
    CHECK(union_table.contributions.size() == 2);
    CHECK(union_table.contributions[0].first == "Study A");

    // Intersection rows are a subset of union rows.
    auto union_labels = row_labels(union_table);
    for (const auto& label : row_labels(intersection)) {
        CHECK(std::find(union_labels.begin(), union_labels.end(), label) != union_labels.end());
    }
}

TEST_CASE("every row carries one cell per contribution, absent values empty") {
    auto fixture = make_seeded_store();
    Iri a = ingest_one(fixture, "A", {{"Type of rTMS", {"iTBS"}}, {"Coil Shape", {"F8"}}});
    Iri b = ingest_one(fixture, "B", {{"Type of rTMS", {"QPS"}}});
    ComparisonTable table = build_comparison(*fixture.store, fixture.manifest, fixture.tmpl,
                                             {a, b}, PropertyMode::Union, fixed_clock());
    for (const auto& row : table.rows) {
        CHECK(row.cells.size() == 2);
    }
    REQUIRE(table.rows.size() == 2);
    CHECK(table.rows[1].property_label == "Coil Shape");
    CHECK(table.rows[1].cells[0] == std::vector<std::string>{"F8"});
    CHECK(table.rows[1].cells[1].empty());
}

TEST_CASE("an empty contribution list builds an empty table") {
    auto fixture = make_seeded_store();
    ComparisonTable table = build_comparison(*fixture.store, fixture.manifest, fixture.tmpl, {},
                                             PropertyMode::Union, fixed_clock());
    CHECK(table.contributions.empty());
    CHECK(table.rows.empty());
}

TEST_CASE("unknown contributions are rejected") {
    auto fixture = make_seeded_store();
    Iri ghost = Iri::minted(kTestNamespace, EntityKind::Resource, "R5555");
    CHECK_THROWS_AS(build_comparison(*fixture.store, fixture.manifest, fixture.tmpl, {ghost},
                                     PropertyMode::Union, fixed_clock()),
                    Error);
}

TEST_CASE("chunking follows ceiling arithmetic and preserves order") {
    auto fixture = make_seeded_store();
    auto contributions = ingest_synthetic(fixture, 21, 61);

    auto parts = chunk_comparisons(*fixture.store, fixture.manifest, fixture.tmpl, contributions,
                                   10, PropertyMode::Union, fixed_clock());
    REQUIRE(parts.size() == 7);
    for (std::size_t i = 0; i < parts.size(); ++i) {
        CHECK(parts[i].part_index == std::make_pair(static_cast<int>(i + 1), 7));
        CHECK(parts[i].contributions.size() == (i + 1 < parts.size() ? 10 : 1));
    }

    // Partition: concatenating the parts reproduces the input exactly.
    std::vector<std::string> concatenated;
    for (const auto& part : parts) {
        for (const auto& [title, iri] : part.contributions) concatenated.push_back(iri.full());
    }
    std::vector<std::string> original;
    for (const auto& iri : contributions) original.push_back(iri.full());
    CHECK(concatenated == original);

    CHECK(chunk_comparisons(*fixture.store, fixture.manifest, fixture.tmpl, {}, 10,
                            PropertyMode::Union, fixed_clock())
              .empty());
    CHECK_THROWS_AS(chunk_comparisons(*fixture.store, fixture.manifest, fixture.tmpl,
                                      contributions, 0, PropertyMode::Union, fixed_clock()),
                    Error);
}

TEST_CASE("601 contributions at chunk size 100 give seven parts, the last of one") {
    auto fixture = make_seeded_store();
    auto contributions = ingest_synthetic(fixture, 101, 601);
    auto parts = chunk_comparisons(*fixture.store, fixture.manifest, fixture.tmpl, contributions,
                                   100, PropertyMode::Union, fixed_clock());
    REQUIRE(parts.size() == 7);
    CHECK(parts.back().contributions.size() == 1);
    CHECK(parts.back().part_index == std::make_pair(7, 7));
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        CHECK(parts[i].contributions.size() == 100);
    }
}

TEST_CASE("multi-valued cells render sorted and joined") {
    auto fixture = make_seeded_store();
    StudyRecord record;
    record.title = "multi";
    record.values = {{"Type of rTMS", {"iTBS"}}, {"Coil Shape", {"R", "F8"}}};
    auto [contribution, report] =
        record_to_contribution(*fixture.store, fixture.manifest, fixture.tmpl, record);

    ComparisonTable table =
        build_comparison(*fixture.store, fixture.manifest, fixture.tmpl, {contribution.iri},
                         PropertyMode::Union, fixed_clock());
    REQUIRE(table.rows.size() == 2);
    CHECK(table.rows[1].cells[0] == std::vector<std::string>{"F8", "R"});

    std::string csv = export_comparison(table, ComparisonFormat::Csv);
    CHECK(csv.find("Coil Shape,F8; R") != std::string::npos);
}

TEST_CASE("decimal cell values render minimally") {
    auto fixture = make_seeded_store();
    Iri c = ingest_one(fixture, "decimals",
                       {{"Type of rTMS", {"rTMS"}}, {"Intrabust Frequency", {"50.10"}}});
    ComparisonTable table = build_comparison(*fixture.store, fixture.manifest, fixture.tmpl, {c},
                                             PropertyMode::Union, fixed_clock());
    CHECK(table.rows[1].cells[0] == std::vector<std::string>{"50.1"});
}

TEST_CASE("comparison export formats") {
    auto fixture = make_seeded_store();
    Iri c = ingest_one(fixture, "title, with comma",
                       {{"Type of rTMS", {"iTBS"}}});
    ComparisonTable table = build_comparison(*fixture.store, fixture.manifest, fixture.tmpl, {c},
                                             PropertyMode::Union, fixed_clock());

    std::string csv = export_comparison(table, ComparisonFormat::Csv);
    CHECK(csv.rfind("property,\"title, with comma\"\n", 0) == 0);
    CHECK(csv.find("Type of rTMS,iTBS\n") != std::string::npos);

    std::string md = export_comparison(table, ComparisonFormat::Markdown);
    CHECK(md.rfind("| property | title, with comma |", 0) == 0);
    CHECK(md.find("| Type of rTMS | iTBS |") != std::string::npos);

    std::string json_text = export_comparison(table, ComparisonFormat::Json);
    CHECK(json_text.find("\"property\": \"Type of rTMS\"") != std::string::npos);
    CHECK(json_text.find("\"created_at\": \"2026-01-01T00:00:00Z\"") != std::string::npos);

    // Empty table still yields a header-only CSV.
    ComparisonTable empty = build_comparison(*fixture.store, fixture.manifest, fixture.tmpl, {},
                                             PropertyMode::Union, fixed_clock());
    CHECK(export_comparison(empty, ComparisonFormat::Csv) == "property\n");
}

TEST_CASE("publication lifecycle: mint, idempotent re-publish, versioning") {
    auto fixture = make_seeded_store();
    auto contributions = ingest_synthetic(fixture, 33, 12);
    auto parts = chunk_comparisons(*fixture.store, fixture.manifest, fixture.tmpl, contributions,
                                   6, PropertyMode::Union, fixed_clock());
    REQUIRE(parts.size() == 2);

    PublicationRegistry registry(fixed_clock("2026-02-02T00:00:00Z"));
    PublicationMetadata metadata;
    metadata.title = "rTMS dose comparison, part 1";
    metadata.creator = "curator";
    metadata.license = "CC-BY-4.0";

    PublicationRecord first = registry.publish(parts[0], metadata);
    CHECK(first.id == "10.99999/nibs.cmp.1");
    CHECK(first.version == 1);
    CHECK(!first.predecessor_id.has_value());
    CHECK(first.created_at == "2026-02-02T00:00:00Z");
    CHECK(first.snapshot.id == first.id);

    // Identical content returns the existing record.
    PublicationRecord again = registry.publish(parts[0], metadata);
    CHECK(again.id == first.id);
    CHECK(registry.size() == 1);

    // A modified table with a predecessor reference bumps the version.
    PublicationMetadata v2 = metadata;
    v2.predecessor_id = first.id;
    PublicationRecord second = registry.publish(parts[1], v2);
    CHECK(second.id == "10.99999/nibs.cmp.2");
    CHECK(second.version == 2);
    CHECK(second.predecessor_id == first.id);

    PublicationMetadata bad = metadata;
    bad.predecessor_id = "10.99999/nibs.cmp.404";
    ComparisonTable modified = parts[1];
    modified.rows.pop_back();
    CHECK_THROWS_AS(registry.publish(modified, bad), Error);

    ComparisonTable empty;
    CHECK_THROWS_AS(registry.publish(empty, metadata), Error);
}

TEST_CASE("published snapshots are immutable against later store writes") {
    auto fixture = make_seeded_store();
    auto contributions = ingest_synthetic(fixture, 44, 5);
    auto table = build_comparison(*fixture.store, fixture.manifest, fixture.tmpl, contributions,
                                  PropertyMode::Union, fixed_clock());
    PublicationRegistry registry(fixed_clock());
    PublicationMetadata metadata;
    metadata.title = "frozen";
    metadata.creator = "curator";
    metadata.license = "CC0-1.0";
    PublicationRecord record = registry.publish(table, metadata);
    std::string before = export_comparison(record.snapshot, ComparisonFormat::Csv);

    // Mutate the source store heavily.
    ingest_synthetic(fixture, 45, 10);
    const PublicationRecord* found = registry.find(record.id);
    REQUIRE(found != nullptr);
    CHECK(export_comparison(found->snapshot, ComparisonFormat::Csv) == before);
}

TEST_CASE("registry JSON round-trips byte-identically") {
    auto fixture = make_seeded_store();
    auto contributions = ingest_synthetic(fixture, 55, 8);
    auto table = build_comparison(*fixture.store, fixture.manifest, fixture.tmpl, contributions,
                                  PropertyMode::Union, fixed_clock());
    PublicationRegistry registry(fixed_clock());
    PublicationMetadata metadata;
    metadata.title = "roundtrip";
    metadata.creator = "curator";
    metadata.license = "CC-BY-4.0";
    registry.publish(table, metadata);

    std::string text = registry.to_json();
    PublicationRegistry loaded = PublicationRegistry::from_json(text, fixed_clock());
    CHECK(loaded.to_json() == text);
    CHECK(loaded.size() == 1);
    CHECK(loaded.find(registry.records()[0].id) != nullptr);

    TempDir dir("pubs");
    registry.save(dir.file("registry.json"));
    PublicationRegistry from_disk =
        PublicationRegistry::load_or_empty(dir.file("registry.json"), fixed_clock());
    CHECK(from_disk.to_json() == text);
    PublicationRegistry missing =
        PublicationRegistry::load_or_empty(dir.file("absent.json"), fixed_clock());
    CHECK(missing.size() == 0);
}

TEST_CASE("intersection rows are always a subset of union rows") {
    auto fixture = make_seeded_store();
    auto contributions = ingest_synthetic(fixture, 66, 15);
    Rng rng(67);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<Iri> subset;
        for (const auto& iri : contributions) {
            if (rng.chance(60)) subset.push_back(iri);
        }
        if (subset.empty()) continue;
        auto union_rows = row_labels(build_comparison(*fixture.store, fixture.manifest,
                                                      fixture.tmpl, subset, PropertyMode::Union,
                                                      fixed_clock()));
        auto inter_rows = row_labels(build_comparison(*fixture.store, fixture.manifest,
                                                      fixture.tmpl, subset,
                                                      PropertyMode::Intersection, fixed_clock()));
        std::set<std::string> union_set(union_rows.begin(), union_rows.end());
        for (const auto& label : inter_rows) {
            CHECK(union_set.count(label) == 1);
        }
    }
}
