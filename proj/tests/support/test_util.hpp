#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "nibskg/comparison.hpp"
#include "nibskg/ingest.hpp"
#include "nibskg/store.hpp"
#include "nibskg/template_engine.hpp"
#include "nibskg/vocabulary.hpp"

namespace nibskg::testsupport {

inline const char* kTestNamespace = "http://localhost:8080";

// Deterministic raw-draw RNG; no std distributions so behavior is pinned.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(static_cast<std::mt19937::result_type>(seed)) {}

    std::uint32_t next() { return engine_(); }
    std::uint32_t below(std::uint32_t bound) { return bound == 0 ? 0 : next() % bound; }
    bool chance(std::uint32_t percent) { return below(100) < percent; }

    template <typename T>
    const T& pick(const std::vector<T>& items) {
        return items[below(static_cast<std::uint32_t>(items.size()))];
    }

private:
    std::mt19937 engine_;
};

// Scratch directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::uint64_t counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("nibskg_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }

    std::string file(const std::string& name) const { return (path_ / name).string(); }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

struct SeededFixture {
    std::unique_ptr<Store> store;
    VocabularyManifest manifest;
    Template tmpl;
};

inline SeededFixture make_seeded_store() {
    SeededFixture fixture;
    fixture.store = std::make_unique<Store>(kTestNamespace);
    fixture.manifest = seed_rtms_vocabulary(*fixture.store);
    fixture.tmpl = define_rtms_template(*fixture.store, fixture.manifest);
    return fixture;
}

// Lexical forms that stress every escape path plus multibyte input.
inline const std::vector<std::string>& nasty_lexicals() {
    static const std::vector<std::string> pool = {
        "",
        "plain",
        "two words",
        "quote\"inside",
        "back\\slash",
        "new\nline",
        "carriage\rreturn",
        "tab\there",
        "ctrl\x01\x02",
        "mixed \\\"\n\r\t end",
        "héllo",
        "漢字",
        "emoji \U0001F389 party",
        "trailing backslash\\",
        "   leading spaces",
        "100.5",
        "semicolon;separated",
    };
    return pool;
}

// Entity labels: no control characters allowed, otherwise adversarial.
inline const std::vector<std::string>& nasty_labels() {
    static const std::vector<std::string> pool = {
        "node",
        "label with spaces",
        "quote\"label",
        "back\\slash label",
        "héllo label",
        "漢字 label",
        "label;semi",
        "UPPER lower",
    };
    return pool;
}

// Random store with adversarial labels and literals. The triple count is
// capped by target (set semantics may land slightly below on tiny stores).
inline std::unique_ptr<Store> make_random_store(std::uint64_t seed, std::size_t target_triples) {
    Rng rng(seed);
    auto store = std::make_unique<Store>(kTestNamespace);

    std::size_t n_resources = 3 + rng.below(static_cast<std::uint32_t>(target_triples / 4 + 5));
    std::size_t n_properties = 2 + rng.below(7);

    std::vector<Iri> nodes;
    std::vector<Iri> properties;
    for (std::size_t i = 0; i < n_resources; ++i) {
        std::string label = rng.pick(nasty_labels()) + " " + std::to_string(i);
        nodes.push_back(store->mint_entity(EntityKind::Resource, label));
    }
    for (std::size_t i = 0; i < n_properties; ++i) {
        properties.push_back(
            store->mint_entity(EntityKind::Property, "prop " + std::to_string(i)));
    }
    if (rng.chance(30)) {
        nodes.push_back(store->register_external(
            "http://example.org/onto/term" + std::to_string(rng.below(100))));
    }

    auto random_literal = [&]() -> Literal {
        switch (rng.below(4)) {
            case 0: {
                auto lexical = rng.pick(nasty_lexicals());
                if (rng.chance(20)) return Literal::string(lexical, "en");
                return Literal::string(lexical);
            }
            case 1:
                return Literal::integer(static_cast<long long>(rng.below(2000)) - 1000);
            case 2: {
                std::uint32_t scaled = rng.below(100000);
                std::string lexical = std::to_string(scaled / 100) + "." +
                                      std::to_string(scaled % 100);
                return Literal::decimal(lexical);
            }
            default:
                return Literal::boolean(rng.chance(50));
        }
    };

    std::size_t added = 0;
    std::size_t attempts = 0;
    while (added < target_triples && attempts < target_triples * 4 + 16) {
        ++attempts;
        const Iri& subject = rng.pick(nodes);
        const Iri& predicate = rng.pick(properties);
        Term object = rng.chance(45) ? Term(rng.pick(nodes)) : Term(random_literal());
        std::size_t before = store->statement_count();
        store->add_statement(subject, predicate, object);
        if (store->statement_count() > before) ++added;
    }
    return store;
}

inline std::vector<Iri> ingest_synthetic(SeededFixture& fixture, std::uint64_t seed,
                                         std::size_t n) {
    auto records = generate_synthetic_corpus(fixture.manifest, seed, n);
    std::vector<Contribution> contributions;
    ingest_corpus(*fixture.store, fixture.manifest, fixture.tmpl, records, &contributions);
    std::vector<Iri> iris;
    for (const auto& c : contributions) iris.push_back(c.iri);
    return iris;
}

inline Clock fixed_clock(const std::string& stamp = "2026-01-01T00:00:00Z") {
    return [stamp]() { return stamp; };
}

// ─── mutation harness ──────────────────────────────────────────────────────
// Three record-level mutations, each hitting a distinct constrained field:
//   A: drop the required stimulation type        -> MissingRequired
//   B: out-of-vocabulary token on a controlled   -> NotInVocabulary
//   C: non-numeric token on a decimal            -> WrongDatatype

struct MutationOutcome {
    StudyRecord record;
    std::vector<ViolationCode> expected_codes;
};

inline std::optional<MutationOutcome> mutate_record(Rng& rng, const VocabularyManifest& manifest,
                                                    StudyRecord record, int k) {
    std::vector<std::size_t> controlled_fields; // indexes into values, excluding the type
    std::vector<std::size_t> decimal_fields;
    std::optional<std::size_t> type_field;
    for (std::size_t i = 0; i < record.values.size(); ++i) {
        const PropertySpec* spec = manifest.find_property(record.values[i].first);
        if (!spec) continue;
        if (spec->label == "Type of rTMS") {
            type_field = i;
        } else if (spec->is_controlled()) {
            controlled_fields.push_back(i);
        } else if (spec->range == RangeKind::Decimal) {
            decimal_fields.push_back(i);
        }
    }

    std::vector<int> kinds = {0, 1, 2};
    if (!type_field) kinds.erase(kinds.begin());
    if (controlled_fields.empty()) kinds.erase(std::find(kinds.begin(), kinds.end(), 1));
    if (decimal_fields.empty()) {
        auto it = std::find(kinds.begin(), kinds.end(), 2);
        if (it != kinds.end()) kinds.erase(it);
    }
    if (static_cast<int>(kinds.size()) < k) return std::nullopt;

    // Random subset of size k.
    while (static_cast<int>(kinds.size()) > k) {
        kinds.erase(kinds.begin() + rng.below(static_cast<std::uint32_t>(kinds.size())));
    }

    MutationOutcome outcome;
    std::vector<std::size_t> to_erase;
    for (int kind : kinds) {
        switch (kind) {
            case 0:
                to_erase.push_back(*type_field);
                outcome.expected_codes.push_back(ViolationCode::MissingRequired);
                break;
            case 1: {
                std::size_t field = controlled_fields[rng.below(
                    static_cast<std::uint32_t>(controlled_fields.size()))];
                record.values[field].second = {"__not_in_vocabulary__"};
                outcome.expected_codes.push_back(ViolationCode::NotInVocabulary);
                break;
            }
            case 2: {
                std::size_t field = decimal_fields[rng.below(
                    static_cast<std::uint32_t>(decimal_fields.size()))];
                record.values[field].second = {"not_a_number"};
                outcome.expected_codes.push_back(ViolationCode::WrongDatatype);
                break;
            }
        }
    }
    std::sort(to_erase.rbegin(), to_erase.rend());
    for (std::size_t idx : to_erase) {
        record.values.erase(record.values.begin() + static_cast<std::ptrdiff_t>(idx));
    }
    outcome.record = std::move(record);
    return outcome;
}

} // namespace nibskg::testsupport
