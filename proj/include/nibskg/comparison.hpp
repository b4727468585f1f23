#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nibskg/store.hpp"
#include "nibskg/template_engine.hpp"
#include "nibskg/vocabulary.hpp"

namespace nibskg {

using Clock = std::function<std::string()>;
std::string utc_now_iso();

enum class PropertyMode { Union, Intersection };
enum class ComparisonFormat { Csv, Json, Markdown };

struct ComparisonRow {
    std::string property_label;
    // One cell per contribution; a cell is the sorted list of rendered
    // values, empty when the contribution has none.
    std::vector<std::vector<std::string>> cells;
};

struct ComparisonTable {
    std::string id; // assigned on publication
    int version = 1;
    std::string created_at;
    std::vector<std::pair<std::string, Iri>> contributions; // (paper title, contribution)
    std::vector<ComparisonRow> rows;
    std::optional<std::pair<int, int>> part_index; // (k, n_parts)

    bool content_equal(const ComparisonTable& other) const;
};

// Property-aligned table: template properties in template order first (sub
// properties right after their parent), then non-template properties sorted
// by label. Union keeps properties used by any contribution, intersection
// those used by all.
ComparisonTable build_comparison(const Store& store, const VocabularyManifest& manifest,
                                 const Template& tmpl, const std::vector<Iri>& contributions,
                                 PropertyMode mode, const Clock& clock = utc_now_iso);

std::vector<ComparisonTable> chunk_comparisons(const Store& store,
                                               const VocabularyManifest& manifest,
                                               const Template& tmpl,
                                               const std::vector<Iri>& contributions,
                                               std::size_t chunk_size = 100,
                                               PropertyMode mode = PropertyMode::Union,
                                               const Clock& clock = utc_now_iso);

std::string export_comparison(const ComparisonTable& table, ComparisonFormat format);

// Decimal cell values render minimally: no sign noise, no leading or
// trailing zero padding.
std::string minimal_decimal_lexical(const std::string& lexical);

struct PublicationMetadata {
    std::string title;
    std::string description;
    std::string creator;
    std::string license;
    std::optional<std::string> predecessor_id;
};

struct PublicationRecord {
    std::string id;
    int version = 1;
    std::optional<std::string> predecessor_id;
    std::string title;
    std::string description;
    std::string creator;
    std::string license;
    std::string created_at;
    ComparisonTable snapshot;
};

// Registry of published comparisons under the deliberately fake DOI prefix
// 10.99999/nibs.cmp.<counter>. Publishing an identical table returns the
// existing record; publishing with a predecessor reference bumps the version.
class PublicationRegistry {
public:
    explicit PublicationRegistry(Clock clock = utc_now_iso);

    PublicationRecord publish(const ComparisonTable& table, const PublicationMetadata& metadata);

    const std::vector<PublicationRecord>& records() const { return records_; }
    const PublicationRecord* find(const std::string& id) const;
    std::size_t size() const { return records_.size(); }

    std::string to_json() const;
    static PublicationRegistry from_json(const std::string& text, Clock clock = utc_now_iso);

    static std::string record_to_json(const PublicationRecord& record);

    void save(const std::string& path) const;
    static PublicationRegistry load_or_empty(const std::string& path, Clock clock = utc_now_iso);

private:
    Clock clock_;
    std::vector<PublicationRecord> records_;
};

} // namespace nibskg
