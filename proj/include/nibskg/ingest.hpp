#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nibskg/store.hpp"
#include "nibskg/template_engine.hpp"
#include "nibskg/vocabulary.hpp"

namespace nibskg {

struct StudyRecord {
    std::string title;
    std::optional<std::string> doi;
    std::optional<int> year;
    std::optional<std::string> first_author;
    // Column key -> raw tokens, in column order. Keys are canonical property
    // labels when the column resolved, otherwise the original header.
    std::vector<std::pair<std::string, std::vector<std::string>>> values;

    const std::vector<std::string>* tokens_for(const std::string& key) const;
};

struct Contribution {
    Iri iri;
    Iri paper_iri;
    std::vector<std::uint64_t> statement_ordinals;
};

struct IngestSummary {
    std::size_t total = 0;
    std::size_t conforming = 0;
    std::size_t with_violations = 0;
    std::map<std::pair<std::string, std::string>, std::size_t> unresolved_tokens;

    std::string to_text() const;
};

// Column-to-property mapping. Metadata columns feed the StudyRecord fields;
// everything else becomes a dose (or ad-hoc) property column.
struct ColumnMapping {
    enum class Field { Title, Doi, Year, Author, Property };
    struct Target {
        Field field = Field::Property;
        std::string property_label; // canonical label for Property targets
    };
    std::map<std::string, Target> by_header; // normalized header -> target

    const Target* lookup(const std::string& header) const;
};

// Line-oriented mapping file: `column_header = property_label`, '#' comments.
// Property labels must resolve against the manifest or the metadata fields.
ColumnMapping parse_mapping(const std::string& text, const VocabularyManifest& manifest);

// Identity mapping: headers are treated as property labels directly.
ColumnMapping identity_mapping(const VocabularyManifest& manifest);

// UTF-8 CSV with a header row (RFC 4180 quoting). Cells split on ";" into
// trimmed tokens; empty cells are absent. Row numbers are 1-based and count
// the header.
std::vector<StudyRecord> parse_csv(const std::string& text, const ColumnMapping& mapping);

// Materializes one record: a paper entity with metadata statements, a linked
// contribution entity, and one dose statement per token. Controlled tokens
// resolve through lookup_term; numeric tokens become decimal literals;
// anything unresolved is kept verbatim as a string literal and surfaces in
// the validation report.
std::pair<Contribution, ValidationReport> record_to_contribution(Store& store,
                                                                 const VocabularyManifest& manifest,
                                                                 const Template& tmpl,
                                                                 const StudyRecord& record);

IngestSummary ingest_corpus(Store& store, const VocabularyManifest& manifest, const Template& tmpl,
                            const std::vector<StudyRecord>& records,
                            std::vector<Contribution>* out_contributions = nullptr);

// Deterministic synthetic corpus standing in for a real tabular review.
// Controlled values are drawn from the manifest; numeric fields use plausible
// ranges (intraburst frequency 1-100 Hz, percent-type fields 20-120, MEP
// amplitude 0.05-1 mV, threshold ratio 0.8-1.2, coil size 25-120 mm, years
// 1999-2020). Every record carries a stimulation type, so the corpus
// conforms to the template by construction.
std::vector<StudyRecord> generate_synthetic_corpus(const VocabularyManifest& manifest,
                                                   std::uint64_t seed, std::size_t n);

// CSV writer matching parse_csv's dialect; headers are canonical labels.
std::string corpus_to_csv(const std::vector<StudyRecord>& records,
                          const VocabularyManifest& manifest);

std::string csv_quote(const std::string& field);

} // namespace nibskg
