#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nibskg/store.hpp"

namespace nibskg {

// Lowercases and collapses runs of space/hyphen/underscore to one separator.
std::string normalize_token(const std::string& raw);

struct ControlledTerm {
    std::string label;
    Iri iri;
    std::vector<std::string> aliases; // normalized forms, derived from label
};

enum class RangeKind { Controlled, Decimal, Integer, String };

struct PropertySpec {
    std::string label;
    RangeKind range = RangeKind::String;
    std::optional<std::string> unit;
    Iri iri;
    Iri option_class;                        // controlled ranges only
    std::vector<ControlledTerm> terms;       // controlled ranges only
    std::vector<PropertySpec> sub_properties;
    std::vector<std::string> extra_aliases;  // additional accepted names, normalized

    bool is_controlled() const { return range == RangeKind::Controlled; }
    const ControlledTerm* term_by_label(const std::string& label) const;
};

struct VocabularyManifest {
    std::vector<PropertySpec> properties; // the dose properties, in seed order

    // Structural predicates and classes used by ingestion and templates.
    Iri instance_of;
    Iri title;
    Iri doi;
    Iri publication_year;
    Iri author;
    Iri has_contribution;
    Iri same_as;
    Iri template_property;
    Iri template_target_class;
    Iri paper_class;
    Iri contribution_class;

    std::vector<std::string> notes; // curator-facing remarks on label/unit choices

    // Normalized-label lookup over top-level and sub-properties.
    const PropertySpec* find_property(const std::string& raw) const;
    const PropertySpec* property_by_iri(const Iri& iri) const;
    const PropertySpec* parent_of(const Iri& sub_property) const;
    std::size_t total_controlled_terms() const;
};

// Registers the dose vocabulary into the store: structural predicates, the
// dose properties with their controlled term sets, and the option classes
// that hold term membership. Re-seeding finds existing entities by label and
// mints nothing new.
VocabularyManifest seed_rtms_vocabulary(Store& store);

struct LookupResult {
    enum class Status { Match, NoMatch, Ambiguous };
    Status status = Status::NoMatch;
    std::optional<ControlledTerm> term;
    std::vector<ControlledTerm> candidates; // populated when Ambiguous

    bool matched() const { return status == Status::Match; }
};

// Exact label match wins; otherwise a normalized match is accepted only when
// it selects exactly one term.
LookupResult lookup_term(const VocabularyManifest& manifest, const Iri& property,
                         const std::string& raw);

// Adds (local, same-as, external) and registers the external IRI.
std::uint64_t same_as_link(Store& store, const VocabularyManifest& manifest, const Iri& local,
                           const std::string& external);

// Tab-separated listing for curator review: property_label \t term_label \t iri.
std::string export_vocabulary_tsv(const VocabularyManifest& manifest);

} // namespace nibskg
