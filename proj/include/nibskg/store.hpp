#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "nibskg/term.hpp"

namespace nibskg {

struct EntityRecord {
    Iri iri;
    EntityKind kind = EntityKind::Resource;
    std::string label;
    bool external = false;
    std::vector<Iri> classes; // membership statements mirrored here
};

struct EntityDescription {
    Iri iri;
    EntityKind kind = EntityKind::Resource;
    std::string label;
    std::vector<Iri> classes;
    std::vector<Statement> statements; // outgoing, ordinal order
};

// In-memory triple store with an entity registry. Minting is namespaced and
// deterministic: auto ids are <kind prefix><counter>, counters start at 1 and
// never move backwards. Statements have set semantics.
//
// Concurrency: many concurrent readers or one writer (shared_mutex). Readers
// see a consistent snapshot; all public methods take the lock themselves.
//
// Entity labels live in the registry, not as statements. Class memberships
// are ordinary statements through the designated "instance of" predicate and
// are mirrored into the registry for cheap lookups.
class Store {
public:
    // The reserved label predicate, registered on construction outside the
    // auto counter range so the first user property still gets P1.
    static constexpr const char* kLabelPredicateId = "P0";

    explicit Store(std::string namespace_uri);

    const std::string& namespace_uri() const { return namespace_; }

    Iri mint_entity(EntityKind kind, const std::string& label,
                    const std::optional<std::string>& explicit_id = std::nullopt);

    // Registers an external IRI (e.g. a same-as target) as a Resource entity.
    // Re-registering returns the existing entity.
    Iri register_external(const std::string& absolute_iri, const std::string& label = "");

    std::uint64_t add_statement(const Iri& subject, const Iri& predicate, const Term& object);

    std::vector<Statement> statements_matching(const std::optional<Iri>& subject,
                                               const std::optional<Iri>& predicate,
                                               const std::optional<Term>& object) const;
    std::vector<Statement> all_statements() const;

    EntityDescription resolve(const Iri& iri) const;
    EntityDescription resolve_local(const std::string& local_id) const;

    bool has_entity(const Iri& iri) const;
    std::optional<EntityRecord> entity(const Iri& iri) const;
    std::optional<EntityRecord> entity_by_local_id(const std::string& local_id) const;
    std::optional<EntityRecord> entity_by_full_iri(const std::string& full) const;

    // Registry snapshot in mint order.
    std::vector<EntityRecord> entities() const;

    std::vector<Iri> find_by_label(EntityKind kind, const std::string& label) const;
    std::vector<Iri> members_of(const Iri& class_iri) const;

    // Marks a property as the membership predicate; statements through it
    // maintain the registry's class lists. Survives snapshot reload by label.
    void designate_instance_of(const Iri& predicate);
    std::optional<Iri> instance_of_predicate() const;

    Iri label_predicate() const;

    std::size_t entity_count() const;
    std::size_t statement_count() const;
    std::uint64_t counter(EntityKind kind) const;

    // Restores a registry line from a snapshot, preserving ids and advancing
    // counters. Used by rdf_io; not a general-purpose API.
    void restore_entity(const std::string& local_id, EntityKind kind, const std::string& label);

private:
    Iri mint_locked(EntityKind kind, const std::string& label,
                    const std::optional<std::string>& explicit_id);
    const EntityRecord* record_for(const Iri& iri) const;
    const EntityRecord* record_for_local(const std::string& local_id) const;
    void index_statement(const Statement& st, std::size_t pos);
    std::vector<Statement> match_locked(const std::optional<Iri>& s, const std::optional<Iri>& p,
                                        const std::optional<Term>& o) const;
    void note_membership(const Iri& entity, const Iri& class_iri);

    mutable std::shared_mutex mutex_;

    std::string namespace_;
    std::vector<EntityRecord> records_;
    std::unordered_map<std::string, std::size_t> by_local_id_;
    std::unordered_map<std::string, std::size_t> by_full_iri_;
    std::unordered_map<std::string, std::vector<std::size_t>> by_kind_label_;

    std::vector<Statement> statements_;
    std::unordered_map<std::string, std::uint64_t> triple_set_; // triple key -> ordinal
    std::unordered_map<std::string, std::vector<std::size_t>> subject_index_;
    std::unordered_map<std::string, std::vector<std::size_t>> predicate_index_;
    std::unordered_map<std::string, std::vector<std::size_t>> object_index_;

    std::uint64_t counters_[4] = {1, 1, 1, 1};
    std::uint64_t next_ordinal_ = 1;
    std::optional<Iri> instance_of_;
    Iri label_predicate_;
};

} // namespace nibskg
