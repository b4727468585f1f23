#include "nibskg/store.hpp"

#include <algorithm>
#include <mutex>

namespace nibskg {

namespace {

std::string kind_label_key(EntityKind kind, const std::string& label) {
    std::string key(1, kind_prefix(kind));
    key += '\x1F';
    key += label;
    return key;
}

std::string triple_key(const Iri& s, const Iri& p, const Term& o) {
    return s.full() + "\x1E" + p.full() + "\x1E" + o.key();
}

void validate_label(const std::string& label) {
    if (label.empty()) throw Error(ErrorCode::InvalidLabel, "label must not be empty");
    for (unsigned char c : label) {
        if (c < 0x20 || c == 0x7F) {
            throw Error(ErrorCode::InvalidLabel, "label contains control characters");
        }
    }
}

} // namespace

Store::Store(std::string namespace_uri) : namespace_(std::move(namespace_uri)) {
    validate_absolute_iri(namespace_);
    while (!namespace_.empty() && namespace_.back() == '/') namespace_.pop_back();
    label_predicate_ = mint_locked(EntityKind::Property, "label", std::string(kLabelPredicateId));
}

Iri Store::mint_entity(EntityKind kind, const std::string& label,
                       const std::optional<std::string>& explicit_id) {
    std::unique_lock lock(mutex_);
    return mint_locked(kind, label, explicit_id);
}

Iri Store::mint_locked(EntityKind kind, const std::string& label,
                       const std::optional<std::string>& explicit_id) {
    validate_label(label);
    std::string id;
    if (explicit_id) {
        id = *explicit_id;
        if (!is_minted_id(id) || kind_from_prefix(id[0]) != kind) {
            throw Error(ErrorCode::InvalidIri,
                        "explicit id '" + id + "' does not match kind " + kind_name(kind));
        }
        if (by_local_id_.count(id)) {
            throw Error(ErrorCode::DuplicateId, "id '" + id + "' already minted");
        }
        // Keep auto minting clear of explicitly used numbers.
        std::uint64_t n = std::stoull(id.substr(1));
        auto& counter = counters_[static_cast<int>(kind)];
        counter = std::max(counter, n + 1);
    } else {
        auto& counter = counters_[static_cast<int>(kind)];
        do {
            id = std::string(1, kind_prefix(kind)) + std::to_string(counter++);
        } while (by_local_id_.count(id));
    }

    EntityRecord rec;
    rec.iri = Iri::minted(namespace_, kind, id);
    rec.kind = kind;
    rec.label = label;
    rec.external = false;

    std::size_t pos = records_.size();
    records_.push_back(rec);
    by_local_id_[id] = pos;
    by_full_iri_[rec.iri.full()] = pos;
    by_kind_label_[kind_label_key(kind, label)].push_back(pos);
    return rec.iri;
}

Iri Store::register_external(const std::string& absolute_iri, const std::string& label) {
    std::unique_lock lock(mutex_);
    Iri iri = Iri::external(absolute_iri);
    auto it = by_full_iri_.find(iri.full());
    if (it != by_full_iri_.end()) return records_[it->second].iri;

    EntityRecord rec;
    rec.iri = iri;
    rec.kind = EntityKind::Resource;
    rec.label = label.empty() ? absolute_iri : label;
    rec.external = true;

    std::size_t pos = records_.size();
    records_.push_back(rec);
    by_local_id_[iri.local_id()] = pos;
    by_full_iri_[iri.full()] = pos;
    by_kind_label_[kind_label_key(rec.kind, rec.label)].push_back(pos);
    return iri;
}

std::uint64_t Store::add_statement(const Iri& subject, const Iri& predicate, const Term& object) {
    std::unique_lock lock(mutex_);
    const EntityRecord* subj = record_for(subject);
    if (!subj) {
        throw Error(ErrorCode::UnknownEntity, "unknown subject: " + subject.full());
    }
    const EntityRecord* pred = record_for(predicate);
    if (!pred) {
        throw Error(ErrorCode::UnknownEntity, "unknown predicate: " + predicate.full());
    }
    if (pred->kind != EntityKind::Property) {
        throw Error(ErrorCode::PredicateNotProperty,
                    "predicate is not a Property: " + predicate.full());
    }
    if (object.is_iri() && !record_for(object.iri())) {
        throw Error(ErrorCode::UnknownEntity, "unknown object entity: " + object.iri().full());
    }

    std::string key = triple_key(subject, predicate, object);
    auto it = triple_set_.find(key);
    if (it != triple_set_.end()) return it->second;

    Statement st;
    st.id = next_ordinal_++;
    st.subject = subject;
    st.predicate = predicate;
    st.object = object;

    std::size_t pos = statements_.size();
    statements_.push_back(st);
    triple_set_[key] = st.id;
    index_statement(st, pos);

    if (instance_of_ && predicate == *instance_of_ && object.is_iri()) {
        note_membership(subject, object.iri());
    }
    return st.id;
}

void Store::index_statement(const Statement& st, std::size_t pos) {
    subject_index_[st.subject.full()].push_back(pos);
    predicate_index_[st.predicate.full()].push_back(pos);
    object_index_[st.object.key()].push_back(pos);
}

void Store::note_membership(const Iri& entity, const Iri& class_iri) {
    auto it = by_full_iri_.find(entity.full());
    if (it == by_full_iri_.end()) return;
    auto& classes = records_[it->second].classes;
    if (std::find(classes.begin(), classes.end(), class_iri) == classes.end()) {
        classes.push_back(class_iri);
    }
}

std::vector<Statement> Store::statements_matching(const std::optional<Iri>& subject,
                                                  const std::optional<Iri>& predicate,
                                                  const std::optional<Term>& object) const {
    std::shared_lock lock(mutex_);
    return match_locked(subject, predicate, object);
}

std::vector<Statement> Store::match_locked(const std::optional<Iri>& s,
                                           const std::optional<Iri>& p,
                                           const std::optional<Term>& o) const {
    // Pick the smallest permutation index among the bound slots; fall back to
    // a full scan only for the all-unbound pattern.
    const std::vector<std::size_t>* candidates = nullptr;
    auto consider = [&](const std::unordered_map<std::string, std::vector<std::size_t>>& index,
                        const std::string& key) {
        auto it = index.find(key);
        static const std::vector<std::size_t> kEmpty;
        const std::vector<std::size_t>* found = (it == index.end()) ? &kEmpty : &it->second;
        if (!candidates || found->size() < candidates->size()) candidates = found;
    };
    if (s) consider(subject_index_, s->full());
    if (p) consider(predicate_index_, p->full());
    if (o) consider(object_index_, o->key());

    std::vector<Statement> out;
    auto matches = [&](const Statement& st) {
        if (s && st.subject != *s) return false;
        if (p && st.predicate != *p) return false;
        if (o && st.object != *o) return false;
        return true;
    };
    if (candidates) {
        out.reserve(candidates->size());
        for (std::size_t pos : *candidates) {
            if (matches(statements_[pos])) out.push_back(statements_[pos]);
        }
    } else {
        out = statements_;
    }
    return out; // index vectors are append-ordered, so ordinal order holds
}

std::vector<Statement> Store::all_statements() const {
    std::shared_lock lock(mutex_);
    return statements_;
}

EntityDescription Store::resolve(const Iri& iri) const {
    std::shared_lock lock(mutex_);
    const EntityRecord* rec = record_for(iri);
    if (!rec) throw Error(ErrorCode::NotFound, "no entity for IRI: " + iri.full());
    EntityDescription desc;
    desc.iri = rec->iri;
    desc.kind = rec->kind;
    desc.label = rec->label;
    desc.classes = rec->classes;
    desc.statements = match_locked(rec->iri, std::nullopt, std::nullopt);
    return desc;
}

EntityDescription Store::resolve_local(const std::string& local_id) const {
    std::shared_lock lock(mutex_);
    const EntityRecord* rec = record_for_local(local_id);
    if (!rec) throw Error(ErrorCode::NotFound, "no entity for id: " + local_id);
    EntityDescription desc;
    desc.iri = rec->iri;
    desc.kind = rec->kind;
    desc.label = rec->label;
    desc.classes = rec->classes;
    desc.statements = match_locked(rec->iri, std::nullopt, std::nullopt);
    return desc;
}

bool Store::has_entity(const Iri& iri) const {
    std::shared_lock lock(mutex_);
    return record_for(iri) != nullptr;
}

std::optional<EntityRecord> Store::entity(const Iri& iri) const {
    std::shared_lock lock(mutex_);
    const EntityRecord* rec = record_for(iri);
    if (!rec) return std::nullopt;
    return *rec;
}

std::optional<EntityRecord> Store::entity_by_local_id(const std::string& local_id) const {
    std::shared_lock lock(mutex_);
    const EntityRecord* rec = record_for_local(local_id);
    if (!rec) return std::nullopt;
    return *rec;
}

std::optional<EntityRecord> Store::entity_by_full_iri(const std::string& full) const {
    std::shared_lock lock(mutex_);
    auto it = by_full_iri_.find(full);
    if (it == by_full_iri_.end()) return std::nullopt;
    return records_[it->second];
}

std::vector<EntityRecord> Store::entities() const {
    std::shared_lock lock(mutex_);
    return records_;
}

std::vector<Iri> Store::find_by_label(EntityKind kind, const std::string& label) const {
    std::shared_lock lock(mutex_);
    std::vector<Iri> out;
    auto it = by_kind_label_.find(kind_label_key(kind, label));
    if (it != by_kind_label_.end()) {
        for (std::size_t pos : it->second) out.push_back(records_[pos].iri);
    }
    return out;
}

std::vector<Iri> Store::members_of(const Iri& class_iri) const {
    std::shared_lock lock(mutex_);
    std::vector<Iri> out;
    for (const auto& rec : records_) {
        if (std::find(rec.classes.begin(), rec.classes.end(), class_iri) != rec.classes.end()) {
            out.push_back(rec.iri);
        }
    }
    return out;
}

void Store::designate_instance_of(const Iri& predicate) {
    std::unique_lock lock(mutex_);
    const EntityRecord* rec = record_for(predicate);
    if (!rec || rec->kind != EntityKind::Property) {
        throw Error(ErrorCode::UnknownEntity,
                    "instance-of predicate must be a registered Property");
    }
    if (instance_of_ && *instance_of_ == predicate) return;
    instance_of_ = predicate;
    // Replay existing membership statements (relevant after snapshot load).
    for (const auto& st : statements_) {
        if (st.predicate == predicate && st.object.is_iri()) {
            note_membership(st.subject, st.object.iri());
        }
    }
}

std::optional<Iri> Store::instance_of_predicate() const {
    std::shared_lock lock(mutex_);
    return instance_of_;
}

Iri Store::label_predicate() const {
    std::shared_lock lock(mutex_);
    return label_predicate_;
}

std::size_t Store::entity_count() const {
    std::shared_lock lock(mutex_);
    return records_.size();
}

std::size_t Store::statement_count() const {
    std::shared_lock lock(mutex_);
    return statements_.size();
}

std::uint64_t Store::counter(EntityKind kind) const {
    std::shared_lock lock(mutex_);
    return counters_[static_cast<int>(kind)];
}

void Store::restore_entity(const std::string& local_id, EntityKind kind,
                           const std::string& label) {
    std::unique_lock lock(mutex_);
    if (local_id == kLabelPredicateId) return; // present since construction
    if (by_local_id_.count(local_id)) {
        throw Error(ErrorCode::DuplicateId, "registry id repeated: " + local_id);
    }
    if (is_minted_id(local_id)) {
        if (kind_from_prefix(local_id[0]) != kind) {
            throw Error(ErrorCode::ParseError,
                        "registry id '" + local_id + "' conflicts with kind " + kind_name(kind));
        }
        mint_locked(kind, label, local_id);
    } else {
        lock.unlock();
        register_external(percent_decode(local_id), label);
    }
}

const EntityRecord* Store::record_for(const Iri& iri) const {
    auto it = by_full_iri_.find(iri.full());
    return it == by_full_iri_.end() ? nullptr : &records_[it->second];
}

const EntityRecord* Store::record_for_local(const std::string& local_id) const {
    auto it = by_local_id_.find(local_id);
    return it == by_local_id_.end() ? nullptr : &records_[it->second];
}

} // namespace nibskg
