#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include "nibskg/errors.hpp"

namespace nibskg {

enum class EntityKind { Resource, Property, Class, Template };

char kind_prefix(EntityKind kind);
const char* kind_segment(EntityKind kind);
const char* kind_name(EntityKind kind);
std::optional<EntityKind> kind_from_name(const std::string& name);
std::optional<EntityKind> kind_from_prefix(char prefix);

// True for ids of the form [RPCT][0-9]+ (locally minted identifiers).
bool is_minted_id(const std::string& id);

std::string percent_encode(const std::string& raw);
std::string percent_decode(const std::string& encoded);

// Absolute IRI. Locally minted IRIs render as <namespace>/<segment>/<id>;
// externally registered IRIs keep their original form and use the
// percent-encoded IRI as their local id.
class Iri {
public:
    Iri() = default;

    static Iri minted(const std::string& ns, EntityKind kind, const std::string& local_id);
    static Iri external(const std::string& absolute);

    const std::string& full() const noexcept { return full_; }
    const std::string& local_id() const noexcept { return local_id_; }
    bool is_external() const noexcept { return external_; }
    bool empty() const noexcept { return full_.empty(); }

    bool operator==(const Iri& other) const noexcept { return full_ == other.full_; }
    bool operator!=(const Iri& other) const noexcept { return full_ != other.full_; }
    bool operator<(const Iri& other) const noexcept { return full_ < other.full_; }

private:
    std::string full_;
    std::string local_id_;
    bool external_ = false;
};

// Rejects relative IRIs and characters that would break serialization
// (whitespace, control characters, <>"{}|^`\).
void validate_absolute_iri(const std::string& iri);

enum class Datatype { String, Integer, Decimal, Boolean };

const char* xsd_iri(Datatype dt);
std::optional<Datatype> datatype_from_xsd(const std::string& iri);

// Lexical grammars, independent of float round-tripping:
//   integer: [+-]?digits
//   decimal: [+-]?(digits[.digits?] | .digits), no exponent
bool is_valid_integer(const std::string& lexical);
bool is_valid_decimal(const std::string& lexical);

class Literal {
public:
    Literal() = default;

    static Literal string(std::string lexical, std::optional<std::string> lang = std::nullopt);
    static Literal integer(std::string lexical);
    static Literal integer(long long value);
    static Literal decimal(std::string lexical);
    static Literal boolean(bool value);
    static Literal make(std::string lexical, Datatype dt,
                        std::optional<std::string> lang = std::nullopt);

    const std::string& lexical() const noexcept { return lexical_; }
    Datatype datatype() const noexcept { return datatype_; }
    const std::optional<std::string>& lang() const noexcept { return lang_; }
    bool is_numeric() const noexcept {
        return datatype_ == Datatype::Integer || datatype_ == Datatype::Decimal;
    }

    bool operator==(const Literal& other) const noexcept {
        return lexical_ == other.lexical_ && datatype_ == other.datatype_ && lang_ == other.lang_;
    }
    bool operator!=(const Literal& other) const noexcept { return !(*this == other); }

private:
    std::string lexical_;
    Datatype datatype_ = Datatype::String;
    std::optional<std::string> lang_;
};

// A graph node or value. Literals are only legal in object position.
class Term {
public:
    Term() : value_(Iri{}) {}
    Term(Iri iri) : value_(std::move(iri)) {}
    Term(Literal literal) : value_(std::move(literal)) {}

    bool is_iri() const noexcept { return std::holds_alternative<Iri>(value_); }
    bool is_literal() const noexcept { return !is_iri(); }
    const Iri& iri() const { return std::get<Iri>(value_); }
    const Literal& literal() const { return std::get<Literal>(value_); }

    bool operator==(const Term& other) const noexcept { return value_ == other.value_; }
    bool operator!=(const Term& other) const noexcept { return !(*this == other); }

    // Stable key: distinct terms have distinct keys; used by indexes and
    // canonical ordering tie-breaks.
    std::string key() const;

private:
    std::variant<Iri, Literal> value_;
};

// Value equality: numeric literals compare by value ("1.0" equals "1"),
// everything else by identity.
bool term_value_equal(const Term& a, const Term& b);

// Total order: IRIs before literals; IRIs byte-wise; numeric literals by
// value, then booleans, then strings byte-wise (language tag last).
int term_total_compare(const Term& a, const Term& b);

struct Statement {
    std::uint64_t id = 0;
    Iri subject;
    Iri predicate;
    Term object;
};

} // namespace nibskg
