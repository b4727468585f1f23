#include "nibskg/term.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>

namespace nibskg {

char kind_prefix(EntityKind kind) {
    switch (kind) {
        case EntityKind::Resource: return 'R';
        case EntityKind::Property: return 'P';
        case EntityKind::Class: return 'C';
        case EntityKind::Template: return 'T';
    }
    return '?';
}

const char* kind_segment(EntityKind kind) {
    switch (kind) {
        case EntityKind::Resource: return "resource";
        case EntityKind::Property: return "property";
        case EntityKind::Class: return "class";
        case EntityKind::Template: return "template";
    }
    return "";
}

const char* kind_name(EntityKind kind) {
    switch (kind) {
        case EntityKind::Resource: return "Resource";
        case EntityKind::Property: return "Property";
        case EntityKind::Class: return "Class";
        case EntityKind::Template: return "Template";
    }
    return "";
}

std::optional<EntityKind> kind_from_name(const std::string& name) {
    if (name == "Resource") return EntityKind::Resource;
    if (name == "Property") return EntityKind::Property;
    if (name == "Class") return EntityKind::Class;
    if (name == "Template") return EntityKind::Template;
    return std::nullopt;
}

std::optional<EntityKind> kind_from_prefix(char prefix) {
    switch (prefix) {
        case 'R': return EntityKind::Resource;
        case 'P': return EntityKind::Property;
        case 'C': return EntityKind::Class;
        case 'T': return EntityKind::Template;
        default: return std::nullopt;
    }
}

bool is_minted_id(const std::string& id) {
    if (id.size() < 2) return false;
    if (!kind_from_prefix(id[0])) return false;
    for (std::size_t i = 1; i < id.size(); ++i) {
        if (id[i] < '0' || id[i] > '9') return false;
    }
    return true;
}

namespace {

bool is_unreserved(unsigned char c) {
    return std::isalnum(c) || c == '-' || c == '.' || c == '_' || c == '~';
}

} // namespace

std::string percent_encode(const std::string& raw) {
    static const char hex[] = "0123456789ABCDEF";
    std::string out;
    out.reserve(raw.size() * 3);
    for (unsigned char c : raw) {
        if (is_unreserved(c)) {
            out.push_back(static_cast<char>(c));
        } else {
            out.push_back('%');
            out.push_back(hex[c >> 4]);
            out.push_back(hex[c & 0xF]);
        }
    }
    return out;
}

std::string percent_decode(const std::string& encoded) {
    auto hexval = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        return -1;
    };
    std::string out;
    out.reserve(encoded.size());
    for (std::size_t i = 0; i < encoded.size(); ++i) {
        if (encoded[i] == '%' && i + 2 < encoded.size()) {
            int hi = hexval(encoded[i + 1]);
            int lo = hexval(encoded[i + 2]);
            if (hi >= 0 && lo >= 0) {
                out.push_back(static_cast<char>((hi << 4) | lo));
                i += 2;
                continue;
            }
        }
        out.push_back(encoded[i]);
    }
    return out;
}

void validate_absolute_iri(const std::string& iri) {
    if (iri.rfind("http://", 0) != 0 && iri.rfind("https://", 0) != 0) {
        throw Error(ErrorCode::InvalidIri, "not an absolute http(s) IRI: '" + iri + "'");
    }
    std::size_t scheme_end = iri.find("://") + 3;
    if (scheme_end >= iri.size()) {
        throw Error(ErrorCode::InvalidIri, "IRI has no authority: '" + iri + "'");
    }
    for (unsigned char c : iri) {
        if (c <= 0x20 || c == 0x7F || c == '<' || c == '>' || c == '"' || c == '{' || c == '}' ||
            c == '|' || c == '^' || c == '`' || c == '\\') {
            throw Error(ErrorCode::InvalidIri, "IRI contains forbidden character: '" + iri + "'");
        }
    }
}

Iri Iri::minted(const std::string& ns, EntityKind kind, const std::string& local_id) {
    Iri iri;
    iri.full_ = ns + "/" + kind_segment(kind) + "/" + local_id;
    iri.local_id_ = local_id;
    iri.external_ = false;
    validate_absolute_iri(iri.full_);
    return iri;
}

Iri Iri::external(const std::string& absolute) {
    validate_absolute_iri(absolute);
    Iri iri;
    iri.full_ = absolute;
    iri.local_id_ = percent_encode(absolute);
    iri.external_ = true;
    return iri;
}


const char* xsd_iri(Datatype dt) {
    switch (dt) {
        case Datatype::String: return "http://www.w3.org/2001/XMLSchema#string";
        case Datatype::Integer: return "http://www.w3.org/2001/XMLSchema#integer";
        case Datatype::Decimal: return "http://www.w3.org/2001/XMLSchema#decimal";
        case Datatype::Boolean: return "http://www.w3.org/2001/XMLSchema#boolean";
    }
    return "";
}

std::optional<Datatype> datatype_from_xsd(const std::string& iri) {
    if (iri == xsd_iri(Datatype::String)) return Datatype::String;
    if (iri == xsd_iri(Datatype::Integer)) return Datatype::Integer;
    if (iri == xsd_iri(Datatype::Decimal)) return Datatype::Decimal;
    if (iri == xsd_iri(Datatype::Boolean)) return Datatype::Boolean;
    return std::nullopt;
}

bool is_valid_integer(const std::string& lexical) {
    std::size_t i = 0;
    if (i < lexical.size() && (lexical[i] == '+' || lexical[i] == '-')) ++i;
    if (i >= lexical.size()) return false;
    for (; i < lexical.size(); ++i) {
        if (lexical[i] < '0' || lexical[i] > '9') return false;
    }
    return true;
}

bool is_valid_decimal(const std::string& lexical) {
    std::size_t i = 0;
    if (i < lexical.size() && (lexical[i] == '+' || lexical[i] == '-')) ++i;
    std::size_t int_digits = 0;
    while (i < lexical.size() && lexical[i] >= '0' && lexical[i] <= '9') {
        ++i;
        ++int_digits;
    }
    std::size_t frac_digits = 0;
    if (i < lexical.size() && lexical[i] == '.') {
        ++i;
        while (i < lexical.size() && lexical[i] >= '0' && lexical[i] <= '9') {
            ++i;
            ++frac_digits;
        }
    }
    return i == lexical.size() && (int_digits + frac_digits) > 0;
}

Literal Literal::string(std::string lexical, std::optional<std::string> lang) {
    Literal lit;
    lit.lexical_ = std::move(lexical);
    lit.datatype_ = Datatype::String;
    if (lang) {
        for (char c : *lang) {
            if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-') {
                throw Error(ErrorCode::InvalidLabel, "invalid language tag: '" + *lang + "'");
            }
        }
        if (lang->empty()) throw Error(ErrorCode::InvalidLabel, "empty language tag");
        lit.lang_ = std::move(lang);
    }
    return lit;
}

Literal Literal::integer(std::string lexical) {
    if (!is_valid_integer(lexical)) {
        throw Error(ErrorCode::InvalidLabel, "not an integer lexical: '" + lexical + "'");
    }
    Literal lit;
    lit.lexical_ = std::move(lexical);
    lit.datatype_ = Datatype::Integer;
    return lit;
}

Literal Literal::integer(long long value) { return integer(std::to_string(value)); }

Literal Literal::decimal(std::string lexical) {
    if (!is_valid_decimal(lexical)) {
        throw Error(ErrorCode::InvalidLabel, "not a decimal lexical: '" + lexical + "'");
    }
    Literal lit;
    lit.lexical_ = std::move(lexical);
    lit.datatype_ = Datatype::Decimal;
    return lit;
}

Literal Literal::boolean(bool value) {
    Literal lit;
    lit.lexical_ = value ? "true" : "false";
    lit.datatype_ = Datatype::Boolean;
    return lit;
}

Literal Literal::make(std::string lexical, Datatype dt, std::optional<std::string> lang) {
    switch (dt) {
        case Datatype::String: return string(std::move(lexical), std::move(lang));
        case Datatype::Integer: return integer(std::move(lexical));
        case Datatype::Decimal: return decimal(std::move(lexical));
        case Datatype::Boolean:
            if (lexical != "true" && lexical != "false") {
                throw Error(ErrorCode::InvalidLabel, "not a boolean lexical: '" + lexical + "'");
            }
            return boolean(lexical == "true");
    }
    throw Error(ErrorCode::InvalidLabel, "unknown datatype");
}

std::string Term::key() const {
    if (is_iri()) return "I" + iri().full();
    const Literal& lit = literal();
    std::string k = "L";
    k += std::to_string(static_cast<int>(lit.datatype()));
    k += "\x1F";
    k += lit.lang() ? *lit.lang() : "";
    k += "\x1F";
    k += lit.lexical();
    return k;
}

namespace {

double numeric_value(const Literal& lit) {
    double v = 0.0;
    const std::string& s = lit.lexical();
    const char* begin = s.data();
    // from_chars rejects a leading '+'; the lexical grammar allows it.
    if (!s.empty() && s[0] == '+') ++begin;
    std::from_chars(begin, s.data() + s.size(), v);
    return v;
}

// 0 = numeric, 1 = boolean, 2 = string
int literal_class(const Literal& lit) {
    if (lit.is_numeric()) return 0;
    if (lit.datatype() == Datatype::Boolean) return 1;
    return 2;
}

} // namespace

bool term_value_equal(const Term& a, const Term& b) {
    if (a.is_iri() != b.is_iri()) return false;
    if (a.is_iri()) return a.iri() == b.iri();
    const Literal& la = a.literal();
    const Literal& lb = b.literal();
    if (la.is_numeric() && lb.is_numeric()) return numeric_value(la) == numeric_value(lb);
    return la == lb;
}

int term_total_compare(const Term& a, const Term& b) {
    if (a.is_iri() != b.is_iri()) return a.is_iri() ? -1 : 1;
    if (a.is_iri()) return a.iri().full().compare(b.iri().full());
    const Literal& la = a.literal();
    const Literal& lb = b.literal();
    int ca = literal_class(la);
    int cb = literal_class(lb);
    if (ca != cb) return ca < cb ? -1 : 1;
    if (ca == 0) {
        double va = numeric_value(la);
        double vb = numeric_value(lb);
        if (va < vb) return -1;
        if (va > vb) return 1;
        return la.lexical().compare(lb.lexical());
    }
    int c = la.lexical().compare(lb.lexical());
    if (c != 0) return c;
    const std::string ta = la.lang() ? *la.lang() : "";
    const std::string tb = lb.lang() ? *lb.lang() : "";
    return ta.compare(tb);
}

} // namespace nibskg
