#include "nibskg/rdf_io.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace nibskg {

namespace {

void append_uchar_escape(std::string& out, unsigned char c) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "\\u%04X", c);
    out += buf;
}

void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp <= 0x7F) {
        out.push_back(static_cast<char>(cp));
    } else if (cp <= 0x7FF) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp <= 0xFFFF) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

std::string render_literal(const Literal& lit) {
    std::string out = "\"" + escape_ntriples(lit.lexical()) + "\"";
    if (lit.lang()) {
        out += "@" + *lit.lang();
    } else if (lit.datatype() != Datatype::String) {
        out += "^^<" + std::string(xsd_iri(lit.datatype())) + ">";
    }
    return out;
}

std::string render_term(const Term& term) {
    if (term.is_iri()) return "<" + term.iri().full() + ">";
    return render_literal(term.literal());
}

std::vector<Statement> collect_statements(const Store& store, const SerializationOptions& opts) {
    std::vector<Statement> statements = store.all_statements();
    if (opts.include_labels) {
        Iri label_pred = store.label_predicate();
        for (const auto& rec : store.entities()) {
            Statement st;
            st.id = 0;
            st.subject = rec.iri;
            st.predicate = label_pred;
            st.object = Term(Literal::string(rec.label));
            statements.push_back(st);
        }
    }
    return statements;
}

// ─── Turtle ────────────────────────────────────────────────────────────────

bool valid_prefix_name(const std::string& name) {
    if (name.empty()) return false;
    if (!std::isalpha(static_cast<unsigned char>(name[0]))) return false;
    for (char c : name) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-') return false;
    }
    return true;
}

bool safe_turtle_local(const std::string& local) {
    if (local.empty() || local.front() == '.' || local.back() == '.') return false;
    for (char c : local) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-' && c != '.') {
            return false;
        }
    }
    return true;
}

std::string turtle_iri(const std::string& full,
                       const std::vector<std::pair<std::string, std::string>>& prefixes) {
    for (const auto& [name, ns] : prefixes) {
        if (full.size() > ns.size() && full.rfind(ns, 0) == 0) {
            std::string local = full.substr(ns.size());
            if (safe_turtle_local(local)) return name + ":" + local;
        }
    }
    return "<" + full + ">";
}

std::string turtle_literal(const Literal& lit,
                           const std::vector<std::pair<std::string, std::string>>& prefixes) {
    std::string out = "\"" + escape_ntriples(lit.lexical()) + "\"";
    if (lit.lang()) {
        out += "@" + *lit.lang();
    } else if (lit.datatype() != Datatype::String) {
        out += "^^" + turtle_iri(xsd_iri(lit.datatype()), prefixes);
    }
    return out;
}

std::string serialize_turtle(std::vector<Statement> statements,
                             const SerializationOptions& opts) {
    std::vector<std::pair<std::string, std::string>> prefixes(opts.prefix_map.begin(),
                                                              opts.prefix_map.end());
    for (const auto& [name, ns] : prefixes) {
        if (!valid_prefix_name(name)) {
            throw Error(ErrorCode::InvalidLabel, "invalid turtle prefix name: '" + name + "'");
        }
        validate_absolute_iri(ns);
    }
    // Longest namespace first so the most specific prefix wins.
    std::sort(prefixes.begin(), prefixes.end(), [](const auto& a, const auto& b) {
        return a.second.size() > b.second.size();
    });

    auto sort_key = [](const Statement& st) {
        return st.subject.full() + "\x1E" + st.predicate.full() + "\x1E" + st.object.key();
    };
    std::stable_sort(statements.begin(), statements.end(),
                     [&](const Statement& a, const Statement& b) {
                         return sort_key(a) < sort_key(b);
                     });

    std::string out;
    for (const auto& [name, ns] : opts.prefix_map) {
        out += "@prefix " + name + ": <" + ns + "> .\n";
    }
    if (!opts.prefix_map.empty() && !statements.empty()) out += "\n";

    std::size_t i = 0;
    while (i < statements.size()) {
        const std::string& subj = statements[i].subject.full();
        out += turtle_iri(subj, prefixes);
        std::size_t j = i;
        while (j < statements.size() && statements[j].subject.full() == subj) {
            out += (j == i) ? " " : " ;\n    ";
            out += turtle_iri(statements[j].predicate.full(), prefixes);
            out += " ";
            if (statements[j].object.is_iri()) {
                out += turtle_iri(statements[j].object.iri().full(), prefixes);
            } else {
                out += turtle_literal(statements[j].object.literal(), prefixes);
            }
            ++j;
        }
        out += " .\n";
        i = j;
    }
    return out;
}

// ─── N-Triples parser ──────────────────────────────────────────────────────

class LineParser {
public:
    LineParser(const std::string& line, std::size_t line_no) : line_(line), line_no_(line_no) {}

    ParsedTriple parse() {
        ParsedTriple triple;
        skip_ws();
        triple.subject = parse_iriref();
        require_ws();
        triple.predicate = parse_iriref();
        require_ws();
        triple.object = parse_object();
        skip_ws();
        if (pos_ >= line_.size() || line_[pos_] != '.') fail("expected '.'");
        ++pos_;
        skip_ws();
        if (pos_ < line_.size()) fail("unexpected trailing content");
        return triple;
    }

private:
    [[noreturn]] void fail(const std::string& reason) const {
        throw LocatedError(ErrorCode::ParseError, line_no_, pos_ + 1, reason);
    }

    void skip_ws() {
        while (pos_ < line_.size() && (line_[pos_] == ' ' || line_[pos_] == '\t')) ++pos_;
    }

    void require_ws() {
        if (pos_ >= line_.size() || (line_[pos_] != ' ' && line_[pos_] != '\t')) {
            fail("expected whitespace");
        }
        skip_ws();
    }

    std::string parse_iriref() {
        if (pos_ >= line_.size() || line_[pos_] != '<') fail("expected '<'");
        std::size_t start = ++pos_;
        while (pos_ < line_.size() && line_[pos_] != '>') {
            unsigned char c = static_cast<unsigned char>(line_[pos_]);
            if (c <= 0x20 || c == '<' || c == '"' || c == '{' || c == '}' || c == '|' ||
                c == '^' || c == '`' || c == '\\') {
                fail("forbidden character in IRI");
            }
            ++pos_;
        }
        if (pos_ >= line_.size()) fail("unterminated IRI");
        std::string iri = line_.substr(start, pos_ - start);
        ++pos_;
        if (iri.find(':') == std::string::npos) fail("relative IRI");
        return iri;
    }

    std::uint32_t parse_hex(std::size_t digits) {
        std::uint32_t value = 0;
        for (std::size_t i = 0; i < digits; ++i) {
            if (pos_ >= line_.size()) fail("truncated \\u escape");
            char c = line_[pos_];
            value <<= 4;
            if (c >= '0' && c <= '9') value |= static_cast<std::uint32_t>(c - '0');
            else if (c >= 'a' && c <= 'f') value |= static_cast<std::uint32_t>(c - 'a' + 10);
            else if (c >= 'A' && c <= 'F') value |= static_cast<std::uint32_t>(c - 'A' + 10);
            else fail("bad hex digit in escape");
            ++pos_;
        }
        if (value > 0x10FFFF || (value >= 0xD800 && value <= 0xDFFF)) {
            fail("escape is not a Unicode scalar value");
        }
        return value;
    }

    std::string parse_quoted() {
        if (pos_ >= line_.size() || line_[pos_] != '"') fail("expected '\"'");
        ++pos_;
        std::string out;
        while (pos_ < line_.size() && line_[pos_] != '"') {
            char c = line_[pos_];
            if (c == '\\') {
                ++pos_;
                if (pos_ >= line_.size()) fail("truncated escape");
                char e = line_[pos_++];
                switch (e) {
                    case '\\': out.push_back('\\'); break;
                    case '"': out.push_back('"'); break;
                    case 'n': out.push_back('\n'); break;
                    case 'r': out.push_back('\r'); break;
                    case 't': out.push_back('\t'); break;
                    case 'u': append_utf8(out, parse_hex(4)); break;
                    case 'U': append_utf8(out, parse_hex(8)); break;
                    default: --pos_; fail("unknown escape");
                }
            } else {
                out.push_back(c);
                ++pos_;
            }
        }
        if (pos_ >= line_.size()) fail("unterminated literal");
        ++pos_;
        return out;
    }

    ParsedTerm parse_object() {
        ParsedTerm term;
        if (pos_ < line_.size() && line_[pos_] == '<') {
            term.is_iri = true;
            term.iri = parse_iriref();
            return term;
        }
        std::string lexical = parse_quoted();
        if (pos_ + 1 < line_.size() && line_[pos_] == '^' && line_[pos_ + 1] == '^') {
            pos_ += 2;
            std::size_t at = pos_;
            std::string dt_iri = parse_iriref();
            auto dt = datatype_from_xsd(dt_iri);
            if (!dt) {
                pos_ = at;
                fail("unsupported datatype: " + dt_iri);
            }
            if (*dt == Datatype::Boolean && lexical != "true" && lexical != "false") {
                fail("bad boolean lexical");
            }
            if (*dt == Datatype::Integer && !is_valid_integer(lexical)) fail("bad integer lexical");
            if (*dt == Datatype::Decimal && !is_valid_decimal(lexical)) fail("bad decimal lexical");
            term.literal = Literal::make(lexical, *dt);
        } else if (pos_ < line_.size() && line_[pos_] == '@') {
            ++pos_;
            std::size_t start = pos_;
            while (pos_ < line_.size() &&
                   (std::isalnum(static_cast<unsigned char>(line_[pos_])) || line_[pos_] == '-')) {
                ++pos_;
            }
            if (pos_ == start) fail("empty language tag");
            term.literal = Literal::string(lexical, line_.substr(start, pos_ - start));
        } else {
            term.literal = Literal::string(lexical);
        }
        return term;
    }

    const std::string& line_;
    std::size_t line_no_;
    std::size_t pos_ = 0;
};

// ─── Registry format ───────────────────────────────────────────────────────

std::string escape_registry(const std::string& raw) {
    std::string out;
    out.reserve(raw.size());
    for (char c : raw) {
        switch (c) {
            case '\\': out += "\\\\"; break;
            case '\t': out += "\\t"; break;
            case '\n': out += "\\n"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

std::string unescape_registry(const std::string& raw, std::size_t line_no) {
    std::string out;
    out.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw[i] != '\\') {
            out.push_back(raw[i]);
            continue;
        }
        if (i + 1 >= raw.size()) {
            throw LocatedError(ErrorCode::ParseError, line_no, i + 1, "truncated registry escape");
        }
        switch (raw[++i]) {
            case '\\': out.push_back('\\'); break;
            case 't': out.push_back('\t'); break;
            case 'n': out.push_back('\n'); break;
            default:
                throw LocatedError(ErrorCode::ParseError, line_no, i + 1,
                                   "unknown registry escape");
        }
    }
    return out;
}

} // namespace

std::string escape_ntriples(const std::string& raw) {
    std::string out;
    out.reserve(raw.size() + 8);
    for (char ch : raw) {
        unsigned char c = static_cast<unsigned char>(ch);
        switch (c) {
            case '\\': out += "\\\\"; break;
            case '"': out += "\\\""; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (c < 0x20 || c == 0x7F) {
                    append_uchar_escape(out, c);
                } else {
                    out.push_back(ch);
                }
        }
    }
    return out;
}

std::string serialize_statements(const std::vector<Statement>& statements, bool sort) {
    std::vector<std::string> lines;
    lines.reserve(statements.size());
    for (const auto& st : statements) {
        lines.push_back("<" + st.subject.full() + "> <" + st.predicate.full() + "> " +
                        render_term(st.object) + " .");
    }
    if (sort) std::sort(lines.begin(), lines.end());
    std::string out;
    for (const auto& line : lines) {
        out += line;
        out += '\n';
    }
    return out;
}

std::string serialize(const Store& store, const SerializationOptions& opts) {
    std::vector<Statement> statements = collect_statements(store, opts);
    if (opts.format == RdfFormat::Turtle) return serialize_turtle(std::move(statements), opts);
    return serialize_statements(statements, opts.sort);
}

std::vector<ParsedTriple> parse_ntriples(const std::string& text) {
    std::vector<ParsedTriple> triples;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string line = (eol == std::string::npos) ? text.substr(pos)
                                                      : text.substr(pos, eol - pos);
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::size_t first = line.find_first_not_of(" \t");
        if (first != std::string::npos && line[first] != '#') {
            triples.push_back(LineParser(line, line_no).parse());
        }
        if (eol == std::string::npos) break;
        pos = eol + 1;
    }
    return triples;
}

void save_snapshot(const Store& store, const std::string& base_path) {
    write_file(base_path + ".nt", serialize(store));
    std::string reg;
    for (const auto& rec : store.entities()) {
        reg += escape_registry(rec.iri.local_id());
        reg += '\t';
        reg += kind_name(rec.kind);
        reg += '\t';
        reg += escape_registry(rec.label);
        reg += '\n';
    }
    write_file(base_path + ".reg", reg);
}

std::unique_ptr<Store> load_snapshot(const std::string& nt_text, const std::string& registry_text,
                                     const std::string& namespace_uri) {
    auto store = std::make_unique<Store>(namespace_uri);

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < registry_text.size()) {
        std::size_t eol = registry_text.find('\n', pos);
        std::string line = (eol == std::string::npos) ? registry_text.substr(pos)
                                                      : registry_text.substr(pos, eol - pos);
        pos = (eol == std::string::npos) ? registry_text.size() : eol + 1;
        ++line_no;
        if (line.empty()) continue;
        std::size_t t1 = line.find('\t');
        std::size_t t2 = (t1 == std::string::npos) ? std::string::npos : line.find('\t', t1 + 1);
        if (t1 == std::string::npos || t2 == std::string::npos) {
            throw LocatedError(ErrorCode::ParseError, line_no, 1, "registry line needs 3 fields");
        }
        std::string id = unescape_registry(line.substr(0, t1), line_no);
        auto kind = kind_from_name(line.substr(t1 + 1, t2 - t1 - 1));
        if (!kind) {
            throw LocatedError(ErrorCode::ParseError, line_no, t1 + 2, "unknown entity kind");
        }
        std::string label = unescape_registry(line.substr(t2 + 1), line_no);
        store->restore_entity(id, *kind, label);
    }

    // Membership bookkeeping has to be live before statements stream in.
    auto instance_of = store->find_by_label(EntityKind::Property, "instance of");
    if (!instance_of.empty()) store->designate_instance_of(instance_of.front());

    const std::string ns_prefix = store->namespace_uri() + "/";
    auto is_local = [&](const std::string& iri) { return iri.rfind(ns_prefix, 0) == 0; };

    for (const auto& triple : parse_ntriples(nt_text)) {
        auto subject = store->entity_by_full_iri(triple.subject);
        if (!subject) {
            throw Error(ErrorCode::DanglingReference,
                        "statement subject not in registry: " + triple.subject);
        }
        auto predicate = store->entity_by_full_iri(triple.predicate);
        if (!predicate) {
            throw Error(ErrorCode::DanglingReference,
                        "statement predicate not in registry: " + triple.predicate);
        }
        Term object;
        if (triple.object.is_iri) {
            auto obj = store->entity_by_full_iri(triple.object.iri);
            if (obj) {
                object = Term(obj->iri);
            } else if (is_local(triple.object.iri)) {
                throw Error(ErrorCode::DanglingReference,
                            "statement object not in registry: " + triple.object.iri);
            } else {
                object = Term(store->register_external(triple.object.iri));
            }
        } else {
            object = Term(triple.object.literal);
        }
        store->add_statement(subject->iri, predicate->iri, object);
    }
    return store;
}

std::unique_ptr<Store> load_snapshot_files(const std::string& base_path,
                                           const std::string& namespace_uri) {
    return load_snapshot(read_file(base_path + ".nt"), read_file(base_path + ".reg"),
                         namespace_uri);
}

bool snapshot_exists(const std::string& base_path) {
    std::error_code ec;
    return std::filesystem::exists(base_path + ".nt", ec) &&
           std::filesystem::exists(base_path + ".reg", ec);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open for reading: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot open for writing: " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorCode::Io, "write failed: " + path);
}

} // namespace nibskg
