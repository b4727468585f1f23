#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "nibskg/store.hpp"

namespace nibskg {

enum class RdfFormat { NTriples, Turtle };

struct SerializationOptions {
    RdfFormat format = RdfFormat::NTriples;
    std::map<std::string, std::string> prefix_map; // turtle only
    bool sort = true;
    // When set, every registered entity additionally yields a
    // (entity, label-predicate, "label") triple in the output.
    bool include_labels = false;
};

struct ParsedTerm {
    bool is_iri = false;
    std::string iri;
    Literal literal;
};

struct ParsedTriple {
    std::string subject;
    std::string predicate;
    ParsedTerm object;
};

std::string escape_ntriples(const std::string& raw);

std::string serialize(const Store& store, const SerializationOptions& opts = {});
std::string serialize_statements(const std::vector<Statement>& statements, bool sort = true);

// Accepts the N-Triples subset this engine emits (plus blank lines and
// comment lines). Throws LocatedError(ParseError) on the first bad input.
std::vector<ParsedTriple> parse_ntriples(const std::string& text);

// Snapshot pair: <base>.nt holds the canonical sorted triples, <base>.reg the
// entity registry (one "<local_id>\t<kind>\t<label>" line per entity, with
// tab/newline/backslash escaped as \t, \n, \\).
void save_snapshot(const Store& store, const std::string& base_path);
std::unique_ptr<Store> load_snapshot(const std::string& nt_text, const std::string& registry_text,
                                     const std::string& namespace_uri);
std::unique_ptr<Store> load_snapshot_files(const std::string& base_path,
                                           const std::string& namespace_uri);
bool snapshot_exists(const std::string& base_path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

} // namespace nibskg
