#include "nibskg/comparison.hpp"

#include <algorithm>
#include <ctime>
#include <map>
#include <set>

#include <json.hpp>

#include "nibskg/ingest.hpp"
#include "nibskg/rdf_io.hpp"

namespace nibskg {

using json = nlohmann::ordered_json;

std::string utc_now_iso() {
    std::time_t now = std::time(nullptr);
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

std::string minimal_decimal_lexical(const std::string& lexical) {
    std::string s = lexical;
    bool negative = false;
    std::size_t i = 0;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
        negative = s[i] == '-';
        ++i;
    }
    std::string integer_part;
    while (i < s.size() && s[i] != '.') integer_part.push_back(s[i++]);
    std::string fraction;
    if (i < s.size() && s[i] == '.') {
        ++i;
        while (i < s.size()) fraction.push_back(s[i++]);
    }
    while (integer_part.size() > 1 && integer_part.front() == '0') integer_part.erase(0, 1);
    if (integer_part.empty()) integer_part = "0";
    while (!fraction.empty() && fraction.back() == '0') fraction.pop_back();
    std::string out = integer_part;
    if (!fraction.empty()) out += "." + fraction;
    if (negative && out != "0") out.insert(out.begin(), '-');
    return out;
}

namespace {

std::string render_cell_value(const Store& store, const Term& term) {
    if (term.is_iri()) {
        auto rec = store.entity(term.iri());
        if (rec && !rec->label.empty()) return rec->label;
        return term.iri().full();
    }
    const Literal& lit = term.literal();
    if (lit.datatype() == Datatype::Decimal) return minimal_decimal_lexical(lit.lexical());
    return lit.lexical();
}

std::string paper_title_for(const Store& store, const VocabularyManifest& manifest,
                            const Iri& contribution) {
    auto links = store.statements_matching(std::nullopt, manifest.has_contribution,
                                           Term(contribution));
    if (links.empty()) {
        auto rec = store.entity(contribution);
        return rec ? rec->label : contribution.full();
    }
    const Iri& paper = links.front().subject;
    auto titles = store.statements_matching(paper, manifest.title, std::nullopt);
    if (!titles.empty() && titles.front().object.is_literal()) {
        return titles.front().object.literal().lexical();
    }
    auto rec = store.entity(paper);
    return rec ? rec->label : paper.full();
}

std::string property_label_for(const Store& store, const Iri& property) {
    auto rec = store.entity(property);
    return (rec && !rec->label.empty()) ? rec->label : property.full();
}

} // namespace

bool ComparisonTable::content_equal(const ComparisonTable& other) const {
    if (part_index != other.part_index) return false;
    if (contributions.size() != other.contributions.size()) return false;
    for (std::size_t i = 0; i < contributions.size(); ++i) {
        if (contributions[i].first != other.contributions[i].first ||
            contributions[i].second != other.contributions[i].second) {
            return false;
        }
    }
    if (rows.size() != other.rows.size()) return false;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].property_label != other.rows[i].property_label ||
            rows[i].cells != other.rows[i].cells) {
            return false;
        }
    }
    return true;
}

ComparisonTable build_comparison(const Store& store, const VocabularyManifest& manifest,
                                 const Template& tmpl, const std::vector<Iri>& contributions,
                                 PropertyMode mode, const Clock& clock) {
    ComparisonTable table;
    table.created_at = clock();

    // Values per contribution, keyed by predicate IRI.
    std::vector<std::map<std::string, std::vector<Term>>> values(contributions.size());
    std::map<std::string, Iri> predicate_iris;
    for (std::size_t i = 0; i < contributions.size(); ++i) {
        const Iri& contribution = contributions[i];
        if (!store.has_entity(contribution)) {
            throw Error(ErrorCode::UnknownEntity, "unknown contribution: " + contribution.full());
        }
        table.contributions.emplace_back(paper_title_for(store, manifest, contribution),
                                         contribution);
        for (const auto& st :
             store.statements_matching(contribution, std::nullopt, std::nullopt)) {
            if (st.predicate == manifest.instance_of) continue;
            values[i][st.predicate.full()].push_back(st.object);
            predicate_iris.emplace(st.predicate.full(), st.predicate);
        }
    }

    auto used_count = [&](const std::string& predicate_full) {
        std::size_t n = 0;
        for (const auto& per_contribution : values) {
            if (per_contribution.count(predicate_full)) ++n;
        }
        return n;
    };
    auto keep = [&](const std::string& predicate_full) {
        std::size_t n = used_count(predicate_full);
        if (mode == PropertyMode::Union) return n > 0;
        return !contributions.empty() && n == contributions.size();
    };

    // Template order first, sub-shapes right after their parent.
    std::vector<std::pair<std::string, std::string>> ordered; // (predicate full, label)
    std::set<std::string> seen;
    auto add_shape = [&](const PropertyShape& shape, auto&& self) -> void {
        if (seen.insert(shape.property.full()).second && keep(shape.property.full())) {
            ordered.emplace_back(shape.property.full(), shape.label);
        }
        for (const auto& sub : shape.sub_shapes) self(sub, self);
    };
    for (const auto& shape : tmpl.shapes) add_shape(shape, add_shape);

    std::vector<std::pair<std::string, std::string>> extras; // (label, predicate full)
    for (const auto& [predicate_full, iri] : predicate_iris) {
        if (seen.count(predicate_full) || !keep(predicate_full)) continue;
        seen.insert(predicate_full);
        extras.emplace_back(property_label_for(store, iri), predicate_full);
    }
    std::sort(extras.begin(), extras.end());
    for (const auto& [label, predicate_full] : extras) {
        ordered.emplace_back(predicate_full, label);
    }

    for (const auto& [predicate_full, label] : ordered) {
        ComparisonRow row;
        row.property_label = label;
        for (std::size_t i = 0; i < contributions.size(); ++i) {
            std::vector<std::string> cell;
            auto it = values[i].find(predicate_full);
            if (it != values[i].end()) {
                for (const auto& term : it->second) {
                    cell.push_back(render_cell_value(store, term));
                }
                std::sort(cell.begin(), cell.end());
            }
            row.cells.push_back(std::move(cell));
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::vector<ComparisonTable> chunk_comparisons(const Store& store,
                                               const VocabularyManifest& manifest,
                                               const Template& tmpl,
                                               const std::vector<Iri>& contributions,
                                               std::size_t chunk_size, PropertyMode mode,
                                               const Clock& clock) {
    if (chunk_size < 1) {
        throw Error(ErrorCode::InvalidChunkSize, "chunk size must be at least 1");
    }
    std::vector<ComparisonTable> parts;
    std::size_t n_parts = (contributions.size() + chunk_size - 1) / chunk_size;
    for (std::size_t part = 0; part < n_parts; ++part) {
        std::size_t begin = part * chunk_size;
        std::size_t end = std::min(begin + chunk_size, contributions.size());
        std::vector<Iri> slice(contributions.begin() + static_cast<std::ptrdiff_t>(begin),
                               contributions.begin() + static_cast<std::ptrdiff_t>(end));
        ComparisonTable table = build_comparison(store, manifest, tmpl, slice, mode, clock);
        table.part_index = {static_cast<int>(part + 1), static_cast<int>(n_parts)};
        parts.push_back(std::move(table));
    }
    return parts;
}

namespace {

json table_to_json(const ComparisonTable& table) {
    json doc;
    doc["id"] = table.id;
    doc["version"] = table.version;
    doc["created_at"] = table.created_at;
    if (table.part_index) {
        doc["part_index"] = {{"part", table.part_index->first},
                             {"parts", table.part_index->second}};
    } else {
        doc["part_index"] = nullptr;
    }
    doc["contributions"] = json::array();
    for (const auto& [title, iri] : table.contributions) {
        doc["contributions"].push_back({{"title", title}, {"iri", iri.full()}});
    }
    doc["rows"] = json::array();
    for (const auto& row : table.rows) {
        doc["rows"].push_back({{"property", row.property_label}, {"cells", row.cells}});
    }
    return doc;
}

ComparisonTable table_from_json(const json& doc) {
    ComparisonTable table;
    table.id = doc.at("id").get<std::string>();
    table.version = doc.at("version").get<int>();
    table.created_at = doc.at("created_at").get<std::string>();
    if (!doc.at("part_index").is_null()) {
        table.part_index = {doc["part_index"].at("part").get<int>(),
                            doc["part_index"].at("parts").get<int>()};
    }
    for (const auto& entry : doc.at("contributions")) {
        table.contributions.emplace_back(entry.at("title").get<std::string>(),
                                         Iri::external(entry.at("iri").get<std::string>()));
    }
    for (const auto& entry : doc.at("rows")) {
        ComparisonRow row;
        row.property_label = entry.at("property").get<std::string>();
        row.cells = entry.at("cells").get<std::vector<std::vector<std::string>>>();
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::string join_cell(const std::vector<std::string>& cell) {
    std::string out;
    for (const auto& value : cell) {
        if (!out.empty()) out += "; ";
        out += value;
    }
    return out;
}

std::string escape_markdown(const std::string& text) {
    std::string out;
    for (char c : text) {
        if (c == '|') out += "\\|";
        else out.push_back(c);
    }
    return out;
}

} // namespace

std::string export_comparison(const ComparisonTable& table, ComparisonFormat format) {
    switch (format) {
        case ComparisonFormat::Csv: {
            std::string out = "property";
            for (const auto& [title, iri] : table.contributions) {
                out += "," + csv_quote(title);
            }
            out += "\n";
            for (const auto& row : table.rows) {
                out += csv_quote(row.property_label);
                for (const auto& cell : row.cells) {
                    out += "," + csv_quote(join_cell(cell));
                }
                out += "\n";
            }
            return out;
        }
        case ComparisonFormat::Json:
            return table_to_json(table).dump(2) + "\n";
        case ComparisonFormat::Markdown: {
            std::string out = "| property |";
            for (const auto& [title, iri] : table.contributions) {
                out += " " + escape_markdown(title) + " |";
            }
            out += "\n|---|";
            for (std::size_t i = 0; i < table.contributions.size(); ++i) out += "---|";
            out += "\n";
            for (const auto& row : table.rows) {
                out += "| " + escape_markdown(row.property_label) + " |";
                for (const auto& cell : row.cells) {
                    out += " " + escape_markdown(join_cell(cell)) + " |";
                }
                out += "\n";
            }
            return out;
        }
    }
    return "";
}

PublicationRegistry::PublicationRegistry(Clock clock) : clock_(std::move(clock)) {}

const PublicationRecord* PublicationRegistry::find(const std::string& id) const {
    for (const auto& record : records_) {
        if (record.id == id) return &record;
    }
    return nullptr;
}

PublicationRecord PublicationRegistry::publish(const ComparisonTable& table,
                                               const PublicationMetadata& metadata) {
    if (table.contributions.empty()) {
        throw Error(ErrorCode::EmptyTable, "cannot publish a comparison with no contributions");
    }
    for (const auto& existing : records_) {
        if (existing.snapshot.content_equal(table)) return existing;
    }

    PublicationRecord record;
    record.id = "10.99999/nibs.cmp." + std::to_string(records_.size() + 1);
    if (metadata.predecessor_id) {
        const PublicationRecord* predecessor = find(*metadata.predecessor_id);
        if (!predecessor) {
            throw Error(ErrorCode::NotFound,
                        "predecessor not in registry: " + *metadata.predecessor_id);
        }
        record.predecessor_id = predecessor->id;
        record.version = predecessor->version + 1;
    }
    record.title = metadata.title;
    record.description = metadata.description;
    record.creator = metadata.creator;
    record.license = metadata.license;
    record.created_at = clock_();
    record.snapshot = table;
    record.snapshot.id = record.id;
    record.snapshot.version = record.version;
    records_.push_back(record);
    return record;
}

namespace {

json record_to_json_doc(const PublicationRecord& record) {
    json entry;
    entry["id"] = record.id;
    entry["version"] = record.version;
    entry["predecessor"] = record.predecessor_id ? json(*record.predecessor_id) : json(nullptr);
    entry["title"] = record.title;
    entry["description"] = record.description;
    entry["creator"] = record.creator;
    entry["license"] = record.license;
    entry["created_at"] = record.created_at;
    entry["table"] = table_to_json(record.snapshot);
    return entry;
}

} // namespace

std::string PublicationRegistry::record_to_json(const PublicationRecord& record) {
    return record_to_json_doc(record).dump(2) + "\n";
}

std::string PublicationRegistry::to_json() const {
    json doc = json::array();
    for (const auto& record : records_) {
        doc.push_back(record_to_json_doc(record));
    }
    return doc.dump(2) + "\n";
}

PublicationRegistry PublicationRegistry::from_json(const std::string& text, Clock clock) {
    PublicationRegistry registry(std::move(clock));
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("bad registry JSON: ") + e.what());
    }
    for (const auto& entry : doc) {
        PublicationRecord record;
        record.id = entry.at("id").get<std::string>();
        record.version = entry.at("version").get<int>();
        if (!entry.at("predecessor").is_null()) {
            record.predecessor_id = entry["predecessor"].get<std::string>();
        }
        record.title = entry.at("title").get<std::string>();
        record.description = entry.at("description").get<std::string>();
        record.creator = entry.at("creator").get<std::string>();
        record.license = entry.at("license").get<std::string>();
        record.created_at = entry.at("created_at").get<std::string>();
        record.snapshot = table_from_json(entry.at("table"));
        registry.records_.push_back(std::move(record));
    }
    return registry;
}

void PublicationRegistry::save(const std::string& path) const { write_file(path, to_json()); }

PublicationRegistry PublicationRegistry::load_or_empty(const std::string& path, Clock clock) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::Io) return PublicationRegistry(std::move(clock));
        throw;
    }
    return from_json(text, std::move(clock));
}

} // namespace nibskg
