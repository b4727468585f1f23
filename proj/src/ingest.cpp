#include "nibskg/ingest.hpp"

#include <algorithm>
#include <random>
#include <sstream>

namespace nibskg {

namespace {

std::string trim(const std::string& s) {
    std::size_t start = s.find_first_not_of(" \t\r\n");
    if (start == std::string::npos) return "";
    std::size_t end = s.find_last_not_of(" \t\r\n");
    return s.substr(start, end - start + 1);
}

std::vector<std::string> split_tokens(const std::string& cell) {
    std::vector<std::string> tokens;
    std::size_t pos = 0;
    while (pos <= cell.size()) {
        std::size_t semi = cell.find(';', pos);
        std::string token = trim((semi == std::string::npos) ? cell.substr(pos)
                                                             : cell.substr(pos, semi - pos));
        if (!token.empty()) tokens.push_back(token);
        if (semi == std::string::npos) break;
        pos = semi + 1;
    }
    return tokens;
}

// RFC 4180 field splitter; quoted fields may contain commas, quotes and
// newlines. Returns logical rows.
std::vector<std::vector<std::string>> split_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool in_quotes = false;
    bool row_started = false;

    auto end_field = [&]() {
        row.push_back(field);
        field.clear();
    };
    auto end_row = [&]() {
        end_field();
        rows.push_back(row);
        row.clear();
        row_started = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
            case '"': in_quotes = true; row_started = true; break;
            case ',': end_field(); row_started = true; break;
            case '\r': break;
            case '\n': end_row(); break;
            default: field.push_back(c); row_started = true;
        }
    }
    if (row_started || !field.empty() || !row.empty()) end_row();
    return rows;
}

const char* kMetadataFields[] = {"title", "doi", "publication year", "author"};

std::optional<ColumnMapping::Field> metadata_field(const std::string& normalized) {
    if (normalized == "title") return ColumnMapping::Field::Title;
    if (normalized == "doi") return ColumnMapping::Field::Doi;
    if (normalized == "publication year" || normalized == "year") {
        return ColumnMapping::Field::Year;
    }
    if (normalized == "author" || normalized == "first author") {
        return ColumnMapping::Field::Author;
    }
    return std::nullopt;
}

} // namespace

const std::vector<std::string>* StudyRecord::tokens_for(const std::string& key) const {
    for (const auto& [k, tokens] : values) {
        if (k == key) return &tokens;
    }
    return nullptr;
}

std::string IngestSummary::to_text() const {
    std::ostringstream out;
    out << "records: " << total << "\nconforming: " << conforming
        << "\nwith_violations: " << with_violations << "\n";
    if (!unresolved_tokens.empty()) {
        out << "unresolved tokens:\n";
        for (const auto& [key, count] : unresolved_tokens) {
            out << "  " << key.first << " = '" << key.second << "' (x" << count << ")\n";
        }
    }
    return out.str();
}

const ColumnMapping::Target* ColumnMapping::lookup(const std::string& header) const {
    auto it = by_header.find(normalize_token(header));
    return it == by_header.end() ? nullptr : &it->second;
}

ColumnMapping parse_mapping(const std::string& text, const VocabularyManifest& manifest) {
    ColumnMapping mapping;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        std::size_t eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw LocatedError(ErrorCode::MappingError, line_no, 1,
                               "mapping line needs 'column = property'");
        }
        std::string header = trim(stripped.substr(0, eq));
        std::string target_label = trim(stripped.substr(eq + 1));
        if (header.empty() || target_label.empty()) {
            throw LocatedError(ErrorCode::MappingError, line_no, 1,
                               "empty column or property name");
        }
        std::string key = normalize_token(header);
        if (mapping.by_header.count(key)) {
            throw LocatedError(ErrorCode::MappingError, line_no, 1,
                               "column mapped twice: '" + header + "'");
        }
        ColumnMapping::Target target;
        if (auto field = metadata_field(normalize_token(target_label))) {
            target.field = *field;
        } else if (const PropertySpec* spec = manifest.find_property(target_label)) {
            target.field = ColumnMapping::Field::Property;
            target.property_label = spec->label;
        } else {
            throw LocatedError(ErrorCode::MappingError, line_no, 1,
                               "unknown property: '" + target_label + "'");
        }
        mapping.by_header[key] = target;
    }
    return mapping;
}

ColumnMapping identity_mapping(const VocabularyManifest& manifest) {
    ColumnMapping mapping;
    for (const char* field : kMetadataFields) {
        ColumnMapping::Target target;
        target.field = *metadata_field(field);
        mapping.by_header[normalize_token(field)] = target;
    }
    auto add_property = [&](const PropertySpec& spec) {
        ColumnMapping::Target target;
        target.field = ColumnMapping::Field::Property;
        target.property_label = spec.label;
        mapping.by_header[normalize_token(spec.label)] = target;
        for (const auto& alias : spec.extra_aliases) mapping.by_header[alias] = target;
    };
    for (const auto& spec : manifest.properties) {
        add_property(spec);
        for (const auto& sub : spec.sub_properties) add_property(sub);
    }
    return mapping;
}

std::vector<StudyRecord> parse_csv(const std::string& text, const ColumnMapping& mapping) {
    auto rows = split_csv(text);
    if (rows.empty()) {
        throw Error(ErrorCode::MalformedCsv, "empty input: no header row");
    }
    const auto& header = rows.front();

    std::vector<const ColumnMapping::Target*> targets;
    std::optional<std::size_t> title_col;
    for (std::size_t i = 0; i < header.size(); ++i) {
        const auto* target = mapping.lookup(trim(header[i]));
        targets.push_back(target);
        if (target && target->field == ColumnMapping::Field::Title && !title_col) title_col = i;
    }
    if (!title_col) {
        throw Error(ErrorCode::MissingTitleColumn, "no column maps to the paper title");
    }

    std::vector<StudyRecord> records;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        std::size_t row_no = r + 1;
        if (row.size() != header.size()) {
            throw Error(ErrorCode::MalformedCsv,
                        "row " + std::to_string(row_no) + " has " + std::to_string(row.size()) +
                            " fields, header has " + std::to_string(header.size()));
        }
        StudyRecord record;
        for (std::size_t i = 0; i < row.size(); ++i) {
            std::string cell = trim(row[i]);
            if (cell.empty()) continue;
            const auto* target = targets[i];
            if (!target) {
                // Unmapped column: keep the original header as the key so the
                // tokens still reach the graph.
                auto tokens = split_tokens(cell);
                if (!tokens.empty()) record.values.emplace_back(trim(header[i]), tokens);
                continue;
            }
            switch (target->field) {
                case ColumnMapping::Field::Title:
                    record.title = cell;
                    break;
                case ColumnMapping::Field::Doi:
                    record.doi = cell;
                    break;
                case ColumnMapping::Field::Year:
                    // Partial numerics are not silently truncated; they flow
                    // into the graph as verbatim tokens instead.
                    if (is_valid_integer(cell)) {
                        record.year = std::stoi(cell);
                    } else {
                        record.values.emplace_back("publication year",
                                                   std::vector<std::string>{cell});
                    }
                    break;
                case ColumnMapping::Field::Author:
                    record.first_author = cell;
                    break;
                case ColumnMapping::Field::Property: {
                    auto tokens = split_tokens(cell);
                    if (!tokens.empty()) {
                        record.values.emplace_back(target->property_label, tokens);
                    }
                    break;
                }
            }
        }
        if (record.title.empty()) {
            throw Error(ErrorCode::MalformedCsv,
                        "row " + std::to_string(row_no) + ": empty title");
        }
        records.push_back(std::move(record));
    }
    return records;
}

namespace {

struct AmbiguousToken {
    std::string shape_label;
    std::string token;
    std::vector<std::string> candidate_labels;
};

} // namespace

std::pair<Contribution, ValidationReport> record_to_contribution(
    Store& store, const VocabularyManifest& manifest, const Template& tmpl,
    const StudyRecord& record) {
    Contribution contribution;
    std::vector<AmbiguousToken> ambiguities;

    auto track = [&](std::uint64_t ordinal) {
        contribution.statement_ordinals.push_back(ordinal);
    };

    contribution.paper_iri = store.mint_entity(EntityKind::Resource, record.title);
    contribution.iri = store.mint_entity(EntityKind::Resource, "Contribution 1");

    track(store.add_statement(contribution.paper_iri, manifest.instance_of,
                              Term(manifest.paper_class)));
    track(store.add_statement(contribution.paper_iri, manifest.title,
                              Term(Literal::string(record.title))));
    if (record.doi) {
        track(store.add_statement(contribution.paper_iri, manifest.doi,
                                  Term(Literal::string(*record.doi))));
    }
    if (record.year) {
        track(store.add_statement(contribution.paper_iri, manifest.publication_year,
                                  Term(Literal::integer(*record.year))));
    }
    if (record.first_author) {
        track(store.add_statement(contribution.paper_iri, manifest.author,
                                  Term(Literal::string(*record.first_author))));
    }
    track(store.add_statement(contribution.paper_iri, manifest.has_contribution,
                              Term(contribution.iri)));
    track(store.add_statement(contribution.iri, manifest.instance_of,
                              Term(manifest.contribution_class)));

    for (const auto& [key, tokens] : record.values) {
        const PropertySpec* spec = manifest.find_property(key);
        Iri property;
        if (spec) {
            property = spec->iri;
        } else {
            auto found = store.find_by_label(EntityKind::Property, key);
            property = found.empty() ? store.mint_entity(EntityKind::Property, key)
                                     : found.front();
        }
        for (const auto& token : tokens) {
            Term value{Literal::string(token)};
            if (spec && spec->is_controlled()) {
                LookupResult lookup = lookup_term(manifest, spec->iri, token);
                if (lookup.matched()) {
                    value = Term(lookup.term->iri);
                } else {
                    if (lookup.status == LookupResult::Status::Ambiguous) {
                        AmbiguousToken amb;
                        amb.shape_label = spec->label;
                        amb.token = token;
                        for (const auto& c : lookup.candidates) {
                            amb.candidate_labels.push_back(c.label);
                        }
                        ambiguities.push_back(std::move(amb));
                    }
                }
            } else if (spec && (spec->range == RangeKind::Decimal ||
                                spec->range == RangeKind::Integer)) {
                bool ok = spec->range == RangeKind::Decimal ? is_valid_decimal(token)
                                                            : is_valid_integer(token);
                if (ok) {
                    value = Term(spec->range == RangeKind::Decimal ? Literal::decimal(token)
                                                                   : Literal::integer(token));
                }
            }
            track(store.add_statement(contribution.iri, property, value));
        }
    }

    ValidationReport report = validate(store, contribution.iri, tmpl);
    for (const auto& amb : ambiguities) {
        for (auto& violation : report.violations) {
            if (violation.shape_label == amb.shape_label &&
                violation.code == ViolationCode::NotInVocabulary &&
                violation.detail.find("'" + amb.token + "'") != std::string::npos) {
                std::string joined;
                for (const auto& label : amb.candidate_labels) {
                    if (!joined.empty()) joined += ", ";
                    joined += label;
                }
                violation.detail += "; ambiguous among: " + joined;
                break;
            }
        }
    }
    return {contribution, report};
}

IngestSummary ingest_corpus(Store& store, const VocabularyManifest& manifest, const Template& tmpl,
                            const std::vector<StudyRecord>& records,
                            std::vector<Contribution>* out_contributions) {
    IngestSummary summary;
    for (const auto& record : records) {
        auto [contribution, report] = record_to_contribution(store, manifest, tmpl, record);
        ++summary.total;
        if (report.conforms()) {
            ++summary.conforming;
        } else {
            ++summary.with_violations;
        }
        for (const auto& [key, tokens] : record.values) {
            const PropertySpec* spec = manifest.find_property(key);
            if (!spec) continue;
            for (const auto& token : tokens) {
                bool resolved = true;
                if (spec->is_controlled()) {
                    resolved = lookup_term(manifest, spec->iri, token).matched();
                } else if (spec->range == RangeKind::Decimal) {
                    resolved = is_valid_decimal(token);
                } else if (spec->range == RangeKind::Integer) {
                    resolved = is_valid_integer(token);
                }
                if (!resolved) ++summary.unresolved_tokens[{spec->label, token}];
            }
        }
        if (out_contributions) out_contributions->push_back(contribution);
    }
    return summary;
}

namespace {

class CorpusRng {
public:
    explicit CorpusRng(std::uint64_t seed) : engine_(static_cast<std::mt19937::result_type>(seed)) {}

    // Raw engine draws only: std::uniform_int_distribution is not pinned
    // across implementations, and dumps must be byte-identical everywhere.
    std::uint32_t next() { return engine_(); }
    std::uint32_t below(std::uint32_t bound) { return next() % bound; }
    bool chance(std::uint32_t percent) { return below(100) < percent; }

    template <std::size_t N>
    const char* pick(const char* const (&items)[N]) {
        return items[below(static_cast<std::uint32_t>(N))];
    }

private:
    std::mt19937 engine_;
};

// value scaled by 10^decimals, rendered without trailing zeros.
std::string render_scaled(std::uint32_t value, std::uint32_t decimals) {
    std::uint32_t scale = 1;
    for (std::uint32_t i = 0; i < decimals; ++i) scale *= 10;
    std::string out = std::to_string(value / scale);
    std::uint32_t frac = value % scale;
    if (frac != 0) {
        std::string digits = std::to_string(frac);
        digits.insert(digits.begin(), decimals - digits.size(), '0');
        while (!digits.empty() && digits.back() == '0') digits.pop_back();
        out += "." + digits;
    }
    return out;
}

constexpr const char* kRegions[] = {
    "primary motor cortex",        "dorsolateral prefrontal cortex", "visual cortex",
    "cerebellum",                  "posterior parietal cortex",      "premotor cortex",
};

constexpr const char* kAuthors[] = {
    "Alvarez", "Brandt", "Chen",  "Dimitrov", "Eriksen", "Fujita", "Garcia",
    "Haas",    "Ivanova", "Johansson", "Kaur", "Lindgren", "Moreau", "Nakamura",
    "Okafor",  "Petrova", "Quinn", "Rossi",   "Sato",     "Tanaka",
};

} // namespace

std::vector<StudyRecord> generate_synthetic_corpus(const VocabularyManifest& manifest,
                                                   std::uint64_t seed, std::size_t n) {
    CorpusRng rng(seed);
    std::vector<StudyRecord> records;
    records.reserve(n);

    auto controlled_label = [&](const char* property) -> std::string {
        const PropertySpec* spec = manifest.find_property(property);
        return spec->terms[rng.below(static_cast<std::uint32_t>(spec->terms.size()))].label;
    };

    for (std::size_t i = 0; i < n; ++i) {
        StudyRecord record;
        std::string type = controlled_label("Type of rTMS");
        record.title = "rTMS dose study " + std::to_string(i + 1) + ": " + type + " of the " +
                       rng.pick(kRegions);
        record.doi = "10.99998/rtms." + std::to_string(i + 1);
        record.year = 1999 + static_cast<int>(rng.below(22));
        record.first_author = std::string(rng.pick(kAuthors)) + " " +
                              static_cast<char>('A' + rng.below(26)) + ".";

        record.values.emplace_back("Type of rTMS", std::vector<std::string>{type});
        if (rng.chance(85)) {
            record.values.emplace_back(
                "Intrabust Frequency",
                std::vector<std::string>{render_scaled(10 + rng.below(991), 1)});
        }
        if (rng.chance(85)) {
            record.values.emplace_back(
                "Stimulation Intensity Selection Approach",
                std::vector<std::string>{controlled_label("Stimulation Intensity Selection Approach")});
        }
        if (rng.chance(60)) {
            record.values.emplace_back(
                "Threshold-estimation strategies",
                std::vector<std::string>{controlled_label("Threshold-estimation strategies")});
        }
        if (rng.chance(55)) {
            record.values.emplace_back(
                "Threshold Measurement",
                std::vector<std::string>{controlled_label("Threshold Measurement")});
        }
        if (rng.chance(50)) {
            record.values.emplace_back(
                "Amplitude of the Motor Evoked Potential",
                std::vector<std::string>{render_scaled(5 + rng.below(96), 2)});
        }
        if (rng.chance(45)) {
            record.values.emplace_back(
                "Threshold Ratio", std::vector<std::string>{render_scaled(80 + rng.below(41), 2)});
        }
        if (rng.chance(40)) {
            record.values.emplace_back(
                "Percentage or the Amplitude of the Motor Threshold Contraction",
                std::vector<std::string>{std::to_string(20 + rng.below(101))});
        }
        if (rng.chance(90)) {
            std::uint32_t a = 20 + rng.below(101);
            std::uint32_t b = 20 + rng.below(101);
            record.values.emplace_back(
                "Percent of Stimulation Intensity (Min Value)",
                std::vector<std::string>{std::to_string(std::min(a, b))});
            record.values.emplace_back(
                "Percent of Stimulation Intensity (Max Value)",
                std::vector<std::string>{std::to_string(std::max(a, b))});
        }
        if (rng.chance(50)) {
            record.values.emplace_back("Maximum Stimulator Output",
                                       std::vector<std::string>{std::to_string(20 + rng.below(101))});
        }
        if (rng.chance(80)) {
            record.values.emplace_back("Stimulator Company",
                                       std::vector<std::string>{controlled_label("Stimulator Company")});
        }
        if (rng.chance(70)) {
            record.values.emplace_back("Stimulator Model",
                                       std::vector<std::string>{controlled_label("Stimulator Model")});
        }
        if (rng.chance(85)) {
            record.values.emplace_back("Coil Shape",
                                       std::vector<std::string>{controlled_label("Coil Shape")});
        }
        if (rng.chance(45)) {
            record.values.emplace_back("Coil Size",
                                       std::vector<std::string>{std::to_string(25 + rng.below(96))});
        }
        if (rng.chance(65)) {
            record.values.emplace_back("Coil Model",
                                       std::vector<std::string>{controlled_label("Coil Model")});
        }
        records.push_back(std::move(record));
    }
    return records;
}

std::string csv_quote(const std::string& field) {
    bool needs_quotes = field.find_first_of(",\"\n\r") != std::string::npos;
    if (!needs_quotes) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

std::string corpus_to_csv(const std::vector<StudyRecord>& records,
                          const VocabularyManifest& manifest) {
    std::vector<std::string> columns = {"title", "doi", "publication year", "author"};
    for (const auto& spec : manifest.properties) {
        if (spec.sub_properties.empty()) {
            columns.push_back(spec.label);
        } else {
            for (const auto& sub : spec.sub_properties) columns.push_back(sub.label);
        }
    }

    std::string out;
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) out += ",";
        out += csv_quote(columns[i]);
    }
    out += "\n";

    for (const auto& record : records) {
        for (std::size_t i = 0; i < columns.size(); ++i) {
            if (i) out += ",";
            const std::string& col = columns[i];
            if (col == "title") {
                out += csv_quote(record.title);
            } else if (col == "doi") {
                if (record.doi) out += csv_quote(*record.doi);
            } else if (col == "publication year") {
                if (record.year) out += std::to_string(*record.year);
            } else if (col == "author") {
                if (record.first_author) out += csv_quote(*record.first_author);
            } else if (const auto* tokens = record.tokens_for(col)) {
                std::string joined;
                for (const auto& token : *tokens) {
                    if (!joined.empty()) joined += ";";
                    joined += token;
                }
                out += csv_quote(joined);
            }
        }
        out += "\n";
    }
    return out;
}

} // namespace nibskg
