#include "nibskg/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <memory>

#include <CLI11.hpp>

#include "nibskg/comparison.hpp"
#include "nibskg/fair.hpp"
#include "nibskg/ingest.hpp"
#include "nibskg/query.hpp"
#include "nibskg/rdf_io.hpp"
#include "nibskg/service.hpp"
#include "nibskg/store.hpp"
#include "nibskg/template_engine.hpp"
#include "nibskg/vocabulary.hpp"

namespace nibskg {

namespace {

constexpr int kOk = 0;
constexpr int kViolations = 1;
constexpr int kUsage = 2;
constexpr int kIo = 3;

std::string resolve_namespace() {
    const char* env = std::getenv("NIBS_KG_NAMESPACE");
    if (env && *env) return env;
    return "http://localhost:8080";
}

int exit_code_for(const Error& e) {
    switch (e.code()) {
        case ErrorCode::Io:
        case ErrorCode::BindFailure:
            return kIo;
        default:
            return kUsage;
    }
}

std::string pubs_path(const std::string& store_path) { return store_path + ".pubs.json"; }

struct LoadedStore {
    std::unique_ptr<Store> store;
    VocabularyManifest manifest;
    Template tmpl;
};

LoadedStore load_with_schema(const std::string& store_path) {
    LoadedStore loaded;
    loaded.store = load_snapshot_files(store_path, resolve_namespace());
    loaded.manifest = seed_rtms_vocabulary(*loaded.store);
    loaded.tmpl = define_rtms_template(*loaded.store, loaded.manifest);
    return loaded;
}

std::vector<Iri> all_contributions(const Store& store, const VocabularyManifest& manifest) {
    return store.members_of(manifest.contribution_class);
}

void emit(std::ostream& out, const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        out << content;
    } else {
        write_file(path, content);
    }
}

PropertyMode parse_mode(const std::string& mode) {
    if (mode == "union") return PropertyMode::Union;
    if (mode == "intersection") return PropertyMode::Intersection;
    throw Error(ErrorCode::MappingError, "unknown mode: " + mode);
}

const char* format_extension(ComparisonFormat format) {
    switch (format) {
        case ComparisonFormat::Csv: return "csv";
        case ComparisonFormat::Json: return "json";
        case ComparisonFormat::Markdown: return "md";
    }
    return "txt";
}

ComparisonFormat parse_comparison_format(const std::string& format) {
    if (format == "csv") return ComparisonFormat::Csv;
    if (format == "json") return ComparisonFormat::Json;
    if (format == "md") return ComparisonFormat::Markdown;
    throw Error(ErrorCode::MappingError, "unknown comparison format: " + format);
}

// ─── subcommand bodies ─────────────────────────────────────────────────────

int cmd_seed(const std::string& store_path, std::ostream& out) {
    Store store(resolve_namespace());
    VocabularyManifest manifest = seed_rtms_vocabulary(store);
    define_rtms_template(store, manifest);
    save_snapshot(store, store_path);
    out << "seeded store at " << store_path << ".nt/.reg\n"
        << "namespace: " << store.namespace_uri() << "\n"
        << "properties: " << manifest.properties.size()
        << ", controlled terms: " << manifest.total_controlled_terms() << "\n"
        << "entities: " << store.entity_count() << ", statements: " << store.statement_count()
        << "\n";
    for (const auto& note : manifest.notes) out << "note: " << note << "\n";
    return kOk;
}

int cmd_synth(const std::string& out_path, std::uint64_t seed, std::size_t n,
              std::ostream& out) {
    Store scratch(resolve_namespace());
    VocabularyManifest manifest = seed_rtms_vocabulary(scratch);
    auto records = generate_synthetic_corpus(manifest, seed, n);
    emit(out, out_path, corpus_to_csv(records, manifest));
    if (!out_path.empty() && out_path != "-") {
        out << "wrote " << records.size() << " synthetic records to " << out_path << "\n";
    }
    return kOk;
}

int cmd_ingest(const std::string& store_path, const std::string& csv_path,
               const std::string& map_path, std::ostream& out) {
    LoadedStore loaded = load_with_schema(store_path);
    ColumnMapping mapping = map_path.empty()
                                ? identity_mapping(loaded.manifest)
                                : parse_mapping(read_file(map_path), loaded.manifest);
    auto records = parse_csv(read_file(csv_path), mapping);
    IngestSummary summary = ingest_corpus(*loaded.store, loaded.manifest, loaded.tmpl, records);
    save_snapshot(*loaded.store, store_path);
    out << summary.to_text();
    return summary.with_violations > 0 ? kViolations : kOk;
}

int cmd_validate(const std::string& store_path, const std::string& contribution,
                 std::ostream& out) {
    LoadedStore loaded = load_with_schema(store_path);
    std::vector<Iri> targets;
    if (!contribution.empty()) {
        auto rec = loaded.store->entity_by_local_id(contribution);
        if (!rec) rec = loaded.store->entity_by_full_iri(contribution);
        if (!rec) {
            throw Error(ErrorCode::UnknownEntity, "unknown contribution: " + contribution);
        }
        targets.push_back(rec->iri);
    } else {
        targets = all_contributions(*loaded.store, loaded.manifest);
    }
    std::size_t bad = 0;
    for (const auto& target : targets) {
        ValidationReport report = validate(*loaded.store, target, loaded.tmpl);
        if (!report.conforms()) ++bad;
        out << "# " << target.full() << (report.conforms() ? " conforms" : "") << "\n"
            << report.to_lines();
    }
    out << "checked: " << targets.size() << ", with violations: " << bad << "\n";
    return bad > 0 ? kViolations : kOk;
}

int cmd_export(const std::string& store_path, const std::string& format,
               const std::string& out_path, bool no_labels, std::ostream& out) {
    LoadedStore loaded = load_with_schema(store_path);
    SerializationOptions opts;
    opts.include_labels = !no_labels;
    if (format == "nt") {
        opts.format = RdfFormat::NTriples;
    } else if (format == "ttl") {
        opts.format = RdfFormat::Turtle;
        const std::string& ns = loaded.store->namespace_uri();
        opts.prefix_map = {{"nibsr", ns + "/resource/"},
                           {"nibsp", ns + "/property/"},
                           {"nibsc", ns + "/class/"},
                           {"nibst", ns + "/template/"},
                           {"xsd", "http://www.w3.org/2001/XMLSchema#"}};
    } else {
        throw Error(ErrorCode::MappingError, "unknown export format: " + format);
    }
    emit(out, out_path, serialize(*loaded.store, opts));
    return kOk;
}

int cmd_query(const std::string& store_path, const std::string& text_arg,
              const std::string& file_arg, const std::string& out_format, std::ostream& out) {
    LoadedStore loaded = load_with_schema(store_path);
    std::string text = !file_arg.empty() ? read_file(file_arg) : text_arg;
    SelectQuery query = parse_query(text);
    ResultTable table = execute(*loaded.store, query);
    if (out_format == "json") {
        out << result_to_json(table);
    } else if (out_format == "csv") {
        out << result_to_csv(table);
    } else {
        throw Error(ErrorCode::MappingError, "unknown result format: " + out_format);
    }
    return kOk;
}

int cmd_compare(const std::string& store_path, std::size_t chunk_size, const std::string& mode,
                const std::string& format, const std::string& out_dir, std::ostream& out) {
    LoadedStore loaded = load_with_schema(store_path);
    ComparisonFormat fmt = parse_comparison_format(format);
    auto contributions = all_contributions(*loaded.store, loaded.manifest);
    auto parts = chunk_comparisons(*loaded.store, loaded.manifest, loaded.tmpl, contributions,
                                   chunk_size, parse_mode(mode));
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create directory: " + out_dir);
    for (const auto& part : parts) {
        std::string name = "comparison_part_" + std::to_string(part.part_index->first) + "_of_" +
                           std::to_string(part.part_index->second) + "." +
                           format_extension(fmt);
        std::string path = out_dir + "/" + name;
        write_file(path, export_comparison(part, fmt));
        out << "part " << part.part_index->first << "/" << part.part_index->second << ": "
            << part.contributions.size() << " contribution(s), " << part.rows.size()
            << " row(s) -> " << path << "\n";
    }
    out << "parts: " << parts.size() << "\n";
    return kOk;
}

int cmd_publish(const std::string& store_path, std::size_t part, std::size_t chunk_size,
                const std::string& mode, const PublicationMetadata& metadata, std::ostream& out) {
    LoadedStore loaded = load_with_schema(store_path);
    auto contributions = all_contributions(*loaded.store, loaded.manifest);
    auto parts = chunk_comparisons(*loaded.store, loaded.manifest, loaded.tmpl, contributions,
                                   chunk_size, parse_mode(mode));
    if (part < 1 || part > parts.size()) {
        throw Error(ErrorCode::MappingError,
                    "part " + std::to_string(part) + " out of range (have " +
                        std::to_string(parts.size()) + ")");
    }
    PublicationRegistry registry = PublicationRegistry::load_or_empty(pubs_path(store_path));
    PublicationRecord record = registry.publish(parts[part - 1], metadata);
    registry.save(pubs_path(store_path));
    out << PublicationRegistry::record_to_json(record);
    return kOk;
}

int cmd_serve(const std::string& store_path, const std::string& addr, std::ostream& out) {
    std::shared_ptr<const Store> store = load_snapshot_files(store_path, resolve_namespace());
    auto registry = std::make_shared<PublicationRegistry>(
        PublicationRegistry::load_or_empty(pubs_path(store_path)));

    std::string host = addr;
    int port = 8080;
    std::size_t colon = addr.rfind(':');
    if (colon != std::string::npos) {
        host = addr.substr(0, colon);
        try {
            port = std::stoi(addr.substr(colon + 1));
        } catch (...) {
            throw Error(ErrorCode::MappingError, "bad address: " + addr);
        }
    }
    FairService service(store, registry);
    service.start(host, port);
    out << "serving http://" << host << ":" << service.port() << "\n" << std::flush;
    service.wait();
    return kOk;
}

int cmd_fair_report(const std::string& store_path, std::ostream& out) {
    std::unique_ptr<Store> store = load_snapshot_files(store_path, resolve_namespace());
    PublicationRegistry registry = PublicationRegistry::load_or_empty(pubs_path(store_path));
    out << fair_report(*store, registry).to_json();
    return kOk;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"FAIR semantic publishing engine for rTMS dose studies", "nibskg"};
    app.require_subcommand(1);

    std::string store_path;
    std::string csv_path;
    std::string map_path;
    std::string out_path;
    std::string out_dir;
    std::string format = "nt";
    std::string result_format = "csv";
    std::string comparison_format = "csv";
    std::string mode = "union";
    std::string query_text;
    std::string query_file;
    std::string contribution;
    std::string addr = "127.0.0.1:8080";
    std::uint64_t seed_value = 1;
    std::size_t n_records = 0;
    std::size_t chunk_size = 100;
    std::size_t part = 1;
    bool no_labels = false;
    PublicationMetadata metadata;
    metadata.creator = "nibs-kg curator";
    std::string predecessor;

    auto* seed_cmd = app.add_subcommand("seed", "initialize a store with the dose vocabulary");
    seed_cmd->add_option("--store", store_path, "snapshot base path")->required();

    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic study corpus as CSV");
    synth_cmd->add_option("--seed", seed_value, "random seed");
    synth_cmd->add_option("--n", n_records, "number of records")->required();
    synth_cmd->add_option("--out", out_path, "output CSV path ('-' for stdout)")->required();

    auto* ingest_cmd = app.add_subcommand("ingest", "ingest a CSV corpus into a store");
    ingest_cmd->add_option("--csv", csv_path, "input CSV")->required();
    ingest_cmd->add_option("--map", map_path, "column mapping file");
    ingest_cmd->add_option("--store", store_path, "snapshot base path")->required();

    auto* validate_cmd = app.add_subcommand("validate", "validate contributions against the template");
    validate_cmd->add_option("--store", store_path, "snapshot base path")->required();
    validate_cmd->add_option("--contribution", contribution, "single contribution id or IRI");

    auto* export_cmd = app.add_subcommand("export", "serialize the store as RDF");
    export_cmd->add_option("--store", store_path, "snapshot base path")->required();
    export_cmd->add_option("--format", format, "nt|ttl")->required();
    export_cmd->add_option("--out", out_path, "output path (default stdout)");
    export_cmd->add_flag("--no-labels", no_labels, "omit label triples");

    auto* query_cmd = app.add_subcommand("query", "run a SELECT query");
    query_cmd->add_option("--store", store_path, "snapshot base path")->required();
    auto* text_opt = query_cmd->add_option("--text", query_text, "query text");
    query_cmd->add_option("--file", query_file, "query file")->excludes(text_opt);
    query_cmd->add_option("--out", result_format, "csv|json");

    auto* compare_cmd = app.add_subcommand("compare", "build chunked comparison tables");
    compare_cmd->add_option("--store", store_path, "snapshot base path")->required();
    compare_cmd->add_option("--chunk-size", chunk_size, "contributions per part");
    compare_cmd->add_option("--out", out_dir, "output directory")->required();
    compare_cmd->add_option("--format", comparison_format, "csv|json|md");
    compare_cmd->add_option("--mode", mode, "union|intersection");

    auto* publish_cmd = app.add_subcommand("publish", "publish one comparison part");
    publish_cmd->add_option("--store", store_path, "snapshot base path")->required();
    publish_cmd->add_option("--part", part, "1-based part index")->required();
    publish_cmd->add_option("--chunk-size", chunk_size, "contributions per part");
    publish_cmd->add_option("--mode", mode, "union|intersection");
    publish_cmd->add_option("--title", metadata.title, "publication title")->required();
    publish_cmd->add_option("--license", metadata.license, "license tag")->required();
    publish_cmd->add_option("--creator", metadata.creator, "creator");
    publish_cmd->add_option("--description", metadata.description, "description");
    publish_cmd->add_option("--predecessor", predecessor, "predecessor publication id");

    auto* serve_cmd = app.add_subcommand("serve", "serve the store over HTTP");
    serve_cmd->add_option("--store", store_path, "snapshot base path")->required();
    serve_cmd->add_option("--addr", addr, "host:port");

    auto* fair_cmd = app.add_subcommand("fair-report", "audit the four FAIR principles");
    fair_cmd->add_option("--store", store_path, "snapshot base path")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n" << app.help();
        return kUsage;
    }

    try {
        if (seed_cmd->parsed()) return cmd_seed(store_path, out);
        if (synth_cmd->parsed()) return cmd_synth(out_path, seed_value, n_records, out);
        if (ingest_cmd->parsed()) return cmd_ingest(store_path, csv_path, map_path, out);
        if (validate_cmd->parsed()) return cmd_validate(store_path, contribution, out);
        if (export_cmd->parsed()) return cmd_export(store_path, format, out_path, no_labels, out);
        if (query_cmd->parsed()) {
            if (query_text.empty() && query_file.empty()) {
                throw Error(ErrorCode::MappingError, "query needs --text or --file");
            }
            return cmd_query(store_path, query_text, query_file, result_format, out);
        }
        if (compare_cmd->parsed()) {
            return cmd_compare(store_path, chunk_size, mode, comparison_format, out_dir, out);
        }
        if (publish_cmd->parsed()) {
            if (!predecessor.empty()) metadata.predecessor_id = predecessor;
            return cmd_publish(store_path, part, chunk_size, mode, metadata, out);
        }
        if (serve_cmd->parsed()) return cmd_serve(store_path, addr, out);
        if (fair_cmd->parsed()) return cmd_fair_report(store_path, out);
        err << app.help();
        return kUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }
}

} // namespace nibskg
