#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "nibskg/cli.hpp"
#include "nibskg/comparison.hpp"
#include "nibskg/fair.hpp"
#include "nibskg/ingest.hpp"
#include "nibskg/query.hpp"
#include "nibskg/rdf_io.hpp"
#include "nibskg/service.hpp"
#include "nibskg/store.hpp"
#include "nibskg/template_engine.hpp"
#include "nibskg/vocabulary.hpp"

namespace py = pybind11;
using namespace nibskg;

namespace {

const char* datatype_name(Datatype dt) {
    switch (dt) {
        case Datatype::String: return "string";
        case Datatype::Integer: return "integer";
        case Datatype::Decimal: return "decimal";
        case Datatype::Boolean: return "boolean";
    }
    return "";
}

Datatype datatype_from_name(const std::string& name) {
    if (name == "string") return Datatype::String;
    if (name == "integer") return Datatype::Integer;
    if (name == "decimal") return Datatype::Decimal;
    if (name == "boolean") return Datatype::Boolean;
    throw Error(ErrorCode::InvalidLabel, "unknown datatype: " + name);
}

SerializationOptions options_from_args(const std::string& format, bool sort, bool include_labels,
                                       const std::map<std::string, std::string>& prefixes) {
    SerializationOptions opts;
    if (format == "ntriples" || format == "nt") {
        opts.format = RdfFormat::NTriples;
    } else if (format == "turtle" || format == "ttl") {
        opts.format = RdfFormat::Turtle;
    } else {
        throw Error(ErrorCode::MappingError, "unknown format: " + format);
    }
    opts.sort = sort;
    opts.include_labels = include_labels;
    opts.prefix_map = prefixes;
    return opts;
}

} // namespace

PYBIND11_MODULE(nibskg, m) {
    m.doc() = "FAIR semantic publishing engine for rTMS dose studies";

    py::register_exception<Error>(m, "EngineError");

    py::enum_<EntityKind>(m, "EntityKind")
        .value("Resource", EntityKind::Resource)
        .value("Property", EntityKind::Property)
        .value("Class", EntityKind::Class)
        .value("Template", EntityKind::Template);

    py::class_<Iri>(m, "Iri")
        .def_static("external", &Iri::external, py::arg("absolute"))
        .def_property_readonly("full", &Iri::full)
        .def_property_readonly("local_id", &Iri::local_id)
        .def_property_readonly("is_external", &Iri::is_external)
        .def("__str__", &Iri::full)
        .def("__repr__", [](const Iri& iri) { return "<Iri " + iri.full() + ">"; })
        .def("__eq__", [](const Iri& a, const Iri& b) { return a == b; })
        .def("__hash__", [](const Iri& iri) { return py::hash(py::str(iri.full())); });

    py::class_<Literal>(m, "Literal")
        .def_static("string",
                    [](const std::string& lexical, const std::optional<std::string>& lang) {
                        return Literal::string(lexical, lang);
                    },
                    py::arg("lexical"), py::arg("lang") = std::nullopt)
        .def_static("integer", [](long long value) { return Literal::integer(value); })
        .def_static("decimal", [](const std::string& lexical) { return Literal::decimal(lexical); })
        .def_static("boolean", &Literal::boolean)
        .def_static("make",
                    [](const std::string& lexical, const std::string& datatype,
                       const std::optional<std::string>& lang) {
                        return Literal::make(lexical, datatype_from_name(datatype), lang);
                    },
                    py::arg("lexical"), py::arg("datatype"), py::arg("lang") = std::nullopt)
        .def_property_readonly("lexical", &Literal::lexical)
        .def_property_readonly("datatype",
                               [](const Literal& lit) { return datatype_name(lit.datatype()); })
        .def_property_readonly("lang", [](const Literal& lit) { return lit.lang(); })
        .def("__repr__", [](const Literal& lit) {
            return "<Literal \"" + lit.lexical() + "\" " + datatype_name(lit.datatype()) + ">";
        });

    py::class_<Term>(m, "Term")
        .def(py::init<Iri>())
        .def(py::init<Literal>())
        .def_property_readonly("is_iri", &Term::is_iri)
        .def_property_readonly("iri", [](const Term& t) { return t.iri(); })
        .def_property_readonly("literal", [](const Term& t) { return t.literal(); })
        .def("__eq__", [](const Term& a, const Term& b) { return a == b; })
        .def("__repr__", [](const Term& t) {
            return t.is_iri() ? "<Term iri=" + t.iri().full() + ">"
                              : "<Term literal=\"" + t.literal().lexical() + "\">";
        });

    py::class_<Statement>(m, "Statement")
        .def_readonly("id", &Statement::id)
        .def_readonly("subject", &Statement::subject)
        .def_readonly("predicate", &Statement::predicate)
        .def_readonly("object", &Statement::object);

    py::class_<EntityRecord>(m, "EntityRecord")
        .def_readonly("iri", &EntityRecord::iri)
        .def_readonly("kind", &EntityRecord::kind)
        .def_readonly("label", &EntityRecord::label)
        .def_readonly("external", &EntityRecord::external)
        .def_readonly("classes", &EntityRecord::classes);

    py::class_<EntityDescription>(m, "EntityDescription")
        .def_readonly("iri", &EntityDescription::iri)
        .def_readonly("kind", &EntityDescription::kind)
        .def_readonly("label", &EntityDescription::label)
        .def_readonly("classes", &EntityDescription::classes)
        .def_readonly("statements", &EntityDescription::statements);

    py::class_<Store, std::shared_ptr<Store>>(m, "Store")
        .def(py::init<std::string>(), py::arg("namespace_uri"))
        .def_property_readonly("namespace_uri", &Store::namespace_uri)
        .def("mint_entity", &Store::mint_entity, py::arg("kind"), py::arg("label"),
             py::arg("explicit_id") = std::nullopt)
        .def("register_external", &Store::register_external, py::arg("absolute_iri"),
             py::arg("label") = "")
        .def("add_statement", &Store::add_statement)
        .def("statements_matching", &Store::statements_matching,
             py::arg("subject") = std::nullopt, py::arg("predicate") = std::nullopt,
             py::arg("object") = std::nullopt)
        .def("all_statements", &Store::all_statements)
        .def("resolve", &Store::resolve)
        .def("resolve_local", &Store::resolve_local)
        .def("has_entity", &Store::has_entity)
        .def("entity", &Store::entity)
        .def("entity_by_local_id", &Store::entity_by_local_id)
        .def("entities", &Store::entities)
        .def("find_by_label", &Store::find_by_label)
        .def("members_of", &Store::members_of)
        .def_property_readonly("entity_count", &Store::entity_count)
        .def_property_readonly("statement_count", &Store::statement_count);

    py::class_<ControlledTerm>(m, "ControlledTerm")
        .def_readonly("label", &ControlledTerm::label)
        .def_readonly("iri", &ControlledTerm::iri)
        .def_readonly("aliases", &ControlledTerm::aliases);

    py::enum_<RangeKind>(m, "RangeKind")
        .value("Controlled", RangeKind::Controlled)
        .value("Decimal", RangeKind::Decimal)
        .value("Integer", RangeKind::Integer)
        .value("String", RangeKind::String);

    py::class_<PropertySpec>(m, "PropertySpec")
        .def_readonly("label", &PropertySpec::label)
        .def_readonly("range", &PropertySpec::range)
        .def_readonly("unit", &PropertySpec::unit)
        .def_readonly("iri", &PropertySpec::iri)
        .def_readonly("terms", &PropertySpec::terms)
        .def_readonly("sub_properties", &PropertySpec::sub_properties);

    py::class_<VocabularyManifest>(m, "VocabularyManifest")
        .def_readonly("properties", &VocabularyManifest::properties)
        .def_readonly("same_as", &VocabularyManifest::same_as)
        .def_readonly("has_contribution", &VocabularyManifest::has_contribution)
        .def_readonly("contribution_class", &VocabularyManifest::contribution_class)
        .def_readonly("paper_class", &VocabularyManifest::paper_class)
        .def_readonly("notes", &VocabularyManifest::notes)
        .def("find_property",
             [](const VocabularyManifest& manifest, const std::string& raw) {
                 const PropertySpec* spec = manifest.find_property(raw);
                 return spec ? std::optional<PropertySpec>(*spec) : std::nullopt;
             })
        .def("total_controlled_terms", &VocabularyManifest::total_controlled_terms);

    m.def("seed_rtms_vocabulary", [](std::shared_ptr<Store> store) {
        return seed_rtms_vocabulary(*store);
    });

    py::class_<LookupResult>(m, "LookupResult")
        .def_property_readonly("status",
                               [](const LookupResult& r) {
                                   switch (r.status) {
                                       case LookupResult::Status::Match: return "match";
                                       case LookupResult::Status::NoMatch: return "no_match";
                                       case LookupResult::Status::Ambiguous: return "ambiguous";
                                   }
                                   return "";
                               })
        .def_property_readonly("term", [](const LookupResult& r) { return r.term; })
        .def_readonly("candidates", &LookupResult::candidates)
        .def_property_readonly("matched", &LookupResult::matched);

    m.def("lookup_term", &lookup_term);
    m.def("same_as_link", [](std::shared_ptr<Store> store, const VocabularyManifest& manifest,
                             const Iri& local, const std::string& external) {
        return same_as_link(*store, manifest, local, external);
    });
    m.def("export_vocabulary_tsv", &export_vocabulary_tsv);
    m.def("normalize_token", &normalize_token);

    py::class_<PropertyShape>(m, "PropertyShape")
        .def_readonly("property", &PropertyShape::property)
        .def_readonly("label", &PropertyShape::label)
        .def_readonly("range", &PropertyShape::range)
        .def_readonly("min_count", &PropertyShape::min_count)
        .def_readonly("max_count", &PropertyShape::max_count)
        .def_readonly("sub_shapes", &PropertyShape::sub_shapes)
        .def_property_readonly("required", &PropertyShape::required);

    py::class_<Template>(m, "Template")
        .def_readonly("iri", &Template::iri)
        .def_readonly("label", &Template::label)
        .def_readonly("target_class", &Template::target_class)
        .def_readonly("shapes", &Template::shapes);

    m.def("define_rtms_template", [](std::shared_ptr<Store> store,
                                     const VocabularyManifest& manifest) {
        return define_rtms_template(*store, manifest);
    });

    py::class_<Violation>(m, "Violation")
        .def_readonly("shape_label", &Violation::shape_label)
        .def_property_readonly("code",
                               [](const Violation& v) { return violation_code_name(v.code); })
        .def_readonly("detail", &Violation::detail);

    py::class_<ValidationInfo>(m, "ValidationInfo")
        .def_readonly("detail", &ValidationInfo::detail);

    py::class_<ValidationReport>(m, "ValidationReport")
        .def_readonly("contribution", &ValidationReport::contribution)
        .def_readonly("violations", &ValidationReport::violations)
        .def_readonly("infos", &ValidationReport::infos)
        .def_property_readonly("conforms", &ValidationReport::conforms)
        .def("to_lines", &ValidationReport::to_lines);

    m.def("validate", [](std::shared_ptr<const Store> store, const Iri& contribution,
                         const Template& tmpl) { return validate(*store, contribution, tmpl); });

    py::class_<StudyRecord>(m, "StudyRecord")
        .def(py::init<>())
        .def_readwrite("title", &StudyRecord::title)
        .def_readwrite("doi", &StudyRecord::doi)
        .def_readwrite("year", &StudyRecord::year)
        .def_readwrite("first_author", &StudyRecord::first_author)
        .def_readwrite("values", &StudyRecord::values);

    py::class_<Contribution>(m, "Contribution")
        .def_readonly("iri", &Contribution::iri)
        .def_readonly("paper_iri", &Contribution::paper_iri)
        .def_readonly("statement_ordinals", &Contribution::statement_ordinals);

    py::class_<IngestSummary>(m, "IngestSummary")
        .def_readonly("total", &IngestSummary::total)
        .def_readonly("conforming", &IngestSummary::conforming)
        .def_readonly("with_violations", &IngestSummary::with_violations)
        .def_readonly("unresolved_tokens", &IngestSummary::unresolved_tokens)
        .def("to_text", &IngestSummary::to_text);

    py::class_<ColumnMapping>(m, "ColumnMapping");
    m.def("parse_mapping", &parse_mapping);
    m.def("identity_mapping", &identity_mapping);
    m.def("parse_csv", [](const std::string& text, const ColumnMapping& mapping) {
        return parse_csv(text, mapping);
    });
    m.def("record_to_contribution",
          [](std::shared_ptr<Store> store, const VocabularyManifest& manifest,
             const Template& tmpl, const StudyRecord& record) {
              return record_to_contribution(*store, manifest, tmpl, record);
          });
    m.def("ingest_corpus", [](std::shared_ptr<Store> store, const VocabularyManifest& manifest,
                              const Template& tmpl, const std::vector<StudyRecord>& records) {
        std::vector<Contribution> contributions;
        IngestSummary summary = ingest_corpus(*store, manifest, tmpl, records, &contributions);
        return py::make_tuple(summary, contributions);
    });
    m.def("generate_synthetic_corpus", &generate_synthetic_corpus);
    m.def("corpus_to_csv", &corpus_to_csv);

    py::class_<ParsedTerm>(m, "ParsedTerm")
        .def_readonly("is_iri", &ParsedTerm::is_iri)
        .def_readonly("iri", &ParsedTerm::iri)
        .def_readonly("literal", &ParsedTerm::literal);

    py::class_<ParsedTriple>(m, "ParsedTriple")
        .def_readonly("subject", &ParsedTriple::subject)
        .def_readonly("predicate", &ParsedTriple::predicate)
        .def_readonly("object", &ParsedTriple::object);

    m.def("serialize",
          [](std::shared_ptr<const Store> store, const std::string& format, bool sort,
             bool include_labels, const std::map<std::string, std::string>& prefixes) {
              return serialize(*store, options_from_args(format, sort, include_labels, prefixes));
          },
          py::arg("store"), py::arg("format") = "ntriples", py::arg("sort") = true,
          py::arg("include_labels") = false,
          py::arg("prefixes") = std::map<std::string, std::string>{});
    m.def("parse_ntriples", &parse_ntriples);
    m.def("save_snapshot", [](std::shared_ptr<const Store> store, const std::string& base) {
        save_snapshot(*store, base);
    });
    m.def("load_snapshot",
          [](const std::string& nt, const std::string& reg, const std::string& ns) {
              return std::shared_ptr<Store>(load_snapshot(nt, reg, ns));
          });
    m.def("load_snapshot_files", [](const std::string& base, const std::string& ns) {
        return std::shared_ptr<Store>(load_snapshot_files(base, ns));
    });

    py::class_<SelectQuery>(m, "SelectQuery")
        .def_readonly("projection", &SelectQuery::projection)
        .def_readonly("distinct", &SelectQuery::distinct)
        .def_readonly("limit", &SelectQuery::limit);

    py::class_<ResultTable>(m, "ResultTable")
        .def_readonly("header", &ResultTable::header)
        .def_readonly("rows", &ResultTable::rows);

    m.def("parse_query", &parse_query);
    m.def("execute", [](std::shared_ptr<const Store> store, const SelectQuery& query) {
        return execute(*store, query);
    });
    m.def("query_text", [](std::shared_ptr<const Store> store, const std::string& text) {
        return execute(*store, parse_query(text));
    });
    m.def("result_to_csv", &result_to_csv);
    m.def("result_to_json", &result_to_json);

    py::enum_<PropertyMode>(m, "PropertyMode")
        .value("Union", PropertyMode::Union)
        .value("Intersection", PropertyMode::Intersection);

    py::class_<ComparisonRow>(m, "ComparisonRow")
        .def_readonly("property_label", &ComparisonRow::property_label)
        .def_readonly("cells", &ComparisonRow::cells);

    py::class_<ComparisonTable>(m, "ComparisonTable")
        .def_readonly("id", &ComparisonTable::id)
        .def_readonly("version", &ComparisonTable::version)
        .def_readonly("created_at", &ComparisonTable::created_at)
        .def_readonly("contributions", &ComparisonTable::contributions)
        .def_readonly("rows", &ComparisonTable::rows)
        .def_readonly("part_index", &ComparisonTable::part_index);

    m.def("build_comparison",
          [](std::shared_ptr<const Store> store, const VocabularyManifest& manifest,
             const Template& tmpl, const std::vector<Iri>& contributions, PropertyMode mode) {
              return build_comparison(*store, manifest, tmpl, contributions, mode);
          });
    m.def("chunk_comparisons",
          [](std::shared_ptr<const Store> store, const VocabularyManifest& manifest,
             const Template& tmpl, const std::vector<Iri>& contributions, std::size_t chunk_size,
             PropertyMode mode) {
              return chunk_comparisons(*store, manifest, tmpl, contributions, chunk_size, mode);
          },
          py::arg("store"), py::arg("manifest"), py::arg("template"), py::arg("contributions"),
          py::arg("chunk_size") = 100, py::arg("mode") = PropertyMode::Union);
    m.def("export_comparison", [](const ComparisonTable& table, const std::string& format) {
        if (format == "csv") return export_comparison(table, ComparisonFormat::Csv);
        if (format == "json") return export_comparison(table, ComparisonFormat::Json);
        if (format == "md") return export_comparison(table, ComparisonFormat::Markdown);
        throw Error(ErrorCode::MappingError, "unknown comparison format: " + format);
    });

    py::class_<PublicationMetadata>(m, "PublicationMetadata")
        .def(py::init<>())
        .def_readwrite("title", &PublicationMetadata::title)
        .def_readwrite("description", &PublicationMetadata::description)
        .def_readwrite("creator", &PublicationMetadata::creator)
        .def_readwrite("license", &PublicationMetadata::license)
        .def_readwrite("predecessor_id", &PublicationMetadata::predecessor_id);

    py::class_<PublicationRecord>(m, "PublicationRecord")
        .def_readonly("id", &PublicationRecord::id)
        .def_readonly("version", &PublicationRecord::version)
        .def_readonly("predecessor_id", &PublicationRecord::predecessor_id)
        .def_readonly("title", &PublicationRecord::title)
        .def_readonly("creator", &PublicationRecord::creator)
        .def_readonly("license", &PublicationRecord::license)
        .def_readonly("created_at", &PublicationRecord::created_at)
        .def_readonly("snapshot", &PublicationRecord::snapshot);

    py::class_<PublicationRegistry, std::shared_ptr<PublicationRegistry>>(m,
                                                                          "PublicationRegistry")
        .def(py::init<>([]() { return std::make_shared<PublicationRegistry>(); }))
        .def("publish", &PublicationRegistry::publish)
        .def_property_readonly("records",
                               [](const PublicationRegistry& r) { return r.records(); })
        .def("to_json", &PublicationRegistry::to_json)
        .def("save", &PublicationRegistry::save)
        .def_static("load_or_empty", [](const std::string& path) {
            return std::make_shared<PublicationRegistry>(
                PublicationRegistry::load_or_empty(path));
        });

    py::class_<FairCheck>(m, "FairCheck")
        .def_readonly("pass_", &FairCheck::pass)
        .def_readonly("evidence", &FairCheck::evidence);

    py::class_<FairReport>(m, "FairReport")
        .def_readonly("findable", &FairReport::findable)
        .def_readonly("accessible", &FairReport::accessible)
        .def_readonly("interoperable", &FairReport::interoperable)
        .def_readonly("reusable", &FairReport::reusable)
        .def("all_pass", &FairReport::all_pass)
        .def("to_json", &FairReport::to_json);

    m.def("fair_report", [](std::shared_ptr<const Store> store,
                            std::shared_ptr<const PublicationRegistry> registry) {
        return fair_report(*store, *registry);
    });

    py::class_<FairService>(m, "FairService")
        .def(py::init<>([](std::shared_ptr<const Store> store,
                           std::shared_ptr<const PublicationRegistry> registry) {
                 return new FairService(std::move(store), std::move(registry));
             }),
             py::arg("store"), py::arg("registry"))
        .def("start", &FairService::start, py::arg("host") = "127.0.0.1", py::arg("port") = 0)
        .def("stop", &FairService::stop)
        .def_property_readonly("port", &FairService::port);

    m.def("run_cli", [](const std::vector<std::string>& args) {
        std::ostringstream out;
        std::ostringstream err;
        int code = run_cli(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
    });

    m.def("minimal_decimal_lexical", &minimal_decimal_lexical);
    m.def("escape_ntriples", &escape_ntriples);
}
