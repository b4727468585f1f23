#include "nibskg/vocabulary.hpp"

#include <algorithm>
#include <cctype>

namespace nibskg {

std::string normalize_token(const std::string& raw) {
    std::string out;
    out.reserve(raw.size());
    bool pending_sep = false;
    for (char ch : raw) {
        if (ch == ' ' || ch == '-' || ch == '_') {
            pending_sep = !out.empty();
            continue;
        }
        if (pending_sep) {
            out.push_back(' ');
            pending_sep = false;
        }
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    }
    return out;
}

namespace {

struct TermList {
    const char* const* labels;
    std::size_t count;
};

constexpr const char* kTypeOfRtms[] = {"rTMS", "iTBS", "cTBS", "QPS"};
constexpr const char* kIntensityApproach[] = {"AMT", "RMT", "MT", "FL", "PT", "FXD", "EF"};
constexpr const char* kThresholdEstimation[] = {"ML", "5STEP", "TH", "MLTH", "PEST", "MTAT"};
constexpr const char* kThresholdMeasurement[] = {"E", "V"};
constexpr const char* kStimulatorCompany[] = {
    "Cad", "MedDan", "MagSti", "NeoNet", "NeuNet", "MagVen", "NexSti",
    "MagMor", "Yir", "BraSwa", "DeyDia", "YunTec", "NeuSof"};
constexpr const char* kStimulatorModel[] = {
    "HS",   "MP",     "MES10",   "R",      "SR",    "SR2",   "NP",    "16E05",
    "200",  "200 2",  "MLR25",   "200 BI", "QP500", "HF",    "MP30",  "MPX100",
    "2100CRS", "MP100", "R2",    "MPR30",  "NBS",   "PM100", "CCYI",  "CCYIA",
    "DMXT", "NS",     "Sys4.3",  "R2P1",   "N-MS/D", "MPC",  "MS/D"};
constexpr const char* kCoilShape[] = {"F8", "R", "F8-D", "D"};
constexpr const char* kCoilModel[] = {
    "MC125",    "MC-125",  "MC-B70", "MCF-B70", "MCF-B-65", "MCF-B65", "WC",
    "AC",       "DC",      "PN9925", "992500",  "C-B60",    "FC",      "FC-B70",
    "HP",       "Cool B65", "cool-B65", "Cool-DB80", "Cool B56", "H-ADD", "H",
    "H1",       "AF",      "DB-80",  "B65",     "MMC-140",  "70BF-Cool"};

struct PropertyDef {
    const char* label;
    RangeKind range;
    const char* unit; // nullptr when unitless
    TermList terms;   // empty for non-controlled
    const char* extra_alias;
};

constexpr PropertyDef kDoseProperties[] = {
    {"Type of rTMS", RangeKind::Controlled, nullptr, {kTypeOfRtms, 4}, nullptr},
    {"Intrabust Frequency", RangeKind::Decimal, "Hz", {nullptr, 0}, "intraburst frequency"},
    {"Stimulation Intensity Selection Approach", RangeKind::Controlled, nullptr,
     {kIntensityApproach, 7}, nullptr},
    {"Threshold-estimation strategies", RangeKind::Controlled, nullptr,
     {kThresholdEstimation, 6}, nullptr},
    {"Threshold Measurement", RangeKind::Controlled, nullptr, {kThresholdMeasurement, 2}, nullptr},
    {"Amplitude of the Motor Evoked Potential", RangeKind::Decimal, "mV", {nullptr, 0}, nullptr},
    {"Threshold Ratio", RangeKind::Decimal, nullptr, {nullptr, 0}, nullptr},
    {"Percentage or the Amplitude of the Motor Threshold Contraction", RangeKind::Decimal, "%",
     {nullptr, 0}, nullptr},
    {"Percent of Stimulation Intensity", RangeKind::Decimal, "%", {nullptr, 0}, nullptr},
    {"Maximum Stimulator Output", RangeKind::Decimal, "%", {nullptr, 0}, nullptr},
    {"Stimulator Company", RangeKind::Controlled, nullptr, {kStimulatorCompany, 13}, nullptr},
    {"Stimulator Model", RangeKind::Controlled, nullptr, {kStimulatorModel, 31}, nullptr},
    {"Coil Shape", RangeKind::Controlled, nullptr, {kCoilShape, 4}, nullptr},
    {"Coil Size", RangeKind::Decimal, "mm", {nullptr, 0}, nullptr},
    {"Coil Model", RangeKind::Controlled, nullptr, {kCoilModel, 27}, nullptr},
};

constexpr const char* kPercentProperty = "Percent of Stimulation Intensity";
constexpr const char* kPercentMin = "Percent of Stimulation Intensity (Min Value)";
constexpr const char* kPercentMax = "Percent of Stimulation Intensity (Max Value)";

Iri ensure_property(Store& store, const std::string& label) {
    auto found = store.find_by_label(EntityKind::Property, label);
    if (!found.empty()) return found.front();
    return store.mint_entity(EntityKind::Property, label);
}

Iri ensure_class(Store& store, const std::string& label) {
    auto found = store.find_by_label(EntityKind::Class, label);
    if (!found.empty()) return found.front();
    return store.mint_entity(EntityKind::Class, label);
}

Iri ensure_term(Store& store, const Iri& option_class, const std::string& label) {
    for (const auto& member : store.members_of(option_class)) {
        auto rec = store.entity(member);
        if (rec && rec->label == label) return member;
    }
    Iri iri = store.mint_entity(EntityKind::Resource, label);
    store.add_statement(iri, *store.instance_of_predicate(), Term(option_class));
    return iri;
}

PropertySpec build_spec(Store& store, const PropertyDef& def) {
    PropertySpec spec;
    spec.label = def.label;
    spec.range = def.range;
    if (def.unit) spec.unit = def.unit;
    if (def.extra_alias) spec.extra_aliases.push_back(normalize_token(def.extra_alias));
    spec.iri = ensure_property(store, spec.label);
    if (def.range == RangeKind::Controlled) {
        spec.option_class = ensure_class(store, spec.label + " option");
        for (std::size_t i = 0; i < def.terms.count; ++i) {
            ControlledTerm term;
            term.label = def.terms.labels[i];
            term.iri = ensure_term(store, spec.option_class, term.label);
            term.aliases.push_back(normalize_token(term.label));
            spec.terms.push_back(std::move(term));
        }
    }
    return spec;
}

} // namespace

const ControlledTerm* PropertySpec::term_by_label(const std::string& term_label) const {
    for (const auto& term : terms) {
        if (term.label == term_label) return &term;
    }
    return nullptr;
}

const PropertySpec* VocabularyManifest::find_property(const std::string& raw) const {
    std::string wanted = normalize_token(raw);
    for (const auto& prop : properties) {
        if (normalize_token(prop.label) == wanted) return &prop;
        for (const auto& alias : prop.extra_aliases) {
            if (alias == wanted) return &prop;
        }
        for (const auto& sub : prop.sub_properties) {
            if (normalize_token(sub.label) == wanted) return &sub;
        }
    }
    return nullptr;
}

const PropertySpec* VocabularyManifest::property_by_iri(const Iri& iri) const {
    for (const auto& prop : properties) {
        if (prop.iri == iri) return &prop;
        for (const auto& sub : prop.sub_properties) {
            if (sub.iri == iri) return &sub;
        }
    }
    return nullptr;
}

const PropertySpec* VocabularyManifest::parent_of(const Iri& sub_property) const {
    for (const auto& prop : properties) {
        for (const auto& sub : prop.sub_properties) {
            if (sub.iri == sub_property) return &prop;
        }
    }
    return nullptr;
}

std::size_t VocabularyManifest::total_controlled_terms() const {
    std::size_t n = 0;
    for (const auto& prop : properties) n += prop.terms.size();
    return n;
}

VocabularyManifest seed_rtms_vocabulary(Store& store) {
    VocabularyManifest manifest;

    manifest.instance_of = ensure_property(store, "instance of");
    store.designate_instance_of(manifest.instance_of);
    manifest.title = ensure_property(store, "title");
    manifest.doi = ensure_property(store, "doi");
    manifest.publication_year = ensure_property(store, "publication year");
    manifest.author = ensure_property(store, "author");
    manifest.has_contribution = ensure_property(store, "has contribution");
    manifest.same_as = ensure_property(store, "same as");
    manifest.template_property = ensure_property(store, "template property");
    manifest.template_target_class = ensure_property(store, "template target class");

    manifest.paper_class = ensure_class(store, "Paper");
    manifest.contribution_class = ensure_class(store, "Contribution");

    for (const auto& def : kDoseProperties) {
        PropertySpec spec = build_spec(store, def);
        if (spec.label == kPercentProperty) {
            for (const char* sub_label : {kPercentMin, kPercentMax}) {
                PropertySpec sub;
                sub.label = sub_label;
                sub.range = RangeKind::Decimal;
                sub.unit = "%";
                sub.iri = ensure_property(store, sub.label);
                spec.sub_properties.push_back(std::move(sub));
            }
        }
        manifest.properties.push_back(std::move(spec));
    }

    manifest.notes.push_back(
        "Unit for 'Amplitude of the Motor Evoked Potential' is recorded as mV; source "
        "tables also circulate with microvolt figures, so ingested values are not rescaled.");
    manifest.notes.push_back(
        "'Intrabust Frequency' is kept as listed; 'intraburst frequency' is accepted as an "
        "alias when resolving column names.");
    return manifest;
}

LookupResult lookup_term(const VocabularyManifest& manifest, const Iri& property,
                         const std::string& raw) {
    const PropertySpec* spec = manifest.property_by_iri(property);
    if (!spec || !spec->is_controlled()) {
        throw Error(ErrorCode::MappingError,
                    "property has no controlled vocabulary: " + property.full());
    }

    LookupResult result;
    for (const auto& term : spec->terms) {
        if (term.label == raw) {
            result.status = LookupResult::Status::Match;
            result.term = term;
            return result;
        }
    }

    std::string wanted = normalize_token(raw);
    for (const auto& term : spec->terms) {
        if (std::find(term.aliases.begin(), term.aliases.end(), wanted) != term.aliases.end()) {
            result.candidates.push_back(term);
        }
    }
    if (result.candidates.size() == 1) {
        result.status = LookupResult::Status::Match;
        result.term = result.candidates.front();
        result.candidates.clear();
    } else if (result.candidates.size() > 1) {
        result.status = LookupResult::Status::Ambiguous;
    }
    return result;
}

std::uint64_t same_as_link(Store& store, const VocabularyManifest& manifest, const Iri& local,
                           const std::string& external) {
    if (!store.has_entity(local)) {
        throw Error(ErrorCode::UnknownEntity, "unknown local entity: " + local.full());
    }
    Iri target = store.register_external(external);
    return store.add_statement(local, manifest.same_as, Term(target));
}

std::string export_vocabulary_tsv(const VocabularyManifest& manifest) {
    std::string out;
    auto emit = [&out](const PropertySpec& prop) {
        out += prop.label + "\t\t" + prop.iri.full() + "\n";
        for (const auto& term : prop.terms) {
            out += prop.label + "\t" + term.label + "\t" + term.iri.full() + "\n";
        }
    };
    for (const auto& prop : manifest.properties) {
        emit(prop);
        for (const auto& sub : prop.sub_properties) emit(sub);
    }
    return out;
}

} // namespace nibskg
