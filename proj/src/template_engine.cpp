#include "nibskg/template_engine.hpp"

#include <algorithm>
#include <map>

namespace nibskg {

namespace {

constexpr const char* kTemplateLabel = "rTMS dose template";

std::string render_value(const Term& term, const Store& store) {
    if (term.is_iri()) {
        auto rec = store.entity(term.iri());
        if (rec && !rec->label.empty()) return rec->label;
        return term.iri().full();
    }
    return term.literal().lexical();
}

PropertyShape shape_from_spec(const PropertySpec& spec) {
    PropertyShape shape;
    shape.property = spec.iri;
    shape.label = spec.label;
    shape.range = spec.range;
    shape.range_class = spec.option_class;
    shape.min_count = 0;
    shape.max_count = 1;
    for (const auto& sub : spec.sub_properties) {
        shape.sub_shapes.push_back(shape_from_spec(sub));
    }
    return shape;
}

bool is_member(const Store& store, const Iri& entity, const Iri& class_iri) {
    auto rec = store.entity(entity);
    if (!rec) return false;
    return std::find(rec->classes.begin(), rec->classes.end(), class_iri) != rec->classes.end();
}

void check_shape(const Store& store, const PropertyShape& shape,
                 const std::map<std::string, std::vector<Term>>& values_by_predicate,
                 ValidationReport& report) {
    static const std::vector<Term> kNone;
    auto it = values_by_predicate.find(shape.property.full());
    const std::vector<Term>& values = (it == values_by_predicate.end()) ? kNone : it->second;

    if (shape.required() && values.empty()) {
        report.violations.push_back({shape.label, ViolationCode::MissingRequired,
                                     "no value for required property '" + shape.label + "'"});
    }

    for (const auto& value : values) {
        switch (shape.range) {
            case RangeKind::Controlled:
                if (!value.is_iri() || !is_member(store, value.iri(), shape.range_class)) {
                    report.violations.push_back(
                        {shape.label, ViolationCode::NotInVocabulary,
                         "value '" + render_value(value, store) +
                             "' is not in the controlled vocabulary of '" + shape.label + "'"});
                }
                break;
            case RangeKind::Decimal:
                if (!value.is_literal() || !value.literal().is_numeric()) {
                    report.violations.push_back(
                        {shape.label, ViolationCode::WrongDatatype,
                         "value '" + render_value(value, store) + "' is not a decimal for '" +
                             shape.label + "'"});
                }
                break;
            case RangeKind::Integer:
                if (!value.is_literal() || value.literal().datatype() != Datatype::Integer) {
                    report.violations.push_back(
                        {shape.label, ViolationCode::WrongDatatype,
                         "value '" + render_value(value, store) + "' is not an integer for '" +
                             shape.label + "'"});
                }
                break;
            case RangeKind::String:
                if (!value.is_literal() || value.literal().datatype() != Datatype::String) {
                    report.violations.push_back(
                        {shape.label, ViolationCode::WrongDatatype,
                         "value '" + render_value(value, store) + "' is not a string for '" +
                             shape.label + "'"});
                }
                break;
        }
    }

    if (shape.max_count && static_cast<int>(values.size()) > *shape.max_count) {
        report.violations.push_back(
            {shape.label, ViolationCode::CardinalityExceeded,
             std::to_string(values.size()) + " values for '" + shape.label + "', at most " +
                 std::to_string(*shape.max_count) + " allowed"});
    }

    for (const auto& sub : shape.sub_shapes) {
        check_shape(store, sub, values_by_predicate, report);
    }
}

void collect_shape_properties(const PropertyShape& shape, std::vector<std::string>& out) {
    out.push_back(shape.property.full());
    for (const auto& sub : shape.sub_shapes) collect_shape_properties(sub, out);
}

} // namespace

const PropertyShape* Template::shape_for(const Iri& property) const {
    for (const auto& shape : shapes) {
        if (shape.property == property) return &shape;
        for (const auto& sub : shape.sub_shapes) {
            if (sub.property == property) return &sub;
        }
    }
    return nullptr;
}

const char* violation_code_name(ViolationCode code) {
    switch (code) {
        case ViolationCode::MissingRequired: return "MissingRequired";
        case ViolationCode::NotInVocabulary: return "NotInVocabulary";
        case ViolationCode::WrongDatatype: return "WrongDatatype";
        case ViolationCode::CardinalityExceeded: return "CardinalityExceeded";
    }
    return "";
}

std::string ValidationReport::to_lines() const {
    std::string out;
    for (const auto& v : violations) {
        out += "VIOLATION\t";
        out += violation_code_name(v.code);
        out += '\t';
        out += v.shape_label;
        out += '\t';
        out += v.detail;
        out += '\n';
    }
    for (const auto& info : infos) {
        out += "INFO\tUnknownExtraProperty\t\t";
        out += info.detail;
        out += '\n';
    }
    return out;
}

Template define_rtms_template(Store& store, const VocabularyManifest& manifest) {
    Template tmpl;
    auto existing = store.find_by_label(EntityKind::Template, kTemplateLabel);
    tmpl.iri = existing.empty() ? store.mint_entity(EntityKind::Template, kTemplateLabel)
                                : existing.front();
    tmpl.label = kTemplateLabel;
    tmpl.target_class = manifest.contribution_class;

    store.add_statement(tmpl.iri, manifest.template_target_class, Term(tmpl.target_class));
    for (const auto& spec : manifest.properties) {
        store.add_statement(tmpl.iri, manifest.template_property, Term(spec.iri));
        tmpl.shapes.push_back(shape_from_spec(spec));
    }
    if (!tmpl.shapes.empty() && tmpl.shapes.front().label == "Type of rTMS") {
        tmpl.shapes.front().min_count = 1;
    }
    return tmpl;
}

ValidationReport validate(const Store& store, const Iri& contribution, const Template& tmpl) {
    if (!store.has_entity(contribution)) {
        throw Error(ErrorCode::UnknownEntity, "unknown contribution: " + contribution.full());
    }

    ValidationReport report;
    report.contribution = contribution;

    std::map<std::string, std::vector<Term>> values_by_predicate;
    std::map<std::string, Iri> predicate_iris;
    for (const auto& st : store.statements_matching(contribution, std::nullopt, std::nullopt)) {
        values_by_predicate[st.predicate.full()].push_back(st.object);
        predicate_iris.emplace(st.predicate.full(), st.predicate);
    }

    for (const auto& shape : tmpl.shapes) {
        check_shape(store, shape, values_by_predicate, report);
    }

    std::vector<std::string> covered;
    for (const auto& shape : tmpl.shapes) collect_shape_properties(shape, covered);
    auto instance_of = store.instance_of_predicate();
    for (const auto& [predicate_full, values] : values_by_predicate) {
        if (std::find(covered.begin(), covered.end(), predicate_full) != covered.end()) continue;
        if (instance_of && predicate_full == instance_of->full()) continue;
        auto rec = store.entity(predicate_iris.at(predicate_full));
        std::string name = rec ? rec->label : predicate_full;
        report.infos.push_back({"property '" + name + "' (" + std::to_string(values.size()) +
                                " value(s)) is outside the template"});
    }
    return report;
}

} // namespace nibskg
