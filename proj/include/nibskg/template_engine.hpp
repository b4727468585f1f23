#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nibskg/store.hpp"
#include "nibskg/vocabulary.hpp"

namespace nibskg {

struct PropertyShape {
    Iri property;
    std::string label;
    RangeKind range = RangeKind::String;
    Iri range_class; // controlled ranges only
    int min_count = 0;
    std::optional<int> max_count = 1; // nullopt = unbounded
    std::vector<PropertyShape> sub_shapes;

    bool required() const { return min_count >= 1; }
};

struct Template {
    Iri iri;
    std::string label;
    Iri target_class;
    std::vector<PropertyShape> shapes;

    const PropertyShape* shape_for(const Iri& property) const;
};

enum class ViolationCode { MissingRequired, NotInVocabulary, WrongDatatype, CardinalityExceeded };

const char* violation_code_name(ViolationCode code);

struct Violation {
    std::string shape_label; // empty when not tied to a shape
    ViolationCode code = ViolationCode::MissingRequired;
    std::string detail;
};

struct ValidationInfo {
    std::string detail; // code is always UnknownExtraProperty
};

struct ValidationReport {
    Iri contribution;
    std::vector<Violation> violations;
    std::vector<ValidationInfo> infos;

    bool conforms() const { return violations.empty(); }
    // Line-oriented form: LEVEL\tCODE\tshape_label\tdetail
    std::string to_lines() const;
};

// Materializes the dose template: one shape per dose property in manifest
// order, only "Type of rTMS" required, everything capped at one value, with
// the min/max pair nested under the percent-of-stimulation-intensity shape.
// Idempotent: the template entity and its statements are reused on re-run.
Template define_rtms_template(Store& store, const VocabularyManifest& manifest);

// Deterministic shape check of one contribution subgraph. Statements outside
// the template are reported as infos, never violations.
ValidationReport validate(const Store& store, const Iri& contribution, const Template& tmpl);

} // namespace nibskg
