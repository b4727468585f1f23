#pragma once

#include <string>
#include <vector>

#include "nibskg/comparison.hpp"
#include "nibskg/store.hpp"

namespace nibskg {

struct FairCheck {
    bool pass = false;
    std::vector<std::string> evidence;
};

struct FairReport {
    FairCheck findable;
    FairCheck accessible;
    FairCheck interoperable;
    FairCheck reusable;

    bool all_pass() const {
        return findable.pass && accessible.pass && interoperable.pass && reusable.pass;
    }
    std::string to_json() const;
};

// Executable audit of the four publishing principles:
//   Findable      — publications exist, each with a persistent id, title and
//                   creator metadata.
//   Accessible    — every minted IRI falls under a served route pattern and
//                   the RDF dump endpoint is enabled.
//   Interoperable — the store serializes to RDF and at least one same-as
//                   link maps a local term to an external ontology.
//   Reusable      — every publication carries a license tag and a creation
//                   timestamp.
FairReport fair_report(const Store& store, const PublicationRegistry& registry);

} // namespace nibskg
