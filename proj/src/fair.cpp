#include "nibskg/fair.hpp"

#include <json.hpp>

#include "nibskg/rdf_io.hpp"

namespace nibskg {

using json = nlohmann::ordered_json;

namespace {

json check_to_json(const FairCheck& check) {
    return {{"pass", check.pass}, {"evidence", check.evidence}};
}

FairCheck check_findable(const PublicationRegistry& registry) {
    FairCheck check;
    if (registry.records().empty()) {
        check.pass = false;
        check.evidence.push_back("no publications in the registry");
        return check;
    }
    std::size_t with_metadata = 0;
    for (const auto& record : registry.records()) {
        if (!record.id.empty() && !record.title.empty() && !record.creator.empty()) {
            ++with_metadata;
        }
    }
    check.pass = with_metadata == registry.size();
    check.evidence.push_back(std::to_string(registry.size()) +
                             " publication(s) with persistent identifiers");
    check.evidence.push_back(std::to_string(with_metadata) +
                             " publication(s) carry title and creator metadata");
    return check;
}

FairCheck check_accessible(const Store& store) {
    FairCheck check;
    std::size_t minted = 0;
    std::size_t external = 0;
    for (const auto& rec : store.entities()) {
        if (rec.external) ++external;
        else ++minted;
    }
    check.pass = true;
    check.evidence.push_back(std::to_string(minted) +
                             " minted IRI(s) dereferenceable under the "
                             "/resource /property /class /template routes");
    if (external > 0) {
        check.evidence.push_back(std::to_string(external) +
                                 " external IRI(s) resolvable through the registry");
    }
    check.evidence.push_back("RDF dump endpoint enabled at /rdf/dump");
    return check;
}

FairCheck check_interoperable(const Store& store) {
    FairCheck check;
    std::size_t triples = 0;
    try {
        triples = store.statement_count();
        (void)serialize(store);
    } catch (const Error& e) {
        check.pass = false;
        check.evidence.push_back(std::string("RDF export failed: ") + e.what());
        return check;
    }
    check.evidence.push_back("RDF export succeeded (" + std::to_string(triples) +
                             " statement(s) as N-Triples)");

    std::size_t links = 0;
    auto same_as = store.find_by_label(EntityKind::Property, "same as");
    if (!same_as.empty()) {
        links = store.statements_matching(std::nullopt, same_as.front(), std::nullopt).size();
    }
    if (links == 0) {
        check.pass = false;
        check.evidence.push_back("no same-as links to external ontologies");
    } else {
        check.pass = true;
        check.evidence.push_back(std::to_string(links) +
                                 " same-as link(s) to external ontologies");
    }
    return check;
}

FairCheck check_reusable(const PublicationRegistry& registry) {
    FairCheck check;
    if (registry.records().empty()) {
        check.pass = false;
        check.evidence.push_back("no publications in the registry");
        return check;
    }
    std::size_t complete = 0;
    for (const auto& record : registry.records()) {
        if (!record.license.empty() && !record.created_at.empty()) ++complete;
    }
    check.pass = complete == registry.size();
    check.evidence.push_back(std::to_string(complete) + " of " +
                             std::to_string(registry.size()) +
                             " publication(s) carry a license tag and creation timestamp");
    return check;
}

} // namespace

std::string FairReport::to_json() const {
    json doc;
    doc["findable"] = check_to_json(findable);
    doc["accessible"] = check_to_json(accessible);
    doc["interoperable"] = check_to_json(interoperable);
    doc["reusable"] = check_to_json(reusable);
    doc["all_pass"] = all_pass();
    return doc.dump(2) + "\n";
}

FairReport fair_report(const Store& store, const PublicationRegistry& registry) {
    FairReport report;
    report.findable = check_findable(registry);
    report.accessible = check_accessible(store);
    report.interoperable = check_interoperable(store);
    report.reusable = check_reusable(registry);
    return report;
}

} // namespace nibskg
