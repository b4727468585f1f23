#include "nibskg/service.hpp"

#include <algorithm>

#include <httplib.h>
#include <json.hpp>

#include "nibskg/fair.hpp"
#include "nibskg/query.hpp"
#include "nibskg/rdf_io.hpp"

namespace nibskg {

using json = nlohmann::ordered_json;

namespace {

enum class Negotiated { Json, NTriples, NotAcceptable };

std::string trim_token(const std::string& raw) {
    std::size_t start = raw.find_first_not_of(" \t");
    if (start == std::string::npos) return "";
    std::size_t end = raw.find_last_not_of(" \t");
    return raw.substr(start, end - start + 1);
}

// Exact-match negotiation over the media types we serve; wildcard and a
// missing header fall back to JSON, anything else is 406.
Negotiated negotiate(const httplib::Request& req) {
    if (!req.has_header("Accept")) return Negotiated::Json;
    std::string accept = req.get_header_value("Accept");
    bool any_json = false;
    bool any_nt = false;
    bool any_wildcard = false;
    std::size_t pos = 0;
    while (pos <= accept.size()) {
        std::size_t comma = accept.find(',', pos);
        std::string element = (comma == std::string::npos) ? accept.substr(pos)
                                                           : accept.substr(pos, comma - pos);
        std::size_t semi = element.find(';');
        if (semi != std::string::npos) element = element.substr(0, semi);
        element = trim_token(element);
        if (element == "application/n-triples") any_nt = true;
        else if (element == "application/json") any_json = true;
        else if (element == "*/*") any_wildcard = true;
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (any_nt) return Negotiated::NTriples;
    if (any_json || any_wildcard) return Negotiated::Json;
    return Negotiated::NotAcceptable;
}

void send_json(httplib::Response& res, int status, const json& doc) {
    res.status = status;
    res.set_content(doc.dump(2) + "\n", "application/json");
}

void send_not_found(httplib::Response& res) {
    send_json(res, 404, json{{"error", "not found"}});
}

json term_to_json(const Term& term) {
    json cell;
    if (term.is_iri()) {
        cell["type"] = "iri";
        cell["value"] = term.iri().full();
    } else {
        const Literal& lit = term.literal();
        cell["type"] = "literal";
        cell["value"] = lit.lexical();
        cell["datatype"] = xsd_iri(lit.datatype());
        if (lit.lang()) cell["lang"] = *lit.lang();
    }
    return cell;
}

json landing_document(const EntityDescription& desc, const std::string& path) {
    json doc;
    doc["id"] = desc.iri.local_id();
    doc["iri"] = desc.iri.full();
    doc["kind"] = kind_name(desc.kind);
    doc["label"] = desc.label;
    doc["classes"] = json::array();
    for (const auto& cls : desc.classes) doc["classes"].push_back(cls.full());
    doc["statements"] = json::array();
    for (const auto& st : desc.statements) {
        doc["statements"].push_back({{"subject", st.subject.full()},
                                     {"predicate", st.predicate.full()},
                                     {"object", term_to_json(st.object)}});
    }
    doc["links"] = {{"self", path},
                    {"rdf", path},
                    {"rdf_accept", "application/n-triples"},
                    {"dump", "/rdf/dump"}};
    return doc;
}

} // namespace

FairService::FairService(std::shared_ptr<const Store> store,
                         std::shared_ptr<const PublicationRegistry> registry)
    : server_(std::make_unique<httplib::Server>()) {
    // No SO_REUSEPORT: a second service on the same address must fail its
    // bind instead of silently sharing the listener.
    server_->set_socket_options([](socket_t sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char*>(&yes),
                   sizeof(yes));
    });
    auto snap = std::make_shared<Snapshot>();
    snap->store = std::move(store);
    snap->registry = std::move(registry);
    snapshot_ = snap;
    install_routes();
}

FairService::~FairService() { stop(); }

std::shared_ptr<const FairService::Snapshot> FairService::snapshot() const {
    std::lock_guard lock(snapshot_mutex_);
    return snapshot_;
}

void FairService::reload(std::shared_ptr<const Store> store,
                         std::shared_ptr<const PublicationRegistry> registry) {
    auto snap = std::make_shared<Snapshot>();
    snap->store = std::move(store);
    snap->registry = std::move(registry);
    std::lock_guard lock(snapshot_mutex_);
    snapshot_ = snap;
}

void FairService::install_routes() {
    auto entity_handler = [this](EntityKind kind) {
        return [this, kind](const httplib::Request& req, httplib::Response& res) {
            auto snap = snapshot();
            std::string id = req.matches[1];
            auto rec = snap->store->entity_by_local_id(id);
            if (!rec || rec->kind != kind) {
                send_not_found(res);
                return;
            }
            switch (negotiate(req)) {
                case Negotiated::NTriples: {
                    auto statements =
                        snap->store->statements_matching(rec->iri, std::nullopt, std::nullopt);
                    res.status = 200;
                    res.set_content(serialize_statements(statements), "application/n-triples");
                    break;
                }
                case Negotiated::Json: {
                    EntityDescription desc = snap->store->resolve(rec->iri);
                    send_json(res, 200, landing_document(desc, req.path));
                    break;
                }
                case Negotiated::NotAcceptable:
                    send_json(res, 406, json{{"error", "not acceptable"}});
                    break;
            }
        };
    };

    server_->Get(R"(/resource/([^/]+))", entity_handler(EntityKind::Resource));
    server_->Get(R"(/property/([^/]+))", entity_handler(EntityKind::Property));
    server_->Get(R"(/class/([^/]+))", entity_handler(EntityKind::Class));
    server_->Get(R"(/template/([^/]+))", entity_handler(EntityKind::Template));

    server_->Get(R"(/comparison/(.+))", [this](const httplib::Request& req,
                                               httplib::Response& res) {
        auto snap = snapshot();
        const PublicationRecord* record = snap->registry->find(req.matches[1]);
        if (!record) {
            send_not_found(res);
            return;
        }
        switch (negotiate(req)) {
            case Negotiated::NTriples: {
                std::vector<Statement> statements;
                for (const auto& [title, iri] : record->snapshot.contributions) {
                    auto outgoing =
                        snap->store->statements_matching(iri, std::nullopt, std::nullopt);
                    statements.insert(statements.end(), outgoing.begin(), outgoing.end());
                }
                res.status = 200;
                res.set_content(serialize_statements(statements), "application/n-triples");
                break;
            }
            case Negotiated::Json:
                res.status = 200;
                res.set_content(PublicationRegistry::record_to_json(*record),
                                "application/json");
                break;
            case Negotiated::NotAcceptable:
                send_json(res, 406, json{{"error", "not acceptable"}});
                break;
        }
    });

    server_->Get("/rdf/dump", [this](const httplib::Request&, httplib::Response& res) {
        auto snap = snapshot();
        res.status = 200;
        res.set_content(serialize(*snap->store), "application/n-triples");
    });

    server_->Get("/sparql", [this](const httplib::Request& req, httplib::Response& res) {
        auto snap = snapshot();
        if (!req.has_param("query")) {
            send_json(res, 400, json{{"error", "missing 'query' parameter"}});
            return;
        }
        try {
            SelectQuery query = parse_query(req.get_param_value("query"));
            ResultTable table = execute(*snap->store, query);
            res.status = 200;
            res.set_content(result_to_json(table), "application/json");
        } catch (const Error& e) {
            send_json(res, 400, json{{"error", e.what()}});
        }
    });

    server_->Get("/fair/report", [this](const httplib::Request&, httplib::Response& res) {
        auto snap = snapshot();
        FairReport report = fair_report(*snap->store, *snap->registry);
        res.status = 200;
        res.set_content(report.to_json(), "application/json");
    });
}

void FairService::start(const std::string& host, int port) {
    if (port == 0) {
        int bound = server_->bind_to_any_port(host);
        if (bound <= 0) {
            throw Error(ErrorCode::BindFailure, "cannot bind to " + host);
        }
        port_ = bound;
    } else {
        if (!server_->bind_to_port(host, port)) {
            throw Error(ErrorCode::BindFailure,
                        "cannot bind to " + host + ":" + std::to_string(port));
        }
        port_ = port;
    }
    thread_ = std::thread([this]() { server_->listen_after_bind(); });
    server_->wait_until_ready();
}

void FairService::wait() {
    if (thread_.joinable()) thread_.join();
}

void FairService::stop() {
    if (server_) server_->stop();
    if (thread_.joinable()) thread_.join();
}

} // namespace nibskg
