#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "nibskg/comparison.hpp"
#include "nibskg/store.hpp"

namespace httplib {
class Server;
}

namespace nibskg {

// Read-only HTTP facade over a store snapshot. Every minted IRI
// dereferences under its kind's route with content negotiation between
// application/json (landing document, also the default and the wildcard
// match) and application/n-triples (the entity's outgoing triples). The
// snapshot can be swapped atomically with reload().
//
// Routes:
//   GET /resource/{id} /property/{id} /class/{id} /template/{id}
//   GET /comparison/{publication id}
//   GET /rdf/dump
//   GET /sparql?query=<urlencoded>
//   GET /fair/report
class FairService {
public:
    FairService(std::shared_ptr<const Store> store,
                std::shared_ptr<const PublicationRegistry> registry);
    ~FairService();

    FairService(const FairService&) = delete;
    FairService& operator=(const FairService&) = delete;

    // Binds and serves on a background thread. port 0 picks an ephemeral
    // port. Throws BindFailure when the address is taken.
    void start(const std::string& host, int port);
    void wait();  // blocks until the server stops
    void stop();

    int port() const { return port_; }

    void reload(std::shared_ptr<const Store> store,
                std::shared_ptr<const PublicationRegistry> registry);

private:
    struct Snapshot {
        std::shared_ptr<const Store> store;
        std::shared_ptr<const PublicationRegistry> registry;
    };

    std::shared_ptr<const Snapshot> snapshot() const;
    void install_routes();

    mutable std::mutex snapshot_mutex_;
    std::shared_ptr<const Snapshot> snapshot_;
    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
    int port_ = 0;
};

} // namespace nibskg
