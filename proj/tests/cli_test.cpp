#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "nibskg/cli.hpp"
#include "nibskg/rdf_io.hpp"
#include "nibskg/vocabulary.hpp"
#include "support/test_util.hpp"

using namespace nibskg;
using namespace nibskg::testsupport;

namespace {

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult run(std::vector<std::string> args) {
    std::ostringstream out;
    std::ostringstream err;
    int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

} // namespace

TEST_CASE("seed, synth, ingest, compare pipeline yields six parts at full scale") {
    TempDir dir("cli");
    std::string store = dir.file("kg");

    CliResult seeded = run({"seed", "--store", store});
    CHECK(seeded.code == 0);
    CHECK(seeded.out.find("controlled terms: 94") != std::string::npos);
    CHECK(snapshot_exists(store));

    CliResult synth = run({"synth", "--seed", "1", "--n", "600", "--out", dir.file("corpus.csv")});
    CHECK(synth.code == 0);

    CliResult ingested = run({"ingest", "--csv", dir.file("corpus.csv"), "--store", store});
    CHECK(ingested.code == 0);
    CHECK(ingested.out.find("records: 600") != std::string::npos);
    CHECK(ingested.out.find("with_violations: 0") != std::string::npos);

    CliResult compared = run({"compare", "--store", store, "--chunk-size", "100", "--out",
                              dir.file("cmp"), "--format", "csv"});
    CHECK(compared.code == 0);
    CHECK(compared.out.find("parts: 6") != std::string::npos);
    for (int part = 1; part <= 6; ++part) {
        std::ifstream file(dir.file("cmp") + "/comparison_part_" + std::to_string(part) +
                           "_of_6.csv");
        CHECK(file.good());
    }
}

TEST_CASE("ingesting mutated rows exits with the violation status") {
    TempDir dir("clibad");
    std::string store = dir.file("kg");
    run({"seed", "--store", store});

    // Three broken rows: missing type, off-vocabulary coil shape, non-numeric
    // frequency.
    std::string csv =
        "title,Type of rTMS,Coil Shape,Intrabust Frequency\n"
        "ok study,iTBS,F8,50\n"
        "no type,,F8,50\n"
        "bad shape,cTBS,hexagon,50\n"
        "bad freq,rTMS,F8,fast\n";
    write_file(dir.file("bad.csv"), csv);

    CliResult ingested = run({"ingest", "--csv", dir.file("bad.csv"), "--store", store});
    CHECK(ingested.code == 1);
    CHECK(ingested.out.find("with_violations: 3") != std::string::npos);
    CHECK(ingested.out.find("unresolved tokens:") != std::string::npos);

    CliResult validated = run({"validate", "--store", store});
    CHECK(validated.code == 1);
    CHECK(validated.out.find("MissingRequired") != std::string::npos);
    CHECK(validated.out.find("NotInVocabulary") != std::string::npos);
    CHECK(validated.out.find("WrongDatatype") != std::string::npos);
}

TEST_CASE("query errors exit with the usage status and a position") {
    TempDir dir("cliq");
    std::string store = dir.file("kg");
    run({"seed", "--store", store});

    CliResult bad = run({"query", "--store", store, "--text", "SELEC ?s WHERE { ?s ?p ?o }",
                         "--out", "csv"});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("line 1") != std::string::npos);

    CliResult good = run({"query", "--store", store, "--text",
                          "SELECT ?s WHERE { ?s ?p ?o } LIMIT 2", "--out", "csv"});
    CHECK(good.code == 0);
    CHECK(good.out.rfind("s\n", 0) == 0);

    CliResult json_out = run({"query", "--store", store, "--text",
                              "SELECT ?s WHERE { ?s ?p ?o } LIMIT 1", "--out", "json"});
    CHECK(json_out.code == 0);
    CHECK(nlohmann::json::parse(json_out.out).contains("rows"));

    CliResult missing = run({"query", "--store", store, "--out", "csv"});
    CHECK(missing.code == 2);
}

TEST_CASE("unknown subcommands and missing flags are usage errors") {
    CliResult unknown = run({"frobnicate"});
    CHECK(unknown.code == 2);
    CHECK(!unknown.err.empty());

    CliResult missing_store = run({"seed"});
    CHECK(missing_store.code == 2);

    CliResult nothing = run({});
    CHECK(nothing.code == 2);

    CliResult help = run({"--help"});
    CHECK(help.code == 0);
    CHECK(help.out.find("seed") != std::string::npos);
}

TEST_CASE("serve rejects unparseable addresses without blocking") {
    TempDir dir("clisrv");
    std::string store = dir.file("kg");
    run({"seed", "--store", store});
    CliResult bad = run({"serve", "--store", store, "--addr", "127.0.0.1:notaport"});
    CHECK(bad.code == 2);
}

TEST_CASE("validate accepts a single contribution by local id") {
    TempDir dir("clione");
    std::string store = dir.file("kg");
    run({"seed", "--store", store});
    run({"synth", "--seed", "4", "--n", "3", "--out", dir.file("c.csv")});
    run({"ingest", "--csv", dir.file("c.csv"), "--store", store});

    auto loaded = load_snapshot_files(store, "http://localhost:8080");
    VocabularyManifest manifest = seed_rtms_vocabulary(*loaded);
    auto contributions = loaded->members_of(manifest.contribution_class);
    REQUIRE(contributions.size() == 3);

    CliResult one = run({"validate", "--store", store, "--contribution",
                         contributions.front().local_id()});
    CHECK(one.code == 0);
    CHECK(one.out.find("checked: 1") != std::string::npos);

    CliResult ghost = run({"validate", "--store", store, "--contribution", "R99999"});
    CHECK(ghost.code == 2);
}

TEST_CASE("missing snapshots are I/O errors") {
    TempDir dir("clino");
    CliResult result = run({"export", "--store", dir.file("absent"), "--format", "nt"});
    CHECK(result.code == 3);
}

TEST_CASE("the full pipeline is deterministic across independent runs") {
    TempDir dir("clidet");
    std::string dumps[2];
    for (int i = 0; i < 2; ++i) {
        std::string store = dir.file("kg" + std::to_string(i));
        std::string csv = dir.file("corpus" + std::to_string(i) + ".csv");
        REQUIRE(run({"seed", "--store", store}).code == 0);
        REQUIRE(run({"synth", "--seed", "1", "--n", "40", "--out", csv}).code == 0);
        REQUIRE(run({"ingest", "--csv", csv, "--store", store}).code == 0);
        std::string out = dir.file("dump" + std::to_string(i) + ".nt");
        REQUIRE(run({"export", "--store", store, "--format", "nt", "--out", out}).code == 0);
        dumps[i] = read_file(out);
    }
    CHECK(!dumps[0].empty());
    CHECK(dumps[0] == dumps[1]);
}

TEST_CASE("export writes turtle and honors --no-labels") {
    TempDir dir("clittl");
    std::string store = dir.file("kg");
    run({"seed", "--store", store});

    CliResult ttl = run({"export", "--store", store, "--format", "ttl"});
    CHECK(ttl.code == 0);
    CHECK(ttl.out.find("@prefix nibsr:") != std::string::npos);

    CliResult labeled = run({"export", "--store", store, "--format", "nt"});
    CHECK(labeled.out.find("property/P0") != std::string::npos);
    CliResult bare = run({"export", "--store", store, "--format", "nt", "--no-labels"});
    CHECK(bare.out.find("property/P0") == std::string::npos);
    CHECK(bare.out.size() < labeled.out.size());
}

TEST_CASE("publish then fair-report complete the workflow") {
    TempDir dir("clipub");
    std::string store = dir.file("kg");
    run({"seed", "--store", store});
    run({"synth", "--seed", "2", "--n", "12", "--out", dir.file("c.csv")});
    run({"ingest", "--csv", dir.file("c.csv"), "--store", store});

    CliResult published = run({"publish", "--store", store, "--part", "1", "--chunk-size", "6",
                               "--title", "part one", "--license", "CC-BY-4.0"});
    CHECK(published.code == 0);
    auto doc = nlohmann::json::parse(published.out);
    CHECK(doc["id"] == "10.99999/nibs.cmp.1");
    CHECK(doc["version"] == 1);

    CliResult out_of_range = run({"publish", "--store", store, "--part", "9", "--chunk-size",
                                  "6", "--title", "x", "--license", "y"});
    CHECK(out_of_range.code == 2);

    CliResult report = run({"fair-report", "--store", store});
    CHECK(report.code == 0);
    auto fair = nlohmann::json::parse(report.out);
    CHECK(fair["findable"]["pass"] == true);
    CHECK(fair["reusable"]["pass"] == true);
    // No same-as link was created in this flow.
    CHECK(fair["interoperable"]["pass"] == false);
}

TEST_CASE("the minting namespace is configurable through the environment") {
    TempDir dir("clienv");
    std::string store = dir.file("kg");
    setenv("NIBS_KG_NAMESPACE", "http://kg.example.org", 1);
    CliResult seeded = run({"seed", "--store", store});
    CliResult exported = run({"export", "--store", store, "--format", "nt"});
    unsetenv("NIBS_KG_NAMESPACE");
    CHECK(seeded.code == 0);
    CHECK(exported.out.find("<http://kg.example.org/property/") != std::string::npos);
    CHECK(exported.out.find("localhost:8080") == std::string::npos);
}
