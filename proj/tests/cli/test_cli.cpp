#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

struct Run {
    int code;
    std::string out;
};

Run run(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + " " + WORLDLET_BIN + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe);
    std::string out;
    char buf[4096];
    while (std::size_t got = fread(buf, 1, sizeof buf, pipe)) out.append(buf, got);
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("worldlet_cli_" + std::to_string(::getpid())) / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

}  // namespace

TEST_CASE("freq on the 4-star") {
    auto dir = scratch("freq");
    write(dir / "star4.json", R"({"n":4,"relations":{"e":[[1,2],[1,3],[1,4]]}})");
    auto r = run("freq --world " + (dir / "star4.json").string() + " --k 2");
    REQUIRE(r.code == 0);
    auto j = Json::parse(r.out);
    REQUIRE(j["entries"].size() == 3);
    CHECK(j["entries"][0]["prob"] == "1/2");
    CHECK(j["entries"][1]["prob"] == "1/4");
    CHECK(j["entries"][2]["prob"] == "1/4");

    // Emitted distributions parse back unchanged.
    write(dir / "q.json", r.out);
    auto again = run("marginalize --dist " + (dir / "q.json").string() + " --m 2");
    REQUIRE(again.code == 0);
    CHECK(again.out == r.out);
}

TEST_CASE("table1") {
    auto r = run("table1");
    REQUIRE(r.code == 0);
    auto rows = Json::parse(r.out)["rows"];
    REQUIRE(rows.size() == 4);
    CHECK(rows[0]["per_world_by_edges"] == Json::array({"1/1", "0/1", "0/1", "0/1"}));
    CHECK(rows[1]["per_world_by_edges"] == Json::array({"0/1", "0/1", "0/1", "1/1"}));
    CHECK(rows[2]["per_world_by_edges"] == Json::array({"0/1", "1/3", "0/1", "0/1"}));
    CHECK(rows[3]["per_world_by_edges"] == Json::array({"1/4", "0/1", "1/4", "0/1"}));
    const auto& plus = rows[2];
    CHECK(plus["name"] == "plus");
    CHECK(plus["extendable"]["4"]["feasible"] == true);
    CHECK(plus["extendable"]["5"]["feasible"] == false);
    CHECK(plus["modularity"]["violations"].get<int>() >= 1);
    for (int i : {0, 1, 3}) CHECK(rows[i]["modularity"]["violations"] == 0);
}

TEST_CASE("figure2 writes four CSVs and a manifest") {
    auto dir = scratch("fig");
    auto r = run("--timestamp 2026-01-01T00:00:00Z figure2 --out-dir " + dir.string());
    REQUIRE(r.code == 0);
    auto summary = Json::parse(r.out);
    CHECK(summary["csv"].size() == 4);
    CHECK(summary["plus_membership"]["4"]["feasible"] == true);
    CHECK(summary["plus_membership"]["5"]["feasible"] == false);
    CHECK(summary["plus_membership"]["6"]["feasible"] == false);
    std::istringstream csv(slurp(dir / "figure2_n3.csv"));
    std::string line;
    int rows = -1;  // header
    while (std::getline(csv, line)) ++rows;
    CHECK(rows == 4);
    CHECK(fs::exists(dir / "manifest.json"));
}

TEST_CASE("same manifest, same bytes") {
    auto dir = scratch("det");
    write(dir / "er.json", R"({"builtin":"erdos_renyi","p":"1/2"})");
    const auto model = (dir / "er.json").string();
    for (const char* name : {"a.jsonl", "b.jsonl"}) {
        auto r = run("--seed 11 --timestamp 2026-01-01T00:00:00Z --threads 0 ahk-sample --model " + model +
                     " --n 7 --count 5 --out " + (dir / name).string());
        REQUIRE(r.code == 0);
    }
    CHECK(slurp(dir / "a.jsonl") == slurp(dir / "b.jsonl"));
    auto ma = Json::parse(slurp(dir / "a.jsonl.manifest.json"));
    auto mb = Json::parse(slurp(dir / "b.jsonl.manifest.json"));
    CHECK(ma["outputs"][0]["fnv1a64"] == mb["outputs"][0]["fnv1a64"]);
    CHECK(ma["inputs"] == mb["inputs"]);

    auto d1 = run("--seed 5 deviation --model " + model + " --k 2 --n 20 --samples 300 --threads 1");
    auto d4 = run("--seed 5 deviation --model " + model + " --k 2 --n 20 --samples 300 --threads 4");
    REQUIRE(d1.code == 0);
    CHECK(d1.out == d4.out);

    // Environment variables stand in for flags.
    auto env = run("deviation --model " + model + " --k 2 --n 20 --samples 300", "WORLDLET_SEED=5");
    CHECK(env.out == d1.out);
}

TEST_CASE("exit codes") {
    auto dir = scratch("errors");
    auto missing = run("freq --world " + (dir / "absent.json").string() + " --k 2");
    CHECK(missing.code == 3);
    CHECK(Json::parse(missing.out)["error"]["status"] == "io");

    write(dir / "bad.json", "{\"n\":");
    CHECK(run("freq --world " + (dir / "bad.json").string() + " --k 2").code == 3);

    write(dir / "w.json", R"({"n":3})");
    auto domain = run("freq --world " + (dir / "w.json").string() + " --k 4");
    CHECK(domain.code == 1);
    CHECK(Json::parse(domain.out)["error"]["code"] == 1);

    auto resource = run("--budget-worlds 10 enum-worlds --n 3");
    CHECK(resource.code == 2);
    CHECK(Json::parse(resource.out)["error"]["status"] == "resource");

    CHECK(run("no-such-command").code == 3);
}

TEST_CASE("bound defaults to the undirected graph worldlet count") {
    auto r = run("bound --n 30 --k 3 --t 1/10");
    REQUIRE(r.code == 0);
    auto j = Json::parse(r.out);
    CHECK(j["worldlets"] == 8);
    CHECK(run("bound --n 30 --k 3 --convention directed").out.find("\"worldlets\": 512") != std::string::npos);
}
