#include "spacelike/cli.hpp"
#include "test_support.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "spacelike-sim");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = spacelike::cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::filesystem::path temp_file(const std::string& name, const std::string& text) {
    const auto p = std::filesystem::temp_directory_path() / name;
    std::ofstream(p) << text;
    return p;
}

}  // namespace

TEST_CASE("simulate prints the reference log") {
    const auto r = run({"simulate", "--config", testing::config_path("reference.cfg"), "--trials", "3"});
    REQUIRE(r.code == 0);
    const auto b2 = r.out.find("decision\t");
    REQUIRE(b2 != std::string::npos);
    CHECK(r.out.find("B2 axis0") < r.out.find("A1 axis0"));
    CHECK(r.out.find("\tzeta=0.5\tB2 axis0") != std::string::npos);
    CHECK(r.out.find("[counts]") != std::string::npos);
    CHECK(r.out.find("consistent\t3") != std::string::npos);
}

TEST_CASE("simulate writes an output directory") {
    const auto dir = std::filesystem::temp_directory_path() / "spacelike_cli_out";
    std::filesystem::remove_all(dir);
    const auto r = run({"simulate", "--config", testing::config_path("reference.cfg"), "--trials", "20", "--out",
                        dir.string(), "--max-log-trials", "2"});
    REQUIRE(r.code == 0);
    for (const char* f : {"trials.log", "stats.txt", "config.txt"}) CHECK(std::filesystem::exists(dir / f));
    std::ifstream in(dir / "trials.log");
    const std::string log((std::istreambuf_iterator<char>(in)), {});
    std::size_t trials = 0;
    for (std::size_t p = 0; (p = log.find("\ntrial\t", p)) != std::string::npos; ++p) ++trials;
    if (log.rfind("trial\t", 0) == 0) ++trials;
    CHECK(trials == 2);
}

TEST_CASE("argument and config errors exit 2") {
    CHECK(run({"simulate"}).code == 2);
    CHECK(run({"simulate", "--config", "/nonexistent.cfg"}).code == 2);
    CHECK(run({"simulate", "--config", testing::config_path("reference.cfg"), "--trials", "0"}).code == 2);
    CHECK(run({"check", "--zeta-grid", "1:2"}).code == 2);
    CHECK(run({"check", "--time-grid", "a:b:3"}).code == 2);
    CHECK(run({"check", "--policy", "cone"}).code == 2);
    CHECK(run({"diagram", "--config", testing::config_path("reference.cfg"), "--frame", "C"}).code == 2);
    CHECK(run({"bell", "--axes", "(0,0,1)"}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    const auto empty = temp_file("spacelike_empty.cfg", "[source]\ntau_A = 1\ntau_B = 1\n");
    const auto r = run({"simulate", "--config", empty.string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("detector.A") != std::string::npos);
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("infeasible geometry exits 3") {
    const auto p = temp_file("spacelike_infeasible.cfg",
                             "[source]\ntau_A = 5\ntau_B = 0.1\n[detector.A]\narrival = -1\n[detector.B]\narrival = 0\n");
    const auto r = run({"simulate", "--config", p.string()});
    CHECK(r.code == 3);
    CHECK(r.err.find("geometry error") != std::string::npos);
}

TEST_CASE("check exit codes") {
    const auto blc = run({"check", "--policy", "blc"});
    CHECK(blc.code == 0);
    const auto inst = run({"check", "--policy", "inst"});
    CHECK(inst.code == 1);
    CHECK(inst.out.find("first failing zeta") != std::string::npos);
    const auto plane = run({"check", "--policy", "plane:0.9"});
    CHECK(plane.code == 1);
    CHECK(plane.out.find("first failing zeta\t0.1") != std::string::npos);
    // With every decision after the common origin the instantaneous planes agree.
    CHECK(run({"check", "--policy", "inst", "--time-grid", "0.5:2:4"}).code == 0);
}

TEST_CASE("bell") {
    const auto a = run({"bell", "--trials", "20000", "--seed", "3"});
    const auto b = run({"bell", "--trials", "20000", "--seed", "3"});
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out.find("analytic\t2.82842712") != std::string::npos);
    const auto eq = run({"bell", "--axes", "equal", "--trials", "1000"});
    CHECK(eq.out.find("analytic\t-2\n") != std::string::npos);
    CHECK(eq.out.find("estimate\t-2\n") != std::string::npos);
    const auto custom = run({"bell", "--axes", "(0,0,1), (1,0,0), (0,0,1), (1,0,0)", "--trials", "1000"});
    CHECK(custom.code == 0);
}

TEST_CASE("diagram coordinates") {
    const auto cfg = testing::config_path("reference.cfg");
    const auto lab = run({"diagram", "--config", cfg});
    REQUIRE(lab.code == 0);
    CHECK(lab.out.rfind("<?xml", 0) == 0);
    CHECK(lab.out.find("<svg") != std::string::npos);
    CHECK(lab.out.find(R"~(data-label="A1" data-t="-1" data-x="0")~") != std::string::npos);
    CHECK(lab.out.find(R"~(data-label="B1(blc)" data-t="-1.85914")~") != std::string::npos);
    const auto primed = run({"diagram", "--config", cfg, "--frame", "B"});
    CHECK(primed.out.find(R"~(data-label="A1" data-t="-1.12763")~") != std::string::npos);
    CHECK(run({"diagram", "--config", cfg, "--frame", "zeta:0.5"}).out == primed.out);
    CHECK(run({"diagram", "--config", cfg}).out == lab.out);
}

TEST_CASE("schema") {
    const auto r = run({"schema"});
    CHECK(r.code == 0);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc.contains("sections"));
}

TEST_CASE("SIM_SEED supplies the root seed") {
    const auto p = temp_file("spacelike_noseed.cfg",
                             "[source]\ntau_A = 0.8\ntau_B = 0.664\n[detector.A]\narrival = -1\naxes = (0,0,1), (1,0,0)\n"
                             "[detector.B]\nzeta = 0.5\narrival = -0.933\naxes = (0,0,1), (1,0,0)\n");
    ::setenv("SIM_SEED", "123", 1);
    const auto a = run({"simulate", "--config", p.string(), "--trials", "50"});
    const auto b = run({"simulate", "--config", p.string(), "--trials", "50", "--seed", "123"});
    ::setenv("SIM_SEED", "124", 1);
    const auto c = run({"simulate", "--config", p.string(), "--trials", "50"});
    ::setenv("SIM_SEED", "junk", 1);
    const auto d = run({"simulate", "--config", p.string(), "--trials", "50"});
    ::unsetenv("SIM_SEED");
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out != c.out);
    CHECK(d.code == 2);
}
