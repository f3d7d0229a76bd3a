#include "doctest.h"

#include "sparse_orbit/cli.hpp"
#include "sparse_orbit/error.hpp"
#include "sparse_orbit/powres.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sys/wait.h>
#include <sstream>
#include <string>
#include <vector>

using namespace sparse_orbit;

namespace {

struct Outcome {
    int code = 0;
    std::string out;
    std::string err;
};

Outcome run(std::vector<std::string> args) {
    std::ostringstream out, err;
    Outcome o;
    o.code = cli::run(args, out, err);
    o.out = out.str();
    o.err = err.str();
    return o;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::string cell;
        bool quoted = false;
        for (char c : line) {
            if (c == '"') {
                quoted = !quoted;
            } else if (c == ',' && !quoted) {
                cells.push_back(cell);
                cell.clear();
            } else {
                cell += c;
            }
        }
        cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

const char* kSkew = R"({"kind":"skew","cf":{"rule":"power","exponent":6,"terms":8,"prefix":[0,46]},)"
                    R"("schedule":{"first":1,"last":5,"lower_bound_from":2}})";

}  // namespace

TEST_CASE("decimal parsing is exact") {
    CHECK(cli::parse_decimal("7/4") == BigRational(7, 4));
    CHECK(cli::parse_decimal("-1.25") == BigRational(-5, 4));
    CHECK(cli::parse_decimal("3") == BigRational(3));
    CHECK(cli::parse_decimal("1e-3") == BigRational(1, 1000));
    CHECK(cli::parse_decimal("2.5E2") == BigRational(250));
    CHECK_THROWS_AS(cli::parse_decimal("1/0"), InvalidArgument);
    CHECK_THROWS_AS(cli::parse_decimal("abc"), InvalidArgument);
}

TEST_CASE("system specifications") {
    const auto sys = cli::system_from_json(nlohmann::json::parse(kSkew));
    CHECK(sys.index() == 2);
    CHECK(std::get<dynamics::SkewProductSystem>(sys).g.terms().size() == 5);
    const auto flow = cli::system_from_json(nlohmann::json::parse(
        R"({"kind":"flow","cf":{"quotients":[0,1,1,1,1,1,1,1,1,1]},"terms":[[1,"0.25"]],"offset":"3/2","time_step":"1/3"})"));
    const auto& f = std::get<dynamics::SpecialFlowSystem>(flow);
    CHECK(f.offset == BigRational(3, 2));
    CHECK(f.time_step == BigRational(1, 3));
    CHECK_THROWS_AS(cli::system_from_json(nlohmann::json::parse(R"({"kind":"spiral"})")), InvalidArgument);
}

TEST_CASE("residue tables match the counting functions") {
    const auto o = run({"residues", "--N", "30", "--C", "3"});
    REQUIRE(o.code == cli::exit_ok);
    CHECK(o.out.rfind("# schema=1\n", 0) == 0);
    const auto rows = csv_rows(o.out);
    REQUIRE(rows.size() == 31);
    CHECK(rows[0] == std::vector<std::string>{"N", "C", "x", "pow"});
    for (std::size_t x = 0; x < 30; ++x) {
        CHECK(std::stoull(rows[x + 1][3]) == powres::pow_count_brute(30, 3, static_cast<i64>(x)));
    }
}

TEST_CASE("decompose reports an exact combination") {
    const auto o = run({"decompose", "--N", "60", "--C", "2", "--d", "2"});
    REQUIRE(o.code == cli::exit_ok);
    const auto j = nlohmann::json::parse(o.out);
    CHECK(j["N"] == 60);
    CHECK(j["max_pointwise_error"].get<double>() < 1e-9);
    CHECK(j["term_count"].get<u64>() <= j["size_bound"].get<u64>());
    CHECK(j["l1_measured"].get<double>() <= j["l1_bound"].get<double>() + 1e-12);
}

TEST_CASE("cf subcommand prints convergents") {
    const auto o = run({"cf", "--quotients", "0,1,1,1,1,1"});
    REQUIRE(o.code == cli::exit_ok);
    const auto rows = csv_rows(o.out);
    REQUIRE(rows.size() == 7);
    CHECK(rows[6][3] == "8");
    const auto big = run({"cf", "--rule", "power", "--exponent", "6", "--terms", "5", "--prefix", "0,46", "--digits"});
    REQUIRE(big.code == cli::exit_ok);
    CHECK(csv_rows(big.out)[0][3] == "q_digits");
}

TEST_CASE("bound checks report holds") {
    for (const auto& args : std::vector<std::vector<std::string>>{
             {"char-sums", "--m", "11", "--h-max", "4"},
             {"char-sums", "--kind", "pairs", "--m", "13", "--k", "3", "--i-max", "2"},
             {"char-sums", "--kind", "progression", "--m", "15", "--step", "2", "--L", "3"},
             {"vdc", "--count", "20", "--length", "50", "--H", "5", "--kind", "mixed"},
             {"weyl", "--P", "n^3 + 2n", "--q", "9", "--n", "1,2"}}) {
        const auto o = run(args);
        REQUIRE(o.code == cli::exit_ok);
        const auto rows = csv_rows(o.out);
        REQUIRE(rows.size() > 1);
        std::size_t col = 0;
        while (col < rows[0].size() && rows[0][col] != "holds") ++col;
        REQUIRE(col < rows[0].size());
        for (std::size_t r = 1; r < rows.size(); ++r) CHECK(rows[r][col] == "1");
    }
}

TEST_CASE("lemma counts are seeded") {
    const auto a = run({"lemma-count", "--q", "101", "--trials", "3", "--seed", "4"});
    const auto b = run({"lemma-count", "--q", "101", "--trials", "3", "--seed", "4"});
    const auto c = run({"lemma-count", "--q", "101", "--trials", "3", "--seed", "5"});
    REQUIRE(a.code == cli::exit_ok);
    CHECK(a.out == b.out);
    CHECK(a.out != c.out);
    CHECK(csv_rows(a.out).size() == 4);
}

TEST_CASE("rigidity rows for the constructed skew product") {
    const auto o = run({"rigidity", "--system", kSkew, "--index", "1..2", "--grid", "4"});
    REQUIRE(o.code == cli::exit_ok);
    const auto rows = csv_rows(o.out);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0][0] == "system");
    const double v1 = std::stod(rows[1][5]);
    const double v2 = std::stod(rows[2][5]);
    CHECK(v2 < v1);
    CHECK(std::stod(rows[1][10]) < 1.0);
}

TEST_CASE("orbit command honours config files and overrides") {
    const std::string path = "test_cli_config.json";
    {
        std::ofstream cfg(path);
        cfg << R"({"system": "{\"kind\":\"rotation\",\"cf\":{\"rule\":\"power\",\"exponent\":3,\"terms\":7,\"prefix\":[0,5]}}",)"
            << R"( "checkpoints": "10,100", "K": 2, "starts": 1})";
    }
    const auto a = run({"--config", path, "orbit"});
    REQUIRE(a.code == cli::exit_ok);
    const auto rows = csv_rows(a.out);
    CHECK(rows.size() == 1 + 2 * 4);
    CHECK(rows[1][5] == "e(-2,0)");
    const auto b = run({"--config", path, "orbit", "--K", "1"});
    REQUIRE(b.code == cli::exit_ok);
    CHECK(csv_rows(b.out).size() == 1 + 2 * 2);
    const auto j = run({"--config", path, "--format", "json", "orbit"});
    REQUIRE(j.code == cli::exit_ok);
    CHECK(nlohmann::json::parse(j.out)["reports"].size() == 1);
    std::remove(path.c_str());
}

TEST_CASE("exit codes") {
    CHECK(run({"decompose"}).code == cli::exit_invalid);
    CHECK(run({"nonsense"}).code == cli::exit_invalid);
    CHECK(run({"residues", "--N", "0"}).code == cli::exit_invalid);
    CHECK(run({"orbit", "--system", "{\"kind\":\"rotation\",\"cf\":{\"quotients\":[0,1,1]}}", "--checkpoints", "5,3"}).code ==
          cli::exit_invalid);
    const auto budget = run({"--budget", "10", "residues", "--N", "1000"});
    CHECK(budget.code == cli::exit_budget);
    CHECK_FALSE(budget.err.empty());
}

TEST_CASE("installed binary is deterministic") {
    const char* bin = std::getenv("SPARSE_ORBIT_CLI");
    if (!bin) {
        MESSAGE("SPARSE_ORBIT_CLI not set; skipping the binary check");
        return;
    }
    auto capture = [&](const std::string& env) {
        const std::string cmd = env + " " + bin + " lemma-count --q 211 --trials 4 2>&1";
        std::string out;
        FILE* pipe = popen(cmd.c_str(), "r");
        REQUIRE(pipe != nullptr);
        char buf[4096];
        std::size_t n;
        while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
        const int status = pclose(pipe);
        CHECK(status == 0);
        return out;
    };
    const auto one = capture("SPARSE_ORBIT_THREADS=1");
    const auto four = capture("SPARSE_ORBIT_THREADS=4");
    CHECK(one == four);
    CHECK(one.rfind("# schema=1", 0) == 0);
    const std::string bad = std::string(bin) + " residues --N 0 >/dev/null 2>&1";
    const int status = std::system(bad.c_str());
    CHECK(WEXITSTATUS(status) == cli::exit_invalid);
}
