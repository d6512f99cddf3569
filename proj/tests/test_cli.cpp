#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

const std::string kCli = POLYMIX_CLI_PATH;
const std::string kDir = "cli_test_tmp";

int run(const std::string& args, const std::string& stdout_path = "") {
    std::string cmd = kCli + " " + args;
    if (!stdout_path.empty()) cmd += " > " + stdout_path;
    cmd += " 2> " + kDir + "/stderr.txt";
    int rc = std::system(cmd.c_str());
    return rc < 0 ? rc : WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string first_line(const std::string& text) {
    auto pos = text.find('\n');
    return pos == std::string::npos ? text : text.substr(0, pos);
}

struct Setup {
    Setup() { std::system(("mkdir -p " + kDir).c_str()); }
} setup_once;

} // namespace

TEST_CASE("tails: schema, row count, validation, determinism") {
    const std::string base =
        "tails --chain renewal --p 3 --n 1000 --x-grid bandwidth:12 --trials 5000 "
        "--seed 42 --truncation-N 100000";
    CHECK(run(base + " --out " + kDir + "/a.csv") == 0);
    std::string a = slurp(kDir + "/a.csv");
    CHECK(first_line(a) == "statistic,chain,p,gamma,n,x,hits,trials,p_hat,ci_low,ci_high,seed");
    int rows = -1; // header
    for (char ch : a)
        if (ch == '\n') ++rows;
    CHECK(rows == 12);

    // byte-identical rerun with a different worker count
    CHECK(run(base + " --workers 3 --out " + kDir + "/b.csv") == 0);
    CHECK(a == slurp(kDir + "/b.csv"));

    // validation errors name the offending field, exit 2
    CHECK(run("tails --chain renewal --n 1000 --x-grid bandwidth:4 --trials 5000 "
              "--seed 1 --out " + kDir + "/x.csv") == 2);
    CHECK(slurp(kDir + "/stderr.txt").find("--p") != std::string::npos);
    CHECK(run(base + " --trials 10 --out " + kDir + "/x.csv") == 2);
    CHECK(run("tails --chain nosuch --p 3 --n 100 --x-grid bandwidth:4 --trials 5000 "
              "--seed 1 --out " + kDir + "/x.csv") == 2);

    // unwritable output path -> exit 3
    CHECK(run(base + " --out /nonexistent_dir_polymix/out.csv") == 3);
}

TEST_CASE("tails: unresolvable grid is refused with exit 4") {
    CHECK(run("tails --chain renewal --p 3 --n 10000 --x-grid log:300:625:4 "
              "--trials 20000 --seed 7 --truncation-N 100000 --out " + kDir + "/deep.csv") == 4);
    CHECK(slurp(kDir + "/stderr.txt").find("unresolvable") != std::string::npos);
}

TEST_CASE("mixing: schema, fit line, doubling flag") {
    CHECK(run("mixing --chain renewal --p 3 --n 10..200 --truncation-N 100000 --out " +
                  kDir + "/mix.csv",
              kDir + "/fit.jsonl") == 0);
    CHECK(first_line(slurp(kDir + "/mix.csv")) == "n,coeff,stderr,method");
    auto fit = nlohmann::json::parse(first_line(slurp(kDir + "/fit.jsonl")));
    CHECK(fit["op"] == "rate_fit");
    CHECK(fit.contains("slope"));
    CHECK(fit.contains("stderr"));

    CHECK(run("mixing --chain doubling --n 1..20 --out " + kDir + "/dbl.csv",
              kDir + "/dblfit.jsonl") == 0);
    auto dfit = nlohmann::json::parse(first_line(slurp(kDir + "/dblfit.jsonl")));
    CHECK(dfit["flag"] == "faster_than_polynomial");

    CHECK(run("mixing --chain renewal --n 10..50 --out " + kDir + "/x.csv") == 2);
}

TEST_CASE("bounds: JSON lines and unknown ops") {
    CHECK(run("bounds fuk-constants --p 3", kDir + "/fc.jsonl") == 0);
    auto fc = nlohmann::json::parse(first_line(slurp(kDir + "/fc.jsonl")));
    CHECK(fc["beta"].get<double>() == doctest::Approx(0.6));
    CHECK(fc["c_star"].get<double>() == doctest::Approx(0.0039830).epsilon(1e-4));

    CHECK(run("bounds moddev --case p_lt_2 --n 100 --x 10 --p 1.5 --kappa 1",
              kDir + "/md.jsonl") == 0);
    auto md = nlohmann::json::parse(first_line(slurp(kDir + "/md.jsonl")));
    CHECK(md["total"].get<double>() == doctest::Approx(3.1623).epsilon(1e-4));
    CHECK(md["terms"][0]["label"] == "poly_tail");

    CHECK(run("bounds young --p 2 --x 1 --L ones:100 --kappa 1", kDir + "/yg.jsonl") == 0);
    auto yg = nlohmann::json::parse(first_line(slurp(kDir + "/yg.jsonl")));
    CHECK(yg["total"].get<double>() > 0.0);

    CHECK(run("bounds nosuchop --p 3") == 2);
    CHECK(slurp(kDir + "/stderr.txt").find("moddev") != std::string::npos);
    CHECK(run("bounds moddev --case p_eq_2 --n 10 --x 1 --p 2 --r 9") == 2);
}

TEST_CASE("verify: JSON schema and exit codes") {
    CHECK(run("verify --suite quadrature", kDir + "/q.jsonl") == 0);
    auto q = nlohmann::json::parse(first_line(slurp(kDir + "/q.jsonl")));
    for (const char* key : {"check", "inputs", "observed", "target", "tolerance", "pass"})
        CHECK(q.contains(key));
    CHECK(q["pass"] == true);

    CHECK(run("verify --suite nosuch") == 2);
}

TEST_CASE("config file provides defaults, flags override") {
    {
        std::ofstream cf(kDir + "/cfg.json");
        cf << R"({"chain":"renewal","p":3,"n":"1000","x-grid":"bandwidth:5",)"
           << R"("trials":5000,"seed":42,"truncation-N":100000,)"
           << R"("out":")" << kDir << R"(/cfg_out.csv"})";
    }
    CHECK(run("tails --config " + kDir + "/cfg.json") == 0);
    std::string base = slurp(kDir + "/cfg_out.csv");
    CHECK(first_line(base) ==
          "statistic,chain,p,gamma,n,x,hits,trials,p_hat,ci_low,ci_high,seed");

    // a flag overrides the file value (different seed changes the data)
    CHECK(run("tails --config " + kDir + "/cfg.json --seed 43 --out " + kDir +
              "/cfg_out2.csv") == 0);
    std::string other = slurp(kDir + "/cfg_out2.csv");
    CHECK(base != other);
    CHECK(other.find(",43\n") != std::string::npos);
}

TEST_CASE("report concatenates csv and jsonl inputs") {
    {
        std::ofstream csv(kDir + "/r.csv");
        csv << "a,b\n1,2\n3,4\n";
        std::ofstream jl(kDir + "/r.jsonl");
        jl << R"({"k":1})" << "\n" << R"({"k":2})" << "\n";
    }
    CHECK(run("report --out " + kDir + "/combined.jsonl " + kDir + "/r.csv " + kDir +
              "/r.jsonl") == 0);
    std::ifstream in(kDir + "/combined.jsonl");
    std::string line;
    int csv_rows = 0, jsonl_rows = 0;
    while (std::getline(in, line)) {
        auto rec = nlohmann::json::parse(line);
        if (rec["kind"] == "csv") {
            ++csv_rows;
            CHECK(rec["row"].contains("a"));
        } else if (rec["kind"] == "jsonl") {
            ++jsonl_rows;
            CHECK(rec["record"].contains("k"));
        }
    }
    CHECK(csv_rows == 2);
    CHECK(jsonl_rows == 2);

    CHECK(run("report --out " + kDir + "/x.jsonl " + kDir + "/missing.csv") == 3);
}

TEST_CASE("tower chain is the renewal alias for p > 2 only") {
    CHECK(run("tails --chain tower --p 3 --n 2000 --x-grid bandwidth:4 --trials 2000 "
              "--seed 5 --truncation-N 100000 --out " + kDir + "/tower.csv") == 0);
    CHECK(slurp(kDir + "/tower.csv").find("tower") != std::string::npos);
    CHECK(run("tails --chain tower --p 1.5 --n 500 --x-grid bandwidth:4 --trials 2000 "
              "--seed 5 --out " + kDir + "/x.csv") == 2);
}
