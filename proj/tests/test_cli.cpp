#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <string>

#include "json.hpp"

using json = nlohmann::json;

namespace {

struct RunResult {
    int rc;
    std::string out;
};

RunResult run(const std::string& args, const std::string& env = "") {
    const char* bin = std::getenv("KRDEN_BIN");
    std::string cmd = std::string(bin ? bin : "./krden") + " " + args;
    if (!env.empty()) cmd = "env " + env + " " + cmd;
    cmd += " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[512];
    while (size_t n = fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
    int status = pclose(pipe);
    return {WEXITSTATUS(status), out};
}

json run_json(const std::string& args, int want_rc = 0) {
    RunResult r = run(args);
    CHECK(r.rc == want_rc);
    REQUIRE(!r.out.empty());
    return json::parse(r.out);
}

}  // namespace

TEST_CASE("intersection numbers through the dispatcher") {
    json z = run_json("int --kind Z --L \"diag:1,1,3\" --p 3");
    CHECK(z["value"] == "-1");
    CHECK(z["route"] == "base-case");
    // Same Gross-Keating invariants, but the unit part <2, 1> is isotropic,
    // so the cycle is empty.
    json iso = run_json("int --kind Z --L \"diag:2,1,3\" --p 3");
    CHECK(iso["value"] == "0");
    CHECK(iso["route"] == "base-case");
    json deep = run_json("int --kind Z --L \"diag:1,3,9\" --p 3");
    CHECK(deep["value"] == "-2");
    CHECK(deep["route"] == "recursion");
    CHECK(deep["trace"].is_array());
    json y = run_json("int --kind Y --L \"diag:1/3,1,1\" --p 3");
    CHECK(y["value"] == "0");
    json cm = run_json("int --kind CM --L \"diag:1,27\" --p 3");
    CHECK(cm["value"] == "-1");
    json hyper = run_json("int --kind hyperspecial --L \"diag:1,1,3\" --p 3");
    CHECK(hyper["route"] == "interpolation");
}

TEST_CASE("invariant subcommands") {
    json gk = run_json("gk --L \"diag:1,3,3\" --p 3");
    CHECK(gk["gk"] == json::array({0, 1, 1}));

    json j = run_json("jordan --L \"diag:1,2,9\" --p 3");
    CHECK(j["fundamental"] == json::array({0, 0, 2}));
    CHECK(j["anisotropic"] == false);
    REQUIRE(j["blocks"].size() == 2);
    CHECK(j["blocks"][0]["exponent"] == 0);
    CHECK(j["blocks"][0]["rank"] == 2);
    CHECK(j["blocks"][1]["exponent"] == 2);
    CHECK(j["blocks"][1]["rank"] == 1);

    // The emitted lattice literal parses back to the same lattice.
    json again = run_json("jordan --L '" + j["lattice"].dump() + "' --p 3");
    CHECK(again["blocks"] == j["blocks"]);
    CHECK(again["lattice"] == j["lattice"]);
}

TEST_CASE("densities and counts through the dispatcher") {
    json e = run_json("density --M \"H+:2\" --L \"diag:1\" --p 3");
    CHECK(e["value"] == "2/3");
    CHECK(e["route"] == "engine");
    json b = run_json("density --M \"H+:2\" --L \"diag:1\" --p 3 --brute");
    CHECK(b["value"] == "2/3");
    CHECK(b["route"] == "brute");

    json dual = run_json("density --M \"OB^\" --L \"diag:1,1,3\" --p 3");
    CHECK(dual["value"] == "32/2187");

    json c1 = run_json("count --M \"H+:1\" --L \"diag:1\" --p 3 --depth 1");
    CHECK(c1["count"] == "2");
    CHECK(c1["stabilized"] == false);
    json c2 = run_json("count --M \"H+:1\" --L \"diag:1\" --p 3 --depth 2");
    CHECK(c2["count"] == "2");
    CHECK(c2["normalized"] == "2");
    CHECK(c2["stabilized"] == true);

    json poly = run_json("denpoly --M \"H0(p)\" --L \"diag:1,1,3\" --p 3");
    CHECK(poly["vanishes_at_1"] == true);
    CHECK(poly["provenance"] == "interpolated");
    CHECK(poly["coeffs"].size() > 1);

    json dd = run_json("dden --kind augscaled --L \"diag:1,1\" --qx 9 --p 3");
    CHECK(dd["value"] == "-1");
    json ddc = run_json("dden --kind AugScaled --L \"diag:1,1\" --qx 9 --p 3");
    CHECK(ddc["value"] == "-1");
    json dh = run_json("dden --kind h0p --L \"diag:1,1,3\" --p 3");
    CHECK(dh["value"] == "-1");
}

TEST_CASE("coset, diff and ledger subcommands") {
    json c = run_json("coset --matrix \"1,0,0,3\" --p 3");
    CHECK(c["type"] == "I+");
    CHECK(c["a"] == 0);
    CHECK(c["b"] == 1);
    CHECK(c["in_order"] == true);
    CHECK(c["primitive"] == true);

    json d = run_json("difft --T \"1,0,0,1,0,1\"");
    CHECK(d["det"] == "1");
    CHECK(d["diff"] == json::array({2}));
    CHECK(d["odd_cardinality"] == true);

    json en = run_json("enumt --diag 1,1,1");
    CHECK(en["count"] == 23);
    CHECK(en["matrices"].size() == 23);

    json led = run_json("ledger --n 2 --p 3");
    CHECK(led["exc_coefficient"] == 3);
    CHECK(led["restriction_total"] == json::array({3, 2}));
    CHECK(led["exc_multiplicity"] == "4");

    json gd = run_json("geodiff --Lflat \"diag:1,1\" --xval 2 --p 3");
    CHECK(gd["a"] == 0);
    CHECK(gd["b"] == 0);
    CHECK(gd["ff"] == "1");
    CHECK(gd["vv"] == "1");
    CHECK(gd["fv"] == "-1");
    CHECK(gd["vf"] == "-1");
    CHECK(gd["sum"] == "0");
}

TEST_CASE("error reporting and exit codes") {
    RunResult bad = run("gk --L \"diag:x\" --p 3");
    CHECK(bad.rc == 2);
    CHECK(json::parse(bad.out)["error"] == "invalid-input");

    RunResult missing = run("gk --p 3");
    CHECK(missing.rc == 2);

    RunResult badkind = run("int --kind Q --L \"diag:1,1,3\" --p 3");
    CHECK(badkind.rc == 2);

    RunResult blown = run("density --M \"H+:2\" --L \"diag:1\" --p 3 --brute",
                          "KRDEN_BUDGET=3");
    CHECK(blown.rc == 3);
    CHECK(json::parse(blown.out)["error"] == "budget-exceeded");

    RunResult notint = run("int --kind Z --L \"diag:1,1\" --p 3");
    CHECK(notint.rc == 2);
}
