#include "gen.hpp"
#include "hsprg/cli.hpp"
#include "hsprg/fooling.hpp"
#include "hsprg/io.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace hsprg;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code = 0;
    std::string out;
    std::string err;
};

Result invoke(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    Result r;
    r.code = cli::run(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "hsprg_test_io_cli";
    fs::create_directories(dir);
    return dir / name;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("halfspace and descriptor JSON round-trip") {
    CounterRng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const auto h = gen::gaussian_halfspace(rng, gen::pick(rng, 1, 30));
        const auto back = halfspace_from_json(Json::parse(to_json(h).dump()));
        CHECK(back.weights == h.weights);
        CHECK(back.theta == h.theta);

        const std::size_t n = gen::pick(rng, 1, 40);
        const auto d = describe(build_space(n, gen::pick(rng, 1, std::min<std::size_t>(n, 6))));
        const auto dd = descriptor_from_json(Json::parse(to_json(d).dump()));
        CHECK(dd.n == d.n);
        CHECK(dd.k == d.k);
        CHECK(dd.s == d.s);
        CHECK(dd.modulus == d.modulus);
        CHECK(dd.construction == d.construction);
    }
    CHECK_THROWS_AS(halfspace_from_json(Json::parse(R"({"weights": [], "theta": 0})")), InvalidInput);
    CHECK_THROWS_AS(halfspace_from_json(Json::parse(R"({"theta": 0})")), InvalidInput);
}

TEST_CASE("property: RunConfig round-trips through JSON") {
    CounterRng rng(17);
    for (int trial = 0; trial < 40; ++trial) {
        RunConfig c;
        c.command = trial % 2 ? "sweep" : "sandwich";
        c.eps = rng.uniform() * 0.9 + 0.01;
        c.C_const = 1.0 + rng.uniform() * 300.0;
        c.c_const = rng.uniform();
        c.mode = trial % 3 ? ScheduleMode::empirical : ScheduleMode::theorem;
        c.log_base = trial % 4 ? LogBase::natural : LogBase::two;
        c.input = "in_" + std::to_string(trial) + ".json";
        c.output = trial % 5 ? "" : "out.csv";
        c.precision_bits = static_cast<unsigned>(gen::pick(rng, 0, 512));
        if (trial % 2) c.rng_seed = rng.next();
        c.limits.unsafe = trial % 7 == 0;
        c.limits.max_cube_dim = static_cast<int>(gen::pick(rng, 1, 30));
        const auto back = config_from_json(Json::parse(to_json(c).dump()));
        CHECK(back == c);
    }
}

TEST_CASE("polynomial JSON keeps extended precision") {
    PrecisionScope scope(200);
    std::vector<Real> coeffs{Real(1) / 3, -Real(2) / 7, Real("1e-40")};
    const UniPoly p(-1.5, 1.0, coeffs);
    const auto j = to_json(p);
    CHECK(j["basis"] == "chebyshev");
    CHECK(j["interval"][0] == -1.5);
    const auto q = poly_from_json(Json::parse(j.dump()));
    REQUIRE(q.coeffs().size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(abs(q.coeffs()[i] - coeffs[i]) <= abs(coeffs[i]) * Real("1e-55"));
    }
    CHECK(q.lo() == -1.5);
}

TEST_CASE("rationals render as p/q strings") {
    CHECK(to_json(Rational(3, 32)) == "3/32");
    CHECK(to_json(Rational(-1, 2)) == "-1/2");
    CHECK(to_json(Rational(0)) == "0/1");
    CHECK(parse_rational("3/32") == Rational(3, 32));
}

TEST_CASE("gap report JSON") {
    GapReport g;
    g.gap_u = 0.25;
    g.gap_l = 0.5;
    g.bound_10eps = 2.0;
    const auto j = to_json(g);
    CHECK(j["ci"].is_null());
    CHECK(j["mode"] == "exhaustive");
    g.mode = GapMode::montecarlo;
    g.ci_u = 0.01;
    g.ci_l = 0.02;
    g.samples = 100;
    CHECK(to_json(g)["ci"]["samples"] == 100);
}

TEST_CASE("cli: fool majority_15 with k = 4") {
    const auto r = invoke({"fool", "--family", "majority", "--n", "15", "--k", "4"});
    CHECK(r.code == cli::kOk);
    const auto j = Json::parse(r.out);
    CHECK(j["fooling_error"] == "3/32");
    const auto lib = fooling_error(family({FamilyName::majority, 15}), build_space(15, 4));
    CHECK(j["fooling_error"] == to_string(lib));
}

TEST_CASE("cli: the pairwise space fails 3-wise verification") {
    const auto desc = scratch("pairwise.json");
    const auto g = invoke({"gen", "--n", "3", "--k", "2", "--descriptor", desc.string()});
    REQUIRE(g.code == cli::kOk);
    CHECK(g.out == "1 1 1\n-1 1 -1\n1 -1 -1\n-1 -1 1\n");
    const auto r = invoke({"verify-kwise", "--n", "3", "--k", "3", "--space", desc.string()});
    CHECK(r.code == cli::kInvariantFailed);
    const auto j = Json::parse(r.out);
    CHECK(j["passed"] == false);
    CHECK(j["failure"]["count"] == 0);
    const auto ok = invoke({"verify-kwise", "--n", "3", "--level", "2", "--space", desc.string()});
    CHECK(ok.code == cli::kOk);
}

TEST_CASE("cli: remez analytic case") {
    const auto r = invoke({"remez", "--a", "0.3333333333", "--m", "0"});
    REQUIRE(r.code == cli::kOk);
    const auto j = Json::parse(r.out);
    CHECK(std::stod(j["M"].get<std::string>()) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(j["alternation_count"] == 2);
    CHECK(std::stod(j["r"]["coeffs"][0].get<std::string>()) == doctest::Approx(1.5).epsilon(1e-9));
}

TEST_CASE("cli: usage errors exit 2 with usage text") {
    const auto unknown = invoke({"fool", "--family", "majority", "--n", "3", "--k", "2", "--bogus"});
    CHECK(unknown.code == cli::kUsage);
    CHECK(unknown.err.find("Usage") != std::string::npos);
    CHECK(unknown.out.empty());
    CHECK(invoke({"frobnicate"}).code == cli::kUsage);
    CHECK(invoke({}).code == cli::kUsage);
    CHECK(invoke({"fool", "--family", "cubic", "--n", "3", "--k", "2"}).code == cli::kUsage);
    CHECK(invoke({"fool", "--family", "majority", "--n", "40", "--k", "2"}).code == cli::kUsage);
    CHECK(invoke({"critical-index", "--halfspace", scratch("missing.json").string()}).code == cli::kUsage);
    CHECK(invoke({"remez", "--a", "2", "--m", "1"}).code == cli::kUsage);
    CHECK(invoke({"--help"}).code == cli::kOk);
}

TEST_CASE("cli: sweep CSV is deterministic and has the documented header") {
    const auto path = scratch("sweep.csv");
    const std::vector<std::string> args{"sweep", "--family", "majority", "--n", "9", "--k-max", "4", "-o", path.string()};
    REQUIRE(invoke(args).code == cli::kOk);
    const auto first = slurp(path);
    REQUIRE(invoke(args).code == cli::kOk);
    CHECK(slurp(path) == first);
    CHECK(first.rfind("family,n,k,s,bias_uniform,bias_space,fooling_error_exact,fooling_error_float\n", 0) == 0);
    CHECK(std::count(first.begin(), first.end(), '\n') == 5);
    CHECK(first.find("\r") == std::string::npos);

    const auto table = sweep({FamilyName::majority, 9}, {1, 2, 3, 4}, {});
    CHECK(first == sweep_csv(table));
}

TEST_CASE("cli: influence, chow and count adapters match the library") {
    const auto h = family({FamilyName::geometric, 6, 0.7});
    const auto hpath = scratch("h.json");
    write_text_file(hpath.string(), to_json(h).dump(2));

    const auto inf = invoke({"influence", "--halfspace", hpath.string(), "--index", "2", "--method", "direct"});
    REQUIRE(inf.code == cli::kOk);
    CHECK(inf.out.find(to_string(influence(h, 2, InfluenceMethod::direct).value)) != std::string::npos);

    const auto chow = invoke({"chow", "--halfspace", hpath.string()});
    REQUIRE(chow.code == cli::kOk);
    const auto cj = Json::parse(chow.out);
    const auto lib = chow_parameters(h);
    REQUIRE(cj["chow"].size() == lib.size());
    for (std::size_t i = 0; i < lib.size(); ++i) CHECK(cj["chow"][i] == to_string(lib[i]));

    const auto count = invoke({"count", "--halfspace", hpath.string(), "--k", "2"});
    REQUIRE(count.code == cli::kOk);
    const auto est = approx_count(h, build_space(6, 2));
    CHECK(count.out.find(to_string(est.estimate)) != std::string::npos);
}

TEST_CASE("cli: print-config emits a config that round-trips") {
    const auto r = invoke({"sandwich", "--family", "majority", "--n", "5", "--eps", "0.25", "--seed", "9",
                           "--log-base", "two", "--print-config"});
    REQUIRE(r.code == cli::kOk);
    const auto c = config_from_json(Json::parse(r.out));
    CHECK(c.command == "sandwich");
    CHECK(c.eps == 0.25);
    CHECK(c.rng_seed == std::optional<std::uint64_t>{9});
    CHECK(c.log_base == LogBase::two);
    CHECK(Json::parse(r.out) == to_json(c));
}

TEST_CASE("cli: critical index and sandwich on small inputs") {
    const auto ci = invoke({"critical-index", "--family", "exponential", "--n", "10", "--eps", "0.5"});
    CHECK(ci.code == cli::kOk);
    CHECK(Json::parse(ci.out)["crit_index"] == "infinity");
    CHECK(Json::parse(ci.out)["head_covers_all"] == true);

    const auto sw = invoke({"sandwich", "--family", "majority", "--n", "12", "--eps", "0.3"});
    CHECK(sw.code == cli::kOk);
    const auto sj = Json::parse(sw.out);
    CHECK(sj["pointwise"]["passed"] == true);

    // 1/sqrt(16) > 0.2: no regular instance exists.
    const auto infeasible = invoke({"sandwich", "--random-n", "16", "--tau", "0.2", "--eps", "0.2"});
    CHECK(infeasible.code == cli::kInvariantFailed);
    CHECK(infeasible.err.find("1/sqrt(n)") != std::string::npos);
}
