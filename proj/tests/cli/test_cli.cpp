// Round-trip tests of the command-line surface: spawn the real binary,
// capture its machine-readable output, and recompute with library calls.

#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "tdpb/tdpb.hpp"

namespace {

std::string g_cli_path;
std::string g_work_dir;

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

int run_cli(const std::string& args, const std::string& stdout_path = "") {
    std::string cmd = g_cli_path + " " + args;
    if (!stdout_path.empty()) cmd += " > " + stdout_path + " 2>/dev/null";
    else cmd += " > /dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string path_in_work(const std::string& name) { return g_work_dir + "/" + name; }

// minimal JSON field scraping; outputs are small and flat
double json_number(const std::string& text, const std::string& key) {
    auto pos = text.find("\"" + key + "\":");
    REQUIRE(pos != std::string::npos);
    pos = text.find(':', pos);
    return std::stod(text.substr(pos + 1));
}

} // namespace

TEST_CASE("bound: all p-values at 1 give a zero bound") {
    auto csv = path_in_work("ones.csv");
    write_file(csv, "id,p\nA,1.0\nB,1.0\nC,1.0\nD,1.0\nE,1.0\n");
    auto out = path_in_work("ones.json");
    int rc = run_cli("bound --pvalues " + csv + " --theta 0.8 --n-obs 50 --family bh", out);
    CHECK(rc == 0);
    auto text = slurp(out);
    CHECK(json_number(text, "m1_hat") == 0);
    CHECK(json_number(text, "r") == 0);
}

TEST_CASE("bound: round trip against library calls") {
    auto csv = path_in_work("mix.csv");
    write_file(csv, "id,p\nA,0.0004\nB,0.001\nC,0.32\nD,0.9\nE,0.02\nF,0.6\n");
    auto out = path_in_work("mix.json");
    int rc = run_cli("bound --pvalues " + csv + " --theta 1.2 --n-obs 50 --family bh "
                     "--gamma-target 0.9",
                     out);
    REQUIRE(rc == 0);
    auto text = slurp(out);

    tdpb::calibration_spec cs;
    cs.family = tdpb::cv_family::bh;
    cs.m = 6;
    cs.alpha = 0.2;
    cs.f_alt = tdpb::alt_pvalue_dist::t_test_two_sided(
        tdpb::t_dist_params::from_effect_size(1.2, 50));
    cs.gamma_target = 0.9;
    auto cal = tdpb::select_critical_vector(cs);
    std::vector<double> p{0.0004, 0.001, 0.32, 0.9, 0.02, 0.6};
    auto bound = tdpb::compute_bound(p, cal.cv, cs.f_alt, 0.2);

    CHECK(json_number(text, "r") == bound.r);
    CHECK(json_number(text, "m1_hat") == bound.m1_hat);
    CHECK(json_number(text, "gamma_star") == doctest::Approx(bound.gamma_star.value()));
    CHECK(json_number(text, "tdp_hat") == doctest::Approx(bound.tdp_hat));
    CHECK(json_number(text, "m0_hat") == bound.m0_hat);

    // determinism: identical invocation, identical bytes
    auto out2 = path_in_work("mix2.json");
    run_cli("bound --pvalues " + csv + " --theta 1.2 --n-obs 50 --family bh "
            "--gamma-target 0.9",
            out2);
    CHECK(slurp(out) == slurp(out2));
}

TEST_CASE("bound: malformed input exits 2 with diagnostics") {
    auto csv = path_in_work("bad.csv");
    write_file(csv, "id,p\nA,1.5\n");
    CHECK(run_cli("bound --pvalues " + csv + " --theta 0.8 --n-obs 50") == 2);
    write_file(csv, "id,p\nA,frog\n");
    CHECK(run_cli("bound --pvalues " + csv + " --theta 0.8 --n-obs 50") == 2);
    CHECK(run_cli("bound --pvalues " + path_in_work("nosuch.csv") +
                  " --theta 0.8 --n-obs 50") == 2);
}

TEST_CASE("dist-r: single-hypothesis pmf") {
    auto out = path_in_work("dist.csv");
    int rc = run_cli("dist-r --m1 0 --thresholds 0.3", out);
    REQUIRE(rc == 0);
    auto text = slurp(out);
    CHECK(text.find("l,probability") != std::string::npos);
    CHECK(text.find("0,0.7") != std::string::npos);
    CHECK(text.find("1,0.3") != std::string::npos);
}

TEST_CASE("estimate-theta: empty selection reports zero") {
    auto csv = path_in_work("flat.csv");
    write_file(csv, "id,p,t\nA,1.0,0.1\nB,1.0,0.2\n");
    auto out = path_in_work("flat.json");
    int rc = run_cli("estimate-theta --input " + csv +
                     " --n-obs 50 --threshold sidak:0.01", out);
    REQUIRE(rc == 0);
    auto text = slurp(out);
    CHECK(json_number(text, "theta_hat") == 0.0);
    CHECK(json_number(text, "n_selected") == 0);
}

TEST_CASE("estimate-theta: library agreement and split emission") {
    auto csv = path_in_work("maps.csv");
    std::ostringstream body;
    body << "id,p,t\n";
    std::vector<double> ps{0.0001, 0.003, 0.2, 0.6, 0.00004};
    std::vector<double> ts{4.5, 3.1, 1.2, 0.4, 5.0};
    for (int i = 0; i < 5; ++i) body << "v" << i << "," << ps[i] << "," << ts[i] << "\n";
    write_file(csv, body.str());
    auto out = path_in_work("maps.json");
    int rc = run_cli("estimate-theta --input " + csv +
                     " --n-obs 50 --threshold fixed:0.01 --split 3,2 --seed 9", out);
    REQUIRE(rc == 0);
    auto text = slurp(out);
    auto est = tdpb::estimate_theta(ts, ps, tdpb::threshold_rule::fixed_p(0.01), 50);
    CHECK(json_number(text, "theta_hat") == doctest::Approx(est.theta_hat));
    CHECK(json_number(text, "n_selected") == est.n_selected);
    CHECK(text.find("estimation_indices") != std::string::npos);
}

TEST_CASE("simulate: CSV output matches a library run") {
    auto cfg = path_in_work("scenario.cfg");
    write_file(cfg, "N=50\nm=8\nm1=2\ntheta=1.2\nrho=0\nalpha=0.2\nB=60\nseed=5\n"
                    "methods=bh:1,gs\n");
    auto out = path_in_work("scenario.csv");
    int rc = run_cli("simulate --config " + cfg, out);
    REQUIRE(rc == 0);

    tdpb::scenario_config config;
    config.n_obs = 50;
    config.m = 8;
    config.m1 = 2;
    config.theta = 1.2;
    config.replications = 60;
    config.seed = 5;
    config.methods = {tdpb::method_spec::step_up(tdpb::cv_family::bh, 1.0),
                      tdpb::method_spec::goeman_solari()};
    auto summary = tdpb::run_scenario(config);
    std::ostringstream expect;
    tdpb::write_scenario_csv(expect, summary);
    CHECK(slurp(out) == expect.str());
}

TEST_CASE("calibrate: reports the family parameters") {
    auto out = path_in_work("cal.json");
    int rc = run_cli("calibrate --m 6 --theta 1.2 --n-obs 50 --family bh", out);
    REQUIRE(rc == 0);
    auto text = slurp(out);
    CHECK(json_number(text, "gamma_star") >= 1.0 - 1e-9);
    CHECK(text.find("\"critical_vector\"") != std::string::npos);
}

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: cli_tests <path-to-tdpbound> [doctest args]\n");
        return 1;
    }
    g_cli_path = argv[1];
    char tmpl[] = "/tmp/tdpb_cli_XXXXXX";
    char* dir = mkdtemp(tmpl);
    g_work_dir = dir ? dir : "/tmp";
    doctest::Context context;
    context.applyCommandLine(argc - 1, argv + 1);
    return context.run();
}
