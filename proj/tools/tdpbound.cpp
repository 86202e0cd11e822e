// tdpbound: lower confidence bounds for the number/proportion of true
// discoveries in an a-priori fixed hypothesis set, from the exact step-up
// rejection-count distribution, plus calibration, effect-size estimation and
// the simulation harness around it.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "tdpb/tdpb.hpp"

using json = nlohmann::ordered_json;

namespace {

// exit codes: 0 ok, 1 computational failure, 2 input error

struct cli_options {
    std::string pvalues_path;
    std::string config_path;
    std::string out_path;
    std::string family = "bh";
    std::string threshold_spec;
    std::string methods_spec;
    std::string thresholds_csv;
    std::string beta_grid_csv;
    std::string split_spec;
    double alpha = 0.2;
    double gamma_target = 1.0;
    std::optional<double> theta;
    int n_obs = 50;
    int m = 100;
    int m1 = 0;
    double rho = 0.0;
    std::optional<double> theta_assumed;
    int replications = 10000;
    std::uint64_t seed = 0;
    double lambda_lo = 0.0;
    double lambda_hi = -1.0;
    double lambda_tol = 1e-5;
    std::optional<double> lambda_value;
    std::optional<double> beta_value;
    bool emit_gamma_table = false;
};

void write_output(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw tdpb::input_error("cannot open output file '" + out_path + "'");
    out << text;
}

std::vector<double> parse_double_list(const std::string& text, const char* what) {
    std::vector<double> out;
    std::istringstream is(text);
    std::string tok;
    while (std::getline(is, tok, ',')) {
        try {
            out.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw tdpb::input_error(std::string("cannot parse ") + what + " from '" + tok + "'");
        }
    }
    if (out.empty()) throw tdpb::input_error(std::string("empty ") + what + " list");
    return out;
}

tdpb::threshold_rule parse_threshold_rule(const std::string& spec) {
    auto colon = spec.find(':');
    if (colon == std::string::npos)
        throw tdpb::input_error("threshold must look like quantile:w, fixed:c, bonferroni:a "
                                "or sidak:a");
    std::string kind = spec.substr(0, colon);
    double param = 0.0;
    try {
        param = std::stod(spec.substr(colon + 1));
    } catch (const std::exception&) {
        throw tdpb::input_error("cannot parse threshold parameter in '" + spec + "'");
    }
    if (kind == "quantile") return tdpb::threshold_rule::t_quantile(param);
    if (kind == "fixed") return tdpb::threshold_rule::fixed_p(param);
    if (kind == "bonferroni") return tdpb::threshold_rule::bonferroni(param);
    if (kind == "sidak") return tdpb::threshold_rule::sidak(param);
    throw tdpb::input_error("unknown threshold kind '" + kind + "'");
}

tdpb::calibration_spec build_calibration_spec(const cli_options& opt, int m,
                                              const tdpb::alt_pvalue_dist& f_alt) {
    tdpb::calibration_spec cs;
    cs.family = tdpb::parse_family(opt.family);
    cs.m = m;
    cs.alpha = opt.alpha;
    cs.f_alt = f_alt;
    cs.gamma_target = opt.gamma_target;
    cs.lambda_search = {opt.lambda_lo, opt.lambda_hi, opt.lambda_tol};
    if (!opt.beta_grid_csv.empty())
        cs.beta_grid = parse_double_list(opt.beta_grid_csv, "beta grid");
    return cs;
}

json parameters_json(const cli_options& opt, int m, double theta_used,
                     const char* theta_source, const tdpb::calibration_result& cal) {
    json params;
    params["m"] = m;
    params["alpha"] = opt.alpha;
    params["family"] = tdpb::family_name(cal.cv.family);
    params["gamma_target"] = opt.gamma_target;
    params["lambda"] = cal.cv.lambda;
    if (std::isnan(cal.cv.beta))
        params["beta"] = nullptr;
    else
        params["beta"] = cal.cv.beta;
    params["theta"] = theta_used;
    params["theta_source"] = theta_source;
    params["n_obs"] = opt.n_obs;
    params["nu"] = opt.n_obs - 1;
    params["mu"] = theta_used * std::sqrt(opt.n_obs / 2.0);
    return params;
}

int cmd_bound(const cli_options& opt) {
    auto table = tdpb::read_pvalue_csv_file(opt.pvalues_path);
    const int m = static_cast<int>(table.pvalues.size());

    double theta_used = 0.0;
    const char* theta_source = "given";
    if (opt.theta) {
        theta_used = *opt.theta;
    } else if (!opt.threshold_spec.empty()) {
        if (!table.has_tvalues)
            throw tdpb::input_error("theta estimation needs a 't' column in the p-value CSV");
        auto rule = parse_threshold_rule(opt.threshold_spec);
        auto est = tdpb::estimate_theta(table.tvalues, table.pvalues, rule, opt.n_obs);
        theta_used = est.theta_hat;
        theta_source = "estimated";
    } else {
        throw tdpb::input_error("provide --theta or --threshold for the alternative CDF");
    }

    json out;
    if (theta_used == 0.0) {
        // estimated effect size of zero: every hypothesis is treated as null
        // and the valid bound is zero
        out["r"] = 0;
        out["gamma_star"] = 0.0;
        out["m1_hat"] = 0;
        out["tdp_hat"] = 0.0;
        out["m0_hat"] = m;
        json params;
        params["m"] = m;
        params["alpha"] = opt.alpha;
        params["theta"] = 0.0;
        params["theta_source"] = theta_source;
        params["note"] = "zero effect size: all hypotheses assumed null";
        out["parameters"] = params;
        write_output(opt.out_path, out.dump(2) + "\n");
        return 0;
    }

    auto f_alt = tdpb::alt_pvalue_dist::t_test_two_sided(
        tdpb::t_dist_params::from_effect_size(theta_used, opt.n_obs));
    auto cal = tdpb::select_critical_vector(build_calibration_spec(opt, m, f_alt));
    auto su = tdpb::stepup_reject(table.pvalues, cal.cv);
    auto bound = tdpb::bound_from_table(su.num_rejections, cal.table);

    out["r"] = bound.r;
    out["gamma_star"] = bound.gamma_star.value();
    out["m1_hat"] = bound.m1_hat;
    out["tdp_hat"] = bound.tdp_hat;
    out["m0_hat"] = bound.m0_hat;
    out["parameters"] = parameters_json(opt, m, theta_used, theta_source, cal);
    if (opt.emit_gamma_table) {
        json gt = json::array();
        for (int k = 0; k <= bound.table.m(); ++k) {
            json row;
            row["m1_candidate"] = k;
            row["gamma"] = bound.table.gammas[k].value();
            row["ell"] = bound.table.ell[k];
            gt.push_back(row);
        }
        out["gamma_table"] = gt;
    }
    write_output(opt.out_path, out.dump(2) + "\n");
    return 0;
}

int cmd_calibrate(const cli_options& opt) {
    if (!opt.theta) throw tdpb::input_error("calibrate needs --theta");
    auto f_alt = tdpb::alt_pvalue_dist::t_test_two_sided(
        tdpb::t_dist_params::from_effect_size(*opt.theta, opt.n_obs));
    auto cal = tdpb::select_critical_vector(build_calibration_spec(opt, opt.m, f_alt));

    json out;
    out["family"] = tdpb::family_name(cal.cv.family);
    out["lambda"] = cal.cv.lambda;
    if (std::isnan(cal.cv.beta))
        out["beta"] = nullptr;
    else
        out["beta"] = cal.cv.beta;
    out["gamma_star"] = cal.gamma_star;
    out["objective_mean"] = cal.objective_mean;
    out["objective_var"] = cal.objective_var;
    out["critical_vector"] = cal.cv.values;
    json diag = json::array();
    for (const auto& p : cal.diagnostics) {
        json row;
        if (std::isnan(p.beta))
            row["beta"] = nullptr;
        else
            row["beta"] = p.beta;
        row["lambda"] = p.lambda;
        row["attainable"] = p.attainable;
        row["gamma_star"] = p.gamma_star;
        row["objective_mean"] = p.objective_mean;
        row["objective_var"] = p.objective_var;
        diag.push_back(row);
    }
    out["diagnostics"] = diag;
    if (opt.emit_gamma_table) {
        json gt = json::array();
        for (int k = 0; k <= cal.table.m(); ++k) {
            json row;
            row["m1_candidate"] = k;
            row["gamma"] = cal.table.gammas[k].value();
            row["ell"] = cal.table.ell[k];
            gt.push_back(row);
        }
        out["gamma_table"] = gt;
    }
    write_output(opt.out_path, out.dump(2) + "\n");
    return 0;
}

int cmd_simulate(const cli_options& opt, const CLI::App* sub) {
    tdpb::scenario_config config;
    if (!opt.config_path.empty()) {
        std::ifstream in(opt.config_path);
        if (!in) throw tdpb::input_error("cannot open config '" + opt.config_path + "'");
        config = tdpb::scenario_from_config(tdpb::read_key_value_config(in));
    }
    auto given = [&](const char* name) { return sub->count(name) > 0; };
    if (given("--n-obs")) config.n_obs = opt.n_obs;
    if (given("--m")) config.m = opt.m;
    if (given("--m1")) config.m1 = opt.m1;
    if (given("--theta")) config.theta = opt.theta.value();
    if (given("--rho")) config.rho = opt.rho;
    if (given("--theta-assumed")) config.theta_assumed = opt.theta_assumed;
    if (given("--alpha")) config.alpha = opt.alpha;
    if (given("--reps")) config.replications = opt.replications;
    if (given("--seed")) config.seed = opt.seed;
    if (given("--methods")) config.methods = tdpb::parse_method_list(opt.methods_spec);
    if (config.methods.empty()) config.methods = {tdpb::method_spec::goeman_solari()};

    auto summary = tdpb::run_scenario(config);
    std::ostringstream os;
    tdpb::write_scenario_csv(os, summary);
    write_output(opt.out_path, os.str());
    return 0;
}

int cmd_estimate_theta(const cli_options& opt) {
    auto table = tdpb::read_pvalue_csv_file(opt.pvalues_path);
    if (!table.has_tvalues)
        throw tdpb::input_error("estimate-theta needs a 't' column in the input CSV");
    if (opt.threshold_spec.empty()) throw tdpb::input_error("estimate-theta needs --threshold");
    auto rule = parse_threshold_rule(opt.threshold_spec);
    auto est = tdpb::estimate_theta(table.tvalues, table.pvalues, rule, opt.n_obs);

    json out;
    out["theta_hat"] = est.theta_hat;
    out["mu_hat"] = est.mu_hat;
    out["n_selected"] = est.n_selected;
    out["m"] = static_cast<int>(table.pvalues.size());
    out["n_obs"] = est.sample_size;
    out["nu"] = est.nu;
    out["threshold"] = opt.threshold_spec;
    if (!opt.split_spec.empty()) {
        auto sizes = parse_double_list(opt.split_spec, "split sizes");
        if (sizes.size() != 2) throw tdpb::input_error("--split wants Ne,Nb");
        auto [est_idx, bound_idx] =
            tdpb::split_indices(opt.n_obs, static_cast<int>(sizes[0]),
                                static_cast<int>(sizes[1]), opt.seed);
        json split;
        split["estimation_indices"] = est_idx;
        split["bound_indices"] = bound_idx;
        split["seed"] = opt.seed;
        out["split"] = split;
    }
    write_output(opt.out_path, out.dump(2) + "\n");
    return 0;
}

int cmd_dist_r(const cli_options& opt) {
    tdpb::critical_vector cv;
    if (!opt.thresholds_csv.empty()) {
        cv = tdpb::make_custom_critical_vector(
            parse_double_list(opt.thresholds_csv, "threshold"));
    } else {
        if (!opt.lambda_value) throw tdpb::input_error("dist-r needs --lambda or --thresholds");
        auto family = tdpb::parse_family(opt.family);
        if (family == tdpb::cv_family::aorc || family == tdpb::cv_family::exp_curve) {
            if (!opt.beta_value) throw tdpb::input_error("this family needs --beta");
            cv = tdpb::make_critical_vector(family, *opt.lambda_value, *opt.beta_value, opt.m);
        } else {
            cv = tdpb::make_critical_vector(family, *opt.lambda_value, opt.m);
        }
    }
    const int m = cv.m();
    if (opt.m1 < 0 || opt.m1 > m) throw tdpb::input_error("--m1 must be in [0, m]");

    tdpb::alt_pvalue_dist f_alt = tdpb::alt_pvalue_dist::uniform();
    if (opt.theta)
        f_alt = tdpb::alt_pvalue_dist::t_test_two_sided(
            tdpb::t_dist_params::from_effect_size(*opt.theta, opt.n_obs));

    auto pmf = tdpb::exact_rejection_pmf({m, opt.m1, f_alt}, cv);
    auto [mean, var] = tdpb::rejection_moments(pmf, 1.0);

    std::ostringstream os;
    os << "l,probability\n";
    char buf[48];
    for (int l = 0; l <= m; ++l) {
        std::snprintf(buf, sizeof(buf), "%d,%.12g\n", l, pmf.probs[l]);
        os << buf;
    }
    std::snprintf(buf, sizeof(buf), "# mean=%.10g variance=%.10g\n", mean, var);
    os << buf;
    write_output(opt.out_path, os.str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"TDP lower confidence bounds from the exact step-up rejection-count "
                 "distribution"};
    app.require_subcommand(1);
    cli_options opt;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--alpha", opt.alpha, "significance level in (0,1)");
        sub->add_option("--out", opt.out_path, "output file (default: stdout)");
        sub->add_option("--seed", opt.seed, "RNG seed");
    };
    auto add_calibration_flags = [&](CLI::App* sub) {
        sub->add_option("--family", opt.family, "critical vector family: bh, by, aorc, exp");
        sub->add_option("--gamma-target", opt.gamma_target, "gamma* target in (0,1]");
        sub->add_option("--beta-grid", opt.beta_grid_csv,
                        "comma list of beta values for two-parameter families");
        sub->add_option("--lambda-lo", opt.lambda_lo, "lambda search lower end");
        sub->add_option("--lambda-hi", opt.lambda_hi, "lambda search upper end");
        sub->add_option("--lambda-tol", opt.lambda_tol, "lambda bisection tolerance");
        sub->add_flag("--emit-gamma-table", opt.emit_gamma_table,
                      "include the full gamma table in the report");
    };

    auto* bound = app.add_subcommand("bound", "confidence bound from a p-value CSV (id,p[,t])");
    bound->add_option("--pvalues", opt.pvalues_path, "input CSV")->required();
    bound->add_option("--theta", opt.theta, "assumed effect size");
    bound->add_option("--threshold", opt.threshold_spec,
                      "estimate theta with quantile:w | fixed:c | bonferroni:a | sidak:a");
    bound->add_option("--n-obs", opt.n_obs, "sample size N behind the t-tests")->required();
    add_calibration_flags(bound);
    add_common(bound);

    auto* calibrate = app.add_subcommand("calibrate", "select a critical vector from a family");
    calibrate->add_option("--m", opt.m, "number of hypotheses")->required();
    calibrate->add_option("--theta", opt.theta, "assumed effect size")->required();
    calibrate->add_option("--n-obs", opt.n_obs, "sample size N")->required();
    add_calibration_flags(calibrate);
    add_common(calibrate);

    auto* simulate = app.add_subcommand("simulate", "run a replication study scenario");
    simulate->add_option("--config", opt.config_path, "key=value scenario file");
    simulate->add_option("--n-obs", opt.n_obs, "sample size N");
    simulate->add_option("--m", opt.m, "number of hypotheses");
    simulate->add_option("--m1", opt.m1, "number of true discoveries");
    simulate->add_option("--theta", opt.theta, "true effect size");
    simulate->add_option("--rho", opt.rho, "equicorrelation in [0,1)");
    simulate->add_option("--theta-assumed", opt.theta_assumed,
                         "effect size assumed by the method (default: theta)");
    simulate->add_option("--reps", opt.replications, "number of replications B");
    simulate->add_option("--methods", opt.methods_spec,
                         "comma list: gs or <family>:<gamma-target>, e.g. bh:1,exp:0.95,gs");
    add_common(simulate);

    auto* estimate = app.add_subcommand("estimate-theta", "effect size from t/p maps");
    estimate->add_option("--input", opt.pvalues_path, "CSV with id,p,t columns")->required();
    estimate->add_option("--n-obs", opt.n_obs, "sample size N")->required();
    estimate->add_option("--threshold", opt.threshold_spec,
                         "quantile:w | fixed:c | bonferroni:a | sidak:a")
        ->required();
    estimate->add_option("--split", opt.split_spec,
                         "Ne,Nb: also emit a seeded subject-index split of {0..N-1}");
    add_common(estimate);

    auto* dist = app.add_subcommand("dist-r", "exact pmf of the rejection count R");
    dist->add_option("--m", opt.m, "number of hypotheses");
    dist->add_option("--m1", opt.m1, "alternative count")->required();
    dist->add_option("--theta", opt.theta, "effect size for F (omit for uniform)");
    dist->add_option("--n-obs", opt.n_obs, "sample size N");
    dist->add_option("--family", opt.family, "family: bh, by, aorc, exp");
    dist->add_option("--lambda", opt.lambda_value, "family parameter lambda");
    dist->add_option("--beta", opt.beta_value, "family parameter beta");
    dist->add_option("--thresholds", opt.thresholds_csv,
                     "explicit comma list t_1,...,t_m (overrides --family)");
    add_common(dist);

    try {
        app.parse(argc, argv);
        if (bound->parsed()) return cmd_bound(opt);
        if (calibrate->parsed()) return cmd_calibrate(opt);
        if (simulate->parsed()) return cmd_simulate(opt, simulate);
        if (estimate->parsed()) return cmd_estimate_theta(opt);
        if (dist->parsed()) return cmd_dist_r(opt);
        return 2;
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const tdpb::input_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const tdpb::parameter_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const tdpb::dimension_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const tdpb::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const tdpb::validity_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
