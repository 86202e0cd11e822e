#pragma once

#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "tdpb/common.hpp"
#include "tdpb/sim.hpp"

namespace tdpb {

/// Malformed input file; message carries line-level diagnostics.
struct input_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    fields.push_back(cur);
    return fields;
}

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline double parse_double(const std::string& field, int line_no, const char* what) {
    std::string t = trim(field);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc{} || ptr != t.data() + t.size()) {
        std::ostringstream msg;
        msg << "line " << line_no << ": cannot parse " << what << " from '" << field << "'";
        throw input_error(msg.str());
    }
    return value;
}

} // namespace detail

struct pvalue_table {
    std::vector<std::string> ids;
    std::vector<double> pvalues;
    std::vector<double> tvalues; // empty when the file has no t column
    bool has_tvalues = false;
};

/// CSV with a header naming columns id, p and optionally t (any order).
inline pvalue_table read_pvalue_csv(std::istream& is) {
    pvalue_table table;
    std::string line;
    if (!std::getline(is, line)) throw input_error("line 1: missing header row");
    auto header = detail::split_csv_line(line);
    int id_col = -1, p_col = -1, t_col = -1;
    for (int i = 0; i < static_cast<int>(header.size()); ++i) {
        std::string h = detail::trim(header[i]);
        if (h == "id") id_col = i;
        else if (h == "p") p_col = i;
        else if (h == "t") t_col = i;
    }
    if (p_col < 0) throw input_error("line 1: header must name a 'p' column");
    table.has_tvalues = t_col >= 0;

    int line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        auto fields = detail::split_csv_line(line);
        int needed = std::max(p_col, std::max(id_col, t_col)) + 1;
        if (static_cast<int>(fields.size()) < needed) {
            std::ostringstream msg;
            msg << "line " << line_no << ": expected at least " << needed << " fields, got "
                << fields.size();
            throw input_error(msg.str());
        }
        double p = detail::parse_double(fields[p_col], line_no, "p-value");
        if (!(p >= 0.0 && p <= 1.0)) {
            std::ostringstream msg;
            msg << "line " << line_no << ": p-value " << p << " outside [0,1]";
            throw input_error(msg.str());
        }
        table.pvalues.push_back(p);
        table.ids.push_back(id_col >= 0 ? detail::trim(fields[id_col])
                                        : std::to_string(line_no - 1));
        if (table.has_tvalues)
            table.tvalues.push_back(detail::parse_double(fields[t_col], line_no, "t-value"));
    }
    if (table.pvalues.empty()) throw input_error("no data rows");
    return table;
}

inline pvalue_table read_pvalue_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open '" + path + "'");
    return read_pvalue_csv(in);
}

/// key=value configuration ( '#' comments, blank lines ignored ).
inline std::map<std::string, std::string> read_key_value_config(std::istream& is) {
    std::map<std::string, std::string> kv;
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto eq = t.find('=');
        if (eq == std::string::npos) {
            std::ostringstream msg;
            msg << "line " << line_no << ": expected key=value, got '" << t << "'";
            throw input_error(msg.str());
        }
        kv[detail::trim(t.substr(0, eq))] = detail::trim(t.substr(eq + 1));
    }
    return kv;
}

inline cv_family parse_family(const std::string& name) {
    if (name == "bh") return cv_family::bh;
    if (name == "by") return cv_family::by;
    if (name == "aorc") return cv_family::aorc;
    if (name == "exp") return cv_family::exp_curve;
    throw input_error("unknown family '" + name + "' (expected bh, by, aorc or exp)");
}

/// "gs" or "<family>:<gamma-target>" tokens, comma separated.
inline std::vector<method_spec> parse_method_list(const std::string& text) {
    std::vector<method_spec> methods;
    std::string cur;
    std::istringstream is(text);
    while (std::getline(is, cur, ',')) {
        std::string tok = detail::trim(cur);
        if (tok.empty()) continue;
        if (tok == "gs" || tok == "GS") {
            methods.push_back(method_spec::goeman_solari());
            continue;
        }
        auto colon = tok.find(':');
        std::string fam = colon == std::string::npos ? tok : tok.substr(0, colon);
        double target = 1.0;
        if (colon != std::string::npos)
            target = detail::parse_double(tok.substr(colon + 1), 0, "gamma target");
        methods.push_back(method_spec::step_up(parse_family(fam), target));
    }
    if (methods.empty()) throw input_error("empty method list");
    return methods;
}

/// Scenario from key=value pairs; unknown keys are rejected so typos fail
/// loudly.
inline scenario_config scenario_from_config(const std::map<std::string, std::string>& kv) {
    scenario_config config;
    for (const auto& [key, value] : kv) {
        if (key == "N") config.n_obs = std::stoi(value);
        else if (key == "m") config.m = std::stoi(value);
        else if (key == "m1") config.m1 = std::stoi(value);
        else if (key == "theta") config.theta = std::stod(value);
        else if (key == "rho") config.rho = std::stod(value);
        else if (key == "theta_assumed") config.theta_assumed = std::stod(value);
        else if (key == "alpha") config.alpha = std::stod(value);
        else if (key == "B") config.replications = std::stoi(value);
        else if (key == "seed") config.seed = std::stoull(value);
        else if (key == "methods") config.methods = parse_method_list(value);
        else throw input_error("unknown config key '" + key + "'");
    }
    return config;
}

} // namespace tdpb
