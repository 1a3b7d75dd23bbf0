#include "qbm/io.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <ctime>
#include <fstream>
#include <sstream>

namespace qbm::io {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::string iso_now() {
    auto now = std::chrono::system_clock::now();
    std::time_t tt = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&tt));
    return buf;
}

}  // namespace

CsvWriter::CsvWriter(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void CsvWriter::set_meta(const std::string& key, const std::string& value) {
    meta_.emplace_back(key, value);
}

void CsvWriter::add_row(const std::vector<double>& values) {
    if (values.size() != columns_.size())
        throw DomainError("CsvWriter: row width does not match the header");
    rows_.push_back(values);
}

std::string CsvWriter::to_string() const {
    std::ostringstream os;
    os << "# schema=" << kCsvSchema << "\n";
    os << "# generated=" << iso_now() << "\n";
    for (const auto& [k, v] : meta_) os << "# " << k << "=" << v << "\n";
    for (size_t i = 0; i < columns_.size(); ++i)
        os << columns_[i] << (i + 1 == columns_.size() ? "\n" : ",");
    for (const auto& row : rows_) {
        for (size_t i = 0; i < row.size(); ++i)
            os << format_double(row[i]) << (i + 1 == row.size() ? "\n" : ",");
    }
    return os.str();
}

void CsvWriter::write(const std::string& path) const {
    std::ofstream f(path);
    if (!f) throw DomainError("cannot open output file: " + path);
    f << to_string();
}

Config Config::parse_string(const std::string& text) {
    Config cfg;
    std::istringstream is(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto ltrim = line.find_first_not_of(" \t\r");
        if (ltrim == std::string::npos) continue;
        auto rtrim = line.find_last_not_of(" \t\r");
        line = line.substr(ltrim, rtrim - ltrim + 1);
        if (line.front() == '[') {
            if (line.back() != ']')
                throw DomainError("config: malformed section at line " + std::to_string(lineno));
            section = line.substr(1, line.size() - 2);
            continue;
        }
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw DomainError("config: expected key = value at line " + std::to_string(lineno));
        std::string key = line.substr(0, eq);
        std::string val = line.substr(eq + 1);
        auto strip = [](std::string s) {
            size_t a = s.find_first_not_of(" \t");
            size_t b = s.find_last_not_of(" \t");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        key = strip(key);
        val = strip(val);
        if (key.empty()) throw DomainError("config: empty key at line " + std::to_string(lineno));
        cfg.values_[section + "." + key] = val;
    }
    return cfg;
}

Config Config::parse_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw DomainError("cannot open config file: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_string(ss.str());
}

std::optional<std::string> Config::take(const std::string& section, const std::string& key) {
    auto it = values_.find(section + "." + key);
    if (it == values_.end()) return std::nullopt;
    std::string v = it->second;
    values_.erase(it);
    return v;
}

bool Config::empty_leftovers() const { return values_.empty(); }

std::vector<std::string> Config::leftover_keys() const {
    std::vector<std::string> keys;
    for (const auto& [k, _] : values_) keys.push_back(k);
    return keys;
}

namespace {

void param_meta(CsvWriter& w, const ModelParams& p) {
    w.set_meta("omega_r", format_double(p.omega_r));
    w.set_meta("gamma", format_double(p.gamma));
    w.set_meta("lambda", format_double(p.lambda));
    w.set_meta("temperature", format_double(p.temperature));
    w.set_meta("omega_bare_sq", format_double(p.omega_sq));
    w.set_meta("units", "omega_r (hbar = k_B = 1)");
}

}  // namespace

std::string trajectory_csv(const MomentTrajectory& tr, const ModelParams& p) {
    CsvWriter w({"t", "mean_q", "mean_p", "q2", "p2", "pq_sym"});
    param_meta(w, p);
    w.set_meta("method", method_name(tr.method));
    for (size_t i = 0; i < tr.t_grid.size(); ++i)
        w.add_row({tr.t_grid[i], tr.mean_q[i], tr.mean_p[i], tr.q2[i], tr.p2[i], tr.pq_sym[i]});
    return w.to_string();
}

std::string sweep_csv(const SweepResult& sweep) {
    CsvWriter w({"lambda", "temperature", "stable", "q2_exact", "p2_exact", "q2_markov",
                 "p2_markov", "q2_nonmarkov", "p2_nonmarkov", "ratio_q2_m", "ratio_p2_m",
                 "ratio_q2_nm", "ratio_p2_nm"});
    w.set_meta("gamma", format_double(sweep.gamma));
    w.set_meta("omega_r", format_double(sweep.omega_r));
    w.set_meta("units", "omega_r (hbar = k_B = 1)");
    for (const auto& pt : sweep.points) {
        w.add_row({pt.lambda, pt.temperature, pt.stable ? 1.0 : 0.0, pt.exact.q2, pt.exact.p2,
                   pt.markov.q2, pt.markov.p2, pt.nonmarkov.q2, pt.nonmarkov.p2, pt.ratio_q2_m,
                   pt.ratio_p2_m, pt.ratio_q2_nm, pt.ratio_p2_nm});
    }
    return w.to_string();
}

std::string stationary_csv(const std::vector<StationaryMoments>& rows, const ModelParams& p) {
    CsvWriter meta({"method", "q2", "p2", "pq_sym"});
    param_meta(meta, p);
    std::string head = meta.to_string();  // schema + metadata + header, no rows
    std::ostringstream full;
    full << head;
    for (const auto& r : rows)
        full << method_name(r.method) << "," << format_double(r.q2) << ","
             << format_double(r.p2) << "," << format_double(r.pq_sym) << "\n";
    return full.str();
}

std::string validity_json(const ValidityReport& r, const std::string& preset_name) {
    nlohmann::json j;
    if (!preset_name.empty()) j["preset"] = preset_name;
    j["q_factor"] = r.q_factor;
    j["ratio_lambda_omega"] = r.ratio_lambda_omega;
    j["weak_coupling"] = {{"value", r.weak_coupling_value},
                          {"ok", r.weak_coupling_ok},
                          {"threshold", r.thresholds.weak_coupling}};
    j["born"] = {{"value", r.born_value}, {"ok", r.born_ok}, {"threshold", r.thresholds.born}};
    j["coarse_grain_ok"] = r.coarse_grain_ok;
    if (r.lambda_budget > 0.0) j["lambda_budget_mhz"] = r.lambda_budget;
    return j.dump(2) + "\n";
}

std::string oracle_json(const OracleMeasurement& m, const DiscreteBath& bath,
                        const ModelParams& p, double window_start, double window_end) {
    nlohmann::json j;
    j["params"] = {{"omega_r", p.omega_r},
                   {"gamma", p.gamma},
                   {"lambda", p.lambda},
                   {"temperature", p.temperature}};
    j["bath"] = {{"n_modes", bath.n_modes},
                 {"omega_max", bath.omega_max},
                 {"recurrence_time", bath.recurrence_time}};
    j["window"] = {window_start, window_end};
    j["moments"] = {{"q2", m.moments.q2}, {"p2", m.moments.p2}, {"pq_sym", m.moments.pq_sym}};
    j["interaction_energy"] = m.interaction_energy;
    j["energy_flow"] = {{"delta_e_system", m.flow.delta_e_system},
                        {"delta_e_interaction", m.flow.delta_e_interaction},
                        {"delta_e_bath", m.flow.delta_e_bath}};
    j["energy_drift"] = m.energy_drift;
    return j.dump(2) + "\n";
}

std::string grid_hash(const std::vector<double>& lambdas, const std::vector<double>& temps) {
    uint64_t h = 1469598103934665603ull;
    auto mix = [&](double v) {
        uint64_t bits;
        static_assert(sizeof(bits) == sizeof(v));
        std::memcpy(&bits, &v, sizeof(bits));
        for (int i = 0; i < 8; ++i) {
            h ^= (bits >> (8 * i)) & 0xff;
            h *= 1099511628211ull;
        }
    };
    for (double v : lambdas) mix(v);
    for (double v : temps) mix(v);
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string output_dir_from_env() {
    const char* dir = std::getenv("QBM_OUTPUT_DIR");
    return dir ? dir : ".";
}

}  // namespace qbm::io
