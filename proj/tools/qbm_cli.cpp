// Command-line driver: stationary tables, transient trajectories, ratio
// sweeps, validity reports, interaction energy, discrete-bath benchmarks and
// figure-data regeneration. All outputs are deterministic CSV/JSON.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "qbm/io.hpp"

namespace {

using namespace qbm;

struct ParamFlags {
    double omega_r = 0.0;
    double omega_bare = 0.0;
    double gamma = 0.0;
    double lambda = 0.0;
    double temperature = -1.0;
};

void add_param_flags(CLI::App* cmd, ParamFlags& f) {
    cmd->add_option("--omega-r", f.omega_r, "renormalized frequency");
    cmd->add_option("--omega-bare", f.omega_bare, "bare frequency (alternative entry)");
    cmd->add_option("--gamma", f.gamma, "relaxation rate");
    cmd->add_option("--lambda", f.lambda, "bath bandwidth (cutoff)");
    cmd->add_option("--temp", f.temperature, "temperature");
}

void merge_config(io::Config& cfg, const std::string& section, ParamFlags& f) {
    auto fill = [&](const char* key, double& slot, bool only_if_unset) {
        auto v = cfg.take(section, key);
        if (v && (!only_if_unset || slot == 0.0)) slot = std::stod(*v);
    };
    fill("omega_r", f.omega_r, true);
    fill("omega_bare", f.omega_bare, true);
    fill("gamma", f.gamma, true);
    fill("lambda", f.lambda, true);
    if (f.temperature < 0.0) {
        auto v = cfg.take(section, "temperature");
        if (v) f.temperature = std::stod(*v);
    }
}

ModelParams make_params(const ParamFlags& f) {
    if (f.temperature < 0.0) throw DomainError("temperature not set");
    if (f.omega_bare > 0.0 && f.omega_r > 0.0)
        throw DomainError("give either --omega-r or --omega-bare, not both");
    if (f.omega_bare > 0.0)
        return derive_params_from_bare(f.omega_bare, f.gamma, f.lambda, f.temperature);
    return derive_params(f.omega_r, f.gamma, f.lambda, f.temperature);
}

std::string out_path(const std::string& dir, const std::string& name) {
    std::filesystem::create_directories(dir);
    return (std::filesystem::path(dir) / name).string();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) throw DomainError("cannot open output file: " + path);
    f << text;
    std::cout << path << "\n";
}

std::vector<double> parse_list(const std::string& csv) {
    std::vector<double> out;
    size_t pos = 0;
    while (pos < csv.size()) {
        size_t comma = csv.find(',', pos);
        out.push_back(std::stod(csv.substr(pos, comma - pos)));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

std::vector<double> logspace(double lo, double hi, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i)
        g[i] = std::pow(10.0, std::log10(lo) + (std::log10(hi) - std::log10(lo)) * i /
                                                   std::max(1, n - 1));
    return g;
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / std::max(1, n - 1);
    return g;
}

int run_cli(int argc, char** argv) {
    CLI::App app{"quantum Brownian motion: exact vs master-equation correlation functions"};
    app.require_subcommand(1);

    std::string config_path, output_dir = io::output_dir_from_env();
    app.add_option("--config", config_path, "flat key=value config with per-subcommand sections");
    app.add_option("--output-dir,-o", output_dir, "output directory (default: QBM_OUTPUT_DIR)");

    // stationary
    auto* cst = app.add_subcommand("stationary", "three-method stationary moment table");
    ParamFlags pst;
    add_param_flags(cst, pst);

    // transient
    auto* ctr = app.add_subcommand("transient", "moment trajectory under one scheme");
    ParamFlags ptr_;
    add_param_flags(ctr, ptr_);
    std::string scheme = "exact";
    double t_max = 50.0, dt = 0.1;
    double i_q2 = 0.5, i_p2 = 0.5, i_pq = 0.0, i_mq = 0.0, i_mp = 0.0;
    double memory_window = 0.0;
    ctr->add_option("--scheme", scheme, "exact | markov | nonmarkov");
    ctr->add_option("--t-max", t_max);
    ctr->add_option("--dt", dt);
    ctr->add_option("--init-q2", i_q2);
    ctr->add_option("--init-p2", i_p2);
    ctr->add_option("--init-pq", i_pq);
    ctr->add_option("--init-mean-q", i_mq);
    ctr->add_option("--init-mean-p", i_mp);
    ctr->add_option("--memory-window", memory_window, "nonmarkov history window (default 60/Lambda)");

    // sweep / figures
    auto* csw = app.add_subcommand("sweep", "ratio sweep over (Lambda, T)");
    ParamFlags psw;
    add_param_flags(csw, psw);
    std::string temps_csv, lambdas_csv;
    int lambda_points = 13, jobs = 1;
    double lambda_min = 10.0, lambda_max = 1e4;
    csw->add_option("--temps", temps_csv, "comma-separated temperatures");
    csw->add_option("--lambdas", lambdas_csv, "explicit comma-separated Lambda grid");
    csw->add_option("--lambda-min", lambda_min);
    csw->add_option("--lambda-max", lambda_max);
    csw->add_option("--lambda-points", lambda_points);
    csw->add_option("--jobs", jobs, "worker pool size");

    auto* cfg_fig = app.add_subcommand("figures", "regenerate the ratio-figure CSV data");
    double fig_gamma = 0.001;
    int fig_jobs = 1;
    cfg_fig->add_option("--gamma", fig_gamma);
    cfg_fig->add_option("--jobs", fig_jobs);

    // validity
    auto* cva = app.add_subcommand("validity", "Born/Markov validity report");
    ParamFlags pva;
    add_param_flags(cva, pva);
    std::string preset;
    double thr_weak = 0.01, thr_born = 0.1;
    cva->add_option("--preset", preset, "groex | teufel | norte");
    cva->add_option("--weak-threshold", thr_weak);
    cva->add_option("--born-threshold", thr_born);

    // interaction
    auto* cin = app.add_subcommand("interaction", "stationary interaction energy");
    ParamFlags pin;
    add_param_flags(cin, pin);
    std::string mode = "leading";
    cin->add_option("--mode", mode, "leading | numerical");

    // oracle
    auto* cor = app.add_subcommand("oracle", "discrete-bath benchmark");
    ParamFlags por;
    add_param_flags(cor, por);
    int n_modes = 1000;
    double omega_max = 0.0, o_tmax = 100.0, o_dt = 0.1, win_start = 60.0, win_end = 100.0;
    cor->add_option("--n-modes", n_modes);
    cor->add_option("--omega-max", omega_max, "default 10*Lambda");
    cor->add_option("--t-max", o_tmax);
    cor->add_option("--dt", o_dt);
    cor->add_option("--window-start", win_start);
    cor->add_option("--window-end", win_end);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << "argument error: " << e.get_name() << "\n";
        return 2;
    }

    io::Config cfg;
    if (!config_path.empty()) cfg = io::Config::parse_file(config_path);

    if (cst->parsed()) {
        merge_config(cfg, "stationary", pst);
        ModelParams p = make_params(pst);
        std::vector<StationaryMoments> rows{stationary_closed(p), stationary_quadrature(p),
                                            stationary_markov(p), stationary_nonmarkov(p)};
        write_text(out_path(output_dir, "stationary.csv"), io::stationary_csv(rows, p));
    } else if (ctr->parsed()) {
        merge_config(cfg, "transient", ptr_);
        ModelParams p = make_params(ptr_);
        InitialMoments init{i_q2, i_p2, i_pq, i_mq, i_mp};
        std::vector<double> grid = linspace(0.0, t_max, static_cast<int>(t_max / dt) + 1);
        MomentTrajectory tr;
        if (scheme == "exact")
            tr = transient_moments(p, init, grid);
        else if (scheme == "markov")
            tr = integrate_markov(p, init, grid);
        else if (scheme == "nonmarkov")
            tr = integrate_nonmarkov(p, init, grid,
                                     memory_window > 0.0 ? memory_window : 60.0 / p.lambda);
        else
            throw DomainError("unknown scheme: " + scheme);
        write_text(out_path(output_dir, "transient_" + scheme + ".csv"),
                   io::trajectory_csv(tr, p));
    } else if (csw->parsed()) {
        merge_config(cfg, "sweep", psw);
        if (psw.omega_r == 0.0) psw.omega_r = 1.0;
        if (psw.temperature < 0.0 && temps_csv.empty()) temps_csv = "0.2,1,5,20";
        std::vector<double> temps =
            temps_csv.empty() ? std::vector<double>{psw.temperature} : parse_list(temps_csv);
        std::vector<double> lambdas = lambdas_csv.empty()
                                          ? logspace(lambda_min, lambda_max, lambda_points)
                                          : parse_list(lambdas_csv);
        SweepResult sweep = ratio_sweep(psw.gamma, psw.omega_r, lambdas, temps, jobs);
        std::string name = "sweep_gamma" + io::format_double(psw.gamma) + "_" +
                           io::grid_hash(lambdas, temps) + ".csv";
        write_text(out_path(output_dir, name), io::sweep_csv(sweep));
    } else if (cfg_fig->parsed()) {
        std::vector<double> lambdas = default_lambda_grid();
        std::vector<double> temps = default_temperature_grid();
        SweepResult sweep = ratio_sweep(fig_gamma, 1.0, lambdas, temps, fig_jobs);
        std::string name = "figures_gamma" + io::format_double(fig_gamma) + ".csv";
        write_text(out_path(output_dir, name), io::sweep_csv(sweep));
    } else if (cva->parsed()) {
        ValidityThresholds thr{thr_weak, thr_born};
        ValidityReport rep;
        if (!preset.empty()) {
            rep = validity_report_preset(preset, thr);
        } else {
            merge_config(cfg, "validity", pva);
            rep = validity_report(make_params(pva), thr);
        }
        write_text(out_path(output_dir, "validity.json"), io::validity_json(rep, preset));
    } else if (cin->parsed()) {
        merge_config(cfg, "interaction", pin);
        ModelParams p = make_params(pin);
        InteractionMode m =
            mode == "numerical" ? InteractionMode::Numerical : InteractionMode::LeadingClosed;
        double hsb = interaction_energy_stationary(p, m);
        EnergyFlow flow = energy_flow(p, m);
        std::ostringstream os;
        os << "{\n  \"interaction_energy\": " << io::format_double(hsb) << ",\n"
           << "  \"delta_e_system\": " << io::format_double(flow.delta_e_system) << ",\n"
           << "  \"delta_e_interaction\": " << io::format_double(flow.delta_e_interaction)
           << ",\n  \"delta_e_bath\": " << io::format_double(flow.delta_e_bath) << "\n}\n";
        write_text(out_path(output_dir, "interaction.json"), os.str());
    } else if (cor->parsed()) {
        merge_config(cfg, "oracle", por);
        ModelParams p = make_params(por);
        if (omega_max == 0.0) omega_max = 10.0 * p.lambda;
        DiscreteBath bath =
            build_bath(BathSpectrum::drude(p.gamma, p.lambda), n_modes, omega_max, o_tmax);
        InitialMoments init;
        double omega = p.omega_bare();
        init.q2 = 0.5 / omega;  // ground state of the bare system Hamiltonian
        init.p2 = 0.5 * omega;
        std::vector<double> grid = linspace(0.0, o_tmax, static_cast<int>(o_tmax / o_dt) + 1);
        auto states = evolve(bath, p, init, grid);
        OracleMeasurement m = measure(states, win_start, win_end);
        write_text(out_path(output_dir, "oracle.json"),
                   io::oracle_json(m, bath, p, win_start, win_end));
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run_cli(argc, argv);
    } catch (const qbm::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const qbm::DomainError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
