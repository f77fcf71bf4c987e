#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "sdri/error.hpp"
#include "sdri/io.hpp"

using namespace sdri;

namespace {

std::vector<double> parse_list(const std::string& s, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError(ErrorKind::ParseError, what + ": '" + item + "' is not a number");
        }
    }
    if (out.empty()) throw ConfigError(ErrorKind::ParseError, what + ": empty list");
    return out;
}

int cmd_run(const std::string& path) {
    const RunConfig c = parse_config(path);
    const RunOutcome r = run(c);
    const auto& e = r.state.best_energy;
    std::cout << "status " << to_string(r.state.status) << ", " << r.state.iteration << " iterations, " << r.state.accepted
              << " accepted\n"
              << std::setprecision(10) << "best F " << e.energy() << "  F_lambda " << e.total() << "  |A| "
              << area(r.state.best) << "  v " << r.problem.v << "\n"
              << "artifacts in " << r.output.string() << "\n";
    return 0;
}

int cmd_validate(const std::string& path) {
    const RunConfig c = parse_config(path);
    const Problem p = build_problem(c);
    const auto rep = validate_hypotheses(p.phi, p.beta, p.domain);
    std::cout << "config ok: preset " << p.preset << ", v " << p.v << ", lambda " << p.lambda << ", m " << p.m << ", h "
              << p.elastic.h << "\n"
              << "phi " << p.phi.family_name() << " c1 " << p.phi.c1() << " c2 " << p.phi.c2() << "; adhesion margin "
              << rep.h2_margin << "\n";
    return 0;
}

int cmd_sweep(const std::string& path, const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) throw ConfigError(ErrorKind::ParseError, "--param: expected lambda=... or m=...");
    const std::string name = spec.substr(0, eq);
    SweepParam param;
    if (name == "lambda") param = SweepParam::Lambda;
    else if (name == "m") param = SweepParam::M;
    else throw ConfigError(ErrorKind::ValidationError, "--param: unknown parameter '" + name + "'");
    const auto values = parse_list(spec.substr(eq + 1), "--param");
    for (double x : values) {
        if (param == SweepParam::Lambda && x < 0.0) throw ConfigError(ErrorKind::ValidationError, "lambda: must be >= 0");
        if (param == SweepParam::M && (x < 1.0 || x != std::floor(x)))
            throw ConfigError(ErrorKind::ValidationError, "m: must be an integer >= 1");
    }
    const RunConfig c = parse_config(path);
    const auto rows = run_sweep(c, param, values);
    std::cout << name << "  best_F  best_F_lambda  area  components\n" << std::setprecision(10);
    for (const auto& r : rows)
        std::cout << r.param << "  " << r.best_f << "  " << r.best_f_lambda << "  " << r.area << "  " << r.components << "\n";
    std::cout << "sweep.csv in " << c.output << "\n";
    return 0;
}

int cmd_probe(const std::string& suite, const std::string& filter, const std::string& betas, const ProbeOptions& opt,
              const std::string& out) {
    const auto reports = run_probe_suite(suite, filter, opt, betas.empty() ? std::vector<double>{} : parse_list(betas, "--beta"));
    std::filesystem::create_directories(out);
    std::ofstream(std::filesystem::path(out) / "probe_report.json") << probe_reports_json(reports);
    print_probe_table(std::cout, reports);
    for (const auto& r : reports)
        if (!r.passed()) return 5;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sharp-interface simulator for crystals with surface, adhesion and elastic energy"};
    app.require_subcommand(1);

    std::string config_path;
    auto* run_cmd = app.add_subcommand("run", "minimize the configured problem and write artifacts");
    run_cmd->add_option("config", config_path, "config JSON")->required();

    auto* val_cmd = app.add_subcommand("validate", "parse and check a config without running");
    val_cmd->add_option("config", config_path, "config JSON")->required();

    std::string sweep_spec;
    auto* sweep_cmd = app.add_subcommand("sweep", "one run per parameter value, writes sweep.csv");
    sweep_cmd->add_option("config", config_path, "config JSON")->required();
    sweep_cmd->add_option("--param", sweep_spec, "lambda=v1,v2,... or m=1,2,...")->required();

    std::string suite, filter, betas, out = "sdri_probe";
    ProbeOptions popt;
    auto* probe_cmd = app.add_subcommand("probe", "run a validation suite (lsc, wulff, young, lambda, m, all)");
    probe_cmd->add_option("suite", suite, "suite name")->required();
    probe_cmd->add_option("--filter", filter, "only probes whose name contains this");
    probe_cmd->add_option("--beta", betas, "comma-separated adhesion values for the Young probe");
    probe_cmd->add_option("--iterations", popt.iterations, "optimizer iterations per probe run");
    probe_cmd->add_option("--seed", popt.seed, "random seed");
    probe_cmd->add_option("--threads", popt.threads, "worker threads (capped by SDRI_THREADS)");
    probe_cmd->add_option("--out", out, "directory for probe_report.json");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) return cmd_run(config_path);
        if (*val_cmd) return cmd_validate(config_path);
        if (*sweep_cmd) return cmd_sweep(config_path, sweep_spec);
        if (*probe_cmd) return cmd_probe(suite, filter, betas, popt, out);
    } catch (const ProbeError& e) {
        std::cerr << "sdri: " << e.what() << "\n";
        return 5;
    } catch (const Error& e) {
        std::cerr << "sdri: " << e.what() << "\n";
        return exit_code(e);
    } catch (const std::exception& e) {
        std::cerr << "sdri: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
