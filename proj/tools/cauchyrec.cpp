// Command-line front end: run, tau, sweep, check.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cauchy/experiment.hpp"
#include "cauchy/io.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

struct Options {
    std::string config_path;
    std::string preset;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::vector<std::string> sets;
};

cauchy::Config resolve(const Options& o) {
    cauchy::Config cfg = o.preset.empty() ? cauchy::Config{} : cauchy::preset(o.preset);
    if (!o.config_path.empty()) {
        std::ifstream in(o.config_path);
        if (!in) throw cauchy::ValidationError("cannot read config file " + o.config_path);
        std::stringstream buf;
        buf << in.rdbuf();
        cfg = cauchy::parse_config(buf.str(), cfg);
    }
    for (const auto& kv : o.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw cauchy::ValidationError("--set expects key=value, got '" + kv + "'");
        cauchy::apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (!o.out.empty()) cfg.out = o.out;
    if (o.seed) cfg.noise_seed = *o.seed;
    if (o.threads) cfg.threads = *o.threads;
    return cfg;
}

void report_error(const std::string& kind, const std::string& message, std::optional<double> achieved,
                  const std::filesystem::path& out) {
    nlohmann::ordered_json j{{"status", "error"}, {"kind", kind}, {"message", message}};
    if (achieved) j["achieved"] = *achieved;
    std::cerr << j.dump(2) << "\n";
    if (!out.empty()) {
        try {
            cauchy::write_text(out / "error.json", j.dump(2) + "\n");
        } catch (...) {
        }
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tikhonov reconstruction of harmonic functions from noisy Cauchy data"};
    app.require_subcommand(1);
    Options opt;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config_path, "config file (key = value lines)");
        sub->add_option("--preset", opt.preset, "named preset applied before the config file");
        sub->add_option("--out", opt.out, "output directory");
        sub->add_option("--seed", opt.seed, "noise seed (overrides noise_seed)");
        sub->add_option("--threads", opt.threads, "worker threads");
        sub->add_option("--set", opt.sets, "override one config key, key=value (repeatable)");
    };
    auto* run = app.add_subcommand("run", "reconstruct and write the artifact bundle");
    auto* tau = app.add_subcommand("tau", "indicate function for each tau_configs entry");
    auto* sweep = app.add_subcommand("sweep", "noise sweep: convergence rates at probes");
    auto* check = app.add_subcommand("check", "run the invariant suite");
    auto* presets = app.add_subcommand("presets", "list presets");
    for (auto* s : {run, tau, sweep, check}) add_common(s);
    bool print_config = false;
    run->add_flag("--print-config", print_config, "print the resolved config and exit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    if (presets->parsed()) {
        for (const auto& n : cauchy::preset_names()) std::cout << n << "\n";
        return 0;
    }

    std::filesystem::path out;
    try {
        const cauchy::Config cfg = resolve(opt);
        out = cfg.out;
        if (run->parsed()) {
            if (print_config) {
                std::cout << cauchy::config_text(cfg);
                return 0;
            }
            cauchy::validate(cfg);
            const auto rep = cauchy::run_pipeline(cfg);
            cauchy::write_run_artifacts(rep, cfg.out);
            std::printf("n=%zu m=%zu alpha=%.6g residual_f=%.6g residual_g=%.6g reg_norm=%.6g\n",
                        rep.problem.system.n(), rep.problem.system.m(), rep.trial.result.alpha_used,
                        rep.trial.result.residual_f, rep.trial.result.residual_g, rep.trial.result.reg_norm);
            std::printf("artifacts written to %s\n", cfg.out.string().c_str());
        } else if (tau->parsed()) {
            const auto panels = cauchy::run_tau(cfg);
            cauchy::write_tau_artifacts(cfg, panels, cfg.out);
            for (const auto& p : panels) {
                std::printf("%-20s tau(center)=%.6f reliable nodes=%zu\n", p.sides.to_string().c_str(),
                            cauchy::interpolate(p.field.tau, {0.5 * (cfg.domain.x0 + cfg.domain.x1),
                                                              0.5 * (cfg.domain.y0 + cfg.domain.y1)}),
                            p.region.count());
            }
        } else if (sweep->parsed()) {
            cauchy::validate_sweep(cfg);
            const auto rep = cauchy::run_sweep(cfg);
            cauchy::write_sweep_artifacts(cfg, rep, cfg.out);
            for (const auto& p : rep.probes) {
                std::printf("probe (%.4f, %.4f) tau=%.3f slope=%.3f\n", p.point.x, p.point.y, p.tau, p.slope);
            }
            std::printf("spearman(slope, tau)=%.4f reg_norm slope=%.4f\n", rep.spearman, rep.reg_norm_slope);
        } else if (check->parsed()) {
            bool all = true;
            for (const auto& r : cauchy::run_checks(cfg)) {
                std::printf("%s %s: %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
                all = all && r.pass;
            }
            return all ? 0 : kExitNumerical;
        }
    } catch (const cauchy::ValidationError& e) {
        report_error("validation", e.what(), std::nullopt, out);
        return kExitValidation;
    } catch (const cauchy::NumericalError& e) {
        report_error("numerical", e.what(), e.achieved(), out);
        return kExitNumerical;
    } catch (const std::exception& e) {
        report_error("numerical", e.what(), std::nullopt, out);
        return kExitNumerical;
    }
    return 0;
}
