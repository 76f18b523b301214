#include "cauchy/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "cauchy/io.hpp"
#include "cauchy/parallel.hpp"

namespace cauchy {

namespace {

using ojson = nlohmann::ordered_json;

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

double to_double(const std::string& key, const std::string& text) {
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size() || !std::isfinite(v)) {
        throw ValidationError("invalid number '" + text + "' for key " + key);
    }
    return v;
}

std::uint64_t to_uint(const std::string& key, const std::string& text) {
    std::uint64_t v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        throw ValidationError("invalid nonnegative integer '" + text + "' for key " + key);
    }
    return v;
}

bool to_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    throw ValidationError("invalid boolean '" + text + "' for key " + key);
}

// Accepts "0.015625" or "1/64".
double to_spacing(const std::string& text) {
    const auto slash = text.find('/');
    if (slash == std::string::npos) return to_double("h", text);
    const double num = to_double("h", trim(text.substr(0, slash)));
    const double den = to_double("h", trim(text.substr(slash + 1)));
    if (den == 0.0) throw ValidationError("h has a zero denominator");
    return num / den;
}

template <class T, class F>
std::vector<T> to_list(const std::string& key, const std::string& text, F conv) {
    std::vector<T> out;
    for (const auto& tok : split(text, ',')) out.push_back(conv(key, tok));
    if (out.empty()) throw ValidationError("empty list for key " + key);
    return out;
}

template <class T, class F>
std::string join(const std::vector<T>& v, F fmt, const char* sep = ",") {
    std::string s;
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (k) s += sep;
        s += fmt(v[k]);
    }
    return s;
}

std::string side_dir_name(SideSet s) {
    std::string name = "tau_" + s.to_string();
    std::replace(name.begin(), name.end(), ',', '_');
    return name;
}

}  // namespace

void apply_setting(Config& cfg, const std::string& key, const std::string& raw) {
    const std::string value = trim(raw);
    if (key == "domain") {
        const auto v = to_list<double>(key, value, to_double);
        if (v.size() != 4) throw ValidationError("domain needs four numbers x0,y0,x1,y1");
        cfg.domain = make_rect(v[0], v[1], v[2], v[3]);
    } else if (key == "h") {
        const double h = to_spacing(value);
        if (!(h > 0.0)) throw ValidationError("h must be positive");
        cfg.h = h;
        cfg.h_text = value;
    } else if (key == "gamma_sides") {
        cfg.gamma_sides = SideSet::parse(value);
    } else if (key == "tilde_padding_cells") {
        cfg.tilde_padding_cells = to_uint(key, value);
    } else if (key == "basis") {
        cfg.basis = parse_basis_kind(value);
    } else if (key == "indicator_arcs_per_side") {
        cfg.indicator_arcs_per_side = to_uint(key, value);
    } else if (key == "exact") {
        (void)ExactSolution::parse(value);
        cfg.exact = value;
    } else if (key == "noise_level") {
        cfg.noise_level = to_double(key, value);
    } else if (key == "noise_seed") {
        cfg.noise_seed = to_uint(key, value);
    } else if (key == "noise_model") {
        cfg.noise_model = parse_noise_model(value);
    } else if (key == "alpha_rule") {
        if (value == "a_priori") {
            if (cfg.alpha_rule.kind != AlphaRule::Kind::a_priori) cfg.alpha_rule = AlphaRule::a_priori(1.0);
        } else if (value == "fixed") {
            if (cfg.alpha_rule.kind != AlphaRule::Kind::fixed) cfg.alpha_rule = AlphaRule::fixed(0.0);
        } else {
            throw ValidationError("unknown alpha_rule '" + value + "' (expected a_priori or fixed)");
        }
    } else if (key == "alpha_c") {
        cfg.alpha_rule = AlphaRule::a_priori(to_double(key, value));
    } else if (key == "alpha") {
        cfg.alpha_rule = AlphaRule::fixed(to_double(key, value));
    } else if (key == "reg_mode") {
        cfg.reg_mode = parse_reg_mode(value);
    } else if (key == "weight_f") {
        cfg.weight_f = to_double(key, value);
    } else if (key == "weight_g") {
        cfg.weight_g = to_double(key, value);
    } else if (key == "normal_order") {
        cfg.normal_order = static_cast<int>(to_uint(key, value));
    } else if (key == "solver") {
        cfg.solver = parse_backend(value);
    } else if (key == "solver_tol") {
        cfg.solver_tol = to_double(key, value);
    } else if (key == "threshold") {
        cfg.threshold = to_double(key, value);
    } else if (key == "tau0") {
        cfg.tau0 = to_double(key, value);
    } else if (key == "exclusion_band") {
        cfg.exclusion_band = static_cast<int>(to_uint(key, value));
    } else if (key == "envelope_c_max") {
        cfg.envelope_c_max = value == "auto" ? std::nullopt : std::optional<double>(to_double(key, value));
    } else if (key == "sweep_eps") {
        cfg.sweep_eps = to_list<double>(key, value, to_double);
    } else if (key == "sweep_seeds") {
        cfg.sweep_seeds = to_list<std::uint64_t>(key, value, to_uint);
    } else if (key == "probe_taus") {
        cfg.probe_taus = to_list<double>(key, value, to_double);
    } else if (key == "tau_configs") {
        std::vector<SideSet> sets;
        for (const auto& tok : split(value, ';')) sets.push_back(SideSet::parse(tok));
        cfg.tau_configs = std::move(sets);
    } else if (key == "emit_matrices") {
        cfg.emit_matrices = to_bool(key, value);
    } else if (key == "out") {
        if (value.empty()) throw ValidationError("out must not be empty");
        cfg.out = value;
    } else if (key == "threads") {
        cfg.threads = static_cast<unsigned>(to_uint(key, value));
    } else {
        throw ValidationError("unknown config key '" + key + "'");
    }
}

Config parse_config(const std::string& text, Config base) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        const std::string body = trim(line.substr(0, hash));
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw ValidationError("config line " + std::to_string(lineno) + ": expected key = value");
        }
        try {
            apply_setting(base, trim(body.substr(0, eq)), body.substr(eq + 1));
        } catch (const ValidationError& e) {
            throw ValidationError("config line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return base;
}

std::vector<std::string> preset_names() { return {"paper-sec5-one-side", "paper-sec5-two-sides"}; }

Config preset(const std::string& name) {
    Config c;
    c.exact = "exp_cos(4,0.2)";
    c.h = 1.0 / 64.0;
    c.h_text = "1/64";
    c.tilde_padding_cells = 1;  // 4 * 66 = 264 hat functions
    c.noise_level = 0.01;
    c.noise_model = NoiseModel::uniform;
    c.alpha_rule = AlphaRule::a_priori(0.02);
    if (name == "paper-sec5-one-side") {
        c.gamma_sides = SideSet{Side::bottom};
    } else if (name == "paper-sec5-two-sides") {
        c.gamma_sides = SideSet{Side::bottom, Side::top};
    } else {
        std::string known;
        for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
        throw ValidationError("unknown preset '" + name + "' (known: " + known + ")");
    }
    return c;
}

std::vector<std::pair<std::string, std::string>> config_entries(const Config& c) {
    const auto d = [](double v) { return shortest_double(v); };
    const auto u = [](std::uint64_t v) { return std::to_string(v); };
    std::vector<std::pair<std::string, std::string>> e;
    e.emplace_back("domain", join(std::vector<double>{c.domain.x0, c.domain.y0, c.domain.x1, c.domain.y1}, d));
    e.emplace_back("h", c.h_text);
    e.emplace_back("gamma_sides", c.gamma_sides.to_string());
    e.emplace_back("tilde_padding_cells", u(c.tilde_padding_cells));
    e.emplace_back("basis", std::string(basis_kind_name(c.basis)));
    e.emplace_back("indicator_arcs_per_side", u(c.indicator_arcs_per_side));
    e.emplace_back("exact", c.exact);
    e.emplace_back("noise_level", d(c.noise_level));
    e.emplace_back("noise_seed", u(c.noise_seed));
    e.emplace_back("noise_model", std::string(noise_model_name(c.noise_model)));
    if (c.alpha_rule.kind == AlphaRule::Kind::a_priori) {
        e.emplace_back("alpha_rule", "a_priori");
        e.emplace_back("alpha_c", d(c.alpha_rule.value));
    } else {
        e.emplace_back("alpha_rule", "fixed");
        e.emplace_back("alpha", d(c.alpha_rule.value));
    }
    e.emplace_back("reg_mode", std::string(reg_mode_name(c.reg_mode)));
    e.emplace_back("weight_f", d(c.weight_f));
    e.emplace_back("weight_g", d(c.weight_g));
    e.emplace_back("normal_order", std::to_string(c.normal_order));
    e.emplace_back("solver", std::string(backend_name(c.solver)));
    e.emplace_back("solver_tol", d(c.solver_tol));
    e.emplace_back("threshold", d(c.threshold));
    e.emplace_back("tau0", d(c.tau0));
    e.emplace_back("exclusion_band", std::to_string(c.exclusion_band));
    e.emplace_back("envelope_c_max", c.envelope_c_max ? d(*c.envelope_c_max) : "auto");
    e.emplace_back("sweep_eps", join(c.sweep_eps, d));
    e.emplace_back("sweep_seeds", join(c.sweep_seeds, u));
    e.emplace_back("probe_taus", join(c.probe_taus, d));
    e.emplace_back("tau_configs", join(c.tau_configs, [](SideSet s) { return s.to_string(); }, ";"));
    e.emplace_back("emit_matrices", c.emit_matrices ? "true" : "false");
    return e;
}

std::string config_text(const Config& cfg) {
    std::string s;
    for (const auto& [k, v] : config_entries(cfg)) s += k + " = " + v + "\n";
    return s;
}

void validate(const Config& c) {
    const Grid2D grid = build_grid(c.domain, c.h);
    if (grid.nx() < 7 || grid.ny() < 7) throw ValidationError("grid must have at least 7 nodes per side");
    if (c.gamma_sides.empty()) throw ValidationError("gamma_sides must name at least one side");
    if (c.gamma_sides.all()) throw ValidationError("gamma_sides must not cover the whole boundary");
    if (c.tilde_padding_cells < 1) throw ValidationError("tilde_padding_cells must be at least 1");
    if (c.basis == BasisKind::indicator && c.indicator_arcs_per_side < 1) {
        throw ValidationError("indicator_arcs_per_side must be at least 1");
    }
    (void)ExactSolution::parse(c.exact);
    if (!(c.noise_level >= 0.0 && c.noise_level < 1.0)) throw ValidationError("noise_level must lie in [0,1)");
    if (!(c.alpha_rule.value > 0.0)) {
        throw ValidationError(c.alpha_rule.kind == AlphaRule::Kind::fixed ? "alpha must be positive"
                                                                            : "alpha_c must be positive");
    }
    if (c.weight_f < 0.0 || c.weight_g < 0.0 || (c.weight_f == 0.0 && c.weight_g == 0.0)) {
        throw ValidationError("weight_f and weight_g must be nonnegative and not both zero");
    }
    if (c.normal_order != 1 && c.normal_order != 2) throw ValidationError("normal_order must be 1 or 2");
    if (!(c.solver_tol > 0.0)) throw ValidationError("solver_tol must be positive");
    if (!(c.threshold > 0.0 && c.threshold <= 1.0)) throw ValidationError("threshold must lie in (0,1]");
    if (!(c.tau0 > 0.0 && c.tau0 < 0.5)) throw ValidationError("tau0 must lie in (0,1/2)");
    if (c.envelope_c_max && !(*c.envelope_c_max > 0.0)) throw ValidationError("envelope_c_max must be positive");
    for (SideSet s : c.tau_configs) {
        if (s.empty() || s.all()) throw ValidationError("each tau configuration must name one to three sides");
    }
    for (double t : c.probe_taus) {
        if (!(t > 0.0 && t < 1.0)) throw ValidationError("probe_taus must lie in (0,1)");
    }
}

void validate_sweep(const Config& c) {
    validate(c);
    if (c.sweep_eps.size() < 3) throw ValidationError("sweep_eps needs at least 3 noise levels");
    const auto [lo, hi] = std::minmax_element(c.sweep_eps.begin(), c.sweep_eps.end());
    if (!(*lo > 0.0) || !(*hi < 1.0)) throw ValidationError("sweep_eps values must lie in (0,1)");
    if (*hi / *lo < 100.0 * (1.0 - 1e-9)) throw ValidationError("sweep_eps must span at least two decades");
    if (c.sweep_seeds.empty()) throw ValidationError("sweep_seeds must not be empty");
    if (c.probe_taus.empty()) throw ValidationError("probe_taus must not be empty");
}

Problem prepare_problem(const Config& cfg) {
    validate(cfg);
    const Grid2D grid = build_grid(cfg.domain, cfg.h);
    const BoundaryBasis basis = build_basis(padded_rect(cfg.domain, cfg.h, cfg.tilde_padding_cells), cfg.domain,
                                            cfg.h, cfg.basis, cfg.indicator_arcs_per_side);
    auto base = std::make_shared<const BaseSolutionSet>(
        compute_base_solutions(basis, cfg.solver_tol, cfg.solver, std::max(1u, cfg.threads)));
    BoundaryPartition part = boundary_partition(grid, cfg.gamma_sides);
    DiscreteSystem sys = assemble_system(*base, part, cfg.reg_mode, cfg.normal_order);
    IndicateField tau = compute_indicate(grid, part, cfg.solver_tol, cfg.solver, cfg.exclusion_band);
    const ExactSolution exact = ExactSolution::parse(cfg.exact);
    CauchyData clean = trace_cauchy(exact, part);
    return Problem{cfg, grid, std::move(part), exact, std::move(base), std::move(sys), std::move(tau), std::move(clean)};
}

Problem with_gamma(const Problem& p, SideSet sides) {
    Config cfg = p.config;
    cfg.gamma_sides = sides;
    validate(cfg);
    BoundaryPartition part = boundary_partition(p.grid, sides);
    DiscreteSystem sys = assemble_system(*p.base, part, cfg.reg_mode, cfg.normal_order);
    IndicateField tau = compute_indicate(p.grid, part, cfg.solver_tol, cfg.solver, cfg.exclusion_band);
    CauchyData clean = trace_cauchy(p.exact, part);
    return Problem{cfg, p.grid, std::move(part), p.exact, p.base, std::move(sys), std::move(tau), std::move(clean)};
}

Trial run_trial(const Problem& p, double noise_level, std::uint64_t seed) {
    const Config& c = p.config;
    CauchyData data = add_noise(p.clean, p.partition, noise_level, seed, c.noise_model);
    const double alpha = select_alpha(noise_level, c.h, c.alpha_rule);
    const TikhonovConfig tc{c.alpha_rule, c.reg_mode, c.weight_f, c.weight_g};
    ReconstructionResult result = reconstruct(*p.base, p.system, data, p.partition, tc, alpha);
    ScalarField error = pointwise_error(result.u_star, p.exact);
    return Trial{noise_level, seed, std::move(data), std::move(result), std::move(error)};
}

RunReport run_pipeline(const Config& cfg) { return run_pipeline(prepare_problem(cfg)); }

RunReport run_pipeline(const Problem& problem) {
    const Config& c = problem.config;
    Trial trial = run_trial(problem, c.noise_level, c.noise_seed);
    ReliableRegion region = reliable_region(problem.tau, c.threshold);
    const auto mask = interior_mask(problem.grid, 3);
    ReliabilitySummary rel = reliability_summary(trial.error, problem.tau.tau, c.threshold, &mask);
    std::optional<EnvelopeReport> env, env0;
    double m_used = 0.0;
    for (std::size_t j = 0; j < problem.grid.ny(); ++j) {
        for (std::size_t i = 0; i < problem.grid.nx(); ++i) {
            m_used = std::max(m_used, std::abs(problem.exact.value(problem.grid.x(i), problem.grid.y(j))));
        }
    }
    if (c.noise_level > 0.0) {
        env = envelope_check(trial.error, problem.tau, c.noise_level, c.envelope_c_max, m_used);
        env0 = envelope_check(trial.error, problem.tau, std::pow(c.noise_level, c.tau0), c.envelope_c_max, m_used);
    }
    return RunReport{problem, std::move(trial), std::move(region), rel, std::move(env), std::move(env0), m_used};
}

namespace {

ojson config_json(const Config& cfg) {
    ojson j = ojson::object();
    for (const auto& [k, v] : config_entries(cfg)) j[k] = v;
    return j;
}

ojson stats_json(const RegionStats& s) { return ojson{{"count", s.count}, {"median", s.median}, {"max", s.max}}; }

ojson reliability_json(const ReliabilitySummary& r) {
    ojson j{{"threshold", r.threshold}, {"inside", stats_json(r.inside)}};
    j["outside"] = r.outside ? stats_json(*r.outside) : ojson(nullptr);
    j["median_ratio"] = r.median_ratio ? ojson(*r.median_ratio) : ojson(nullptr);
    return j;
}

ojson envelope_json(const EnvelopeReport& e) {
    ojson probes = ojson::array();
    for (const auto& p : e.probes) {
        probes.push_back({{"x", p.point.x}, {"y", p.point.y}, {"tau", p.tau}, {"err", p.err}, {"bound", p.bound}});
    }
    ojson viol = ojson::array();
    for (const auto& p : e.violation_points) viol.push_back({p.x, p.y});
    return ojson{{"eps", e.eps},           {"c_fit", e.c_fit},  {"c_max", e.c_max},  {"m_used", e.m_used},
                 {"violations", e.violations}, {"violation_points", viol}, {"probes", probes}};
}

void write_json(const std::filesystem::path& path, const ojson& j) { write_text(path, j.dump(2) + "\n"); }

void write_matrix(const std::filesystem::path& dir, const std::string& name, const Eigen::MatrixXd& m) {
    write_text(dir / (name + ".csv"), matrix_csv(m));
    write_json(dir / (name + ".json"), ojson{{"rows", m.rows()}, {"cols", m.cols()}, {"order", "row-major"}});
}

double centre_tau(const IndicateField& f) {
    const Rect& r = f.tau.grid().rect();
    return interpolate(f.tau, {0.5 * (r.x0 + r.x1), 0.5 * (r.y0 + r.y1)});
}

}  // namespace

void write_run_artifacts(const RunReport& rep, const std::filesystem::path& dir) {
    const Problem& p = rep.problem;
    const Trial& t = rep.trial;
    const ScalarField exact = p.exact.sample(p.grid);

    write_text(dir / "config.txt", config_text(p.config));
    write_text(dir / "u_star.csv", field_csv(t.result.u_star));
    write_text(dir / "exact.csv", field_csv(exact));
    write_text(dir / "error.csv", field_csv(t.error));
    write_text(dir / "tau.csv", field_csv(p.tau.tau));
    write_text(dir / "contour.json", contour_json(rep.region.contour));
    const std::vector<LevelContour> overlay{rep.region.contour};
    write_text(dir / "exact.svg", heatmap_svg(exact, "exact solution", overlay));
    write_text(dir / "u_star.svg", heatmap_svg(t.result.u_star, "reconstruction", overlay));
    write_text(dir / "error.svg", heatmap_svg(t.error, "absolute error", overlay));
    write_text(dir / "tau.svg", heatmap_svg(p.tau.tau, "indicate function", overlay));

    std::string cauchy = "x,y,f,g\n";
    for (std::size_t k = 0; k < t.data.f.size(); ++k) {
        cauchy += format_double(t.data.points[k].x) + ',' + format_double(t.data.points[k].y) + ',' +
                  format_double(t.data.f[k]) + ',' + format_double(t.data.g[k]) + '\n';
    }
    write_text(dir / "cauchy.csv", cauchy);
    write_json(dir / "cauchy.json", ojson{{"gamma_sides", p.partition.gamma_sides().to_string()},
                                          {"m", t.data.f.size()},
                                          {"noise_level", t.data.noise_level},
                                          {"seed", t.data.seed},
                                          {"model", std::string(noise_model_name(t.data.model))},
                                          {"realized_eps", t.data.realized_eps}});

    std::string b = "index,value\n";
    for (Eigen::Index k = 0; k < t.result.b.size(); ++k) b += std::to_string(k) + ',' + format_double(t.result.b[k]) + '\n';
    write_text(dir / "b.csv", b);

    ojson env = ojson::object();
    env["eps"] = rep.envelope ? envelope_json(*rep.envelope) : ojson(nullptr);
    env["eps_tau0"] = rep.envelope_tau0 ? envelope_json(*rep.envelope_tau0) : ojson(nullptr);
    write_json(dir / "envelope.json", env);

    if (p.config.emit_matrices) {
        write_matrix(dir, "A", p.system.a);
        write_matrix(dir, "B", p.system.b);
        write_matrix(dir, "C", p.system.gram());
    }

    const auto errs = t.error.values();
    const auto mask = interior_mask(p.grid, 3);
    double interior_max = 0.0;
    for (std::size_t k = 0; k < errs.size(); ++k) {
        if (mask[k]) interior_max = std::max(interior_max, errs[k]);
    }
    ojson s;
    s["config"] = config_json(p.config);
    s["n"] = p.system.n();
    s["m"] = p.system.m();
    s["alpha_used"] = t.result.alpha_used;
    s["residual_f"] = t.result.residual_f;
    s["residual_g"] = t.result.residual_g;
    s["reg_norm"] = t.result.reg_norm;
    s["condition_estimate"] = t.result.condition_estimate;
    s["realized_eps"] = t.data.realized_eps;
    s["m_used"] = rep.m_used;
    s["error"] = {{"max", *std::max_element(errs.begin(), errs.end())},
                  {"median", median(std::vector<double>(errs.begin(), errs.end()))},
                  {"interior_max", interior_max}};
    s["tau_center"] = centre_tau(p.tau);
    s["reliable_region_nodes"] = rep.region.count();
    s["reliability"] = reliability_json(rep.reliability);
    s["c_fit"] = rep.envelope ? ojson(rep.envelope->c_fit) : ojson(nullptr);
    s["c_fit_tau0"] = rep.envelope_tau0 ? ojson(rep.envelope_tau0->c_fit) : ojson(nullptr);
    write_json(dir / "summary.json", s);
}

std::vector<TauPanel> run_tau(const Config& cfg) {
    validate(cfg);
    const Grid2D grid = build_grid(cfg.domain, cfg.h);
    std::vector<TauPanel> panels;
    for (SideSet sides : cfg.tau_configs) {
        BoundaryPartition part = boundary_partition(grid, sides);
        IndicateField f = compute_indicate(grid, part, cfg.solver_tol, cfg.solver, cfg.exclusion_band);
        ReliableRegion r = reliable_region(f, cfg.threshold);
        panels.push_back({sides, std::move(f), std::move(r)});
    }
    return panels;
}

void write_tau_artifacts(const Config& cfg, const std::vector<TauPanel>& panels, const std::filesystem::path& dir) {
    ojson list = ojson::array();
    for (const auto& p : panels) {
        const auto sub = dir / side_dir_name(p.sides);
        write_text(sub / "tau.csv", field_csv(p.field.tau));
        write_text(sub / "contour.json", contour_json(p.region.contour));
        write_text(sub / "tau.svg", heatmap_svg(p.field.tau, "indicate function " + p.sides.to_string(), {p.region.contour}));
        list.push_back({{"sides", p.sides.to_string()},
                        {"dir", side_dir_name(p.sides)},
                        {"tau_center", centre_tau(p.field)},
                        {"reliable_region_nodes", p.region.count()},
                        {"contour_polylines", p.region.contour.polylines.size()}});
    }
    write_json(dir / "tau_summary.json", ojson{{"config", config_json(cfg)}, {"panels", list}});
}

std::vector<std::pair<std::size_t, std::size_t>> probes_for_taus(const IndicateField& tau,
                                                                 const std::vector<double>& targets,
                                                                 std::size_t layers) {
    const Grid2D& g = tau.tau.grid();
    const auto inner = interior_mask(g, layers);
    const auto away = away_from_gamma_endpoints(tau);
    const Rect& r = g.rect();
    const double cx = 0.5 * (r.x0 + r.x1);
    const double cy = 0.5 * (r.y0 + r.y1);
    const auto [tmin, tmax] = std::minmax_element(targets.begin(), targets.end());
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (double target : targets) {
        std::optional<std::size_t> best;
        double best_gap = 0.0;
        double best_dist = 0.0;
        for (std::size_t j = 0; j < g.ny(); ++j) {
            for (std::size_t i = 0; i < g.nx(); ++i) {
                const std::size_t k = g.index(i, j);
                if (!inner[k] || !away[k]) continue;
                const double t = tau.tau[k];
                const double gap = std::abs(t - target);
                const double key_gap = gap <= 0.01 && t >= *tmin && t <= *tmax ? 0.0 : gap;
                const double dist = std::hypot(g.x(i) - cx, g.y(j) - cy);
                if (!best || key_gap < best_gap || (key_gap == best_gap && dist < best_dist)) {
                    best = k;
                    best_gap = key_gap;
                    best_dist = dist;
                }
            }
        }
        if (!best) continue;
        const std::pair<std::size_t, std::size_t> node{*best % g.nx(), *best / g.nx()};
        if (std::find(out.begin(), out.end(), node) == out.end()) out.push_back(node);
    }
    return out;
}

SweepReport run_sweep(const Config& cfg) {
    validate_sweep(cfg);
    return run_sweep(prepare_problem(cfg));
}

SweepReport run_sweep(const Problem& p) {
    const Config& c = p.config;
    validate_sweep(c);
    SweepReport rep;
    rep.eps = c.sweep_eps;
    rep.seeds = c.sweep_seeds;
    rep.n = p.system.n();
    const auto nodes = probes_for_taus(p.tau, c.probe_taus);
    const std::size_t ne = rep.eps.size();
    const std::size_t ns = rep.seeds.size();

    struct Slot {
        std::vector<double> probe_err;
        double reg = 0.0;
        double c_fit = 0.0;
    };
    std::vector<Slot> slots(ne * ns);
    parallel_for(slots.size(), std::max(1u, c.threads), [&](std::size_t k) {
        const double eps = rep.eps[k / ns];
        const Trial t = run_trial(p, eps, rep.seeds[k % ns]);
        Slot& s = slots[k];
        for (const auto& [i, j] : nodes) s.probe_err.push_back(t.error.at(i, j));
        s.reg = t.result.reg_norm;
        s.c_fit = envelope_check(t.error, p.tau, eps).c_fit;
    });

    rep.c_fit.assign(ne, std::vector<double>(ns));
    rep.mean_reg_norm.assign(ne, 0.0);
    for (std::size_t e = 0; e < ne; ++e) {
        rep.alpha.push_back(select_alpha(rep.eps[e], c.h, c.alpha_rule));
        for (std::size_t s = 0; s < ns; ++s) {
            rep.c_fit[e][s] = slots[e * ns + s].c_fit;
            rep.mean_reg_norm[e] += slots[e * ns + s].reg / static_cast<double>(ns);
        }
    }
    std::vector<std::pair<double, double>> reg_pts;
    for (std::size_t e = 0; e < ne; ++e) reg_pts.emplace_back(rep.eps[e], rep.mean_reg_norm[e]);
    rep.reg_norm_slope = rate_fit(reg_pts).slope;

    std::vector<double> slopes, taus;
    for (std::size_t q = 0; q < nodes.size(); ++q) {
        SweepProbe pr;
        pr.i = nodes[q].first;
        pr.j = nodes[q].second;
        pr.point = {p.grid.x(pr.i), p.grid.y(pr.j)};
        pr.tau = p.tau.tau.at(pr.i, pr.j);
        std::vector<std::pair<double, double>> pts;
        for (std::size_t e = 0; e < ne; ++e) {
            double m = 0.0;
            for (std::size_t s = 0; s < ns; ++s) m += slots[e * ns + s].probe_err[q] / static_cast<double>(ns);
            pr.mean_err.push_back(m);
            pts.emplace_back(rep.eps[e], m);
        }
        pr.slope = rate_fit(pts).slope;
        slopes.push_back(pr.slope);
        taus.push_back(pr.tau);
        rep.probes.push_back(std::move(pr));
    }
    rep.spearman = rep.probes.size() >= 2 ? spearman(slopes, taus) : 0.0;
    return rep;
}

void write_sweep_artifacts(const Config& cfg, const SweepReport& rep, const std::filesystem::path& dir) {
    // Probe table: err is the seed-averaged error at the smallest eps.
    const auto smallest = static_cast<std::size_t>(
        std::min_element(rep.eps.begin(), rep.eps.end()) - rep.eps.begin());
    std::string csv = "x,y,tau,err,slope\n";
    ojson probes = ojson::array();
    for (const auto& p : rep.probes) {
        csv += format_double(p.point.x) + ',' + format_double(p.point.y) + ',' + format_double(p.tau) + ',' +
               format_double(p.mean_err[smallest]) + ',' + format_double(p.slope) + '\n';
        probes.push_back({{"x", p.point.x}, {"y", p.point.y}, {"tau", p.tau}, {"mean_err", p.mean_err}, {"slope", p.slope}});
    }
    write_text(dir / "probes.csv", csv);

    ojson cfit = ojson::array();
    for (std::size_t e = 0; e < rep.eps.size(); ++e) {
        const auto [lo, hi] = std::minmax_element(rep.c_fit[e].begin(), rep.c_fit[e].end());
        cfit.push_back({{"eps", rep.eps[e]},
                        {"per_seed", rep.c_fit[e]},
                        {"min", *lo},
                        {"max", *hi},
                        {"spread", *lo > 0.0 ? *hi / *lo : 0.0}});
    }
    ojson j;
    j["config"] = config_json(cfg);
    j["n"] = rep.n;
    j["eps"] = rep.eps;
    j["seeds"] = rep.seeds;
    j["alpha"] = rep.alpha;
    j["probes"] = probes;
    j["spearman"] = rep.spearman;
    j["mean_reg_norm"] = rep.mean_reg_norm;
    j["reg_norm_slope"] = rep.reg_norm_slope;
    j["c_fit"] = cfit;
    write_json(dir / "sweep.json", j);
}

std::vector<CheckResult> run_checks(const Config& cfg) {
    validate(cfg);
    std::vector<CheckResult> out;
    auto add = [&](std::string name, bool pass, std::string detail) {
        out.push_back({std::move(name), pass, std::move(detail)});
    };
    auto num = [](double v) { return shortest_double(v); };
    const Rect unit{0.0, 0.0, 1.0, 1.0};

    {
        auto err_at = [&](double h) {
            const Grid2D g = build_grid(unit, h);
            auto f = [](double x, double y) { return std::exp(x) * std::sin(y); };
            const ScalarField u = solve_dirichlet(g, boundary_samples(g, f), 1e-13);
            double e = 0.0;
            for (std::size_t j = 0; j < g.ny(); ++j) {
                for (std::size_t i = 0; i < g.nx(); ++i) e = std::max(e, std::abs(u.at(i, j) - f(g.x(i), g.y(j))));
            }
            return e;
        };
        const double ratio = err_at(1.0 / 32.0) / err_at(1.0 / 64.0);
        add("fdm_second_order", ratio >= 3.5 && ratio <= 4.5, "error ratio " + num(ratio));
    }

    const Grid2D g64 = build_grid(unit, 1.0 / 64.0);
    {
        bool ok = true;
        std::string detail;
        const std::vector<std::pair<SideSet, double>> cases{{SideSet{Side::bottom}, 0.25},
                                                            {SideSet{Side::bottom, Side::top}, 0.5},
                                                            {SideSet{Side::bottom, Side::top, Side::left}, 0.75}};
        for (const auto& [sides, want] : cases) {
            const IndicateField f = compute_indicate(g64, boundary_partition(g64, sides));
            const double got = f.tau.at(32, 32);
            ok = ok && std::abs(got - want) <= 2e-3;
            detail += sides.to_string() + "=" + num(got) + " ";
        }
        add("tau_center_symmetry", ok, detail);
    }
    {
        double worst = 0.0;
        bool bounds = true;
        for (SideSet sides : {SideSet{Side::bottom}, SideSet{Side::bottom, Side::left}}) {
            const IndicateField f = compute_indicate(g64, boundary_partition(g64, sides));
            const auto away = away_from_gamma_endpoints(f);
            for (std::size_t j = 0; j < g64.ny(); ++j) {
                for (std::size_t i = 0; i < g64.nx(); ++i) {
                    const double t = f.tau.at(i, j);
                    if (t < -1e-12 || t > 1.0 + 1e-12) bounds = false;
                    if (!away[g64.index(i, j)]) continue;
                    worst = std::max(worst, std::abs(t - rectangle_series_tau(g64.x(i), g64.y(j), sides, 200)));
                }
            }
        }
        add("tau_series_oracle", worst <= 5e-3, "max deviation " + num(worst));
        add("tau_bounds", bounds, "0 <= tau <= 1");
    }
    {
        const double eps = 1e-2, big_r = 2.0, r = 1.5;
        const double m = eps * std::pow(big_r, 3);
        const double w = eps * std::pow(r, 3);
        const double bound = two_constants_bound(eps, m, annulus_tau(r, big_r));
        const double rel = std::abs(w - bound) / w;
        add("two_constants_sharp", rel <= 1e-12, "relative difference " + num(rel));
    }
    {
        DiscreteSystem sys;
        sys.a = Eigen::MatrixXd::Ones(1, 1);
        sys.b = Eigen::MatrixXd::Zero(1, 1);
        sys.sigma = Eigen::VectorXd::Ones(1);
        sys.d1 = Eigen::MatrixXd::Zero(1, 1);
        sys.reg = Eigen::MatrixXd::Ones(1, 1);
        CauchyData data;
        data.f = {1.0};
        data.g = {0.0};
        const double alpha = 0.3;
        const TikhonovConfig tc{AlphaRule::fixed(alpha), RegMode::gram, 1.0, 1.0};
        const double b = minimize(sys, data, tc, alpha).b[0];
        add("ridge_closed_form", std::abs(b - 1.0 / (1.0 + alpha)) <= 1e-12, "b=" + num(b));
    }
    {
        const Problem p = prepare_problem(cfg);
        const Trial t = run_trial(p, cfg.noise_level, cfg.noise_seed);
        const TikhonovConfig tc{cfg.alpha_rule, cfg.reg_mode, cfg.weight_f, cfg.weight_g};
        const double alpha = t.result.alpha_used;
        const double grad = cost_gradient(p.system, t.data, tc, alpha, t.result.b).norm();
        const double allowed = 1e-8 * (1.0 + t.result.b.norm());
        add("optimality_gradient", grad <= allowed, "gradient " + num(grad) + " allowed " + num(allowed));

        bool mono = true;
        double prev_res = -1.0, prev_reg = std::numeric_limits<double>::infinity();
        for (double scale : {0.1, 1.0, 10.0}) {
            const auto mz = minimize(p.system, t.data, tc, alpha * scale);
            const Residuals r = residuals(p.system, t.data, p.partition, mz.b);
            const double fit = r.f_h1 * r.f_h1 + r.g_l2 * r.g_l2;
            mono = mono && fit >= prev_res * (1.0 - 1e-9) && r.reg_norm <= prev_reg * (1.0 + 1e-9);
            prev_res = fit;
            prev_reg = r.reg_norm;
        }
        add("monotone_in_alpha", mono, "misfit up, seminorm down over alpha x {0.1,1,10}");
    }
    return out;
}

}  // namespace cauchy
