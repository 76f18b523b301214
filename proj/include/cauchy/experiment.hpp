#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cauchy/basis.hpp"
#include "cauchy/evaluate.hpp"
#include "cauchy/forward.hpp"
#include "cauchy/harmonic_measure.hpp"
#include "cauchy/tikhonov.hpp"

namespace cauchy {

/// Flat experiment configuration. Every field maps to one `key = value`
/// line; see README for the key list.
struct Config {
    Rect domain{0.0, 0.0, 1.0, 1.0};
    std::string h_text = "1/64";
    double h = 1.0 / 64.0;
    SideSet gamma_sides{Side::bottom};
    std::size_t tilde_padding_cells = 4;
    BasisKind basis = BasisKind::hat;
    std::size_t indicator_arcs_per_side = 1;
    std::string exact = "exp_cos(4,0.2)";
    double noise_level = 0.01;
    std::uint64_t noise_seed = 1;
    NoiseModel noise_model = NoiseModel::uniform;
    AlphaRule alpha_rule = AlphaRule::a_priori(1.0);
    RegMode reg_mode = RegMode::gram;
    double weight_f = 1.0;
    double weight_g = 1.0;
    int normal_order = 2;
    SolverBackend solver = SolverBackend::cg;
    double solver_tol = kDefaultSolverTol;
    double threshold = 0.5;
    double tau0 = 0.49;
    int exclusion_band = 3;
    std::optional<double> envelope_c_max;
    std::vector<double> sweep_eps{0.1, 0.01, 0.001};
    std::vector<std::uint64_t> sweep_seeds{1, 2, 3};
    std::vector<double> probe_taus{0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    std::vector<SideSet> tau_configs{SideSet{Side::bottom}, SideSet{Side::bottom, Side::top},
                                     SideSet{Side::bottom, Side::left},
                                     SideSet{Side::bottom, Side::top, Side::left}};
    bool emit_matrices = false;
    // Execution settings; they never change results and are not echoed.
    std::filesystem::path out = "out";
    unsigned threads = 1;
};

/// Sets one key from its text value. Unknown keys and malformed values throw
/// ValidationError.
void apply_setting(Config& cfg, const std::string& key, const std::string& value);

/// Applies `key = value` lines on top of `base`; `#` starts a comment.
Config parse_config(const std::string& text, Config base = {});

std::vector<std::string> preset_names();
Config preset(const std::string& name);

/// Canonical `key, value` pairs of every result-affecting key.
std::vector<std::pair<std::string, std::string>> config_entries(const Config& cfg);
std::string config_text(const Config& cfg);

/// Checks every precondition that can be checked without solving.
void validate(const Config& cfg);
/// Extra preconditions of the sweep.
void validate_sweep(const Config& cfg);

/// Everything that does not depend on the noise draw.
struct Problem {
    Config config;
    Grid2D grid;
    BoundaryPartition partition;
    ExactSolution exact;
    std::shared_ptr<const BaseSolutionSet> base;
    DiscreteSystem system;
    IndicateField tau;
    CauchyData clean;
};

Problem prepare_problem(const Config& cfg);
/// Same base solutions, different Gamma.
Problem with_gamma(const Problem& p, SideSet sides);

struct Trial {
    double noise_level = 0.0;
    std::uint64_t seed = 0;
    CauchyData data;
    ReconstructionResult result;
    ScalarField error;
};

/// alpha comes from the configured rule with eps = noise_level.
Trial run_trial(const Problem& p, double noise_level, std::uint64_t seed);

struct RunReport {
    Problem problem;
    Trial trial;
    ReliableRegion region;
    ReliabilitySummary reliability;
    std::optional<EnvelopeReport> envelope;       // against eps
    std::optional<EnvelopeReport> envelope_tau0;  // against eps^tau0
    double m_used = 0.0;
};

RunReport run_pipeline(const Config& cfg);
RunReport run_pipeline(const Problem& problem);
void write_run_artifacts(const RunReport& rep, const std::filesystem::path& dir);

struct TauPanel {
    SideSet sides;
    IndicateField field;
    ReliableRegion region;
};

std::vector<TauPanel> run_tau(const Config& cfg);
void write_tau_artifacts(const Config& cfg, const std::vector<TauPanel>& panels, const std::filesystem::path& dir);

struct SweepProbe {
    Point2 point;
    std::size_t i = 0;
    std::size_t j = 0;
    double tau = 0.0;
    std::vector<double> mean_err;  // per eps, averaged over seeds
    double slope = 0.0;
};

struct SweepReport {
    std::vector<double> eps;
    std::vector<std::uint64_t> seeds;
    std::vector<SweepProbe> probes;
    double spearman = 0.0;
    std::vector<double> mean_reg_norm;  // per eps
    double reg_norm_slope = 0.0;
    std::vector<std::vector<double>> c_fit;  // [eps][seed]
    std::vector<double> alpha;               // per eps
    std::size_t n = 0;
};

/// One probe per target tau: among nodes with |tau - target| <= 0.01 and tau
/// inside the span of the targets, the one nearest the domain centre;
/// otherwise the node with the closest tau. Nodes closer than `layers` to
/// the boundary or the Gamma endpoints are skipped, duplicates dropped.
std::vector<std::pair<std::size_t, std::size_t>> probes_for_taus(const IndicateField& tau,
                                                                 const std::vector<double>& targets,
                                                                 std::size_t layers = 3);

SweepReport run_sweep(const Config& cfg);
SweepReport run_sweep(const Problem& problem);
void write_sweep_artifacts(const Config& cfg, const SweepReport& rep, const std::filesystem::path& dir);

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

/// Fast invariant suite behind the `check` subcommand.
std::vector<CheckResult> run_checks(const Config& cfg);

}  // namespace cauchy
