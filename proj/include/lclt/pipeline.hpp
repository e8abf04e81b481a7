#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lclt/batch.hpp"
#include "lclt/covariance.hpp"
#include "lclt/distance.hpp"
#include "lclt/gaussian.hpp"
#include "lclt/moments.hpp"
#include "lclt/params.hpp"

namespace lclt {

inline constexpr int kConfigSchemaVersion = 1;

/// Full experiment description, loadable from JSON (see README for the
/// schema).  Stages must form a prefix-compatible subset of the chain.
struct ExperimentConfig {
    double T = 0;
    size_t n_samples = 0;
    uint64_t seed = 42;
    int N = 0;
    std::vector<std::pair<uint64_t, int>> characters;  // (q, canonical index)

    // Either explicit shift values or consecutive gaps |a_{j+1}-a_j| =
    // (log T)^{-c_j}, re-derived per T in sweeps.
    bool shifts_explicit = true;
    std::vector<double> alphas;
    std::vector<double> gap_exponents;  // length N-1 when !shifts_explicit

    double K = 10, K_prime = 4, A = 400, B = 80;
    std::optional<double> Y_override, X_override;

    std::vector<Stage> stages;

    double dist_L = 1.0, dist_M = 1.0;
    std::optional<double> dist_R, dist_F;
    int dict_size = 1000;
    int grid_per_axis = 41;
    double eps1 = 0.3, eps2 = 0.5, C2 = 7.6;

    double Delta_budget = 10.0, delta_budget = 10.0, epsilon = 0.5;
    uint64_t L_cutoff_budget = 1'000'000;  // X_T/X0_T allowed only for T <= this
    int threads = 0;                       // 0 = hardware default
    std::string output_path;

    std::vector<double> resolved_alphas(double T_at) const;
};

ExperimentConfig config_from_json_file(const std::string& path);
ExperimentConfig config_from_json_text(const std::string& text);

/// One full chain draw: shared t-heights across all requested stages.
struct ChainResult {
    std::map<Stage, SampleBatch> batches;
    CovarianceSpec cov;
    ApproxParams params;
    ShiftConfig shifts;
    std::vector<DirichletCharacter> chars;
    Normalizer norm0;          // normalizer of the first coordinate's character
    uint64_t t_digest = 0;
    size_t excluded_count = 0;      // rows with |L_trunc| below the near-zero guard
    size_t unclassified_pairs = 0;  // shift pairs whose |e(T)| exceeds the delta budget
};

ChainResult sample_chain(const ExperimentConfig& config);

std::vector<DistanceReport> stage_distance_table(const ChainResult& chain,
                                                 const ExperimentConfig& config);

/// One rate-sweep row: a distance report at one T plus the limiting-rate
/// shape columns; failed T's keep their error message.
struct RateRow {
    double T = 0;
    int N = 0;
    DistanceReport report;
    double shape_main = 0;   // (logloglog T)^{-eps1}
    double shape_exp = 0;    // exp(-(1/2)(logloglog T)^{eps1+eps2})
    double shape_indep = 0;  // (logloglog T)^2 / sqrt(loglog T)
    std::string status = "ok";
};

std::vector<RateRow> rate_sweep(const ExperimentConfig& config, const std::vector<double>& T_list);

// Dedekind composition: batches must hold 2N coordinates (N principal, N
// quadratic, matched shifts); output Y_T has N coordinates
// (zeta part + L part) / sqrt(2).
SampleBatch dedekind_vectors(const SampleBatch& base,
                             const std::vector<std::pair<int, int>>& pairing, double T);

enum class EmitFormat { csv, json };

void emit(const std::vector<DistanceReport>& reports, EmitFormat format, const std::string& path);
void emit(const std::vector<RateRow>& rows, EmitFormat format, const std::string& path);
void emit(const std::vector<MomentReport>& reports, EmitFormat format, const std::string& path);

std::string render_csv(const std::vector<DistanceReport>& reports);
std::string render_json(const std::vector<DistanceReport>& reports);
std::string render_csv(const std::vector<RateRow>& rows);
std::string render_json(const std::vector<RateRow>& rows);
std::string render_csv(const std::vector<MomentReport>& reports);
std::string render_json(const std::vector<MomentReport>& reports);

void write_file(const std::string& path, const std::string& content);

}  // namespace lclt
