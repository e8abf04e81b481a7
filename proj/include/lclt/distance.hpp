#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lclt/batch.hpp"
#include "lclt/covariance.hpp"
#include "lclt/gaussian.hpp"
#include "lclt/params.hpp"

namespace lclt {

enum class Estimator { coupling_l1, bl_lower, cf_grid, abb_certificate, ks_1d, density_diff };

const char* estimator_name(Estimator e);

/// One estimated or certified distance between two stages.
struct DistanceReport {
    Stage stage_a = Stage::XT;
    Stage stage_b = Stage::XT;
    Estimator estimator = Estimator::coupling_l1;
    double value = 0.0;
    double uncertainty = 0.0;
    double L = 0.0, M = 0.0, R = 0.0, F = 0.0;
    double T = 0.0;
    uint64_t seed = 0;
    double theory_shape = 0.0;  // theoretical rate shape for this pair at this T
    std::string flags;
};

// L * sum_j mean |X_{.j} - Y_{.j}| over co-sampled batches (same seed, same
// draws).  Rows flagged in either batch are excluded when an X-stage is
// involved; the exclusion count lands in `flags`.
DistanceReport coupling_l1_upper(const SampleBatch& X, const SampleBatch& Y, double L);

// Lower bound via a dictionary of cone functions
// f(x) = min(M, max(0, a - L ||x - c||)), exactly L-Lipschitz and M-bounded.
// Centers come from the pooled samples; expanding dict_size never decreases
// the reported max.
DistanceReport bl_dictionary_lower(const SampleBatch& X, const SampleBatch& Y, double L, double M,
                                   int dict_size, uint64_t seed);
DistanceReport bl_dictionary_lower(const SampleBatch& X, const GaussianSpec& ref, double L,
                                   double M, int dict_size, uint64_t seed,
                                   size_t mc_samples = 200000);

// (1/n) sum_rows exp(i u . row).
std::complex<double> cf_empirical(const SampleBatch& X, const std::vector<double>& u);

// exp(-u^T K u / 2).
double cf_gauss(const GaussianSpec& spec, const std::vector<double>& u);

struct CfSupResult {
    double sup = 0.0;
    std::vector<double> argmax;
};

// sup over the symmetric tensor grid in (-F, F)^N (grid always contains 0)
// of |cf_empirical - cf_gauss|.  Grid evaluation is chunked, never fails on
// size.
CfSupResult cf_sup_on_grid(const SampleBatch& X, const GaussianSpec& spec, double F,
                           int grid_per_axis);

// L/F + M ((R F)^N cf_sup + tail_mu + tail_nu).  The smoothing lemma's
// dimensional constant is unknown, so reports carry an "unnormalized" flag.
double abb_certificate(double L, double M, double R, double F, double cf_sup, double tail_mu,
                       double tail_nu, int N);

// sup_x |F_n(x) - F(x)| at the jump points.
double kolmogorov_1d(std::vector<double> samples);  // vs standard normal
double kolmogorov_1d(std::vector<double> samples, const std::function<double(double)>& cdf);

/// Parameter bundle for the smoothing certificate: the truncation level,
struct BoundParams {
    double r_threshold = 0.0;  // frak r
    double N_trunc = 0.0;      // frak N
    double u_norm1 = 0.0;
    double C1 = 0.0;
    double kappa2 = 0.0;
    double C2 = 7.6;  // must be > 7.5
    double eps1 = 0.3, eps2 = 0.5;

    // r = sqrt(loglogT/2)/(C1 C2) (logloglogT)^{eps2},
    // ||u||_1 = (logloglogT)^{eps1},  N = C1 C2 r ||u||_1 / sqrt(loglogT/2).
    static BoundParams from(const ApproxParams& params, double C1, double eps1 = 0.3,
                            double eps2 = 0.5, double C2 = 7.6);
};

double std_normal_cdf(double x);

}  // namespace lclt
