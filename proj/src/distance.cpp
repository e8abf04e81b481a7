#include "lclt/distance.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "lclt/rng.hpp"

namespace lclt {

namespace {

bool is_x_stage(Stage s) { return s == Stage::XT || s == Stage::X0T; }

std::set<uint32_t> excluded_rows(const SampleBatch& X, const SampleBatch& Y) {
    std::set<uint32_t> ex;
    if (is_x_stage(X.stage)) ex.insert(X.flagged_rows.begin(), X.flagged_rows.end());
    if (is_x_stage(Y.stage)) ex.insert(Y.flagged_rows.begin(), Y.flagged_rows.end());
    return ex;
}

}  // namespace

const char* estimator_name(Estimator e) {
    switch (e) {
        case Estimator::coupling_l1: return "coupling_l1";
        case Estimator::bl_lower: return "bl_lower";
        case Estimator::cf_grid: return "cf_grid";
        case Estimator::abb_certificate: return "abb_certificate";
        case Estimator::ks_1d: return "ks_1d";
        case Estimator::density_diff: return "density_diff";
    }
    return "?";
}

const char* stage_name(Stage s) {
    switch (s) {
        case Stage::XT: return "X_T";
        case Stage::X0T: return "X0_T";
        case Stage::MT: return "M_T_surrogate";
        case Stage::QT: return "Q_T";
        case Stage::RT: return "R_T";
        case Stage::R1T: return "R1_T";
        case Stage::Ztilde: return "Z_tilde";
        case Stage::YT: return "Y_T";
    }
    return "?";
}

Stage stage_from_name(const std::string& name) {
    for (Stage s : {Stage::XT, Stage::X0T, Stage::MT, Stage::QT, Stage::RT, Stage::R1T,
                    Stage::Ztilde, Stage::YT})
        if (name == stage_name(s)) return s;
    throw ConfigError("unknown stage name: " + name);
}

std::vector<double> SampleBatch::column(int col) const {
    std::vector<double> v(n);
    for (size_t r = 0; r < n; ++r) v[r] = at(r, col);
    return v;
}

void SampleBatch::validate() const {
    if (n == 0 || dim <= 0) throw std::invalid_argument("SampleBatch: need n >= 1 and dim >= 1");
    if (data.size() != n * static_cast<size_t>(dim))
        throw std::invalid_argument("SampleBatch: shape mismatch");
    for (double v : data)
        if (!std::isfinite(v)) throw std::invalid_argument("SampleBatch: non-finite entry");
}

DistanceReport coupling_l1_upper(const SampleBatch& X, const SampleBatch& Y, double L) {
    if (X.n != Y.n || X.dim != Y.dim)
        throw std::invalid_argument("coupling_l1_upper: mismatched shapes");
    if (X.seed != Y.seed) throw std::invalid_argument("coupling_l1_upper: batches not co-sampled");
    auto ex = excluded_rows(X, Y);
    DistanceReport rep;
    rep.stage_a = X.stage;
    rep.stage_b = Y.stage;
    rep.estimator = Estimator::coupling_l1;
    rep.L = L;
    rep.seed = X.seed;
    size_t used = 0;
    KahanSum total;
    std::vector<KahanSum> per_coord(X.dim);
    std::vector<KahanSum> per_coord_sq(X.dim);
    for (size_t r = 0; r < X.n; ++r) {
        if (ex.count(static_cast<uint32_t>(r))) continue;
        ++used;
        for (int j = 0; j < X.dim; ++j) {
            double d = std::abs(X.at(r, j) - Y.at(r, j));
            per_coord[j].add(d);
            per_coord_sq[j].add(d * d);
        }
    }
    if (used == 0) throw PreconditionError("coupling_l1_upper: all rows excluded");
    double se2 = 0.0;
    for (int j = 0; j < X.dim; ++j) {
        double mean = per_coord[j].value() / static_cast<double>(used);
        total.add(mean);
        double var = per_coord_sq[j].value() / static_cast<double>(used) - mean * mean;
        se2 += std::max(var, 0.0) / static_cast<double>(used);
    }
    rep.value = L * total.value();
    rep.uncertainty = L * std::sqrt(se2);
    if (!ex.empty()) rep.flags = "excluded=" + std::to_string(ex.size());
    return rep;
}

namespace {

// Deterministic cone dictionary: member i picks a center row from the pooled
// samples and an offset level from its own keyed stream.
struct Cone {
    std::vector<double> center;
    double a;
};

Cone make_cone(int i, uint64_t seed, double L, double M, const SampleBatch& X,
               const SampleBatch* Y) {
    CounterRng rng(seed, static_cast<uint64_t>(i), 3);
    size_t pool = X.n + (Y ? Y->n : 0);
    size_t pick = static_cast<size_t>(rng.next_u64() % pool);
    Cone c;
    c.center.resize(X.dim);
    const SampleBatch& src = (pick < X.n || !Y) ? X : *Y;
    size_t row = (pick < X.n || !Y) ? pick % X.n : pick - X.n;
    for (int d = 0; d < X.dim; ++d) c.center[d] = src.at(row, d);
    // Offset in (0, M]: small offsets probe local mass, large ones saturate.
    c.a = M * rng.next_open();
    (void)L;
    return c;
}

double cone_eval(const Cone& c, const double* x, int dim, double L, double M) {
    double d2 = 0.0;
    for (int i = 0; i < dim; ++i) {
        double dx = x[i] - c.center[i];
        d2 += dx * dx;
    }
    double v = c.a - L * std::sqrt(d2);
    return std::min(M, std::max(0.0, v));
}

double mean_cone(const Cone& c, const SampleBatch& B, double L, double M) {
    KahanSum s;
    for (size_t r = 0; r < B.n; ++r) s.add(cone_eval(c, &B.data[r * B.dim], B.dim, L, M));
    return s.value() / static_cast<double>(B.n);
}

}  // namespace

DistanceReport bl_dictionary_lower(const SampleBatch& X, const SampleBatch& Y, double L, double M,
                                   int dict_size, uint64_t seed) {
    if (X.dim != Y.dim) throw std::invalid_argument("bl_dictionary_lower: dimension mismatch");
    if (dict_size < 1) throw std::invalid_argument("bl_dictionary_lower: dict_size must be >= 1");
    DistanceReport rep;
    rep.stage_a = X.stage;
    rep.stage_b = Y.stage;
    rep.estimator = Estimator::bl_lower;
    rep.L = L;
    rep.M = M;
    rep.seed = seed;
    double best = 0.0;
    for (int i = 0; i < dict_size; ++i) {
        Cone c = make_cone(i, seed, L, M, X, &Y);
        best = std::max(best, std::abs(mean_cone(c, X, L, M) - mean_cone(c, Y, L, M)));
    }
    rep.value = best;
    rep.uncertainty = M / std::sqrt(static_cast<double>(std::min(X.n, Y.n)));
    return rep;
}

DistanceReport bl_dictionary_lower(const SampleBatch& X, const GaussianSpec& ref, double L,
                                   double M, int dict_size, uint64_t seed, size_t mc_samples) {
    if (X.dim != ref.dim) throw std::invalid_argument("bl_dictionary_lower: dimension mismatch");
    if (dict_size < 1) throw std::invalid_argument("bl_dictionary_lower: dict_size must be >= 1");
    SampleBatch G = sample_mvn(ref, mc_samples, seed ^ 0x9E3779B97F4A7C15ull);
    DistanceReport rep;
    rep.stage_a = X.stage;
    rep.stage_b = Stage::Ztilde;
    rep.estimator = Estimator::bl_lower;
    rep.L = L;
    rep.M = M;
    rep.seed = seed;
    double best = 0.0;
    for (int i = 0; i < dict_size; ++i) {
        Cone c = make_cone(i, seed, L, M, X, nullptr);
        best = std::max(best, std::abs(mean_cone(c, X, L, M) - mean_cone(c, G, L, M)));
    }
    rep.value = best;
    rep.uncertainty =
        M * (1.0 / std::sqrt(static_cast<double>(X.n)) + 1.0 / std::sqrt(static_cast<double>(mc_samples)));
    rep.flags = "ref=mc";
    return rep;
}

std::complex<double> cf_empirical(const SampleBatch& X, const std::vector<double>& u) {
    if (static_cast<int>(u.size()) != X.dim)
        throw std::invalid_argument("cf_empirical: dimension mismatch");
    KahanSum re, im;
    for (size_t r = 0; r < X.n; ++r) {
        double ph = 0.0;
        for (int d = 0; d < X.dim; ++d) ph += u[d] * X.at(r, d);
        re.add(std::cos(ph));
        im.add(std::sin(ph));
    }
    double inv = 1.0 / static_cast<double>(X.n);
    return {re.value() * inv, im.value() * inv};
}

double cf_gauss(const GaussianSpec& spec, const std::vector<double>& u) {
    if (static_cast<int>(u.size()) != spec.dim)
        throw std::invalid_argument("cf_gauss: dimension mismatch");
    double q = 0.0;
    for (int i = 0; i < spec.dim; ++i)
        for (int j = 0; j < spec.dim; ++j) q += u[i] * u[j] * spec.covariance(i, j);
    return std::exp(-0.5 * q);
}

CfSupResult cf_sup_on_grid(const SampleBatch& X, const GaussianSpec& spec, double F,
                           int grid_per_axis) {
    if (!(F > 0)) throw std::invalid_argument("cf_sup_on_grid: F must be > 0");
    if (X.dim != spec.dim) throw std::invalid_argument("cf_sup_on_grid: dimension mismatch");
    int g = grid_per_axis;
    if (g < 3) g = 3;
    if (g % 2 == 0) ++g;  // force an odd grid so u = 0 is a node
    int N = X.dim;

    double u0 = -F, h = 2.0 * F / (g - 1);
    size_t cells = 1;
    for (int d = 0; d < N; ++d) cells *= static_cast<size_t>(g);

    // Per-row, per-axis phase recursion: e^{i u_k x} = e^{i u_0 x} (e^{i h x})^k.
    std::vector<std::vector<std::complex<double>>> axis(N,
                                                        std::vector<std::complex<double>>(g));
    auto fill_axes = [&](size_t r) {
        for (int d = 0; d < N; ++d) {
            double x = X.at(r, d);
            std::complex<double> base = std::polar(1.0, u0 * x);
            std::complex<double> step = std::polar(1.0, h * x);
            for (int k = 0; k < g; ++k) {
                axis[d][k] = base;
                base *= step;
            }
        }
    };

    // Grids beyond the memory budget are walked in cell chunks (the axis
    // tables are rebuilt per chunk, trading time for bounded memory).
    constexpr size_t kChunkCells = size_t{1} << 21;
    size_t chunk = std::min(cells, kChunkCells);
    std::vector<std::complex<double>> acc(chunk);

    CfSupResult out;
    out.argmax.assign(N, 0.0);
    double inv = 1.0 / static_cast<double>(X.n);
    std::vector<int> idx(N);
    std::vector<double> u(N);
    for (size_t start = 0; start < cells; start += chunk) {
        size_t len = std::min(chunk, cells - start);
        std::fill(acc.begin(), acc.begin() + len, std::complex<double>{0.0, 0.0});
        for (size_t r = 0; r < X.n; ++r) {
            fill_axes(r);
            // decode the chunk's first multi-index, then run the odometer
            size_t rem = start;
            for (int d = N - 1; d >= 0; --d) {
                idx[d] = static_cast<int>(rem % g);
                rem /= g;
            }
            for (size_t c = 0; c < len; ++c) {
                std::complex<double> v = axis[0][idx[0]];
                for (int d = 1; d < N; ++d) v *= axis[d][idx[d]];
                acc[c] += v;
                int d = N - 1;
                while (d >= 0 && ++idx[d] == g) idx[d--] = 0;
            }
        }
        size_t rem = start;
        for (int d = N - 1; d >= 0; --d) {
            idx[d] = static_cast<int>(rem % g);
            rem /= g;
        }
        for (size_t c = 0; c < len; ++c) {
            for (int d = 0; d < N; ++d) u[d] = u0 + h * idx[d];
            double diff = std::abs(acc[c] * inv - std::complex<double>{cf_gauss(spec, u), 0.0});
            if (diff > out.sup) {
                out.sup = diff;
                out.argmax = u;
            }
            int d = N - 1;
            while (d >= 0 && ++idx[d] == g) idx[d--] = 0;
        }
    }
    return out;
}

double abb_certificate(double L, double M, double R, double F, double cf_sup, double tail_mu,
                       double tail_nu, int N) {
    if (L < 0 || M < 0 || R < 0 || F <= 0 || cf_sup < 0 || tail_mu < 0 || tail_nu < 0)
        throw std::invalid_argument("abb_certificate: inputs must be non-negative, F > 0");
    return L / F + M * (std::pow(R * F, N) * cf_sup + tail_mu + tail_nu);
}

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double kolmogorov_1d(std::vector<double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) throw std::invalid_argument("kolmogorov_1d: need n >= 1");
    std::sort(samples.begin(), samples.end());
    size_t n = samples.size();
    double sup = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double F = cdf(samples[i]);
        double hi = static_cast<double>(i + 1) / static_cast<double>(n);
        double lo = static_cast<double>(i) / static_cast<double>(n);
        sup = std::max(sup, std::max(std::abs(F - hi), std::abs(F - lo)));
    }
    return sup;
}

double kolmogorov_1d(std::vector<double> samples) {
    return kolmogorov_1d(std::move(samples), std_normal_cdf);
}

BoundParams BoundParams::from(const ApproxParams& params, double C1, double eps1, double eps2,
                              double C2) {
    if (!(eps1 > 0 && eps1 < eps2 && eps1 + eps2 < 1))
        throw std::invalid_argument("BoundParams: need 0 < eps1 < eps2, eps1 + eps2 < 1");
    if (!(C2 > 7.5)) throw std::invalid_argument("BoundParams: need C2 > 7.5");
    BoundParams bp;
    bp.eps1 = eps1;
    bp.eps2 = eps2;
    bp.C2 = C2;
    bp.C1 = C1;
    bp.kappa2 = std::exp(1.0) / (std::exp(1.0) - 1.0);
    double lllT = params.logloglog_T;
    double half_llT = 0.5 * params.loglog_T;
    bp.r_threshold = std::sqrt(half_llT) / (C1 * C2) * std::pow(lllT, eps2);
    bp.u_norm1 = std::pow(lllT, eps1);
    bp.N_trunc = C1 * C2 * bp.r_threshold * bp.u_norm1 / std::sqrt(half_llT);
    return bp;
}

}  // namespace lclt
