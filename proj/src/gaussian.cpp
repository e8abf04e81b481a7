#include "lclt/gaussian.hpp"

#include <algorithm>
#include <cmath>

#include "lclt/arith.hpp"
#include "lclt/rng.hpp"

namespace lclt {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

double max_abs_entry(const Matrix& m) { return m.max_abs(); }

void require_admissible(const Matrix& C, const Matrix& E, double& gamma, double& q) {
    if (C.dim() != E.dim()) throw std::invalid_argument("dimension mismatch");
    if (!E.is_symmetric(1e-12)) throw std::invalid_argument("E_tilde must be symmetric");
    Matrix Cinv = C.inverse();
    gamma = max_abs_entry(Cinv);
    double n = static_cast<double>(C.dim());
    q = n * n * gamma * max_abs_entry(E);
    if (!(q < 1.0))
        throw PreconditionError("perturbation not admissible: N^2 max|C^-1| max|E| >= 1");
}

}  // namespace

GaussianSpec GaussianSpec::from_covariance(const Matrix& cov) {
    GaussianSpec spec;
    spec.dim = cov.dim();
    spec.covariance = cov;
    if (!cov.is_symmetric(1e-10)) throw std::invalid_argument("covariance must be symmetric");
    if (!cov.cholesky(spec.cholesky_factor))
        throw PreconditionError("covariance is not positive-definite");
    return spec;
}

SampleBatch sample_mvn(const GaussianSpec& spec, size_t n, uint64_t seed) {
    SampleBatch batch;
    batch.stage = Stage::Ztilde;
    batch.n = n;
    batch.dim = spec.dim;
    batch.seed = seed;
    batch.data.resize(n * static_cast<size_t>(spec.dim));
    std::vector<double> g(spec.dim);
    for (size_t row = 0; row < n; ++row) {
        fill_normals(seed, row, /*stream=*/0, g.data(), spec.dim);
        for (int i = 0; i < spec.dim; ++i) {
            double s = 0.0;
            for (int j = 0; j <= i; ++j) s += spec.cholesky_factor(i, j) * g[j];
            batch.at(row, i) = s;
        }
    }
    return batch;
}

double mvn_even_moment(const std::vector<double>& u, const GaussianSpec& spec, int n) {
    if (static_cast<int>(u.size()) != spec.dim) throw std::invalid_argument("dimension mismatch");
    if (n < 0) throw std::invalid_argument("moment order must be >= 0");
    double quad = 0.0;
    for (int i = 0; i < spec.dim; ++i)
        for (int j = 0; j < spec.dim; ++j) quad += u[i] * u[j] * spec.covariance(i, j);
    // (2n)!/(n! 2^n) = (2n-1)!!
    double coef = 1.0;
    for (int k = 1; k <= n; ++k) coef *= static_cast<double>(2 * k - 1);
    return coef * std::pow(quad, n);
}

double gaussian_tail(double r) {
    if (!(r > 0)) throw std::invalid_argument("gaussian_tail: r must be > 0");
    return std::sqrt(2.0 / 3.14159265358979323846) * std::exp(-0.5 * r * r) / r;
}

NeumannResult neumann_inverse(const Matrix& C, const Matrix& E_tilde, int terms) {
    if (terms < 0) throw std::invalid_argument("neumann_inverse: terms must be >= 0");
    double gamma, q;
    require_admissible(C, E_tilde, gamma, q);
    Matrix Cinv = C.inverse();
    Matrix A = Cinv * E_tilde;  // C^{-1} E
    int n = C.dim();
    Matrix series = Matrix::identity(n);
    Matrix pow = Matrix::identity(n);
    for (int k = 1; k <= terms; ++k) {
        pow = pow * A;
        series = (k % 2 == 1) ? series - pow : series + pow;
    }
    NeumannResult res;
    res.inverse_approx = series * Cinv;
    // Entries of (C^{-1}E)^k are bounded by q^k / N; multiplying the tail by
    // C^{-1} costs a factor N gamma.
    res.residual_bound = gamma * std::pow(q, terms + 1) / (1.0 - q);
    return res;
}

double det_ratio(const Matrix& C, const Matrix& E_tilde) {
    double gamma, q;
    require_admissible(C, E_tilde, gamma, q);
    Matrix A = C.inverse() * E_tilde;
    int n = C.dim();
    Matrix M = Matrix::identity(n) + A;
    return M.determinant();
}

DensityDiffResult density_diff(const Matrix& C, const Matrix& E_tilde, double f_sup,
                               double half_width_sigmas, int nodes_per_axis, uint64_t mc_seed) {
    double gamma, q;
    require_admissible(C, E_tilde, gamma, q);
    int N = C.dim();
    double eps = max_abs_entry(E_tilde);

    Matrix Ct = C + E_tilde;
    Matrix Cinv = C.inverse();
    Matrix Ctinv = Ct.inverse();
    double detC = C.determinant();
    double detCt = Ct.determinant();
    if (!(detC > 0) || !(detCt > 0))
        throw PreconditionError("density_diff: matrices must be positive-definite");

    double norm0 = 1.0 / (std::pow(kTwoPi, N / 2.0) * std::sqrt(detC));
    double norm1 = 1.0 / (std::pow(kTwoPi, N / 2.0) * std::sqrt(detCt));

    auto quad_form = [N](const Matrix& M, const std::vector<double>& x) {
        double s = 0.0;
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) s += x[i] * M(i, j) * x[j];
        return s;
    };

    double sigma = 0.0;
    for (int i = 0; i < N; ++i) sigma = std::max(sigma, std::max(C(i, i), Ct(i, i)));
    sigma = std::sqrt(sigma);
    double H = half_width_sigmas * sigma;

    DensityDiffResult out;

    if (N <= 3) {
        if (nodes_per_axis < 3) throw std::invalid_argument("density_diff: need >= 3 nodes per axis");
        int g = nodes_per_axis;
        double h = 2.0 * H / (g - 1);
        std::vector<double> x(N);
        std::vector<int> idx(N, 0);
        KahanSum acc;
        while (true) {
            double w = 1.0;
            for (int d = 0; d < N; ++d) {
                x[d] = -H + h * idx[d];
                if (idx[d] == 0 || idx[d] == g - 1) w *= 0.5;
            }
            double f0 = norm0 * std::exp(-0.5 * quad_form(Cinv, x));
            double f1 = norm1 * std::exp(-0.5 * quad_form(Ctinv, x));
            acc.add(w * std::abs(f1 - f0));
            int d = N - 1;
            while (d >= 0 && ++idx[d] == g) idx[d--] = 0;
            if (d < 0) break;
        }
        out.numeric_integral = acc.value() * std::pow(h, N);
        out.used_mc = false;
    } else {
        // Stratified MC: one stratum per orthant, equal allocation, antithetic
        // within the stratum via the uniform cube map.
        size_t per = 1u << 14;
        size_t strata = 1u << N;
        KahanSum acc, acc2;
        size_t total = per * strata;
        std::vector<double> x(N);
        for (size_t s = 0; s < strata; ++s) {
            for (size_t r = 0; r < per; ++r) {
                CounterRng rng(mc_seed, s * per + r, 7);
                for (int d = 0; d < N; ++d) {
                    double u = rng.next_unit() * H;
                    x[d] = (s >> d) & 1 ? -u : u;
                }
                double f0 = norm0 * std::exp(-0.5 * quad_form(Cinv, x));
                double f1 = norm1 * std::exp(-0.5 * quad_form(Ctinv, x));
                double v = std::abs(f1 - f0);
                acc.add(v);
                acc2.add(v * v);
            }
        }
        double mean = acc.value() / static_cast<double>(total);
        double var = acc2.value() / static_cast<double>(total) - mean * mean;
        double volume = std::pow(2.0 * H, N);
        out.numeric_integral = mean * volume;
        out.mc_stderr = volume * std::sqrt(std::max(var, 0.0) / static_cast<double>(total));
        out.used_mc = true;
    }

    // First-order bound: determinant part plus the exponent part driven by
    // E' = (C+E)^{-1} - C^{-1}, whose entries are O(N^2 gamma^2 eps).
    double b = static_cast<double>(N) * gamma * eps;  // entry bound on C^{-1}E
    double ddet_bound = 0.0;
    {
        double binom = 1.0, bk = 1.0, kfact = 1.0;
        for (int k = 1; k <= N; ++k) {
            binom = binom * (N - k + 1) / k;
            bk *= b * static_cast<double>(N);  // k! C(N,k) b^k <= (Nb)^k C(N,k)
            kfact *= k;
            ddet_bound += binom * bk;
        }
        (void)kfact;
    }
    double eprime_max = static_cast<double>(N) * static_cast<double>(N) * gamma * gamma * eps / (1.0 - q);
    double lam_min_cinv = 1.0 / C.sym_eig_max();
    double a = lam_min_cinv / 4.0;
    // integral over R^N of e^{-a |x|^2} |x|^2 dx = (pi/a)^{N/2} N/(2a)
    double I2 = std::pow(3.14159265358979323846 / a, N / 2.0) * N / (2.0 * a);
    double term2 = (static_cast<double>(N) * eprime_max / 2.0) * I2 / (std::pow(kTwoPi, N / 2.0) * std::sqrt(detC));
    out.paper_bound_shape = f_sup * (ddet_bound + term2);
    return out;
}

}  // namespace lclt
