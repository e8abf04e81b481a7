#include "lclt/covariance.hpp"

#include <algorithm>
#include <cmath>

namespace lclt {

PairClass classify_shift_pair(double alpha_i, double alpha_j, double T, double delta_budget) {
    double llT = std::log(std::log(T));
    if (!(llT > 0)) throw std::invalid_argument("classify_shift_pair: T too small for log log T > 0");
    PairClass pc;
    double d = std::abs(alpha_i - alpha_j);
    if (d == 0.0) {
        pc.c = 1.0;
        pc.e = 0.0;
        pc.violates_budget = false;
        return pc;
    }
    double log_inv = std::log(1.0 / d);
    pc.c = std::clamp(log_inv / llT, 0.0, 1.0);
    pc.e = log_inv - pc.c * llT;
    pc.violates_budget = std::abs(pc.e) > delta_budget;
    return pc;
}

ShiftConfig ShiftConfig::make(std::vector<double> alphas, double T, double Delta_budget,
                              double delta_budget, double epsilon) {
    if (!(epsilon > 0 && epsilon < 2.0 / 3.0))
        throw std::invalid_argument("ShiftConfig: epsilon must lie in (0, 2/3)");
    ShiftConfig sc;
    sc.N = static_cast<int>(alphas.size());
    for (double a : alphas)
        if (std::abs(a) > 0.5 * T)
            throw std::invalid_argument("ShiftConfig: |alpha| must be <= 0.5 T");
    sc.alphas = std::move(alphas);
    sc.Delta_budget = Delta_budget;
    sc.delta_budget = delta_budget;
    sc.epsilon = epsilon;
    sc.classes.resize(static_cast<size_t>(sc.N) * sc.N);
    for (int i = 0; i < sc.N; ++i)
        for (int j = 0; j < sc.N; ++j)
            sc.classes[static_cast<size_t>(i) * sc.N + j] =
                classify_shift_pair(sc.alphas[i], sc.alphas[j], T, delta_budget);
    return sc;
}

double v_min(double T, double alpha_i, double alpha_j) {
    double llT = std::log(std::log(T));
    double d = std::abs(alpha_i - alpha_j);
    if (d == 0.0) return llT;
    return std::min(llT, std::log(1.0 / d));
}

double u_quadratic(const std::vector<double>& a, const ShiftConfig& shifts,
                   const std::vector<DirichletCharacter>& chars, double T) {
    if (a.size() != static_cast<size_t>(shifts.N) || chars.size() != a.size())
        throw std::invalid_argument("u_quadratic: dimension mismatch");
    double llT = std::log(std::log(T));
    double sum = 0.0;
    for (double ai : a) sum += ai * ai;
    sum *= llT;
    for (int i = 0; i < shifts.N; ++i)
        for (int j = i + 1; j < shifts.N; ++j) {
            int d = pair_delta(chars[i], chars[j]);
            if (!d) continue;
            sum += 2.0 * a[i] * a[j] * v_min(T, shifts.alphas[i], shifts.alphas[j]);
        }
    return sum;
}

PdReport check_pd(const Matrix& m, double sym_tol) {
    if (!m.is_symmetric(sym_tol)) throw std::invalid_argument("check_pd: asymmetric input");
    PdReport rep;
    int n = m.dim();
    double scale = std::max(1.0, m.max_abs());
    rep.minors.reserve(n);
    bool all_pos = true;
    bool borderline = false;
    double tol_base = 1e-10;
    double scale_pow = 1.0;
    for (int r = 1; r <= n; ++r) {
        scale_pow *= scale;
        double minor = m.leading_minor(r);
        rep.minors.push_back(minor);
        double tol = tol_base * scale_pow;
        if (std::abs(minor) <= tol) borderline = true;
        if (!(minor > 0)) all_pos = false;
    }
    Matrix L;
    rep.cholesky_ok = m.cholesky(L);
    rep.indeterminate = borderline;
    rep.pd = all_pos && rep.cholesky_ok;
    return rep;
}

Matrix build_K(const ShiftConfig& shifts, const std::vector<DirichletCharacter>& chars) {
    if (chars.size() != static_cast<size_t>(shifts.N))
        throw std::invalid_argument("build_K: dimension mismatch");
    Matrix K(shifts.N);
    for (int i = 0; i < shifts.N; ++i) {
        K(i, i) = 1.0;
        for (int j = i + 1; j < shifts.N; ++j) {
            double v = pair_delta(chars[i], chars[j]) ? shifts.pair(i, j).c : 0.0;
            K(i, j) = v;
            K(j, i) = v;
        }
    }
    return K;
}

Matrix build_K_tilde(double T, const ShiftConfig& shifts,
                     const std::vector<DirichletCharacter>& chars, const ApproxParams& params,
                     const PrimeTable& table) {
    if (chars.size() != static_cast<size_t>(shifts.N))
        throw std::invalid_argument("build_K_tilde: dimension mismatch");
    if (!(std::abs(T - params.T) <= 1e-9 * T))
        throw std::invalid_argument("build_K_tilde: T disagrees with the parameter bundle");
    double Y = params.Y_eff();
    size_t first = table.upper_index(13.0);
    size_t end = table.upper_index(Y);
    if (first >= end) throw PreconditionError("build_K_tilde: empty P1 range");

    int N = shifts.N;
    std::vector<double> var(N, 0.0);
    double two_sigma0 = 2.0 * params.sigma0;
    for (int j = 0; j < N; ++j) {
        KahanSum s;
        for (size_t i = first; i < end; ++i) {
            std::complex<double> cv = chars[j].evaluate(table.primes[i]);
            double a2 = std::norm(cv);
            if (a2 == 0.0) continue;
            s.add(a2 * std::exp(-two_sigma0 * table.log_p[i]));
        }
        var[j] = s.value();
        if (!(var[j] > 0)) throw PreconditionError("build_K_tilde: vanishing P1 variance");
    }

    Matrix K(N);
    for (int i = 0; i < N; ++i) {
        K(i, i) = 1.0;
        for (int j = i + 1; j < N; ++j) {
            double dalpha = shifts.alphas[i] - shifts.alphas[j];
            KahanSum s;
            for (size_t k = first; k < end; ++k) {
                std::complex<double> cv =
                    chars[i].evaluate(table.primes[k]) * std::conj(chars[j].evaluate(table.primes[k]));
                if (cv == 0.0) continue;
                double lp = table.log_p[k];
                double mag = std::exp(-two_sigma0 * lp);
                // Re( chi_i conj(chi_j)(p) p^{-i dalpha} )
                s.add(mag * (cv.real() * std::cos(dalpha * lp) + cv.imag() * std::sin(dalpha * lp)));
            }
            double v = s.value() / std::sqrt(var[i] * var[j]);
            K(i, j) = v;
            K(j, i) = v;
        }
    }
    return K;
}

CovarianceSpec make_covariance_spec(double T, const ShiftConfig& shifts,
                                    const std::vector<DirichletCharacter>& chars,
                                    const ApproxParams& params, const PrimeTable& table) {
    CovarianceSpec spec;
    spec.T = T;
    spec.K_target = build_K(shifts, chars);
    spec.K_empirical = build_K_tilde(T, shifts, chars, params, table);
    spec.pd_target = check_pd(spec.K_target).pd;
    spec.pd_empirical = check_pd(spec.K_empirical).pd;
    return spec;
}

Normalizer normalizer(double T, const DirichletCharacter& chi, const ApproxParams& params,
                      const PrimeTable& table) {
    double Y = params.Y_eff();
    size_t first = table.upper_index(13.0);
    size_t end = table.upper_index(Y);
    if (first >= end) throw PreconditionError("normalizer: empty P1 range");
    KahanSum s;
    double two_sigma0 = 2.0 * params.sigma0;
    for (size_t i = first; i < end; ++i) {
        double a2 = std::norm(chi.evaluate(table.primes[i]));
        if (a2 == 0.0) continue;
        s.add(a2 * std::exp(-two_sigma0 * table.log_p[i]));
    }
    Normalizer n;
    n.M_T_chi = s.value();
    if (!(n.M_T_chi > 0)) throw PreconditionError("normalizer: vanishing M_{T,chi}");
    double llT = std::log(std::log(T));
    n.C1 = std::sqrt(llT / n.M_T_chi);
    n.kappa2 = std::exp(1.0) / (std::exp(1.0) - 1.0);
    n.M_le_loglogT = n.M_T_chi <= llT;
    n.C1_sq_lt_kappa2 = n.C1 * n.C1 < n.kappa2;
    return n;
}

}  // namespace lclt
