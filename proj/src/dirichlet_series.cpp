#include "lclt/dirichlet_series.hpp"

#include <algorithm>
#include <cmath>

namespace lclt {

namespace {

// Range boundaries (lo, hi] for a block; Full is handled by concatenation.
std::pair<double, double> range_bounds(PolyRange r, const ApproxParams& p) {
    switch (r) {
        case PolyRange::P0: return {0.0, 13.0};
        case PolyRange::P1: return {13.0, p.Y_eff()};
        case PolyRange::P2: return {p.Y_eff(), p.X_eff()};
        case PolyRange::Full: return {0.0, p.X_eff()};
    }
    return {0.0, 0.0};
}

}  // namespace

namespace {

// Shared body: phase_sign = -1 evaluates e^{-i|t| log p} (t >= 0),
// phase_sign = +1 evaluates e^{+i|t| log p} (negative imaginary part).
double prime_poly_impl(const DirichletCharacter& chi, double sigma, const Height& t_abs,
                       int phase_sign, PolyRange range, const ApproxParams& params,
                       const PrimeTable& table) {
    auto [lo, hi] = range_bounds(range, params);
    if (hi > static_cast<double>(table.limit))
        throw CapacityError("eval_prime_poly: range exceeds sieve capacity");
    size_t first = table.lower_index(lo);
    size_t end = table.upper_index(hi);
    KahanSum re;
    double sgn = static_cast<double>(phase_sign);
    for (size_t i = first; i < end; ++i) {
        std::complex<double> cv = chi.evaluate(table.primes[i]);
        if (cv == 0.0) continue;
        double theta = static_cast<double>(reduce_phase(t_abs, table.primes[i]));
        double mag = std::exp(-sigma * table.log_p[i]);
        // Re( chi(p) e^{i sgn theta} ) * p^{-sigma}
        re.add(mag * (cv.real() * std::cos(theta) - sgn * cv.imag() * std::sin(theta)));
    }
    return re.value();
}

}  // namespace

double eval_prime_poly(const DirichletCharacter& chi, double sigma, const Height& t,
                       PolyRange range, const ApproxParams& params, const PrimeTable& table) {
    return prime_poly_impl(chi, sigma, t, -1, range, params, table);
}

double eval_prime_poly(const DirichletCharacter& chi, std::complex<double> s, PolyRange range,
                       const ApproxParams& params, const PrimeTable& table) {
    double t = s.imag();
    return prime_poly_impl(chi, s.real(), Height::from_double(std::abs(t)), t < 0 ? +1 : -1,
                           range, params, table);
}

namespace {

std::complex<double> lambda_poly_impl(const DirichletCharacter& chi, double sigma,
                                      const Height& t_abs, int phase_sign, PolyRange range,
                                      const ApproxParams& params, const PrimeTable& table) {
    auto [lo, hi] = range_bounds(range, params);
    if (hi > static_cast<double>(table.limit))
        throw CapacityError("eval_lambda_poly: range exceeds sieve capacity");
    // Collect prime powers n = p^k in (lo, hi], summed in ascending n.
    std::vector<std::pair<uint64_t, std::pair<size_t, int>>> entries;  // (n, (prime idx, k))
    size_t pend = table.upper_index(hi);
    for (size_t i = 0; i < pend; ++i) {
        uint64_t p = table.primes[i];
        double n = static_cast<double>(p);
        int k = 1;
        while (n <= hi) {
            if (n > lo) entries.push_back({static_cast<uint64_t>(n + 0.5), {i, k}});
            n *= static_cast<double>(p);
            ++k;
            if (n > 1.9e18) break;
        }
    }
    std::sort(entries.begin(), entries.end());
    KahanSum re, im;
    double sgn = static_cast<double>(phase_sign);
    for (auto& [n, ik] : entries) {
        auto [i, k] = ik;
        std::complex<double> cv = chi.evaluate(table.primes[i]);
        if (cv == 0.0) continue;
        std::complex<double> cvk = cv;
        for (int j = 1; j < k; ++j) cvk *= cv;
        double theta = static_cast<double>(reduce_phase(t_abs, table.primes[i]));
        // k * theta mod 2pi keeps the reduction exact for integer k.
        double thk = std::fmod(static_cast<double>(k) * theta, 6.283185307179586476925286766559);
        double mag = std::exp(-sigma * static_cast<double>(k) * table.log_p[i]) / static_cast<double>(k);
        std::complex<double> term = cvk * std::polar(mag, sgn * thk);
        re.add(term.real());
        im.add(term.imag());
    }
    return {re.value(), im.value()};
}

}  // namespace

std::complex<double> eval_lambda_poly(const DirichletCharacter& chi, double sigma, const Height& t,
                                      PolyRange range, const ApproxParams& params,
                                      const PrimeTable& table) {
    return lambda_poly_impl(chi, sigma, t, -1, range, params, table);
}

std::complex<double> eval_lambda_poly(const DirichletCharacter& chi, std::complex<double> s,
                                      PolyRange range, const ApproxParams& params,
                                      const PrimeTable& table) {
    double t = s.imag();
    return lambda_poly_impl(chi, s.real(), Height::from_double(std::abs(t)), t < 0 ? +1 : -1,
                            range, params, table);
}

int mollifier_coeff(uint64_t n, const ApproxParams& params, const PrimeTable& table) {
    if (n == 0) throw std::invalid_argument("mollifier_coeff: n must be >= 1");
    if (n == 1) return 1;
    double X = params.X_eff(), Y = params.Y_eff();
    auto fs = factorize(n, table);
    int below_Y = 0, mid = 0;
    for (const auto& f : fs) {
        double p = static_cast<double>(f.p);
        if (p > X) return 0;
        if (p <= Y)
            below_Y += f.k;
        else
            mid += f.k;
    }
    if (static_cast<double>(below_Y) > 100.0 * params.loglog_T) return 0;
    if (static_cast<double>(mid) > params.A * params.logloglog_T) return 0;
    return 1;
}

MollifierValue eval_mollifier(const DirichletCharacter& chi, std::complex<double> s,
                              const ApproxParams& params, uint64_t cutoff,
                              const PrimeTable& table) {
    if (cutoff == 0) throw std::invalid_argument("eval_mollifier: cutoff must be >= 1");
    if (cutoff > table.limit * table.limit)
        throw CapacityError("eval_mollifier: cutoff exceeds factorization capacity");
    KahanSum re, im;
    for (uint64_t n = 1; n <= cutoff; ++n) {
        int mu = mobius(n, table);
        if (mu == 0) continue;
        if (!mollifier_coeff(n, params, table)) continue;
        std::complex<double> cv = chi.evaluate(n);
        if (cv == 0.0) continue;
        double ln = std::log(static_cast<double>(n));
        std::complex<double> term =
            static_cast<double>(mu) * cv * std::polar(std::exp(-s.real() * ln), -s.imag() * ln);
        re.add(term.real());
        im.add(term.imag());
    }
    // Crude tail over the full support Y^{100 loglog T} X^{A logloglog T},
    // bounded by the integral of x^{-sigma}.
    double lnS = 100.0 * params.loglog_T * std::log(params.Y_eff()) +
                 params.A * std::max(params.logloglog_T, 0.0) * std::log(params.X_eff());
    double sigma = s.real();
    double tail;
    if (std::abs(1.0 - sigma) < 1e-12) {
        tail = lnS - std::log(static_cast<double>(cutoff));
    } else {
        double a = (1.0 - sigma) * std::log(static_cast<double>(cutoff));
        double b = (1.0 - sigma) * lnS;
        tail = (std::exp(b) - std::exp(a)) / (1.0 - sigma);
    }
    if (!(tail >= 0)) tail = 0.0;
    return {std::complex<double>{re.value(), im.value()}, tail, cutoff};
}

std::complex<double> eval_L_truncated(const DirichletCharacter& chi, std::complex<double> s,
                                      uint64_t cutoff) {
    if (cutoff == 0) throw std::invalid_argument("eval_L_truncated: cutoff must be >= 1");
    if (!(s.real() > 0)) throw std::invalid_argument("eval_L_truncated: need Re s > 0");
    KahanSum re, im;
    double sigma = s.real(), t = s.imag();
    for (uint64_t n = 1; n <= cutoff; ++n) {
        std::complex<double> cv = chi.evaluate(n);
        if (cv == 0.0) continue;
        double ln = std::log(static_cast<double>(n));
        std::complex<double> term = cv * std::polar(std::exp(-sigma * ln), -t * ln);
        re.add(term.real());
        im.add(term.imag());
    }
    return {re.value(), im.value()};
}

LTruncEvaluator::LTruncEvaluator(const DirichletCharacter& chi, double sigma, uint64_t cutoff)
    : cutoff_(cutoff) {
    if (cutoff == 0) throw std::invalid_argument("LTruncEvaluator: cutoff must be >= 1");
    amp_re_.reserve(cutoff);
    amp_im_.reserve(cutoff);
    log_n_.reserve(cutoff);
    for (uint64_t n = 1; n <= cutoff; ++n) {
        std::complex<double> cv = chi.evaluate(n);
        if (cv == 0.0) continue;
        double ln = std::log(static_cast<double>(n));
        double mag = std::exp(-sigma * ln);
        amp_re_.push_back(mag * cv.real());
        amp_im_.push_back(mag * cv.imag());
        log_n_.push_back(ln);
    }
}

std::complex<double> LTruncEvaluator::value(double t) const {
    KahanSum re, im;
    size_t m = log_n_.size();
    for (size_t i = 0; i < m; ++i) {
        double ph = t * log_n_[i];
        double c = std::cos(ph), s = std::sin(ph);
        // (ar + i ai) * (c - i s)
        re.add(amp_re_[i] * c + amp_im_[i] * s);
        im.add(amp_im_[i] * c - amp_re_[i] * s);
    }
    return {re.value(), im.value()};
}

PrimePolyEvaluator::PrimePolyEvaluator(const DirichletCharacter& chi, const ApproxParams& params,
                                       const PrimeTable& table)
    : chi_(chi),
      Y_(params.Y_eff()),
      X_(params.X_eff()),
      reducer_(table, 0, table.upper_index(params.X_eff())) {
    if (X_ > static_cast<double>(table.limit))
        throw CapacityError("PrimePolyEvaluator: X exceeds sieve capacity");
    size_t end = table.upper_index(X_);
    cv_.reserve(end);
    logp_.reserve(end);
    for (size_t i = 0; i < end; ++i) {
        cv_.push_back(chi.evaluate(table.primes[i]));
        logp_.push_back(table.log_p[i]);
    }
    end_p0_ = table.upper_index(13.0);
    end_p1_ = table.upper_index(Y_);
}

PrimePolyEvaluator::StageValues PrimePolyEvaluator::eval(double sigma, const Height& t) const {
    KahanSum p0, p1, p2, lam_re, lam_im;
    constexpr double kTwoPi = 6.283185307179586476925286766559;
    size_t n = reducer_.size();
    for (size_t i = 0; i < n; ++i) {
        if (cv_[i] == 0.0) continue;
        double theta = static_cast<double>(reducer_.phase(t, i));
        double c = std::cos(theta), s = std::sin(theta);
        double mag = std::exp(-sigma * logp_[i]);
        double re = mag * (cv_[i].real() * c + cv_[i].imag() * s);
        if (i < end_p0_)
            p0.add(re);
        else if (i < end_p1_)
            p1.add(re);
        else
            p2.add(re);
        // prime-power series: k = 1 term plus higher powers with p^k <= X
        double im = mag * (cv_[i].imag() * c - cv_[i].real() * s);
        lam_re.add(re);
        lam_im.add(im);
        double pk = static_cast<double>(reducer_.entry(i));
        double nk = pk * pk;
        std::complex<double> cvk = cv_[i] * cv_[i];
        int k = 2;
        while (nk <= X_) {
            double thk = std::fmod(static_cast<double>(k) * theta, kTwoPi);
            double mk = std::exp(-sigma * static_cast<double>(k) * logp_[i]) / static_cast<double>(k);
            double ck = std::cos(thk), sk = std::sin(thk);
            lam_re.add(mk * (cvk.real() * ck + cvk.imag() * sk));
            lam_im.add(mk * (cvk.imag() * ck - cvk.real() * sk));
            nk *= pk;
            cvk *= cv_[i];
            ++k;
        }
    }
    StageValues out;
    out.p0 = p0.value();
    out.p1 = p1.value();
    out.p2 = p2.value();
    out.p_full = out.p0 + out.p1 + out.p2;
    out.lambda = {lam_re.value(), lam_im.value()};
    return out;
}

}  // namespace lclt
