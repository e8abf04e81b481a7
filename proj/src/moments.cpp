#include "lclt/moments.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "lclt/arith.hpp"
#include "lclt/dirichlet_series.hpp"
#include "lclt/parallel.hpp"

namespace lclt {

namespace {

// Twisted coefficient psi(p) = sum_j a_j chi_j(p) p^{-i alpha_j}.
std::vector<std::complex<double>> twisted_weights(const std::vector<double>& a,
                                                  const ShiftConfig& shifts,
                                                  const std::vector<DirichletCharacter>& chars,
                                                  const PrimeTable& table, size_t end) {
    std::vector<std::complex<double>> psi(end, {0.0, 0.0});
    for (size_t i = 0; i < end; ++i) {
        double lp = table.log_p[i];
        std::complex<double> s{0.0, 0.0};
        for (size_t j = 0; j < a.size(); ++j) {
            std::complex<double> cv = chars[j].evaluate(table.primes[i]);
            if (cv == 0.0) continue;
            s += a[j] * cv * std::polar(1.0, -shifts.alphas[j] * lp);
        }
        psi[i] = s;
    }
    return psi;
}

std::complex<double> ipow(std::complex<double> z, int k) {
    std::complex<double> r{1.0, 0.0};
    for (int i = 0; i < k; ++i) r *= z;
    return r;
}

double factorial_d(int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

}  // namespace

MomentReport quad_moment(const std::vector<double>& a, const ShiftConfig& shifts,
                         const std::vector<DirichletCharacter>& chars, const ApproxParams& params,
                         int k, int l, long nodes, const PrimeTable& table) {
    if (k < 0 || l < 0) throw std::invalid_argument("quad_moment: need k, l >= 0");
    if (nodes < 1000) throw std::invalid_argument("quad_moment: need at least 1000 nodes");
    if (a.size() != chars.size() || static_cast<int>(a.size()) != shifts.N)
        throw std::invalid_argument("quad_moment: dimension mismatch");
    double T = params.T;
    double Y = params.Y_eff();
    if (Y > static_cast<double>(table.limit))
        throw CapacityError("quad_moment: Y exceeds sieve capacity");

    MomentReport rep;
    rep.k = k;
    rep.l = l;
    rep.T = T;
    rep.Y = Y;
    rep.N = shifts.N;
    rep.nodes = nodes;

    if (k == 0 && l == 0) {
        rep.quad_value = {1.0, 0.0};
        rep.formula_value = 1.0;
        return rep;
    }

    // Node spacing must resolve the fastest oscillation (k+l) ln Y.
    double max_freq = static_cast<double>(k + l) * std::log(Y);
    long required = static_cast<long>(std::ceil(T * 4.0 * max_freq / 3.14159265358979323846));
    if (nodes < required)
        throw PreconditionError("quad_moment: under-resolved oscillation; need >= " +
                                std::to_string(required) + " nodes");
    if (nodes % 2) ++nodes;  // even count so the half-grid shares both endpoints
    rep.nodes = nodes;

    size_t end = table.upper_index(Y);
    auto psi = twisted_weights(a, shifts, chars, table, end);
    std::vector<double> w_re(end), w_im(end), lp(end);
    double sigma0 = params.sigma0;
    for (size_t i = 0; i < end; ++i) {
        std::complex<double> w = psi[i] * std::exp(-sigma0 * table.log_p[i]);
        w_re[i] = w.real();
        w_im[i] = w.imag();
        lp[i] = table.log_p[i];
    }

    double h = T / static_cast<double>(nodes);
    size_t total = static_cast<size_t>(nodes) + 1;
    constexpr size_t kChunk = 8192;
    size_t n_chunks = (total + kChunk - 1) / kChunk;
    std::vector<std::complex<double>> full(n_chunks, {0, 0}), half(n_chunks, {0, 0});

    parallel_chunks(total, kChunk, default_threads(), [&](size_t b, size_t e, size_t ci) {
        KahanSum fre, fim, hre, him;
        for (size_t i = b; i < e; ++i) {
            double t = T + h * static_cast<double>(i);
            double zr = 0.0, zi = 0.0;
            for (size_t p = 0; p < end; ++p) {
                double ph = t * lp[p];
                double c = std::cos(ph), s = std::sin(ph);
                // w * e^{-i t lp}
                zr += w_re[p] * c + w_im[p] * s;
                zi += w_im[p] * c - w_re[p] * s;
            }
            std::complex<double> z{zr, zi};
            std::complex<double> v = ipow(z, k) * ipow(std::conj(z), l);
            double wgt = (i == 0 || i + 1 == total) ? 0.5 : 1.0;
            fre.add(wgt * v.real());
            fim.add(wgt * v.imag());
            if (i % 2 == 0) {
                double wh = (i == 0 || i + 1 == total) ? 0.5 : 1.0;
                hre.add(wh * v.real());
                him.add(wh * v.imag());
            }
        }
        full[ci] = {fre.value(), fim.value()};
        half[ci] = {hre.value(), him.value()};
    });

    std::complex<double> sum_full{0, 0}, sum_half{0, 0};
    for (size_t c = 0; c < n_chunks; ++c) {
        sum_full += full[c];
        sum_half += half[c];
    }
    std::complex<double> I_full = sum_full * h / T;
    std::complex<double> I_half = sum_half * (2.0 * h) / T;
    rep.quad_value = I_full;
    double richardson = std::abs(I_full - I_half) / 3.0;

    // Norm of the twisted weights at sigma0 and the diagonal main term.
    double D = 0.0;
    for (size_t i = 0; i < end; ++i) D += w_re[i] * w_re[i] + w_im[i] * w_im[i];
    double a_norm1 = 0.0;
    for (double ai : a) a_norm1 += std::abs(ai);

    double offdiag = 0.0;
    if (k == l) {
        rep.formula_value = factorial_d(k) * std::pow(D, k);
        // True off-diagonal allowance by pair enumeration over the k-fold
        // product support, when affordable.
        std::vector<std::pair<double, double>> supp;  // (log n, |coef| with coef = b_k psi/n^{sigma0})
        bool enumerated = false;
        if (k == 1) {
            supp.reserve(end);
            for (size_t i = 0; i < end; ++i)
                supp.push_back({lp[i], std::abs(std::complex<double>{w_re[i], w_im[i]})});
            enumerated = true;
        } else if (k == 2 && end * end <= 4'000'000) {
            for (size_t i = 0; i < end; ++i)
                for (size_t j = i; j < end; ++j) {
                    double b = (i == j) ? 1.0 : 2.0;
                    double mag = b * std::abs(std::complex<double>{w_re[i], w_im[i]}) *
                                 std::abs(std::complex<double>{w_re[j], w_im[j]});
                    supp.push_back({lp[i] + lp[j], mag});
                }
            enumerated = true;
        }
        if (enumerated && supp.size() * supp.size() <= 40'000'000) {
            KahanSum od;
            for (size_t i = 0; i < supp.size(); ++i)
                for (size_t j = 0; j < supp.size(); ++j) {
                    if (i == j) continue;
                    double dl = std::abs(supp[i].first - supp[j].first);
                    double factor = dl == 0.0 ? 1.0 : std::min(1.0, 2.0 / (T * dl));
                    od.add(supp[i].second * supp[j].second * factor);
                }
            offdiag = od.value();
        } else {
            offdiag = factorial_d(k) * factorial_d(l) * std::pow(a_norm1 * Y, k + l) / T;
        }
    } else {
        rep.formula_value = factorial_d(k) * factorial_d(l) * std::pow(a_norm1 * Y, k + l) / T;
    }
    rep.error_budget = richardson + offdiag;
    return rep;
}

double exact_diagonal_moment(const std::vector<double>& a, const ShiftConfig& shifts,
                             const std::vector<DirichletCharacter>& chars,
                             const ApproxParams& params, int k, const PrimeTable& table) {
    if (k < 0 || k > 3) throw std::invalid_argument("exact_diagonal_moment: need 0 <= k <= 3");
    if (k == 0) return 1.0;
    double Y = params.Y_eff();
    size_t end = table.upper_index(Y);
    double budget = std::pow(static_cast<double>(end), k);
    if (budget > 1e8) throw CapacityError("exact_diagonal_moment: enumeration budget exceeded");

    auto psi = twisted_weights(a, shifts, chars, table, end);
    std::vector<double> x(end);
    double two_sigma0 = 2.0 * params.sigma0;
    for (size_t i = 0; i < end; ++i)
        x[i] = std::norm(psi[i]) * std::exp(-two_sigma0 * table.log_p[i]);

    // Direct enumeration by multiplicity pattern; k <= 3 keeps this explicit.
    double total = 0.0, squarefree = 0.0;
    if (k == 1) {
        KahanSum s;
        for (double v : x) s.add(v);
        total = squarefree = s.value();
    } else if (k == 2) {
        KahanSum sf, nsf;
        for (size_t i = 0; i < end; ++i) {
            for (size_t j = i + 1; j < end; ++j) sf.add(4.0 * x[i] * x[j]);  // b=2
            nsf.add(x[i] * x[i]);                                            // n=p^2, b=1
        }
        squarefree = sf.value();
        total = squarefree + nsf.value();
    } else {  // k == 3
        KahanSum sf, nsf;
        for (size_t i = 0; i < end; ++i) {
            for (size_t j = i + 1; j < end; ++j) {
                for (size_t m = j + 1; m < end; ++m) sf.add(36.0 * x[i] * x[j] * x[m]);  // b=6
                nsf.add(9.0 * x[i] * x[i] * x[j]);  // p^2 q, b=3
                nsf.add(9.0 * x[i] * x[j] * x[j]);  // p q^2, b=3
            }
            nsf.add(x[i] * x[i] * x[i]);  // p^3, b=1
        }
        squarefree = sf.value();
        total = squarefree + nsf.value();
    }

    // Cross-check the square-free part against k! * (k! e_k(x)) via Newton
    // identities: sum over distinct k-subsets of (k!)^2 prod x equals
    // (k!)^2 e_k.
    KahanSum p1s, p2s, p3s;
    for (double v : x) {
        p1s.add(v);
        p2s.add(v * v);
        p3s.add(v * v * v);
    }
    double P1 = p1s.value(), P2 = p2s.value(), P3 = p3s.value();
    double ek = 0.0;
    if (k == 1) ek = P1;
    if (k == 2) ek = (P1 * P1 - P2) / 2.0;
    if (k == 3) ek = (P1 * P1 * P1 - 3.0 * P1 * P2 + 2.0 * P3) / 6.0;
    double expect = factorial_d(k) * factorial_d(k) * ek;
    double scale = std::max(std::abs(expect), 1e-300);
    if (std::abs(squarefree - expect) > 1e-10 * scale)
        throw std::logic_error("exact_diagonal_moment: square-free expansion mismatch");

    return total;
}

double chebyshev_tail(double moment_2k, double threshold, int k) {
    if (!(moment_2k >= 0)) throw std::invalid_argument("chebyshev_tail: moment must be >= 0");
    if (!(threshold > 0)) throw std::invalid_argument("chebyshev_tail: threshold must be > 0");
    if (k < 0) throw std::invalid_argument("chebyshev_tail: k must be >= 0");
    return moment_2k / std::pow(threshold, 2 * k);
}

double p1_exp_tail(double r, double T) {
    if (!(r > 0)) throw std::invalid_argument("p1_exp_tail: r must be > 0");
    double llT = std::log(std::log(T));
    if (!(llT > 0)) throw std::invalid_argument("p1_exp_tail: T too small");
    return std::sqrt(1.0 / 3.14159265358979323846) * std::sqrt(llT) / r * std::exp(-r * r / llT) +
           1.0 / T;
}

ExpPartialCheck exp_partial_bound_check(std::complex<double> z, int n) {
    if (n < 0) throw std::invalid_argument("exp_partial_bound_check: n must be >= 0");
    constexpr mpfr_prec_t kPrec = 640;
    mpfr_t zr, zi, er, ei, tr, ti, sr, si, tmp1, tmp2;
    mpfr_inits2(kPrec, zr, zi, er, ei, tr, ti, sr, si, tmp1, tmp2, static_cast<mpfr_ptr>(nullptr));
    mpfr_set_d(zr, z.real(), MPFR_RNDN);
    mpfr_set_d(zi, z.imag(), MPFR_RNDN);

    // e^z = e^{x} (cos y + i sin y)
    mpfr_exp(tmp1, zr, MPFR_RNDN);
    mpfr_sin_cos(tmp2, er, zi, MPFR_RNDN);  // tmp2 = sin y, er = cos y
    mpfr_mul(ei, tmp1, tmp2, MPFR_RNDN);
    mpfr_mul(er, tmp1, er, MPFR_RNDN);

    // partial sum: term_0 = 1, term_j = term_{j-1} z / j
    mpfr_set_ui(tr, 1, MPFR_RNDN);
    mpfr_set_ui(ti, 0, MPFR_RNDN);
    mpfr_set_ui(sr, 1, MPFR_RNDN);
    mpfr_set_ui(si, 0, MPFR_RNDN);
    for (int j = 1; j <= n; ++j) {
        // (tr + i ti) * (zr + i zi)
        mpfr_mul(tmp1, tr, zr, MPFR_RNDN);
        mpfr_mul(tmp2, ti, zi, MPFR_RNDN);
        mpfr_sub(tmp1, tmp1, tmp2, MPFR_RNDN);  // new re * j
        mpfr_mul(tmp2, tr, zi, MPFR_RNDN);
        mpfr_set(tr, tmp1, MPFR_RNDN);
        mpfr_mul(tmp1, ti, zr, MPFR_RNDN);
        mpfr_add(ti, tmp1, tmp2, MPFR_RNDN);
        mpfr_div_ui(tr, tr, static_cast<unsigned long>(j), MPFR_RNDN);
        mpfr_div_ui(ti, ti, static_cast<unsigned long>(j), MPFR_RNDN);
        mpfr_add(sr, sr, tr, MPFR_RNDN);
        mpfr_add(si, si, ti, MPFR_RNDN);
    }

    mpfr_sub(er, er, sr, MPFR_RNDN);
    mpfr_sub(ei, ei, si, MPFR_RNDN);
    mpfr_hypot(tmp1, er, ei, MPFR_RNDN);

    ExpPartialCheck out;
    out.lhs = mpfr_get_d(tmp1, MPFR_RNDN);
    out.rhs = std::exp(-static_cast<double>(n));
    out.ok = out.lhs < out.rhs;
    mpfr_clears(zr, zi, er, ei, tr, ti, sr, si, tmp1, tmp2, static_cast<mpfr_ptr>(nullptr));
    return out;
}

StirlingReport stirling_bounds(long n) {
    if (n < 1) throw std::invalid_argument("stirling_bounds: n must be >= 1");
    StirlingReport rep;
    double nd = static_cast<double>(n);
    double log_fact = std::lgamma(nd + 1.0);
    double log_main = 0.5 * std::log(2.0 * 3.14159265358979323846 * nd) + nd * (std::log(nd) - 1.0);
    rep.value = log_fact < 700 ? std::exp(log_fact) : std::numeric_limits<double>::infinity();
    rep.main = log_main < 700 ? std::exp(log_main) : std::numeric_limits<double>::infinity();
    rep.rel_err = std::abs(std::expm1(log_fact - log_main));
    return rep;
}

double mollifier_mean_square(const DirichletCharacter& chi, const ApproxParams& params,
                             uint64_t cutoff, long nodes, const PrimeTable& table) {
    double T = params.T;
    if (T > 1e5 + 0.5 || cutoff > 100000)
        throw CapacityError("mollifier_mean_square: desk-scale budget is T <= 1e5, cutoff <= 1e5");
    if (nodes < 16) throw std::invalid_argument("mollifier_mean_square: too few nodes");

    uint64_t Lcut = static_cast<uint64_t>(T);
    // L-series tables
    std::vector<double> lre, lim, lln;
    for (uint64_t n = 1; n <= Lcut; ++n) {
        std::complex<double> cv = chi.evaluate(n);
        if (cv == 0.0) continue;
        double ln = std::log(static_cast<double>(n));
        double mag = std::exp(-params.sigma0 * ln);
        lre.push_back(mag * cv.real());
        lim.push_back(mag * cv.imag());
        lln.push_back(ln);
    }
    // Mollifier tables (mu(n) a(n) chi(n) != 0 only)
    std::vector<double> mre, mim, mln;
    for (uint64_t n = 1; n <= cutoff; ++n) {
        int mu = mobius(n, table);
        if (mu == 0) continue;
        if (!mollifier_coeff(n, params, table)) continue;
        std::complex<double> cv = chi.evaluate(n);
        if (cv == 0.0) continue;
        double ln = std::log(static_cast<double>(n));
        double mag = std::exp(-params.sigma0 * ln) * mu;
        mre.push_back(mag * cv.real());
        mim.push_back(mag * cv.imag());
        mln.push_back(ln);
    }

    double h = T / static_cast<double>(nodes);
    size_t total = static_cast<size_t>(nodes) + 1;
    constexpr size_t kChunk = 256;
    size_t n_chunks = (total + kChunk - 1) / kChunk;
    std::vector<double> partial(n_chunks, 0.0);
    parallel_chunks(total, kChunk, default_threads(), [&](size_t b, size_t e, size_t ci) {
        KahanSum acc;
        for (size_t i = b; i < e; ++i) {
            double t = T + h * static_cast<double>(i);
            double Lr = 0.0, Li = 0.0;
            for (size_t m = 0; m < lln.size(); ++m) {
                double ph = t * lln[m];
                double c = std::cos(ph), s = std::sin(ph);
                Lr += lre[m] * c + lim[m] * s;
                Li += lim[m] * c - lre[m] * s;
            }
            double Mr = 0.0, Mi = 0.0;
            for (size_t m = 0; m < mln.size(); ++m) {
                double ph = t * mln[m];
                double c = std::cos(ph), s = std::sin(ph);
                Mr += mre[m] * c + mim[m] * s;
                Mi += mim[m] * c - mre[m] * s;
            }
            double pr = Lr * Mr - Li * Mi;
            double pi = Lr * Mi + Li * Mr;
            double dr = 1.0 - pr;
            double wgt = (i == 0 || i + 1 == total) ? 0.5 : 1.0;
            acc.add(wgt * (dr * dr + pi * pi));
        }
        partial[ci] = acc.value();
    });
    KahanSum sum;
    for (double v : partial) sum.add(v);
    return sum.value() * h / T;
}

}  // namespace lclt
