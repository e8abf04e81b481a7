#include "lclt/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>

#include <json.hpp>

#include "lclt/bigfixed.hpp"
#include "lclt/dirichlet_series.hpp"
#include "lclt/parallel.hpp"
#include "lclt/rng.hpp"

namespace lclt {

namespace {

using nlohmann::json;

constexpr double kNearZeroGuard = 1e-12;

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

uint64_t fnv1a(uint64_t h, uint64_t v) {
    for (int b = 0; b < 8; ++b) {
        h ^= (v >> (8 * b)) & 0xFF;
        h *= 0x100000001B3ull;
    }
    return h;
}

const std::vector<Stage> kChainOrder = {Stage::XT, Stage::X0T, Stage::MT,
                                        Stage::QT, Stage::RT,  Stage::R1T, Stage::Ztilde};

}  // namespace

std::vector<double> ExperimentConfig::resolved_alphas(double T_at) const {
    if (shifts_explicit) {
        if (static_cast<int>(alphas.size()) != N)
            throw ConfigError("config: alphas length must equal N");
        return alphas;
    }
    if (static_cast<int>(gap_exponents.size()) != N - 1)
        throw ConfigError("config: gap exponent list must have N-1 entries");
    std::vector<double> out(N, 0.0);
    double logT = std::log(T_at);
    for (int j = 1; j < N; ++j) out[j] = out[j - 1] + std::pow(logT, -gap_exponents[j - 1]);
    return out;
}

ExperimentConfig config_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    try {
        if (!j.contains("schema_version") || j["schema_version"].get<int>() != kConfigSchemaVersion)
            throw ConfigError("config: missing or unsupported schema_version (expected 1)");
        ExperimentConfig c;
        c.T = j.at("T").get<double>();
        c.n_samples = j.at("n_samples").get<size_t>();
        c.seed = j.value("seed", uint64_t{42});
        c.N = j.at("N").get<int>();
        for (const auto& ch : j.at("characters"))
            c.characters.push_back({ch.at(0).get<uint64_t>(), ch.at(1).get<int>()});
        const auto& sh = j.at("shifts");
        std::string type = sh.at("type").get<std::string>();
        if (type == "explicit") {
            c.shifts_explicit = true;
            c.alphas = sh.at("alphas").get<std::vector<double>>();
        } else if (type == "log_power_gaps") {
            c.shifts_explicit = false;
            c.gap_exponents = sh.at("c").get<std::vector<double>>();
        } else {
            throw ConfigError("config: shifts.type must be 'explicit' or 'log_power_gaps'");
        }
        if (j.contains("params")) {
            const auto& p = j["params"];
            c.K = p.value("K", 10.0);
            c.K_prime = p.value("K_prime", 4.0);
            c.A = p.value("A", 400.0);
            c.B = p.value("B", 80.0);
            if (p.contains("Y_override")) c.Y_override = p["Y_override"].get<double>();
            if (p.contains("X_override")) c.X_override = p["X_override"].get<double>();
        }
        for (const auto& s : j.at("stages")) c.stages.push_back(stage_from_name(s.get<std::string>()));
        if (j.contains("distance_params")) {
            const auto& d = j["distance_params"];
            c.dist_L = d.value("L", 1.0);
            c.dist_M = d.value("M", 1.0);
            if (d.contains("R")) c.dist_R = d["R"].get<double>();
            if (d.contains("F")) c.dist_F = d["F"].get<double>();
            c.dict_size = d.value("dict_size", 1000);
            c.grid_per_axis = d.value("grid_per_axis", 41);
            c.eps1 = d.value("eps1", 0.3);
            c.eps2 = d.value("eps2", 0.5);
            c.C2 = d.value("C2", 7.6);
        }
        c.Delta_budget = j.value("Delta_budget", 10.0);
        c.delta_budget = j.value("delta_budget", 10.0);
        c.epsilon = j.value("epsilon", 0.5);
        c.L_cutoff_budget = j.value("L_cutoff_budget", uint64_t{1'000'000});
        c.threads = j.value("threads", 0);
        c.output_path = j.value("output_path", std::string{});

        if (static_cast<int>(c.characters.size()) != c.N)
            throw ConfigError("config: characters length must equal N");
        if (c.stages.empty()) throw ConfigError("config: stages must be non-empty");
        // Stage subset must respect the chain order.
        size_t pos = 0;
        for (Stage s : c.stages) {
            auto it = std::find(kChainOrder.begin() + pos, kChainOrder.end(), s);
            if (it == kChainOrder.end())
                throw ConfigError("config: stages must be an ordered subset of the chain");
            pos = static_cast<size_t>(it - kChainOrder.begin());
        }
        return c;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

ExperimentConfig config_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return config_from_json_text(ss.str());
}

namespace {

struct StagePlan {
    bool xt = false, x0t = false, mt = false, qt = false, rt = false, r1t = false, ztilde = false;
    bool needs_L() const { return xt || x0t; }
    bool needs_poly() const { return mt || qt || rt || r1t; }
};

StagePlan plan_from(const std::vector<Stage>& stages) {
    StagePlan p;
    for (Stage s : stages) {
        switch (s) {
            case Stage::XT: p.xt = true; break;
            case Stage::X0T: p.x0t = true; break;
            case Stage::MT: p.mt = true; break;
            case Stage::QT: p.qt = true; break;
            case Stage::RT: p.rt = true; break;
            case Stage::R1T: p.r1t = true; break;
            case Stage::Ztilde: p.ztilde = true; break;
            default: throw ConfigError("sample_chain: Y_T is produced by `dedekind`, not a chain stage");
        }
    }
    return p;
}

}  // namespace

ChainResult sample_chain(const ExperimentConfig& config) {
    if (config.n_samples == 0) throw ConfigError("sample_chain: n_samples must be >= 1");
    ChainResult out;
    out.params = derive_params(config.T, config.K, config.K_prime, config.A, config.B,
                               config.Y_override, config.X_override);
    const ApproxParams& P = out.params;

    for (auto& [q, idx] : config.characters) out.chars.push_back(character_by_index(q, idx));
    out.shifts = ShiftConfig::make(config.resolved_alphas(config.T), config.T, config.Delta_budget,
                                   config.delta_budget, config.epsilon);

    // Pairs whose deviation term exceeds the delta budget are downgraded to
    // "unclassified" and surfaced in the metadata, never silently used.
    for (int i = 0; i < out.shifts.N; ++i)
        for (int j = i + 1; j < out.shifts.N; ++j)
            if (out.shifts.pair(i, j).violates_budget) ++out.unclassified_pairs;

    StagePlan plan = plan_from(config.stages);
    if (plan.needs_L() && config.T > static_cast<double>(config.L_cutoff_budget))
        throw PreconditionError("sample_chain: X_T/X0_T stages exceed the full-L budget");

    uint64_t sieve_to = static_cast<uint64_t>(std::ceil(P.X_eff())) + 1;
    if (plan.needs_L()) sieve_to = std::max<uint64_t>(sieve_to, static_cast<uint64_t>(config.T));
    PrimeTable table = sieve_primes(std::max<uint64_t>(sieve_to, 100));

    out.cov = make_covariance_spec(config.T, out.shifts, out.chars, P, table);
    // Constructing Z_tilde needs a PD covariance; stages before it do not.
    if (plan.ztilde && !out.cov.pd_empirical)
        throw PreconditionError("sample_chain: empirical covariance of R1_T is not PD");
    out.norm0 = normalizer(config.T, out.chars[0], P, table);

    int N = config.N;
    size_t n = config.n_samples;
    double half_llT = 0.5 * P.loglog_T;

    std::vector<Normalizer> norms;
    if (plan.r1t)
        for (int j = 0; j < N; ++j) norms.push_back(normalizer(config.T, out.chars[j], P, table));

    // Shared t-draws: t_i = T (1 + u_i) with u_i the 64-bit fraction of the
    // per-sample counter stream; identical across stages by construction.
    std::vector<uint64_t> u_bits(n);
    uint64_t digest = 0xCBF29CE484222325ull;
    for (size_t i = 0; i < n; ++i) {
        u_bits[i] = CounterRng(config.seed, i, 0).next_u64();
        digest = fnv1a(digest, u_bits[i]);
    }
    out.t_digest = digest;

    auto make_batch = [&](Stage s) {
        SampleBatch b;
        b.stage = s;
        b.n = n;
        b.dim = N;
        b.data.assign(n * static_cast<size_t>(N), 0.0);
        b.seed = config.seed;
        b.t_digest = digest;
        b.meta["T"] = fmt_double(config.T);
        b.meta["sigma0"] = fmt_double(P.sigma0);
        b.meta["Y"] = fmt_double(P.Y_eff());
        b.meta["X"] = fmt_double(P.X_eff());
        b.meta["sigma0_degenerate"] = P.sigma0_degenerate ? "1" : "0";
        b.meta["asymptotically_invalid"] = P.asymptotically_invalid ? "1" : "0";
        b.meta["unclassified_pairs"] = std::to_string(out.unclassified_pairs);
        if (P.Y_override) b.meta["Y_override"] = fmt_double(*P.Y_override);
        if (P.X_override) b.meta["X_override"] = fmt_double(*P.X_override);
        return b;
    };

    std::map<Stage, SampleBatch> B;
    for (Stage s : config.stages)
        if (s != Stage::Ztilde) B.emplace(s, make_batch(s));

    // Per-coordinate evaluators.
    std::vector<LTruncEvaluator> lev_half, lev_sigma0;
    if (plan.needs_L()) {
        uint64_t cutoff = static_cast<uint64_t>(config.T);
        for (int j = 0; j < N; ++j) {
            if (plan.xt) lev_half.emplace_back(out.chars[j], 0.5, cutoff);
            if (plan.x0t) lev_sigma0.emplace_back(out.chars[j], P.sigma0, cutoff);
        }
    }
    std::vector<PrimePolyEvaluator> pev;
    if (plan.needs_poly())
        for (int j = 0; j < N; ++j) pev.emplace_back(out.chars[j], P, table);

    std::vector<std::vector<uint32_t>> flagged_xt(2);  // [0]=XT, [1]=X0T (merged later)
    std::mutex flag_mutex;

    int threads = config.threads > 0 ? config.threads : default_threads();
    parallel_chunks(n, 64, threads, [&](size_t b0, size_t b1, size_t) {
        std::vector<uint32_t> local_flags_xt, local_flags_x0t;
        for (size_t i = b0; i < b1; ++i) {
            double u = static_cast<double>(u_bits[i]) * 0x1.0p-64;
            double t_d = config.T * (1.0 + u);
            Height t_h = Height::from_double(config.T)
                             .add(Height::from_double_times_fraction(config.T, u_bits[i]));
            for (int j = 0; j < N; ++j) {
                double aj = out.shifts.alphas[j];
                double tj_d = t_d + aj;
                if (plan.xt) {
                    auto L = lev_half[j].value(tj_d);
                    double m = std::abs(L);
                    if (m < kNearZeroGuard) {
                        local_flags_xt.push_back(static_cast<uint32_t>(i));
                        B.at(Stage::XT).at(i, j) = 0.0;
                    } else {
                        B.at(Stage::XT).at(i, j) = std::log(m) / std::sqrt(half_llT);
                    }
                }
                if (plan.x0t) {
                    auto L = lev_sigma0[j].value(tj_d);
                    double m = std::abs(L);
                    if (m < kNearZeroGuard) {
                        local_flags_x0t.push_back(static_cast<uint32_t>(i));
                        B.at(Stage::X0T).at(i, j) = 0.0;
                    } else {
                        B.at(Stage::X0T).at(i, j) = std::log(m) / std::sqrt(half_llT);
                    }
                }
                if (plan.needs_poly()) {
                    Height tj = aj == 0.0 ? t_h : t_h.add_signed_double(aj);
                    auto sv = pev[j].eval(P.sigma0, tj);
                    double q_val = sv.lambda.real() / std::sqrt(half_llT);
                    if (plan.mt) B.at(Stage::MT).at(i, j) = q_val;
                    if (plan.qt) B.at(Stage::QT).at(i, j) = q_val;
                    if (plan.rt) B.at(Stage::RT).at(i, j) = sv.p_full / std::sqrt(half_llT);
                    if (plan.r1t)
                        B.at(Stage::R1T).at(i, j) = sv.p1 / std::sqrt(0.5 * norms[j].M_T_chi);
                }
            }
        }
        if (!local_flags_xt.empty() || !local_flags_x0t.empty()) {
            std::lock_guard<std::mutex> lock(flag_mutex);
            flagged_xt[0].insert(flagged_xt[0].end(), local_flags_xt.begin(), local_flags_xt.end());
            flagged_xt[1].insert(flagged_xt[1].end(), local_flags_x0t.begin(), local_flags_x0t.end());
        }
    });

    if (plan.xt) {
        auto& f = flagged_xt[0];
        std::sort(f.begin(), f.end());
        B.at(Stage::XT).flagged_rows = f;
    }
    if (plan.x0t) {
        auto& f = flagged_xt[1];
        std::sort(f.begin(), f.end());
        B.at(Stage::X0T).flagged_rows = f;
    }
    out.excluded_count = (plan.xt ? B.at(Stage::XT).flagged_rows.size() : 0) +
                         (plan.x0t ? B.at(Stage::X0T).flagged_rows.size() : 0);

    if (plan.ztilde) {
        GaussianSpec spec = GaussianSpec::from_covariance(out.cov.K_empirical);
        SampleBatch z = sample_mvn(spec, n, config.seed ^ 0x5A5A5A5A5A5A5A5Aull);
        z.t_digest = digest;
        z.meta = make_batch(Stage::Ztilde).meta;
        B.emplace(Stage::Ztilde, std::move(z));
    }

    out.batches = std::move(B);
    return out;
}

namespace {

double theory_shape_for_pair(Stage a, Stage b, const ApproxParams& P, double L, double M, int N,
                             double eps1, double eps2, double epsilon) {
    double llT = P.loglog_T, lllT = P.logloglog_T;
    double sq = std::sqrt(llT);
    double Nd = N;
    if (a == Stage::XT && b == Stage::X0T) return L * Nd * lllT * lllT / sq;
    if (a == Stage::X0T && b == Stage::MT)
        return L * Nd / sq + M * Nd * std::pow(llT, -P.K / P.K_prime);
    if (a == Stage::MT && b == Stage::QT) return Nd * (L + M) * std::pow(llT, -80.0);
    if (a == Stage::QT && b == Stage::RT) return L * Nd / sq;
    if (a == Stage::RT && b == Stage::R1T) return L * std::sqrt(Nd) * std::sqrt(1.0 + lllT) / sq;
    if (a == Stage::R1T && b == Stage::Ztilde)
        return L / std::pow(lllT, eps1) + M * std::pow(lllT, Nd * (eps1 + eps2)) *
                                              std::exp(-0.5 * std::pow(lllT, eps1 + eps2));
    if (a == Stage::Ztilde) return M * std::pow(llT, -1.0 + epsilon + 0.05);
    return 0.0;
}

}  // namespace

std::vector<DistanceReport> stage_distance_table(const ChainResult& chain,
                                                 const ExperimentConfig& config) {
    std::vector<DistanceReport> out;
    const auto& B = chain.batches;
    if (B.size() < 2) throw PreconditionError("stage_distance_table: need at least two stages");

    std::vector<Stage> present;
    for (Stage s : kChainOrder)
        if (B.count(s)) present.push_back(s);

    double L = config.dist_L, M = config.dist_M;
    for (size_t i = 0; i + 1 < present.size(); ++i) {
        Stage a = present[i], b = present[i + 1];
        if (b == Stage::Ztilde) break;  // handled by the CF/ABB route below
        DistanceReport up = coupling_l1_upper(B.at(a), B.at(b), L);
        up.T = config.T;
        up.theory_shape = theory_shape_for_pair(a, b, chain.params, L, M, config.N, config.eps1,
                                                config.eps2, config.epsilon);
        out.push_back(up);
        DistanceReport lo = bl_dictionary_lower(B.at(a), B.at(b), L, M, config.dict_size,
                                                config.seed ^ 0x1111);
        lo.T = config.T;
        lo.theory_shape = up.theory_shape;
        out.push_back(lo);
    }

    if (B.count(Stage::R1T) && B.count(Stage::Ztilde)) {
        GaussianSpec spec = GaussianSpec::from_covariance(chain.cov.K_empirical);
        BoundParams bp = BoundParams::from(chain.params, chain.norm0.C1, config.eps1, config.eps2,
                                           config.C2);
        double R = config.dist_R ? *config.dist_R : std::pow(chain.params.logloglog_T, config.eps2);
        double F = config.dist_F ? *config.dist_F : bp.u_norm1;

        CfSupResult cfs = cf_sup_on_grid(B.at(Stage::R1T), spec, F, config.grid_per_axis);
        DistanceReport cfr;
        cfr.stage_a = Stage::R1T;
        cfr.stage_b = Stage::Ztilde;
        cfr.estimator = Estimator::cf_grid;
        cfr.value = cfs.sup;
        cfr.uncertainty = 2.0 / std::sqrt(static_cast<double>(B.at(Stage::R1T).n));
        cfr.L = L;
        cfr.M = M;
        cfr.R = R;
        cfr.F = F;
        cfr.T = config.T;
        cfr.seed = config.seed;
        cfr.theory_shape = std::exp(-0.5 * std::pow(chain.params.logloglog_T, config.eps1 + config.eps2));
        out.push_back(cfr);

        // Empirical tail of R1_T outside [-R, R]^N and the Gaussian tail bound.
        const SampleBatch& r1 = B.at(Stage::R1T);
        size_t outside = 0;
        for (size_t r = 0; r < r1.n; ++r)
            for (int d = 0; d < r1.dim; ++d)
                if (std::abs(r1.at(r, d)) > R) {
                    ++outside;
                    break;
                }
        double tail_mu = static_cast<double>(outside) / static_cast<double>(r1.n);
        double tail_nu = std::min(1.0, config.N * gaussian_tail(R));

        DistanceReport abb;
        abb.stage_a = Stage::R1T;
        abb.stage_b = Stage::Ztilde;
        abb.estimator = Estimator::abb_certificate;
        abb.value = abb_certificate(L, M, R, F, cfs.sup, tail_mu, tail_nu, config.N);
        abb.L = L;
        abb.M = M;
        abb.R = R;
        abb.F = F;
        abb.T = config.T;
        abb.seed = config.seed;
        abb.flags = "unnormalized";
        abb.theory_shape = theory_shape_for_pair(Stage::R1T, Stage::Ztilde, chain.params, L, M,
                                                 config.N, config.eps1, config.eps2, config.epsilon);
        out.push_back(abb);

        DistanceReport bl = bl_dictionary_lower(B.at(Stage::R1T), spec, L, M, config.dict_size,
                                                config.seed ^ 0x2222);
        bl.stage_b = Stage::Ztilde;
        bl.T = config.T;
        bl.theory_shape = abb.theory_shape;
        out.push_back(bl);
    }

    if (B.count(Stage::Ztilde)) {
        // Covariance-perturbation route: Gaussian with K_tilde vs the target-K Gaussian.
        Matrix E = chain.cov.K_empirical - chain.cov.K_target;
        DistanceReport dd;
        dd.stage_a = Stage::Ztilde;
        dd.stage_b = Stage::Ztilde;
        dd.estimator = Estimator::density_diff;
        dd.T = config.T;
        dd.seed = config.seed;
        dd.M = M;
        dd.theory_shape = theory_shape_for_pair(Stage::Ztilde, Stage::Ztilde, chain.params, L, M,
                                                config.N, config.eps1, config.eps2, config.epsilon);
        try {
            auto r = density_diff(chain.cov.K_target, E, M);
            dd.value = M * r.numeric_integral;
            dd.uncertainty = M * r.mc_stderr;
            dd.flags = r.used_mc ? "mc" : "grid";
        } catch (const PreconditionError& e) {
            dd.value = std::numeric_limits<double>::quiet_NaN();
            dd.flags = std::string("rejected: ") + e.what();
        }
        out.push_back(dd);
    }
    return out;
}

std::vector<RateRow> rate_sweep(const ExperimentConfig& config, const std::vector<double>& T_list) {
    std::vector<RateRow> rows;
    for (double T : T_list) {
        ExperimentConfig c = config;
        c.T = T;
        if (!config.shifts_explicit) {
            c.shifts_explicit = true;
            c.alphas = config.resolved_alphas(T);
            c.gap_exponents.clear();
        }
        RateRow base;
        base.T = T;
        base.N = config.N;
        double lllT = std::log(std::log(std::log(T)));
        double llT = std::log(std::log(T));
        base.shape_main = std::pow(lllT, -config.eps1);
        base.shape_exp = std::exp(-0.5 * std::pow(lllT, config.eps1 + config.eps2));
        base.shape_indep = lllT * lllT / std::sqrt(llT);
        try {
            ChainResult chain = sample_chain(c);
            auto reports = stage_distance_table(chain, c);
            for (auto& rep : reports) {
                RateRow row = base;
                row.report = rep;
                rows.push_back(std::move(row));
            }
        } catch (const std::exception& e) {
            RateRow row = base;
            row.status = std::string("failed: ") + e.what();
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

SampleBatch dedekind_vectors(const SampleBatch& base,
                             const std::vector<std::pair<int, int>>& pairing, double T) {
    base.validate();
    SampleBatch out;
    out.stage = Stage::YT;
    out.n = base.n;
    out.dim = static_cast<int>(pairing.size());
    out.seed = base.seed;
    out.t_digest = base.t_digest;
    out.meta = base.meta;
    out.flagged_rows = base.flagged_rows;
    out.data.assign(out.n * pairing.size(), 0.0);
    double scale = std::sqrt(0.5 * std::log(std::log(T))) / std::sqrt(std::log(std::log(T)));
    for (auto& [zi, li] : pairing)
        if (zi < 0 || li < 0 || zi >= base.dim || li >= base.dim)
            throw std::invalid_argument("dedekind_vectors: pairing index out of range");
    for (size_t r = 0; r < base.n; ++r)
        for (size_t j = 0; j < pairing.size(); ++j)
            out.at(r, static_cast<int>(j)) =
                (base.at(r, pairing[j].first) + base.at(r, pairing[j].second)) * scale;
    return out;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

std::string render_csv(const std::vector<DistanceReport>& reports) {
    std::string s = "stage_a,stage_b,estimator,value,uncertainty,L,M,R,F,T,seed\n";
    for (const auto& r : reports) {
        s += stage_name(r.stage_a);
        s += ',';
        s += stage_name(r.stage_b);
        s += ',';
        s += estimator_name(r.estimator);
        s += ',';
        s += fmt_double(r.value) + "," + fmt_double(r.uncertainty) + "," + fmt_double(r.L) + "," +
             fmt_double(r.M) + "," + fmt_double(r.R) + "," + fmt_double(r.F) + "," +
             fmt_double(r.T) + "," + std::to_string(r.seed) + "\n";
    }
    return s;
}

std::string render_json(const std::vector<DistanceReport>& reports) {
    json j;
    j["schema_version"] = kConfigSchemaVersion;
    j["reports"] = json::array();
    for (const auto& r : reports) {
        json o;
        o["stage_a"] = stage_name(r.stage_a);
        o["stage_b"] = stage_name(r.stage_b);
        o["estimator"] = estimator_name(r.estimator);
        o["value"] = fmt_double(r.value);
        o["uncertainty"] = fmt_double(r.uncertainty);
        o["L"] = fmt_double(r.L);
        o["M"] = fmt_double(r.M);
        o["R"] = fmt_double(r.R);
        o["F"] = fmt_double(r.F);
        o["T"] = fmt_double(r.T);
        o["seed"] = r.seed;
        o["theory_shape"] = fmt_double(r.theory_shape);
        o["flags"] = r.flags;
        j["reports"].push_back(o);
    }
    return j.dump(2) + "\n";
}

std::string render_csv(const std::vector<RateRow>& rows) {
    std::string s =
        "T,pair_a,pair_b,estimator,value,uncertainty,theory_shape,L,M,N,seed,flags,shape_main,"
        "shape_exp,shape_indep,status\n";
    for (const auto& r : rows) {
        s += fmt_double(r.T) + ",";
        if (r.status == "ok") {
            s += stage_name(r.report.stage_a);
            s += ',';
            s += stage_name(r.report.stage_b);
            s += ',';
            s += estimator_name(r.report.estimator);
            s += ',';
            s += fmt_double(r.report.value) + "," + fmt_double(r.report.uncertainty) + "," +
                 fmt_double(r.report.theory_shape) + "," + fmt_double(r.report.L) + "," +
                 fmt_double(r.report.M) + ",";
        } else {
            s += ",,,,,,,,";
        }
        s += std::to_string(r.N) + ",";
        s += std::to_string(r.report.seed) + "," + r.report.flags + "," + fmt_double(r.shape_main) +
             "," + fmt_double(r.shape_exp) + "," + fmt_double(r.shape_indep) + "," + r.status + "\n";
    }
    return s;
}

std::string render_json(const std::vector<RateRow>& rows) {
    json j;
    j["schema_version"] = kConfigSchemaVersion;
    j["rows"] = json::array();
    for (const auto& r : rows) {
        json o;
        o["T"] = fmt_double(r.T);
        o["status"] = r.status;
        o["shape_main"] = fmt_double(r.shape_main);
        o["shape_exp"] = fmt_double(r.shape_exp);
        o["shape_indep"] = fmt_double(r.shape_indep);
        if (r.status == "ok") {
            o["pair_a"] = stage_name(r.report.stage_a);
            o["pair_b"] = stage_name(r.report.stage_b);
            o["estimator"] = estimator_name(r.report.estimator);
            o["value"] = fmt_double(r.report.value);
            o["uncertainty"] = fmt_double(r.report.uncertainty);
            o["theory_shape"] = fmt_double(r.report.theory_shape);
        }
        j["rows"].push_back(o);
    }
    return j.dump(2) + "\n";
}

std::string render_csv(const std::vector<MomentReport>& reports) {
    std::string s = "k,l,quad_re,quad_im,formula,budget,T,Y,N,nodes\n";
    for (const auto& r : reports) {
        s += std::to_string(r.k) + "," + std::to_string(r.l) + "," + fmt_double(r.quad_value.real()) +
             "," + fmt_double(r.quad_value.imag()) + "," + fmt_double(r.formula_value) + "," +
             fmt_double(r.error_budget) + "," + fmt_double(r.T) + "," + fmt_double(r.Y) + "," +
             std::to_string(r.N) + "," + std::to_string(r.nodes) + "\n";
    }
    return s;
}

std::string render_json(const std::vector<MomentReport>& reports) {
    json j;
    j["schema_version"] = kConfigSchemaVersion;
    j["moments"] = json::array();
    for (const auto& r : reports) {
        json o;
        o["k"] = r.k;
        o["l"] = r.l;
        o["quad_re"] = fmt_double(r.quad_value.real());
        o["quad_im"] = fmt_double(r.quad_value.imag());
        o["formula"] = fmt_double(r.formula_value);
        o["budget"] = fmt_double(r.error_budget);
        o["T"] = fmt_double(r.T);
        o["Y"] = fmt_double(r.Y);
        o["N"] = r.N;
        o["nodes"] = r.nodes;
        j["moments"].push_back(o);
    }
    return j.dump(2) + "\n";
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open output file: " + path);
    out << content;
    if (!out) throw IoError("write failed: " + path);
}

void emit(const std::vector<DistanceReport>& reports, EmitFormat format, const std::string& path) {
    write_file(path, format == EmitFormat::csv ? render_csv(reports) : render_json(reports));
}

void emit(const std::vector<RateRow>& rows, EmitFormat format, const std::string& path) {
    write_file(path, format == EmitFormat::csv ? render_csv(rows) : render_json(rows));
}

void emit(const std::vector<MomentReport>& reports, EmitFormat format, const std::string& path) {
    write_file(path, format == EmitFormat::csv ? render_csv(reports) : render_json(reports));
}

}  // namespace lclt
