#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "lclt/bigfixed.hpp"
#include "lclt/dirichlet_series.hpp"
#include "lclt/pipeline.hpp"
#include "lclt/rng.hpp"

using namespace lclt;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig c;
    c.T = 1e9;
    c.n_samples = 200;
    c.seed = 42;
    c.N = 2;
    c.characters = {{5, 1}, {5, 2}};
    c.shifts_explicit = true;
    c.alphas = {0.0, 0.1};
    c.K = 2.5;
    c.K_prime = 2.2;
    c.Y_override = 1000.0;
    c.X_override = 20000.0;
    c.stages = {Stage::MT, Stage::QT, Stage::RT, Stage::R1T, Stage::Ztilde};
    c.dict_size = 100;
    c.grid_per_axis = 11;
    return c;
}

const char* kConfigJson = R"({
  "schema_version": 1,
  "T": 1e9,
  "n_samples": 50,
  "seed": 7,
  "N": 2,
  "characters": [[5, 1], [5, 2]],
  "shifts": {"type": "explicit", "alphas": [0.0, 0.1]},
  "params": {"K": 2.5, "K_prime": 2.2, "Y_override": 1000.0, "X_override": 20000.0},
  "stages": ["Q_T", "R_T", "R1_T", "Z_tilde"],
  "distance_params": {"L": 1.0, "M": 1.0, "dict_size": 50, "grid_per_axis": 9}
})";

}  // namespace

TEST_CASE("config parsing") {
    auto c = config_from_json_text(kConfigJson);
    CHECK(c.T == 1e9);
    CHECK(c.n_samples == 50);
    CHECK(c.seed == 7);
    CHECK(c.characters.size() == 2);
    CHECK(c.stages.size() == 4);
    CHECK(c.stages[0] == Stage::QT);
    CHECK(c.Y_override == 1000.0);

    CHECK_THROWS_AS(config_from_json_text("{"), ConfigError);
    CHECK_THROWS_AS(config_from_json_text(R"({"schema_version": 99})"), ConfigError);
    // out-of-order stages rejected
    std::string bad = kConfigJson;
    auto pos = bad.find("[\"Q_T\", \"R_T\", \"R1_T\", \"Z_tilde\"]");
    bad.replace(pos, std::string("[\"Q_T\", \"R_T\", \"R1_T\", \"Z_tilde\"]").size(),
                "[\"R_T\", \"Q_T\"]");
    CHECK_THROWS_AS(config_from_json_text(bad), ConfigError);
}

TEST_CASE("generator shift rule preserves its class across T") {
    ExperimentConfig c = small_config();
    c.shifts_explicit = false;
    c.alphas.clear();
    c.gap_exponents = {0.5};
    for (double T : {1e8, 1e10, 1e12}) {
        auto alphas = c.resolved_alphas(T);
        auto pc = classify_shift_pair(alphas[0], alphas[1], T, 1.0);
        CHECK(pc.c == doctest::Approx(0.5).epsilon(1e-12));
    }
}

TEST_CASE("sample_chain: determinism, digest, and stage algebra") {
    ExperimentConfig c = small_config();
    auto chain1 = sample_chain(c);
    auto chain2 = sample_chain(c);
    for (auto& [stage, batch] : chain1.batches) {
        CHECK(batch.data == chain2.batches.at(stage).data);  // bit identical
        CHECK(batch.t_digest == chain1.t_digest);            // shared t draws
        CHECK(batch.n == c.n_samples);
        CHECK(batch.dim == 2);
    }
    // thread-count independence
    ExperimentConfig c4 = c;
    c4.threads = 4;
    ExperimentConfig c1 = c;
    c1.threads = 1;
    auto chain4 = sample_chain(c4);
    auto chain_st = sample_chain(c1);
    for (auto& [stage, batch] : chain4.batches)
        CHECK(batch.data == chain_st.batches.at(stage).data);

    // Q_T equals the mollifier surrogate exactly
    CHECK(chain1.batches.at(Stage::QT).data == chain1.batches.at(Stage::MT).data);
}

TEST_CASE("sample_chain: R_T minus R1_T recomposes from P0 and P2") {
    ExperimentConfig c = small_config();
    c.n_samples = 100;
    auto chain = sample_chain(c);
    auto table = sieve_primes(30000);
    auto params = chain.params;
    double half_llT = 0.5 * params.loglog_T;
    const auto& RT = chain.batches.at(Stage::RT);
    const auto& R1 = chain.batches.at(Stage::R1T);
    for (size_t i = 0; i < 100; ++i) {
        uint64_t bits = CounterRng(c.seed, i, 0).next_u64();
        Height t = Height::from_double(c.T).add(Height::from_double_times_fraction(c.T, bits));
        for (int j = 0; j < 2; ++j) {
            Height tj = c.alphas[j] == 0.0 ? t : t.add_signed_double(c.alphas[j]);
            double p0 = eval_prime_poly(chain.chars[j], params.sigma0, tj, PolyRange::P0, params, table);
            double p1 = eval_prime_poly(chain.chars[j], params.sigma0, tj, PolyRange::P1, params, table);
            double p2 = eval_prime_poly(chain.chars[j], params.sigma0, tj, PolyRange::P2, params, table);
            double norm_j = normalizer(c.T, chain.chars[j], params, table).M_T_chi;
            CHECK(RT.at(i, j) ==
                  doctest::Approx((p0 + p1 + p2) / std::sqrt(half_llT)).epsilon(1e-10));
            CHECK(R1.at(i, j) == doctest::Approx(p1 / std::sqrt(0.5 * norm_j)).epsilon(1e-10));
            // the normalizer-swap recombination identity
            double lhs = RT.at(i, j) * std::sqrt(half_llT) - R1.at(i, j) * std::sqrt(0.5 * norm_j);
            CHECK(lhs == doctest::Approx(p0 + p2).epsilon(1e-9));
        }
    }
}

TEST_CASE("sample_chain: precondition failures") {
    ExperimentConfig c = small_config();
    c.Y_override = 14.0;  // empty P1 range
    c.X_override = 100.0;
    CHECK_THROWS_AS(sample_chain(c), PreconditionError);

    ExperimentConfig c2 = small_config();
    c2.characters = {{5, 1}, {5, 1}};
    c2.alphas = {0.0, 0.0};  // identical coordinates: singular K_tilde
    CHECK_THROWS_AS(sample_chain(c2), PreconditionError);

    ExperimentConfig c3 = small_config();
    c3.stages = {Stage::XT, Stage::X0T};
    c3.T = 1e9;  // above the full-L budget
    CHECK_THROWS_AS(sample_chain(c3), PreconditionError);
}

TEST_CASE("coupling additivity: N=2 identical-marginal config doubles N=1") {
    ExperimentConfig c1 = small_config();
    c1.N = 1;
    c1.characters = {{5, 1}};
    c1.alphas = {0.0};
    c1.stages = {Stage::QT, Stage::RT};
    auto chainA = sample_chain(c1);
    auto repA = coupling_l1_upper(chainA.batches.at(Stage::QT), chainA.batches.at(Stage::RT), 1.0);

    ExperimentConfig c2 = c1;
    c2.N = 2;
    c2.characters = {{5, 1}, {5, 1}};
    c2.alphas = {0.0, 0.0};
    auto chainB = sample_chain(c2);
    auto repB = coupling_l1_upper(chainB.batches.at(Stage::QT), chainB.batches.at(Stage::RT), 1.0);
    CHECK(repB.value == doctest::Approx(2.0 * repA.value).epsilon(1e-12));
}

TEST_CASE("stage_distance_table emits the expected estimator rows") {
    ExperimentConfig c = small_config();
    auto chain = sample_chain(c);
    auto reports = stage_distance_table(chain, c);
    int couplings = 0, lowers = 0, cf = 0, abb = 0, dd = 0;
    for (auto& r : reports) {
        if (r.estimator == Estimator::coupling_l1) {
            ++couplings;
            CHECK(std::isfinite(r.value));
        }
        if (r.estimator == Estimator::bl_lower) ++lowers;
        if (r.estimator == Estimator::cf_grid) ++cf;
        if (r.estimator == Estimator::abb_certificate) {
            ++abb;
            CHECK(r.flags == "unnormalized");
        }
        if (r.estimator == Estimator::density_diff) ++dd;
        CHECK(r.T == c.T);
    }
    CHECK(couplings == 3);  // MT-QT, QT-RT, RT-R1T
    CHECK(lowers == 4);     // three pairs + R1T-vs-Gaussian
    CHECK(cf == 1);
    CHECK(abb == 1);
    CHECK(dd == 1);

    // identical batches (MT, QT) couple to zero
    for (auto& r : reports)
        if (r.estimator == Estimator::coupling_l1 && r.stage_a == Stage::MT)
            CHECK(r.value == 0.0);
}

TEST_CASE("rate_sweep carries theory columns and survives failures") {
    ExperimentConfig c = small_config();
    c.n_samples = 60;
    auto rows = rate_sweep(c, {1e8, 1e9, 20.0});  // T = 20 fails (Y > X ordering)
    bool saw_fail = false, saw_ok = false;
    for (auto& r : rows) {
        if (r.status != "ok") {
            saw_fail = true;
            CHECK(r.T == 20.0);
        } else {
            saw_ok = true;
            double lllT = std::log(std::log(std::log(r.T)));
            CHECK(r.shape_main == doctest::Approx(std::pow(lllT, -c.eps1)));
            CHECK(r.shape_exp ==
                  doctest::Approx(std::exp(-0.5 * std::pow(lllT, c.eps1 + c.eps2))));
            CHECK(r.shape_indep ==
                  doctest::Approx(lllT * lllT / std::sqrt(std::log(std::log(r.T)))));
        }
    }
    CHECK(saw_fail);
    CHECK(saw_ok);
}

TEST_CASE("rate_sweep MC scaling: doubling samples shrinks uncertainty") {
    ExperimentConfig c = small_config();
    c.stages = {Stage::QT, Stage::RT};
    c.n_samples = 400;
    auto r1 = rate_sweep(c, {1e9});
    c.n_samples = 1600;
    auto r2 = rate_sweep(c, {1e9});
    double u1 = 0, u2 = 0;
    for (auto& r : r1)
        if (r.status == "ok" && r.report.estimator == Estimator::coupling_l1) u1 = r.report.uncertainty;
    for (auto& r : r2)
        if (r.status == "ok" && r.report.estimator == Estimator::coupling_l1) u2 = r.report.uncertainty;
    CHECK(u2 < u1 / 1.6);  // ~ sqrt(4) shrink expected
}

TEST_CASE("dedekind_vectors") {
    // synthetic batch: zeta part z, zero L part -> Y = z / sqrt(2)
    SampleBatch base;
    base.stage = Stage::R1T;
    base.n = 4;
    base.dim = 2;
    base.seed = 1;
    base.data = {1.0, 0.0, 2.0, 0.0, -1.0, 0.0, 0.5, 0.0};
    auto y = dedekind_vectors(base, {{0, 1}}, 1e9);
    REQUIRE(y.dim == 1);
    for (size_t r = 0; r < 4; ++r)
        CHECK(y.at(r, 0) == doctest::Approx(base.at(r, 0) / std::sqrt(2.0)));
    CHECK_THROWS_AS(dedekind_vectors(base, {{0, 5}}, 1e9), std::invalid_argument);
}

TEST_CASE("dedekind composition: variance and cross-covariance shapes") {
    // 2N = 4 coordinates: two principal (mod 1) at nearly equal shifts, then
    // the two real quadratic characters mod 5 and mod 8 at the same shifts.
    ExperimentConfig c;
    c.T = 1e9;
    c.n_samples = 4000;
    c.seed = 11;
    c.N = 4;
    double eps_shift = std::exp(-std::log(std::log(1e9)) - 0.5);
    c.characters = {{1, 0}, {1, 0}, {5, 2}, {8, 1}};
    c.alphas = {0.0, eps_shift, 0.0, eps_shift};
    c.K = 2.5;
    c.K_prime = 2.2;
    c.Y_override = 2000.0;
    c.X_override = 20000.0;
    c.stages = {Stage::R1T};
    auto chain = sample_chain(c);
    auto y = dedekind_vectors(chain.batches.at(Stage::R1T), {{0, 2}, {1, 3}}, c.T);
    REQUIRE(y.dim == 2);
    double m0 = 0, m1 = 0, v0 = 0, v1 = 0, cv = 0;
    for (size_t r = 0; r < y.n; ++r) {
        m0 += y.at(r, 0);
        m1 += y.at(r, 1);
    }
    m0 /= double(y.n);
    m1 /= double(y.n);
    for (size_t r = 0; r < y.n; ++r) {
        double a = y.at(r, 0) - m0, b = y.at(r, 1) - m1;
        v0 += a * a;
        v1 += b * b;
        cv += a * b;
    }
    v0 /= double(y.n);
    v1 /= double(y.n);
    cv /= double(y.n);
    // Q_jj = 1; Q_12 = c12 (Delta + 1)/2 = 1/2 for distinct quadratic fields
    CHECK(v0 == doctest::Approx(1.0).epsilon(0.15));
    CHECK(v1 == doctest::Approx(1.0).epsilon(0.15));
    CHECK(cv / std::sqrt(v0 * v1) == doctest::Approx(0.5).epsilon(0.25));
}

TEST_CASE("Q_T vs R_T coupling sits at the expected rate scale") {
    // The prime-power tail drives this pair; its coupling value should be a
    // small multiple of the L N / sqrt(loglog T) shape column, not orders
    // off.
    ExperimentConfig c = small_config();
    c.n_samples = 1000;
    c.stages = {Stage::QT, Stage::RT};
    auto chain = sample_chain(c);
    auto reports = stage_distance_table(chain, c);
    for (auto& r : reports) {
        if (r.estimator != Estimator::coupling_l1) continue;
        CHECK(r.theory_shape ==
              doctest::Approx(1.0 * 2 / std::sqrt(chain.params.loglog_T)));
        double ratio = r.value / r.theory_shape;
        CHECK(ratio > 0.0);
        CHECK(ratio < 50.0);
        MESSAGE("QT-RT coupling / shape ratio: ", ratio);
    }
}

TEST_CASE("independence configuration: K_tilde off-diagonals below threshold") {
    // Equal shifts, pairwise-distinct characters: the target K is the
    // identity and the empirical off-diagonals must be orthogonality-small.
    ExperimentConfig c = small_config();
    c.alphas = {0.1, 0.1};
    c.Y_override = 1e4;
    c.X_override = 2e4;
    c.stages = {Stage::R1T};
    auto chain = sample_chain(c);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            CHECK(chain.cov.K_target(i, j) == (i == j ? 1.0 : 0.0));
            if (i != j) CHECK(std::abs(chain.cov.K_empirical(i, j)) < 0.1);
        }
    CHECK(chain.batches.at(Stage::R1T).meta.at("unclassified_pairs") == "0");
}

TEST_CASE("budget violations downgrade pairs to unclassified, never silent") {
    ExperimentConfig c = small_config();
    double llT = std::log(std::log(c.T));
    c.alphas = {0.0, std::exp(-llT - 2.0)};  // |e| = 2 against a budget of 1
    c.delta_budget = 1.0;
    c.stages = {Stage::QT, Stage::RT};
    auto chain = sample_chain(c);
    CHECK(chain.unclassified_pairs == 1);
    CHECK(chain.batches.at(Stage::QT).meta.at("unclassified_pairs") == "1");
}

TEST_CASE("emit: headers, byte stability, json round trip") {
    std::vector<DistanceReport> empty;
    CHECK(render_csv(empty) == "stage_a,stage_b,estimator,value,uncertainty,L,M,R,F,T,seed\n");

    ExperimentConfig c = small_config();
    c.n_samples = 80;
    auto chain = sample_chain(c);
    auto reports = stage_distance_table(chain, c);
    std::string csv1 = render_csv(reports);
    auto chainb = sample_chain(c);
    std::string csv2 = render_csv(stage_distance_table(chainb, c));
    CHECK(csv1 == csv2);  // byte identical across runs

    std::string js = render_json(reports);
    auto parsed = nlohmann::json::parse(js);
    CHECK(parsed["schema_version"] == 1);
    REQUIRE(parsed["reports"].size() == reports.size());
    CHECK(parsed["reports"][0]["stage_a"] == stage_name(reports[0].stage_a));
    double v0 = std::stod(parsed["reports"][0]["value"].get<std::string>());
    CHECK(v0 == doctest::Approx(reports[0].value).epsilon(1e-16));

    emit(reports, EmitFormat::csv, "/tmp/lclt_test_emit.csv");
    std::ifstream in("/tmp/lclt_test_emit.csv");
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str() == csv1);
    CHECK_THROWS_AS(emit(reports, EmitFormat::csv, "/nonexistent_dir/x.csv"), IoError);
}
