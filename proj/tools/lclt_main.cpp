#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "lclt/pipeline.hpp"

namespace {

using namespace lclt;

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e)) return 2;
    if (dynamic_cast<const PreconditionError*>(&e)) return 3;
    if (dynamic_cast<const IoError*>(&e)) return 4;
    if (dynamic_cast<const std::invalid_argument*>(&e)) return 2;
    return 1;
}

EmitFormat format_for(const std::string& path, const std::string& forced) {
    if (forced == "csv") return EmitFormat::csv;
    if (forced == "json") return EmitFormat::json;
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") return EmitFormat::json;
    return EmitFormat::csv;
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

ExperimentConfig load(const std::string& config_path, uint64_t seed_override, bool has_seed,
                      const std::string& out_override, int threads) {
    ExperimentConfig c = config_from_json_file(config_path);
    if (has_seed) c.seed = seed_override;
    if (!out_override.empty()) c.output_path = out_override;
    if (threads > 0) c.threads = threads;
    return c;
}

std::string batch_summary_json(const ChainResult& chain) {
    std::string s = "{\n  \"schema_version\": 1,\n  \"t_digest\": \"" +
                    std::to_string(chain.t_digest) + "\",\n  \"excluded_rows\": " +
                    std::to_string(chain.excluded_count) + ",\n  \"unclassified_pairs\": " +
                    std::to_string(chain.unclassified_pairs) + ",\n  \"K_tilde\": [";
    const Matrix& K = chain.cov.K_empirical;
    for (int i = 0; i < K.dim(); ++i) {
        s += i ? ",[" : "[";
        for (int j = 0; j < K.dim(); ++j) s += (j ? "," : "") + fmt17(K(i, j));
        s += "]";
    }
    s += "],\n  \"K_target\": [";
    const Matrix& Kt = chain.cov.K_target;
    for (int i = 0; i < Kt.dim(); ++i) {
        s += i ? ",[" : "[";
        for (int j = 0; j < Kt.dim(); ++j) s += (j ? "," : "") + fmt17(Kt(i, j));
        s += "]";
    }
    s += "],\n  \"pd_empirical\": ";
    s += chain.cov.pd_empirical ? "true" : "false";
    s += ",\n  \"pd_target\": ";
    s += chain.cov.pd_target ? "true" : "false";
    s += ",\n  \"stages\": {\n";
    bool first = true;
    for (const auto& [stage, b] : chain.batches) {
        if (!first) s += ",\n";
        first = false;
        s += std::string("    \"") + stage_name(stage) + "\": {";
        for (int j = 0; j < b.dim; ++j) {
            double mean = 0, var = 0;
            for (size_t r = 0; r < b.n; ++r) mean += b.at(r, j);
            mean /= static_cast<double>(b.n);
            for (size_t r = 0; r < b.n; ++r) {
                double d = b.at(r, j) - mean;
                var += d * d;
            }
            var /= static_cast<double>(b.n);
            s += (j ? "," : "") + std::string("\"mean_") + std::to_string(j) + "\": " + fmt17(mean) +
                 ", \"var_" + std::to_string(j) + "\": " + fmt17(var);
        }
        s += "}";
    }
    s += "\n  }\n}\n";
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dirichlet-polynomial CLT approximation lab"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, out_path, format;
    uint64_t seed = 0;
    bool seed_set = false;
    int threads = 0;
    app.add_option("--config", config_path, "experiment config (JSON)")->required();
    app.add_option("--seed", seed, "override the config seed")->each([&](const std::string&) {
        seed_set = true;
    });
    app.add_option("--out", out_path, "output path (overrides config output_path)");
    app.add_option("--threads", threads, "worker threads (0 = hardware)");
    app.add_option("--format", format, "csv or json (default: by extension)");

    auto* cmd_sample = app.add_subcommand("sample", "sample the approximation chain, write a summary");
    auto* cmd_dist = app.add_subcommand("distances", "stage-distance table for one run");
    auto* cmd_moments = app.add_subcommand("moments", "quadrature and exact diagonal moments");
    auto* cmd_cov = app.add_subcommand("covariance", "target and empirical covariance matrices");
    auto* cmd_rates = app.add_subcommand("rates", "distance table swept over T");
    auto* cmd_dedekind = app.add_subcommand("dedekind", "compose Dedekind-zeta vectors from a 2N chain");

    std::vector<double> T_list;
    cmd_rates->add_option("--T-list", T_list, "sweep heights")->required();
    int mk = 1, ml = 1;
    long mnodes = 0;
    cmd_moments->add_option("--k", mk, "left exponent");
    cmd_moments->add_option("--l", ml, "right exponent");
    cmd_moments->add_option("--nodes", mnodes, "quadrature nodes (0 = auto)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;  // bad invocation is a config error
    }

    try {
        ExperimentConfig cfg = load(config_path, seed, seed_set, out_path, threads);
        std::string path = cfg.output_path.empty() ? "lclt_out" : cfg.output_path;

        auto warn_unclassified = [](const ChainResult& chain) {
            if (chain.unclassified_pairs)
                std::cerr << "warning: " << chain.unclassified_pairs
                          << " shift pair(s) exceed the delta budget (unclassified)\n";
        };
        if (*cmd_sample) {
            ChainResult chain = sample_chain(cfg);
            warn_unclassified(chain);
            write_file(path, batch_summary_json(chain));
        } else if (*cmd_dist) {
            ChainResult chain = sample_chain(cfg);
            warn_unclassified(chain);
            auto reports = stage_distance_table(chain, cfg);
            emit(reports, format_for(path, format), path);
        } else if (*cmd_moments) {
            ApproxParams P = derive_params(cfg.T, cfg.K, cfg.K_prime, cfg.A, cfg.B, cfg.Y_override,
                                           cfg.X_override);
            PrimeTable table = sieve_primes(
                std::max<uint64_t>(static_cast<uint64_t>(std::ceil(P.Y_eff())) + 1, 100));
            std::vector<DirichletCharacter> chars;
            for (auto& [q, idx] : cfg.characters) chars.push_back(character_by_index(q, idx));
            ShiftConfig shifts = ShiftConfig::make(cfg.resolved_alphas(cfg.T), cfg.T,
                                                   cfg.Delta_budget, cfg.delta_budget, cfg.epsilon);
            std::vector<double> a(cfg.N, 1.0);
            if (mnodes == 0) {
                mnodes = static_cast<long>(std::ceil(cfg.T * 4.0 * (mk + ml) *
                                                     std::log(P.Y_eff()) / 3.14159265358979)) + 1;
                if (mnodes > 200'000'000)
                    throw ConfigError(
                        "moments: resolving the oscillation at this T needs " +
                        std::to_string(mnodes) +
                        " nodes; the quadrature is desk-scale only (T up to ~1e6)");
            }
            std::vector<MomentReport> reports;
            reports.push_back(quad_moment(a, shifts, chars, P, mk, ml, mnodes, table));
            if (mk == ml && mk <= 3) {
                MomentReport exact = reports.back();
                exact.quad_value = exact_diagonal_moment(a, shifts, chars, P, mk, table);
                exact.formula_value = exact.quad_value.real();
                exact.error_budget = 0.0;
                exact.nodes = 0;
                reports.push_back(exact);
            }
            emit(reports, format_for(path, format), path);
        } else if (*cmd_cov) {
            ApproxParams P = derive_params(cfg.T, cfg.K, cfg.K_prime, cfg.A, cfg.B, cfg.Y_override,
                                           cfg.X_override);
            PrimeTable table = sieve_primes(
                std::max<uint64_t>(static_cast<uint64_t>(std::ceil(P.Y_eff())) + 1, 100));
            std::vector<DirichletCharacter> chars;
            for (auto& [q, idx] : cfg.characters) chars.push_back(character_by_index(q, idx));
            ShiftConfig shifts = ShiftConfig::make(cfg.resolved_alphas(cfg.T), cfg.T,
                                                   cfg.Delta_budget, cfg.delta_budget, cfg.epsilon);
            CovarianceSpec spec = make_covariance_spec(cfg.T, shifts, chars, P, table);
            ChainResult pseudo;
            pseudo.cov = spec;
            write_file(path, batch_summary_json(pseudo));
        } else if (*cmd_rates) {
            auto rows = rate_sweep(cfg, T_list);
            emit(rows, format_for(path, format), path);
        } else if (*cmd_dedekind) {
            if (cfg.N % 2 != 0)
                throw ConfigError("dedekind: config N must be 2n (n principal + n quadratic)");
            ChainResult chain = sample_chain(cfg);
            Stage base = cfg.stages.back() == Stage::Ztilde && cfg.stages.size() > 1
                             ? cfg.stages[cfg.stages.size() - 2]
                             : cfg.stages.back();
            std::vector<std::pair<int, int>> pairing;
            for (int j = 0; j < cfg.N / 2; ++j) pairing.push_back({j, cfg.N / 2 + j});
            SampleBatch y = dedekind_vectors(chain.batches.at(base), pairing, cfg.T);
            std::string s = "row,";
            for (size_t j = 0; j < pairing.size(); ++j)
                s += "y" + std::to_string(j) + (j + 1 < pairing.size() ? "," : "\n");
            for (size_t r = 0; r < y.n; ++r) {
                s += std::to_string(r) + ",";
                for (int j = 0; j < y.dim; ++j)
                    s += fmt17(y.at(r, j)) + (j + 1 < y.dim ? "," : "\n");
            }
            write_file(path, s);
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
}
