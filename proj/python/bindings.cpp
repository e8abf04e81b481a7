#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lclt/bigfixed.hpp"
#include "lclt/dirichlet_series.hpp"
#include "lclt/distance.hpp"
#include "lclt/gaussian.hpp"
#include "lclt/moments.hpp"
#include "lclt/pipeline.hpp"

namespace py = pybind11;
using namespace lclt;

namespace {

Matrix matrix_from_rows(const std::vector<std::vector<double>>& rows) {
    int n = static_cast<int>(rows.size());
    Matrix m(n);
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(rows[i].size()) != n)
            throw std::invalid_argument("matrix rows must form a square");
        for (int j = 0; j < n; ++j) m(i, j) = rows[i][j];
    }
    return m;
}

std::vector<std::vector<double>> matrix_to_rows(const Matrix& m) {
    std::vector<std::vector<double>> rows(m.dim(), std::vector<double>(m.dim()));
    for (int i = 0; i < m.dim(); ++i)
        for (int j = 0; j < m.dim(); ++j) rows[i][j] = m(i, j);
    return rows;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Dirichlet-polynomial CLT approximation lab";

    py::register_exception<ConfigError>(m, "ConfigError");
    py::register_exception<PreconditionError>(m, "PreconditionError");

    py::class_<PrimeTable>(m, "PrimeTable")
        .def_readonly("limit", &PrimeTable::limit)
        .def_readonly("primes", &PrimeTable::primes)
        .def("count", &PrimeTable::count);
    m.def("sieve_primes", &sieve_primes, py::arg("limit"),
          py::arg("capacity") = kDefaultSieveCapacity);
    m.def("mobius", &mobius);
    m.def("von_mangoldt", &von_mangoldt);
    m.def("count_prime_factors_in_range", &count_prime_factors_in_range);
    m.def("prime_sum", &prime_sum);

    py::class_<DirichletCharacter>(m, "DirichletCharacter")
        .def_property_readonly("modulus", &DirichletCharacter::modulus)
        .def_property_readonly("principal", &DirichletCharacter::is_principal)
        .def_property_readonly("index", &DirichletCharacter::index)
        .def("evaluate", &DirichletCharacter::evaluate);
    m.def("character_group", &character_group);
    m.def("character_by_index", &character_by_index);
    m.def("pair_delta", &pair_delta);
    m.def("euler_phi", &euler_phi);

    py::class_<ApproxParams>(m, "ApproxParams")
        .def_readonly("T", &ApproxParams::T)
        .def_readonly("W", &ApproxParams::W)
        .def_readonly("X", &ApproxParams::X)
        .def_readonly("Y", &ApproxParams::Y)
        .def_readonly("sigma0", &ApproxParams::sigma0)
        .def_readonly("sigma0_degenerate", &ApproxParams::sigma0_degenerate)
        .def_readonly("asymptotically_invalid", &ApproxParams::asymptotically_invalid)
        .def("X_eff", &ApproxParams::X_eff)
        .def("Y_eff", &ApproxParams::Y_eff);
    m.def("derive_params", &derive_params, py::arg("T"), py::arg("K") = 10.0,
          py::arg("K_prime") = 4.0, py::arg("A") = 400.0, py::arg("B") = 80.0,
          py::arg("Y_override") = std::nullopt, py::arg("X_override") = std::nullopt);

    m.def("reduce_phase", [](double t, uint64_t p) {
        return static_cast<double>(reduce_phase(Height::from_double(t), p));
    });
    m.def("reduce_phase_height", [](double T, uint64_t frac_bits, uint64_t p) {
        Height t = Height::from_double(T).add(Height::from_double_times_fraction(T, frac_bits));
        return static_cast<double>(reduce_phase(t, p));
    });

    py::enum_<PolyRange>(m, "PolyRange")
        .value("P0", PolyRange::P0)
        .value("P1", PolyRange::P1)
        .value("P2", PolyRange::P2)
        .value("Full", PolyRange::Full);
    m.def("eval_prime_poly",
          [](const DirichletCharacter& chi, std::complex<double> s, PolyRange r,
             const ApproxParams& p, const PrimeTable& t) { return eval_prime_poly(chi, s, r, p, t); });
    m.def("eval_lambda_poly",
          [](const DirichletCharacter& chi, std::complex<double> s, PolyRange r,
             const ApproxParams& p, const PrimeTable& t) { return eval_lambda_poly(chi, s, r, p, t); });
    m.def("mollifier_coeff", &mollifier_coeff);
    m.def("eval_L_truncated", &eval_L_truncated);

    py::class_<PairClass>(m, "PairClass")
        .def_readonly("c", &PairClass::c)
        .def_readonly("e", &PairClass::e)
        .def_readonly("violates_budget", &PairClass::violates_budget);
    m.def("classify_shift_pair", &classify_shift_pair);
    m.def("v_min", &v_min);

    py::class_<ShiftConfig>(m, "ShiftConfig")
        .def_static("make", &ShiftConfig::make)
        .def_readonly("alphas", &ShiftConfig::alphas);
    m.def("u_quadratic", &u_quadratic);

    py::class_<PdReport>(m, "PdReport")
        .def_readonly("pd", &PdReport::pd)
        .def_readonly("indeterminate", &PdReport::indeterminate)
        .def_readonly("minors", &PdReport::minors)
        .def_readonly("cholesky_ok", &PdReport::cholesky_ok);
    m.def("check_pd", [](const std::vector<std::vector<double>>& rows) {
        return check_pd(matrix_from_rows(rows));
    });
    m.def("build_K", [](const ShiftConfig& s, const std::vector<DirichletCharacter>& c) {
        return matrix_to_rows(build_K(s, c));
    });
    m.def("build_K_tilde",
          [](double T, const ShiftConfig& s, const std::vector<DirichletCharacter>& c,
             const ApproxParams& p, const PrimeTable& t) {
              return matrix_to_rows(build_K_tilde(T, s, c, p, t));
          });

    py::class_<Normalizer>(m, "Normalizer")
        .def_readonly("M_T_chi", &Normalizer::M_T_chi)
        .def_readonly("C1", &Normalizer::C1)
        .def_readonly("kappa2", &Normalizer::kappa2)
        .def_readonly("M_le_loglogT", &Normalizer::M_le_loglogT)
        .def_readonly("C1_sq_lt_kappa2", &Normalizer::C1_sq_lt_kappa2);
    m.def("normalizer", &normalizer);

    py::class_<SampleBatch>(m, "SampleBatch")
        .def_readonly("n", &SampleBatch::n)
        .def_readonly("dim", &SampleBatch::dim)
        .def_readonly("data", &SampleBatch::data)
        .def_readonly("seed", &SampleBatch::seed)
        .def_readonly("flagged_rows", &SampleBatch::flagged_rows)
        .def("column", &SampleBatch::column);

    py::class_<GaussianSpec>(m, "GaussianSpec")
        .def_static("from_covariance",
                    [](const std::vector<std::vector<double>>& rows) {
                        return GaussianSpec::from_covariance(matrix_from_rows(rows));
                    })
        .def_readonly("dim", &GaussianSpec::dim);
    m.def("sample_mvn", &sample_mvn);
    m.def("mvn_even_moment", &mvn_even_moment);
    m.def("gaussian_tail", &gaussian_tail);
    m.def("det_ratio", [](const std::vector<std::vector<double>>& C,
                          const std::vector<std::vector<double>>& E) {
        return det_ratio(matrix_from_rows(C), matrix_from_rows(E));
    });

    m.def("kolmogorov_1d",
          [](std::vector<double> samples) { return kolmogorov_1d(std::move(samples)); });
    m.def("cf_empirical", &cf_empirical);
    m.def("cf_gauss", &cf_gauss);
    m.def("abb_certificate", &abb_certificate);

    m.def("chebyshev_tail", &chebyshev_tail);
    m.def("p1_exp_tail", &p1_exp_tail);
    m.def("exp_partial_bound_check", [](std::complex<double> z, int n) {
        auto r = exp_partial_bound_check(z, n);
        return py::make_tuple(r.lhs, r.rhs, r.ok);
    });
    m.def("stirling_bounds", [](long n) {
        auto r = stirling_bounds(n);
        return py::make_tuple(r.value, r.main, r.rel_err);
    });

    m.def("run_distances_from_config", [](const std::string& config_json_text) {
        ExperimentConfig cfg = config_from_json_text(config_json_text);
        ChainResult chain = sample_chain(cfg);
        auto reports = stage_distance_table(chain, cfg);
        return render_csv(reports);
    });
}
