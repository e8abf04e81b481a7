#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "lclt/errors.hpp"

namespace lclt {

/// Parameter bundle (T, K, K', A, B) and the derived quantities
///   W = K (logloglog T)^2,  X = T^{1/(K' logloglog T)},
///   Y = T^{1/(K' loglog T)},  sigma0 = 1/2 + W / log T.
/// Y/X overrides replace the derived values but are recorded.
struct ApproxParams {
    double T = 0;
    double K = 10, K_prime = 4, A = 400, B = 80;
    double W = 0, X = 0, Y = 0, sigma0 = 0;
    std::optional<double> Y_override, X_override;

    double log_T = 0, loglog_T = 0, logloglog_T = 0;

    // W / log T > 0.1: sigma0 too far from 1/2 for the asymptotic regime.
    bool sigma0_degenerate = false;
    // T below e^{e^e} or running with overrides: finite-T semantics only.
    bool asymptotically_invalid = false;

    double X_eff() const { return X_override ? *X_override : X; }
    double Y_eff() const { return Y_override ? *Y_override : Y; }
};

struct DegenerateParamsError : PreconditionError {
    ApproxParams computed;
    explicit DegenerateParamsError(const std::string& msg, ApproxParams p)
        : PreconditionError(msg), computed(std::move(p)) {}
};

ApproxParams derive_params(double T, double K = 10, double K_prime = 4, double A = 400,
                           double B = 80, std::optional<double> Y_override = std::nullopt,
                           std::optional<double> X_override = std::nullopt);

}  // namespace lclt
