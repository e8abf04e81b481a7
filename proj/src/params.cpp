#include "lclt/params.hpp"

#include <limits>
#include <sstream>

namespace lclt {

ApproxParams derive_params(double T, double K, double K_prime, double A, double B,
                           std::optional<double> Y_override, std::optional<double> X_override) {
    if (!(2 < K_prime && K_prime < K))
        throw std::invalid_argument("derive_params: need 2 < K' < K");
    if (!(A > 0) || !(B > 0)) throw std::invalid_argument("derive_params: need A, B > 0");
    // loglog T must be positive for logloglog T to exist at all.
    if (!(T > 15.2)) throw std::invalid_argument("derive_params: T too small (need log log T > 1)");

    ApproxParams p;
    p.T = T;
    p.K = K;
    p.K_prime = K_prime;
    p.A = A;
    p.B = B;
    p.Y_override = Y_override;
    p.X_override = X_override;

    p.log_T = std::log(T);
    p.loglog_T = std::log(p.log_T);
    p.logloglog_T = std::log(p.loglog_T);

    p.W = K * p.logloglog_T * p.logloglog_T;
    p.sigma0 = 0.5 + p.W / p.log_T;
    p.Y = std::exp(p.log_T / (K_prime * p.loglog_T));
    // For T <= e^{e^e} the derived X exponent is negative; the derived value
    // is then meaningless and only an override can supply X.
    p.X = p.logloglog_T > 0 ? std::exp(p.log_T / (K_prime * p.logloglog_T))
                            : std::numeric_limits<double>::quiet_NaN();

    p.sigma0_degenerate = p.W / p.log_T > 0.1;
    p.asymptotically_invalid =
        p.logloglog_T <= 1.0 || Y_override.has_value() || X_override.has_value();

    double Ye = p.Y_eff(), Xe = p.X_eff();
    if (!(13 < Ye && Ye < Xe && Xe < T)) {
        std::ostringstream os;
        os << "derive_params: parameters degenerate at this T: need 13 < Y < X < T, got Y=" << Ye
           << " X=" << Xe << " T=" << T;
        throw DegenerateParamsError(os.str(), p);
    }
    return p;
}

}  // namespace lclt
