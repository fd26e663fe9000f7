#pragma once

namespace fpdwalk {

/// Largest z for which E_beta(-z) is evaluated.
inline constexpr double kMittagLefflerMaxArgument = 1e10;

/// One-parameter Mittag-Leffler function E_beta(arg) = sum_j arg^j / Gamma(1 + beta j)
/// on the negative half-line arg = -z, z in [0, kMittagLefflerMaxArgument],
/// beta in (0, 1]. Absolute accuracy is better than 1e-10 on z in [0, 100].
///
/// Small z uses the Taylor series in extended precision while its largest
/// term stays below 1e3. Everywhere else (0 < beta < 1) the complete
/// monotonicity representation
///   E_beta(-z) = sin(beta pi)/(beta pi) * int_0^inf exp(-v^(1/beta)) z / (v^2 + 2 z v cos(beta pi) + z^2) dv
/// is integrated by tanh-sinh quadrature on segments split around the peak of the
/// rational factor. beta = 1 is exp(-z).
double mittag_leffler(double beta, double arg);

/// Largest |term| of the Taylor series of E_beta(-z), as a natural log.
double mittag_leffler_series_log_max_term(double beta, double z);

} // namespace fpdwalk
