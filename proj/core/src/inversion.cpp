#include "wt/inversion.hpp"

#include <cmath>
#include <string>

#include "wt/errors.hpp"

namespace wt {

ContourSchedule ContourSchedule::defaults(double alpha, double beta) {
  ContourSchedule s;
  s.alpha = alpha;
  s.beta = beta;
  s.eps0 = 0.1 * (beta - alpha);
  return s;
}

void ContourSchedule::validate() const {
  if (!(alpha < beta))
    raise(Errc::InvalidInput, "contour schedule: alpha must be below beta");
  if (!(eps0 > 0.0))
    raise(Errc::InvalidInput, "contour schedule: eps0 must be positive");
  if (!(ratio > 0.0 && ratio < 1.0))
    raise(Errc::InvalidInput, "contour schedule: ratio must be in (0,1)");
  if (count < 3)
    raise(Errc::InvalidInput,
          "contour schedule: need at least 3 heights to extrapolate");
  if (nodes < 8)
    raise(Errc::InvalidInput, "contour schedule: need at least 8 nodes");
}

InversionResult invert_interval(const std::function<Matrix(Cplx)>& Phi,
                                const ContourSchedule& schedule) {
  schedule.validate();
  if (!Phi) raise(Errc::InvalidInput, "invert_interval: empty evaluator");

  const int n = schedule.nodes;
  const double h = (schedule.beta - schedule.alpha) / (n - 1);
  auto weight = [&schedule](Cplx z) -> Cplx {
    return schedule.phi ? schedule.phi(z) : Cplx(1.0, 0.0);
  };

  InversionResult out;
  double eps = schedule.eps0;
  for (int k = 0; k < schedule.count; ++k, eps *= schedule.ratio) {
    Matrix acc;
    for (int j = 0; j < n; ++j) {
      const double lambda = schedule.alpha + j * h;
      const double w = (j == 0 || j == n - 1) ? 0.5 : 1.0;
      const Cplx zb(lambda, -eps);
      const Cplx zt(lambda, eps);
      Matrix term = weight(zb) * Phi(zb) - weight(zt) * Phi(zt);
      if (j == 0)
        acc = w * term;
      else
        acc += w * term;
    }
    // -(1/2pi i) = i/(2pi); bottom runs left to right, top right to left.
    out.per_eps.push_back((iu / (2.0 * pi)) * h * acc);
  }

  const double r = schedule.ratio;
  for (size_t k = 0; k + 1 < out.per_eps.size(); ++k)
    out.extrapolants.push_back((out.per_eps[k + 1] - r * out.per_eps[k]) /
                               (1.0 - r));

  // Successive residuals; the pair that agrees best supplies both the
  // estimate (its later member) and the error bar.
  std::vector<double> resid;
  for (size_t k = 1; k < out.extrapolants.size(); ++k)
    resid.push_back(op_norm(out.extrapolants[k] - out.extrapolants[k - 1]));

  size_t best = 0;
  for (size_t k = 1; k < resid.size(); ++k)
    if (resid[k] <= resid[best]) best = k;

  if (resid.size() >= 2) {
    bool worsening = true;
    for (size_t k = 1; k < resid.size(); ++k)
      if (resid[k] < resid[k - 1]) worsening = false;
    const double floor =
        1e-13 * std::max(1.0, op_norm(out.extrapolants.back()));
    if (worsening && resid.back() > floor)
      raise(Errc::ExtrapolationDiverged,
            "invert_interval: residuals grow from " +
                std::to_string(resid.front()) + " to " +
                std::to_string(resid.back()) + " across the schedule");
  }

  out.chosen_index = static_cast<int>(best + 1);
  out.estimate = out.extrapolants[best + 1];
  out.error = resid[best];
  return out;
}

}  // namespace wt
