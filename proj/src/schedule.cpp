#include "noiselab/schedule.hpp"

#include <cmath>
#include <stdexcept>

namespace noiselab {

Schedule::Schedule(std::vector<double> alpha_bar_values)
    : alpha_bar(std::move(alpha_bar_values)) {
  if (alpha_bar.size() < 2) {
    throw std::invalid_argument("Schedule: need at least one step");
  }
  if (alpha_bar.front() > 1.0 || alpha_bar.front() <= 0.0) {
    throw std::invalid_argument("Schedule: alpha_bar[0] must lie in (0,1]");
  }
  for (std::size_t t = 1; t < alpha_bar.size(); ++t) {
    if (!(alpha_bar[t] > 0.0 && alpha_bar[t] < alpha_bar[t - 1])) {
      throw std::invalid_argument(
          "Schedule: alpha_bar must be positive and strictly decreasing");
    }
  }
}

double Schedule::a(int t) const {
  return std::sqrt(alpha_bar[t - 1] / alpha_bar[t]);
}

double Schedule::b(int t) const {
  return std::sqrt(1.0 - alpha_bar[t - 1]) - a(t) * std::sqrt(1.0 - alpha_bar[t]);
}

double Schedule::score_coeff(int t) const {
  return -b(t) * std::sqrt(1.0 - alpha_bar[t]);
}

double Schedule::ou_time(int t) const { return -0.5 * std::log(alpha_bar[t]); }

double Schedule::step_alpha(int t) const {
  return alpha_bar[t] / alpha_bar[t - 1];
}

double Schedule::step_sigma(int t) const {
  return std::sqrt(1.0 - step_alpha(t));
}

Schedule linear_beta_schedule(int T, double beta_min, double beta_max) {
  if (T < 1) throw std::invalid_argument("linear_beta_schedule: T >= 1");
  if (!(beta_min > 0.0 && beta_min <= beta_max && beta_max < 1.0)) {
    throw std::invalid_argument(
        "linear_beta_schedule: need 0 < beta_min <= beta_max < 1");
  }
  std::vector<double> ab(static_cast<std::size_t>(T) + 1);
  ab[0] = 1.0;
  double prod = 1.0;
  for (int t = 1; t <= T; ++t) {
    const double beta =
        T == 1 ? beta_min
               : beta_min + (beta_max - beta_min) * (t - 1) / (T - 1);
    prod *= (1.0 - beta);
    ab[t] = prod;
  }
  return Schedule(std::move(ab));
}

}  // namespace noiselab
