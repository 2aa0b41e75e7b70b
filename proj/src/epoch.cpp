#include "mibci/epoch.hpp"

#include "mibci/errors.hpp"

#include <cmath>

namespace mibci {

Trial epoch_window(const Trial& trial, double t_start, double t_end) {
  const double extent = trial.duration();
  constexpr double kSlack = 1e-9;
  if (!(t_start >= 0.0) || !(t_end > t_start) || t_end > extent + kSlack) {
    throw DataError("epoch window [" + std::to_string(t_start) + ", " + std::to_string(t_end) +
                    ") outside trial extent [0, " + std::to_string(extent) + "]");
  }
  const auto first = static_cast<Eigen::Index>(std::llround(t_start * trial.fs));
  auto last = static_cast<Eigen::Index>(std::llround(t_end * trial.fs));
  if (last > trial.n_samples()) last = trial.n_samples();
  if (last <= first) throw DataError("epoch window selects no samples");

  Trial out;
  out.samples = trial.samples.middleCols(first, last - first);
  out.label = trial.label;
  out.subject_id = trial.subject_id;
  out.fs = trial.fs;
  return out;
}

}  // namespace mibci
