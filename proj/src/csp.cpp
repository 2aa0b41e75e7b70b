#include "mibci/csp.hpp"

#include "mibci/butterworth.hpp"
#include "mibci/errors.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

namespace mibci {

Eigen::MatrixXd normalize_trace(const Eigen::MatrixXd& raw_covariance) {
  const double tr = raw_covariance.trace();
  if (!(tr > 0.0) || !std::isfinite(tr)) {
    throw NumericalError("covariance has zero trace (all-zero trial)");
  }
  return raw_covariance / tr;
}

Eigen::MatrixXd spatial_covariance(const Trial& trial) {
  const Eigen::MatrixXd raw = trial.samples * trial.samples.transpose();
  return normalize_trace(raw);
}

namespace {

void fix_sign(Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> row) {
  for (Eigen::Index i = 0; i < row.size(); ++i) {
    if (row(i) != 0.0) {
      if (row(i) < 0.0) row = -row;
      return;
    }
  }
}

}  // namespace

CspModel fit_csp_from_means(const Eigen::MatrixXd& mean_left, const Eigen::MatrixXd& mean_right,
                            int m) {
  const Eigen::Index c = mean_left.rows();
  if (m < 1 || 2 * m > c) {
    throw ConfigError("CSP needs 1 <= m and 2m <= channels (m=" + std::to_string(m) +
                      ", channels=" + std::to_string(c) + ")");
  }
  if (mean_right.rows() != c || mean_left.cols() != c || mean_right.cols() != c) {
    throw DataError("class covariances differ in shape");
  }

  Eigen::MatrixXd composite = mean_left + mean_right;
  const double tr = composite.trace();
  if (!(tr > 0.0) || !composite.allFinite()) throw NumericalError("composite covariance is degenerate");
  composite.diagonal().array() += kCspRidge * tr;

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> comp_eig(composite);
  if (comp_eig.info() != Eigen::Success) throw NumericalError("composite eigendecomposition failed");
  const Eigen::VectorXd& d = comp_eig.eigenvalues();
  if (!(d.minCoeff() > 1e-3 * kCspRidge * tr)) {
    throw NumericalError("composite covariance singular beyond ridge repair");
  }
  const Eigen::MatrixXd whitening =
      d.cwiseSqrt().cwiseInverse().asDiagonal() * comp_eig.eigenvectors().transpose();

  Eigen::MatrixXd s1 = whitening * mean_left * whitening.transpose();
  s1 = 0.5 * (s1 + s1.transpose()).eval();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s1);
  if (eig.info() != Eigen::Success) throw NumericalError("CSP eigendecomposition failed");

  // Eigen sorts ascending; row r of the model takes column `order[r]`.
  const Eigen::MatrixXd all_filters = eig.eigenvectors().transpose() * whitening;
  CspModel model;
  model.m = m;
  model.filters.resize(2 * m, c);
  model.eigenvalues.resize(2 * m);
  for (int r = 0; r < 2 * m; ++r) {
    const Eigen::Index col = r < m ? c - 1 - r : 2 * m - 1 - r;
    model.filters.row(r) = all_filters.row(col);
    model.eigenvalues(r) = eig.eigenvalues()(col);
    fix_sign(model.filters.row(r));
  }
  if (!model.filters.allFinite()) throw NumericalError("CSP produced non-finite filters");
  return model;
}

CspModel fit_csp(std::span<const Trial> left, std::span<const Trial> right, int m) {
  if (left.empty() || right.empty()) throw ConfigError("CSP needs trials of both classes");
  const Eigen::Index c = left.front().n_channels();
  auto class_mean = [c](std::span<const Trial> trials) {
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(c, c);
    for (const auto& t : trials) {
      if (t.n_channels() != c) throw DataError("CSP trials differ in channel count");
      sum += spatial_covariance(t);
    }
    return Eigen::MatrixXd(sum / static_cast<double>(trials.size()));
  };
  return fit_csp_from_means(class_mean(left), class_mean(right), m);
}

Eigen::VectorXd csp_features_from_covariance(const CspModel& model,
                                             const Eigen::MatrixXd& raw_covariance) {
  if (raw_covariance.rows() != model.filters.cols()) {
    throw DataError("trial channel count does not match CSP model");
  }
  const Eigen::VectorXd var =
      (model.filters * raw_covariance).cwiseProduct(model.filters).rowwise().sum();
  const double total = var.sum();
  if (!(var.minCoeff() > 0.0) || !std::isfinite(total)) {
    throw NumericalError("zero-variance projected channel in CSP features");
  }
  return (var / total).array().log();
}

Eigen::VectorXd csp_features(const CspModel& model, const Trial& trial) {
  if (trial.n_channels() != model.filters.cols()) {
    throw DataError("trial channel count does not match CSP model");
  }
  const Eigen::MatrixXd z = model.filters * trial.samples;
  const Eigen::VectorXd var = z.rowwise().squaredNorm() / static_cast<double>(z.cols());
  const double total = var.sum();
  if (!(var.minCoeff() > 0.0) || !std::isfinite(total)) {
    throw NumericalError("zero-variance projected channel in CSP features");
  }
  return (var / total).array().log();
}

Eigen::VectorXd extract_fused_features(const FilterBankSpec& bank, std::span<const CspModel> models,
                                       const Trial& trial) {
  if (models.size() != bank.size()) {
    throw ConfigError("model count " + std::to_string(models.size()) + " does not match bank size " +
                      std::to_string(bank.size()));
  }
  if (models.empty()) return {};
  const int m = models.front().m;
  Eigen::VectorXd fused(2 * m * static_cast<Eigen::Index>(bank.size()));
  for (std::size_t b = 0; b < bank.size(); ++b) {
    if (models[b].m != m) throw ConfigError("inconsistent m across band models");
    const Trial filtered =
        apply_filter(design_butterworth_bandpass(bank.bands[b], trial.fs), trial);
    fused.segment(2 * m * static_cast<Eigen::Index>(b), 2 * m) = csp_features(models[b], filtered);
  }
  return fused;
}

namespace {

constexpr char kCspMagic[4] = {'C', 'S', 'P', '1'};
constexpr std::uint32_t kCspVersion = 1;

template <class T>
void put(std::ostream& out, T v) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  const auto bits = std::bit_cast<U>(v);
  for (std::size_t i = 0; i < sizeof(T); ++i) out.put(static_cast<char>((bits >> (8 * i)) & 0xff));
}

template <class T>
T get(std::istream& in) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    const int ch = in.get();
    if (ch == std::char_traits<char>::eof()) throw DataError("truncated CSP model");
    bits |= static_cast<U>(static_cast<unsigned char>(ch)) << (8 * i);
  }
  return std::bit_cast<T>(bits);
}

}  // namespace

void write_csp_model(std::ostream& out, const CspModel& model) {
  out.write(kCspMagic, 4);
  put<std::uint32_t>(out, kCspVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(model.m));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(model.filters.cols()));
  put<std::int32_t>(out, model.band.low_hz);
  put<std::int32_t>(out, model.band.high_hz);
  for (Eigen::Index i = 0; i < model.eigenvalues.size(); ++i) put<double>(out, model.eigenvalues(i));
  for (Eigen::Index r = 0; r < model.filters.rows(); ++r) {
    for (Eigen::Index c = 0; c < model.filters.cols(); ++c) put<double>(out, model.filters(r, c));
  }
}

CspModel read_csp_model(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::char_traits<char>::compare(magic, kCspMagic, 4) != 0) {
    throw DataError("not a CSP1 model");
  }
  if (get<std::uint32_t>(in) != kCspVersion) throw DataError("unsupported CSP model version");
  CspModel model;
  model.m = static_cast<int>(get<std::uint32_t>(in));
  const auto c = static_cast<Eigen::Index>(get<std::uint32_t>(in));
  model.band.low_hz = get<std::int32_t>(in);
  model.band.high_hz = get<std::int32_t>(in);
  model.eigenvalues.resize(2 * model.m);
  for (Eigen::Index i = 0; i < model.eigenvalues.size(); ++i) model.eigenvalues(i) = get<double>(in);
  model.filters.resize(2 * model.m, c);
  for (Eigen::Index r = 0; r < model.filters.rows(); ++r) {
    for (Eigen::Index k = 0; k < c; ++k) model.filters(r, k) = get<double>(in);
  }
  return model;
}

void save_csp_models(const std::filesystem::path& path, std::span<const CspModel> models) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  put<std::uint32_t>(out, static_cast<std::uint32_t>(models.size()));
  for (const auto& m : models) write_csp_model(out, m);
}

std::vector<CspModel> load_csp_models(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("missing file " + path.string());
  const auto n = get<std::uint32_t>(in);
  std::vector<CspModel> models;
  models.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) models.push_back(read_csp_model(in));
  return models;
}

}  // namespace mibci
