#include "mibci/butterworth.hpp"

#include "mibci/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mibci {

using cplx = std::complex<double>;

std::array<cplx, 2> Biquad::poles() const {
  // Roots of z^2 + a1 z + a2.
  const cplx disc = std::sqrt(cplx(a1 * a1 - 4.0 * a2, 0.0));
  return {(-a1 + disc) / 2.0, (-a1 - disc) / 2.0};
}

namespace {

cplx bilinear(cplx s, double fs) { return (2.0 * fs + s) / (2.0 * fs - s); }

Biquad section_from_poles(cplx z1, cplx z2) {
  // Numerator (1 - z^-1)(1 + z^-1): one zero at DC and one at Nyquist per section.
  Biquad q;
  q.b0 = 1.0;
  q.b1 = 0.0;
  q.b2 = -1.0;
  q.a1 = -(z1 + z2).real();
  q.a2 = (z1 * z2).real();
  return q;
}

cplx section_response(const Biquad& q, cplx zinv) {
  return (q.b0 + zinv * (q.b1 + zinv * q.b2)) / (1.0 + zinv * (q.a1 + zinv * q.a2));
}

}  // namespace

SosFilter design_butterworth_bandpass(const BandSpec& band, double fs, int order) {
  if (order < 2 || order % 2 != 0) throw ConfigError("bandpass order must be even and >= 2");
  if (!(band.low_hz > 0) || band.low_hz >= band.high_hz) {
    throw ConfigError("invalid band " + band_label(band));
  }
  if (!(band.high_hz < fs / 2.0)) {
    throw ConfigError("band edge " + std::to_string(band.high_hz) + " Hz at or above Nyquist");
  }

  const int n = order / 2;
  const double pi = std::numbers::pi;
  const double w1 = 2.0 * fs * std::tan(pi * band.low_hz / fs);
  const double w2 = 2.0 * fs * std::tan(pi * band.high_hz / fs);
  const double bw = w2 - w1;
  const double w0sq = w1 * w2;

  SosFilter filter;
  filter.fs = fs;
  // Upper-half-plane prototype poles p_k = exp(i*pi*(2k + n - 1) / (2n)), k = 1..ceil(n/2).
  for (int k = 1; k <= (n + 1) / 2; ++k) {
    const cplx p = std::polar(1.0, pi * (2.0 * k + n - 1) / (2.0 * n));
    // s^2 - p*bw*s + w0^2 = 0 maps one prototype pole onto two bandpass poles.
    const cplx half = p * bw / 2.0;
    const cplx root = std::sqrt(half * half - w0sq);
    const cplx sa = half + root;
    const cplx sb = half - root;
    const bool real_prototype = 2 * k == n + 1;
    if (real_prototype) {
      filter.sections.push_back(section_from_poles(bilinear(sa, fs), bilinear(sb, fs)));
    } else {
      filter.sections.push_back(section_from_poles(bilinear(sa, fs), std::conj(bilinear(sa, fs))));
      filter.sections.push_back(section_from_poles(bilinear(sb, fs), std::conj(bilinear(sb, fs))));
    }
  }

  // Normalize to unit gain at the digital image of the analog centre frequency.
  const double wc = 2.0 * std::atan(std::sqrt(w0sq) / (2.0 * fs));
  const double g = 1.0 / std::abs(frequency_response(filter, wc * fs / (2.0 * pi)));
  const double per_section = std::pow(g, 1.0 / static_cast<double>(filter.sections.size()));
  for (auto& q : filter.sections) {
    q.b0 *= per_section;
    q.b1 *= per_section;
    q.b2 *= per_section;
  }
  return filter;
}

std::complex<double> frequency_response(const SosFilter& filter, double freq_hz) {
  const cplx zinv = std::polar(1.0, -2.0 * std::numbers::pi * freq_hz / filter.fs);
  cplx h(1.0, 0.0);
  for (const auto& q : filter.sections) h *= section_response(q, zinv);
  return h;
}

double magnitude_db(const SosFilter& filter, double freq_hz) {
  return 20.0 * std::log10(std::abs(frequency_response(filter, freq_hz)));
}

double max_pole_radius(const SosFilter& filter) {
  double r = 0.0;
  for (const auto& q : filter.sections) {
    for (const auto& p : q.poles()) r = std::max(r, std::abs(p));
  }
  return r;
}

void filter_rows(const SosFilter& filter, Eigen::MatrixXd& rows) {
  const Eigen::Index n = rows.cols();
  std::vector<double> x(static_cast<std::size_t>(n));
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    for (Eigen::Index t = 0; t < n; ++t) x[static_cast<std::size_t>(t)] = rows(r, t);
    for (const auto& q : filter.sections) {
      // Transposed direct form II.
      double s1 = 0.0, s2 = 0.0;
      for (auto& v : x) {
        const double y = q.b0 * v + s1;
        s1 = q.b1 * v - q.a1 * y + s2;
        s2 = q.b2 * v - q.a2 * y;
        v = y;
      }
    }
    for (Eigen::Index t = 0; t < n; ++t) rows(r, t) = x[static_cast<std::size_t>(t)];
  }
}

Trial apply_filter(const SosFilter& filter, const Trial& trial) {
  if (trial.fs != filter.fs) {
    throw DataError("sampling rate mismatch: trial " + std::to_string(trial.fs) + " Hz, filter " +
                    std::to_string(filter.fs) + " Hz");
  }
  Trial out = trial;
  filter_rows(filter, out.samples);
  return out;
}

}  // namespace mibci
