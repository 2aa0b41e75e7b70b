#pragma once

#include "mibci/filter_bank.hpp"
#include "mibci/types.hpp"

#include <array>
#include <complex>
#include <vector>

namespace mibci {

// One second-order section, a0 normalized to 1:
//   H(z) = (b0 + b1 z^-1 + b2 z^-2) / (1 + a1 z^-1 + a2 z^-2)
struct Biquad {
  double b0{1.0}, b1{0.0}, b2{0.0};
  double a1{0.0}, a2{0.0};

  std::array<std::complex<double>, 2> poles() const;
};

struct SosFilter {
  std::vector<Biquad> sections;
  double fs{250.0};
};

// Digital Butterworth bandpass of the given total order (even; 6 gives three
// sections and six poles). Built from the order/2 analog lowpass prototype by the
// lowpass-to-bandpass transform with prewarped edges and the bilinear transform,
// so the -3 dB points sit exactly on the band edges. Unit gain at the centre.
// Throws ConfigError for an odd order or a band edge at or above Nyquist.
SosFilter design_butterworth_bandpass(const BandSpec& band, double fs, int order = 6);

std::complex<double> frequency_response(const SosFilter& filter, double freq_hz);
double magnitude_db(const SosFilter& filter, double freq_hz);
double max_pole_radius(const SosFilter& filter);

// Causal forward filtering of every row, zero initial state, in place.
void filter_rows(const SosFilter& filter, Eigen::MatrixXd& rows);

// Throws DataError when trial.fs differs from filter.fs.
Trial apply_filter(const SosFilter& filter, const Trial& trial);

}  // namespace mibci
