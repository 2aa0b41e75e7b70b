#pragma once

#include <compare>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace mibci {

inline constexpr int kBankLowHz = 4;
inline constexpr int kBankHighHz = 40;

struct BandSpec {
  int low_hz{kBankLowHz};
  int high_hz{kBankHighHz};

  int width() const { return high_hz - low_hz; }
  auto operator<=>(const BandSpec&) const = default;
};

// Throws ConfigError unless 4 <= low < high <= 40.
void validate_band(const BandSpec& band);

struct FilterBankSpec {
  std::vector<BandSpec> bands;

  std::size_t size() const { return bands.size(); }
};

// Validates every band and rejects duplicates.
FilterBankSpec make_bank(std::vector<BandSpec> bands);

// Every integer band [a, b] with 4 <= a < b <= 40, ordered by width and then low edge:
// [4,5], [5,6], ..., [39,40], [4,6], ..., [5,40], [4,40]. 666 bands.
FilterBankSpec build_full_bank();

// Nine contiguous 4 Hz bands [4,8], [8,12], ..., [36,40].
FilterBankSpec build_fbcsp_bank();

// The single band [4,40].
FilterBankSpec build_broadband_bank();

// "full", "fbcsp" or "broadband"; throws ConfigError otherwise.
FilterBankSpec bank_by_name(std::string_view name);

std::string band_label(const BandSpec& band);

}  // namespace mibci
