#include "mibci/filter_bank.hpp"

#include "mibci/errors.hpp"

#include <set>

namespace mibci {

void validate_band(const BandSpec& band) {
  if (band.low_hz < kBankLowHz || band.high_hz > kBankHighHz || band.low_hz >= band.high_hz) {
    throw ConfigError("band " + band_label(band) + " outside 4 <= low < high <= 40");
  }
}

FilterBankSpec make_bank(std::vector<BandSpec> bands) {
  std::set<BandSpec> seen;
  for (const auto& b : bands) {
    validate_band(b);
    if (!seen.insert(b).second) throw ConfigError("duplicate band " + band_label(b));
  }
  return FilterBankSpec{std::move(bands)};
}

FilterBankSpec build_full_bank() {
  std::vector<BandSpec> bands;
  for (int width = 1; width <= kBankHighHz - kBankLowHz; ++width) {
    for (int low = kBankLowHz; low + width <= kBankHighHz; ++low) {
      bands.push_back({low, low + width});
    }
  }
  return FilterBankSpec{std::move(bands)};
}

FilterBankSpec build_fbcsp_bank() {
  std::vector<BandSpec> bands;
  for (int low = kBankLowHz; low < kBankHighHz; low += 4) bands.push_back({low, low + 4});
  return FilterBankSpec{std::move(bands)};
}

FilterBankSpec build_broadband_bank() { return FilterBankSpec{{{kBankLowHz, kBankHighHz}}}; }

FilterBankSpec bank_by_name(std::string_view name) {
  if (name == "full") return build_full_bank();
  if (name == "fbcsp") return build_fbcsp_bank();
  if (name == "broadband") return build_broadband_bank();
  throw ConfigError("unknown bank '" + std::string(name) + "' (expected full, fbcsp or broadband)");
}

std::string band_label(const BandSpec& band) {
  return "[" + std::to_string(band.low_hz) + "," + std::to_string(band.high_hz) + "]";
}

}  // namespace mibci
