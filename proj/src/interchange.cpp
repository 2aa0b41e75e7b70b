#include "mibci/interchange.hpp"

#include "mibci/errors.hpp"

#include <json.hpp>

#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <set>

namespace mibci {

namespace {

constexpr std::array<char, 4> kMagic{'M', 'I', 'T', '1'};
constexpr std::size_t kHeaderBytes = 4 + 3 * 4 + 8;

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

void put_f64(std::vector<unsigned char>& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<unsigned char>(bits >> (8 * i)));
}

std::uint32_t get_u32(const unsigned char* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
  return v;
}

double get_f64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return std::bit_cast<double>(v);
}

}  // namespace

void write_session(const std::filesystem::path& path, const std::vector<Trial>& trials) {
  const std::uint32_t n_trials = static_cast<std::uint32_t>(trials.size());
  const std::uint32_t n_channels = trials.empty() ? 0 : static_cast<std::uint32_t>(trials[0].n_channels());
  const std::uint32_t n_samples = trials.empty() ? 0 : static_cast<std::uint32_t>(trials[0].n_samples());
  const double fs = trials.empty() ? 0.0 : trials[0].fs;

  std::vector<unsigned char> buf;
  buf.reserve(kHeaderBytes + trials.size() * (1 + 8ULL * n_channels * n_samples));
  buf.insert(buf.end(), kMagic.begin(), kMagic.end());
  put_u32(buf, n_trials);
  put_u32(buf, n_channels);
  put_u32(buf, n_samples);
  put_f64(buf, fs);
  for (const auto& t : trials) {
    if (t.n_channels() != n_channels || t.n_samples() != n_samples || t.fs != fs) {
      throw DataError("write_session: trials differ in shape or sampling rate");
    }
    buf.push_back(static_cast<unsigned char>(t.label));
    for (Eigen::Index c = 0; c < t.n_channels(); ++c) {
      for (Eigen::Index s = 0; s < t.n_samples(); ++s) put_f64(buf, t.samples(c, s));
    }
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw DataError("write failed for " + path.string());
}

std::vector<Trial> read_session(const std::filesystem::path& path, int subject_id) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("missing file " + path.string());
  const std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)),
                                       std::istreambuf_iterator<char>());
  const std::string where = path.string() + ": ";
  if (buf.size() < kHeaderBytes || std::memcmp(buf.data(), kMagic.data(), 4) != 0) {
    throw DataError(where + "not an MIT1 session file");
  }
  const std::uint32_t n_trials = get_u32(buf.data() + 4);
  const std::uint32_t n_channels = get_u32(buf.data() + 8);
  const std::uint32_t n_samples = get_u32(buf.data() + 12);
  const double fs = get_f64(buf.data() + 16);
  if (n_trials == 0) throw DataError(where + "no trials");

  const std::size_t trial_bytes = 1 + 8ULL * n_channels * n_samples;
  if (buf.size() != kHeaderBytes + trial_bytes * n_trials) {
    throw DataError(where + "dimension mismatch: file size does not match header");
  }

  std::vector<Trial> trials;
  trials.reserve(n_trials);
  const unsigned char* p = buf.data() + kHeaderBytes;
  for (std::uint32_t i = 0; i < n_trials; ++i) {
    Trial t;
    if (*p > 1) throw DataError(where + "unknown label code " + std::to_string(*p));
    t.label = static_cast<Label>(*p++);
    t.subject_id = subject_id;
    t.fs = fs;
    t.samples.resize(n_channels, n_samples);
    for (std::uint32_t c = 0; c < n_channels; ++c) {
      for (std::uint32_t s = 0; s < n_samples; ++s, p += 8) t.samples(c, s) = get_f64(p);
    }
    if (!t.samples.allFinite()) {
      throw DataError(where + "non-finite sample in trial " + std::to_string(i));
    }
    trials.push_back(std::move(t));
  }
  return trials;
}

namespace {

std::string session_name(int id, const char* session) {
  char name[64];
  std::snprintf(name, sizeof(name), "S%02d_%s.mit", id, session);
  return name;
}

}  // namespace

void write_study(const std::filesystem::path& dir, const StudyDataset& study) {
  std::filesystem::create_directories(dir);
  nlohmann::json manifest;
  manifest["format"] = "MIT1";
  manifest["subjects"] = nlohmann::json::array();
  for (const auto& s : study.subjects) {
    const auto train = session_name(s.subject_id, "train");
    const auto test = session_name(s.subject_id, "test");
    write_session(dir / train, s.train_trials);
    write_session(dir / test, s.test_trials);
    manifest["subjects"].push_back({{"id", s.subject_id}, {"train", train}, {"test", test}});
  }
  std::ofstream out(dir / "manifest.json", std::ios::trunc);
  if (!out) throw DataError("cannot write manifest in " + dir.string());
  out << manifest.dump(2) << '\n';
}

StudyDataset load_study(const std::filesystem::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw DataError("missing file " + manifest_path.string());
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed manifest " + manifest_path.string() + ": " + e.what());
  }
  if (manifest.value("format", std::string{"MIT1"}) != "MIT1") {
    throw DataError("unsupported manifest format");
  }
  if (!manifest.contains("subjects") || !manifest["subjects"].is_array()) {
    throw DataError("manifest lists no subjects");
  }

  const auto base = manifest_path.parent_path();
  StudyDataset study;
  try {
    for (const auto& entry : manifest["subjects"]) {
      SubjectDataset s;
      s.subject_id = entry.at("id").get<int>();
      s.train_trials = read_session(base / entry.at("train").get<std::string>(), s.subject_id);
      s.test_trials = read_session(base / entry.at("test").get<std::string>(), s.subject_id);
      study.subjects.push_back(std::move(s));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed manifest entry: " + std::string(e.what()));
  }
  validate_study(study);
  return study;
}

}  // namespace mibci
