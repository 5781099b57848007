#pragma once

// BATSE-style catalog ingestion and derivation of the six clustering
// variables: log10 of T50, T90, P256, total fluence F_T and the hardness
// ratios H32 = F3/F2, H321 = F3/(F1+F2).
//
// CSV contract: one header row naming trigger_id,t50,t90,f1,f2,f3,f4,p64,
// p256,p1024 (any order), comma separated, empty field = missing.

#include "fuzzyburst/core.hpp"
#include "fuzzyburst/validity.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace fuzzyburst {

/// Raised when the catalog file cannot be opened.
class InputFileError : public Error {
public:
  using Error::Error;
};

struct RawBurstRecord {
  std::int64_t trigger_id = 0;
  std::optional<double> t50, t90;
  std::optional<double> f1, f2, f3, f4;
  std::optional<double> p64, p256, p1024;
};

struct CatalogLoad {
  std::vector<RawBurstRecord> records;
  /// Non-fatal findings, e.g. t50 > t90.
  std::vector<std::string> warnings;
};

inline constexpr std::array<std::string_view, 10> kCatalogColumns = {
    "trigger_id", "t50", "t90", "f1", "f2", "f3", "f4", "p64", "p256", "p1024"};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' ||
                        s.back() == '\r' || s.back() == '\n'))
    s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      return out;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

inline bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+')
    s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

} // namespace detail

/// Parses catalog CSV text. `source` names the input in error messages.
inline CatalogLoad parse_catalog(std::istream& in,
                                 const std::string& source = "<input>") {
  CatalogLoad out;
  std::string line;
  std::size_t line_no = 0;

  if (!std::getline(in, line))
    throw Error(source + ": missing header row");
  ++line_no;
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0)
    line.erase(0, 3);
  const auto header = detail::split_commas(line);
  std::array<std::size_t, kCatalogColumns.size()> where{};
  for (std::size_t c = 0; c < kCatalogColumns.size(); ++c) {
    std::size_t found = header.size();
    for (std::size_t h = 0; h < header.size(); ++h)
      if (header[h] == kCatalogColumns[c])
        found = h;
    if (found == header.size())
      throw Error(source + ": header is missing column '" +
                  std::string(kCatalogColumns[c]) + "'");
    where[c] = found;
  }

  std::unordered_set<std::int64_t> seen;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty())
      continue;
    const auto fields = detail::split_commas(line);
    const std::string at = source + ":" + std::to_string(line_no);
    if (fields.size() != header.size())
      throw Error(at + ": expected " + std::to_string(header.size()) +
                  " fields, found " + std::to_string(fields.size()));

    RawBurstRecord rec;
    const auto id_text = fields[where[0]];
    const auto [ptr, ec] = std::from_chars(
        id_text.data(), id_text.data() + id_text.size(), rec.trigger_id);
    if (id_text.empty() || ec != std::errc() ||
        ptr != id_text.data() + id_text.size())
      throw Error(at + ": malformed trigger_id '" + std::string(id_text) + "'");
    if (!seen.insert(rec.trigger_id).second)
      throw Error(at + ": duplicate trigger_id " +
                  std::to_string(rec.trigger_id));

    std::array<std::optional<double>*, 9> slots = {
        &rec.t50, &rec.t90, &rec.f1, &rec.f2, &rec.f3,
        &rec.f4,  &rec.p64, &rec.p256, &rec.p1024};
    for (std::size_t c = 1; c < kCatalogColumns.size(); ++c) {
      const auto text = fields[where[c]];
      if (text.empty())
        continue;
      double value = 0.0;
      if (!detail::parse_double(text, value))
        throw Error(at + ": malformed value '" + std::string(text) +
                    "' in column " + std::string(kCatalogColumns[c]));
      // Negative entries are catalog codes for "not measured".
      if (value < 0.0)
        continue;
      *slots[c - 1] = value;
    }
    if (rec.t50 && rec.t90 && *rec.t50 > *rec.t90)
      out.warnings.push_back("trigger " + std::to_string(rec.trigger_id) +
                             ": t50 > t90");
    out.records.push_back(rec);
  }
  return out;
}

inline CatalogLoad load_catalog(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw InputFileError("cannot open input file '" + path + "'");
  return parse_catalog(in, path);
}

inline constexpr std::array<std::string_view, 6> kFeatureNames = {
    "log10_t50", "log10_t90", "log10_p256",
    "log10_ft",  "log10_h32", "log10_h321"};

struct DerivedBurst {
  RawBurstRecord raw;
  double total_fluence = 0.0;
  double h32 = 0.0;
  double h321 = 0.0;
  /// log10 T50, T90, P256, F_T, H32, H321.
  std::array<double, 6> features{};
};

struct Exclusion {
  std::int64_t trigger_id = 0;
  std::string reason;
};

struct DerivedCatalog {
  std::vector<DerivedBurst> bursts;
  std::vector<Exclusion> exclusions;

  FeatureTable feature_table() const {
    if (bursts.empty())
      throw Error("empty input");
    std::vector<double> values;
    values.reserve(bursts.size() * kFeatureNames.size());
    std::vector<std::string> ids;
    for (const auto& b : bursts) {
      values.insert(values.end(), b.features.begin(), b.features.end());
      ids.push_back(std::to_string(b.raw.trigger_id));
    }
    return FeatureTable(std::move(values), bursts.size(),
                        {kFeatureNames.begin(), kFeatureNames.end()},
                        std::move(ids));
  }
};

/// Derives the six log variables; records with a missing input or a
/// non-finite log are excluded with a reason rather than failing.
inline DerivedCatalog derive_features(const std::vector<RawBurstRecord>& records) {
  DerivedCatalog out;
  for (const auto& rec : records) {
    auto exclude = [&](std::string reason) {
      out.exclusions.push_back({rec.trigger_id, std::move(reason)});
    };
    const std::array<std::pair<const std::optional<double>*, const char*>, 7>
        required = {{{&rec.t50, "t50"},
                     {&rec.t90, "t90"},
                     {&rec.p256, "p256"},
                     {&rec.f1, "f1"},
                     {&rec.f2, "f2"},
                     {&rec.f3, "f3"},
                     {&rec.f4, "f4"}}};
    const char* missing = nullptr;
    for (const auto& [slot, name] : required)
      if (!slot->has_value()) {
        missing = name;
        break;
      }
    if (missing) {
      exclude(std::string("missing ") + missing);
      continue;
    }

    DerivedBurst b;
    b.raw = rec;
    b.total_fluence = *rec.f1 + *rec.f2 + *rec.f3 + *rec.f4;
    b.h32 = *rec.f3 / *rec.f2;
    b.h321 = *rec.f3 / (*rec.f2 + *rec.f1);
    const std::array<double, 6> args = {*rec.t50,        *rec.t90, *rec.p256,
                                        b.total_fluence, b.h32,    b.h321};
    static constexpr std::array<const char*, 6> labels = {
        "T50", "T90", "P256", "FT", "H32", "H321"};
    const char* bad = nullptr;
    for (std::size_t c = 0; c < args.size(); ++c) {
      // Zero denominators give inf or nan ratios; reject those too.
      const double lg = args[c] > 0.0 && std::isfinite(args[c])
                            ? std::log10(args[c])
                            : std::nan("");
      if (!std::isfinite(lg)) {
        bad = labels[c];
        break;
      }
      b.features[c] = lg;
    }
    if (bad) {
      exclude(std::string("non-finite log ") + bad);
      continue;
    }
    out.bursts.push_back(b);
  }
  return out;
}

/// "trigger_id<TAB>reason" per line.
inline std::string format_exclusion_log(const std::vector<Exclusion>& ex) {
  std::string out;
  for (const auto& e : ex)
    out += std::to_string(e.trigger_id) + "\t" + e.reason + "\n";
  return out;
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

inline constexpr std::array<std::string_view, 6> kSummaryNames = {
    "t50", "t90", "p256", "ft_e6", "h32", "h321"};

struct ClusterSummary {
  int cluster = 0;
  std::size_t size = 0;
  double percent = 0.0;
  /// Raw-scale T50 (s), T90 (s), P256, F_T x 1e6, H32, H321; empty for an
  /// empty cluster.
  std::optional<std::array<MeanSe, 6>> stats;
};

/// Mean and standard error (sample sd / sqrt(n)) of raw-scale properties per
/// cluster.
inline std::vector<ClusterSummary> summarize_clusters(
    const std::vector<DerivedBurst>& bursts, const HardPartition& labels) {
  if (bursts.size() != labels.n())
    throw Error("summarize_clusters: label count does not match bursts");
  const auto k = static_cast<std::size_t>(labels.k());
  std::vector<std::array<std::vector<double>, 6>> cols(k);
  for (std::size_t i = 0; i < bursts.size(); ++i) {
    const auto& b = bursts[i];
    auto& c = cols[static_cast<std::size_t>(labels[i] - 1)];
    c[0].push_back(*b.raw.t50);
    c[1].push_back(*b.raw.t90);
    c[2].push_back(*b.raw.p256);
    c[3].push_back(b.total_fluence * 1e6);
    c[4].push_back(b.h32);
    c[5].push_back(b.h321);
  }
  std::vector<ClusterSummary> out(k);
  for (std::size_t c = 0; c < k; ++c) {
    auto& s = out[c];
    s.cluster = static_cast<int>(c) + 1;
    s.size = cols[c][0].size();
    s.percent = bursts.empty() ? 0.0
                               : 100.0 * static_cast<double>(s.size) /
                                     static_cast<double>(bursts.size());
    if (s.size == 0)
      continue;
    std::array<MeanSe, 6> st;
    for (std::size_t v = 0; v < 6; ++v) {
      const auto [mean, sd] = mean_and_sd(cols[c][v]);
      st[v] = {mean, sd / std::sqrt(static_cast<double>(s.size))};
    }
    s.stats = st;
  }
  return out;
}

} // namespace fuzzyburst
