#pragma once

// End-to-end catalog study: ingest, solve FANNY for each K, compute indices,
// summaries, the K=5 by K=3 cross-tabulation, membership PCA and plot data.

#include "fuzzyburst/catalog.hpp"
#include "fuzzyburst/core.hpp"
#include "fuzzyburst/fanny.hpp"
#include "fuzzyburst/mpca.hpp"
#include "fuzzyburst/validity.hpp"
#include "fuzzyburst/version.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace fuzzyburst {

struct RunConfig {
  std::string input;
  std::string outdir;
  std::vector<int> k_list = {3, 5};
  double r = 1.3;
  double tol = 1e-9;
  int max_iter = 500;
  std::uint64_t seed = 1;
  int starts = 10;
  InitMode init = InitMode::SeededRandom;
  std::size_t conn_l = 10;
  bool standardize = false;

  FannyConfig fanny(int k) const {
    FannyConfig c;
    c.k = static_cast<std::size_t>(k);
    c.r = r;
    c.tol = tol;
    c.max_iter = max_iter;
    c.seed = seed;
    c.starts = starts;
    c.init = init;
    return c;
  }
};

struct KSolution {
  int k = 0;
  FannyResult fit;
  HardPartition partition;
  double connectivity = 0.0;
  double dunn = 0.0;
  MembershipReport report;
  std::vector<ClusterSummary> summary;
};

struct StudyResult {
  CatalogLoad load;
  DerivedCatalog derived;
  std::vector<KSolution> solutions;
  std::optional<PcaResult> pca;          // from the K=3 solution
  std::optional<CrossTab> crosstab_5x3;  // rows K=5, columns K=3

  const KSolution* solution(int k) const {
    for (const auto& s : solutions)
      if (s.k == k)
        return &s;
    return nullptr;
  }
};

inline std::string format_config(const RunConfig& cfg, bool with_paths = true) {
  std::string out = "fuzzyburst " + std::string(kVersion) + "\n";
  if (with_paths) {
    out += "input=" + cfg.input + "\n";
    out += "outdir=" + cfg.outdir + "\n";
  }
  out += "k=";
  for (std::size_t i = 0; i < cfg.k_list.size(); ++i)
    out += (i ? "," : "") + std::to_string(cfg.k_list[i]);
  char buf[64];
  std::snprintf(buf, sizeof buf, "\nr=%.15g\n", cfg.r);
  out += buf;
  std::snprintf(buf, sizeof buf, "tol=%.15g\n", cfg.tol);
  out += buf;
  out += "max_iter=" + std::to_string(cfg.max_iter) + "\n";
  out += "seed=" + std::to_string(cfg.seed) + "\n";
  out += "starts=" + std::to_string(cfg.starts) + "\n";
  out += "init=" + to_string(cfg.init) + "\n";
  out += "conn_l=" + std::to_string(cfg.conn_l) + "\n";
  out += std::string("standardize=") + (cfg.standardize ? "true" : "false") +
         "\n";
  return out;
}

/// Version line followed by every effective parameter.
inline std::string print_version_and_config(const RunConfig& cfg) {
  return format_config(cfg, true);
}

inline KSolution solve_for_k(const DistanceMatrix& d,
                             const DerivedCatalog& derived,
                             const RunConfig& cfg, int k) {
  KSolution s;
  s.k = k;
  s.fit = fanny_solve(d, cfg.fanny(k));
  s.partition = HardPartition(s.fit.hard_labels, k);
  s.connectivity = connectivity_index(s.partition, d, cfg.conn_l);
  bool any_empty = false;
  for (std::size_t sz : s.partition.sizes())
    any_empty = any_empty || sz == 0;
  s.dunn = any_empty ? std::nan("") : dunn_index(s.partition, d);
  s.report = membership_report(s.fit.memberships, s.partition);
  s.summary = summarize_clusters(derived.bursts, s.partition);
  return s;
}

/// Runs the analysis in memory from an already-loaded catalog.
inline StudyResult analyze_catalog(CatalogLoad load, const RunConfig& cfg) {
  StudyResult res;
  res.load = std::move(load);
  res.derived = derive_features(res.load.records);
  if (res.derived.bursts.empty())
    throw Error("no bursts with finite values on all six variables");
  FeatureTable features = res.derived.feature_table();
  if (cfg.standardize)
    features = standardize_columns(features);

  const std::size_t n = features.rows();
  if (cfg.k_list.empty())
    throw Error("k list is empty");
  for (int k : cfg.k_list)
    if (k < 2 || static_cast<std::size_t>(k) >= n)
      throw Error("k=" + std::to_string(k) + " outside [2, N-1] with N=" +
                  std::to_string(n));
  if (cfg.conn_l < 1 || cfg.conn_l >= n)
    throw Error("connectivity L=" + std::to_string(cfg.conn_l) +
                " outside [1, N-1]");

  const DistanceMatrix d = euclidean_distance_matrix(features);

  std::vector<std::future<KSolution>> jobs;
  for (int k : cfg.k_list)
    jobs.push_back(std::async(std::launch::async, [&, k] {
      return solve_for_k(d, res.derived, cfg, k);
    }));
  for (auto& j : jobs)
    res.solutions.push_back(j.get());

  const KSolution* s3 = res.solution(3);
  const KSolution* s5 = res.solution(5);
  if (s3)
    res.pca = membership_pca(s3->fit.memberships, PcaOptions{});
  if (s3 && s5)
    res.crosstab_5x3 = cross_tabulate(s5->partition, s3->partition);
  return res;
}

inline StudyResult analyze(const RunConfig& cfg) {
  return analyze_catalog(load_catalog(cfg.input), cfg);
}

/// File name -> content, ordered by name.
using Artifacts = std::map<std::string, std::string>;

namespace detail {

inline std::string g6(double v) {
  if (std::isinf(v))
    return v > 0 ? "inf" : "-inf";
  if (std::isnan(v))
    return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::string fixed(double v, int decimals) {
  if (std::isinf(v))
    return v > 0 ? "inf" : "-inf";
  if (std::isnan(v))
    return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

inline std::string full(double v) {
  if (std::isinf(v))
    return v > 0 ? "inf" : "-inf";
  if (std::isnan(v))
    return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline std::string id_of(const StudyResult& res, std::size_t i) {
  return std::to_string(res.derived.bursts[i].raw.trigger_id);
}

inline std::string scatter_tsv(const StudyResult& res, const KSolution& s,
                               std::size_t feature, const char* name,
                               bool with_reference) {
  std::string out = "trigger_id\tlog10_t90\t";
  out += name;
  out += "\tlabel";
  if (with_reference)
    out += "\tref_log10_t90";
  out += "\n";
  const std::string ref = g6(std::log10(2.0));
  for (std::size_t i = 0; i < res.derived.bursts.size(); ++i) {
    const auto& f = res.derived.bursts[i].features;
    out += id_of(res, i) + "\t" + g6(f[1]) + "\t" + g6(f[feature]) + "\t" +
           std::to_string(s.partition[i]);
    if (with_reference)
      out += "\t" + ref;
    out += "\n";
  }
  return out;
}

inline void add_solution_files(Artifacts& files, const StudyResult& res,
                               const KSolution& s, const RunConfig& cfg) {
  const std::string suffix = "_k" + std::to_string(s.k) + ".";
  const std::size_t n = res.derived.bursts.size();
  const auto& m = s.fit.memberships;

  std::string mem = "trigger_id";
  for (int c = 1; c <= s.k; ++c)
    mem += ",m" + std::to_string(c);
  mem += "\n";
  for (std::size_t i = 0; i < n; ++i) {
    mem += id_of(res, i);
    for (std::size_t c = 0; c < m.k(); ++c)
      mem += "," + g6(m(i, c));
    mem += "\n";
  }
  files["memberships" + suffix + "csv"] = std::move(mem);

  std::string lab = "trigger_id,label\n";
  for (std::size_t i = 0; i < n; ++i)
    lab += id_of(res, i) + "," + std::to_string(s.partition[i]) + "\n";
  files["hard_labels" + suffix + "csv"] = std::move(lab);

  std::string sum = "cluster,size,percent";
  for (auto name : kSummaryNames)
    sum += "," + std::string(name) + "_mean," + std::string(name) + "_se";
  sum += "\n";
  for (const auto& row : s.summary) {
    sum += std::to_string(row.cluster) + "," + std::to_string(row.size) + "," +
           g6(row.percent);
    for (std::size_t v = 0; v < kSummaryNames.size(); ++v) {
      if (row.stats)
        sum += "," + g6((*row.stats)[v].mean) + "," + g6((*row.stats)[v].se);
      else
        sum += ",,";
    }
    sum += "\n";
  }
  files["summary" + suffix + "csv"] = std::move(sum);

  std::string rep = "cluster,size,mean,median,mean_percent,median_x100,"
                    "below_half,below_half_percent\n";
  for (const auto& c : s.report.clusters) {
    const double pct = c.size == 0 ? 0.0
                                   : 100.0 * static_cast<double>(c.below_half) /
                                         static_cast<double>(c.size);
    rep += std::to_string(c.cluster) + "," + std::to_string(c.size) + "," +
           g6(c.mean) + "," + g6(c.median) + "," + g6(100.0 * c.mean) + "," +
           g6(100.0 * c.median) + "," + std::to_string(c.below_half) + "," +
           g6(pct) + "\n";
  }
  rep += "total," + std::to_string(s.report.n) + ",,,,," +
         std::to_string(s.report.below_half) + "," +
         g6(s.report.below_half_percent) + "\n";
  files["membership_report" + suffix + "csv"] = std::move(rep);

  std::string idx;
  idx += "k=" + std::to_string(s.k) + "\n";
  idx += "n=" + std::to_string(n) + "\n";
  idx += "r=" + full(cfg.r) + "\n";
  idx += "objective=" + full(s.fit.objective()) + "\n";
  idx += "iterations=" + std::to_string(s.fit.n_iter) + "\n";
  idx += std::string("converged=") + (s.fit.converged ? "true" : "false") +
         "\n";
  idx += "n_dpc=" + full(s.fit.n_dpc) + "\n";
  idx += "n_dpc_x1e3=" + fixed(1e3 * s.fit.n_dpc, 3) + "\n";
  idx += "connectivity_l=" + std::to_string(cfg.conn_l) + "\n";
  idx += "connectivity=" + full(s.connectivity) + "\n";
  idx += "connectivity_3dp=" + fixed(s.connectivity, 3) + "\n";
  idx += "dunn=" + full(s.dunn) + "\n";
  idx += "below_half=" + std::to_string(s.report.below_half) + "\n";
  idx += "below_half_percent=" + fixed(s.report.below_half_percent, 3) + "\n";
  for (const auto& c : s.report.clusters) {
    const std::string tag = "cluster" + std::to_string(c.cluster);
    idx += tag + "_size=" + std::to_string(c.size) + "\n";
    idx += tag + "_membership_mean_percent=" + fixed(100.0 * c.mean, 3) + "\n";
    idx += tag + "_membership_median_x100=" + fixed(100.0 * c.median, 3) + "\n";
  }
  files["indices" + suffix + "txt"] = std::move(idx);
}

} // namespace detail

/// Renders every output file of the study into memory.
inline Artifacts render_artifacts(const StudyResult& res, const RunConfig& cfg) {
  using namespace detail;
  Artifacts files;
  files["run_config.txt"] = format_config(cfg, false);
  files["exclusions.log"] = format_exclusion_log(res.derived.exclusions);

  for (const auto& s : res.solutions)
    add_solution_files(files, res, s, cfg);

  if (res.crosstab_5x3) {
    const CrossTab& t = *res.crosstab_5x3;
    std::string out = "cluster";
    for (std::size_t c = 1; c <= t.cols(); ++c)
      out += ",C" + std::to_string(c) + ",C" + std::to_string(c) + "_percent";
    out += ",total,total_percent\n";
    for (std::size_t g = 0; g < t.rows(); ++g) {
      out += "G" + std::to_string(g + 1);
      long total = 0;
      for (std::size_t c = 0; c < t.cols(); ++c) {
        out += "," + std::to_string(t.counts[g][c]) + "," +
               fixed(t.row_percentages[g][c], 3);
        total += t.counts[g][c];
      }
      out += "," + std::to_string(total) + "," +
             fixed(total > 0 ? 100.0 : 0.0, 3) + "\n";
    }
    files["crosstab_3x5.csv"] = std::move(out);
  }

  if (const KSolution* s3 = res.solution(3)) {
    files["fig1.tsv"] = scatter_tsv(res, *s3, 3, "log10_ft", true);
    files["fig2.tsv"] = scatter_tsv(res, *s3, 4, "log10_h32", false);

    // Objects grouped by assigned cluster, each block sorted by decreasing
    // membership in that cluster.
    const auto& m = s3->fit.memberships;
    std::string f5 = "cluster\trank\ttrigger_id\tmembership";
    for (std::size_t c = 1; c <= m.k(); ++c)
      f5 += "\tm" + std::to_string(c);
    f5 += "\n";
    for (int c = 1; c <= s3->k; ++c) {
      std::vector<std::size_t> members;
      for (std::size_t i = 0; i < m.n(); ++i)
        if (s3->partition[i] == c)
          members.push_back(i);
      const auto col = static_cast<std::size_t>(c - 1);
      std::stable_sort(members.begin(), members.end(),
                       [&](std::size_t a, std::size_t b) {
                         return m(a, col) > m(b, col);
                       });
      for (std::size_t r = 0; r < members.size(); ++r) {
        const std::size_t i = members[r];
        f5 += std::to_string(c) + "\t" + std::to_string(r + 1) + "\t" +
              id_of(res, i) + "\t" + g6(m(i, col));
        for (std::size_t v = 0; v < m.k(); ++v)
          f5 += "\t" + g6(m(i, v));
        f5 += "\n";
      }
    }
    files["fig5.tsv"] = std::move(f5);

    if (res.pca) {
      const PcaResult& p = *res.pca;
      std::string sc = "trigger_id";
      for (std::size_t c = 1; c <= p.k; ++c)
        sc += ",pc" + std::to_string(c);
      sc += ",label\n";
      for (std::size_t i = 0; i < p.n; ++i) {
        sc += id_of(res, i);
        for (std::size_t c = 0; c < p.k; ++c)
          sc += "," + g6(p.score(i, c));
        sc += "," + std::to_string(s3->partition[i]) + "\n";
      }
      files["pca_scores.csv"] = std::move(sc);

      std::string var = "component,eigenvalue,fraction_of_all,"
                        "fraction_of_nondegenerate\n";
      for (std::size_t c = 0; c < p.k; ++c)
        var += "pc" + std::to_string(c + 1) + "," + g6(p.eigenvalues[c]) +
               "," + g6(p.explained_fraction[c]) + "," +
               g6(p.explained_fraction_nondegenerate[c]) + "\n";
      files["pca_variance.csv"] = std::move(var);

      std::string f6 = "pc1\tpc2\tlabel\n";
      for (const auto& pt : emit_pc_scatter(p, s3->partition))
        f6 += g6(pt.pc1) + "\t" + g6(pt.pc2) + "\t" +
              std::to_string(pt.label) + "\n";
      files["fig6.tsv"] = std::move(f6);
    }
  }

  if (const KSolution* s5 = res.solution(5)) {
    files["fig3.tsv"] = scatter_tsv(res, *s5, 3, "log10_ft", true);
    files["fig4.tsv"] = scatter_tsv(res, *s5, 4, "log10_h32", false);
  }
  return files;
}

/// Writes all files or none: anything already written is removed when a
/// later write fails.
inline void write_artifacts(const std::filesystem::path& outdir,
                            const Artifacts& files) {
  namespace fs = std::filesystem;
  fs::create_directories(outdir);
  std::vector<fs::path> written;
  try {
    for (const auto& [name, content] : files) {
      const fs::path path = outdir / name;
      std::ofstream out(path, std::ios::binary | std::ios::trunc);
      if (!out)
        throw Error("cannot write '" + path.string() + "'");
      written.push_back(path);
      out.write(content.data(), static_cast<std::streamsize>(content.size()));
      out.close();
      if (!out)
        throw Error("failed writing '" + path.string() + "'");
    }
  } catch (...) {
    std::error_code ec;
    for (const auto& p : written)
      fs::remove(p, ec);
    throw;
  }
}

/// Full study: analyze, render, write. Returns a process exit code; errors
/// are reported on `err`.
inline int run_study(const RunConfig& cfg, std::ostream& err) {
  try {
    if (cfg.outdir.empty())
      throw Error("no output directory (use --outdir or FUZZYBURST_OUTDIR)");
    const StudyResult res = analyze(cfg);
    write_artifacts(cfg.outdir, render_artifacts(res, cfg));
    return 0;
  } catch (const InputFileError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

} // namespace fuzzyburst
