// fuzzyburst: fuzzy clustering study of a burst catalog.
//
//   fuzzyburst --input catalog.csv --outdir out/ [--k 3,5] [--r 1.3] ...

#include "fuzzyburst/study.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>

int main(int argc, char** argv) {
  fuzzyburst::RunConfig cfg;
  std::string init = "seeded-random";
  bool show_version = false;

  CLI::App app{"Fuzzy (FANNY) clustering study of a gamma-ray burst catalog"};
  app.option_defaults()->always_capture_default();
  app.allow_windows_style_options(false);
  app.add_option("--input", cfg.input, "catalog CSV (trigger_id,t50,t90,f1,f2,"
                                       "f3,f4,p64,p256,p1024)");
  app.add_option("--outdir", cfg.outdir, "output directory")
      ->envname("FUZZYBURST_OUTDIR");
  app.add_option("--k", cfg.k_list, "cluster counts, comma separated")
      ->delimiter(',');
  app.add_option("--r", cfg.r, "fuzzifier, > 1");
  app.add_option("--tol", cfg.tol, "relative objective change threshold");
  app.add_option("--max-iter", cfg.max_iter, "maximum sweeps per solve");
  app.add_option("--seed", cfg.seed, "seed for seeded-random initialization");
  app.add_option("--starts", cfg.starts,
                 "independent starts per K; the lowest objective is kept")
      ->check(CLI::PositiveNumber);
  app.add_option("--init", init, "seeded-random | deterministic-stripes")
      ->check(CLI::IsMember({"seeded-random", "deterministic-stripes"}));
  app.add_option("--conn-l", cfg.conn_l, "connectivity index neighbour count");
  app.add_flag("--standardize", cfg.standardize,
               "standardize feature columns before computing distances");
  app.add_flag("--version", show_version,
               "print version and effective configuration, then exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return 2;
  }
  cfg.init = fuzzyburst::parse_init_mode(init);

  const std::string config_text = fuzzyburst::print_version_and_config(cfg);
  if (show_version) {
    std::cout << config_text;
    return 0;
  }
  if (cfg.input.empty()) {
    std::cerr << "error: --input is required\n" << app.help();
    return 2;
  }
  std::cout << config_text;
  const int rc = fuzzyburst::run_study(cfg, std::cerr);
  if (rc == 0)
    std::cout << "wrote outputs to " << cfg.outdir << "\n";
  return rc;
}
