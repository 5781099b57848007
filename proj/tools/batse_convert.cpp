// batse_convert: joins the BATSE current-catalog flux and duration tables
// into the CSV layout read by fuzzyburst.
//
// Expected whitespace-separated layouts (lines not starting with an integer
// trigger number are skipped):
//
//   duration_table.txt  trig  T90  T90_err  T90_start  T50  T50_err  T50_start
//   flux_table.txt      trig  F1 F1_err  F2 F2_err  F3 F3_err  F4 F4_err
//                       P64 P64_err P64_time  P256 P256_err P256_time
//                       P1024 P1024_err P1024_time
//
// Triggers present in only one table are written with the other table's
// fields left blank.

#include <CLI11.hpp>

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace {

using Table = std::map<std::int64_t, std::vector<std::string>>;

Table read_table(const std::string& path, std::size_t min_fields) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open '" + path + "'");
  Table t;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::vector<std::string> fields;
    for (std::string tok; ss >> tok;)
      fields.push_back(tok);
    if (fields.empty())
      continue;
    char* end = nullptr;
    const long long trig = std::strtoll(fields[0].c_str(), &end, 10);
    if (*end != '\0')
      continue;
    if (fields.size() < min_fields)
      throw std::runtime_error(path + ": trigger " + fields[0] + " has " +
                               std::to_string(fields.size()) +
                               " fields, expected " +
                               std::to_string(min_fields));
    t[trig] = std::move(fields);
  }
  return t;
}

std::string field(const Table& t, std::int64_t trig, std::size_t col) {
  const auto it = t.find(trig);
  return it == t.end() ? std::string() : it->second[col];
}

} // namespace

int main(int argc, char** argv) {
  std::string flux_path, duration_path, output_path;
  CLI::App app{"Convert BATSE flux and duration tables to fuzzyburst CSV"};
  app.add_option("--flux", flux_path, "flux_table.txt")->required();
  app.add_option("--duration", duration_path, "duration_table.txt")->required();
  app.add_option("--output", output_path, "output CSV")->required();
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    const Table flux = read_table(flux_path, 18);
    const Table dur = read_table(duration_path, 7);
    std::map<std::int64_t, bool> triggers;
    for (const auto& [k, v] : flux)
      triggers[k] = true;
    for (const auto& [k, v] : dur)
      triggers[k] = true;

    std::ofstream out(output_path, std::ios::binary);
    if (!out)
      throw std::runtime_error("cannot write '" + output_path + "'");
    out << "trigger_id,t50,t90,f1,f2,f3,f4,p64,p256,p1024\n";
    for (const auto& [trig, unused] : triggers) {
      out << trig << ',' << field(dur, trig, 4) << ',' << field(dur, trig, 1)
          << ',' << field(flux, trig, 1) << ',' << field(flux, trig, 3) << ','
          << field(flux, trig, 5) << ',' << field(flux, trig, 7) << ','
          << field(flux, trig, 9) << ',' << field(flux, trig, 12) << ','
          << field(flux, trig, 15) << '\n';
    }
    std::cout << "wrote " << triggers.size() << " triggers to " << output_path
              << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
