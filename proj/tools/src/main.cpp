#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include "rfq/oracle.hpp"
#include "rfq/range_index.hpp"
#include "rfq_cli/bench.hpp"
#include "rfq_cli/script.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kDiverged = 1;
constexpr int kUsage = 2;

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw rfq::cli::InputError(0, "cannot open '" + path + "'");
  return in;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Range frequency queries over a dynamic array of colors"};
  std::string input;
  std::string script;
  bool verify = false;
  bool bench = false;
  std::vector<std::size_t> sizes{512, 4096, 32768};
  std::uint64_t seed = 1;
  unsigned sampler_c = 2;
  std::string csv;
  std::size_t ops = 0;
  std::size_t max_n = 4096;

  app.add_option("--input", input, "Array file: whitespace-separated decimal color ids");
  app.add_option("--script", script, "Operation script, one command per line");
  app.add_flag("--verify", verify,
               "Check every answer against a brute-force reference; without --script, run a "
               "seeded random workload");
  app.add_flag("--bench", bench, "Time every operation at each of --sizes");
  app.add_option("--sizes", sizes, "Array sizes for --bench")->delimiter(',')->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "Seed for random workloads and the samplers");
  app.add_option("--sampler-c", sampler_c, "Sampler failure exponent")->check(CLI::PositiveNumber);
  app.add_option("--csv", csv, "Write benchmark rows to this file instead of stdout");
  app.add_option("--ops", ops, "Operations per workload (verify: 10000, bench: 200)");
  app.add_option("--max-n", max_n, "Largest array size of the --verify workload")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (bench) {
      rfq::cli::BenchConfig config;
      config.sizes = sizes;
      config.seed = seed;
      config.sampler_c = sampler_c;
      if (ops != 0) config.ops = ops;
      const auto rows = rfq::cli::run_bench(config);
      if (csv.empty()) {
        rfq::cli::write_csv(std::cout, rows);
      } else {
        std::ofstream out(csv);
        if (!out) throw rfq::cli::InputError(0, "cannot write '" + csv + "'");
        rfq::cli::write_csv(out, rows);
        std::cout << "wrote " << rows.size() << " rows to " << csv << '\n';
      }
      return kOk;
    }

    if (!script.empty()) {
      std::vector<rfq::ColorId> values;
      if (!input.empty()) {
        auto in = open_or_throw(input);
        values = rfq::cli::parse_array(in);
      }
      auto in = open_or_throw(script);
      const rfq::cli::OpScript commands = rfq::cli::parse_script(in);
      rfq::Params params;
      params.seed = seed;
      params.sampler_c = sampler_c;
      rfq::RangeFrequencyIndex index(values, params);
      const auto result = rfq::cli::run_script(index, commands, std::cout, verify);
      if (result.divergences != 0) {
        std::cerr << result.divergences << " divergence(s); first at " << result.first_divergence << '\n';
        return kDiverged;
      }
      if (verify) std::cerr << "verified " << commands.size() << " commands\n";
      return kOk;
    }

    if (verify) {
      rfq::DiffConfig config;
      config.seed = seed;
      config.ops = ops != 0 ? ops : 10000;
      config.max_n = max_n;
      config.verify_every = 100;
      config.params.sampler_c = sampler_c;
      const rfq::DiffReport report = rfq::differential_run(config);
      std::cout << "seed=" << seed << " ops=" << report.ops_run << " queries=" << report.queries
                << " updates=" << report.updates << " initial_n=" << report.initial_size
                << " colors=" << report.colors << " divergences=" << report.divergences
                << " sampling_failures=" << report.sampling_failures
                << " recounts=" << report.structure_checks << '\n';
      if (!report.passed) {
        std::cerr << "first divergence: " << report.first_divergence << '\n';
        return kDiverged;
      }
      return kOk;
    }

    std::cerr << "nothing to do: give --script, --verify or --bench\n" << app.help();
    return kUsage;
  } catch (const rfq::cli::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
}
