// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: generate benchmark instances, solve them exactly,
// and run the seeded two-method benchmark protocol with CSV output.

#include <atomic>
#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "l0bnb/bnb.hpp"
#include "l0bnb/datagen.hpp"
#include "l0bnb/io.hpp"

namespace {

using namespace l0bnb;

int run_gen(const std::string& setup, int m, int n, int k, std::uint64_t seed,
            double sinc_width, const std::string& out_path) {
  try {
    GenSpec spec;
    spec.setup = setup_from_string(setup);
    spec.m = m;
    spec.n = n;
    spec.k = k;
    spec.seed = seed;
    spec.sinc_width = sinc_width;
    const GeneratedInstance gen = generate(spec);
    write_instance(out_path, gen);
    std::cout << "lambda " << format_double(gen.instance.lambda()) << '\n'
              << "M " << format_double(gen.instance.big_m()) << '\n'
              << "sigma " << format_double(gen.sigma) << '\n';
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << '\n';
    return 1;
  }
  return 0;
}

int run_solve(const std::string& instance_path, bool screening_on,
              double time_limit, double tol, bool trace) {
  std::optional<InstanceData> data;
  try {
    data = read_instance(instance_path);
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << '\n';
    return 1;
  }

  SolverConfig config;
  config.screening_enabled = screening_on;
  config.time_limit_seconds = time_limit;
  config.gap_tolerance = tol;
  if (trace) config.trace = &std::cerr;

  try {
    const auto [solution, stats] = solve(data->instance, config);
    std::cout << "objective " << format_double(solution.objective) << '\n'
              << "nodes_processed " << stats.nodes_processed << '\n'
              << "nodes_screened_out " << stats.nodes_screened_out << '\n'
              << "variables_fixed_by_screening "
              << stats.variables_fixed_by_screening << '\n'
              << "time_seconds " << format_double(stats.wall_time_seconds)
              << '\n'
              << "optimal " << (solution.optimal ? "true" : "false") << '\n';
    return stats.timed_out ? 2 : 0;
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << '\n';
    return 1;
  }
}

struct BenchRecord {
  int k = 0;
  std::uint64_t seed = 0;
  std::string method;
  long nodes = 0;
  double time_seconds = 0.0;
  bool failed = false;
  double objective = 0.0;
};

int run_bench(const std::string& setup_name, int m, int n,
              const std::vector<int>& ks, int trials, std::uint64_t seed0,
              double time_limit, const std::string& out_path, int parallel) {
  Setup setup;
  try {
    setup = setup_from_string(setup_name);
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << '\n';
    return 1;
  }
  if (trials < 1) {
    std::cerr << "error: trials must be at least 1\n";
    return 1;
  }

  // Two methods per generated instance; slots are preassigned so the record
  // order (k, trial, method) is identical no matter how trials are scheduled.
  const std::vector<std::pair<std::string, bool>> methods = {
      {"bnb", false}, {"bnb_scr", true}};
  std::vector<BenchRecord> records(ks.size() * static_cast<std::size_t>(trials) *
                                   methods.size());
  std::mutex error_mutex;
  std::string first_error;

  auto run_trial = [&](std::size_t k_index, int trial) {
    const std::uint64_t seed = seed0 + static_cast<std::uint64_t>(trial);
    try {
      GenSpec spec;
      spec.setup = setup;
      spec.m = m;
      spec.n = n;
      spec.k = ks[k_index];
      spec.seed = seed;
      const GeneratedInstance gen = generate(spec);
      for (std::size_t mi = 0; mi < methods.size(); ++mi) {
        SolverConfig config;
        config.screening_enabled = methods[mi].second;
        config.time_limit_seconds = time_limit;
        const auto [solution, stats] = solve(gen.instance, config);
        BenchRecord& record =
            records[(k_index * static_cast<std::size_t>(trials) +
                     static_cast<std::size_t>(trial)) *
                        methods.size() +
                    mi];
        record.k = ks[k_index];
        record.seed = seed;
        record.method = methods[mi].first;
        record.nodes = stats.nodes_processed;
        record.time_seconds = stats.wall_time_seconds;
        record.failed = stats.timed_out;
        record.objective = solution.objective;
      }
    } catch (const std::exception& error) {
      const std::scoped_lock lock(error_mutex);
      if (first_error.empty()) first_error = error.what();
    }
  };

  const std::size_t total = ks.size() * static_cast<std::size_t>(trials);
  if (parallel <= 1) {
    for (std::size_t ki = 0; ki < ks.size(); ++ki) {
      for (int trial = 0; trial < trials; ++trial) run_trial(ki, trial);
    }
  } else {
    std::atomic<std::size_t> cursor{0};
    std::vector<std::thread> workers;
    const int worker_count = std::min<std::size_t>(
        static_cast<std::size_t>(parallel), total);
    for (int w = 0; w < worker_count; ++w) {
      workers.emplace_back([&] {
        for (;;) {
          const std::size_t task = cursor.fetch_add(1);
          if (task >= total) return;
          run_trial(task / static_cast<std::size_t>(trials),
                    static_cast<int>(task % static_cast<std::size_t>(trials)));
        }
      });
    }
    for (auto& worker : workers) worker.join();
  }
  if (!first_error.empty()) {
    std::cerr << "error: " << first_error << '\n';
    return 1;
  }

  std::ostringstream csv;
  csv << "setup,m,n,k,seed,method,nodes,time_seconds,failed,objective\n";
  for (const BenchRecord& record : records) {
    csv << setup_name << ',' << m << ',' << n << ',' << record.k << ','
        << record.seed << ',' << record.method << ',' << record.nodes << ','
        << format_double(record.time_seconds) << ','
        << (record.failed ? "true" : "false") << ','
        << format_double(record.objective) << '\n';
  }
  // Footer: one aggregate row per (k, method) with mean nodes, mean time,
  // failure count, mean objective; the seed column carries the marker.
  for (std::size_t ki = 0; ki < ks.size(); ++ki) {
    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
      double node_sum = 0.0;
      double time_sum = 0.0;
      double objective_sum = 0.0;
      long failures = 0;
      for (int trial = 0; trial < trials; ++trial) {
        const BenchRecord& record =
            records[(ki * static_cast<std::size_t>(trials) +
                     static_cast<std::size_t>(trial)) *
                        methods.size() +
                    mi];
        node_sum += static_cast<double>(record.nodes);
        time_sum += record.time_seconds;
        objective_sum += record.objective;
        if (record.failed) ++failures;
      }
      csv << setup_name << ',' << m << ',' << n << ',' << ks[ki]
          << ",aggregate," << methods[mi].first << ','
          << format_double(node_sum / trials) << ','
          << format_double(time_sum / trials) << ',' << failures << ','
          << format_double(objective_sum / trials) << '\n';
      std::cout << "k " << ks[ki] << ' ' << methods[mi].first << " mean_nodes "
                << node_sum / trials << " mean_time " << time_sum / trials
                << " failures " << failures << '\n';
    }
  }

  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) {
    std::cerr << "error: cannot open '" << out_path << "' for writing\n";
    return 1;
  }
  const std::string text = csv.str();
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  if (!out) {
    std::cerr << "error: write failed for '" << out_path << "'\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact solver for cardinality-penalized box-constrained "
               "least squares"};
  app.require_subcommand(1);

  std::string setup = "gaussian";
  int m = 0;
  int n = 0;
  int k = 0;
  std::uint64_t seed = 0;
  double sinc_width = 0.0;
  std::string out_path;

  CLI::App* gen = app.add_subcommand("gen", "generate one instance file");
  gen->add_option("--setup", setup, "gaussian or toeplitz")
      ->check(CLI::IsMember({"gaussian", "toeplitz"}))
      ->required();
  gen->add_option("--m", m, "rows")->required();
  gen->add_option("--n", n, "columns")->required();
  gen->add_option("--k", k, "planted support size")->required();
  gen->add_option("--seed", seed, "generator seed")->required();
  gen->add_option("--sinc-width", sinc_width,
                  "toeplitz sinc width (default m/50)");
  gen->add_option("--out", out_path, "output instance file")->required();

  std::string instance_path;
  std::string screening = "on";
  double time_limit = 1000.0;
  double tol = 1e-6;
  bool trace = false;

  CLI::App* solve_cmd =
      app.add_subcommand("solve", "solve one instance to optimality");
  solve_cmd->add_option("--instance", instance_path, "instance file")
      ->required();
  solve_cmd->add_option("--screening", screening, "node screening on|off")
      ->check(CLI::IsMember({"on", "off"}));
  solve_cmd->add_option("--time-limit", time_limit, "seconds before giving up");
  solve_cmd->add_option("--tol", tol, "absolute optimality tolerance");
  solve_cmd->add_flag("--trace", trace, "per-node log on standard error");

  std::vector<int> ks;
  int trials = 0;
  std::uint64_t seed0 = 0;
  int parallel = 1;
  std::string csv_path;

  CLI::App* bench = app.add_subcommand(
      "bench", "run the seeded two-method benchmark, write CSV");
  bench->add_option("--setup", setup, "gaussian or toeplitz")
      ->check(CLI::IsMember({"gaussian", "toeplitz"}))
      ->required();
  bench->add_option("--m", m, "rows")->required();
  bench->add_option("--n", n, "columns")->required();
  bench->add_option("--k", ks, "comma-separated sparsity list")
      ->required()
      ->delimiter(',');
  bench->add_option("--trials", trials, "instances per k")->required();
  bench->add_option("--seed0", seed0, "seed of the first trial")->required();
  bench->add_option("--time-limit", time_limit, "per-solve limit in seconds");
  bench->add_option("--parallel", parallel,
                    "worker threads across trials (each solve stays "
                    "single-threaded)");
  bench->add_option("--out", csv_path, "output CSV file")->required();

  CLI11_PARSE(app, argc, argv);

  if (gen->parsed()) {
    return run_gen(setup, m, n, k, seed, sinc_width, out_path);
  }
  if (solve_cmd->parsed()) {
    return run_solve(instance_path, screening == "on", time_limit, tol, trace);
  }
  return run_bench(setup, m, n, ks, trials, seed0, time_limit, csv_path,
                   parallel);
}
