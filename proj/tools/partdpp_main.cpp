// Command-line front end: sampling, MAP inference, partition-function
// queries, and the timing benchmark. Matrices come in as headerless CSV,
// partitions as JSON {"part_of":[...1-based labels...],"quotas":[...]}.
// Every output record is a single JSON line with numbers printed to 17
// significant digits so a re-read round-trips bit-exactly.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "partdpp/charpoly.hpp"
#include "partdpp/map_inference.hpp"
#include "partdpp/matrix.hpp"
#include "partdpp/oracle.hpp"
#include "partdpp/rng.hpp"
#include "partdpp/sampler.hpp"

namespace {

using json = nlohmann::json;

constexpr int kExitInvalidInput = 2;
constexpr int kExitNumerical = 3;

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_index_array(const std::vector<dpp::Index>& xs, dpp::Index offset = 0) {
  std::string out = "[";
  for (size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(xs[i] + offset);
  }
  return out + "]";
}

dpp::RowMatrixXd read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw dpp::InvalidInput("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        size_t used = 0;
        row.push_back(std::stod(cell, &used));
      } catch (...) {
        throw dpp::InvalidInput(path + ": cannot parse '" + cell + "' as a number");
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw dpp::InvalidInput(path + ": ragged rows (line " +
                              std::to_string(rows.size() + 1) + ")");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw dpp::InvalidInput(path + ": no data rows");
  dpp::RowMatrixXd m(static_cast<dpp::Index>(rows.size()),
                     static_cast<dpp::Index>(rows.front().size()));
  for (size_t i = 0; i < rows.size(); ++i) {
    for (size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<dpp::Index>(i), static_cast<dpp::Index>(j)) = rows[i][j];
    }
  }
  return m;
}

void write_csv(const std::string& path, const Eigen::MatrixXd& m) {
  std::ofstream out(path);
  if (!out) throw dpp::InvalidInput("cannot open " + path + " for writing");
  for (dpp::Index i = 0; i < m.rows(); ++i) {
    for (dpp::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << fmt_double(m(i, j));
    }
    out << '\n';
  }
}

// --partition accepts a file path or inline JSON (detected by '{').
dpp::PartitionSpec read_partition(const std::string& spec, dpp::Index m) {
  json j;
  try {
    if (!spec.empty() && spec.front() == '{') {
      j = json::parse(spec);
    } else {
      std::ifstream in(spec);
      if (!in) throw dpp::InvalidInput("cannot open partition spec " + spec);
      j = json::parse(in);
    }
  } catch (const json::parse_error& e) {
    throw dpp::InvalidInput(std::string("partition spec is not valid JSON: ") + e.what());
  }
  if (!j.contains("part_of") || !j.contains("quotas")) {
    throw dpp::InvalidInput("partition spec needs 'part_of' and 'quotas'");
  }
  std::vector<dpp::Index> labels = j["part_of"].get<std::vector<dpp::Index>>();
  std::vector<dpp::Index> quotas = j["quotas"].get<std::vector<dpp::Index>>();
  if (static_cast<dpp::Index>(labels.size()) != m) {
    throw dpp::InvalidInput("part_of has " + std::to_string(labels.size()) +
                            " labels but the matrix has " + std::to_string(m) + " items");
  }
  dpp::Index p = 0;
  for (dpp::Index& l : labels) {
    if (l < 1) throw dpp::InvalidInput("part labels are 1-based");
    p = std::max(p, l);
    l -= 1;
  }
  if (static_cast<dpp::Index>(quotas.size()) != p) {
    throw dpp::InvalidInput("quotas has " + std::to_string(quotas.size()) +
                            " entries but labels go up to " + std::to_string(p));
  }
  return dpp::PartitionSpec(std::move(labels), std::move(quotas));
}

struct RunConfig {
  std::string input;
  std::string kind = "features";
  std::string partition;  // path or inline JSON; empty = none
  dpp::Index k = 0;
  double eps = 0.1;
  std::uint64_t seed = 0;
  dpp::Index num_samples = 1;
  std::string out;
  std::string dump_kernel;
  std::string grid;
};

// Feature matrix for the computation plus the kernel actually used
// (gram of features, or the parsed kernel).
struct LoadedInstance {
  dpp::FeatureMatrix features;
  dpp::Kernel kernel;
};

LoadedInstance load_instance(const RunConfig& cfg) {
  dpp::RowMatrixXd raw = read_csv(cfg.input);
  if (cfg.kind == "features") {
    dpp::FeatureMatrix a(std::move(raw));
    return LoadedInstance{a, dpp::gram(a)};
  }
  if (cfg.kind == "kernel") {
    Eigen::MatrixXd dense = raw;
    dpp::Kernel k(std::move(dense));
    return LoadedInstance{dpp::factor_kernel(k), k};
  }
  throw dpp::InvalidInput("--kind must be 'features' or 'kernel'");
}

std::ostream& open_output(const RunConfig& cfg, std::ofstream& file) {
  if (cfg.out.empty()) return std::cout;
  file.open(cfg.out);
  if (!file) throw dpp::InvalidInput("cannot open " + cfg.out + " for writing");
  return file;
}

int cmd_sample(const RunConfig& cfg) {
  if (cfg.num_samples < 1) throw dpp::InvalidInput("--n must be at least 1");
  const LoadedInstance inst = load_instance(cfg);
  if (!cfg.dump_kernel.empty()) write_csv(cfg.dump_kernel, inst.kernel.data());
  const dpp::Index m = inst.features.rows();

  dpp::PartitionSpec part = cfg.partition.empty()
                                ? dpp::PartitionSpec::single_part(m, cfg.k)
                                : read_partition(cfg.partition, m);
  if (cfg.partition.empty()) {
    if (cfg.k < 1) throw dpp::InvalidInput("--k is required without a partition");
  } else if (cfg.k != 0 && cfg.k != part.total_quota()) {
    throw dpp::InvalidInput("--k disagrees with the quota total");
  }

  const dpp::Index n = cfg.num_samples;
  std::vector<std::string> lines(static_cast<size_t>(n));
  std::exception_ptr failure;
  // Independent samples run concurrently on derived seeds; each sample's
  // own candidate loop stays serial then, which keeps output bytes
  // identical for every DPP_THREADS setting.
  const dpp::Exec inner = n > 1 ? dpp::Exec::Serial : dpp::Exec::Parallel;
  const bool parallel = n > 1;
#pragma omp parallel for schedule(dynamic) num_threads(dpp::max_threads()) if (parallel)
  for (dpp::Index j = 0; j < n; ++j) {
    try {
      const dpp::RngSeed seed =
          dpp::derive_seed(dpp::RngSeed{cfg.seed}, static_cast<std::uint64_t>(j));
      const dpp::Subset s =
          cfg.partition.empty()
              ? dpp::sample_kdpp(inst.features, cfg.k, seed, inner)
              : dpp::sample_partition_dpp(inst.features, part, seed, inner);
      const dpp::Subset sorted = s.sorted();
      std::vector<dpp::Index> counts(static_cast<size_t>(part.num_parts()), 0);
      for (dpp::Index i : sorted.indices) ++counts[static_cast<size_t>(part.part_of(i))];
      const double log_det =
          std::log(dpp::principal_minor_det(inst.kernel, sorted));
      std::string line = "{\"sample_index\":" + std::to_string(j) +
                         ",\"subset\":" + fmt_index_array(sorted.indices, 1) +
                         ",\"log_det\":" + fmt_double(log_det) +
                         ",\"part_counts\":" + fmt_index_array(counts) + "}";
      lines[static_cast<size_t>(j)] = std::move(line);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  std::ofstream file;
  std::ostream& out = open_output(cfg, file);
  for (const std::string& line : lines) out << line << '\n';
  return 0;
}

int cmd_map(const RunConfig& cfg) {
  const LoadedInstance inst = load_instance(cfg);
  if (cfg.k < 1) throw dpp::InvalidInput("--k is required");
  const dpp::Subset greedy = dpp::greedy_map(inst.features, cfg.k).sorted();
  const double log_det_greedy =
      std::log(dpp::principal_minor_det(inst.kernel, greedy));
  const dpp::MapResult res = dpp::local_search_map(inst.features, cfg.k, cfg.eps);

  std::ofstream file;
  std::ostream& out = open_output(cfg, file);
  out << "{\"subset\":" << fmt_index_array(res.subset.sorted().indices, 1)
      << ",\"log_det_greedy\":" << fmt_double(log_det_greedy)
      << ",\"log_det_final\":" << fmt_double(res.log_det)
      << ",\"swaps\":" << res.swaps_performed
      << ",\"kappa\":" << fmt_double(res.kappa)
      << ",\"eps\":" << fmt_double(cfg.eps) << "}\n";
  return 0;
}

int cmd_partition_fn(const RunConfig& cfg) {
  const LoadedInstance inst = load_instance(cfg);
  if (cfg.partition.empty()) throw dpp::InvalidInput("--partition is required");
  const dpp::PartitionSpec part = read_partition(cfg.partition, inst.kernel.size());

  std::vector<dpp::Index> idx(static_cast<size_t>(part.num_parts()));
  for (dpp::Index l = 0; l < part.num_parts(); ++l) {
    idx[static_cast<size_t>(l)] = part.part_sizes()[l] - part.quotas()[l];
  }
  const double coeff = dpp::multichar_coeff(inst.kernel, part, idx);
  const double z = std::abs(coeff);
  const int sign = coeff > 0.0 ? 1 : (coeff < 0.0 ? -1 : 0);

  std::ofstream file;
  std::ostream& out = open_output(cfg, file);
  out << "{\"Z\":" << fmt_double(z)
      << ",\"log_Z\":" << (z > 0.0 ? fmt_double(std::log(z)) : "null")
      << ",\"coeff_index\":" << fmt_index_array(idx)
      << ",\"sign\":" << sign << "}\n";
  return 0;
}

struct BenchConfig {
  std::vector<dpp::Index> parts;
  std::vector<dpp::Index> quotas;
};

int cmd_bench(const RunConfig& cfg) {
  json j;
  {
    std::ifstream in(cfg.grid);
    if (!in) throw dpp::InvalidInput("cannot open grid file " + cfg.grid);
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      throw dpp::InvalidInput(std::string("grid file is not valid JSON: ") + e.what());
    }
  }
  const json& configs = j.is_array() ? j : j.at("configs");
  std::uint64_t seed = cfg.seed;
  if (j.is_object() && j.contains("seed")) seed = j["seed"].get<std::uint64_t>();
  dpp::Index samples = cfg.num_samples;
  if (j.is_object() && j.contains("samples")) samples = j["samples"].get<dpp::Index>();
  std::optional<dpp::Index> feature_dim;
  if (j.is_object() && j.contains("n")) feature_dim = j["n"].get<dpp::Index>();

  std::ofstream file;
  std::ostream& out = open_output(cfg, file);

  for (const json& jc : configs) {
    BenchConfig bc;
    bc.parts = jc.at("parts").get<std::vector<dpp::Index>>();
    bc.quotas = jc.at("quotas").get<std::vector<dpp::Index>>();
    if (bc.parts.size() != bc.quotas.size() || bc.parts.empty()) {
      throw dpp::InvalidInput("each grid config needs matching 'parts' and 'quotas'");
    }
    dpp::Index m = 0, k = 0;
    std::vector<dpp::Index> labels;
    for (size_t l = 0; l < bc.parts.size(); ++l) {
      m += bc.parts[l];
      k += bc.quotas[l];
      labels.insert(labels.end(), static_cast<size_t>(bc.parts[l]),
                    static_cast<dpp::Index>(l));
    }
    const dpp::Index n = feature_dim.value_or(m);
    const dpp::PartitionSpec part(labels, bc.quotas);

    std::mt19937_64 gen(seed);
    dpp::RowMatrixXd raw(m, n);
    for (dpp::Index r = 0; r < m; ++r) {
      for (dpp::Index c = 0; c < n; ++c) raw(r, c) = dpp::standard_normal(gen);
    }
    const dpp::FeatureMatrix a(std::move(raw));

    const auto time_method = [&](const char* name, auto&& draw) {
      const auto start = std::chrono::steady_clock::now();
      for (dpp::Index rep = 0; rep < samples; ++rep) {
        draw(dpp::derive_seed(dpp::RngSeed{seed}, static_cast<std::uint64_t>(rep)));
      }
      const std::chrono::duration<double> elapsed =
          std::chrono::steady_clock::now() - start;
      out << "{\"parts\":" << fmt_index_array(bc.parts)
          << ",\"quotas\":" << fmt_index_array(bc.quotas)
          << ",\"method\":\"" << name << "\""
          << ",\"samples\":" << samples
          << ",\"seconds\":" << fmt_double(elapsed.count()) << "}\n";
      out.flush();
    };

    time_method("kdpp", [&](dpp::RngSeed s) { dpp::sample_kdpp(a, k, s); });
    // One k_l-DPP per part on that part's rows, results concatenated.
    time_method("independent_kdpps", [&](dpp::RngSeed s) {
      for (dpp::Index l = 0; l < part.num_parts(); ++l) {
        if (part.quotas()[l] < 1) continue;
        const auto& members = part.part_members()[l];
        dpp::RowMatrixXd rows(static_cast<dpp::Index>(members.size()), a.cols());
        for (size_t r = 0; r < members.size(); ++r) {
          rows.row(static_cast<dpp::Index>(r)) = a.data().row(members[r]);
        }
        dpp::sample_kdpp(dpp::FeatureMatrix(std::move(rows)), part.quotas()[l],
                         dpp::derive_seed(s, 1000 + static_cast<std::uint64_t>(l)));
      }
    });
    time_method("partition_dpp",
                [&](dpp::RngSeed s) { dpp::sample_partition_dpp(a, part, s); });
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact DPP sampling under cardinality and partition constraints"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_input = [&](CLI::App* sub) {
    sub->add_option("--input", cfg.input, "CSV matrix (no header)")->required();
    sub->add_option("--kind", cfg.kind, "features | kernel");
  };

  CLI::App* sample = app.add_subcommand("sample", "Draw subsets");
  add_input(sample);
  sample->add_option("--partition", cfg.partition, "partition JSON (path or inline)");
  sample->add_option("--k", cfg.k, "subset size (k-DPP mode)");
  sample->add_option("--n", cfg.num_samples, "number of samples");
  sample->add_option("--seed", cfg.seed, "base RNG seed");
  sample->add_option("--out", cfg.out, "output JSONL path (default stdout)");
  sample->add_option("--dump-kernel", cfg.dump_kernel, "write the kernel used as CSV");

  CLI::App* map = app.add_subcommand("map", "Greedy + local-search MAP inference");
  add_input(map);
  map->add_option("--k", cfg.k, "subset size")->required();
  map->add_option("--eps", cfg.eps, "swap acceptance threshold is 1+eps/k");
  map->add_option("--out", cfg.out, "output path (default stdout)");

  CLI::App* pfn = app.add_subcommand("partition-fn", "Constrained partition function");
  add_input(pfn);
  pfn->add_option("--partition", cfg.partition, "partition JSON (path or inline)")
      ->required();
  pfn->add_option("--out", cfg.out, "output path (default stdout)");

  CLI::App* bench = app.add_subcommand("bench", "Timing table for the three samplers");
  bench->add_option("--grid", cfg.grid, "grid JSON")->required();
  bench->add_option("--seed", cfg.seed, "base RNG seed");
  bench->add_option("--samples", cfg.num_samples, "draws per method");
  bench->add_option("--out", cfg.out, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints usage/message
    return e.get_exit_code() == 0 ? 0 : kExitInvalidInput;
  }

  try {
    if (app.got_subcommand(sample)) return cmd_sample(cfg);
    if (app.got_subcommand(map)) return cmd_map(cfg);
    if (app.got_subcommand(pfn)) return cmd_partition_fn(cfg);
    if (app.got_subcommand(bench)) return cmd_bench(cfg);
  } catch (const dpp::NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const dpp::InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}
