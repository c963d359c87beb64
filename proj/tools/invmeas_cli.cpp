// Batch front door: sampling, verification suites, and histogram export with
// reproducible seeding. Exit codes: 0 success, 1 verification failure, 2
// configuration error.
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "invmeas/core.hpp"
#include "invmeas/errors.hpp"
#include "invmeas/ewens.hpp"
#include "invmeas/finfourier.hpp"
#include "invmeas/haar.hpp"
#include "invmeas/poisson.hpp"
#include "invmeas/spectra.hpp"
#include "invmeas/verify.hpp"

namespace {

using namespace invmeas;

void write_output(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open output file: " + path);
  f << text;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int config_error(const std::string& message) {
  std::cerr << "error: " << message << "\n";
  return 2;
}

GroupKind parse_kind(const std::string& family, int n, std::string& err) {
  if (n < 1) {
    err = "--n must be at least 1";
    return {Family::U, 1};
  }
  if (family == "U") return {Family::U, n};
  if (family == "O") return {Family::O, n};
  if (family == "SO") return {Family::SO, n};
  if (family == "Sp") {
    if (n % 2 != 0) {
      err = "Sp needs an even matrix size";
      return {Family::U, 1};
    }
    return {Family::SpCompact, n / 2};
  }
  err = "unknown family: " + family;
  return {Family::U, 1};
}

struct SampleArgs {
  std::string group, process, stat, out = "-", format;
  int n = 2;
  double mass = 1.0, t = 1.0;
  std::size_t count = 0;
  std::uint64_t seed = 0;
};

int run_sample(const SampleArgs& a) {
  if (a.group.empty() == a.process.empty())
    return config_error("pass exactly one of --group and --process");
  if (a.count == 0) {
    write_output(a.out, "");
    return 0;
  }
  auto rng = rng_stream(a.seed, 0);
  char buf[80];

  if (!a.group.empty()) {
    if (!a.stat.empty() && a.stat != "eigenphases")
      return config_error("matrix groups support only --stat eigenphases");
    std::string err;
    const GroupKind kind = parse_kind(a.group, a.n, err);
    if (!err.empty()) return config_error(err);
    const std::string format = a.format.empty() ? "csv" : a.format;
    std::vector<std::vector<double>> rows(a.count);
    for (auto& r : rows) r = weyl_phases(kind, sample_haar(kind, rng));
    if (format == "csv") {
      std::string text = "sample,phase\n";
      for (std::size_t i = 0; i < rows.size(); ++i)
        for (double p : rows[i]) {
          std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i, p);
          text += buf;
        }
      write_output(a.out, text);
    } else {
      nlohmann::ordered_json j;
      j["schema"] = 1;
      j["command"] = "sample";
      j["group"] = a.group;
      j["n"] = a.n;
      j["stat"] = "eigenphases";
      j["count"] = a.count;
      j["seed"] = a.seed;
      j["phases"] = rows;
      write_output(a.out, j.dump(2) + "\n");
    }
    return 0;
  }

  if (a.process == "poisson") {
    if (!a.stat.empty() && a.stat != "points")
      return config_error("the poisson process supports only --stat points");
    if (!(a.mass > 0.0)) return config_error("--mass must be positive");
    const MeasureSpace1D space = uniform_space(0.0, 1.0, a.mass);
    std::vector<Configuration> configs(a.count);
    for (auto& w : configs) w = sample_poisson(space, rng);
    const std::string format = a.format.empty() ? "json" : a.format;
    if (format == "json") {
      nlohmann::ordered_json j;
      j["schema"] = 1;
      j["command"] = "sample";
      j["process"] = "poisson";
      j["mass"] = a.mass;
      j["count"] = a.count;
      j["seed"] = a.seed;
      j["configurations"] = configs;
      write_output(a.out, j.dump(2) + "\n");
    } else {
      std::string text = "sample,point\n";
      for (std::size_t i = 0; i < configs.size(); ++i)
        for (double x : configs[i]) {
          std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i, x);
          text += buf;
        }
      write_output(a.out, text);
    }
    return 0;
  }

  // ewens
  if (!a.stat.empty() && a.stat != "cycles")
    return config_error("the ewens process supports only --stat cycles");
  if (!(a.t > 0.0)) return config_error("--t must be positive");
  if (a.n < 1) return config_error("--n must be at least 1");
  std::vector<Perm> perms(a.count);
  std::vector<int> ncycles(a.count);
  for (std::size_t i = 0; i < a.count; ++i) {
    perms[i] = sample_ewens(a.n, a.t, rng);
    ncycles[i] = num_cycles(perms[i]);
  }
  const std::string format = a.format.empty() ? "json" : a.format;
  if (format == "json") {
    nlohmann::ordered_json j;
    j["schema"] = 1;
    j["command"] = "sample";
    j["process"] = "ewens";
    j["n"] = a.n;
    j["t"] = a.t;
    j["count"] = a.count;
    j["seed"] = a.seed;
    j["permutations"] = perms;
    j["cycle_counts"] = ncycles;
    write_output(a.out, j.dump(2) + "\n");
  } else {
    std::string text = "sample,cycles\n";
    for (std::size_t i = 0; i < a.count; ++i) {
      std::snprintf(buf, sizeof buf, "%zu,%d\n", i, ncycles[i]);
      text += buf;
    }
    write_output(a.out, text);
  }
  return 0;
}

struct VerifyArgs {
  std::string suite, out = "-", format, group_file;
  std::size_t samples = 100000;
  double alpha = 0.01;
  std::uint64_t seed = 0;
};

int run_verify(const VerifyArgs& a) {
  if (!is_suite(a.suite)) return config_error("unknown suite: " + a.suite);
  if (!a.format.empty() && a.format != "json")
    return config_error("verification reports are json only");
  if (!a.group_file.empty() && a.suite != "fourier" && a.suite != "all")
    return config_error("--group-file applies to the fourier suite only");
  CheckContext ctx;
  ctx.seed = a.seed;
  ctx.samples = a.samples;
  ctx.alpha = a.alpha;
  std::vector<CheckResult> results = run_suite(a.suite, ctx);
  if (!a.group_file.empty()) {
    const FiniteGroup g = group_from_json(read_file(a.group_file));
    for (CheckResult& r : run_fourier_on_group(g, ctx))
      results.push_back(std::move(r));
    std::sort(results.begin(), results.end(),
              [](const CheckResult& x, const CheckResult& y) { return x.id < y.id; });
  }
  write_output(a.out, report_to_json(a.suite, ctx, results));
  for (const CheckResult& r : results)
    if (!r.pass) return 1;
  return 0;
}

struct SpectraArgs {
  std::string family = "U", out = "-", format = "csv";
  int n = 2, bins = 40;
  std::size_t samples = 100000;
  std::uint64_t seed = 0;
};

int run_spectra(const SpectraArgs& a) {
  std::string err;
  const GroupKind kind = parse_kind(a.family, a.n, err);
  if (!err.empty()) return config_error(err);
  if (kind.family == Family::O)
    return config_error("eigenphase densities are defined for U, SO, Sp");
  if (a.bins < 1) return config_error("--bins must be at least 1");
  if (a.samples < 1) return config_error("--samples must be at least 1");
  const int rank = weyl_rank(kind);
  const bool full_torus = kind.family == Family::U;
  if (!full_torus && rank > 2)
    return config_error(
        "analytic overlays for folded families are implemented for rank <= 2");

  const double hi = full_torus ? 2.0 * M_PI : M_PI;
  const double width = hi / a.bins;
  std::vector<long> counts(a.bins, 0);
  auto rng = rng_stream(a.seed, 0);
  for (std::size_t i = 0; i < a.samples; ++i)
    for (double p : weyl_phases(kind, sample_haar(kind, rng))) {
      int b = static_cast<int>(p / width);
      counts[std::clamp(b, 0, a.bins - 1)] += 1;
    }

  // Density of one eigenphase parameter drawn uniformly from a sample, so
  // the expected bin count is samples * rank * width * density(midpoint).
  std::function<double(double)> density;
  if (full_torus) {
    density = [](double) { return 1.0 / (2.0 * M_PI); };
  } else if (rank == 1) {
    density = [kind](double x) { return weyl_density(kind, {x}); };
  } else {
    Vec nodes, weights;
    gauss_legendre(96, 0.0, M_PI, nodes, weights);
    density = [kind, nodes, weights](double x) {
      double acc = 0.0;
      for (int j = 0; j < nodes.size(); ++j) {
        const double y = nodes[j];
        const std::vector<double> phi =
            x <= y ? std::vector<double>{x, y} : std::vector<double>{y, x};
        acc += weights[j] * weyl_density(kind, phi);
      }
      return 0.5 * acc;
    };
  }

  if (a.format == "csv") {
    std::string text = "bin_left,bin_right,count,analytic_density\n";
    char buf[160];
    for (int b = 0; b < a.bins; ++b) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%ld,%.17g\n", b * width,
                    (b + 1) * width, counts[b], density((b + 0.5) * width));
      text += buf;
    }
    write_output(a.out, text);
  } else {
    nlohmann::ordered_json j;
    j["schema"] = 1;
    j["command"] = "spectra";
    j["family"] = a.family;
    j["n"] = a.n;
    j["samples"] = a.samples;
    j["seed"] = a.seed;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (int b = 0; b < a.bins; ++b) {
      nlohmann::ordered_json row;
      row["bin_left"] = b * width;
      row["bin_right"] = (b + 1) * width;
      row["count"] = counts[b];
      row["analytic_density"] = density((b + 0.5) * width);
      rows.push_back(std::move(row));
    }
    j["bins"] = std::move(rows);
    write_output(a.out, j.dump(2) + "\n");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"invariant measure samplers and verification suites"};
  app.require_subcommand(1);

  SampleArgs sa;
  CLI::App* sample = app.add_subcommand("sample", "draw group or process samples");
  sample->add_option("--group", sa.group, "matrix family: O, SO, U, Sp")
      ->check(CLI::IsMember({"O", "SO", "U", "Sp"}));
  sample->add_option("--process", sa.process, "point process: poisson, ewens")
      ->check(CLI::IsMember({"poisson", "ewens"}));
  sample->add_option("--n", sa.n, "matrix size, or permutation degree for ewens");
  sample->add_option("--mass", sa.mass, "total intensity mass (poisson)");
  sample->add_option("--t", sa.t, "cycle weight parameter (ewens)");
  sample->add_option("--stat", sa.stat,
                     "statistic: eigenphases (groups), points (poisson), "
                     "cycles (ewens)");
  sample->add_option("--count", sa.count, "number of draws")->required();
  sample->add_option("--seed", sa.seed, "rng seed")->required();
  sample->add_option("--out", sa.out, "output path, - for stdout");
  sample->add_option("--format", sa.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  VerifyArgs va;
  CLI::App* verify = app.add_subcommand("verify", "run a verification suite");
  verify->add_option("suite", va.suite,
                     "haar, weyl, schur, fourier, ewens, poisson, gaussian, "
                     "polymorph, all")
      ->required();
  verify->add_option("--samples", va.samples, "monte carlo budget per check");
  verify->add_option("--alpha", va.alpha, "significance level")
      ->check(CLI::Range(1e-12, 0.5));
  verify->add_option("--seed", va.seed, "rng seed")->required();
  verify->add_option("--out", va.out, "report path, - for stdout");
  verify->add_option("--format", va.format, "json (the only report format)");
  verify->add_option("--group-file", va.group_file,
                     "json group table or permutation generators to check");

  SpectraArgs pa;
  CLI::App* spectra =
      app.add_subcommand("spectra", "eigenphase histogram with analytic overlay");
  spectra->add_option("--family", pa.family, "U, SO, or Sp")
      ->check(CLI::IsMember({"U", "SO", "Sp"}));
  spectra->add_option("--n", pa.n, "matrix size");
  spectra->add_option("--samples", pa.samples, "number of matrices");
  spectra->add_option("--bins", pa.bins, "histogram bins");
  spectra->add_option("--seed", pa.seed, "rng seed")->required();
  spectra->add_option("--out", pa.out, "output path, - for stdout");
  spectra->add_option("--format", pa.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(sample)) return run_sample(sa);
    if (app.got_subcommand(verify)) return run_verify(va);
    if (app.got_subcommand(spectra)) return run_spectra(pa);
  } catch (const std::exception& e) {
    return config_error(e.what());
  }
  return 2;
}
