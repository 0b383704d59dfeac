#include "bhp/cli.hpp"

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <charconv>
#include <cmath>
#include <type_traits>

#include "CLI11.hpp"
#include "bhp/bhp_distribution.hpp"
#include "bhp/data_io.hpp"
#include "bhp/empirics.hpp"
#include "bhp/errors.hpp"
#include "bhp/lattice_spectrum.hpp"
#include "bhp/return_pipeline.hpp"
#include "json.hpp"

#ifndef BHP_VERSION
#define BHP_VERSION "unknown"
#endif

namespace bhp::cli {

namespace {

using Json = nlohmann::ordered_json;

struct QuadratureFlags {
  std::optional<double> x_max;
  double abs_tol = 1e-10;
  int max_subdivisions = 200;
  std::string orientation = "below";

  QuadratureConfig config() const {
    QuadratureConfig c;
    c.x_max = x_max;
    c.abs_tol = abs_tol;
    c.max_subdivisions = max_subdivisions;
    if (orientation == "below") {
      c.orientation = Orientation::heavy_tail_below;
    } else if (orientation == "above") {
      c.orientation = Orientation::heavy_tail_above;
    } else {
      throw InvalidArgument("orientation must be 'below' or 'above'");
    }
    c.validate();
    return c;
  }
};

void add_quadrature_flags(CLI::App& cmd, QuadratureFlags& q) {
  cmd.add_option("--x-max", q.x_max, "Truncation of the inversion integral (default: certified)");
  cmd.add_option("--abs-tol", q.abs_tol, "Absolute tolerance of the pdf quadrature")
      ->capture_default_str();
  cmd.add_option("--max-subdivisions", q.max_subdivisions, "Adaptive refinement cap")
      ->capture_default_str();
  cmd.add_option("--orientation", q.orientation, "Heavy tail side: below|above")
      ->capture_default_str();
}

// key=value pairs echoed into every output header, in insertion order.
class Echo {
 public:
  Echo(std::string_view command) {
    lines_.push_back("bhp " + std::string(command) + " version=" + std::string(version()));
  }
  template <class T>
  Echo& add(const std::string& key, const T& value) {
    std::ostringstream s;
    if constexpr (std::is_floating_point_v<T>) {
      s << format_double(value);
    } else {
      s << value;
    }
    lines_.push_back(key + "=" + s.str());
    json_[key] = value;
    return *this;
  }
  Echo& line(std::string text) {
    lines_.push_back(std::move(text));
    return *this;
  }
  const std::vector<std::string>& lines() const { return lines_; }
  const Json& json() const { return json_; }

 private:
  std::vector<std::string> lines_;
  Json json_;
};

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open output file " + path);
  return f;
}

template <class Writer>
void emit(const std::string& path, std::ostream& fallback, Writer&& write) {
  if (path.empty() || path == "-") {
    write(fallback);
    return;
  }
  auto f = open_output(path);
  write(f);
  if (!f) throw DataError("failed writing " + path);
}

std::string orientation_name(Orientation o) {
  return o == Orientation::heavy_tail_below ? "heavy_tail_below" : "heavy_tail_above";
}

void echo_quadrature(Echo& echo, const BhpDistribution& d) {
  const auto& c = d.config;
  echo.add("x_max", *c.x_max)
      .add("tail", std::string(d.rotated_tail ? "rotated" : "truncated"))
      .add("abs_tol", c.abs_tol)
      .add("max_subdivisions", c.max_subdivisions)
      .add("orientation", orientation_name(c.orientation));
}

// --- spectrum ---------------------------------------------------------------

struct SpectrumArgs {
  int side = 10;
  std::string output;
};

int cmd_spectrum(const SpectrumArgs& a, std::ostream& out) {
  const auto spectrum = LatticeSpectrum::periodic_square(a.side);
  Echo echo("spectrum");
  echo.add("L", a.side).add("N", spectrum.sites()).add("variance_prefactor",
                                                        variance_prefactor(spectrum));
  emit(a.output, out, [&](std::ostream& o) { write_spectrum(o, spectrum, echo.lines()); });
  return kSuccess;
}

// --- tabulate ---------------------------------------------------------------

struct TabulateArgs {
  int side = 10;
  std::vector<double> grid{-12.0, 8.0, 2001.0};
  QuadratureFlags quad;
  std::string output;
};

GridSpec to_grid(const std::vector<double>& g) {
  if (g.size() != 3) throw InvalidArgument("--grid takes exactly three values: lo hi count");
  if (g[2] != std::floor(g[2]) || g[2] < 2 || g[2] > 1e8) {
    throw InvalidArgument("grid count must be an integer >= 2");
  }
  GridSpec spec{g[0], g[1], static_cast<int>(g[2])};
  uniform_grid(spec);  // validates
  return spec;
}

int cmd_tabulate(const TabulateArgs& a, std::ostream& out) {
  const auto grid = to_grid(a.grid);
  const auto config = a.quad.config();
  const auto spectrum = LatticeSpectrum::periodic_square(a.side);
  const auto dist = tabulate(spectrum, grid, config);
  Echo echo("tabulate");
  echo.add("L", a.side).add("N", spectrum.sites());
  echo_quadrature(echo, dist);
  echo.add("grid_lo", grid.lo).add("grid_hi", grid.hi).add("grid_count", grid.count);
  echo.add("mean", dist.moments.mean)
      .add("variance", dist.moments.variance)
      .add("skewness", dist.moments.skewness)
      .add("excess_kurtosis", dist.moments.excess_kurtosis);
  emit(a.output, out, [&](std::ostream& o) { write_tabulation(o, dist.table, echo.lines()); });
  return kSuccess;
}

// --- sample -----------------------------------------------------------------

struct SampleArgs {
  std::size_t count = 10000;
  std::uint64_t seed = 1;
  int side = 10;
  std::string orientation = "below";
  std::string output;
};

int cmd_sample(const SampleArgs& a, std::ostream& out, std::ostream& err) {
  QuadratureFlags q;
  q.orientation = a.orientation;
  const auto orientation = q.config().orientation;
  const auto spectrum = LatticeSpectrum::periodic_square(a.side);
  const auto values = sample(a.count, spectrum, a.seed, orientation);
  Echo echo("sample");
  echo.add("L", a.side)
      .add("count", a.count)
      .add("seed", a.seed)
      .add("generator", std::string(kGeneratorId))
      .add("orientation", orientation_name(orientation));
  err << "seed=" << a.seed << '\n';
  emit(a.output, out, [&](std::ostream& o) { write_samples(o, values, echo.lines()); });
  return kSuccess;
}

// --- synth ------------------------------------------------------------------

struct SynthArgs {
  std::string mode = "planted";
  std::string source = "bhp";
  int stocks = 30;
  int days = 100;
  std::uint64_t seed = 1;
  std::string transform_mode = "magnitude";
  double volatility = 0.02;
  int side = 10;
  std::string layout = "long";
  std::string output;
  std::string truth;
};

int cmd_synth(const SynthArgs& a, std::ostream& out, std::ostream& err) {
  SynthConfig c;
  if (a.mode == "planted") {
    c.generator = SynthGenerator::planted_fluctuations;
  } else if (a.mode == "walk") {
    c.generator = SynthGenerator::geometric_random_walk;
  } else {
    throw InvalidArgument("--mode must be 'planted' or 'walk'");
  }
  if (a.source == "bhp") {
    c.source = FluctuationSource::bhp;
  } else if (a.source == "normal") {
    c.source = FluctuationSource::normal;
  } else {
    throw InvalidArgument("--source must be 'bhp' or 'normal'");
  }
  c.n_stocks = a.stocks;
  c.n_days = a.days;
  c.seed = a.seed;
  c.mode = parse_transform_mode(a.transform_mode);
  c.volatility = a.volatility;
  c.lattice_side = a.side;
  const auto layout = parse_panel_layout(a.layout);
  const auto result = synth_panel(c);

  Echo echo("synth");
  echo.add("mode", a.mode).add("stocks", a.stocks).add("days", a.days).add("seed", a.seed);
  if (c.generator == SynthGenerator::planted_fluctuations) {
    echo.add("source", a.source)
        .add("transform_mode", std::string(to_string(c.mode)))
        .add("L", a.side)
        .add("mu_level", c.mu_level)
        .add("mu_amplitude", c.mu_amplitude)
        .add("sigma_level", c.sigma_level)
        .add("sigma_amplitude", c.sigma_amplitude);
  } else {
    echo.add("volatility", c.volatility);
  }
  echo.add("generator", std::string(kGeneratorId)).add("layout", a.layout);
  err << "seed=" << a.seed << '\n';
  emit(a.output, out,
       [&](std::ostream& o) { write_price_panel(o, result.panel, layout, echo.lines()); });

  if (!a.truth.empty()) {
    if (!result.truth) throw InvalidArgument("--truth is only available in planted mode");
    const auto& truth = *result.truth;
    auto f = open_output(a.truth);
    write_comments(f, echo.lines());
    f << "date\tticker\tF\tmu\tsigma\n";
    const auto n = result.panel.n_tickers();
    for (std::size_t k = 0; k < truth.fluctuations.size(); ++k) {
      const std::size_t t = k / n;
      f << to_string(result.panel.dates()[t]) << '\t' << result.panel.tickers()[k % n] << '\t'
        << format_double(truth.fluctuations[k]) << '\t' << format_double(truth.mu[t]) << '\t'
        << format_double(truth.sigma[t]) << '\n';
    }
  }
  return kSuccess;
}

// --- analyze ----------------------------------------------------------------

struct AnalyzeArgs {
  std::string input;
  std::string layout = "long";
  std::string date_format = "%Y-%m-%d";
  std::string missing_marker;
  std::string universe;
  std::string transform_mode = "magnitude";
  std::size_t min_n = 10;
  double sigma_floor = 1e-12;
  std::string bins = "auto";
  int side = 10;
  std::size_t qq_count = 99;
  QuadratureFlags quad;
  std::string out_prefix;
};

Binning parse_binning(const std::string& text) {
  if (text == "auto") return AutoBins{};
  int count = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), count);
  if (ec != std::errc{} || ptr != text.data() + text.size() || count < 1) {
    throw InvalidArgument("--bins must be 'auto' or a positive integer");
  }
  return BinCount{count};
}

int cmd_analyze(const AnalyzeArgs& a, std::ostream& out, std::ostream& err) {
  PanelFileSpec spec;
  spec.path = a.input;
  spec.layout = parse_panel_layout(a.layout);
  spec.date_format = a.date_format;
  spec.missing_marker = a.missing_marker;
  spec.universe_label = a.universe;
  const auto mode = parse_transform_mode(a.transform_mode);
  const auto binning = parse_binning(a.bins);
  const auto quad = a.quad.config();
  if (!(a.sigma_floor > 0.0)) throw InvalidArgument("--sigma-floor must be > 0");
  const auto spectrum = LatticeSpectrum::periodic_square(a.side);

  const auto panel = load_price_panel(spec);
  if (panel.n_dates() < 2) throw DataError("panel has fewer than 2 dates");
  const auto returns = rescale_returns(panel, mode);
  const auto pooled = pool_fluctuations(returns, {a.min_n, a.sigma_floor});

  if (pooled.values.empty()) {
    std::map<std::string_view, std::size_t> reasons;
    for (const auto& s : pooled.skipped_days) ++reasons[to_string(s.reason)];
    err << "error: no usable days in panel (" << returns.n_days() << " days skipped:";
    for (const auto& [reason, n] : reasons) err << ' ' << reason << '=' << n;
    err << ")\n";
    return kDataError;
  }

  const auto dist = tabulate(spectrum, GridSpec{}, quad);
  const auto hist = histogram_density(pooled.values, binning);
  const auto report = goodness_of_fit(pooled.values, hist, dist.table, a.qq_count);

  Echo echo("analyze");
  echo.add("input", a.input)
      .add("layout", a.layout)
      .add("date_format", a.date_format)
      .add("missing_marker", a.missing_marker)
      .add("universe", a.universe)
      .add("transform_mode", std::string(to_string(mode)))
      .add("min_n", a.min_n)
      .add("sigma_floor", a.sigma_floor)
      .add("bins", a.bins)
      .add("L", a.side)
      .add("qq_count", a.qq_count);
  echo_quadrature(echo, dist);

  const std::string prefix = a.out_prefix;
  {
    auto f = open_output(prefix + ".fluctuations.tsv");
    write_fluctuations(f, pooled, returns, echo.lines());
  }
  {
    Json side;
    side["config"] = echo.json();
    side["version"] = std::string(version());
    side["transform_mode"] = std::string(to_string(mode));
    side["min_n"] = a.min_n;
    side["sigma_floor"] = a.sigma_floor;
    side["n_values"] = pooled.values.size();
    side["n_days"] = returns.n_days();
    auto skipped = Json::array();
    for (const auto& s : pooled.skipped_days) {
      skipped.push_back({{"date", to_string(s.date)}, {"reason", std::string(to_string(s.reason))}});
    }
    side["skipped_days"] = std::move(skipped);
    auto f = open_output(prefix + ".fluctuations.json");
    f << side.dump(2) << '\n';
  }
  {
    auto f = open_output(prefix + ".daystats.tsv");
    write_day_stats(f, pooled.day_stats, echo.lines());
  }
  {
    auto f = open_output(prefix + ".overlay.tsv");
    write_overlay(f, hist, dist.table, echo.lines());
  }
  {
    Json gof;
    gof["config"] = echo.json();
    gof["version"] = std::string(version());
    gof["report"] = to_json(report);
    auto f = open_output(prefix + ".gof.json");
    f << gof.dump(2) << '\n';
  }

  out << "ks_distance=" << format_double(report.ks_distance) << " n=" << report.ks_n << '\n';
  return kSuccess;
}

}  // namespace

std::string_view version() { return BHP_VERSION; }

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical BHP distribution and stock-fluctuation collapse toolkit", "bhp"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(version()));

  SpectrumArgs spectrum_args;
  auto* spectrum_cmd = app.add_subcommand("spectrum", "Dump the lattice Laplacian spectrum");
  spectrum_cmd->add_option("--L", spectrum_args.side, "Lattice side")->capture_default_str();
  spectrum_cmd->add_option("-o,--output", spectrum_args.output, "Output path (default stdout)");

  TabulateArgs tab_args;
  auto* tab_cmd = app.add_subcommand("tabulate", "Tabulate the BHP pdf and CDF");
  tab_cmd->add_option("--L", tab_args.side, "Lattice side")->capture_default_str();
  tab_cmd->add_option("--grid", tab_args.grid, "Uniform grid: lo hi count")
      ->expected(3)
      ->capture_default_str();
  add_quadrature_flags(*tab_cmd, tab_args.quad);
  tab_cmd->add_option("-o,--output", tab_args.output, "Output path (default stdout)");

  SampleArgs sample_args;
  auto* sample_cmd = app.add_subcommand("sample", "Draw from the BHP distribution");
  sample_cmd->add_option("--count", sample_args.count, "Number of draws")->capture_default_str();
  sample_cmd->add_option("--seed", sample_args.seed, "Generator seed")->capture_default_str();
  sample_cmd->add_option("--L", sample_args.side, "Lattice side")->capture_default_str();
  sample_cmd->add_option("--orientation", sample_args.orientation, "Heavy tail side: below|above")
      ->capture_default_str();
  sample_cmd->add_option("-o,--output", sample_args.output, "Output path (default stdout)");

  SynthArgs synth_args;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic price panel");
  synth_cmd->add_option("--mode", synth_args.mode, "planted|walk")->capture_default_str();
  synth_cmd->add_option("--source", synth_args.source, "Planted fluctuations: bhp|normal")
      ->capture_default_str();
  synth_cmd->add_option("--stocks", synth_args.stocks)->capture_default_str();
  synth_cmd->add_option("--days", synth_args.days)->capture_default_str();
  synth_cmd->add_option("--seed", synth_args.seed)->capture_default_str();
  synth_cmd->add_option("--transform-mode", synth_args.transform_mode, "magnitude|signed")
      ->capture_default_str();
  synth_cmd->add_option("--volatility", synth_args.volatility, "Walk volatility")
      ->capture_default_str();
  synth_cmd->add_option("--L", synth_args.side, "Lattice side for BHP draws")
      ->capture_default_str();
  synth_cmd->add_option("--layout", synth_args.layout, "long|wide")->capture_default_str();
  synth_cmd->add_option("-o,--output", synth_args.output, "Panel output path (default stdout)");
  synth_cmd->add_option("--truth", synth_args.truth, "Write planted fluctuations here");

  AnalyzeArgs an;
  auto* an_cmd = app.add_subcommand("analyze", "Pool fluctuations of a panel and compare to BHP");
  an_cmd->add_option("-i,--input", an.input, "Price panel file")->required();
  an_cmd->add_option("--layout", an.layout, "long|wide")->capture_default_str();
  an_cmd->add_option("--date-format", an.date_format, "%Y-%m-%d or %Y%m%d")
      ->capture_default_str();
  an_cmd->add_option("--missing-marker", an.missing_marker, "Token for a missing price");
  an_cmd->add_option("--universe", an.universe, "Universe label, e.g. SP100");
  an_cmd->add_option("--transform-mode", an.transform_mode, "magnitude|signed")
      ->capture_default_str();
  an_cmd->add_option("--min-n", an.min_n, "Minimum stocks per day")->capture_default_str();
  an_cmd->add_option("--sigma-floor", an.sigma_floor, "Minimum daily sigma")
      ->capture_default_str();
  an_cmd->add_option("--bins", an.bins, "auto or a bin count")->capture_default_str();
  an_cmd->add_option("--L", an.side, "Lattice side of the reference")->capture_default_str();
  an_cmd->add_option("--qq-count", an.qq_count, "Number of QQ points")->capture_default_str();
  add_quadrature_flags(*an_cmd, an.quad);
  an_cmd->add_option("-o,--out-prefix", an.out_prefix, "Prefix for output files")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsageError;
  }

  try {
    if (*spectrum_cmd) return cmd_spectrum(spectrum_args, out);
    if (*tab_cmd) return cmd_tabulate(tab_args, out);
    if (*sample_cmd) return cmd_sample(sample_args, out, err);
    if (*synth_cmd) return cmd_synth(synth_args, out, err);
    if (*an_cmd) return cmd_analyze(an, out, err);
  } catch (const InvalidArgument& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const ConvergenceError& e) {
    err << "convergence error: " << e.what();
    if (e.mu()) err << " [mu=" << format_double(*e.mu()) << "]";
    err << '\n';
    return kConvergenceError;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kUsageError;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"bhp"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace bhp::cli
