#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bhp/bhp_distribution.hpp"
#include "bhp/empirics.hpp"
#include "bhp/lattice_spectrum.hpp"
#include "bhp/return_pipeline.hpp"

namespace bhp {

/// long: header `date,ticker,close`, one observation per line.
/// wide: header `date,<ticker>,...`, one row per date.
enum class PanelLayout { long_format, wide_format };

std::string_view to_string(PanelLayout layout);
/// Accepts "long" and "wide".
PanelLayout parse_panel_layout(std::string_view text);

struct PanelFileSpec {
  std::filesystem::path path;
  PanelLayout layout = PanelLayout::long_format;
  std::string date_format = "%Y-%m-%d";
  std::string missing_marker;  // a field equal to this (after trimming) is absent, as is an empty one
  std::string universe_label;
};

/// Lines starting with '#' and blank lines are ignored. Errors (parse failure,
/// duplicate (date, ticker), nonpositive price) throw DataError naming the
/// line. An unreadable file throws DataError with line 0.
PricePanel load_price_panel(const PanelFileSpec& spec);
PricePanel read_price_panel(std::istream& in, const PanelFileSpec& spec);

/// Writes `# `-prefixed comment lines, then the CSV body. Prices use
/// round-trip precision so reloading gives an equal panel.
void write_price_panel(std::ostream& out, const PricePanel& panel, PanelLayout layout,
                       const std::vector<std::string>& comments = {});

enum class SynthGenerator { planted_fluctuations, geometric_random_walk };
enum class FluctuationSource { bhp, normal };

struct SynthConfig {
  int n_stocks = 30;
  int n_days = 100;
  std::uint64_t seed = 1;
  SynthGenerator generator = SynthGenerator::planted_fluctuations;

  // planted_fluctuations
  FluctuationSource source = FluctuationSource::bhp;
  TransformMode mode = TransformMode::magnitude;
  int lattice_side = 10;
  double mu_level = 0.2;
  double mu_amplitude = 0.2;
  double sigma_level = 0.02;
  double sigma_amplitude = 0.2;

  // geometric_random_walk
  double volatility = 0.02;

  double initial_price = 100.0;
  Date start{std::chrono::sys_days{std::chrono::year{2000} / 1 / 3}};
};

struct PlantedTruth {
  /// (n_days - 1) x n_stocks, row-major; each row has mean 0, population std 1.
  std::vector<double> fluctuations;
  std::vector<double> mu;
  std::vector<double> sigma;
};

struct SynthResult {
  PricePanel panel;
  std::optional<PlantedTruth> truth;  // planted mode only
};

/// Planted mode draws F, re-standardizes each day, sets
/// S = mu(t) + sigma(t) F and inverts the rescaling into prices. In magnitude
/// mode return signs come from an auxiliary stream. Throws InvalidArgument for
/// n_stocks < 2, n_days < 3, a nonpositive sigma path, a negative S in
/// magnitude mode, or a return that would make a price nonpositive.
SynthResult synth_panel(const SynthConfig& config);

std::string format_double(double v);

void write_comments(std::ostream& out, const std::vector<std::string>& comments);

/// index, p, q, lambda
void write_spectrum(std::ostream& out, const LatticeSpectrum& spectrum,
                    const std::vector<std::string>& comments = {});
/// mu, pdf, cdf
void write_tabulation(std::ostream& out, const TabulatedDensity& table,
                      const std::vector<std::string>& comments = {});
/// one value per line
void write_samples(std::ostream& out, const std::vector<double>& values,
                   const std::vector<std::string>& comments = {});
/// date, ticker, F
void write_fluctuations(std::ostream& out, const FluctuationSample& sample,
                        const RescaledReturnPanel& returns,
                        const std::vector<std::string>& comments = {});
/// date, n_available, mu, sigma
void write_day_stats(std::ostream& out, const std::vector<DayStats>& stats,
                     const std::vector<std::string>& comments = {});
/// bin_center, density, log10_density, reference_pdf
void write_overlay(std::ostream& out, const HistogramDensity& hist, const TabulatedDensity& ref,
                   const std::vector<std::string>& comments = {});

/// Linear interpolation of the tabulated pdf, 0 outside the grid.
double interpolate_pdf(const TabulatedDensity& table, double x);

}  // namespace bhp
