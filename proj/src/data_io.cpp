#include "bhp/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

#include "bhp/errors.hpp"
#include "bhp/random.hpp"

namespace bhp {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

bool is_skippable(std::string_view line) {
  const auto t = trim(line);
  return t.empty() || t.front() == '#';
}

Date parse_date_at(std::string_view text, const PanelFileSpec& spec, std::size_t line) {
  try {
    return parse_date(text, spec.date_format);
  } catch (const DataError& e) {
    throw DataError(e.what(), line);
  }
}

std::optional<double> parse_price(std::string_view text, const PanelFileSpec& spec,
                                  std::size_t line) {
  if (text.empty() || text == spec.missing_marker) return std::nullopt;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
    throw DataError("cannot parse price '" + std::string(text) + "'", line);
  }
  if (!(value > 0.0)) {
    throw DataError("nonpositive price " + std::string(text), line);
  }
  return value;
}

PricePanel read_long(std::istream& in, const PanelFileSpec& spec) {
  std::string raw;
  std::size_t line_no = 0;
  bool have_header = false;
  std::map<Date, std::map<std::string, std::optional<double>>> rows;
  std::set<std::string> tickers;
  while (std::getline(in, raw)) {
    ++line_no;
    if (is_skippable(raw)) continue;
    const auto fields = split_fields(raw);
    if (!have_header) {
      if (fields.size() != 3 || fields[0] != "date" || fields[1] != "ticker" ||
          fields[2] != "close") {
        throw DataError("long-format header must be 'date,ticker,close'", line_no);
      }
      have_header = true;
      continue;
    }
    if (fields.size() != 3) {
      throw DataError("expected 3 fields, got " + std::to_string(fields.size()), line_no);
    }
    const Date date = parse_date_at(fields[0], spec, line_no);
    if (fields[1].empty()) throw DataError("empty ticker", line_no);
    std::string ticker(fields[1]);
    const auto price = parse_price(fields[2], spec, line_no);
    auto& day = rows[date];
    if (!day.emplace(ticker, price).second) {
      throw DataError("duplicate observation for (" + std::string(fields[0]) + ", " + ticker + ")",
                      line_no);
    }
    tickers.insert(std::move(ticker));
  }
  if (!have_header) throw DataError("missing header line");

  std::vector<std::string> names(tickers.begin(), tickers.end());
  std::vector<Date> dates;
  std::vector<std::optional<double>> closes;
  closes.reserve(rows.size() * names.size());
  for (const auto& [date, day] : rows) {
    dates.push_back(date);
    for (const auto& name : names) {
      const auto it = day.find(name);
      closes.push_back(it == day.end() ? std::nullopt : it->second);
    }
  }
  return PricePanel::create(std::move(dates), std::move(names), std::move(closes),
                            spec.universe_label);
}

PricePanel read_wide(std::istream& in, const PanelFileSpec& spec) {
  std::string raw;
  std::size_t line_no = 0;
  std::vector<std::string> names;
  bool have_header = false;
  std::map<Date, std::vector<std::optional<double>>> rows;
  while (std::getline(in, raw)) {
    ++line_no;
    if (is_skippable(raw)) continue;
    const auto fields = split_fields(raw);
    if (!have_header) {
      if (fields.size() < 2 || fields[0] != "date") {
        throw DataError("wide-format header must be 'date,<ticker>,...'", line_no);
      }
      std::set<std::string_view> seen;
      for (std::size_t i = 1; i < fields.size(); ++i) {
        if (fields[i].empty()) throw DataError("empty ticker in header", line_no);
        if (!seen.insert(fields[i]).second) {
          throw DataError("duplicate ticker '" + std::string(fields[i]) + "' in header", line_no);
        }
        names.emplace_back(fields[i]);
      }
      have_header = true;
      continue;
    }
    if (fields.size() != names.size() + 1) {
      throw DataError("expected " + std::to_string(names.size() + 1) + " fields, got " +
                          std::to_string(fields.size()),
                      line_no);
    }
    const Date date = parse_date_at(fields[0], spec, line_no);
    std::vector<std::optional<double>> row;
    row.reserve(names.size());
    for (std::size_t i = 1; i < fields.size(); ++i) row.push_back(parse_price(fields[i], spec, line_no));
    if (!rows.emplace(date, std::move(row)).second) {
      throw DataError("duplicate date " + std::string(fields[0]), line_no);
    }
  }
  if (!have_header) throw DataError("missing header line");

  std::vector<Date> dates;
  std::vector<std::optional<double>> closes;
  for (auto& [date, row] : rows) {
    dates.push_back(date);
    closes.insert(closes.end(), row.begin(), row.end());
  }
  return PricePanel::create(std::move(dates), std::move(names), std::move(closes),
                            spec.universe_label);
}

}  // namespace

std::string_view to_string(PanelLayout layout) {
  return layout == PanelLayout::long_format ? "long" : "wide";
}

PanelLayout parse_panel_layout(std::string_view text) {
  if (text == "long") return PanelLayout::long_format;
  if (text == "wide") return PanelLayout::wide_format;
  throw InvalidArgument("unknown panel layout '" + std::string(text) + "' (expected long or wide)");
}

PricePanel read_price_panel(std::istream& in, const PanelFileSpec& spec) {
  if (spec.date_format != "%Y-%m-%d" && spec.date_format != "%Y%m%d") {
    throw InvalidArgument("unsupported date format '" + spec.date_format + "'");
  }
  return spec.layout == PanelLayout::long_format ? read_long(in, spec) : read_wide(in, spec);
}

PricePanel load_price_panel(const PanelFileSpec& spec) {
  std::ifstream in(spec.path);
  if (!in) throw DataError("cannot open " + spec.path.string());
  return read_price_panel(in, spec);
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void write_comments(std::ostream& out, const std::vector<std::string>& comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
}

void write_price_panel(std::ostream& out, const PricePanel& panel, PanelLayout layout,
                       const std::vector<std::string>& comments) {
  write_comments(out, comments);
  if (layout == PanelLayout::long_format) {
    // tickers in lexicographic order, matching how the reader orders them
    std::vector<std::size_t> order(panel.n_tickers());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return panel.tickers()[a] < panel.tickers()[b];
    });
    out << "date,ticker,close\n";
    for (std::size_t t = 0; t < panel.n_dates(); ++t) {
      const auto date = to_string(panel.dates()[t]);
      for (std::size_t i : order) {
        if (const auto c = panel.close(t, i)) {
          out << date << ',' << panel.tickers()[i] << ',' << format_double(*c) << '\n';
        }
      }
    }
    return;
  }
  out << "date";
  for (const auto& name : panel.tickers()) out << ',' << name;
  out << '\n';
  for (std::size_t t = 0; t < panel.n_dates(); ++t) {
    out << to_string(panel.dates()[t]);
    for (std::size_t i = 0; i < panel.n_tickers(); ++i) {
      out << ',';
      if (const auto c = panel.close(t, i)) out << format_double(*c);
    }
    out << '\n';
  }
}

SynthResult synth_panel(const SynthConfig& config) {
  if (config.n_stocks < 2) throw InvalidArgument("synthetic panel needs n_stocks >= 2");
  if (config.n_days < 3) throw InvalidArgument("synthetic panel needs n_days >= 3");
  if (!(config.initial_price > 0.0)) throw InvalidArgument("initial_price must be > 0");

  const auto n = static_cast<std::size_t>(config.n_stocks);
  const auto days = static_cast<std::size_t>(config.n_days);
  const std::size_t return_days = days - 1;

  std::vector<std::string> tickers;
  for (std::size_t i = 0; i < n; ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "S%03zu", i + 1);
    tickers.emplace_back(buf);
  }
  std::vector<Date> dates{config.start};
  while (dates.size() < days) dates.push_back(next_weekday(dates.back()));

  // raw returns, (return_days x n)
  std::vector<double> returns(return_days * n);
  std::optional<PlantedTruth> truth;

  if (config.generator == SynthGenerator::geometric_random_walk) {
    if (!(config.volatility >= 0.0)) throw InvalidArgument("volatility must be >= 0");
    const CounterRng rng(config.seed);
    const double v = config.volatility;
    for (std::size_t k = 0; k < returns.size(); ++k) {
      returns[k] = std::exp(v * rng.normal(2 * k) - 0.5 * v * v) - 1.0;
    }
  } else {
    PlantedTruth planted;
    if (config.source == FluctuationSource::bhp) {
      planted.fluctuations =
          sample(returns.size(), LatticeSpectrum::periodic_square(config.lattice_side), config.seed);
    } else {
      const CounterRng rng(config.seed);
      planted.fluctuations.resize(returns.size());
      for (std::size_t k = 0; k < returns.size(); ++k) planted.fluctuations[k] = rng.normal(2 * k);
    }
    for (std::size_t t = 0; t < return_days; ++t) {
      const std::span<double> row(planted.fluctuations.data() + t * n, n);
      const auto stats = ensemble_stats(row);
      if (!(stats.sigma > 0.0)) throw InvalidArgument("drawn fluctuations are degenerate");
      for (double& f : row) f = (f - stats.mu) / stats.sigma;
    }

    const CounterRng signs(config.seed ^ 0xa0761d6478bd642fULL);
    for (std::size_t t = 0; t < return_days; ++t) {
      const double phase = static_cast<double>(t);
      const double mu = config.mu_level *
                        (1.0 + config.mu_amplitude * std::sin(2.0 * std::numbers::pi * phase / 250.0));
      const double sigma =
          config.sigma_level *
          (1.0 + config.sigma_amplitude * std::cos(2.0 * std::numbers::pi * phase / 180.0));
      if (!(sigma > 0.0)) throw InvalidArgument("sigma path must stay > 0");
      planted.mu.push_back(mu);
      planted.sigma.push_back(sigma);
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t k = t * n + i;
        const double s = mu + sigma * planted.fluctuations[k];
        double r = 0.0;
        if (config.mode == TransformMode::magnitude) {
          if (s < 0.0) {
            throw InvalidArgument("planted rescaled return is negative in magnitude mode; raise "
                                  "mu_level relative to sigma_level");
          }
          r = s * std::sqrt(s);
          if (signs.uniform(k) < 0.5) r = -r;
        } else {
          const double a = std::abs(s);
          r = std::copysign(a * std::sqrt(a), s);
        }
        returns[k] = r;
      }
    }
    truth = std::move(planted);
  }

  std::vector<std::optional<double>> closes(days * n);
  for (std::size_t i = 0; i < n; ++i) closes[i] = config.initial_price;
  for (std::size_t t = 0; t < return_days; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      const double r = returns[t * n + i];
      if (!(1.0 + r > 0.0)) throw InvalidArgument("synthetic return would make a price nonpositive");
      closes[(t + 1) * n + i] = *closes[t * n + i] * (1.0 + r);
    }
  }
  const std::string label =
      config.generator == SynthGenerator::planted_fluctuations ? "synthetic-planted" : "synthetic-walk";
  return {PricePanel::create(std::move(dates), std::move(tickers), std::move(closes), label),
          std::move(truth)};
}

void write_spectrum(std::ostream& out, const LatticeSpectrum& spectrum,
                    const std::vector<std::string>& comments) {
  write_comments(out, comments);
  out << "index\tp\tq\tlambda\n";
  const auto modes = spectrum.modes();
  for (std::size_t k = 0; k < modes.size(); ++k) {
    out << k + 1 << '\t' << modes[k].p << '\t' << modes[k].q << '\t'
        << format_double(modes[k].lambda) << '\n';
  }
}

void write_tabulation(std::ostream& out, const TabulatedDensity& table,
                      const std::vector<std::string>& comments) {
  write_comments(out, comments);
  out << "mu\tpdf\tcdf\n";
  for (std::size_t i = 0; i < table.grid.size(); ++i) {
    out << format_double(table.grid[i]) << '\t' << format_double(table.pdf[i]) << '\t'
        << format_double(table.cdf[i]) << '\n';
  }
}

void write_samples(std::ostream& out, const std::vector<double>& values,
                   const std::vector<std::string>& comments) {
  write_comments(out, comments);
  for (double v : values) out << format_double(v) << '\n';
}

void write_fluctuations(std::ostream& out, const FluctuationSample& sample,
                        const RescaledReturnPanel& returns,
                        const std::vector<std::string>& comments) {
  write_comments(out, comments);
  out << "date\tticker\tF\n";
  for (std::size_t k = 0; k < sample.values.size(); ++k) {
    const auto& p = sample.provenance[k];
    out << to_string(returns.dates[p.day]) << '\t' << returns.tickers[p.ticker] << '\t'
        << format_double(sample.values[k]) << '\n';
  }
}

void write_day_stats(std::ostream& out, const std::vector<DayStats>& stats,
                     const std::vector<std::string>& comments) {
  write_comments(out, comments);
  out << "date\tn_available\tmu\tsigma\n";
  for (const auto& s : stats) {
    out << to_string(s.date) << '\t' << s.n_available << '\t' << format_double(s.mu) << '\t'
        << format_double(s.sigma) << '\n';
  }
}

double interpolate_pdf(const TabulatedDensity& table, double x) {
  const auto& g = table.grid;
  if (x < g.front() || x > g.back()) return 0.0;
  auto it = std::upper_bound(g.begin(), g.end(), x);
  if (it == g.end()) return table.pdf.back();
  const auto i = static_cast<std::size_t>(it - g.begin());
  const double w = (x - g[i - 1]) / (g[i] - g[i - 1]);
  return table.pdf[i - 1] + w * (table.pdf[i] - table.pdf[i - 1]);
}

void write_overlay(std::ostream& out, const HistogramDensity& hist, const TabulatedDensity& ref,
                   const std::vector<std::string>& comments) {
  write_comments(out, comments);
  out << "bin_center\tdensity\tlog10_density\treference_pdf\n";
  for (std::size_t i = 0; i < hist.bins(); ++i) {
    const double d = hist.densities[i];
    const double log_d = d > 0.0 ? std::log10(d) : std::nan("");
    out << format_double(hist.center(i)) << '\t' << format_double(d) << '\t'
        << format_double(log_d) << '\t' << format_double(interpolate_pdf(ref, hist.center(i)))
        << '\n';
  }
}

}  // namespace bhp
