#include "bhp/return_pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "bhp/errors.hpp"
#include "bhp/kernels.hpp"

namespace bhp {

PricePanel PricePanel::create(std::vector<Date> dates, std::vector<std::string> tickers,
                              std::vector<std::optional<double>> closes,
                              std::string universe_label) {
  if (closes.size() != dates.size() * tickers.size()) {
    throw InvalidArgument("price matrix shape does not match dates x tickers");
  }
  for (std::size_t t = 1; t < dates.size(); ++t) {
    if (!(dates[t - 1] < dates[t])) {
      throw InvalidArgument("dates must be strictly increasing (at " + to_string(dates[t]) + ")");
    }
  }
  std::set<std::string> seen;
  for (const auto& name : tickers) {
    if (name.empty()) throw InvalidArgument("empty ticker name");
    if (!seen.insert(name).second) throw InvalidArgument("duplicate ticker '" + name + "'");
  }
  for (std::size_t k = 0; k < closes.size(); ++k) {
    if (closes[k] && !(std::isfinite(*closes[k]) && *closes[k] > 0.0)) {
      throw InvalidArgument("price for " + tickers[k % tickers.size()] + " on " +
                            to_string(dates[k / tickers.size()]) + " is not positive");
    }
  }
  PricePanel panel;
  panel.dates_ = std::move(dates);
  panel.tickers_ = std::move(tickers);
  panel.closes_ = std::move(closes);
  panel.label_ = std::move(universe_label);
  return panel;
}

std::string_view to_string(TransformMode mode) {
  return mode == TransformMode::magnitude ? "magnitude" : "signed";
}

TransformMode parse_transform_mode(std::string_view text) {
  if (text == "magnitude") return TransformMode::magnitude;
  if (text == "signed") return TransformMode::signed_power;
  throw InvalidArgument("unknown transform mode '" + std::string(text) +
                        "' (expected magnitude or signed)");
}

std::string_view to_string(SkipReason reason) {
  return reason == SkipReason::insufficient_ensemble ? "insufficient_ensemble"
                                                     : "degenerate_sigma";
}

double rescale(double raw_return, TransformMode mode) {
  const double magnitude = std::cbrt(raw_return * raw_return);
  if (mode == TransformMode::magnitude || raw_return >= 0.0) return magnitude;
  return -magnitude;
}

RescaledReturnPanel rescale_returns(const PricePanel& panel, TransformMode mode) {
  if (panel.n_dates() < 2) throw InvalidArgument("rescaled returns need at least 2 dates");
  RescaledReturnPanel out;
  out.dates.assign(panel.dates().begin(), panel.dates().end() - 1);
  out.tickers = panel.tickers();
  out.mode = mode;
  out.values.resize(out.dates.size() * out.tickers.size());
  for (std::size_t t = 0; t + 1 < panel.n_dates(); ++t) {
    for (std::size_t i = 0; i < panel.n_tickers(); ++i) {
      const auto now = panel.close(t, i);
      const auto next = panel.close(t + 1, i);
      if (now && next) {
        out.values[t * out.tickers.size() + i] = rescale((*next - *now) / *now, mode);
      }
    }
  }
  return out;
}

DayStats ensemble_stats(std::span<const double> values, Date date) {
  DayStats stats{date, values.size(), 0.0, 0.0};
  if (values.empty()) return stats;
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  double mean = sum / n;
  // two-pass with the residual-sum correction
  double resid = 0.0;
  for (double v : values) resid += v - mean;
  mean += resid / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  stats.mu = mean;
  stats.sigma = std::sqrt(ss / n);
  return stats;
}

DayStats day_stats(const RescaledReturnPanel& returns, std::size_t day) {
  if (day >= returns.n_days()) throw InvalidArgument("day index out of range");
  std::vector<double> values;
  for (std::size_t i = 0; i < returns.n_tickers(); ++i) {
    if (const auto v = returns.value(day, i)) values.push_back(*v);
  }
  return ensemble_stats(values, returns.dates[day]);
}

DayStats day_stats(const RescaledReturnPanel& returns, const Date& date) {
  const auto it = std::lower_bound(returns.dates.begin(), returns.dates.end(), date);
  if (it == returns.dates.end() || *it != date) {
    throw InvalidArgument("date " + to_string(date) + " not in return panel");
  }
  return day_stats(returns, static_cast<std::size_t>(it - returns.dates.begin()));
}

FluctuationSample pool_fluctuations(const RescaledReturnPanel& returns,
                                    const PoolOptions& options) {
  if (!(options.sigma_floor > 0.0)) throw InvalidArgument("sigma_floor must be > 0");
  FluctuationSample out;
  out.day_stats = kernels::all_day_stats(returns);
  for (std::size_t day = 0; day < returns.n_days(); ++day) {
    const auto& s = out.day_stats[day];
    if (s.n_available == 0 || s.n_available < options.min_n) {
      out.skipped_days.push_back({s.date, SkipReason::insufficient_ensemble});
      continue;
    }
    if (!(s.sigma >= options.sigma_floor)) {
      out.skipped_days.push_back({s.date, SkipReason::degenerate_sigma});
      continue;
    }
    for (std::size_t i = 0; i < returns.n_tickers(); ++i) {
      if (const auto v = returns.value(day, i)) {
        out.values.push_back((*v - s.mu) / s.sigma);
        out.provenance.push_back({day, i});
      }
    }
  }
  return out;
}

}  // namespace bhp
