#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bhp/date.hpp"

namespace bhp {

/// Dates x tickers closing prices. Missing observations are empty optionals.
class PricePanel {
 public:
  /// `closes` is row-major (date, ticker). Throws InvalidArgument when dates
  /// are not strictly increasing, tickers repeat, shapes disagree, or a
  /// present price is not finite and > 0.
  static PricePanel create(std::vector<Date> dates, std::vector<std::string> tickers,
                           std::vector<std::optional<double>> closes,
                           std::string universe_label = {});

  std::size_t n_dates() const noexcept { return dates_.size(); }
  std::size_t n_tickers() const noexcept { return tickers_.size(); }
  const std::vector<Date>& dates() const noexcept { return dates_; }
  const std::vector<std::string>& tickers() const noexcept { return tickers_; }
  const std::string& universe_label() const noexcept { return label_; }
  std::optional<double> close(std::size_t day, std::size_t ticker) const {
    return closes_[day * tickers_.size() + ticker];
  }
  const std::vector<std::optional<double>>& closes() const noexcept { return closes_; }

  friend bool operator==(const PricePanel&, const PricePanel&) = default;

 private:
  PricePanel() = default;
  std::vector<Date> dates_;
  std::vector<std::string> tickers_;
  std::vector<std::optional<double>> closes_;
  std::string label_;
};

/// magnitude: |r|^(2/3), the real cube root of r^2. signed_power: sign(r)|r|^(2/3).
enum class TransformMode { magnitude, signed_power };

std::string_view to_string(TransformMode mode);
/// Accepts "magnitude" and "signed". Throws InvalidArgument otherwise.
TransformMode parse_transform_mode(std::string_view text);

struct RescaledReturnPanel {
  std::vector<Date> dates;  // one fewer than the price panel, stamped at t
  std::vector<std::string> tickers;
  std::vector<std::optional<double>> values;  // row-major (day, ticker)
  TransformMode mode = TransformMode::magnitude;

  std::size_t n_days() const noexcept { return dates.size(); }
  std::size_t n_tickers() const noexcept { return tickers.size(); }
  std::optional<double> value(std::size_t day, std::size_t ticker) const {
    return values[day * tickers.size() + ticker];
  }
};

/// Rescaled value of one raw return under the given mode.
double rescale(double raw_return, TransformMode mode);

/// r = (Y(t+1) - Y(t)) / Y(t), rescaled. Throws InvalidArgument for fewer than
/// two dates.
RescaledReturnPanel rescale_returns(const PricePanel& panel, TransformMode mode);

struct DayStats {
  Date date;
  std::size_t n_available = 0;
  double mu = 0.0;
  double sigma = 0.0;

  bool usable() const noexcept { return n_available > 0; }
};

/// Population mean and standard deviation of one day's available values.
/// Empty input gives n_available = 0 with mu = sigma = 0.
DayStats ensemble_stats(std::span<const double> values, Date date = {});

/// Stats for day index `day`. Throws InvalidArgument when out of range.
DayStats day_stats(const RescaledReturnPanel& returns, std::size_t day);
/// Stats for a date. Throws InvalidArgument when the date is not in the panel.
DayStats day_stats(const RescaledReturnPanel& returns, const Date& date);

enum class SkipReason { insufficient_ensemble, degenerate_sigma };
std::string_view to_string(SkipReason reason);

struct SkippedDay {
  Date date;
  SkipReason reason;
};

struct Provenance {
  std::size_t day = 0;     // index into RescaledReturnPanel::dates
  std::size_t ticker = 0;  // index into RescaledReturnPanel::tickers
};

struct PoolOptions {
  std::size_t min_n = 10;
  double sigma_floor = 1e-12;
};

/// Pooled F_i(t) = (S_i(t) - mu(t)) / sigma(t), ordered by day then ticker.
struct FluctuationSample {
  std::vector<double> values;
  std::vector<Provenance> provenance;
  std::vector<SkippedDay> skipped_days;
  std::vector<DayStats> day_stats;  // every day, retained or not
};

/// Days with fewer than min_n available stocks or sigma below sigma_floor are
/// skipped and recorded, never fatal.
FluctuationSample pool_fluctuations(const RescaledReturnPanel& returns,
                                    const PoolOptions& options = {});

}  // namespace bhp
