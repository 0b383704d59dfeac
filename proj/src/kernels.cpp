#include "bhp/kernels.hpp"

#include <cstddef>
#include <exception>

namespace bhp::kernels {

namespace {

std::vector<double> gather_day(const RescaledReturnPanel& returns, std::size_t day) {
  std::vector<double> values;
  values.reserve(returns.n_tickers());
  for (std::size_t i = 0; i < returns.n_tickers(); ++i) {
    if (const auto v = returns.value(day, i)) values.push_back(*v);
  }
  return values;
}

}  // namespace

std::vector<double> tabulate_pdf(std::span<const double> grid, const PdfEvaluator& pdf) {
  std::vector<double> out(grid.size());
  std::vector<std::exception_ptr> errors(grid.size());
  const auto n = static_cast<std::ptrdiff_t>(grid.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      out[k] = pdf(grid[k]);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::vector<double> tabulate_pdf_serial(std::span<const double> grid, const PdfEvaluator& pdf) {
  std::vector<double> out;
  out.reserve(grid.size());
  for (double mu : grid) out.push_back(pdf(mu));
  return out;
}

void sample_draws(std::span<double> out, const ModeSumSampler& sampler, const CounterRng& rng,
                  std::uint64_t first_index) {
  const auto n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < n; ++j) {
    out[static_cast<std::size_t>(j)] =
        sampler.draw(rng, first_index + static_cast<std::uint64_t>(j));
  }
}

void sample_draws_serial(std::span<double> out, const ModeSumSampler& sampler,
                         const CounterRng& rng, std::uint64_t first_index) {
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = sampler.draw(rng, first_index + j);
}

std::vector<DayStats> all_day_stats(const RescaledReturnPanel& returns) {
  std::vector<DayStats> stats(returns.n_days());
  const auto n = static_cast<std::ptrdiff_t>(returns.n_days());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t t = 0; t < n; ++t) {
    const auto day = static_cast<std::size_t>(t);
    stats[day] = ensemble_stats(gather_day(returns, day), returns.dates[day]);
  }
  return stats;
}

std::vector<DayStats> all_day_stats_serial(const RescaledReturnPanel& returns) {
  std::vector<DayStats> stats;
  stats.reserve(returns.n_days());
  for (std::size_t day = 0; day < returns.n_days(); ++day) {
    stats.push_back(ensemble_stats(gather_day(returns, day), returns.dates[day]));
  }
  return stats;
}

}  // namespace bhp::kernels
