#pragma once

// Data-parallel inner loops. Each OpenMP kernel has a `_serial` twin that is
// the reference implementation; the two must agree bit for bit, which the
// unit tests check and the benchmark times.

#include <cstdint>
#include <span>
#include <vector>

#include "bhp/bhp_distribution.hpp"
#include "bhp/return_pipeline.hpp"

namespace bhp::kernels {

/// pdf at every grid point. Points are independent; a failure at any point
/// rethrows the error of the lowest failing index.
std::vector<double> tabulate_pdf(std::span<const double> grid, const PdfEvaluator& pdf);
std::vector<double> tabulate_pdf_serial(std::span<const double> grid, const PdfEvaluator& pdf);

/// out[j] = sampler.draw(rng, first_index + j).
void sample_draws(std::span<double> out, const ModeSumSampler& sampler, const CounterRng& rng,
                  std::uint64_t first_index = 0);
void sample_draws_serial(std::span<double> out, const ModeSumSampler& sampler,
                         const CounterRng& rng, std::uint64_t first_index = 0);

/// Ensemble stats of every day in the panel.
std::vector<DayStats> all_day_stats(const RescaledReturnPanel& returns);
std::vector<DayStats> all_day_stats_serial(const RescaledReturnPanel& returns);

}  // namespace bhp::kernels
