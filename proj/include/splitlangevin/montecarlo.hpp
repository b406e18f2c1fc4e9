#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "splitlangevin/random.hpp"

namespace splitlangevin {

/// Counter-based per-path seeding: path_seed(k) depends only on the master
/// seed and k, so paths can run in any order on any worker.
struct SeedPolicy {
  std::uint64_t master_seed = 0;

  std::uint64_t path_seed(std::uint64_t path_index) const noexcept {
    return splitmix64(splitmix64(master_seed) ^ splitmix64(path_index + 0x632BE59BD9B4E019ULL));
  }
};

/// Independent N(0, dt) increments on [0, T].
struct BrownianGrid {
  double dt = 0.0;
  std::vector<double> increments;
  std::uint64_t path_seed = 0;

  double horizon() const noexcept { return dt * static_cast<double>(increments.size()); }
};

/// Throws Error(NonIntegralGrid) unless T / tau_f is a positive integer.
BrownianGrid generate_grid(double T, double tau_f, std::uint64_t path_seed);

/// Block sums of the fine increments. Throws Error(NonIntegralRatio) unless
/// tau / grid.dt is a positive integer dividing the grid length.
std::vector<double> coarsen(const BrownianGrid& grid, double tau);

/// Streaming mean/variance (Welford), mergeable with Chan's update.
struct Moments {
  std::int64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) noexcept;
  void merge(const Moments& other) noexcept;
  double variance() const noexcept;  // unbiased; 0 when n < 2
  double std_error() const noexcept;
};

struct EnsembleRecord {
  double label = 0.0;  // usually the step size of the level
  double estimate = 0.0;
  double std_error = 0.0;
};

struct EnsembleReport {
  std::int64_t n_paths = 0;
  std::vector<EnsembleRecord> records;
  std::map<std::string, std::string> metadata;
};

struct PathContext {
  std::size_t index;
  std::uint64_t seed;
};

/// Per-path job: fills `out` (fixed width) from its seed. Must be pure given
/// the context.
using PathJob = std::function<void(const PathContext&, std::span<double> out)>;

/// Worker count from SPLITLANGEVIN_WORKERS, else hardware concurrency.
unsigned default_workers();

/// Runs `job` for every path and reduces each output column to mean and
/// standard error. Paths are grouped in fixed blocks and reduced in path
/// order, so the report is bit-identical for any worker count. A failing
/// path rethrows its Error tagged with the lowest failing path index.
EnsembleReport run_ensemble(const PathJob& job, std::size_t n_paths, std::size_t width,
                            const SeedPolicy& seeds, unsigned workers,
                            std::span<const double> labels = {});

/// Column-wise moments, the raw form of run_ensemble.
std::vector<Moments> reduce_ensemble(const PathJob& job, std::size_t n_paths, std::size_t width,
                                     const SeedPolicy& seeds, unsigned workers);

/// Runs `job` for every path and keeps the raw outputs, row-major
/// n_paths x width.
std::vector<double> collect_paths(const PathJob& job, std::size_t n_paths, std::size_t width,
                                  const SeedPolicy& seeds, unsigned workers);

/// Pairwise (cascade) summation in index order.
double pairwise_sum(std::span<const double> values) noexcept;

}  // namespace splitlangevin
