#include "splitlangevin/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <optional>
#include <string>
#include <thread>

#include "splitlangevin/error.hpp"

namespace splitlangevin {

namespace {

constexpr std::size_t kBlockSize = 64;

std::size_t integral_ratio(double num, double den, ErrorCode code, const char* what) {
  if (!(num > 0.0) || !(den > 0.0)) {
    throw Error(code, std::string(what) + ": lengths must be positive");
  }
  const double ratio = num / den;
  const double n = std::round(ratio);
  if (n < 1.0 || std::abs(ratio - n) > 1e-9 * ratio) {
    throw Error(code, std::string(what) + ": " + std::to_string(num) + " / " +
                          std::to_string(den) + " is not integral");
  }
  return static_cast<std::size_t>(n);
}

// Runs block_fn(b) for every block on `workers` threads. The exception of
// the lowest failing block is rethrown.
template <class BlockFn>
void for_each_block(std::size_t n_blocks, unsigned workers, BlockFn&& block_fn) {
  std::vector<std::exception_ptr> failures(n_blocks);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  const auto worker = [&] {
    for (;;) {
      const std::size_t b = next.fetch_add(1);
      if (b >= n_blocks || failed.load()) return;
      try {
        block_fn(b);
      } catch (...) {
        failures[b] = std::current_exception();
        failed.store(true);
      }
    }
  };
  const unsigned n_threads =
      static_cast<unsigned>(std::min<std::size_t>(std::max(1u, workers), n_blocks));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
}

void run_path(const PathJob& job, std::size_t k, const SeedPolicy& seeds, std::span<double> out) {
  try {
    job(PathContext{k, seeds.path_seed(k)}, out);
  } catch (Error& e) {
    e.at_path(static_cast<std::int64_t>(k));
    throw;
  }
}

std::vector<Moments> merge_pairwise(std::vector<std::vector<Moments>> parts) {
  while (parts.size() > 1) {
    std::vector<std::vector<Moments>> next;
    next.reserve((parts.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < parts.size(); i += 2) {
      auto merged = std::move(parts[i]);
      for (std::size_t c = 0; c < merged.size(); ++c) merged[c].merge(parts[i + 1][c]);
      next.push_back(std::move(merged));
    }
    if (parts.size() % 2 == 1) next.push_back(std::move(parts.back()));
    parts = std::move(next);
  }
  return parts.empty() ? std::vector<Moments>{} : std::move(parts.front());
}

}  // namespace

BrownianGrid generate_grid(double T, double tau_f, std::uint64_t path_seed) {
  const std::size_t n = integral_ratio(T, tau_f, ErrorCode::NonIntegralGrid, "grid");
  BrownianGrid grid;
  grid.dt = tau_f;
  grid.path_seed = path_seed;
  grid.increments.resize(n);
  NormalStream normals(path_seed);
  const double sd = std::sqrt(tau_f);
  for (double& dw : grid.increments) dw = sd * normals();
  return grid;
}

std::vector<double> coarsen(const BrownianGrid& grid, double tau) {
  const std::size_t k = integral_ratio(tau, grid.dt, ErrorCode::NonIntegralRatio, "coarsen");
  if (grid.increments.size() % k != 0) {
    throw Error(ErrorCode::NonIntegralRatio, "coarse step does not divide the horizon");
  }
  std::vector<double> coarse(grid.increments.size() / k);
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    coarse[i] = pairwise_sum(std::span(grid.increments).subspan(i * k, k));
  }
  return coarse;
}

void Moments::add(double x) noexcept {
  ++n;
  const double d = x - mean;
  mean += d / static_cast<double>(n);
  m2 += d * (x - mean);
}

void Moments::merge(const Moments& o) noexcept {
  if (o.n == 0) return;
  if (n == 0) {
    *this = o;
    return;
  }
  const double na = static_cast<double>(n);
  const double nb = static_cast<double>(o.n);
  const double nt = na + nb;
  const double d = o.mean - mean;
  mean += d * nb / nt;
  m2 += o.m2 + d * d * na * nb / nt;
  n += o.n;
}

double Moments::variance() const noexcept {
  return n < 2 ? 0.0 : m2 / static_cast<double>(n - 1);
}

double Moments::std_error() const noexcept {
  return n < 2 ? 0.0 : std::sqrt(variance() / static_cast<double>(n));
}

unsigned default_workers() {
  if (const char* env = std::getenv("SPLITLANGEVIN_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<Moments> reduce_ensemble(const PathJob& job, std::size_t n_paths, std::size_t width,
                                     const SeedPolicy& seeds, unsigned workers) {
  const std::size_t n_blocks = (n_paths + kBlockSize - 1) / kBlockSize;
  std::vector<std::vector<Moments>> blocks(n_blocks);
  for_each_block(n_blocks, workers, [&](std::size_t b) {
    std::vector<Moments> acc(width);
    std::vector<double> out(width);
    const std::size_t end = std::min(n_paths, (b + 1) * kBlockSize);
    for (std::size_t k = b * kBlockSize; k < end; ++k) {
      std::fill(out.begin(), out.end(), 0.0);
      run_path(job, k, seeds, out);
      for (std::size_t c = 0; c < width; ++c) acc[c].add(out[c]);
    }
    blocks[b] = std::move(acc);
  });
  auto merged = merge_pairwise(std::move(blocks));
  merged.resize(width);
  return merged;
}

EnsembleReport run_ensemble(const PathJob& job, std::size_t n_paths, std::size_t width,
                            const SeedPolicy& seeds, unsigned workers,
                            std::span<const double> labels) {
  if (n_paths < 2) {
    throw Error(ErrorCode::InvalidArgument, "an ensemble needs at least two paths");
  }
  const auto moments = reduce_ensemble(job, n_paths, width, seeds, workers);
  EnsembleReport report;
  report.n_paths = static_cast<std::int64_t>(n_paths);
  report.records.reserve(width);
  for (std::size_t c = 0; c < width; ++c) {
    const double label = c < labels.size() ? labels[c] : static_cast<double>(c);
    report.records.push_back({label, moments[c].mean, moments[c].std_error()});
  }
  report.metadata["master_seed"] = std::to_string(seeds.master_seed);
  return report;
}

std::vector<double> collect_paths(const PathJob& job, std::size_t n_paths, std::size_t width,
                                  const SeedPolicy& seeds, unsigned workers) {
  std::vector<double> rows(n_paths * width, 0.0);
  const std::size_t n_blocks = (n_paths + kBlockSize - 1) / kBlockSize;
  for_each_block(n_blocks, workers, [&](std::size_t b) {
    const std::size_t end = std::min(n_paths, (b + 1) * kBlockSize);
    for (std::size_t k = b * kBlockSize; k < end; ++k) {
      run_path(job, k, seeds, std::span(rows).subspan(k * width, width));
    }
  });
  return rows;
}

double pairwise_sum(std::span<const double> values) noexcept {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace splitlangevin
