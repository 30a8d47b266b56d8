#include "star/seedspace.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

#include "star/error.hpp"

namespace star {

void SeedConfig::validate() const {
  if (d < 2) throw Error(ErrorCode::ConfigInvalid, "d must be at least 2");
  if (k < 1) throw Error(ErrorCode::ConfigInvalid, "k must be at least 1");
  if (2ULL * k > d) throw Error(ErrorCode::ConfigInvalid, "2k must not exceed d");
}

std::uint64_t term_hash(std::string_view term) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : term) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t mix64(std::uint64_t x) noexcept {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

std::uint64_t CounterRng::next() noexcept {
  ++counter_;
  return mix64(key_ + counter_ * 0x9e3779b97f4a7c15ULL);
}

__extension__ using u128 = unsigned __int128;

std::uint64_t CounterRng::below(std::uint64_t bound) noexcept {
  u128 m = static_cast<u128>(next()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<u128>(next()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double CounterRng::uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

namespace {

// Partial Fisher-Yates over the virtual array [0, d), touching only the
// swapped slots.
std::vector<std::uint32_t> sample_distinct(CounterRng& rng, std::uint32_t d, std::uint32_t count) {
  std::vector<std::uint32_t> out(count);
  if (count > 64) {
    std::vector<std::uint32_t> slots(d);
    for (std::uint32_t i = 0; i < d; ++i) slots[i] = i;
    for (std::uint32_t i = 0; i < count; ++i) {
      auto j = static_cast<std::uint32_t>(i + rng.below(d - i));
      std::swap(slots[i], slots[j]);
      out[i] = slots[i];
    }
    return out;
  }
  std::vector<std::pair<std::uint32_t, std::uint32_t>> moved;  // slot -> value
  moved.reserve(2 * count);
  auto value_at = [&](std::uint32_t slot) {
    for (const auto& [s, v] : moved)
      if (s == slot) return v;
    return slot;
  };
  auto set = [&](std::uint32_t slot, std::uint32_t value) {
    for (auto& [s, v] : moved)
      if (s == slot) {
        v = value;
        return;
      }
    moved.emplace_back(slot, value);
  };
  for (std::uint32_t i = 0; i < count; ++i) {
    auto j = static_cast<std::uint32_t>(i + rng.below(d - i));
    std::uint32_t vi = value_at(i);
    std::uint32_t vj = value_at(j);
    set(j, vi);
    out[i] = vj;
  }
  return out;
}

std::int64_t intersect_count(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
  std::int64_t n = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++n;
      ++ia;
      ++ib;
    }
  }
  return n;
}

}  // namespace

SeedVector seed_for_term(std::string_view term, const SeedConfig& config) {
  config.validate();
  CounterRng rng(mix64(term_hash(term) ^ mix64(config.global_seed)));
  auto picks = sample_distinct(rng, config.d, 2 * config.k);
  SeedVector v;
  v.dim = config.d;
  v.positive.assign(picks.begin(), picks.begin() + config.k);
  v.negative.assign(picks.begin() + config.k, picks.end());
  std::sort(v.positive.begin(), v.positive.end());
  std::sort(v.negative.begin(), v.negative.end());
  return v;
}

std::int64_t seed_dot(const SeedVector& a, const SeedVector& b) {
  if (a.dim != b.dim)
    throw Error(ErrorCode::DimensionMismatch,
                "seed dimensions " + std::to_string(a.dim) + " vs " + std::to_string(b.dim));
  return intersect_count(a.positive, b.positive) + intersect_count(a.negative, b.negative) -
         intersect_count(a.positive, b.negative) - intersect_count(a.negative, b.positive);
}

void add_seed(std::span<double> dense, const SeedVector& seed, double weight) {
  if (dense.size() != seed.dim)
    throw Error(ErrorCode::DimensionMismatch, "dense vector does not match seed dimension");
  for (auto p : seed.positive) dense[p] += weight;
  for (auto n : seed.negative) dense[n] -= weight;
}

NoiseEstimate estimate_noise(const SeedConfig& config, std::uint64_t n_samples, std::uint64_t sample_seed) {
  config.validate();
  if (n_samples < 100) throw Error(ErrorCode::ConfigInvalid, "estimate_noise needs at least 100 samples");

  SeedConfig sampling = config;
  sampling.global_seed = mix64(sample_seed ^ 0x6e6f697365ULL);
  const double norm = 2.0 * config.k;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::uint64_t i = 0; i < n_samples; ++i) {
    auto a = seed_for_term(std::to_string(2 * i), sampling);
    auto b = seed_for_term(std::to_string(2 * i + 1), sampling);
    double x = static_cast<double>(seed_dot(a, b)) / norm;
    sum += x;
    sum_sq += x * x;
  }
  const auto n = static_cast<double>(n_samples);
  NoiseEstimate est;
  est.mean = sum / n;
  est.std_dev = std::sqrt(std::max(0.0, (sum_sq - n * est.mean * est.mean) / (n - 1.0)));
  est.sample_count = n_samples;
  est.d = config.d;
  est.k = config.k;
  return est;
}

AngleReport quasi_orthogonality_report(std::span<const std::string> terms, const SeedConfig& config,
                                       double epsilon_deg, std::uint64_t max_pairs) {
  config.validate();
  if (terms.size() < 2) throw Error(ErrorCode::ConfigInvalid, "need at least two vectors");

  std::vector<SeedVector> seeds;
  seeds.reserve(terms.size());
  for (const auto& t : terms) seeds.push_back(seed_for_term(t, config));

  AngleReport report;
  report.epsilon_deg = epsilon_deg;
  report.min_angle_deg = 180.0;
  report.max_angle_deg = 0.0;
  double angle_sum = 0.0;
  std::uint64_t within = 0;
  const double norm = 2.0 * config.k;

  auto visit = [&](std::size_t i, std::size_t j) {
    if (terms[i] == terms[j]) return;
    double c = std::clamp(static_cast<double>(seed_dot(seeds[i], seeds[j])) / norm, -1.0, 1.0);
    double angle = std::acos(c) * 180.0 / std::numbers::pi;
    report.min_angle_deg = std::min(report.min_angle_deg, angle);
    report.max_angle_deg = std::max(report.max_angle_deg, angle);
    angle_sum += angle;
    if (std::abs(angle - 90.0) <= epsilon_deg) ++within;
    ++report.pair_count;
  };

  const std::uint64_t n = terms.size();
  const std::uint64_t all_pairs = n * (n - 1) / 2;
  if (all_pairs <= max_pairs) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) visit(i, j);
  } else {
    CounterRng rng(mix64(config.global_seed ^ 0x7061697273ULL));
    for (std::uint64_t s = 0; s < max_pairs; ++s) {
      auto i = rng.below(n);
      auto j = rng.below(n - 1);
      if (j >= i) ++j;
      visit(i, j);
    }
  }

  if (report.pair_count == 0) {
    report.min_angle_deg = report.max_angle_deg = 0.0;
    return report;
  }
  report.mean_angle_deg = angle_sum / static_cast<double>(report.pair_count);
  report.fraction_within = static_cast<double>(within) / static_cast<double>(report.pair_count);
  return report;
}

AngleReport quasi_orthogonality_report(std::uint64_t n_vectors, const SeedConfig& config,
                                       double epsilon_deg, std::uint64_t max_pairs) {
  std::vector<std::string> terms;
  terms.reserve(n_vectors);
  for (std::uint64_t i = 0; i < n_vectors; ++i) terms.push_back("qo:" + std::to_string(i));
  return quasi_orthogonality_report(terms, config, epsilon_deg, max_pairs);
}

}  // namespace star
