#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace star {

/// Identifier of the term hash + generator pair. Written into every index
/// manifest; changing either function requires a new identifier.
inline constexpr std::string_view kSeedHashId = "fnv1a64-splitmix64-v1";

struct SeedConfig {
  std::uint32_t d = 1000;         // embedding dimension
  std::uint32_t k = 20;           // nonzeros per sign
  std::uint64_t global_seed = 0x5354415220524956ULL;

  /// Throws ConfigInvalid unless d >= 2, k >= 1 and 2k <= d.
  void validate() const;
  bool operator==(const SeedConfig&) const = default;
};

/// Sparse ternary vector: +1 at `positive`, -1 at `negative`, zero elsewhere.
struct SeedVector {
  std::uint32_t dim = 0;
  std::vector<std::uint32_t> positive;  // sorted
  std::vector<std::uint32_t> negative;  // sorted

  bool operator==(const SeedVector&) const = default;
};

/// FNV-1a over the UTF-8 bytes of the term.
std::uint64_t term_hash(std::string_view term) noexcept;

/// SplitMix64 finalizer; used both for key mixing and as the counter-based
/// generator (output i = mix(key + (i + 1) * golden)).
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Stateless counter-based stream of 64-bit values.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}

  std::uint64_t next() noexcept;
  /// Unbiased integer in [0, bound) (Lemire's multiply-shift with rejection).
  std::uint64_t below(std::uint64_t bound) noexcept;
  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept;

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// The seed vector of a term. A pure function of (term, config): 2k distinct
/// indices are drawn by a sparse partial Fisher-Yates shuffle of [0, d); the
/// first k become +1 and the rest -1.
SeedVector seed_for_term(std::string_view term, const SeedConfig& config);

/// Exact integer dot product. Throws DimensionMismatch.
std::int64_t seed_dot(const SeedVector& a, const SeedVector& b);

/// Adds weight * seed into a dense vector of length seed.dim.
void add_seed(std::span<double> dense, const SeedVector& seed, double weight);

struct NoiseEstimate {
  double mean = 0.0;
  double std_dev = 0.0;
  std::uint64_t sample_count = 0;
  std::uint32_t d = 0;
  std::uint32_t k = 0;
};

/// Mean and standard deviation of seed_dot / 2k over `n_samples` independent
/// pairs of seed vectors drawn from synthetic terms keyed by `sample_seed`.
NoiseEstimate estimate_noise(const SeedConfig& config, std::uint64_t n_samples,
                             std::uint64_t sample_seed);

struct AngleReport {
  std::uint64_t pair_count = 0;
  double min_angle_deg = 0.0;
  double max_angle_deg = 0.0;
  double mean_angle_deg = 0.0;
  double epsilon_deg = 0.0;
  double fraction_within = 0.0;  // pairs with |angle - 90| <= epsilon
};

/// Pairwise angle statistics over the seeds of `terms`. Pairs of identical
/// terms are skipped. When the number of distinct pairs exceeds `max_pairs`,
/// `max_pairs` pairs are sampled deterministically.
AngleReport quasi_orthogonality_report(std::span<const std::string> terms, const SeedConfig& config,
                                       double epsilon_deg, std::uint64_t max_pairs = 2'000'000);

/// Same, over `n_vectors` synthetic terms.
AngleReport quasi_orthogonality_report(std::uint64_t n_vectors, const SeedConfig& config,
                                       double epsilon_deg, std::uint64_t max_pairs = 2'000'000);

}  // namespace star
