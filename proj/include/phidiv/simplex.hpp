#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace phidiv {

/* Interior point of the probability simplex: every weight above the interior
   floor, total mass 1 within 1e-12 (inputs off by at most 1e-9 are
   renormalized once at construction). */
class Distribution {
 public:
  static constexpr double interior_floor = 1e-12;

  std::size_t size() const { return w_.size(); }
  double operator[](std::size_t i) const { return w_[i]; }
  const std::vector<double>& weights() const { return w_; }
  std::vector<double>::const_iterator begin() const { return w_.begin(); }
  std::vector<double>::const_iterator end() const { return w_.end(); }

 private:
  friend Distribution make_distribution(std::vector<double> w);
  explicit Distribution(std::vector<double> w) : w_(std::move(w)) {}
  std::vector<double> w_;
};

Distribution make_distribution(std::vector<double> w);

/* Set partition of {0, ..., n-1}. Blocks are non-empty, disjoint, covering;
   canonical form sorts each block and orders blocks by first element. */
struct Partition {
  std::vector<std::vector<int>> blocks;
};

// "1,2;3" with 1-based indices; must partition {1..n}.
Partition parse_partition(std::string_view text, int n);
std::string format_partition(const Partition& a);
void validate_partition(const Partition& a, int n);

// Block masses of p under partition a (compensated block sums).
Distribution coarsen(const Distribution& p, const Partition& a);

double l1_distance(const Distribution& p, const Distribution& q);

/* Two-block split {i : p_i >= q_i} | {i : p_i < q_i}; ties join the first
   block, and when the second block is empty (p == q) the single full block is
   returned. Coarsening by this partition preserves the l1 distance. */
Partition binary_split(const Distribution& p, const Distribution& q);

// All set partitions of {0..n-1} in restricted-growth order; n <= 12.
std::vector<Partition> all_partitions(int n);

// One uniformly random restricted-growth partition of {0..n-1}.
Partition random_partition(std::mt19937_64& rng, int n);

/* Symmetric Dirichlet(1) draw via normalized exponential variates, clamped to
   `floor` with the deficit taken from the unclamped mass. Deterministic given
   the generator state. */
Distribution sample_interior(std::mt19937_64& rng, int n, double floor = Distribution::interior_floor);

}  // namespace phidiv
