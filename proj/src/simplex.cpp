#include "phidiv/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "phidiv/errors.hpp"
#include "phidiv/numerics.hpp"

namespace phidiv {

Distribution make_distribution(std::vector<double> w) {
  if (w.empty()) throw ShapeError("make_distribution: empty weight vector");
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!std::isfinite(w[i])) {
      throw BoundaryError("make_distribution: non-finite weight at index " +
                          std::to_string(i));
    }
    if (w[i] <= Distribution::interior_floor) {
      throw BoundaryError("make_distribution: weight " + std::to_string(w[i]) +
                          " at index " + std::to_string(i) +
                          " is at or below the interior floor");
    }
  }
  double s = compensated_sum(w);
  double off = std::abs(s - 1.0);
  if (off > 1e-9) {
    throw NormalizationError("make_distribution: weights sum to " + std::to_string(s));
  }
  if (off > 1e-12) {
    for (double& x : w) x /= s;
  }
  return Distribution(std::move(w));
}

void validate_partition(const Partition& a, int n) {
  if (n <= 0) throw ShapeError("partition: n must be positive");
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  int covered = 0;
  if (a.blocks.empty()) throw IndexError("partition: no blocks");
  for (const auto& block : a.blocks) {
    if (block.empty()) throw IndexError("partition: empty block");
    for (int i : block) {
      if (i < 0 || i >= n) {
        throw IndexError("partition: index " + std::to_string(i) +
                         " out of range for n = " + std::to_string(n));
      }
      if (seen[static_cast<std::size_t>(i)]) {
        throw IndexError("partition: index " + std::to_string(i) + " repeated");
      }
      seen[static_cast<std::size_t>(i)] = 1;
      ++covered;
    }
  }
  if (covered != n) throw IndexError("partition: blocks do not cover all indices");
}

Partition parse_partition(std::string_view text, int n) {
  Partition a;
  std::stringstream blocks(std::string{text});
  std::string block;
  while (std::getline(blocks, block, ';')) {
    std::vector<int> ids;
    std::stringstream items(block);
    std::string item;
    while (std::getline(items, item, ',')) {
      std::size_t pos = 0;
      int v;
      try {
        v = std::stoi(item, &pos);
      } catch (const std::exception&) {
        throw IndexError("partition '" + std::string(text) + "': '" + item +
                         "' is not an index");
      }
      if (pos != item.size()) {
        throw IndexError("partition '" + std::string(text) + "': '" + item +
                         "' is not an index");
      }
      ids.push_back(v - 1);  // external format is 1-based
    }
    a.blocks.push_back(std::move(ids));
  }
  validate_partition(a, n);
  for (auto& b : a.blocks) std::sort(b.begin(), b.end());
  std::sort(a.blocks.begin(), a.blocks.end(),
            [](const auto& x, const auto& y) { return x.front() < y.front(); });
  return a;
}

std::string format_partition(const Partition& a) {
  std::string out;
  for (std::size_t b = 0; b < a.blocks.size(); ++b) {
    if (b) out += ';';
    for (std::size_t i = 0; i < a.blocks[b].size(); ++i) {
      if (i) out += ',';
      out += std::to_string(a.blocks[b][i] + 1);
    }
  }
  return out;
}

Distribution coarsen(const Distribution& p, const Partition& a) {
  validate_partition(a, static_cast<int>(p.size()));
  std::vector<double> out;
  out.reserve(a.blocks.size());
  for (const auto& block : a.blocks) {
    CompensatedAccumulator acc;
    for (int i : block) acc.add(p[static_cast<std::size_t>(i)]);
    out.push_back(acc.value());
  }
  return make_distribution(std::move(out));
}

double l1_distance(const Distribution& p, const Distribution& q) {
  if (p.size() != q.size()) throw ShapeError("l1_distance: size mismatch");
  CompensatedAccumulator acc;
  for (std::size_t i = 0; i < p.size(); ++i) acc.add(std::abs(p[i] - q[i]));
  return acc.value();
}

Partition binary_split(const Distribution& p, const Distribution& q) {
  if (p.size() != q.size()) throw ShapeError("binary_split: size mismatch");
  Partition a;
  std::vector<int> ge, lt;
  for (std::size_t i = 0; i < p.size(); ++i) {
    (p[i] >= q[i] ? ge : lt).push_back(static_cast<int>(i));
  }
  if (ge.empty()) {
    a.blocks.push_back(std::move(lt));
  } else {
    a.blocks.push_back(std::move(ge));
    if (!lt.empty()) a.blocks.push_back(std::move(lt));
  }
  return a;
}

std::vector<Partition> all_partitions(int n) {
  if (n <= 0 || n > 12) throw ShapeError("all_partitions: n must lie in [1, 12]");
  std::vector<Partition> out;
  // Restricted growth strings: s[0] = 0, s[i] <= max(s[0..i-1]) + 1.
  std::vector<int> s(static_cast<std::size_t>(n), 0);
  std::vector<int> maxes(static_cast<std::size_t>(n), 0);
  auto emit = [&]() {
    int nblocks = *std::max_element(s.begin(), s.end()) + 1;
    Partition a;
    a.blocks.assign(static_cast<std::size_t>(nblocks), {});
    for (int i = 0; i < n; ++i) {
      a.blocks[static_cast<std::size_t>(s[static_cast<std::size_t>(i)])].push_back(i);
    }
    out.push_back(std::move(a));
  };
  while (true) {
    emit();
    int i = n - 1;
    for (; i > 0; --i) {
      if (s[static_cast<std::size_t>(i)] <= maxes[static_cast<std::size_t>(i - 1)]) break;
    }
    if (i == 0) break;
    ++s[static_cast<std::size_t>(i)];
    maxes[static_cast<std::size_t>(i)] =
        std::max(maxes[static_cast<std::size_t>(i - 1)], s[static_cast<std::size_t>(i)]);
    for (int j = i + 1; j < n; ++j) {
      s[static_cast<std::size_t>(j)] = 0;
      maxes[static_cast<std::size_t>(j)] = maxes[static_cast<std::size_t>(j - 1)];
    }
  }
  return out;
}

Partition random_partition(std::mt19937_64& rng, int n) {
  if (n <= 0) throw ShapeError("random_partition: n must be positive");
  std::vector<int> s(static_cast<std::size_t>(n), 0);
  int maxv = 0;
  for (int i = 1; i < n; ++i) {
    // Uniform over admissible labels 0..maxv+1 keeps the string valid.
    int label = static_cast<int>(uniform01(rng()) * static_cast<double>(maxv + 2));
    label = std::min(label, maxv + 1);
    s[static_cast<std::size_t>(i)] = label;
    maxv = std::max(maxv, label);
  }
  Partition a;
  a.blocks.assign(static_cast<std::size_t>(maxv + 1), {});
  for (int i = 0; i < n; ++i) {
    a.blocks[static_cast<std::size_t>(s[static_cast<std::size_t>(i)])].push_back(i);
  }
  return a;
}

Distribution sample_interior(std::mt19937_64& rng, int n, double floor) {
  if (n <= 0) throw ShapeError("sample_interior: n must be positive");
  if (!(floor >= Distribution::interior_floor && floor * n < 0.5)) {
    throw DomainError("sample_interior: floor out of range");
  }
  std::vector<double> w(static_cast<std::size_t>(n));
  while (true) {
    double total = 0.0;
    for (double& x : w) {
      x = -std::log1p(-uniform01(rng()));  // Exp(1)
      total += x;
    }
    if (total > 1e-300) {
      for (double& x : w) x /= total;
      break;
    }
  }
  /* Clamp to the floor, taking the deficit proportionally from the unclamped
     mass; one extra round settles entries pushed under by the rescale. */
  for (int round = 0; round < n; ++round) {
    double clamped = 0.0, free_mass = 0.0;
    bool any = false;
    for (double x : w) {
      if (x < floor) {
        clamped += floor;
        any = true;
      } else {
        free_mass += x;
      }
    }
    if (!any) break;
    double scale = (1.0 - clamped) / free_mass;
    bool stable = true;
    for (double& x : w) {
      if (x < floor) {
        x = floor;
      } else {
        x *= scale;
        if (x < floor) stable = false;
      }
    }
    if (stable) break;
  }
  return make_distribution(std::move(w));
}

}  // namespace phidiv
