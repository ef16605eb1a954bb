#include "phidiv/properties.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "phidiv/errors.hpp"
#include "phidiv/numerics.hpp"

namespace phidiv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void validate_grid(int grid_n, double delta) {
  if (grid_n < 2) throw ShapeError("grid_n must be at least 2");
  if (!(delta > 0.0 && delta < 0.1)) throw DomainError("delta must lie in (0, 0.1)");
}

struct MarginTracker {
  double worst = kInf;
  nlohmann::ordered_json witness;

  // Strict < keeps the first (lexicographically smallest) argmin as witness.
  bool offer(double margin) { return margin < worst; }
  void accept(double margin, nlohmann::ordered_json w) {
    worst = margin;
    witness = std::move(w);
  }
};

CheckReport finish(MarginTracker& t, GridMeta grid, std::uint64_t seed) {
  CheckReport r;
  r.worst_margin = t.worst;
  r.verdict = t.worst >= -margin_slack ? Verdict::Pass : Verdict::Fail;
  r.strict = t.worst > margin_slack;
  r.witness = std::move(t.witness);
  r.grid = grid;
  r.seed = seed;
  return r;
}

double mix_weight(double lambda, double a, double b) {
  return lambda * a + (1.0 - lambda) * b;
}

Distribution mix(double lambda, const Distribution& a, const Distribution& b) {
  std::vector<double> w(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) w[i] = mix_weight(lambda, a[i], b[i]);
  return make_distribution(std::move(w));
}

std::vector<double> swap01(const std::vector<double>& v) {
  std::vector<double> out = v;
  std::swap(out[0], out[1]);
  return out;
}

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass:
      return "Pass";
    case Verdict::Fail:
      return "Fail";
    case Verdict::Inconclusive:
      return "Inconclusive";
  }
  return "?";
}

double g_func(const DeformedExponential& f, double x) {
  double i2 = f.derivative(x, 2, Deriv::Inverse);
  if (i2 == 0.0 || !std::isfinite(i2)) {
    throw SingularError("g_func: inverse second derivative vanishes at x = " +
                        std::to_string(x));
  }
  return -f.derivative(x, 1, Deriv::Inverse) / i2;
}

double h_func(const DeformedExponential& f, double x) {
  if (x <= f.support_lower()) {
    throw DomainError("h_func: x at or below the support boundary");
  }
  double p2 = f.derivative(x, 2, Deriv::Forward);
  if (p2 == 0.0 || !std::isfinite(p2)) {
    throw SingularError("h_func: phi'' vanishes at x = " + std::to_string(x));
  }
  return f.derivative(x, 1, Deriv::Forward) / p2;
}

double F_alpha(const DeformedExponential& f, double alpha, double x, double y) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("F_alpha: alpha outside [0, 1]");
  return f.phi((1.0 - alpha) * f.phi_inv(x) + alpha * f.phi_inv(y));
}

double G_func(const DeformedExponential& f, double x, double y) {
  double s = f.phi(x) + f.phi(y);
  if (!(s > 0.0 && s < 1.0)) {
    throw DomainError("G_func: phi(x) + phi(y) = " + std::to_string(s) +
                      " must lie in (0, 1)");
  }
  return f.phi_inv(s);
}

Hessian2 hessian_G(const DeformedExponential& f, double x, double y) {
  double z = f.phi(x) + f.phi(y);
  if (!(z > 0.0 && z < 1.0)) {
    throw DomainError("hessian_G: phi(x) + phi(y) must lie in (0, 1)");
  }
  double f1x = f.derivative(x, 1, Deriv::Forward);
  double f2x = f.derivative(x, 2, Deriv::Forward);
  double f1y = f.derivative(y, 1, Deriv::Forward);
  double f2y = f.derivative(y, 2, Deriv::Forward);
  double i1 = f.derivative(z, 1, Deriv::Inverse);
  double i2 = f.derivative(z, 2, Deriv::Inverse);
  Hessian2 h;
  h.xx = f2x * i1 + f1x * f1x * i2;
  h.yy = f2y * i1 + f1y * f1y * i2;
  h.xy = f1x * f1y * i2;
  h.det = h.xx * h.yy - h.xy * h.xy;
  return h;
}

Hessian2 hessian_F_alpha(const DeformedExponential& f, double alpha, double x,
                         double y) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw DomainError("hessian_F_alpha: alpha outside [0, 1]");
  }
  double ix1 = f.derivative(x, 1, Deriv::Inverse);
  double ix2 = f.derivative(x, 2, Deriv::Inverse);
  double iy1 = f.derivative(y, 1, Deriv::Inverse);
  double iy2 = f.derivative(y, 2, Deriv::Inverse);
  double z = (1.0 - alpha) * f.phi_inv(x) + alpha * f.phi_inv(y);
  double p1 = f.derivative(z, 1, Deriv::Forward);
  double p2 = f.derivative(z, 2, Deriv::Forward);
  const double oma = 1.0 - alpha;
  Hessian2 h;
  h.xx = oma * ix2 * p1 + oma * oma * ix1 * ix1 * p2;
  h.yy = alpha * iy2 * p1 + alpha * alpha * iy1 * iy1 * p2;
  h.xy = alpha * oma * ix1 * iy1 * p2;
  h.det = h.xx * h.yy - h.xy * h.xy;
  return h;
}

namespace {

/* Uniform pair grids share 1D g evaluations: on x_i = delta + i*h both the
   sums x_i + x_j and the midpoints (x_i + x_j)/2 depend only on i + j. */
class GridCache {
 public:
  GridCache(const DeformedExponential& f, int grid_n, double delta)
      : f_(f), grid_n_(grid_n), delta_(delta), h_((1.0 - 2.0 * delta) / (grid_n - 1)) {
    gx_.resize(static_cast<std::size_t>(grid_n), kInf);
    for (int i = 0; i < grid_n; ++i) {
      gx_[static_cast<std::size_t>(i)] = g_func(f_, point(i));
    }
  }

  double point(int i) const { return delta_ + h_ * static_cast<double>(i); }
  double sum_point(int k) const { return 2.0 * delta_ + h_ * static_cast<double>(k); }
  double mid_point(int k) const { return delta_ + 0.5 * h_ * static_cast<double>(k); }
  double g_at(int i) const { return gx_[static_cast<std::size_t>(i)]; }

  double g_sum(int k) {
    if (gsum_.empty()) gsum_.assign(gx_.size() * 2, kInf);
    auto& slot = gsum_[static_cast<std::size_t>(k)];
    if (slot == kInf) slot = g_func(f_, sum_point(k));
    return slot;
  }

  double g_mid(int k) {
    if (gmid_.empty()) gmid_.assign(gx_.size() * 2, kInf);
    auto& slot = gmid_[static_cast<std::size_t>(k)];
    if (slot == kInf) slot = g_func(f_, mid_point(k));
    return slot;
  }

  int grid_n() const { return grid_n_; }
  double delta() const { return delta_; }

 private:
  const DeformedExponential& f_;
  int grid_n_;
  double delta_;
  double h_;
  std::vector<double> gx_, gsum_, gmid_;
};

}  // namespace

CheckReport check_superadditive_g(const DeformedExponential& f, int grid_n,
                                  double delta) {
  validate_grid(grid_n, delta);
  GridCache cache(f, grid_n, delta);
  MarginTracker tracker;
  long long samples = 0;
  const double limit = 1.0 - delta + 1e-15;
  for (int i = 0; i < grid_n; ++i) {
    for (int j = i; j < grid_n; ++j) {
      if (cache.sum_point(i + j) > limit) break;
      double margin = cache.g_sum(i + j) - cache.g_at(i) - cache.g_at(j);
      ++samples;
      if (tracker.offer(margin)) {
        tracker.accept(margin, {{"x", cache.point(i)},
                                {"y", cache.point(j)},
                                {"sum", cache.sum_point(i + j)},
                                {"margin", margin}});
      }
    }
  }
  return finish(tracker, {grid_n, delta, samples}, 0);
}

CheckReport check_concave_g(const DeformedExponential& f, int grid_n, double delta) {
  validate_grid(grid_n, delta);
  GridCache cache(f, grid_n, delta);
  MarginTracker tracker;
  long long samples = 0;
  const double limit = 1.0 - delta + 1e-15;
  for (int i = 0; i < grid_n; ++i) {
    for (int j = i; j < grid_n; ++j) {
      if (cache.sum_point(i + j) > limit) break;
      double margin = cache.g_mid(i + j) - 0.5 * (cache.g_at(i) + cache.g_at(j));
      ++samples;
      if (tracker.offer(margin)) {
        tracker.accept(margin, {{"x", cache.point(i)},
                                {"y", cache.point(j)},
                                {"midpoint", cache.mid_point(i + j)},
                                {"margin", margin}});
      }
    }
  }
  return finish(tracker, {grid_n, delta, samples}, 0);
}

double sampling_floor(const DeformedExponential& f) {
  double floor = Distribution::interior_floor;
  if (f.kind() == DeformedExponential::Kind::NumericTable) {
    // Keep every weight and every coarsened block mass inside the tabulated range.
    floor = std::max({floor, f.table_phi().front(), 1.0 - f.table_phi().back()});
  }
  return floor;
}

CheckReport check_partition_inequality(const DeformedExponential& f, int n,
                                       int trials, std::uint64_t seed) {
  if (n < 2 || n > 12) throw ShapeError("check_partition_inequality: n must lie in [2, 12]");
  if (trials < 1) throw ShapeError("check_partition_inequality: trials must be positive");
  std::mt19937_64 rng(seed);
  const double floor = sampling_floor(f);
  const bool exhaustive = n <= 6;
  std::vector<Partition> parts;
  if (exhaustive) parts = all_partitions(n);
  MarginTracker tracker;
  long long samples = 0;
  for (int t = 0; t < trials; ++t) {
    Distribution p = sample_interior(rng, n, floor);
    Distribution q = sample_interior(rng, n, floor);
    double full = d_phi(f, p, q).value;
    if (!exhaustive) {
      parts.clear();
      for (int k = 0; k < 50; ++k) parts.push_back(random_partition(rng, n));
    }
    for (const Partition& a : parts) {
      double coarse = d_phi(f, coarsen(p, a), coarsen(q, a)).value;
      double margin = full - coarse;
      ++samples;
      if (tracker.offer(margin)) {
        tracker.accept(margin, {{"trial", t},
                                {"partition", format_partition(a)},
                                {"p", p.weights()},
                                {"q", q.weights()},
                                {"divergence", full},
                                {"coarsened", coarse},
                                {"margin", margin}});
      }
    }
  }
  CheckReport r = finish(tracker, {n, floor, samples}, seed);
  return r;
}

CheckReport check_joint_convexity(const DeformedExponential& f, int n, int trials,
                                  std::vector<double> lambdas, std::uint64_t seed) {
  if (n < 2 || n > 12) throw ShapeError("check_joint_convexity: n must lie in [2, 12]");
  if (trials < 1) throw ShapeError("check_joint_convexity: trials must be positive");
  if (lambdas.empty()) throw ShapeError("check_joint_convexity: need at least one lambda");
  for (double l : lambdas) {
    if (!(l > 0.0 && l < 1.0)) {
      throw DomainError("check_joint_convexity: lambdas must lie strictly in (0, 1)");
    }
  }
  std::mt19937_64 rng(seed);
  const double floor = sampling_floor(f);
  MarginTracker tracker;
  long long samples = 0;

  for (int t = 0; t < trials; ++t) {
    Distribution p1 = sample_interior(rng, n, floor);
    Distribution p2 = sample_interior(rng, n, floor);
    Distribution q1 = sample_interior(rng, n, floor);
    Distribution q2 = sample_interior(rng, n, floor);
    double d1 = d_phi(f, p1, q1).value;
    double d2 = d_phi(f, p2, q2).value;
    for (double lam : lambdas) {
      double margin =
          lam * d1 + (1.0 - lam) * d2 - d_phi(f, mix(lam, p1, p2), mix(lam, q1, q2)).value;
      ++samples;
      if (tracker.offer(margin)) {
        tracker.accept(margin, {{"kind", "random"},
                                {"trial", t},
                                {"lambda", lam},
                                {"p1", p1.weights()},
                                {"p2", p2.weights()},
                                {"q1", q1.weights()},
                                {"q2", q2.weights()},
                                {"margin", margin}});
      }
    }
  }

  /* Swap-pair scan: bases (a, b, rest) against (b, a, rest), perturbing the
     first two coordinates and compensating on the third, mixed at 1/2. This
     direction witnesses any failure tied to non-concavity of g. */
  if (n >= 3) {
    const int lat_n = 12;
    for (int ia = 0; ia < lat_n; ++ia) {
      for (int ib = 0; ib < lat_n; ++ib) {
        double a = 0.05 + (0.9 - 0.05) * ia / (lat_n - 1);
        double b = 0.05 + (0.9 - 0.05) * ib / (lat_n - 1);
        double rest = 1.0 - a - b;
        if (rest < 0.05) continue;
        double share = rest / static_cast<double>(n - 2);
        if (share <= floor) continue;
        std::vector<double> base(static_cast<std::size_t>(n), share);
        base[0] = a;
        base[1] = b;
        double r = 0.8 * std::min({a - floor, b - floor, 0.5 * (share - floor)});
        if (r <= 0.0) continue;
        for (int ix = 0; ix < 9; ++ix) {
          for (int iy = 0; iy < 9; ++iy) {
            double dx = -r + 2.0 * r * ix / 8.0;
            double dy = -r + 2.0 * r * iy / 8.0;
            std::vector<double> qb = base;
            qb[0] = a + dx;
            qb[1] = b + dy;
            qb[2] = base[2] - dx - dy;
            if (qb[0] <= floor || qb[1] <= floor || qb[2] <= floor) continue;
            Distribution p1 = make_distribution(base);
            Distribution p2 = make_distribution(swap01(base));
            Distribution q1 = make_distribution(qb);
            Distribution q2 = make_distribution(swap01(qb));
            double margin = 0.5 * d_phi(f, p1, q1).value + 0.5 * d_phi(f, p2, q2).value -
                            d_phi(f, mix(0.5, p1, p2), mix(0.5, q1, q2)).value;
            ++samples;
            if (tracker.offer(margin)) {
              tracker.accept(margin, {{"kind", "swap-pair"},
                                      {"base", base},
                                      {"dx", dx},
                                      {"dy", dy},
                                      {"lambda", 0.5},
                                      {"margin", margin}});
            }
          }
        }
      }
    }
  }

  return finish(tracker, {n, floor, samples}, seed);
}

PinskerEstimate pinsker_constant(const DeformedExponential& f, int grid_n,
                                 double delta) {
  validate_grid(grid_n, delta);
  auto inv1 = [&f](double x) { return f.derivative(x, 1, Deriv::Inverse); };
  auto objective = [&](double s, double t) {
    return 0.125 / (t - s) * (inv1(1.0 - t) / inv1(1.0 - s) - inv1(t) / inv1(s));
  };

  const double h = (1.0 - 2.0 * delta) / (grid_n - 1);
  double best = kInf, bs = 0.0, bt = 0.0;
  long long samples = 0, excluded = 0;
  auto consider = [&](double s, double t) {
    if (!(s >= delta && t <= 1.0 - delta && t - s >= delta * (1.0 - 1e-12))) return;
    ++samples;
    try {
      double e = objective(s, t);
      if (e < best) {
        best = e;
        bs = s;
        bt = t;
      }
    } catch (const DomainError&) {
      ++excluded;
    }
  };

  for (int i = 0; i < grid_n; ++i) {
    double s = delta + h * i;
    for (int j = i + 1; j < grid_n; ++j) consider(s, delta + h * j);
    consider(s, s + delta);  // tightest admissible separation
  }

  // Local refinement: halve the spacing around the argmin, three passes.
  double spacing = h;
  for (int pass = 0; pass < 3; ++pass) {
    spacing *= 0.5;
    double cs = bs, ct = bt;
    for (int di = -4; di <= 4; ++di) {
      for (int dj = -4; dj <= 4; ++dj) {
        consider(cs + spacing * di, ct + spacing * dj);
      }
    }
  }

  PinskerEstimate est;
  est.c_hat = best;
  est.p_at = bs;
  est.q_at = bt;
  est.grid = {grid_n, delta, samples};
  est.excluded = excluded;
  bool usable = best > 0.0 && std::isfinite(best) && excluded * 10 <= samples;
  est.verdict = usable ? Verdict::Pass : Verdict::Inconclusive;
  return est;
}

CheckReport check_pinsker(const DeformedExponential& f, double c, int n, int trials,
                          std::uint64_t seed) {
  if (!(std::isfinite(c) && c > 0.0)) throw DomainError("check_pinsker: c must be positive");
  if (n < 2) throw ShapeError("check_pinsker: n must be at least 2");
  if (trials < 1) throw ShapeError("check_pinsker: trials must be positive");
  std::mt19937_64 rng(seed);
  const double floor = sampling_floor(f);
  MarginTracker tracker;
  long long samples = 0;
  for (int t = 0; t < trials; ++t) {
    Distribution p = sample_interior(rng, n, floor);
    Distribution q = p;
    bool diagonal = (t % 4 == 3);
    if (diagonal) {
      /* Two-coordinate perturbation q = p + eps*(e_i - e_j): the bound is
         tight in this regime, so uniform sampling alone would miss narrow
         violations. */
      std::size_t i = std::min<std::size_t>(
          static_cast<std::size_t>(uniform01(rng()) * n), static_cast<std::size_t>(n - 1));
      std::size_t j = (i + 1 + std::min<std::size_t>(
                                   static_cast<std::size_t>(uniform01(rng()) * (n - 1)),
                                   static_cast<std::size_t>(n - 2))) %
                      static_cast<std::size_t>(n);
      double tau = std::exp(std::log(1e-3) + uniform01(rng()) * std::log(200.0));
      double step = tau * (p[j] - floor);
      if (step > 0.0) {
        std::vector<double> w = p.weights();
        w[i] += step;
        w[j] -= step;
        q = make_distribution(std::move(w));
      } else {
        diagonal = false;
        q = sample_interior(rng, n, floor);
      }
    } else {
      q = sample_interior(rng, n, floor);
    }
    double div = d_phi(f, p, q).value;
    double l1 = l1_distance(p, q);
    double margin = div - c * l1 * l1;
    ++samples;
    if (tracker.offer(margin)) {
      tracker.accept(margin, {{"trial", t},
                              {"near_diagonal", diagonal},
                              {"p", p.weights()},
                              {"q", q.weights()},
                              {"divergence", div},
                              {"l1", l1},
                              {"margin", margin}});
    }
  }
  CheckReport r = finish(tracker, {n, floor, samples}, seed);
  return r;
}

TsallisCharacterization characterize_tsallis(const DeformedExponential& f,
                                             int grid_n, double delta) {
  validate_grid(grid_n, delta);
  TsallisCharacterization out;
  out.superadditive = check_superadditive_g(f, grid_n, delta);
  out.concave = check_concave_g(f, grid_n, delta);

  const double h = (1.0 - 2.0 * delta) / (grid_n - 1);
  double sxx = 0.0, sxg = 0.0, gmax = 0.0;
  std::vector<double> xs(static_cast<std::size_t>(grid_n)), gs(static_cast<std::size_t>(grid_n));
  for (int i = 0; i < grid_n; ++i) {
    double x = delta + h * i;
    double g = g_func(f, x);
    xs[static_cast<std::size_t>(i)] = x;
    gs[static_cast<std::size_t>(i)] = g;
    sxx += x * x;
    sxg += x * g;
    gmax = std::fmax(gmax, std::abs(g));
  }
  double slope = sxg / sxx;  // least squares through the origin for g = x/q
  double max_res = 0.0;
  for (int i = 0; i < grid_n; ++i) {
    max_res = std::fmax(max_res, std::abs(gs[static_cast<std::size_t>(i)] -
                                          slope * xs[static_cast<std::size_t>(i)]));
  }
  out.q_fit = slope > 0.0 ? 1.0 / slope : 0.0;
  out.max_residual = max_res;
  out.grid = {grid_n, delta, grid_n};
  bool linear = slope > 0.0 && max_res <= 1e-6 * std::fmax(gmax, 1e-300);
  bool pass = out.superadditive.verdict == Verdict::Pass &&
              out.concave.verdict == Verdict::Pass && linear;
  out.is_tsallis = pass ? Verdict::Pass : Verdict::Fail;
  return out;
}

}  // namespace phidiv
