#include "ocran/optimize.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <cmath>
#include <limits>
#include <numeric>

#include "ocran/error.hpp"
#include "ocran/parallel.hpp"
#include "ocran/random.hpp"
#include "ocran/random_instances.hpp"
#include "ocran/sumrate.hpp"

namespace ocran {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kUpperEig = 1.0 - 1e-9;
constexpr double kActiveTol = 1e-6;

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::vector<double> axpy(const std::vector<double>& x, double t, const std::vector<double>& d) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + t * d[i];
  return out;
}

Eigen::Index param_count(Eigen::Index m) { return m * m; }

// Min-norm point of the convex hull of the rows (Frank-Wolfe with exact line search).
std::vector<double> min_norm_combination(const std::vector<std::vector<double>>& grads) {
  if (grads.size() == 1) return grads[0];
  const std::size_t n = grads.size();
  const std::size_t dim = grads[0].size();
  std::vector<double> lambda(n, 1.0 / static_cast<double>(n));
  auto combine = [&] {
    std::vector<double> v(dim, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < dim; ++j) v[j] += lambda[i] * grads[i][j];
    }
    return v;
  };
  std::vector<double> v = combine();
  for (int it = 0; it < 500; ++it) {
    std::size_t best = 0;
    double best_dot = kInf;
    for (std::size_t i = 0; i < n; ++i) {
      double dot = std::inner_product(grads[i].begin(), grads[i].end(), v.begin(), 0.0);
      if (dot < best_dot) {
        best_dot = dot;
        best = i;
      }
    }
    std::vector<double> diff(dim);
    for (std::size_t j = 0; j < dim; ++j) diff[j] = grads[best][j] - v[j];
    double dd = std::inner_product(diff.begin(), diff.end(), diff.begin(), 0.0);
    if (dd < 1e-30) break;
    double gamma = std::clamp(-std::inner_product(v.begin(), v.end(), diff.begin(), 0.0) / dd, 0.0, 1.0);
    if (gamma < 1e-12) break;
    for (std::size_t i = 0; i < n; ++i) lambda[i] *= (1.0 - gamma);
    lambda[best] += gamma;
    v = combine();
  }
  return v;
}

std::vector<SubsetPair> tight_at(const RateRegion& region, const std::vector<double>& rates) {
  std::vector<SubsetPair> out;
  for (const auto& c : region.constraints) {
    double used = 0.0;
    for (int l : members(c.pair.users)) used += rates[l];
    if (std::isfinite(c.bound_bits) && used >= c.bound_bits - kActiveTol) out.push_back(c.pair);
  }
  return out;
}

double weighted_value(const RateRegion& region, const std::vector<double>& w) {
  if (region.empty()) return -kInf;
  auto r = region.max_weighted(w);
  return std::inner_product(w.begin(), w.end(), r.begin(), 0.0);
}

struct Trial {
  std::vector<double> x;
  double f = -kInf;
  std::vector<double> trace;
  bool converged = false;
  int iterations = 0;
};

struct Direction {
  std::vector<double> d;
  double scale = 0.0;  // norm of the primary piece gradient
};

// Epsilon-steepest ascent: the direction is the min-norm point of the hull of
// piece gradients within eps of the minimum; eps shrinks when no step helps.
template <typename F, typename D>
void gradient_ascent(Trial& t, const F& f, const D& direction, const GaussianScenario& sc,
                     const OptimizerConfig& cfg) {
  double eps = 1e-2;
  double step = 1.0;
  while (t.iterations < cfg.max_iters) {
    ++t.iterations;
    Direction dir = direction(t.x, eps);
    const double dn = norm2(dir.d);
    if (dn <= 1e-9 * std::max(dir.scale, 1.0)) {
      eps *= 0.1;
      if (eps < 1e-12) {
        t.converged = true;
        return;
      }
      continue;
    }
    bool accepted = false;
    double trial = std::min(step * 4.0, 1e3 / dn);
    while (trial * dn >= cfg.step_tol) {
      std::vector<double> cand = project_params(sc, axpy(t.x, trial, dir.d));
      double fc = f(cand);
      if (fc > t.f) {
        const double gain = fc - t.f;
        t.x = std::move(cand);
        t.f = fc;
        t.trace.push_back(fc);
        step = trial;
        accepted = gain > 0.0;
        break;
      }
      trial *= 0.5;
    }
    if (!accepted) {
      eps *= 0.1;
      step = 1.0;
      if (eps < 1e-12) {
        t.converged = true;
        return;
      }
    }
  }
}

template <typename F>
void coordinate_ascent(Trial& t, const F& f, const GaussianScenario& sc, const OptimizerConfig& cfg) {
  double delta = 0.1;
  while (t.iterations < cfg.max_iters) {
    ++t.iterations;
    bool improved = false;
    for (std::size_t i = 0; i < t.x.size(); ++i) {
      for (double sign : {1.0, -1.0}) {
        std::vector<double> cand = t.x;
        cand[i] += sign * delta;
        cand = project_params(sc, cand);
        double fc = f(cand);
        if (fc > t.f) {
          t.x = std::move(cand);
          t.f = fc;
          improved = true;
          break;
        }
      }
    }
    if (improved) {
      t.trace.push_back(t.f);
    } else {
      delta *= 0.5;
      if (delta < cfg.step_tol) {
        t.converged = true;
        return;
      }
    }
  }
}

template <typename F>
void grid_search(Trial& t, const F& f, const GaussianScenario& sc, const OptimizerConfig& cfg) {
  const int relays = sc.num_relays();
  int per_axis = 2;
  while (std::pow(per_axis + 1, relays) <= std::max(cfg.max_iters, 4)) ++per_axis;
  std::vector<int> idx(static_cast<std::size_t>(relays), 0);
  while (true) {
    QuantizerSetGaussian q;
    for (int k = 0; k < relays; ++k) {
      double level = kUpperEig * idx[k] / (per_axis - 1);
      q.b.push_back(level * sc.noise_cov[k].inverse());
    }
    std::vector<double> x = quantizer_params(sc, q);
    double fx = f(x);
    ++t.iterations;
    if (fx > t.f) {
      t.x = std::move(x);
      t.f = fx;
      t.trace.push_back(fx);
    }
    int k = 0;
    while (k < relays && ++idx[k] == per_axis) idx[k++] = 0;
    if (k == relays) break;
  }
  t.converged = true;
}

}  // namespace

void OptimizerConfig::validate(int num_users) const {
  if (restarts < 1) throw ValidationError("restarts: must be at least 1");
  if (max_iters < 1) throw ValidationError("iters: must be at least 1");
  if (!(step_tol > 0.0)) throw ValidationError("step_tol: must be positive");
  if (objective == Objective::weighted) {
    if (static_cast<int>(weights.size()) != num_users) {
      throw ValidationError("weights: expected " + std::to_string(num_users) + " entries");
    }
    for (double w : weights) {
      if (!(w >= 0.0) || !std::isfinite(w)) throw ValidationError("weights: entries must be finite and nonnegative");
    }
  }
}

std::vector<double> quantizer_params(const GaussianScenario& sc, const QuantizerSetGaussian& q) {
  std::vector<double> out;
  for (int k = 0; k < sc.num_relays(); ++k) {
    CMatrix root = sqrt_psd(sc.noise_cov[k]);
    CMatrix g = hermitian_part(root * q.b[k] * root);
    const Eigen::Index m = g.rows();
    for (Eigen::Index i = 0; i < m; ++i) out.push_back(g(i, i).real());
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = i + 1; j < m; ++j) {
        out.push_back(g(i, j).real());
        out.push_back(g(i, j).imag());
      }
    }
  }
  return out;
}

namespace {

std::vector<CMatrix> params_to_g(const GaussianScenario& sc, const std::vector<double>& params) {
  std::vector<CMatrix> gs;
  std::size_t pos = 0;
  for (int k = 0; k < sc.num_relays(); ++k) {
    const Eigen::Index m = sc.relay_antennas(k);
    if (pos + static_cast<std::size_t>(param_count(m)) > params.size()) {
      throw ValidationError("params: too few quantizer coordinates");
    }
    CMatrix g = CMatrix::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) g(i, i) = params[pos++];
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = i + 1; j < m; ++j) {
        std::complex<double> v(params[pos], params[pos + 1]);
        pos += 2;
        g(i, j) = v;
        g(j, i) = std::conj(v);
      }
    }
    gs.push_back(std::move(g));
  }
  if (pos != params.size()) throw ValidationError("params: too many quantizer coordinates");
  return gs;
}

std::vector<double> g_to_params(const std::vector<CMatrix>& gs) {
  std::vector<double> out;
  for (const auto& g : gs) {
    const Eigen::Index m = g.rows();
    for (Eigen::Index i = 0; i < m; ++i) out.push_back(g(i, i).real());
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = i + 1; j < m; ++j) {
        out.push_back(g(i, j).real());
        out.push_back(g(i, j).imag());
      }
    }
  }
  return out;
}

}  // namespace

QuantizerSetGaussian quantizers_from_params(const GaussianScenario& sc, const std::vector<double>& params) {
  auto gs = params_to_g(sc, params);
  QuantizerSetGaussian q;
  for (int k = 0; k < sc.num_relays(); ++k) {
    CMatrix r = inv_sqrt_pd(sc.noise_cov[k]);
    q.b.push_back(hermitian_part(r * gs[k] * r));
  }
  return q;
}

std::vector<double> project_params(const GaussianScenario& sc, const std::vector<double>& params) {
  auto gs = params_to_g(sc, params);
  for (auto& g : gs) g = clip_eigenvalues(g, 0.0, kUpperEig);
  return g_to_params(gs);
}

std::vector<double> constraint_param_gradient(const GaussianScenario& sc, const QuantizerSetGaussian& q,
                                              SubsetPair pair) {
  auto d = rate_constraint_gradient(sc, q, pair);
  std::vector<double> out;
  for (int k = 0; k < sc.num_relays(); ++k) {
    CMatrix r = inv_sqrt_pd(sc.noise_cov[k]);
    CMatrix e = r * d[k] * r;
    const Eigen::Index m = e.rows();
    for (Eigen::Index i = 0; i < m; ++i) out.push_back(e(i, i).real());
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = i + 1; j < m; ++j) {
        out.push_back(2.0 * e(i, j).real());
        out.push_back(2.0 * e(i, j).imag());
      }
    }
  }
  return out;
}

SumBranch sum_objective_branch(const GaussianScenario& sc, const QuantizerSetGaussian& q) {
  const Mask all = full_mask(sc.num_users());
  SumBranch out;
  out.value = kInf;
  double second = kInf;
  for (Mask s = 0; s <= full_mask(sc.num_relays()); ++s) {
    double v = rate_constraint_gaussian(sc, q, {all, s});
    if (v < out.value) {
      second = out.value;
      out.value = v;
      out.relays = s;
    } else if (v < second) {
      second = v;
    }
  }
  out.gap_to_next = second - out.value;
  if (std::isfinite(out.value)) out.gradient = constraint_param_gradient(sc, q, {all, out.relays});
  return out;
}

std::vector<std::vector<double>> weighted_dual_vertices(int users, const std::vector<double>& weights) {
  if (users < 1 || users > 4) throw CapacityError("weights: weighted objective supports 1 to 4 users");
  if (static_cast<int>(weights.size()) != users) throw ValidationError("weights: expected one entry per user");
  const int sets = static_cast<int>(full_mask(users));
  const int cols = sets + users;
  Eigen::VectorXd rhs(users);
  for (int l = 0; l < users; ++l) rhs(l) = weights[l];
  std::vector<std::vector<double>> out;
  for (std::uint32_t basis = 0; basis < (1u << cols); ++basis) {
    if (std::popcount(basis) != users) continue;
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(users, users);
    std::vector<int> idx;
    for (int c = 0; c < cols; ++c) {
      if (!(basis >> c & 1u)) continue;
      const int col = static_cast<int>(idx.size());
      idx.push_back(c);
      for (int l = 0; l < users; ++l) {
        if (c < sets) {
          m(l, col) = has(static_cast<Mask>(c + 1), l) ? 1.0 : 0.0;
        } else {
          m(l, col) = (c - sets == l) ? -1.0 : 0.0;
        }
      }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
    if (lu.rank() < users) continue;
    Eigen::VectorXd sol = lu.solve(rhs);
    if (sol.minCoeff() < -1e-12) continue;
    std::vector<double> y(static_cast<std::size_t>(sets) + 1, 0.0);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      if (idx[i] < sets) y[static_cast<std::size_t>(idx[i]) + 1] = std::max(sol(static_cast<Eigen::Index>(i)), 0.0);
    }
    bool seen = false;
    for (const auto& v : out) {
      double diff = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) diff = std::max(diff, std::abs(v[i] - y[i]));
      seen = seen || diff < 1e-12;
    }
    if (!seen) out.push_back(std::move(y));
  }
  return out;
}

double weighted_value_from_duals(const std::vector<std::vector<double>>& duals, const std::vector<double>& tight) {
  for (std::size_t tm = 1; tm < tight.size(); ++tm) {
    if (!(tight[tm] >= -1e-9)) return -kInf;
  }
  double best = kInf;
  for (const auto& y : duals) {
    double v = 0.0;
    for (std::size_t tm = 1; tm < tight.size(); ++tm) {
      if (y[tm] > 0.0) v += y[tm] * tight[tm];
    }
    best = std::min(best, v);
  }
  return duals.empty() ? 0.0 : best;
}

std::vector<double> tightest_gaussian_bounds(const GaussianScenario& sc, const QuantizerSetGaussian& q) {
  std::vector<double> tight(static_cast<std::size_t>(full_mask(sc.num_users())) + 1, kInf);
  for (Mask tm = 1; tm <= full_mask(sc.num_users()); ++tm) {
    for (Mask s = 0; s <= full_mask(sc.num_relays()); ++s) {
      tight[tm] = std::min(tight[tm], rate_constraint_gaussian(sc, q, {tm, s}));
    }
  }
  return tight;
}

double gaussian_objective(const GaussianScenario& sc, const QuantizerSetGaussian& q, const OptimizerConfig& cfg) {
  if (cfg.objective == Objective::sum_rate) return sum_rate_bound_gaussian(sc, q);
  return weighted_value_from_duals(weighted_dual_vertices(sc.num_users(), cfg.weights), tightest_gaussian_bounds(sc, q));
}

GaussianOptimum optimize_gaussian_quantizers(const GaussianScenario& sc, const OptimizerConfig& cfg) {
  cfg.validate(sc.num_users());
  const Mask all = full_mask(sc.num_users());
  const Mask relays_full = full_mask(sc.num_relays());

  const auto duals = cfg.objective == Objective::weighted ? weighted_dual_vertices(sc.num_users(), cfg.weights)
                                                         : std::vector<std::vector<double>>{};
  const int user_sets = static_cast<int>(full_mask(sc.num_users()));

  auto f = [&](const std::vector<double>& x) {
    QuantizerSetGaussian q = quantizers_from_params(sc, x);
    if (cfg.objective == Objective::sum_rate) return sum_rate_bound_gaussian(sc, q);
    return weighted_value_from_duals(duals, tightest_gaussian_bounds(sc, q));
  };

  // Near-active pieces of the max-min objective; the tie window grows with the step.
  auto direction = [&](const std::vector<double>& x, double window) {
    QuantizerSetGaussian q = quantizers_from_params(sc, x);
    std::map<std::pair<Mask, Mask>, std::vector<double>> grad_cache;
    auto grad = [&](Mask users, Mask relays) -> const std::vector<double>& {
      auto key = std::make_pair(users, relays);
      auto it = grad_cache.find(key);
      if (it == grad_cache.end()) it = grad_cache.emplace(key, constraint_param_gradient(sc, q, {users, relays})).first;
      return it->second;
    };
    // bounds[T][S]
    std::vector<std::vector<double>> bounds(static_cast<std::size_t>(user_sets) + 1);
    std::vector<double> tight(static_cast<std::size_t>(user_sets) + 1, kInf);
    std::vector<Mask> arg(static_cast<std::size_t>(user_sets) + 1, 0);
    const Mask first_t = cfg.objective == Objective::sum_rate ? full_mask(sc.num_users()) : 1;
    for (Mask tm = first_t; tm <= static_cast<Mask>(user_sets); ++tm) {
      for (Mask s = 0; s <= relays_full; ++s) {
        double v = rate_constraint_gaussian(sc, q, {tm, s});
        bounds[tm].push_back(v);
        if (v < tight[tm]) {
          tight[tm] = v;
          arg[tm] = s;
        }
      }
    }
    Direction out;
    std::vector<std::vector<double>> pieces;
    if (cfg.objective == Objective::sum_rate) {
      const Mask tm = full_mask(sc.num_users());
      const auto& g0 = grad(tm, arg[tm]);
      out.scale = norm2(g0);
      const double eps = window;
      pieces.push_back(g0);
      for (Mask s = 0; s <= relays_full; ++s) {
        if (s != arg[tm] && bounds[tm][s] <= tight[tm] + eps) pieces.push_back(grad(tm, s));
      }
    } else {
      std::vector<double> values;
      for (const auto& y : duals) {
        double v = 0.0;
        for (Mask tm = 1; tm <= static_cast<Mask>(user_sets); ++tm) {
          if (y[tm] > 0.0) v += y[tm] * tight[tm];
        }
        values.push_back(v);
      }
      auto combine = [&](const std::vector<double>& y, Mask swap_t, Mask swap_s) {
        std::vector<double> g(x.size(), 0.0);
        for (Mask tm = 1; tm <= static_cast<Mask>(user_sets); ++tm) {
          if (!(y[tm] > 0.0)) continue;
          const auto& gt = grad(tm, tm == swap_t ? swap_s : arg[tm]);
          for (std::size_t i = 0; i < g.size(); ++i) g[i] += y[tm] * gt[i];
        }
        return g;
      };
      const std::size_t primary = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
      pieces.push_back(combine(duals[primary], 0, 0));
      out.scale = norm2(pieces[0]);
      const double eps = window;
      for (std::size_t j = 0; j < duals.size(); ++j) {
        if (values[j] > values[primary] + eps) continue;
        if (j != primary) pieces.push_back(combine(duals[j], 0, 0));
        for (Mask tm = 1; tm <= static_cast<Mask>(user_sets); ++tm) {
          if (!(duals[j][tm] > 0.0)) continue;
          for (Mask s = 0; s <= relays_full; ++s) {
            if (s != arg[tm] && bounds[tm][s] <= tight[tm] + eps) pieces.push_back(combine(duals[j], tm, s));
          }
        }
      }
    }
    out.d = min_norm_combination(pieces);
    return out;
  };

  std::vector<Trial> trials(static_cast<std::size_t>(cfg.restarts));
  parallel_for(trials.size(), cfg.threads, [&](std::size_t r) {
    Trial& t = trials[r];
    if (r == 0) {
      t.x = quantizer_params(sc, zero_quantizers(sc));
    } else {
      Rng rng(split_seed(cfg.seed, r));
      std::vector<CMatrix> gs;
      for (int k = 0; k < sc.num_relays(); ++k) gs.push_back(random_pd(rng, sc.relay_antennas(k), 0.0, 0.99));
      t.x = g_to_params(gs);
    }
    t.x = project_params(sc, t.x);
    t.f = f(t.x);
    for (int shrink = 0; shrink < 60 && !std::isfinite(t.f); ++shrink) {
      for (double& v : t.x) v *= 0.5;
      t.f = f(t.x);
    }
    t.trace.push_back(t.f);
    switch (cfg.method) {
      case Method::projected_gradient:
        gradient_ascent(t, f, direction, sc, cfg);
        break;
      case Method::coordinate_ascent:
        coordinate_ascent(t, f, sc, cfg);
        break;
      case Method::grid:
        grid_search(t, f, sc, cfg);
        break;
    }
  });

  std::size_t best = 0;
  for (std::size_t r = 1; r < trials.size(); ++r) {
    if (trials[r].f > trials[best].f) best = r;
  }
  GaussianOptimum out;
  out.quantizers = quantizers_from_params(sc, trials[best].x);
  validate_quantizers(sc, out.quantizers);
  out.objective = trials[best].f;
  out.trace = trials[best].trace;
  out.converged = trials[best].converged;
  out.restart = static_cast<int>(best);
  out.iterations = trials[best].iterations;
  if (cfg.objective == Objective::sum_rate) {
    for (Mask s = 0; s <= relays_full; ++s) {
      if (rate_constraint_gaussian(sc, out.quantizers, {all, s}) <= out.objective + kActiveTol) {
        out.active.push_back({all, s});
      }
    }
  } else {
    RateRegion region = region_gaussian(sc, out.quantizers);
    if (!region.empty()) out.active = tight_at(region, region.max_weighted(cfg.weights));
  }
  return out;
}

double discrete_objective(const DiscreteScenario& sc, const AuxChannels& aux, const OptimizerConfig& cfg) {
  if (cfg.objective == Objective::sum_rate) return jd_sum_rate(sc, aux);
  return weighted_value(region_discrete(sc, aux, InnerBound::general), cfg.weights);
}

DiscreteOptimum optimize_discrete_aux(const DiscreteScenario& sc, const std::vector<int>& sizes,
                                      const OptimizerConfig& cfg) {
  cfg.validate(sc.num_users());
  if (static_cast<int>(sizes.size()) != sc.num_relays()) throw ValidationError("U: expected one size per relay");
  for (int s : sizes) {
    if (s < 1) throw ValidationError("U: sizes must be positive");
  }
  const double delta_floor = std::max(cfg.step_tol, 1e-7);

  struct AuxTrial {
    AuxChannels aux;
    double f = -kInf;
    std::vector<double> trace;
    bool converged = false;
    int iterations = 0;
  };
  std::vector<AuxTrial> trials(static_cast<std::size_t>(cfg.restarts));
  parallel_for(trials.size(), cfg.threads, [&](std::size_t r) {
    AuxTrial& t = trials[r];
    if (r == 0) {
      t.aux = identity_aux(sc, sizes);
    } else {
      Rng rng(split_seed(cfg.seed, r));
      t.aux = random_aux(rng, sc, sizes);
    }
    t.f = discrete_objective(sc, t.aux, cfg);
    t.trace.push_back(t.f);
    double delta = 0.25;
    while (t.iterations < cfg.max_iters) {
      ++t.iterations;
      bool improved = false;
      for (int k = 0; k < sc.num_relays(); ++k) {
        const int u_size = sizes[k];
        for (int q = 0; q < sc.num_q(); ++q) {
          for (int y = 0; y < sc.output_sizes[k]; ++y) {
            const std::size_t row = (static_cast<std::size_t>(q) * sc.output_sizes[k] + y) * u_size;
            for (int a = 0; a < u_size; ++a) {
              for (int b = 0; b < u_size; ++b) {
                if (a == b) continue;
                auto& tab = t.aux.table[k];
                const double amount = std::min(delta, tab[row + a]);
                if (amount <= 0.0) continue;
                const double old_a = tab[row + a];
                const double old_b = tab[row + b];
                tab[row + a] = old_a - amount;
                tab[row + b] = old_b + amount;
                double fc = discrete_objective(sc, t.aux, cfg);
                if (fc > t.f) {
                  t.f = fc;
                  improved = true;
                } else {
                  tab[row + a] = old_a;
                  tab[row + b] = old_b;
                }
              }
            }
          }
        }
      }
      if (improved) {
        t.trace.push_back(t.f);
      } else {
        delta *= 0.5;
        if (delta < delta_floor) {
          t.converged = true;
          break;
        }
      }
    }
  });

  std::size_t best = 0;
  for (std::size_t r = 1; r < trials.size(); ++r) {
    if (trials[r].f > trials[best].f) best = r;
  }
  DiscreteOptimum out;
  out.aux = trials[best].aux;
  validate_aux(sc, out.aux);
  out.objective = trials[best].f;
  out.trace = trials[best].trace;
  out.converged = trials[best].converged;
  out.restart = static_cast<int>(best);
  out.iterations = trials[best].iterations;
  RateRegion region = region_discrete(sc, out.aux, InnerBound::general);
  if (cfg.objective == Objective::sum_rate) {
    const Mask all = full_mask(sc.num_users());
    double lowest = kInf;
    for (const auto& c : region.constraints) {
      if (c.pair.users == all) lowest = std::min(lowest, c.bound_bits);
    }
    for (const auto& c : region.constraints) {
      if (c.pair.users == all && c.bound_bits <= lowest + kActiveTol) out.active.push_back(c.pair);
    }
  } else if (!region.empty()) {
    out.active = tight_at(region, region.max_weighted(cfg.weights));
  }
  return out;
}

GradientCheck finite_diff_check(const std::function<double(const std::vector<double>&)>& f,
                                const std::function<std::vector<double>(const std::vector<double>&)>& gradient,
                                const std::vector<double>& x) {
  GradientCheck out;
  out.analytic = gradient(x);
  if (out.analytic.size() != x.size()) throw ValidationError("gradient: dimension mismatch");
  out.numeric.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double h = 1e-5 * std::max(1.0, std::abs(x[i]));
    auto xp = x;
    auto xm = x;
    xp[i] += h;
    xm[i] -= h;
    out.numeric[i] = (f(xp) - f(xm)) / (2.0 * h);
  }
  double diff = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    diff = std::max(diff, std::abs(out.numeric[i] - out.analytic[i]));
    scale = std::max(scale, std::abs(out.analytic[i]));
  }
  out.max_rel_error = diff / std::max(scale, 1e-12);
  if (!std::isfinite(out.max_rel_error)) out.inconclusive = true;
  return out;
}

GradientCheck sum_objective_gradient_check(const GaussianScenario& sc, const QuantizerSetGaussian& q) {
  SumBranch branch = sum_objective_branch(sc, q);
  auto f = [&](const std::vector<double>& x) { return sum_rate_bound_gaussian(sc, quantizers_from_params(sc, x)); };
  auto grad = [&](const std::vector<double>&) { return branch.gradient; };
  if (!std::isfinite(branch.value)) {
    GradientCheck out;
    out.inconclusive = true;
    return out;
  }
  GradientCheck out = finite_diff_check(f, grad, quantizer_params(sc, q));
  if (branch.gap_to_next < 1e-6) out.inconclusive = true;
  return out;
}

McEstimate mc_mutual_information(const GaussianScenario& sc, const QuantizerSetGaussian& q, SubsetPair pair,
                                 std::size_t samples, std::uint64_t seed) {
  if (pair.users == 0) throw ValidationError("T: must be nonempty");
  if (samples < 2) throw ValidationError("samples: at least 2 are required");
  if (static_cast<int>(q.b.size()) != sc.num_relays()) throw ValidationError("B: expected one matrix per relay");
  const Mask complement = full_mask(sc.num_relays()) & ~pair.relays;
  McEstimate out;
  out.samples = samples;
  if (complement == 0) return out;

  std::vector<int> relays = members(complement);
  std::vector<int> users = members(pair.users);
  std::vector<CMatrix> noise_root;
  std::vector<CMatrix> quant_root;
  std::vector<CMatrix> d_blocks;
  for (int k : relays) {
    CMatrix root = sqrt_psd(sc.noise_cov[k]);
    Eigen::VectorXd eig = hermitian_eigenvalues(root * q.b[k] * root);
    if (eig.minCoeff() <= 1e-12 || eig.maxCoeff() >= 1.0 - 1e-12) {
      throw ValidationError("B[" + std::to_string(k) + "]: on the boundary, no finite test channel");
    }
    CMatrix b_inv = hermitian_part(q.b[k].inverse());
    noise_root.push_back(root);
    quant_root.push_back(sqrt_psd(b_inv - sc.noise_cov[k]));
    d_blocks.push_back(b_inv);
  }
  CMatrix d = block_diagonal(d_blocks);
  const Eigen::Index dim = d.rows();

  // Stacked H_T over the relays outside S.
  Eigen::Index n_t = 0;
  for (int l : users) n_t += sc.user_antennas(l);
  CMatrix h_t = CMatrix::Zero(dim, n_t);
  CMatrix k_t = CMatrix::Zero(n_t, n_t);
  {
    Eigen::Index col = 0;
    for (int l : users) {
      const Eigen::Index n = sc.user_antennas(l);
      Eigen::Index row = 0;
      for (int k : relays) {
        h_t.block(row, col, sc.relay_antennas(k), n) = sc.channel[k][l];
        row += sc.relay_antennas(k);
      }
      k_t.block(col, col, n, n) = sc.input_cov[l];
      col += n;
    }
  }
  CMatrix c2 = hermitian_part(d + h_t * k_t * h_t.adjoint());
  Eigen::LLT<CMatrix> llt_d(d);
  Eigen::LLT<CMatrix> llt_c(c2);
  if (llt_d.info() != Eigen::Success || llt_c.info() != Eigen::Success) {
    throw NumericError("mc: covariance factorization failed");
  }
  CMatrix ld_inv = llt_d.matrixL().solve(identity(dim));
  CMatrix lc_inv = llt_c.matrixL().solve(identity(dim));
  const double logdet_ratio = logdet_psd(c2) - logdet_psd(d);
  CMatrix k_root = sqrt_psd(k_t);

  Rng rng(seed);
  CVector z(std::max(n_t, dim));
  CVector x(n_t);
  CVector w(dim);
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    for (Eigen::Index j = 0; j < n_t; ++j) z(j) = complex_normal(rng);
    x.noalias() = k_root * z.head(n_t);
    Eigen::Index row = 0;
    for (std::size_t r = 0; r < relays.size(); ++r) {
      const Eigen::Index m = noise_root[r].rows();
      CVector a(m);
      CVector b(m);
      for (Eigen::Index j = 0; j < m; ++j) a(j) = complex_normal(rng);
      for (Eigen::Index j = 0; j < m; ++j) b(j) = complex_normal(rng);
      w.segment(row, m).noalias() = noise_root[r] * a;
      w.segment(row, m).noalias() += quant_root[r] * b;
      row += m;
    }
    const double q1 = (ld_inv * w).squaredNorm();
    CVector shifted = h_t * x + w;
    const double q2 = (lc_inv * shifted).squaredNorm();
    const double sample = nats_to_bits(logdet_ratio - q1 + q2);
    const double delta = sample - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (sample - mean);
  }
  out.mean_bits = mean;
  out.std_error_bits = std::sqrt(m2 / static_cast<double>(samples - 1) / static_cast<double>(samples));
  return out;
}

}  // namespace ocran
