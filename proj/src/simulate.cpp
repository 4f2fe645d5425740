#include "refract/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

#include <boost/random/exponential_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "parallel.hpp"
#include "refract/errors.hpp"

namespace refract {

void SimConfig::validate(bool needs_dt) const {
  if (n_paths < 1) throw ConfigError("simulation.n_paths", "must be at least 1");
  if (!(std::isfinite(c) && std::isfinite(b) && c < b)) throw ConfigError("problem", "needs c < b");
  if (!(x0 >= c && x0 <= b)) throw ConfigError("problem.x", fmt::format("x = {} outside [c, b]", x0));
  if (d && !(*d > c && *d < b)) throw ConfigError("problem.d", fmt::format("d = {} outside (c, b)", *d));
  if (!(max_time > 0.0)) throw ConfigError("simulation.max_time", "must be positive");
  if (needs_dt && !(dt > 0.0 && dt < max_time)) throw ConfigError("simulation.dt", "must be positive");
}

McEstimate estimate_functional(std::span<const double> values, std::size_t censored, std::uint64_t seed) {
  if (values.empty()) throw DomainError("no paths to estimate from");
  const double n = double(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  return {mean, sd / std::sqrt(n), values.size(), censored, seed};
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Stream of path i, independent of which thread runs it.
std::mt19937_64 path_engine(std::uint64_t seed, std::size_t i) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(std::uint64_t(i))));
}

struct PathOutcome {
  double up = 0.0, down = 0.0, hit = 0.0;
  bool censored = false;
  double gap = 0.0;
  std::vector<TraceRow> trace;
};

class JumpSampler {
 public:
  explicit JumpSampler(const LevyModel& m) : jumps_(m.jumps()), total_(m.total_jump_rate()) {}
  bool active() const noexcept { return total_ > 0.0; }
  template <class Eng>
  double wait(Eng& eng) const {
    return active() ? boost::random::exponential_distribution<double>(total_)(eng)
                    : std::numeric_limits<double>::infinity();
  }
  template <class Eng>
  double size(Eng& eng) const {
    double u = boost::random::uniform_01<double>()(eng) * total_;
    std::size_t k = 0;
    while (k + 1 < jumps_.size() && u >= jumps_[k].rate) u -= jumps_[k++].rate;
    return boost::random::exponential_distribution<double>(jumps_[k].mu)(eng);
  }

 private:
  std::vector<JumpComponent> jumps_;
  double total_;
};

double slope_at(double x, const LevyModel& m, const RefractionSpec& s, DriftForm form) {
  if (form == DriftForm::reduced_above) return m.drift() - (x >= s.a ? s.delta : 0.0);
  return (m.drift() - s.delta) + (x < s.a ? s.delta : 0.0);
}

double reverse_sum(const std::vector<double>& v) {
  double s = 0.0;
  for (auto it = v.rbegin(); it != v.rend(); ++it) s += *it;
  return s;
}

PathOutcome exact_path(const LevyModel& m, const RefractionSpec& s, const WeightFunction& w, const SimConfig& cfg,
                       const std::vector<double>& stops, const JumpSampler& js, std::mt19937_64& eng, bool traced,
                       std::size_t index) {
  PathOutcome out;
  double x = cfg.x0, t = 0.0, L = 0.0;
  bool hit_done = false;
  std::vector<double> parts;
  double next_jump = js.wait(eng);
  auto record = [&] {
    if (traced) out.trace.push_back({index, t, x, L});
  };
  auto finish = [&] { out.gap = std::abs(L - reverse_sum(parts)); };
  record();
  while (true) {
    const double slope = slope_at(x, m, s, cfg.form);
    const double om = w(x);
    const double nb = *std::upper_bound(stops.begin(), stops.end(), x);
    const double t_reach = t + (nb - x) / slope;
    const double t_end = std::min(next_jump, cfg.max_time);
    if (t_reach <= t_end) {
      parts.push_back(om * (t_reach - t));
      L += parts.back();
      t = t_reach;
      x = nb;
      record();
      if (x == cfg.b) {
        out.up = std::exp(-L);
        break;
      }
      if (cfg.d && x == *cfg.d && !hit_done) {
        hit_done = true;
        out.hit = std::exp(-L);
      }
      continue;
    }
    parts.push_back(om * (t_end - t));
    L += parts.back();
    x = std::min(x + slope * (t_end - t), std::nextafter(nb, -HUGE_VAL));
    t = t_end;
    if (t >= cfg.max_time) {
      out.censored = true;
      record();
      break;
    }
    x -= js.size(eng);
    next_jump = t + js.wait(eng);
    record();
    if (x < cfg.c) {
      out.down = std::exp(-L);
      break;
    }
  }
  finish();
  return out;
}

PathOutcome euler_path(const LevyModel& m, const RefractionSpec& s, const WeightFunction& w, const SimConfig& cfg,
                       const JumpSampler& js, std::mt19937_64& eng, bool traced, std::size_t index) {
  PathOutcome out;
  boost::random::normal_distribution<double> normal;
  const double sq = m.sigma() * std::sqrt(cfg.dt);
  const std::size_t stride = std::max<std::size_t>(1, std::size_t(0.01 / cfg.dt));
  double x = cfg.x0, t = 0.0, L = 0.0;
  bool hit_done = false;
  if (cfg.d && x == *cfg.d) {
    hit_done = true;
    out.hit = 1.0;
  }
  double next_jump = js.wait(eng);
  double parts_sum = 0.0;  // same contributions, accumulated in blocks of the trace stride
  double block = 0.0;
  std::size_t step = 0;
  if (traced) out.trace.push_back({index, t, x, L});
  while (true) {
    if (t >= cfg.max_time) {
      out.censored = true;
      break;
    }
    const double om = w(x);
    double xc = x + slope_at(x, m, s, cfg.form) * cfg.dt + sq * normal(eng);
    L += om * cfg.dt;
    block += om * cfg.dt;
    t += cfg.dt;
    ++step;
    if (cfg.d && !hit_done && (x - *cfg.d) * (xc - *cfg.d) <= 0.0) {
      hit_done = true;
      out.hit = std::exp(-L);
    }
    while (next_jump <= t) {
      xc -= js.size(eng);
      next_jump += js.wait(eng);
    }
    x = xc;
    if (step % stride == 0) {
      parts_sum += block;
      block = 0.0;
      if (traced) out.trace.push_back({index, t, x, L});
    }
    if (x >= cfg.b) {
      out.up = std::exp(-L);
      break;
    }
    if (x < cfg.c) {
      out.down = std::exp(-L);
      break;
    }
  }
  if (traced) out.trace.push_back({index, t, x, L});
  out.gap = std::abs(L - (parts_sum + block));
  return out;
}

template <class PathFn>
SimResult run_paths(const SimConfig& cfg, PathFn&& path) {
  const std::size_t n = cfg.n_paths;
  const std::size_t traced = std::min<std::size_t>({cfg.trace_paths, 100, n});
  std::vector<double> up(n), down(n), hit(n);
  std::vector<char> censored(n);
  std::vector<double> gap(n);
  std::vector<std::vector<TraceRow>> traces(traced);
  detail::parallel_for(n, [&](std::size_t i) {
    auto eng = path_engine(cfg.seed, i);
    PathOutcome o = path(eng, i < traced, i);
    up[i] = o.up;
    down[i] = o.down;
    hit[i] = o.hit;
    censored[i] = o.censored;
    gap[i] = o.gap;
    if (i < traced) traces[i] = std::move(o.trace);
  });
  SimResult r;
  r.censored = std::size_t(std::count(censored.begin(), censored.end(), 1));
  r.exit_up = estimate_functional(up, r.censored, cfg.seed);
  r.exit_down = estimate_functional(down, r.censored, cfg.seed);
  if (cfg.d) r.hitting = estimate_functional(hit, r.censored, cfg.seed);
  r.occupation_gap = *std::max_element(gap.begin(), gap.end());
  for (auto& tr : traces) r.trace.insert(r.trace.end(), tr.begin(), tr.end());
  return r;
}

}  // namespace

SimResult simulate_exact_bv(const LevyModel& model, const RefractionSpec& spec, const WeightFunction& w,
                            const SimConfig& cfg) {
  if (!model.bounded_variation()) throw UnsupportedModel("the exact simulator needs σ = 0; use the Euler scheme");
  if (!w.piecewise_constant()) throw UnsupportedModel("the exact simulator needs a piecewise-constant weight");
  require_hypothesis(model, spec);
  if (!(model.drift() > 0.0 && model.drift() - spec.delta > 0.0))
    throw UnsupportedModel("the exact simulator needs drift − δ > 0");
  cfg.validate(false);
  std::vector<double> stops{spec.a, cfg.b};
  for (double v : w.breakpoints()) stops.push_back(v);
  if (cfg.d) stops.push_back(*cfg.d);
  stops.push_back(std::numeric_limits<double>::infinity());
  std::sort(stops.begin(), stops.end());
  stops.erase(std::unique(stops.begin(), stops.end()), stops.end());
  const JumpSampler js(model);
  SimResult r = run_paths(cfg, [&](std::mt19937_64& eng, bool traced, std::size_t i) {
    return exact_path(model, spec, w, cfg, stops, js, eng, traced, i);
  });
  r.bias_allowance = 0.0;
  return r;
}

SimResult simulate_euler(const LevyModel& model, const RefractionSpec& spec, const WeightFunction& w,
                         const SimConfig& cfg) {
  require_hypothesis(model, spec);
  cfg.validate(true);
  const JumpSampler js(model);
  SimResult r = run_paths(
      cfg, [&](std::mt19937_64& eng, bool traced, std::size_t i) { return euler_path(model, spec, w, cfg, js, eng, traced, i); });
  r.bias_allowance = model.sigma() * std::sqrt(cfg.dt);
  return r;
}

SimResult simulate(const LevyModel& model, const RefractionSpec& spec, const WeightFunction& w, const SimConfig& cfg) {
  return model.bounded_variation() ? simulate_exact_bv(model, spec, w, cfg) : simulate_euler(model, spec, w, cfg);
}

void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& rows) {
  os << "path,t,X,L\n";
  for (const auto& r : rows) fmt::print(os, "{},{},{},{}\n", r.path, r.t, r.x, r.L);
}

}  // namespace refract
