#include "fpdwalk/ctrw.hpp"

#include "fpdwalk/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

namespace fpdwalk {

void CtrwSpec::validate() const {
  fpdwalk::validate(kind, cp);
  if (n < 1)
    throw InvalidParameter("CTRW chain size n must be >= 1");
  waiting.validate();
  if (!std::isfinite(x0))
    throw InvalidParameter("CTRW starting point must be finite");
}

std::size_t ctrw_chain_steps(const CtrwSpec& spec, std::size_t renewals) {
  const double count = static_cast<double>(renewals);
  double steps = 0.0;
  switch (spec.kind) {
  case DiffusionKind::OU:
    steps = 0.5 * spec.cp.theta * count;
    break;
  case DiffusionKind::Jacobi:
    steps = spec.cp.theta * count;
    break;
  case DiffusionKind::CIR:
    steps = spec.cp.theta * std::pow(static_cast<double>(spec.n), spec.cp.d - 1.0) * count /
            spec.cp.a;
    break;
  }
  return static_cast<std::size_t>(std::floor(steps));
}

double ctrw_clock_time(const CtrwSpec& spec, double t) {
  return std::pow(static_cast<double>(spec.n), 1.0 / spec.waiting.beta) * t;
}

CtrwDraw ctrw_draw(const CtrwSpec& spec, double t, Rng& rng) {
  if (!(t >= 0.0) || !std::isfinite(t))
    throw InvalidParameter("ctrw_value needs a finite t >= 0");
  const RescaledChainView view(spec.kind, spec.cp, spec.n);
  CtrwDraw draw;
  draw.state = view.initial_state(spec.x0);

  const double clock = ctrw_clock_time(spec, t);
  RenewalSample renewals;
  extend_renewal(renewals, spec.waiting, clock, rng);
  draw.renewals = renewal_count(renewals, clock);
  draw.chain_steps = ctrw_chain_steps(spec, draw.renewals);

  for (std::size_t k = 0; k < draw.chain_steps; ++k)
    draw.state = view.step(draw.state, rng);
  draw.value = view.rescale(draw.state);
  return draw;
}

double ctrw_value(const CtrwSpec& spec, double t, Rng& rng) { return ctrw_draw(spec, t, rng).value; }

EnsembleResult run_ensemble(const CtrwSpec& spec, double t, std::size_t paths,
                            std::uint64_t master_seed, unsigned workers) {
  spec.validate();
  if (paths < 1)
    throw InvalidParameter("run_ensemble needs paths >= 1");
  if (workers == 0)
    workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, paths));

  EnsembleResult result;
  result.time = t;
  result.paths = paths;
  result.seed = master_seed;
  result.spec = spec;
  result.samples.assign(paths, std::numeric_limits<double>::quiet_NaN());

  std::vector<std::vector<std::pair<std::size_t, std::string>>> failures(workers);
  auto work = [&](unsigned w) {
    for (std::size_t i = w; i < paths; i += workers) {
      try {
        Rng rng = stream_rng(master_seed, i);
        result.samples[i] = ctrw_value(spec, t, rng);
      } catch (const std::exception& e) {
        failures[w].emplace_back(i, e.what());
      }
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back(work, w);
    for (auto& th : pool)
      th.join();
  }

  std::vector<std::pair<std::size_t, std::string>> all;
  for (auto& f : failures)
    all.insert(all.end(), f.begin(), f.end());
  if (!all.empty()) {
    std::sort(all.begin(), all.end());
    throw EnsembleError(std::move(all));
  }
  return result;
}

EmpiricalCdf::EmpiricalCdf(std::vector<double> samples) : sorted_(std::move(samples)) {
  if (sorted_.empty())
    throw EmptyResult("empirical CDF of an empty sample");
  std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCdf::operator()(double x) const {
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
  return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

EmpiricalCdf empirical_cdf(const EnsembleResult& result) { return EmpiricalCdf(result.samples); }

void write_ensemble_csv(std::ostream& os, const EnsembleResult& result) {
  os << "path_index,value\n";
  const auto old = os.precision(std::numeric_limits<double>::max_digits10);
  for (std::size_t i = 0; i < result.samples.size(); ++i)
    os << i << ',' << result.samples[i] << '\n';
  os.precision(old);
}

void write_ensemble_json(std::ostream& os, const EnsembleResult& result) {
  const CtrwSpec& s = result.spec;
  nlohmann::json j;
  j["time"] = result.time;
  j["paths"] = result.paths;
  j["seed"] = result.seed;
  j["spec"] = {{"kind", std::string(to_string(s.kind))},
               {"theta", s.cp.theta},
               {"a", s.cp.a},
               {"b", s.cp.b},
               {"d", s.cp.d},
               {"n", s.n},
               {"x0", s.x0},
               {"beta", s.waiting.beta},
               {"waiting_scale", s.waiting.scale},
               {"law", std::string(to_string(s.waiting.law))}};
  os << j.dump(2) << '\n';
}

void write_ecdf_csv(std::ostream& os, const EmpiricalCdf& ecdf) {
  os << "x,ecdf\n";
  const auto old = os.precision(std::numeric_limits<double>::max_digits10);
  const auto& v = ecdf.sorted();
  const double total = static_cast<double>(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i + 1 < v.size() && v[i + 1] == v[i])
      continue;
    os << v[i] << ',' << static_cast<double>(i + 1) / total << '\n';
  }
  os.precision(old);
}

} // namespace fpdwalk
