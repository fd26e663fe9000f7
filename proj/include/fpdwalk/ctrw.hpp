#pragma once

#include "fpdwalk/heavy_tails.hpp"
#include "fpdwalk/pearson.hpp"
#include "fpdwalk/rng.hpp"
#include "fpdwalk/urn_chains.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace fpdwalk {

/// A correlated CTRW: the rescaled urn chain of size n, started at the floor
/// embedding of x0, run on the clock of an independent renewal process.
struct CtrwSpec {
  DiffusionKind kind = DiffusionKind::OU;
  ChainParams cp;
  int n = 2000;
  double x0 = 0.0;
  WaitingTimeModel waiting;

  void validate() const;
};

/// Chain steps taken after `renewals` jumps of the renewal clock:
/// floor(theta N / 2) (OU), floor(theta N) (Jacobi),
/// floor(theta n^(d-1) N / a) (CIR).
std::size_t ctrw_chain_steps(const CtrwSpec& spec, std::size_t renewals);

/// Renewal-clock time n^(1/beta) t at which the count is read.
double ctrw_clock_time(const CtrwSpec& spec, double t);

struct CtrwDraw {
  double value = 0.0;
  int state = 0;
  std::size_t renewals = 0;
  std::size_t chain_steps = 0;
};

/// One draw of X^(n)(n^-1 N(n^(1/beta) t)). The waiting times are drawn
/// first, then the chain steps, both from `rng`.
CtrwDraw ctrw_draw(const CtrwSpec& spec, double t, Rng& rng);
double ctrw_value(const CtrwSpec& spec, double t, Rng& rng);

struct EnsembleResult {
  double time = 0.0;
  /// samples[i] comes from path i.
  std::vector<double> samples;
  std::size_t paths = 0;
  std::uint64_t seed = 0;
  CtrwSpec spec;
};

/// Path i uses stream_rng(master_seed, i), so the result does not depend on
/// `workers` (0 means hardware concurrency). Per-path failures are
/// collected and rethrown as one EnsembleError.
EnsembleResult run_ensemble(const CtrwSpec& spec, double t, std::size_t paths,
                            std::uint64_t master_seed, unsigned workers = 0);

/// Right-continuous empirical CDF.
class EmpiricalCdf {
public:
  explicit EmpiricalCdf(std::vector<double> samples);

  double operator()(double x) const;
  const std::vector<double>& sorted() const { return sorted_; }
  std::size_t size() const { return sorted_.size(); }

private:
  std::vector<double> sorted_;
};

EmpiricalCdf empirical_cdf(const EnsembleResult& result);

/// CSV path_index,value.
void write_ensemble_csv(std::ostream& os, const EnsembleResult& result);
/// JSON meta: time, paths, seed, spec.
void write_ensemble_json(std::ostream& os, const EnsembleResult& result);
/// CSV x,ecdf at each distinct sample value.
void write_ecdf_csv(std::ostream& os, const EmpiricalCdf& ecdf);

} // namespace fpdwalk
