#include "fpdwalk/config.hpp"
#include "fpdwalk/ctrw.hpp"
#include "fpdwalk/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace fpdwalk;

namespace {

CtrwSpec make_spec(DiffusionKind kind, double beta, WaitingLaw law = WaitingLaw::Pareto) {
  CtrwSpec s;
  s.kind = kind;
  s.cp = default_chain_params(kind);
  s.n = 400;
  s.x0 = Diffusion::from_chain(kind, s.cp).stationary_mean();
  s.waiting = WaitingTimeModel{beta, 1.0, law};
  return s;
}

} // namespace

TEST_CASE("chain steps per renewal and the renewal clock") {
  CtrwSpec ou = make_spec(DiffusionKind::OU, 0.5);   // theta 2
  CHECK(ctrw_chain_steps(ou, 7) == 7);               // floor(2 * 7 / 2)
  CtrwSpec jac = make_spec(DiffusionKind::Jacobi, 0.5);
  CHECK(ctrw_chain_steps(jac, 7) == 7);              // floor(1 * 7)
  CtrwSpec cir = make_spec(DiffusionKind::CIR, 0.5); // theta 1, a 2, d 0.5, n 400
  CHECK(ctrw_chain_steps(cir, 1000) == 25);          // floor(1000 / 20 / 2)
  CHECK(ctrw_clock_time(ou, 1.0) == doctest::Approx(160000.0));
  CHECK(ctrw_clock_time(make_spec(DiffusionKind::OU, 0.8), 2.0) == doctest::Approx(2.0 * std::pow(400.0, 1.25)));
}

TEST_CASE("deterministic waits count floor(n t) renewals") {
  CtrwSpec s = make_spec(DiffusionKind::Jacobi, 1.0, WaitingLaw::Deterministic);
  Rng rng = stream_rng(1, 0);
  const CtrwDraw d = ctrw_draw(s, 0.75, rng);
  CHECK(d.renewals == 300);
  CHECK(d.chain_steps == 300);
  CHECK(d.value == doctest::Approx(d.state / 400.0));
}

TEST_CASE("t = 0 returns the embedded start") {
  for (DiffusionKind k : {DiffusionKind::OU, DiffusionKind::Jacobi, DiffusionKind::CIR}) {
    CtrwSpec s = make_spec(k, 0.7);
    s.x0 += 0.013;
    const RescaledChainView v(k, s.cp, s.n);
    Rng rng = stream_rng(2, 0);
    CHECK(ctrw_value(s, 0.0, rng) == v.rescale(v.initial_state(s.x0)));
  }
}

TEST_CASE("ensembles are deterministic and independent of the worker count") {
  const CtrwSpec s = make_spec(DiffusionKind::OU, 0.7);
  const EnsembleResult a = run_ensemble(s, 1.0, 64, 99, 1);
  const EnsembleResult b = run_ensemble(s, 1.0, 64, 99, 3);
  CHECK(a.samples == b.samples);
  CHECK(a.paths == 64);
  Rng rng = stream_rng(99, 17);
  CHECK(ctrw_value(s, 1.0, rng) == a.samples[17]);
  const EnsembleResult c = run_ensemble(s, 1.0, 64, 100, 1);
  CHECK(a.samples != c.samples);

  std::ostringstream csv;
  write_ensemble_csv(csv, a);
  CHECK(csv.str().rfind("path_index,value\n0,", 0) == 0);
  std::ostringstream js;
  write_ensemble_json(js, a);
  CHECK(js.str().find("\"paths\"") != std::string::npos);
}

TEST_CASE("ensembles stay in the state space") {
  for (DiffusionKind k : {DiffusionKind::Jacobi, DiffusionKind::CIR}) {
    const EnsembleResult r = run_ensemble(make_spec(k, 0.6), 2.0, 200, 5, 1);
    for (double v : r.samples)
      CHECK(v >= 0.0);
  }
}

TEST_CASE("spec validation") {
  CtrwSpec s = make_spec(DiffusionKind::OU, 0.7);
  s.n = 0;
  CHECK_THROWS_AS(s.validate(), InvalidParameter);
  CtrwSpec ok = make_spec(DiffusionKind::OU, 0.7);
  CHECK_THROWS_AS(run_ensemble(ok, 1.0, 0, 1), InvalidParameter);
  Rng rng = stream_rng(1, 1);
  CHECK_THROWS_AS(ctrw_value(ok, -1.0, rng), InvalidParameter);
}

TEST_CASE("empirical CDF is right-continuous") {
  const EmpiricalCdf e({3.0, 1.0, 2.0, 2.0});
  CHECK(e(0.5) == 0.0);
  CHECK(e(1.0) == 0.25);
  CHECK(e(2.0) == 0.75);
  CHECK(e(2.5) == 0.75);
  CHECK(e(3.0) == 1.0);
  CHECK(e.size() == 4);
  CHECK_THROWS_AS(EmpiricalCdf({}), EmptyResult);
  std::ostringstream os;
  write_ecdf_csv(os, e);
  CHECK(os.str() == "x,ecdf\n1,0.25\n2,0.75\n3,1\n");
}
