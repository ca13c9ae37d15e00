#include <doctest.h>

#include <cmath>
#include <map>
#include <sstream>

#include "smoothcd/errors.hpp"
#include "smoothcd/harness.hpp"
#include "smoothcd/rate_constants.hpp"
#include "smoothcd/solvers.hpp"

using namespace smoothcd;

namespace {

// F_gamma(x) = L x^2 / 2 on one coordinate, through a saddle problem with a zero coupling.
NesterovSurrogate plain_quadratic(double L) {
  MatrixXd Af(1, 1), K = MatrixXd::Zero(1, 1);
  Af << L;
  return NesterovSurrogate(SaddleProblem(Matrix(Af), VectorXd::Zero(1), Matrix(K), VectorXd::Zero(1), DualDomain::box),
                           1.0);
}

}  // namespace

TEST_SUITE("solvers") {
  TEST_CASE("accelerated step parameters") {
    AccdParams p = accd_step_params(0.0, 1.0, 1.0, 0.0);
    CHECK(p.a_next == doctest::Approx(1.0));
    CHECK(p.A_next == doctest::Approx(1.0));
    CHECK(p.B_next == 1.0);
    CHECK(p.beta_k == 0.0);
    p = accd_step_params(1.0, 1.0, 1.0, 0.0);
    CHECK(p.a_next == doctest::Approx((1.0 + std::sqrt(5.0)) / 2.0).epsilon(1e-14));
    CHECK(p.alpha_k == doctest::Approx(p.a_next / p.A_next));
    // a^2 S^2 = A_next B_next holds with strong convexity too
    p = accd_step_params(3.0, 1.5, 2.0, 0.3);
    CHECK(p.a_next * p.a_next * 4.0 == doctest::Approx(p.A_next * p.B_next).epsilon(1e-13));
    CHECK(p.beta_k == doctest::Approx(0.3 * p.a_next / p.B_next));
  }

  TEST_CASE("one coordinate step solves a one-dimensional quadratic") {
    const NesterovSurrogate s = plain_quadratic(1.0);
    CHECK(s.coord_lipschitz(0) == doctest::Approx(1.0));
    SolverConfig cfg;
    cfg.max_iterations = 1;
    cfg.grad_tol = 1e-12;
    const SolveResult r = cd_run(s, VectorXd::Constant(1, 1.0), cfg);
    CHECK(r.x[0] == doctest::Approx(0.0));
    CHECK(r.converged);
  }

  TEST_CASE("coordinate descent on the huber function") {
    MoreauSurrogate s(ProxOracle::l1(1.0), 1.0, BlockPartition::scalar(1));
    SolverConfig cfg;
    cfg.max_iterations = 50;
    cfg.grad_tol = 1e-3;
    const SolveResult r = cd_run(s, VectorXd::Constant(1, 2.0), cfg);
    CHECK(r.converged);
    CHECK(r.iterations <= 50);
    for (std::size_t k = 1; k < r.trace.size(); ++k) CHECK(r.trace[k].f_gamma <= r.trace[k - 1].f_gamma);
  }

  TEST_CASE("coordinate descent decreases every step") {
    const GeneratedProblem g = gen_quadratic_l2(30, 20, 0.5, 4);
    for (const auto& name : smoothing_names()) {
      CAPTURE(name);
      auto s = make_surrogate(name, g.composite, default_gamma(name, g.composite));
      SolverConfig cfg;
      cfg.max_epochs = 20;
      cfg.grad_tol = 1e-8;
      cfg.alpha = 0.5;
      double prev = s->value_at(g.x0), worst = 0.0;
      cd_run(*s, g.x0, cfg, [&](long, int, const SurrogateState& st) {
        const double v = s->value(st);
        worst = std::max(worst, (v - prev) / (1.0 + std::abs(prev)));
        prev = v;
      });
      CHECK(worst <= 1e-12);
    }
  }

  TEST_CASE("accelerated method on one block obeys the k^-2 bound") {
    const double L = 2.0;
    const NesterovSurrogate s = plain_quadratic(L);
    SolverConfig cfg;
    cfg.max_iterations = 200;
    cfg.max_epochs = 200;
    cfg.grad_tol = 1e-300;
    const double x0 = 3.0;
    double worst = -1.0;
    accd_run(s, VectorXd::Constant(1, x0), cfg, [&](long k, int, const SurrogateState& st) {
      const double bound = 2.0 * L * x0 * x0 / double(k * k);
      worst = std::max(worst, s.value(st) - bound);
    });
    CHECK(worst <= 0.0);
  }

  TEST_CASE("accelerated method converges on a generated problem") {
    const GeneratedProblem g = gen_quadratic_l1(30, 20, 0.5, 6);
    auto s = make_surrogate("fb", g.composite, default_gamma("fb", g.composite));
    SolverConfig cfg;
    cfg.max_epochs = 5000;
    cfg.grad_tol = 1e-6;
    cfg.seed = 3;
    const SolveResult r = accd_run(*s, g.x0, cfg);
    CHECK(r.converged);
    const ReferenceSolution ref = reference_solve(g.composite);
    CHECK(s->value_at(r.x) == doctest::Approx(ref.f).epsilon(1e-6));
  }

  TEST_CASE("a single restart round is the accelerated method") {
    const GeneratedProblem g = gen_quadratic_l2(20, 15, 0.5, 8);
    auto s = make_surrogate("fb", g.composite, default_gamma("fb", g.composite));
    SolverConfig cfg;
    cfg.max_epochs = 10;
    cfg.grad_tol = 1e-12;
    cfg.seed = 12;
    const SolveResult a = accd_run(*s, g.x0, cfg);
    const SolveResult r = restart_run(*s, g.x0, cfg, RestartSchedule::fixed(1000000), 1);
    CHECK(r.round_values.size() == 2);
    CHECK((a.x - r.x).norm() <= 1e-12 * (1.0 + a.x.norm()));
  }

  TEST_CASE("restart keeps the better point each round") {
    const GeneratedProblem g = gen_quadratic_tv(20, 0.5, 1);
    for (const auto& name : smoothing_names()) {
      CAPTURE(name);
      auto s = make_surrogate(name, g.composite, default_gamma(name, g.composite));
      SolverConfig cfg;
      cfg.max_epochs = 100;
      cfg.grad_tol = 1e-9;
      const SolveResult r = restart_run(*s, g.x0, cfg, RestartSchedule::doubling(5));
      REQUIRE(r.round_values.size() >= 2);
      for (std::size_t k = 1; k < r.round_values.size(); ++k) CHECK(r.round_values[k] <= r.round_values[k - 1]);
    }
  }

  TEST_CASE("doubling schedule") {
    CHECK(doubling_schedule(5, 7) == std::vector<long>{5, 10, 5, 20, 5, 10, 5});
    const auto sched = doubling_schedule(1, 63);
    std::map<long, int> count;
    for (long v : sched) ++count[v];
    // 2^J - 1 entries with J = 6: value 2^j appears 2^(5 - j) times
    for (int j = 0; j < 6; ++j) CHECK(count[1L << j] == (1 << (5 - j)));
    for (int j = 0; j < 6; ++j) CHECK(sched[(1 << j) - 1] == (1L << j));
    CHECK(RestartSchedule::doubling(5).period(3) == 20);
    CHECK(RestartSchedule::fixed(7).period(3) == 7);
  }

  TEST_CASE("rate constants") {
    CHECK(restart_period(10, 2.0, 1.0, std::exp(-2.0)) == 55);
    CHECK(restart_period(1, 2.0, 4.0, 1.0) == 1);
    CHECK(restart_period(1, 1.0, 1.0, 1.0, 4.0) == 4);
    CHECK(growth_constant_me(2.0, 1.0, 1.0) == 0.5);
    CHECK(growth_constant_me(1.0, 1.0, 1.0, 2.0) == doctest::Approx(1.0 / 9.0).epsilon(1e-15));
    CHECK(growth_constant_fb(2.0, 1.0, 0.5, 1.0, 1.0) == 0.5);
    CHECK(growth_constant_ns(2.0, 1.0, 1.0) == 0.25);
    CHECK(growth_constant_ns(1.0, 1.0, 1.0, 2.0) == 0.5);
    CHECK(contraction_C1(0.5, 2.0, 20) == doctest::Approx(1.0 - 1.0 / 60.0).epsilon(1e-15));
    CHECK_THROWS_AS(restart_period(10, 2.0, 0.0, 0.5), ArgumentError);
    CHECK_THROWS_AS(growth_constant_me(3.0, 1.0, 1.0), ArgumentError);
  }

  TEST_CASE("configuration validation") {
    SolverConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.alpha = 1.5;
    CHECK_THROWS_AS(cfg.validate(), ArgumentError);
    cfg.alpha = 0.0;
    cfg.max_epochs = 0;
    CHECK_THROWS_AS(cfg.validate(), ArgumentError);
    cfg.max_epochs = 1;
    cfg.grad_tol = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ArgumentError);
  }

  TEST_CASE("diverging iterates raise a numerical failure") {
    NesterovSurrogate s = plain_quadratic(1.0);
    s.scale_lipschitz(1e-300);
    SolverConfig cfg;
    cfg.max_epochs = 5;
    CHECK_THROWS_AS(cd_run(s, VectorXd::Constant(1, 1.0), cfg), NumericalFailure);
  }

  TEST_CASE("trace csv") {
    std::vector<TraceRecord> t(2);
    t[1].k = 4;
    t[1].epoch = 2.0;
    t[1].time_s = 0.5;
    std::ostringstream with, without;
    write_trace_csv(with, t, true);
    write_trace_csv(without, t, false);
    CHECK(with.str().rfind(trace_header(), 0) == 0);
    CHECK(with.str() != without.str());
    CHECK(without.str().find("0.5") == std::string::npos);
  }
}
