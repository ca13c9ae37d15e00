#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "smoothcd/errors.hpp"
#include "smoothcd/experiment.hpp"
#include "smoothcd/harness.hpp"
#include "smoothcd/rng.hpp"
#include "smoothcd/surrogate_check.hpp"

using namespace smoothcd;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("smoothcd_test_" + name);
  fs::remove_all(p);
  return p;
}

ExperimentSpec micro_spec(const fs::path& out) {
  ExperimentSpec spec;
  spec.generator = "quadratic_l2";
  spec.n = 12;
  spec.m = 8;
  spec.lambda = 0.5;
  spec.seed = 21;
  spec.repeats = 3;
  spec.smoothings = {"fb", "ns"};
  SolverSpec cd, accd;
  cd.name = "cd";
  accd.name = "accd";
  cd.cfg.max_epochs = accd.cfg.max_epochs = 2000;
  spec.solvers = {cd, accd};
  spec.output = out.string();
  return spec;
}

void strip_time(json& j) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end();) {
      if (it.key().find("time") != std::string::npos) {
        it = j.erase(it);
      } else {
        strip_time(*it);
        ++it;
      }
    }
  } else if (j.is_array()) {
    for (auto& v : j) strip_time(v);
  }
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("generators are deterministic") {
    const GeneratedProblem a = gen_quadratic_l2(4, 2, 1.0, 5), b = gen_quadratic_l2(4, 2, 1.0, 5);
    CHECK(a.composite.A.dense() == b.composite.A.dense());
    CHECK(a.composite.b == b.composite.b);
    CHECK(a.x0 == b.x0);
    const GeneratedProblem c = gen_quadratic_l2(4, 2, 1.0, 6);
    CHECK(c.x0 != a.x0);
  }

  TEST_CASE("generated quadratics are positive semidefinite") {
    for (const auto& g : {gen_quadratic_l2(40, 20, 1.0, 1), gen_quadratic_l1(30, 10, 1.0, 2), gen_quadratic_tv(20, 1.0, 3)}) {
      const Eigen::SelfAdjointEigenSolver<MatrixXd> es(g.composite.A.dense());
      CHECK(es.eigenvalues().minCoeff() >= -1e-10 * es.eigenvalues().maxCoeff());
      CHECK(g.composite.lipschitz_L >= es.eigenvalues().maxCoeff() * (1.0 - 1e-12));
    }
  }

  TEST_CASE("zero weight gives least squares and the fb gradient follows") {
    const GeneratedProblem g = gen_quadratic_l2(10, 30, 0.0, 4);
    CHECK(g.composite.psi.kind == ProxKind::zero);
    const double gamma = 0.5 / g.composite.lipschitz_L;
    auto s = make_surrogate("fb", g.composite, gamma);
    const MatrixXd A = g.composite.A.dense();
    const VectorXd x = VectorXd::LinSpaced(10, -1.0, 1.0);
    const VectorXd want = (MatrixXd::Identity(10, 10) - gamma * A) * (A * x + g.composite.b);
    CHECK((s->grad_at(x) - want).norm() <= 1e-10 * (1.0 + want.norm()));
  }

  TEST_CASE("givens products are orthogonal") {
    Pcg32 rng(3);
    const MatrixXd Q = random_givens_orthogonal(15, 75, rng);
    CHECK((Q.transpose() * Q - MatrixXd::Identity(15, 15)).norm() <= 1e-10);
  }

  TEST_CASE("tv instance spectrum") {
    const GeneratedProblem g = gen_quadratic_tv(20, 1.0, 7);
    const Eigen::SelfAdjointEigenSolver<MatrixXd> es(g.composite.A.dense());
    const VectorXd ev = es.eigenvalues();
    CHECK(ev.maxCoeff() == doctest::Approx(1e4).epsilon(1e-6));
    int zeros = 0;
    for (int k = 0; k < 20; ++k) zeros += std::abs(ev[k]) <= 1e-8 ? 1 : 0;
    CHECK(zeros == 10);
  }

  TEST_CASE("reference solution in closed form") {
    VectorXd c(2);
    c << 2.0, 0.1;
    const QuadraticComposite p(Matrix::identity(2), -c, ProxOracle::l1(1.0));
    const ReferenceSolution r = reference_solve(p);
    CHECK(r.exact);
    CHECK(r.x[0] == doctest::Approx(1.0));
    CHECK(r.x[1] == 0.0);
    // 1/2 |x - c|^2 + |x|_1 = 1.505 at the solution; the stored objective drops 1/2 |c|^2
    CHECK(r.f + 0.5 * c.squaredNorm() == doctest::Approx(1.505).epsilon(1e-14));
  }

  TEST_CASE("reference solution of a nonsingular least-squares problem") {
    Pcg32 rng(8);
    MatrixXd B(6, 6);
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) B(i, j) = rng.normal() + (i == j ? 3.0 : 0.0);
    VectorXd c(6);
    for (int i = 0; i < 6; ++i) c[i] = rng.normal();
    const MatrixXd A = B.transpose() * B;
    const QuadraticComposite p(Matrix(MatrixXd(0.5 * (A + A.transpose()))), -B.transpose() * c, ProxOracle::zero());
    const ReferenceSolution r = reference_solve(p);
    CHECK(r.converged);
    CHECK((r.x - B.lu().solve(c)).norm() <= 1e-8);
    CHECK(r.f + 0.5 * c.squaredNorm() == doctest::Approx(0.0).epsilon(1e-10).scale(1.0));
  }

  TEST_CASE("independent reference solves agree") {
    const GeneratedProblem g = gen_quadratic_l1(20, 15, 0.3, 9);
    const ReferenceSolution a = reference_solve(g.composite, 1e-10);
    QuadraticComposite q = g.composite;
    const ReferenceSolution b = reference_solve(QuadraticComposite(Matrix(q.A.dense()), q.b, q.psi), 1e-11);
    CHECK(std::abs(a.f - b.f) <= 1e-8);
  }

  TEST_CASE("finite differences") {
    VectorXd x = VectorXd::Constant(1, 1.0);
    CHECK(finite_diff_grad([](const VectorXd& v) { return 0.5 * v.squaredNorm(); }, x)[0] ==
          doctest::Approx(1.0).epsilon(1e-9));
    VectorXd w(3), y(3);
    w << 1, -2, 3;
    y << 0.3, 0.1, -4;
    CHECK((finite_diff_grad([&](const VectorXd& v) { return w.dot(v); }, y) - w).norm() <= 1e-9);
    MoreauSurrogate s(ProxOracle::l1(1.0), 1.0, BlockPartition::scalar(1));
    CHECK(finite_diff_grad([&](const VectorXd& v) { return s.value_at(v); }, VectorXd::Constant(1, 2.0))[0] ==
          doctest::Approx(1.0).epsilon(1e-8));
  }

  TEST_CASE("smoothing names") {
    CHECK(smoothing_names().size() == 4);
    CHECK_NOTHROW(check_smoothing_name("dr"));
    CHECK_THROWS_AS(check_smoothing_name("huber"), ArgumentError);
    const GeneratedProblem g = gen_quadratic_l2(30, 20, 1.0, 1);
    REQUIRE(g.composite.lipschitz_L > 0.0);
    CHECK(default_gamma("fb", g.composite) == doctest::Approx(0.5 / g.composite.lipschitz_L));
    const QuadraticComposite flat(Matrix::zero(3, 3), VectorXd::Ones(3), ProxOracle::l1(1.0));
    CHECK(default_gamma("dr", flat) == 1.0);
  }

  TEST_CASE("experiment grid writes one trace per run and a summary") {
    const fs::path out = fresh_dir("grid");
    const ExperimentResult res = run_experiment(micro_spec(out));
    CHECK(res.runs.size() == 12);
    CHECK(res.all_completed());
    int traces = 0, summaries = 0;
    for (const auto& e : fs::directory_iterator(out)) {
      if (e.path().extension() == ".csv") ++traces;
      if (e.path().filename() == "summary.json") ++summaries;
    }
    CHECK(traces == 12);
    CHECK(summaries == 1);
    const json sum = read_json_file(out / "summary.json");
    CHECK(sum.contains("groups"));
    fs::remove_all(out);
  }

  TEST_CASE("experiment summaries are reproducible") {
    json first, second;
    for (json* j : {&first, &second}) {
      const fs::path out = fresh_dir("rerun");
      run_experiment(micro_spec(out));
      *j = read_json_file(out / "summary.json");
      strip_time(*j);
      fs::remove_all(out);
    }
    CHECK(first.dump() == second.dump());
  }

  TEST_CASE("invalid experiment specs") {
    ExperimentSpec spec = micro_spec(fresh_dir("bad"));
    spec.smoothings = {"nope"};
    CHECK_THROWS(spec.validate());
    CHECK_THROWS(experiment_spec_from_json(json{{"problem", {{"generator", "unknown"}}}}));
  }
}
