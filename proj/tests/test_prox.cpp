#include <doctest.h>

#include <cmath>

#include "smoothcd/brute_force.hpp"
#include "smoothcd/check_suites.hpp"
#include "smoothcd/errors.hpp"
#include "smoothcd/prox.hpp"
#include "smoothcd/rng.hpp"

using namespace smoothcd;

namespace {

VectorXd vec(std::initializer_list<double> v) {
  VectorXd x(static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (double a : v) x[i++] = a;
  return x;
}

void check_close(const VectorXd& a, const VectorXd& b, double tol = 1e-12) {
  REQUIRE(a.size() == b.size());
  CHECK((a - b).lpNorm<Eigen::Infinity>() <= tol);
}

VectorXd gaussian(Pcg32& rng, int n) {
  VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.normal();
  return v;
}

}  // namespace

TEST_SUITE("prox") {
  TEST_CASE("euclidean norm shrinks along the ray") {
    check_close(prox_euclidean_norm(1.0, vec({3, 4})), vec({2.4, 3.2}));
    check_close(prox_euclidean_norm(10.0, vec({3, 4})), vec({0, 0}));
    CHECK(prox_euclidean_norm(1.0, vec({0, 0})).norm() == 0.0);
  }

  TEST_CASE("soft thresholding") {
    check_close(prox_l1(1.0, vec({3, -0.5, -2})), vec({2, 0, -1}));
  }

  TEST_CASE("group norm acts groupwise") {
    const Groups g{{0, 1}, {2}};
    check_close(prox_group_norm(1.0, vec({3, 4, -2}), g), vec({2.4, 3.2, -1}));
  }

  TEST_CASE("balls") {
    check_close(project_l2_ball(1.0, vec({3, 4})), vec({0.6, 0.8}));
    check_close(project_l2_ball(1.0, vec({0.1, 0.2})), vec({0.1, 0.2}));
    check_close(project_l2_ball(1.0, vec({1, 1}), vec({1, 3})), vec({1, 2}));
    // l1 ball of radius 1: (2, 0.5) -> soft threshold by 0.75
    check_close(project_l1_ball(1.0, VectorXd::Zero(2), vec({2, 0.5})), vec({1, 0}));
    check_close(project_l1_ball(1.0, VectorXd::Zero(2), vec({0.8, 0.6})), vec({0.6, 0.4}));
    check_close(project_l1_ball(1.0, VectorXd::Zero(2), vec({0.3, -0.2})), vec({0.3, -0.2}));
  }

  TEST_CASE("simplex") {
    check_close(project_simplex(vec({0.6, 0.6})), vec({0.5, 0.5}));
    check_close(project_simplex(vec({2, 0, 0})), vec({1, 0, 0}));
    check_close(project_simplex(vec({1, 1}), 4.0), vec({2, 2}));
    const VectorXd p = project_simplex(vec({0.3, -1.0, 0.9, 0.2}));
    CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(p.minCoeff() >= 0.0);
  }

  TEST_CASE("hyperplane within a box") {
    const VectorXd a = vec({1, 1}), l = vec({0, 0}), u = vec({1, 1});
    check_close(project_hyperplane_box(a, 1.0, l, u, vec({2, 2})), vec({0.5, 0.5}));
    check_close(project_hyperplane_box(a, 1.0, l, u, vec({3, 0})), vec({1, 0}));
    CHECK_THROWS_AS(project_hyperplane_box(a, 5.0, l, u, vec({0, 0})), InfeasibleError);
  }

  TEST_CASE("affine set") {
    MatrixXd A(1, 2);
    A << 1, 1;
    check_close(project_affine(A, vec({1}), vec({0, 0})), vec({0.5, 0.5}));
    const AffineProjector P(A, vec({1}));
    CHECK(P.residual(P.project(vec({3, -7}))) <= 1e-14);
  }

  TEST_CASE("tv 1d") {
    check_close(prox_tv_1d(0.5, vec({1, -1})), vec({0.5, -0.5}));
    check_close(prox_tv_1d(2.0, vec({1, -1})), vec({0, 0}));
    check_close(prox_tv_1d(0.3, vec({2, 2, 2})), vec({2, 2, 2}));
    // mean is preserved
    Pcg32 rng(3);
    const VectorXd y = gaussian(rng, 20);
    CHECK(prox_tv_1d(0.7, y).sum() == doctest::Approx(y.sum()).epsilon(1e-13));
  }

  TEST_CASE("power norm") {
    // r = 0: lambda |x|^2 with step gamma -> x / (1 + 2 gamma)
    check_close(prox_power_norm(0.5, 0.0, vec({2, -4})), vec({1, -2}));
    // r = 1, gamma = 1/3, x = e1: t + t^2 = 1
    const double t = (std::sqrt(5.0) - 1.0) / 2.0;
    check_close(prox_power_norm(1.0 / 3.0, 1.0, vec({1, 0})), vec({t, 0}), 1e-12);
    // r = 2, gamma = 1/4, x = e1: t + t^3 = 1
    const VectorXd z = prox_power_norm(0.25, 2.0, vec({1, 0}));
    CHECK(std::abs(z[0] + z[0] * z[0] * z[0] - 1.0) <= 1e-12);
  }

  TEST_CASE("oracle dispatch and values") {
    CHECK(ProxOracle::l1(2.0).value(vec({1, -1})) == 4.0);
    CHECK(ProxOracle::simplex().value(vec({0.5, 0.5})) == 0.0);
    CHECK(std::isinf(ProxOracle::simplex().value(vec({0.9, 0.5}))));
    CHECK(ProxOracle::ball2(1.0).is_indicator());
    CHECK_FALSE(ProxOracle::tv1d(1.0).is_indicator());
    for (auto k : {ProxKind::zero, ProxKind::l1, ProxKind::l2norm, ProxKind::group, ProxKind::ball2, ProxKind::ball1,
                   ProxKind::simplex, ProxKind::hyperbox, ProxKind::affine, ProxKind::tv1d, ProxKind::power})
      CHECK(prox_kind_from_string(to_string(k)) == k);
    CHECK_THROWS_AS(prox_kind_from_string("nope"), ArgumentError);
  }

  TEST_CASE("moreau value of |x| matches huber") {
    VectorXd z;
    CHECK(moreau_value(ProxOracle::l1(1.0), 1.0, vec({2}), &z) == doctest::Approx(1.5));
    CHECK(z[0] == doctest::Approx(1.0));
    CHECK(moreau_value(ProxOracle::l1(1.0), 1.0, vec({0.5})) == doctest::Approx(0.125));
  }

  TEST_CASE("agrees with a brute-force minimizer") {
    Pcg32 rng(17);
    for (int t = 0; t < 10; ++t) {
      const VectorXd x = 2.0 * gaussian(rng, 3);
      const double g = 0.2 + rng.uniform();
      check_close(ProxOracle::l2norm(0.7).evaluate(g, x), brute_force_prox(ProxOracle::l2norm(0.7), g, x), 1e-6);
      check_close(ProxOracle::ball1(1.0).evaluate(g, x), brute_force_prox(ProxOracle::ball1(1.0), g, x), 1e-6);
      check_close(ProxOracle::tv1d(0.4).evaluate(g, x), brute_force_prox(ProxOracle::tv1d(0.4), g, x), 1e-6);
    }
  }

  TEST_CASE("firm nonexpansiveness") {
    Pcg32 rng(23);
    const std::vector<ProxOracle> ops{ProxOracle::l2norm(1.0), ProxOracle::ball1(1.0), ProxOracle::simplex(),
                                      ProxOracle::tv1d(0.5), ProxOracle::power_norm(1.0)};
    for (const auto& op : ops) {
      for (int t = 0; t < 50; ++t) {
        const VectorXd x = gaussian(rng, 6), y = gaussian(rng, 6);
        const VectorXd px = op.evaluate(0.7, x), py = op.evaluate(0.7, y);
        CHECK((px - py).squaredNorm() <= (px - py).dot(x - y) + 1e-12);
      }
    }
  }

  TEST_CASE("sign-pattern tv oracle") {
    CHECK((tv_prox_sign_pattern(vec({1, -1}), 0.5) - vec({0.5, -0.5})).norm() <= 1e-15);
    CHECK_THROWS_AS(tv_prox_sign_pattern(VectorXd::Zero(9), 1.0), ArgumentError);
  }

  TEST_CASE("argument errors") {
    CHECK_THROWS_AS(prox_l1(-1.0, vec({1})), ArgumentError);
    CHECK_THROWS_AS(project_l2_ball(-1.0, vec({1})), ArgumentError);
    CHECK_THROWS_AS(project_simplex(vec({1}), -1.0), ArgumentError);
    CHECK_THROWS_AS(prox_group_norm(1.0, vec({1, 2}), Groups{{0}, {0, 1}}), ArgumentError);
  }
}
