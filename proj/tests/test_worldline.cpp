#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "rrlab/lines.hpp"
#include "rrlab/worldline.hpp"

using namespace rrlab;

namespace {

// Cubic position profile: exactly representable by the quintic segments.
WorldlinePoint cubic_point(double tau) {
  WorldlinePoint p;
  p.tau = tau;
  p.z = LorentzVector(4);
  p.u = LorentzVector(4);
  p.a = LorentzVector(4);
  const double c[4][4] = {{0.0, 1.2, -0.3, 0.05},
                          {0.4, -0.7, 0.2, -0.1},
                          {-1.0, 0.3, 0.15, 0.02},
                          {2.0, 0.1, -0.4, 0.08}};
  for (int i = 0; i < 4; ++i) {
    p.z[i] = c[i][0] + tau * (c[i][1] + tau * (c[i][2] + tau * c[i][3]));
    p.u[i] = c[i][1] + tau * (2.0 * c[i][2] + tau * 3.0 * c[i][3]);
    p.a[i] = 2.0 * c[i][2] + tau * 6.0 * c[i][3];
  }
  return p;
}

double uniform_retarded_root(const LorentzVector& y, const LorentzVector& z0,
                             const LorentzVector& u) {
  const LorentzVector w = y - z0;
  const double wu = minkowski_dot(w, u);
  const double w2 = minkowski_dot(w, w);
  return -wu - std::sqrt(wu * wu + w2);
}

}  // namespace

TEST_CASE("knot queries return the stored state bitwise") {
  ParticleProps props;
  Worldline w = make_circular_orbit(props, 1.0, 0.5, 0.0, 10.0, 41);
  for (int i : {0, 7, 40}) {
    const WorldlinePoint& p = w.point(i);
    const WorldlinePoint q = interpolate(w, p.tau);
    for (int c = 0; c < 4; ++c) {
      CHECK(q.z[c] == p.z[c]);
      CHECK(q.u[c] == p.u[c]);
      CHECK(q.a[c] == p.a[c]);
    }
  }
}

TEST_CASE("interpolation is exact on cubic trajectories") {
  ParticleProps props;
  Worldline w(props);
  for (int i = 0; i <= 20; ++i) w.add_point(cubic_point(-1.0 + 0.35 * i));

  std::mt19937 rng(5);
  std::uniform_real_distribution<double> dist(-1.0, 6.0);
  for (int trial = 0; trial < 300; ++trial) {
    const double tau = dist(rng);
    const WorldlinePoint ref = cubic_point(tau);
    const WorldlinePoint q = interpolate(w, tau);
    for (int c = 0; c < 4; ++c) {
      CHECK(q.z[c] == doctest::Approx(ref.z[c]).epsilon(1e-13));
      CHECK(q.u[c] == doctest::Approx(ref.u[c]).epsilon(1e-12));
      CHECK(q.a[c] == doctest::Approx(ref.a[c]).epsilon(1e-11));
    }
  }
}

TEST_CASE("interpolation error falls like h^6") {
  ParticleProps props;
  auto max_err = [&](int n) {
    Worldline w = make_circular_orbit(props, 1.0, 0.6, 0.0, 4.0, n);
    double m = 0.0;
    for (int i = 0; i < 400; ++i) {
      const double tau = 4.0 * (i + 0.5) / 400.0;
      const WorldlinePoint ref = circular_orbit_point(props, 1.0, 0.6, tau);
      const WorldlinePoint q = interpolate(w, tau);
      m = std::max(m, inf_norm(q.z - ref.z));
    }
    return m;
  };
  const double e1 = max_err(17);
  const double e2 = max_err(33);
  CHECK(e2 < e1 / 32.0);  // sixth order would give 64
}

TEST_CASE("jerk interpolation follows the stored cubic data") {
  ParticleProps props;
  Worldline w = make_circular_orbit(props, 1.0, 0.5, 0.0, 6.0, 61);
  for (int i = 0; i < 50; ++i) {
    const double tau = 6.0 * (i + 0.37) / 50.0;
    const WorldlinePoint ref = circular_orbit_point(props, 1.0, 0.5, tau);
    const WorldlinePoint q = interpolate(w, tau);
    CHECK(inf_norm(q.da - ref.da) < 1e-6 * (1.0 + inf_norm(ref.da)));
    CHECK(inf_norm(q.dda - ref.dda) < 1e-4 * (1.0 + inf_norm(ref.dda)));
  }
}

TEST_CASE("append discipline and freeze") {
  ParticleProps props;
  Worldline w(props);
  WorldlinePoint p = cubic_point(0.0);
  w.add_point(p);
  CHECK_THROWS_AS(w.add_point(p), std::invalid_argument);  // tau not increasing
  w.add_point(cubic_point(1.0));
  w.freeze();
  CHECK(w.frozen());
  CHECK_THROWS_AS(w.add_point(cubic_point(2.0)), std::logic_error);
}

TEST_CASE("retarded solver matches the uniform-motion closed form") {
  ParticleProps props;
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> pos(-5.0, 5.0);
  std::uniform_real_distribution<double> bdist(-0.6, 0.6);
  std::uniform_real_distribution<double> tdist(4.0, 14.0);

  for (int trial = 0; trial < 200; ++trial) {
    LorentzVector z0{0.0, pos(rng) * 0.2, pos(rng) * 0.2, pos(rng) * 0.2};
    LorentzVector u = four_velocity_from_beta({bdist(rng), bdist(rng) * 0.5,
                                               bdist(rng) * 0.5});
    Worldline w = make_uniform_line(props, z0, u, -40.0, 40.0, 81);

    LorentzVector y{tdist(rng), pos(rng), pos(rng), pos(rng)};
    const double s_ref = uniform_retarded_root(y, z0, u);
    const RetardedData rd = retarded_data(w, y);

    CHECK(std::fabs(rd.s - s_ref) < 1e-12 * std::max(1.0, std::fabs(s_ref)));
    CHECK(rd.r > 0.0);
    CHECK(std::fabs(minkowski_dot(rd.k, rd.pt.u) + 1.0) < 1e-10);
    CHECK(std::fabs(minkowski_dot(rd.k, rd.k)) < 1e-9);
    // The separation is null at the root.
    const LorentzVector rel = y - rd.pt.z;
    CHECK(std::fabs(minkowski_dot(rel, rel)) <
          1e-10 * (1.0 + y[0] * y[0]));
  }
}

TEST_CASE("retarded geometry invariants on a curved line") {
  ParticleProps props;
  Worldline w = make_circular_orbit(props, 1.0, 0.7, 0.0, 40.0, 801);
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> pos(-6.0, 6.0);
  std::uniform_real_distribution<double> tdist(20.0, 30.0);
  for (int trial = 0; trial < 200; ++trial) {
    LorentzVector y{tdist(rng), pos(rng), pos(rng), pos(rng)};
    const RetardedData rd = retarded_data(w, y);
    CHECK(rd.r > 0.0);
    CHECK(std::fabs(minkowski_dot(rd.k, rd.pt.u) + 1.0) < 1e-10);
    CHECK(std::fabs(minkowski_dot(rd.k, rd.k)) < 1e-9);
    CHECK(rd.a_k ==
          doctest::Approx(minkowski_dot(rd.pt.a, rd.k)).epsilon(1e-12));
  }
}

TEST_CASE("history errors name the end that was run off") {
  ParticleProps props;
  LorentzVector z0{0.0, 0.0, 0.0, 0.0};
  LorentzVector u{1.0, 0.0, 0.0, 0.0};
  Worldline w = make_uniform_line(props, z0, u, 0.0, 10.0, 11);

  // Retarded point would sit before tau = 0.
  LorentzVector early{1.0, 0.0, 0.0, 5.0};
  CHECK_THROWS_AS(retarded_data(w, early), HistoryError);
  try {
    retarded_data(w, early);
  } catch (const HistoryError& e) {
    CHECK_FALSE(e.beyond_end);
  }

  // Retarded point would sit after tau = 10.
  LorentzVector late{30.0, 0.0, 0.0, 1.0};
  try {
    retarded_data(w, late);
    CHECK(false);
  } catch (const HistoryError& e) {
    CHECK(e.beyond_end);
  }

  // On the worldline itself.
  LorentzVector on{5.0, 0.0, 0.0, 0.0};
  CHECK_THROWS_AS(retarded_data(w, on), SingularPointError);

  CHECK_THROWS_AS(interpolate(w, -0.5), HistoryError);
  CHECK_THROWS_AS(interpolate(w, 10.5), HistoryError);
}

TEST_CASE("tau_at_lab_time inverts the time component") {
  ParticleProps props;
  const double beta = 0.6;
  const double gamma = 1.0 / std::sqrt(1.0 - beta * beta);
  Worldline w = make_circular_orbit(props, 2.0, beta, 0.0, 20.0, 201);
  for (double t : {1.0, 7.5, 19.0}) {
    const double tau = tau_at_lab_time(w, t);
    CHECK(tau == doctest::Approx(t / gamma).epsilon(1e-12));
  }
  CHECK_THROWS_AS(tau_at_lab_time(w, -1.0), HistoryError);
}

TEST_CASE("wavefront chart: round trip, ray flag, volume factor") {
  ParticleProps props;
  props.massless = true;
  props.charge = 1.0;
  Worldline w = make_massless_circular(props, 1.0, 0.0, 30.0, 1201);

  const double t = 25.0;
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> sdist(18.0, 24.5);
  std::uniform_real_distribution<double> thdist(0.15, 3.0);
  std::uniform_real_distribution<double> phdist(0.0, 6.28);

  for (int trial = 0; trial < 500; ++trial) {
    const double s = sdist(rng), th = thdist(rng), ph = phdist(rng);
    const ChartPoint cp = wavefront_chart(w, t, s, th, ph);
    CHECK(cp.jacobian > 0.0);
    CHECK(cp.r == doctest::Approx((t - s) * (1.0 - std::cos(th)))
                      .epsilon(1e-12));

    const RetardedData rd = retarded_data(w, cp.y);
    CHECK(std::fabs(rd.s - s) < 1e-10);
    CHECK(rd.r == doctest::Approx(cp.r).epsilon(1e-7));
    CHECK_FALSE(rd.on_ray);
  }

  // Forward ray: retarded distance collapses and the flag is raised.
  const ChartPoint ray = wavefront_chart(w, t, 20.0, 1e-9, 0.3);
  const RetardedData rd = retarded_data(w, ray.y);
  CHECK(rd.on_ray);

  // Volume factor against a finite-difference Jacobian of the chart map.
  auto spatial = [&](double s, double th, double ph, int i) {
    return wavefront_chart(w, t, s, th, ph).y[i + 1];
  };
  for (int trial = 0; trial < 25; ++trial) {
    const double s = sdist(rng), th = thdist(rng), ph = phdist(rng);
    const double d = 1e-5;
    double J[3][3];
    for (int i = 0; i < 3; ++i) {
      J[i][0] = (spatial(s + d, th, ph, i) - spatial(s - d, th, ph, i)) /
                (2.0 * d);
      J[i][1] = (spatial(s, th + d, ph, i) - spatial(s, th - d, ph, i)) /
                (2.0 * d);
      J[i][2] = (spatial(s, th, ph + d, i) - spatial(s, th, ph - d, i)) /
                (2.0 * d);
    }
    const double det =
        J[0][0] * (J[1][1] * J[2][2] - J[1][2] * J[2][1]) -
        J[0][1] * (J[1][0] * J[2][2] - J[1][2] * J[2][0]) +
        J[0][2] * (J[1][0] * J[2][1] - J[1][1] * J[2][0]);
    const ChartPoint cp = wavefront_chart(w, t, s, th, ph);
    CHECK(std::fabs(det) == doctest::Approx(cp.jacobian).epsilon(1e-5));
  }

  ParticleProps massive;
  Worldline wm = make_circular_orbit(massive, 1.0, 0.5, 0.0, 10.0, 51);
  CHECK_THROWS_AS(wavefront_chart(wm, 5.0, 1.0, 0.5, 0.5), std::domain_error);
}
