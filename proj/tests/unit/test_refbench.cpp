// Copyright dtnres contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "dtnres/errors.hpp"
#include "dtnres/refbench.hpp"
#include "support/oracles.hpp"

using namespace dtnres;
using namespace dtnres::refbench;

namespace
{

double rel(cd x, cd y)
{
  return std::abs(x - y) / std::abs(y);
}

// J_m(x) from Bessel's integral.
cd j_integral(int m, cd x)
{
  return oracle::integrate([&](double t) { return std::cos(m * t - x * std::sin(t)); }, 0.0,
                           oracle::kPi, 400) /
         oracle::kPi;
}

}  // namespace

TEST_CASE("Newton reproduces the exact-relation table")
{
  const auto table = reference_table("single-disk");
  REQUIRE(table.size() == 6);
  for (const auto &r : table)
  {
    REQUIRE(r.source == Source::ExactRelation);
    REQUIRE(r.m.has_value());
    REQUIRE(r.seed.has_value());
    std::vector<cd> trace;
    const cd z = newton_resonance(*r.m, *r.seed, 1.0, 2.0, &trace);
    INFO("id=" << r.id);
    CHECK(rel(z, r.lambda) < 1e-11);
    CHECK(z.imag() < 0.0);
    CHECK(trace.size() < 30);
    // Symmetric in the sign of the mode.
    CHECK(rel(newton_resonance(-*r.m, *r.seed, 1.0, 2.0), z) < 1e-13);
  }
}

TEST_CASE("relation vanishes at the roots under independent Bessel evaluation")
{
  for (const auto &r : reference_table("single-disk"))
  {
    const int m = *r.m;
    const cd z = newton_resonance(m, *r.seed, 1.0, 2.0);
    // J_m(eta z) H_m'(z) - eta J_m'(eta z) H_m(z), derivatives by recurrence.
    const cd x = 2.0 * z;
    const cd jm = j_integral(m, x), jp = 0.5 * (j_integral(m - 1, x) - j_integral(m + 1, x));
    const cd hm = oracle::hankel_integral(m, z);
    const cd hp = 0.5 * (oracle::hankel_integral(m - 1, z) - oracle::hankel_integral(m + 1, z));
    const cd d = jm * hp - 2.0 * jp * hm;
    const double scale = std::abs(jm * hp) + std::abs(2.0 * jp * hm);
    INFO("id=" << r.id);
    CHECK(std::abs(d) < 1e-9 * scale);
    CHECK(std::abs(disk_relation(m, z, 1.0, 2.0)) < 1e-12 * scale);
  }
}

TEST_CASE("relation derivative")
{
  const cd z(8.9, -0.2), h(1e-5, 0.0);
  for (int m : {0, 3, 14})
  {
    const cd fd = (disk_relation(m, z + h, 1.0, 2.0) - disk_relation(m, z - h, 1.0, 2.0)) / (2.0 * h);
    CHECK(rel(disk_relation_derivative(m, z, 1.0, 2.0), fd) < 1e-8);
  }
  CHECK_THROWS_AS(disk_relation(1, 0.0, 1.0, 2.0), DomainError);
}

TEST_CASE("tabulated dimer records")
{
  const auto table = reference_table("dimer");
  REQUIRE(table.size() == 28);
  for (const auto &r : table)
  {
    CHECK(r.source == Source::Tabulated);
    CHECK(r.lambda.imag() < 0.0);
    CHECK(r.lambda.real() > 0.0);
    CHECK(!r.m.has_value());
  }
  CHECK(reference("dimer", 5).lambda == cd(1.0986166110, -1.00574509569));
  CHECK(reference("dimer", 6).lambda == cd(2.1655203793, -0.53731229013));
  CHECK(reference("dimer", 11).lambda == cd(19.1590173402, -0.63161790252));
  CHECK(reference("dimer", 14).lambda == cd(19.1765650857, -0.08415304732));
  CHECK(reference("dimer", 28).lambda == cd(99.2229411961, -0.0000000000001));
  CHECK(reference("single-disk", 3).m == 14);
  CHECK_THROWS_AS(reference("dimer", 0), ConfigError);
  CHECK_THROWS_AS(reference("dimer", 29), ConfigError);
  CHECK_THROWS_AS(reference("single-disk", 7), ConfigError);
  CHECK_THROWS_AS(reference("trimer", 1), ConfigError);
  CHECK_THROWS_AS(reference_table("trimer"), ConfigError);
}
