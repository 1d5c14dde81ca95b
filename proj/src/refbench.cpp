// Copyright dtnres contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "dtnres/refbench.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "dtnres/errors.hpp"
#include "dtnres/specfun.hpp"

namespace dtnres::refbench
{

namespace
{

struct BesselTriple
{
  cd f, df, d2f;  // value and first two derivatives of an order-m cylinder function
};

// Derivatives from f' = (f_{m-1} - f_{m+1})/2 and the Bessel equation.
BesselTriple triple(int m, cd x, cd fm1, cd f, cd fp1)
{
  const cd df = 0.5 * (fm1 - fp1);
  const double mm = static_cast<double>(m) * m;
  const cd d2f = -df / x - (1.0 - mm / (x * x)) * f;
  return {f, df, d2f};
}

BesselTriple bessel_j_triple(int m, cd x)
{
  return triple(m, x, specfun::bessel_j(m - 1, x), specfun::bessel_j(m, x),
                specfun::bessel_j(m + 1, x));
}

BesselTriple hankel_triple(int m, cd x)
{
  const specfun::HankelVector hv = specfun::hankel_vector(std::abs(m) + 2, x);
  return triple(m, x, hv.at(m - 1), hv.at(m), hv.at(m + 1));
}

std::string format_complex(cd z)
{
  std::ostringstream os;
  os.precision(15);
  os << z.real() << (z.imag() < 0 ? "" : "+") << z.imag() << "i";
  return os.str();
}

}  // namespace

cd disk_relation(int m, cd lambda, double R, double eta)
{
  if (lambda == cd(0.0))
  {
    throw DomainError("disk_relation: lambda must be non-zero");
  }
  const BesselTriple J = bessel_j_triple(m, lambda * eta * R);
  const BesselTriple H = hankel_triple(m, lambda * R);
  return J.f * H.df - eta * J.df * H.f;
}

cd disk_relation_derivative(int m, cd lambda, double R, double eta)
{
  const BesselTriple J = bessel_j_triple(m, lambda * eta * R);
  const BesselTriple H = hankel_triple(m, lambda * R);
  // The eta R J' H' cross terms cancel.
  return R * J.f * H.d2f - eta * eta * R * J.d2f * H.f;
}

cd newton_resonance(int m, cd seed, double R, double eta, std::vector<cd> *trace)
{
  cd z = seed;
  double last_step = std::numeric_limits<double>::infinity();
  std::vector<cd> local;
  std::vector<cd> &tr = trace ? *trace : local;
  tr.push_back(z);
  for (int it = 0; it < 100; ++it)
  {
    const cd step = disk_relation(m, z, R, eta) / disk_relation_derivative(m, z, R, eta);
    const double s = std::abs(step);
    if (!std::isfinite(s))
    {
      break;
    }
    // Once in the rounding regime the step stops shrinking; keep the iterate.
    if (s <= 1e-14 * std::abs(z) || (s < 1e-12 * std::abs(z) && s >= last_step))
    {
      z -= step;
      tr.push_back(z);
      return z;
    }
    z -= step;
    tr.push_back(z);
    last_step = s;
  }
  std::ostringstream os;
  os << "Newton on the disk relation (m=" << m << ") did not converge from seed "
     << format_complex(seed) << "; trace:";
  for (cd t : tr)
  {
    os << ' ' << format_complex(t);
  }
  throw ConvergenceError(os.str());
}

std::vector<ReferenceResonance> reference_table(const std::string &geometry)
{
  using S = Source;
  if (geometry == "single-disk")
  {
    const std::string g = geometry;
    return {
        {1, 1, cd(9.021766303207, -0.273829280623), S::ExactRelation, g, cd(9.0, -0.27), "exterior"},
        {2, 8, cd(8.936779164355, -0.164935525246), S::ExactRelation, g, cd(8.94, -0.16), "exterior"},
        {3, 14, cd(8.783835782061, -0.000247588219), S::ExactRelation, g, cd(8.78, -0.001), "interior"},
        {4, 0, cd(19.243876046899, -0.274713999601), S::ExactRelation, g, cd(19.2, -0.3), "exterior"},
        {5, 19, cd(19.241527655113, -0.104420737352), S::ExactRelation, g, cd(19.24, -0.1), "exterior"},
        {6, 25, cd(19.156200970821, -0.000653924318), S::ExactRelation, g, cd(19.16, -0.001), "interior"},
    };
  }
  if (geometry == "dimer")
  {
    const double v[28][2] = {
        {3.499842, -8.4003189},          {3.082426, -8.1795102},
        {3.662856165, -4.980016551},     {3.035882038, -4.910209072},
        {1.0986166110, -1.00574509569},  {2.1655203793, -0.53731229013},
        {4.3700360826, -1.52656168626},  {3.9580686857, -0.52895955645},
        {4.8949905287, -0.40281083717},  {20.0018652230, -1.19979332765},
        {19.1590173402, -0.63161790252}, {20.3296169084, -0.53046501438},
        {21.0596179198, -0.41347266647}, {19.1765650857, -0.08415304732},
        {19.2563064489, -0.06652895684}, {99.0706091289, -0.53389807975},
        {98.6967997099, -0.386922639003}, {98.8356759636, -0.069143373791},
        {98.8254516105, -0.059689390790}, {99.4061929966, -0.000006880063},
        {99.4061923466, -0.000006849959}, {99.4061921097, -0.000009251593},
        {99.4061941089, -0.000009059285}, {99.2530774600, -0.000000004940},
        {99.2530774626, -0.000000004465}, {99.2530774593, -0.000000004441},
        {99.2530774637, -0.000000004263}, {99.2229411961, -0.0000000000001},
    };
    std::vector<ReferenceResonance> out;
    for (int j = 0; j < 28; ++j)
    {
      out.push_back({j + 1, std::nullopt, cd(v[j][0], v[j][1]), S::Tabulated, geometry,
                     std::nullopt, ""});
    }
    return out;
  }
  throw ConfigError("reference_table: unknown geometry '" + geometry +
                    "' (expected single-disk or dimer)");
}

const ReferenceResonance &reference(const std::string &geometry, int id)
{
  static const std::vector<ReferenceResonance> single = reference_table("single-disk");
  static const std::vector<ReferenceResonance> dimer = reference_table("dimer");
  const std::vector<ReferenceResonance> &t = geometry == "dimer" ? dimer : single;
  if (geometry != "dimer" && geometry != "single-disk")
  {
    throw ConfigError("unknown geometry '" + geometry + "'");
  }
  if (id < 1 || id > static_cast<int>(t.size()))
  {
    throw ConfigError("reference id " + std::to_string(id) + " out of range for " + geometry);
  }
  return t[id - 1];
}

}  // namespace dtnres::refbench
