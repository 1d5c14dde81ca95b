// Copyright dtnres contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dtnres/config.hpp"
#include "dtnres/derivtab.hpp"
#include "dtnres/driver.hpp"
#include "dtnres/errors.hpp"
#include "dtnres/fem.hpp"
#include "dtnres/nepcore.hpp"
#include "dtnres/refbench.hpp"
#include "dtnres/specfun.hpp"
#include "dtnres/tiar.hpp"

namespace py = pybind11;
using namespace dtnres;

namespace
{

config::RunConfig parse_config(const std::string &text)
{
  config::RunConfig c = config::parse_string(text);
  config::validate(c);
  return c;
}

}  // namespace

PYBIND11_MODULE(_core, m)
{
  m.doc() = "Scattering resonances via a DtN nonlinear eigenvalue problem";
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);

  m.def("hankel1", &specfun::hankel1, py::arg("nu"), py::arg("z"),
        "First-kind Hankel function H_nu(z).");
  m.def(
      "hankel_vector", [](int count, cd z) { return specfun::hankel_vector(count, z).values; },
      py::arg("count"), py::arg("z"), "H_0(z), ..., H_{count-1}(z).");

  m.def(
      "newton_resonance",
      [](int mode, cd seed, double R, double eta) {
        return refbench::newton_resonance(mode, seed, R, eta);
      },
      py::arg("m"), py::arg("seed"), py::arg("R") = 1.0, py::arg("eta") = 2.0,
      "Root of the single-disk resonance relation for Fourier mode m.");
  m.def(
      "reference_table",
      [](const std::string &geometry) {
        py::list out;
        for (const auto &r : refbench::reference_table(geometry))
        {
          py::dict d;
          d["id"] = r.id;
          d["m"] = r.m ? py::cast(*r.m) : py::none();
          d["lambda"] = r.lambda;
          d["exact_relation"] = r.source == refbench::Source::ExactRelation;
          out.append(d);
        }
        return out;
      },
      py::arg("geometry") = "single-disk");

  m.def(
      "derivative_table",
      [](cd mu, double a, int nu_max, int k_max, const std::vector<cd> &poles) {
        const DerivativeTable t = build_table(mu, a, nu_max, k_max, poles);
        Eigen::MatrixXcd out(k_max + 1, nu_max + 1);
        for (int j = 0; j <= k_max; ++j)
        {
          for (int nu = 0; nu <= nu_max; ++nu)
          {
            out(j, nu) = t.coeff(j, nu);
          }
        }
        return out;
      },
      py::arg("mu"), py::arg("a"), py::arg("nu_max"), py::arg("k_max"),
      py::arg("poles") = std::vector<cd>{},
      "Taylor coefficients (rows j = 0..k_max, columns nu = 0..nu_max).");

  m.def(
      "find_poles",
      [](double a, int nu_max, double re_min, double re_max, double im_min, double im_max) {
        std::vector<std::pair<int, cd>> out;
        for (const Pole &p : find_poles(a, nu_max, Region{re_min, re_max, im_min, im_max}).poles)
        {
          out.emplace_back(p.nu, p.z);
        }
        return out;
      },
      py::arg("a"), py::arg("nu_max"), py::arg("re_min"), py::arg("re_max"), py::arg("im_min"),
      py::arg("im_max"), "Zeros of H_nu(a z) in a rectangle as (nu, z) pairs.");

  py::class_<DtnNep>(m, "DtnNep")
      .def_property_readonly("size", &DtnNep::size)
      .def_property_readonly("boundary_size", &DtnNep::boundary_size)
      .def_property_readonly("nu_max", &DtnNep::nu_max)
      .def_property_readonly("radius", &DtnNep::radius)
      .def_property_readonly("q", &DtnNep::q)
      .def("apply", &DtnNep::apply, py::arg("lam"), py::arg("v"))
      .def("dense", &DtnNep::dense, py::arg("lam"))
      .def("dtn_symbols", &DtnNep::dtn_symbols, py::arg("lam"));

  m.def(
      "build_problem",
      [](const std::string &text) { return fem::build_problem(parse_config(text).geometry); },
      py::arg("config"), "Assemble the matrix family from configuration text.");
  m.def("backward_error", &backward_error, py::arg("nep"), py::arg("lam"), py::arg("v"));

  m.def(
      "solve",
      [](const std::string &text) {
        const config::RunConfig c = parse_config(text);
        const DtnNep nep = fem::build_problem(c.geometry);
        TiarResult r;
        {
          py::gil_scoped_release release;
          r = cli::solve(c, nep);
        }
        py::list out;
        for (const RitzPair &p : r.pairs)
        {
          py::dict d;
          d["lambda"] = p.lambda;
          d["backward_error"] = p.backward_error;
          d["converged"] = p.converged;
          d["iterations_to_tolerance"] = p.iterations_to_tolerance;
          out.append(d);
        }
        return out;
      },
      py::arg("config"), "Ritz pairs near the configured shift, sorted by backward error.");
}
