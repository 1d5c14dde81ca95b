// Copyright dtnres contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "dtnres/driver.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <locale>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "dtnres/derivtab.hpp"
#include "dtnres/errors.hpp"
#include "dtnres/fem.hpp"
#include "dtnres/refbench.hpp"
#include "dtnres/specfun.hpp"

namespace dtnres::cli
{

namespace
{

// Restores the stream formatting state on scope exit.
class CsvScope
{
public:
  explicit CsvScope(std::ostream &os) : os_(os), loc_(os.imbue(std::locale::classic()))
  {
    prec_ = os.precision(17);
    flags_ = os.flags();
    os.unsetf(std::ios::floatfield);
  }
  ~CsvScope()
  {
    os_.imbue(loc_);
    os_.precision(prec_);
    os_.flags(flags_);
  }

private:
  std::ostream &os_;
  std::locale loc_;
  std::streamsize prec_;
  std::ios::fmtflags flags_;
};

const RitzPair *nearest(const std::vector<RitzPair> &pairs, cd target)
{
  const RitzPair *best = nullptr;
  for (const RitzPair &p : pairs)
  {
    if (!best || std::abs(p.lambda - target) < std::abs(best->lambda - target))
    {
      best = &p;
    }
  }
  return best;
}

std::string reference_geometry(const config::RunConfig &c)
{
  if (!c.reference_geometry.empty())
  {
    return c.reference_geometry;
  }
  return c.geometry.kind == fem::GeometryConfig::Kind::Dimer ? "dimer" : "single-disk";
}

DtnNep truncate(const DtnNep &nep, int nu_max)
{
  return DtnNep(nep.A(), nep.M(), nep.q().leftCols(nu_max + 1), nep.radius());
}

SweepRow make_row(int value, int n, const std::vector<cd> &refs,
                  const std::vector<RitzPair> &pairs)
{
  SweepRow row{value, n, {}, {}, {}};
  for (cd ref : refs)
  {
    const RitzPair *p = nearest(pairs, ref);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    row.lambda.push_back(p ? p->lambda : cd(nan, nan));
    row.relative_error.push_back(p ? std::abs(p->lambda - ref) / std::abs(ref) : nan);
    row.backward_error.push_back(p ? p->backward_error : nan);
  }
  return row;
}

// Output target: a file when a path is configured, `fallback` otherwise.
class Sink
{
public:
  Sink(const std::string &path, std::ostream &fallback)
  {
    if (path.empty() || path == "-")
    {
      os_ = &fallback;
      return;
    }
    file_.open(path);
    if (!file_)
    {
      throw ConfigError("cannot write '" + path + "'");
    }
    os_ = &file_;
  }
  std::ostream &get() { return *os_; }

private:
  std::ofstream file_;
  std::ostream *os_ = nullptr;
};

}  // namespace

int exit_code(const std::exception &e)
{
  if (dynamic_cast<const ConfigError *>(&e) || dynamic_cast<const RangeError *>(&e) ||
      dynamic_cast<const DomainError *>(&e))
  {
    return kConfigError;
  }
  if (dynamic_cast<const GeometryError *>(&e))
  {
    return kGeometryError;
  }
  return kNumericalFailure;
}

int guarded(std::ostream &err, const std::function<int()> &body)
{
  try
  {
    return body();
  }
  catch (const std::exception &e)
  {
    err << "error: " << e.what() << '\n';
    return exit_code(e);
  }
}

TiarOptions tiar_options(const config::RunConfig &c)
{
  TiarOptions o;
  o.max_iterations = c.iterations;
  o.tolerance = c.tolerance;
  o.cancel = c.cancel;
  o.pole_region = c.pole_region;
  o.seed = c.seed;
  o.history_stride = c.history_stride;
  o.track = c.track;
  return o;
}

TiarResult solve(const config::RunConfig &c, const DtnNep &nep)
{
  return run(nep, c.shift, tiar_options(c));
}

void write_pairs_csv(std::ostream &os, const std::vector<RitzPair> &pairs)
{
  CsvScope scope(os);
  os << "re,im,backward_error,iterations_to_tolerance\n";
  for (const RitzPair &p : pairs)
  {
    os << p.lambda.real() << ',' << p.lambda.imag() << ',' << p.backward_error << ','
       << p.iterations_to_tolerance << '\n';
  }
}

void write_history_csv(std::ostream &os, const TiarResult &r)
{
  CsvScope scope(os);
  os << "iteration,target,re,im,backward_error\n";
  for (const HistoryRow &h : r.history)
  {
    os << h.iteration << ',' << h.target << ',' << h.lambda.real() << ',' << h.lambda.imag()
       << ',' << h.backward_error << '\n';
  }
}

void write_result_json(std::ostream &os, const TiarResult &r, int dof_count)
{
  using nlohmann::json;
  json j;
  j["shift"] = {r.shift.real(), r.shift.imag()};
  j["dof_count"] = dof_count;
  j["iterations"] = r.iterations;
  j["breakdown"] = r.breakdown;
  j["diagnostic"] = r.diagnostic;
  json pairs = json::array();
  for (const RitzPair &p : r.pairs)
  {
    pairs.push_back({{"lambda", {p.lambda.real(), p.lambda.imag()}},
                     {"backward_error", p.backward_error},
                     {"converged", p.converged},
                     {"iterations_to_tolerance", p.iterations_to_tolerance}});
  }
  j["pairs"] = pairs;
  json poles = json::array();
  for (const Pole &p : r.cancelled)
  {
    poles.push_back({{"nu", p.nu}, {"z", {p.z.real(), p.z.imag()}}});
  }
  j["cancelled_poles"] = poles;
  json hist = json::array();
  for (const HistoryRow &h : r.history)
  {
    hist.push_back({{"iteration", h.iteration},
                    {"target", h.target},
                    {"lambda", {h.lambda.real(), h.lambda.imag()}},
                    {"backward_error", h.backward_error}});
  }
  j["history"] = hist;
  os << j.dump(2) << '\n';
}

std::vector<cd> reference_values(const config::RunConfig &c)
{
  std::vector<cd> out;
  const std::string g = reference_geometry(c);
  for (int id : c.reference)
  {
    out.push_back(refbench::reference(g, id).lambda);
  }
  return out;
}

std::vector<SweepRow> sweep(const config::RunConfig &c)
{
  config::validate(c);
  if (c.sweep_axis.empty() || c.sweep_values.empty())
  {
    throw ConfigError("sweep needs sweep_axis and sweep_values");
  }
  if (c.reference.empty())
  {
    throw ConfigError("sweep needs at least one reference id");
  }
  const std::vector<cd> refs = reference_values(c);
  std::vector<SweepRow> rows;

  if (c.sweep_axis == "h" || c.sweep_axis == "p")
  {
    for (int v : c.sweep_values)
    {
      config::RunConfig cv = c;
      (c.sweep_axis == "h" ? cv.geometry.levels : cv.geometry.degree) = v;
      config::validate(cv);
      const DtnNep nep = fem::build_problem(cv.geometry);
      rows.push_back(make_row(v, nep.size(), refs, solve(cv, nep).pairs));
    }
    return rows;
  }
  if (c.sweep_axis == "numax")
  {
    config::RunConfig cv = c;
    cv.geometry.nu_max = *std::max_element(c.sweep_values.begin(), c.sweep_values.end());
    config::validate(cv);
    const DtnNep full = fem::build_problem(cv.geometry);
    for (int v : c.sweep_values)
    {
      if (v < 0)
      {
        throw ConfigError("sweep: nu_max values must be non-negative");
      }
      const DtnNep nep = truncate(full, v);
      rows.push_back(make_row(v, nep.size(), refs, solve(c, nep).pairs));
    }
    return rows;
  }
  // iters: one run; the history at step m equals a fresh run with m steps.
  config::RunConfig cv = c;
  cv.iterations = *std::max_element(c.sweep_values.begin(), c.sweep_values.end());
  cv.history_stride = 1;
  cv.track = refs;
  config::validate(cv);
  const DtnNep nep = fem::build_problem(cv.geometry);
  const TiarResult r = solve(cv, nep);
  for (int v : c.sweep_values)
  {
    std::vector<RitzPair> at;
    for (const HistoryRow &h : r.history)
    {
      if (h.iteration == std::min(v, r.iterations))
      {
        RitzPair p;
        p.lambda = h.lambda;
        p.backward_error = h.backward_error;
        at.push_back(p);
      }
    }
    SweepRow row{v, nep.size(), {}, {}, {}};
    for (std::size_t t = 0; t < refs.size(); ++t)
    {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      const bool have = t < at.size();
      row.lambda.push_back(have ? at[t].lambda : cd(nan, nan));
      row.relative_error.push_back(have ? std::abs(at[t].lambda - refs[t]) / std::abs(refs[t])
                                        : nan);
      row.backward_error.push_back(have ? at[t].backward_error : nan);
    }
    rows.push_back(row);
  }
  return rows;
}

void write_sweep_csv(std::ostream &os, const config::RunConfig &c,
                     const std::vector<SweepRow> &rows)
{
  CsvScope scope(os);
  os << c.sweep_axis << ",dof_count";
  for (int id : c.reference)
  {
    os << ",re_" << id << ",im_" << id << ",relative_error_" << id << ",backward_error_" << id;
  }
  os << '\n';
  for (const SweepRow &r : rows)
  {
    os << r.value << ',' << r.dof_count;
    for (std::size_t t = 0; t < r.lambda.size(); ++t)
    {
      os << ',' << r.lambda[t].real() << ',' << r.lambda[t].imag() << ',' << r.relative_error[t]
         << ',' << r.backward_error[t];
    }
    os << '\n';
  }
}

int cmd_solve(const config::RunConfig &c, std::ostream &out, std::ostream &err, bool json,
              bool all_pairs)
{
  config::validate(c);
  const DtnNep nep = fem::build_problem(c.geometry);
  const TiarResult r = solve(c, nep);
  if (!r.diagnostic.empty())
  {
    err << "note: " << r.diagnostic << '\n';
  }
  if (r.breakdown)
  {
    err << "note: Krylov breakdown after " << r.iterations << " iterations\n";
  }
  Sink sink(c.output, out);
  if (json)
  {
    write_result_json(sink.get(), r, nep.size());
  }
  else
  {
    write_pairs_csv(sink.get(), all_pairs ? r.pairs : r.converged());
  }
  if (!c.history_output.empty())
  {
    Sink hist(c.history_output, out);
    write_history_csv(hist.get(), r);
  }
  return kOk;
}

int cmd_sweep(const config::RunConfig &c, std::ostream &out, std::ostream &)
{
  const std::vector<SweepRow> rows = sweep(c);
  Sink sink(c.output, out);
  write_sweep_csv(sink.get(), c, rows);
  return kOk;
}

int cmd_bench(const config::RunConfig *c, std::ostream &out, std::ostream &err)
{
  Sink sink(c ? c->output : std::string(), out);
  std::ostream &os = sink.get();
  CsvScope scope(os);
  os << "table,id,m,ref_re,ref_im,computed_re,computed_im,relative_error,backward_error\n";
  for (const refbench::ReferenceResonance &r : refbench::reference_table("single-disk"))
  {
    const cd z = refbench::newton_resonance(*r.m, *r.seed, 1.0, 2.0);
    os << "single-disk," << r.id << ',' << *r.m << ',' << r.lambda.real() << ','
       << r.lambda.imag() << ',' << z.real() << ',' << z.imag() << ','
       << std::abs(z - r.lambda) / std::abs(r.lambda) << ",\n";
  }
  if (!c)
  {
    return kOk;
  }
  config::validate(*c);
  const DtnNep nep = fem::build_problem(c->geometry);
  const TiarResult res = solve(*c, nep);
  const std::string g = reference_geometry(*c);
  const std::vector<refbench::ReferenceResonance> table = refbench::reference_table(g);
  std::vector<int> ids = c->reference;
  if (ids.empty())
  {
    for (const auto &r : table)
    {
      ids.push_back(r.id);
    }
  }
  for (int id : ids)
  {
    const refbench::ReferenceResonance &r = refbench::reference(g, id);
    const RitzPair *p = nearest(res.pairs, r.lambda);
    os << g << "-computed," << r.id << ',';
    if (r.m)
    {
      os << *r.m;
    }
    os << ',' << r.lambda.real() << ',' << r.lambda.imag() << ',';
    if (p)
    {
      os << p->lambda.real() << ',' << p->lambda.imag() << ','
         << std::abs(p->lambda - r.lambda) / std::abs(r.lambda) << ',' << p->backward_error;
    }
    else
    {
      os << ",,,";
    }
    os << '\n';
  }
  if (!res.diagnostic.empty())
  {
    err << "note: " << res.diagnostic << '\n';
  }
  return kOk;
}

int cmd_eval_hankel(int nu, cd z, int count, std::ostream &out, std::ostream &)
{
  CsvScope scope(out);
  if (count <= 1)
  {
    const cd h = specfun::hankel1(nu, z);
    out << "re,im\n" << h.real() << ',' << h.imag() << '\n';
    return kOk;
  }
  if (nu != 0)
  {
    throw ConfigError("eval-hankel: --count evaluates orders 0..count-1 and needs --nu 0");
  }
  const specfun::HankelVector hv = specfun::hankel_vector(count, z);
  out << "nu,re,im\n";
  for (int n = 0; n < count; ++n)
  {
    out << n << ',' << hv.values[n].real() << ',' << hv.values[n].imag() << '\n';
  }
  return kOk;
}

int cmd_derivtable(const config::RunConfig &c, int k_max, std::ostream &out, std::ostream &)
{
  config::validate(c);
  if (k_max < 0)
  {
    throw ConfigError("derivtable: k_max must be non-negative");
  }
  std::vector<cd> poles;
  if (c.cancel)
  {
    poles = find_poles(c.geometry.a, c.geometry.nu_max,
                       c.pole_region.value_or(default_cancel_region(c.shift)))
                .locations();
  }
  const DerivativeTable t = build_table(c.shift, c.geometry.a, c.geometry.nu_max, k_max, poles);
  Sink sink(c.output, out);
  std::ostream &os = sink.get();
  CsvScope scope(os);
  os << 'j';
  for (int nu = 0; nu <= t.nu_max(); ++nu)
  {
    os << ",re_" << nu << ",im_" << nu;
  }
  os << '\n';
  for (int j = 0; j <= t.k_max(); ++j)
  {
    os << j;
    for (int nu = 0; nu <= t.nu_max(); ++nu)
    {
      os << ',' << t.coeff(j, nu).real() << ',' << t.coeff(j, nu).imag();
    }
    os << '\n';
  }
  return kOk;
}

int cmd_find_poles(const config::RunConfig &c, std::ostream &out, std::ostream &)
{
  config::validate(c);
  const Region region = c.pole_region.value_or(default_cancel_region(c.shift));
  const PoleSet set = find_poles(c.geometry.a, c.geometry.nu_max, region);
  Sink sink(c.output, out);
  std::ostream &os = sink.get();
  CsvScope scope(os);
  os << "nu,re,im,residual\n";
  for (const Pole &p : set.poles)
  {
    os << p.nu << ',' << p.z.real() << ',' << p.z.imag() << ',' << p.residual << '\n';
  }
  return kOk;
}

int cmd_export_matrices(const config::RunConfig &c, std::ostream &out, std::ostream &)
{
  config::validate(c);
  const DtnNep nep = fem::build_problem(c.geometry);
  Sink sink(c.output, out);
  write_bundle(sink.get(), nep);
  return kOk;
}

}  // namespace dtnres::cli
