// Copyright dtnres contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "dtnres/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <locale>
#include <sstream>

#include "dtnres/errors.hpp"

namespace dtnres::config
{

namespace
{

std::string trim(const std::string &s)
{
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos)
  {
    return "";
  }
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

class ValueReader
{
public:
  ValueReader(const std::string &key, const std::string &value, int line)
    : key_(key), line_(line), is_(value)
  {
    is_.imbue(std::locale::classic());
  }

  template <class T> T next()
  {
    T v{};
    if (!(is_ >> v))
    {
      fail("expected a number");
    }
    return v;
  }

  cd complex()
  {
    const double re = next<double>();
    const double im = next<double>();
    return {re, im};
  }

  template <class T> std::vector<T> list()
  {
    std::vector<T> out;
    T v{};
    while (is_ >> v)
    {
      out.push_back(v);
    }
    if (!is_.eof())
    {
      fail("expected a list of numbers");
    }
    return out;
  }

  void done()
  {
    std::string rest;
    if (is_ >> rest)
    {
      fail("unexpected trailing text '" + rest + "'");
    }
  }

  [[noreturn]] void fail(const std::string &what) const
  {
    throw ConfigError("config line " + std::to_string(line_) + " (" + key_ + "): " + what);
  }

private:
  std::string key_;
  int line_;
  std::istringstream is_;
};

fem::GeometryConfig::Kind parse_kind(const std::string &name, const ValueReader &r)
{
  using K = fem::GeometryConfig::Kind;
  if (name == "single-disk")
  {
    return K::SingleDisk;
  }
  if (name == "dimer")
  {
    return K::Dimer;
  }
  if (name == "empty")
  {
    return K::Empty;
  }
  if (name == "custom")
  {
    return K::Custom;
  }
  r.fail("unknown geometry '" + name + "' (single-disk, dimer, empty, custom)");
}

bool parse_bool(const std::string &v, const ValueReader &r)
{
  if (v == "true" || v == "1" || v == "yes" || v == "on")
  {
    return true;
  }
  if (v == "false" || v == "0" || v == "no" || v == "off")
  {
    return false;
  }
  r.fail("expected true or false");
}

void apply(RunConfig &c, const std::string &key, const std::string &value, int line,
           const std::string &base_dir);

void read_into(RunConfig &c, std::istream &is, const std::string &base_dir, bool geometry_only)
{
  std::string raw;
  int line = 0;
  while (std::getline(is, raw))
  {
    ++line;
    const std::string s = trim(raw.substr(0, raw.find('#')));
    if (s.empty())
    {
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos)
    {
      throw ConfigError("config line " + std::to_string(line) + ": expected key = value");
    }
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    static const char *geometry_keys[] = {"geometry", "R", "d", "s", "eta", "a", "degree", "p",
                                          "levels", "nu_max", "ring_layers", "region"};
    if (geometry_only)
    {
      bool ok = false;
      for (const char *g : geometry_keys)
      {
        ok = ok || key == g;
      }
      if (!ok)
      {
        throw ConfigError("geometry file line " + std::to_string(line) + ": key '" + key +
                          "' is not a geometry key");
      }
    }
    apply(c, key, value, line, base_dir);
  }
}

void apply(RunConfig &c, const std::string &key, const std::string &value, int line,
           const std::string &base_dir)
{
  ValueReader r(key, value, line);
  fem::GeometryConfig &g = c.geometry;
  if (key == "geometry")
  {
    g.kind = parse_kind(value, r);
    return;
  }
  if (key == "geometry_file")
  {
    std::filesystem::path p(value);
    if (p.is_relative() && !base_dir.empty())
    {
      p = std::filesystem::path(base_dir) / p;
    }
    std::ifstream f(p);
    if (!f)
    {
      r.fail("cannot open '" + p.string() + "'");
    }
    read_into(c, f, p.parent_path().string(), true);
    c.geometry_file = value;
    return;
  }
  if (key == "cancel")
  {
    c.cancel = parse_bool(value, r);
    return;
  }
  if (key == "output")
  {
    c.output = value;
    return;
  }
  if (key == "history_output")
  {
    c.history_output = value;
    return;
  }
  if (key == "reference_geometry")
  {
    c.reference_geometry = value;
    return;
  }
  if (key == "sweep_axis")
  {
    c.sweep_axis = value;
    return;
  }

  if (key == "R")
  {
    g.R = r.next<double>();
  }
  else if (key == "d")
  {
    g.d = r.next<double>();
  }
  else if (key == "s")
  {
    g.s = r.next<double>();
  }
  else if (key == "eta")
  {
    g.eta = r.next<double>();
  }
  else if (key == "a")
  {
    g.a = r.next<double>();
  }
  else if (key == "degree" || key == "p")
  {
    g.degree = r.next<int>();
  }
  else if (key == "levels")
  {
    g.levels = r.next<int>();
  }
  else if (key == "nu_max")
  {
    g.nu_max = r.next<int>();
  }
  else if (key == "ring_layers")
  {
    g.ring_layers = r.next<int>();
  }
  else if (key == "region")
  {
    fem::DiskRegion d;
    d.center.x() = r.next<double>();
    d.center.y() = r.next<double>();
    d.radius = r.next<double>();
    d.eta = r.next<double>();
    g.regions.push_back(d);
  }
  else if (key == "shift")
  {
    c.shift = r.complex();
  }
  else if (key == "iterations")
  {
    c.iterations = r.next<int>();
  }
  else if (key == "tolerance")
  {
    c.tolerance = r.next<double>();
  }
  else if (key == "pole_region")
  {
    Region reg{};
    reg.re_min = r.next<double>();
    reg.re_max = r.next<double>();
    reg.im_min = r.next<double>();
    reg.im_max = r.next<double>();
    c.pole_region = reg;
  }
  else if (key == "seed")
  {
    c.seed = r.next<std::uint64_t>();
  }
  else if (key == "history_stride")
  {
    c.history_stride = r.next<int>();
  }
  else if (key == "track")
  {
    c.track.push_back(r.complex());
  }
  else if (key == "reference")
  {
    c.reference = r.list<int>();
    return;
  }
  else if (key == "sweep_values")
  {
    c.sweep_values = r.list<int>();
    return;
  }
  else
  {
    r.fail("unknown key");
  }
  r.done();
}

bool same_region(const std::optional<Region> &x, const std::optional<Region> &y)
{
  if (x.has_value() != y.has_value())
  {
    return false;
  }
  return !x || (x->re_min == y->re_min && x->re_max == y->re_max && x->im_min == y->im_min &&
                x->im_max == y->im_max);
}

bool same_geometry(const fem::GeometryConfig &x, const fem::GeometryConfig &y)
{
  if (x.regions.size() != y.regions.size())
  {
    return false;
  }
  for (std::size_t i = 0; i < x.regions.size(); ++i)
  {
    const fem::DiskRegion &u = x.regions[i], &v = y.regions[i];
    if (u.center != v.center || u.radius != v.radius || u.eta != v.eta)
    {
      return false;
    }
  }
  return x.kind == y.kind && x.R == y.R && x.d == y.d && x.s == y.s && x.eta == y.eta &&
         x.a == y.a && x.degree == y.degree && x.levels == y.levels && x.nu_max == y.nu_max &&
         x.ring_layers == y.ring_layers;
}

}  // namespace

const char *geometry_name(fem::GeometryConfig::Kind kind)
{
  switch (kind)
  {
  case fem::GeometryConfig::Kind::SingleDisk:
    return "single-disk";
  case fem::GeometryConfig::Kind::Dimer:
    return "dimer";
  case fem::GeometryConfig::Kind::Empty:
    return "empty";
  case fem::GeometryConfig::Kind::Custom:
    return "custom";
  }
  return "?";
}

bool RunConfig::operator==(const RunConfig &o) const
{
  return same_geometry(geometry, o.geometry) && shift == o.shift &&
         iterations == o.iterations && tolerance == o.tolerance && cancel == o.cancel &&
         same_region(pole_region, o.pole_region) && seed == o.seed && output == o.output &&
         history_output == o.history_output && history_stride == o.history_stride &&
         track == o.track && reference_geometry == o.reference_geometry &&
         reference == o.reference && sweep_axis == o.sweep_axis &&
         sweep_values == o.sweep_values;
}

RunConfig parse(std::istream &is, const std::string &base_dir)
{
  RunConfig c;
  read_into(c, is, base_dir, false);
  return c;
}

RunConfig parse_string(const std::string &text)
{
  std::istringstream is(text);
  return parse(is);
}

RunConfig load(const std::string &path)
{
  std::ifstream f(path);
  if (!f)
  {
    throw ConfigError("cannot open config file '" + path + "'");
  }
  return parse(f, std::filesystem::path(path).parent_path().string());
}

std::string print(const RunConfig &c)
{
  // geometry_file is not emitted: its keys are written inline.
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(17);
  const fem::GeometryConfig &g = c.geometry;
  os << "geometry = " << geometry_name(g.kind) << '\n';
  os << "R = " << g.R << '\n' << "d = " << g.d << '\n' << "s = " << g.s << '\n';
  os << "eta = " << g.eta << '\n' << "a = " << g.a << '\n';
  os << "degree = " << g.degree << '\n' << "levels = " << g.levels << '\n';
  os << "nu_max = " << g.nu_max << '\n' << "ring_layers = " << g.ring_layers << '\n';
  for (const fem::DiskRegion &d : g.regions)
  {
    os << "region = " << d.center.x() << ' ' << d.center.y() << ' ' << d.radius << ' ' << d.eta
       << '\n';
  }
  os << "shift = " << c.shift.real() << ' ' << c.shift.imag() << '\n';
  os << "iterations = " << c.iterations << '\n' << "tolerance = " << c.tolerance << '\n';
  os << "cancel = " << (c.cancel ? "true" : "false") << '\n';
  if (c.pole_region)
  {
    const Region &r = *c.pole_region;
    os << "pole_region = " << r.re_min << ' ' << r.re_max << ' ' << r.im_min << ' ' << r.im_max
       << '\n';
  }
  os << "seed = " << c.seed << '\n';
  if (!c.output.empty())
  {
    os << "output = " << c.output << '\n';
  }
  if (!c.history_output.empty())
  {
    os << "history_output = " << c.history_output << '\n';
  }
  os << "history_stride = " << c.history_stride << '\n';
  for (cd t : c.track)
  {
    os << "track = " << t.real() << ' ' << t.imag() << '\n';
  }
  if (!c.reference_geometry.empty())
  {
    os << "reference_geometry = " << c.reference_geometry << '\n';
  }
  if (!c.reference.empty())
  {
    os << "reference =";
    for (int id : c.reference)
    {
      os << ' ' << id;
    }
    os << '\n';
  }
  if (!c.sweep_axis.empty())
  {
    os << "sweep_axis = " << c.sweep_axis << '\n';
  }
  if (!c.sweep_values.empty())
  {
    os << "sweep_values =";
    for (int v : c.sweep_values)
    {
      os << ' ' << v;
    }
    os << '\n';
  }
  return os.str();
}

void validate(const RunConfig &c)
{
  const fem::GeometryConfig &g = c.geometry;
  auto require = [](bool ok, const std::string &what) {
    if (!ok)
    {
      throw ConfigError("invalid config: " + what);
    }
  };
  require(g.R > 0.0 && std::isfinite(g.R), "R must be positive");
  require(g.eta > 0.0 && std::isfinite(g.eta), "eta must be positive");
  require(g.a > 0.0 && std::isfinite(g.a), "a must be positive");
  require(g.s >= 0.0 && std::isfinite(g.s), "s must be non-negative");
  require(std::isfinite(g.d), "d must be finite");
  require(g.degree >= 1 && g.degree <= 20, "degree must be in 1..20");
  require(g.levels >= 0 && g.levels <= 6, "levels must be in 0..6");
  require(g.nu_max >= 0 && g.nu_max <= 200, "nu_max must be in 0..200");
  require(g.ring_layers >= 1 && g.ring_layers <= 8, "ring_layers must be in 1..8");
  for (const fem::DiskRegion &d : g.regions)
  {
    require(d.radius > 0.0 && d.eta > 0.0, "region radius and eta must be positive");
  }
  require(g.kind != fem::GeometryConfig::Kind::Custom || !g.regions.empty(),
          "custom geometry needs at least one region");
  require(c.shift.real() > 0.0 && std::isfinite(c.shift.imag()),
          "shift must have positive real part");
  require(c.iterations >= 1 && c.iterations <= 150, "iterations must be in 1..150");
  require(c.tolerance > 0.0 && c.tolerance < 1.0, "tolerance must be in (0, 1)");
  if (c.pole_region)
  {
    const Region &r = *c.pole_region;
    require(r.re_min > 0.0 && r.re_min < r.re_max && r.im_min < r.im_max,
            "pole_region must be re_min re_max im_min im_max with 0 < re_min < re_max and "
            "im_min < im_max");
  }
  require(c.history_stride >= 0, "history_stride must be non-negative");
  require(c.reference_geometry.empty() || c.reference_geometry == "single-disk" ||
              c.reference_geometry == "dimer",
          "reference_geometry must be single-disk or dimer");
  for (int id : c.reference)
  {
    require(id >= 1, "reference ids start at 1");
  }
  require(c.sweep_axis.empty() || c.sweep_axis == "h" || c.sweep_axis == "p" ||
              c.sweep_axis == "numax" || c.sweep_axis == "iters",
          "sweep_axis must be h, p, numax or iters");
}

}  // namespace dtnres::config
