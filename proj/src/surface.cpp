#include "weylsheet/surface.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "weylsheet/parallel.hpp"

namespace weylsheet {

Vector3d SurfaceExpr::position(double u1, double u2) const {
  const std::array<double, 2> vars{u1, u2};
  return {coords[0].eval<double>(vars), coords[1].eval<double>(vars),
          coords[2].eval<double>(vars)};
}

SurfaceExpr parse_surface(std::string_view text) {
  SurfaceExpr out;
  std::size_t start = 0;
  for (int k = 0; k < 3; ++k) {
    const std::size_t end = text.find(';', start);
    if (k < 2 && end == std::string_view::npos)
      throw ParseError("expected three ';'-separated coordinate expressions", text.size());
    if (k == 2 && end != std::string_view::npos)
      throw ParseError("more than three coordinate expressions", end);
    const std::size_t len = (end == std::string_view::npos ? text.size() : end) - start;
    out.coords[k] = parse_expr(text.substr(start, len), kSurfaceVars, start);
    start = end + 1;
  }
  return out;
}

std::string to_string(const SurfaceExpr& s) {
  return to_string(s.coords[0], kSurfaceVars) + "; " + to_string(s.coords[1], kSurfaceVars) +
         "; " + to_string(s.coords[2], kSurfaceVars);
}

SurfaceJet eval_jet(const SurfaceExpr& s, double u1, double u2, int order) {
  if (order != 1 && order != 2) throw DomainError("jet order must be 1 or 2");
  SurfaceJet jet;
  if (order == 1) {
    const auto t = s.expand<1>(u1, u2);
    for (int c = 0; c < 3; ++c) {
      jet.r[c] = t[c].value();
      jet.r1[c] = t[c].derivative(1, 0);
      jet.r2[c] = t[c].derivative(0, 1);
    }
    return jet;
  }
  const auto t = s.expand<2>(u1, u2);
  for (int c = 0; c < 3; ++c) {
    jet.r[c] = t[c].value();
    jet.r1[c] = t[c].derivative(1, 0);
    jet.r2[c] = t[c].derivative(0, 1);
    jet.r11[c] = t[c].derivative(2, 0);
    jet.r12[c] = t[c].derivative(1, 1);
    jet.r22[c] = t[c].derivative(0, 2);
  }
  return jet;
}

SurfaceJet eval_jet(const SurfaceExpr& s, const Chart& chart, double u1, double u2, int order) {
  if (!chart.contains(u1, u2)) throw DomainError("point outside the chart domain");
  return eval_jet(s, u1, u2, order);
}

MetricJet induced_metric_jet(const SurfaceExpr& s, double u1, double u2, int signature) {
  const auto t = s.expand<3>(u1, u2);
  std::array<std::array<Taylor2<2>, 3>, 2> r;
  for (int a = 0; a < 2; ++a)
    for (int c = 0; c < 3; ++c) r[a][c] = t[c].partial(a);
  MetricJet m;
  for (int a = 0; a < 2; ++a) {
    for (int b = a; b < 2; ++b) {
      Taylor2<2> g = r[a][0] * r[b][0] + r[a][1] * r[b][1] + double(signature) * (r[a][2] * r[b][2]);
      auto put = [&](Matrix2d& dst, double v) {
        dst(a, b) = v;
        dst(b, a) = v;
      };
      put(m.a, g.value());
      put(m.da[0], g.derivative(1, 0));
      put(m.da[1], g.derivative(0, 1));
      put(m.dda[0], g.derivative(2, 0));
      put(m.dda[1], g.derivative(1, 1));
      put(m.dda[2], g.derivative(0, 2));
    }
  }
  return m;
}

// ---------------------------------------------------------------------------

SampledSurface::SampledSurface(Chart chart, std::vector<Vector3d> positions)
    : chart_(std::move(chart)), positions_(std::move(positions)) {
  if (positions_.size() != chart_.size())
    throw DomainError("surface sample count does not match the chart resolution");
  for (const Vector3d& p : positions_)
    if (!p.allFinite()) throw DomainError("surface sample is not finite");
}

SampledSurface SampledSurface::from_expr(const SurfaceExpr& s, const Chart& chart) {
  std::vector<Vector3d> positions(chart.size());
  parallel_for(static_cast<std::size_t>(chart.n1()), [&](std::size_t i) {
    for (int j = 0; j < chart.n2(); ++j)
      positions[chart.index(static_cast<int>(i), j)] =
          s.position(chart.coord(0, static_cast<int>(i)), chart.coord(1, j));
  });
  SampledSurface out(chart, std::move(positions));
  out.source_ = s;
  return out;
}

SurfaceJet SampledSurface::jet(int i, int j) const {
  if (source_) return eval_jet(*source_, chart_.coord(0, i), chart_.coord(1, j), 2);
  return grid_jet(i, j);
}

SurfaceJet SampledSurface::grid_jet(int i, int j) const {
  auto get = [this](int a, int b) -> Vector3d { return positions_[chart_.index(a, b)]; };
  SurfaceJet out;
  out.r = get(i, j);
  out.r1 = fd_first(chart_, 0, i, j, get, 4);
  out.r2 = fd_first(chart_, 1, i, j, get, 4);
  out.r11 = fd_second(chart_, 0, i, j, get, 4);
  out.r12 = fd_mixed(chart_, i, j, get, 4);
  out.r22 = fd_second(chart_, 1, i, j, get, 4);
  return out;
}

MetricField SampledSurface::induced_metric(int signature) const {
  if (source_) {
    return MetricField::from_jet_function(chart_, [&](double u1, double u2) {
      return induced_metric_jet(*source_, u1, u2, signature);
    });
  }
  const Eigen::Vector3d g(1.0, 1.0, double(signature));
  std::vector<Matrix2d> values(chart_.size());
  parallel_for(static_cast<std::size_t>(chart_.n1()), [&](std::size_t ii) {
    const int i = static_cast<int>(ii);
    for (int j = 0; j < chart_.n2(); ++j) {
      const SurfaceJet jt = grid_jet(i, j);
      Matrix2d a;
      a(0, 0) = jt.r1.dot(g.cwiseProduct(jt.r1));
      a(0, 1) = a(1, 0) = jt.r1.dot(g.cwiseProduct(jt.r2));
      a(1, 1) = jt.r2.dot(g.cwiseProduct(jt.r2));
      values[chart_.index(i, j)] = a;
    }
  });
  return MetricField(chart_, std::move(values));
}

double SampledSurface::diameter() const {
  Vector3d lo = positions_.front(), hi = positions_.front();
  for (const Vector3d& p : positions_) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return (hi - lo).norm();
}

// ---------------------------------------------------------------------------

namespace {

std::string shortest(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

double parse_double(std::string_view s, const char* what) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw IoError(std::string("grid file: malformed ") + what + " '" + std::string(s) + "'");
  return v;
}

int parse_int(std::string_view s, const char* what) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw IoError(std::string("grid file: malformed ") + what + " '" + std::string(s) + "'");
  return v;
}

}  // namespace

void write_grid(std::ostream& os, const SampledSurface& s) {
  const Chart& c = s.chart();
  std::string periodic;
  if (c.periodic(0)) periodic = "u1";
  if (c.periodic(1)) periodic += periodic.empty() ? "u2" : ",u2";
  if (periodic.empty()) periodic = "none";
  os << "weylsheet-grid v1 n1=" << c.n1() << " n2=" << c.n2() << " u1=" << shortest(c.min(0))
     << ":" << shortest(c.max(0)) << " u2=" << shortest(c.min(1)) << ":" << shortest(c.max(1))
     << " periodic=" << periodic << "\n";
  for (int i = 0; i < c.n1(); ++i) {
    for (int j = 0; j < c.n2(); ++j) {
      const Vector3d& p = s(i, j);
      os << i << ' ' << j << ' ' << shortest(p.x()) << ' ' << shortest(p.y()) << ' '
         << shortest(p.z()) << '\n';
    }
  }
}

SampledSurface read_grid(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw IoError("grid file: empty file");
  std::istringstream hs(header);
  std::string magic, version;
  hs >> magic >> version;
  if (magic != "weylsheet-grid" || version != "v1")
    throw IoError("grid file: malformed header (expected 'weylsheet-grid v1')");

  std::map<std::string, std::string> fields;
  std::string token;
  while (hs >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) throw IoError("grid file: malformed header token '" + token + "'");
    fields[token.substr(0, eq)] = token.substr(eq + 1);
  }
  for (const char* key : {"n1", "n2", "u1", "u2", "periodic"})
    if (!fields.count(key)) throw IoError(std::string("grid file: header is missing '") + key + "'");

  auto range = [&](const std::string& key, double& lo, double& hi) {
    const std::string& v = fields[key];
    const auto colon = v.find(':');
    if (colon == std::string::npos) throw IoError("grid file: malformed range for " + key);
    lo = parse_double(std::string_view(v).substr(0, colon), "range");
    hi = parse_double(std::string_view(v).substr(colon + 1), "range");
  };
  const int n1 = parse_int(fields["n1"], "n1");
  const int n2 = parse_int(fields["n2"], "n2");
  double a0, a1, b0, b1;
  range("u1", a0, a1);
  range("u2", b0, b1);
  bool p1 = false, p2 = false;
  {
    std::istringstream ps(fields["periodic"]);
    std::string axis;
    while (std::getline(ps, axis, ',')) {
      if (axis == "u1")
        p1 = true;
      else if (axis == "u2")
        p2 = true;
      else if (axis != "none" && !axis.empty())
        throw IoError("grid file: unknown periodic axis '" + axis + "'");
    }
  }
  Chart chart;
  try {
    chart = Chart(a0, a1, b0, b1, n1, n2, p1, p2);
  } catch (const DomainError& e) {
    throw IoError(std::string("grid file: invalid chart in header: ") + e.what());
  }

  std::vector<Vector3d> positions;
  positions.reserve(chart.size());
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    std::string si, sj, sx, sy, sz, extra;
    if (!(ls >> si >> sj >> sx >> sy >> sz) || (ls >> extra))
      throw IoError("grid file: line " + std::to_string(line_no) + " must have 5 columns");
    const std::size_t k = positions.size();
    if (k >= chart.size())
      throw IoError("grid file: shape mismatch, more than " + std::to_string(chart.size()) +
                    " rows for " + std::to_string(n1) + "x" + std::to_string(n2));
    const int i = parse_int(si, "row index");
    const int j = parse_int(sj, "column index");
    if (i != static_cast<int>(k / n2) || j != static_cast<int>(k % n2))
      throw IoError("grid file: line " + std::to_string(line_no) +
                    " is out of row-major order");
    Vector3d p(parse_double(sx, "coordinate"), parse_double(sy, "coordinate"),
               parse_double(sz, "coordinate"));
    if (!p.allFinite())
      throw IoError("grid file: non-finite entry on line " + std::to_string(line_no));
    positions.push_back(p);
  }
  if (positions.size() != chart.size())
    throw IoError("grid file: shape mismatch, header declares " + std::to_string(n1) + "x" +
                  std::to_string(n2) + " = " + std::to_string(chart.size()) + " rows, found " +
                  std::to_string(positions.size()));
  return SampledSurface(chart, std::move(positions));
}

void save_grid(const std::filesystem::path& path, const SampledSurface& s) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write grid file: " + path.string());
  write_grid(os, s);
  if (!os) throw IoError("failed writing grid file: " + path.string());
}

SampledSurface load_grid(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("grid file not found or unreadable: " + path.string());
  return read_grid(is);
}

// ---------------------------------------------------------------------------

double CatalogParams::get(const std::string& key, double fallback) const {
  const auto it = values.find(key);
  return it == values.end() ? fallback : it->second;
}

std::vector<std::string> catalog_names() {
  return {"plane", "cylinder", "sphere", "torus", "helicoid", "catenoid", "saddle", "graph"};
}

CatalogSurface catalog(const std::string& name, const CatalogParams& params, int n) {
  using std::numbers::pi;
  const Expr u1 = Expr::variable(0);
  const Expr u2 = Expr::variable(1);
  auto positive = [&](const std::string& key, double fallback) {
    const double v = params.get(key, fallback);
    if (!(v > 0.0) || !std::isfinite(v))
      throw DomainError("catalog '" + name + "': parameter " + key + " must be positive");
    return v;
  };
  // Multiplying by exactly 1 would only add nodes.
  auto scaled = [](double c, const Expr& e) { return c == 1.0 ? e : Expr::constant(c) * e; };

  CatalogSurface out;
  out.name = name;
  if (name == "plane") {
    out.expr = {{u1, u2, Expr::constant(0.0)}};
    out.chart = Chart(0, 1, 0, 1, n, n);
    out.orientation = "n = +e_z";
  } else if (name == "cylinder") {
    const double rho = positive("rho", 1.0);
    out.expr = {{scaled(rho, cos(u1)), scaled(rho, -sin(u1)), u2}};
    out.chart = Chart(0, 2 * pi, -1, 1, n, n, true, false);
    out.orientation = "n points to the axis (H > 0)";
  } else if (name == "sphere") {
    const double R = positive("R", 1.0);
    out.expr = {{scaled(R, sin(u1) * cos(u2)), scaled(R, -(sin(u1) * sin(u2))), scaled(R, cos(u1))}};
    out.chart = Chart(pi / 8, 7 * pi / 8, 0, 2 * pi, n, n, false, true);
    out.orientation = "n points to the centre (H > 0); u1 polar angle, u2 azimuth";
  } else if (name == "torus") {
    const double R = positive("R", 3.0);
    const double r = positive("r", 1.0);
    if (r >= R) throw DomainError("catalog 'torus': minor radius must be smaller than major radius");
    const Expr ring = Expr::constant(R) + scaled(r, cos(u2));
    out.expr = {{ring * cos(u1), -(ring * sin(u1)), scaled(r, sin(u2))}};
    out.chart = Chart(0, 2 * pi, 0, 2 * pi, n, n, true, true);
    out.orientation = "n points to the tube centre line";
  } else if (name == "helicoid") {
    const double c = positive("c", 1.0);
    out.expr = {{u2 * cos(u1), u2 * sin(u1), scaled(c, u1)}};
    out.chart = Chart(-pi, pi, -1, 1, n, n);
    out.orientation = "n = r1 x r2";
  } else if (name == "catenoid") {
    const double c = positive("c", 1.0);
    out.expr = {{scaled(c, cosh(u2) * cos(u1)), scaled(c, cosh(u2) * sin(u1)), scaled(c, u2)}};
    out.chart = Chart(0, 2 * pi, -1, 1, n, n, true, false);
    out.orientation = "n = r1 x r2";
  } else if (name == "saddle") {
    const double a = params.get("a", 1.0);
    if (!std::isfinite(a) || a == 0.0) throw DomainError("catalog 'saddle': a must be nonzero");
    out.expr = {{u1, u2, scaled(a, u1 * u2)}};
    out.chart = Chart(-1, 1, -1, 1, n, n);
    out.orientation = "n has positive z component";
  } else if (name == "graph") {
    const std::string f =
        params.expression.empty() ? std::string("exp(-(u1^2 + u2^2))") : params.expression;
    out.expr = {{u1, u2, parse_expr(f, kSurfaceVars)}};
    out.chart = Chart(-1, 1, -1, 1, n, n);
    out.orientation = "n has positive z component";
  } else {
    throw DomainError("unknown catalog surface '" + name + "'");
  }
  return out;
}

}  // namespace weylsheet
