#include "raysplit/scenario.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "raysplit/errors.hpp"

namespace raysplit {

// ---------------------------------------------------------------------------
// Expression evaluator
// ---------------------------------------------------------------------------

struct Expr::Node {
  enum class Op { Const, Var, Add, Sub, Mul, Div, Pow, Neg, Fun1, Fun2 };
  Op op = Op::Const;
  double value = 0.0;
  double (*f1)(double) = nullptr;
  double (*f2)(double, double) = nullptr;
  std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

NodePtr make_const(double v) {
  auto n = std::make_shared<Expr::Node>();
  n->value = v;
  return n;
}

NodePtr make_node(Expr::Node::Op op, NodePtr a, NodePtr b = nullptr) {
  auto n = std::make_shared<Expr::Node>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

class ExprParser {
 public:
  explicit ExprParser(const std::string& s) : s_(s) {}

  NodePtr run() {
    NodePtr e = parse_sum();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected trailing characters");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) {
    throw ScenarioError("expression `" + s_ + "`: " + msg + " at position " +
                        std::to_string(pos_));
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  NodePtr parse_sum() {
    NodePtr e = parse_product();
    for (;;) {
      if (eat('+'))
        e = make_node(Expr::Node::Op::Add, e, parse_product());
      else if (eat('-'))
        e = make_node(Expr::Node::Op::Sub, e, parse_product());
      else
        return e;
    }
  }

  NodePtr parse_product() {
    NodePtr e = parse_power();
    for (;;) {
      if (eat('*'))
        e = make_node(Expr::Node::Op::Mul, e, parse_power());
      else if (eat('/'))
        e = make_node(Expr::Node::Op::Div, e, parse_power());
      else
        return e;
    }
  }

  NodePtr parse_power() {
    NodePtr base = parse_unary();
    if (eat('^')) return make_node(Expr::Node::Op::Pow, base, parse_power());
    return base;
  }

  NodePtr parse_unary() {
    if (eat('-')) return make_node(Expr::Node::Op::Neg, parse_unary());
    if (eat('+')) return parse_unary();
    return parse_primary();
  }

  NodePtr parse_primary() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
    if (eat('(')) {
      NodePtr e = parse_sum();
      if (!eat(')')) fail("missing `)`");
      return e;
    }
    fail("unexpected character");
  }

  NodePtr parse_number() {
    const char* begin = s_.c_str() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) fail("bad number");
    pos_ += static_cast<std::size_t>(end - begin);
    return make_const(v);
  }

  NodePtr parse_ident() {
    std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    const std::string name = s_.substr(start, pos_ - start);

    if (name == "pi") return make_const(3.14159265358979323846);
    if (name == "e") return make_const(2.71828182845904523536);
    if (name == "deg") return make_const(3.14159265358979323846 / 180.0);
    if (name == "t") {
      auto n = std::make_shared<Expr::Node>();
      n->op = Expr::Node::Op::Var;
      return n;
    }

    static const std::map<std::string, double (*)(double)> kFun1 = {
        {"sqrt", std::sqrt}, {"sin", std::sin},   {"cos", std::cos},
        {"tan", std::tan},   {"asin", std::asin}, {"acos", std::acos},
        {"atan", std::atan}, {"exp", std::exp},   {"log", std::log},
        {"abs", std::fabs}};
    static const std::map<std::string, double (*)(double, double)> kFun2 = {
        {"atan2", std::atan2}, {"min", std::fmin}, {"max", std::fmax},
        {"pow", std::pow}};

    if (auto it1 = kFun1.find(name); it1 != kFun1.end()) {
      if (!eat('(')) fail("`" + name + "` needs an argument list");
      NodePtr arg = parse_sum();
      if (!eat(')')) fail("missing `)`");
      auto n = make_node(Expr::Node::Op::Fun1, arg);
      const_cast<Expr::Node*>(n.get())->f1 = it1->second;
      return n;
    }
    if (auto it2 = kFun2.find(name); it2 != kFun2.end()) {
      if (!eat('(')) fail("`" + name + "` needs an argument list");
      NodePtr x = parse_sum();
      if (!eat(',')) fail("`" + name + "` needs two arguments");
      NodePtr y = parse_sum();
      if (!eat(')')) fail("missing `)`");
      auto n = make_node(Expr::Node::Op::Fun2, x, y);
      const_cast<Expr::Node*>(n.get())->f2 = it2->second;
      return n;
    }
    fail("unknown identifier `" + name + "`");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

double eval_node(const Expr::Node& n, double t) {
  using Op = Expr::Node::Op;
  switch (n.op) {
    case Op::Const: return n.value;
    case Op::Var: return t;
    case Op::Add: return eval_node(*n.a, t) + eval_node(*n.b, t);
    case Op::Sub: return eval_node(*n.a, t) - eval_node(*n.b, t);
    case Op::Mul: return eval_node(*n.a, t) * eval_node(*n.b, t);
    case Op::Div: return eval_node(*n.a, t) / eval_node(*n.b, t);
    case Op::Pow: return std::pow(eval_node(*n.a, t), eval_node(*n.b, t));
    case Op::Neg: return -eval_node(*n.a, t);
    case Op::Fun1: return n.f1(eval_node(*n.a, t));
    case Op::Fun2: return n.f2(eval_node(*n.a, t), eval_node(*n.b, t));
  }
  return 0.0;
}

bool node_uses_var(const Expr::Node& n) {
  if (n.op == Expr::Node::Op::Var) return true;
  if (n.a && node_uses_var(*n.a)) return true;
  if (n.b && node_uses_var(*n.b)) return true;
  return false;
}

}  // namespace

Expr Expr::parse(const std::string& src) {
  Expr e;
  e.src_ = src;
  e.root_ = ExprParser(src).run();
  return e;
}

double Expr::operator()(double t) const {
  if (!root_) throw ScenarioError("evaluating an empty expression");
  return eval_node(*root_, t);
}

bool Expr::uses_variable() const { return root_ && node_uses_var(*root_); }

double eval_expression(const std::string& src) {
  Expr e = Expr::parse(src);
  if (e.uses_variable())
    throw ScenarioError("expression `" + src + "` must be constant (no `t`)");
  return e();
}

// ---------------------------------------------------------------------------
// Curve spec
// ---------------------------------------------------------------------------

BoundaryCurve CurveSpec::build() const {
  switch (kind) {
    case CurveKind::Circle:
      return BoundaryCurve::circle(center, radius);
    case CurveKind::Ellipse:
      return BoundaryCurve::ellipse(center, a, b, axis_angle);
    case CurveKind::Radial: {
      Expr r = Expr::parse(radius_expr);
      return BoundaryCurve::radial(
          center, [r](double t) { return r(t); }, nullptr, nullptr, samples);
    }
  }
  throw ScenarioError("unknown curve kind");
}

// ---------------------------------------------------------------------------
// Scenario
// ---------------------------------------------------------------------------

double Scenario::critical() const {
  if (!(c2 > c1)) throw ScenarioError("critical angle undefined: c2 <= c1");
  return std::asin(c1 / c2);
}

BoundaryArc Scenario::observation_arc() const {
  switch (observation.mode) {
    case ObservationSpec::Mode::Full:
      return BoundaryArc::full_arc();
    case ObservationSpec::Mode::Arc: {
      if (observation.units == ObservationSpec::Units::Param)
        return BoundaryArc::between(observation.lo, observation.hi);
      return BoundaryArc::between(outer.param_from_angle(observation.lo),
                                  outer.param_from_angle(observation.hi));
    }
    case ObservationSpec::Mode::Point:
      throw ScenarioError(
          "point-source observation must be resolved through the lit-region "
          "construction, not observation_arc()");
  }
  return BoundaryArc::empty_arc();
}

double Scenario::glide_spacing_on(const BoundaryCurve& curve) const {
  return sampling.glide_spacing > 0.0 ? sampling.glide_spacing
                                      : curve.perimeter() / 256.0;
}

void Scenario::finalize() {
  auto need = [](bool ok, const char* what) {
    if (!ok) throw ScenarioError(std::string("invalid scenario: ") + what);
  };
  need(c1 > 0.0 && c2 > 0.0, "speeds must be positive");
  if (!allow_slow_inclusion)
    need(c2 > c1, "c2 must exceed c1 (set allow_slow_inclusion to explore anyway)");
  need(caps.horizon >= 0.0, "horizon must be nonnegative");
  need(caps.depth_cap >= 0, "depth cap must be nonnegative");
  need(caps.max_events > 0, "event budget must be positive");
  need(caps.max_iter > 0, "iteration budget must be positive");
  need(tol.geom > 0 && tol.tangency > 0 && tol.angle > 0 && tol.arc > 0 &&
           tol.witness > 0 && tol.mono > 0 && tol.orbit > 0,
       "tolerances must be positive");
  need(sampling.grid_s > 0 && sampling.grid_theta > 0, "grids must be positive");
  need(sampling.glide_spacing >= 0.0, "glide spacing must be nonnegative");

  outer = outer_spec.build();
  inner.reset();
  if (inner_spec) {
    inner = inner_spec->build();
    // Strict inclusion with positive clearance, checked on a dense sample.
    constexpr int kProbe = 512;
    double min_clear = 1e300;
    for (int i = 0; i < kProbe; ++i) {
      const Vec2 q = inner->point_at(static_cast<double>(i) / kProbe);
      if (!outer.contains(q))
        throw ScenarioError("invalid scenario: inner curve not inside the outer curve");
      const double d = distance(q, outer.point_at(outer.nearest_param(q)));
      min_clear = std::min(min_clear, d);
    }
    if (!(min_clear > 0.0))
      throw ScenarioError("invalid scenario: curves touch (zero clearance)");
  }

  if (observation.mode == ObservationSpec::Mode::Point)
    need(!outer.contains(observation.x0),
         "observation point must lie strictly outside the outer curve");
  if (observation.mode == ObservationSpec::Mode::Arc)
    need(std::abs(observation.hi - observation.lo) > 0.0, "observation arc is empty");
}

// ---------------------------------------------------------------------------
// Config text
// ---------------------------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

bool parse_bool(const std::string& v, int line) {
  if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
  if (v == "false" || v == "no" || v == "0" || v == "off") return false;
  throw ParseError("expected a boolean, got `" + v + "`", line);
}

Vec2 parse_point(const std::string& v, int line) {
  std::string s = trim(v);
  if (s.size() < 2 || s.front() != '(' || s.back() != ')')
    throw ParseError("expected a point `(x, y)`, got `" + v + "`", line);
  s = s.substr(1, s.size() - 2);
  int depth = 0;
  std::size_t comma = std::string::npos;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '(') ++depth;
    if (s[i] == ')') --depth;
    if (s[i] == ',' && depth == 0) {
      comma = i;
      break;
    }
  }
  if (comma == std::string::npos)
    throw ParseError("expected a point `(x, y)`, got `" + v + "`", line);
  return {eval_expression(s.substr(0, comma)), eval_expression(s.substr(comma + 1))};
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct SectionCtx {
  std::string name;
  bool inner_none = false;
};

void apply_curve_key(CurveSpec& c, const std::string& key, const std::string& value,
                     int line) {
  if (key == "kind") {
    if (value == "circle")
      c.kind = CurveKind::Circle;
    else if (value == "ellipse")
      c.kind = CurveKind::Ellipse;
    else if (value == "radial")
      c.kind = CurveKind::Radial;
    else
      throw ParseError("unknown curve kind `" + value + "`", line);
  } else if (key == "center") {
    c.center = parse_point(value, line);
  } else if (key == "radius") {
    c.radius = eval_expression(value);
  } else if (key == "a") {
    c.a = eval_expression(value);
  } else if (key == "b") {
    c.b = eval_expression(value);
  } else if (key == "angle") {
    c.axis_angle = eval_expression(value);
  } else if (key == "r") {
    Expr::parse(value);  // syntax check now, build later
    c.radius_expr = value;
  } else if (key == "samples") {
    c.samples = static_cast<int>(std::lround(eval_expression(value)));
  } else {
    throw ParseError("unknown curve key `" + key + "`", line);
  }
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  Scenario sc;
  bool saw_outer = false;
  SectionCtx sect;

  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    if (auto h = s.find_first_of("#;"); h != std::string::npos) s = s.substr(0, h);
    s = trim(s);
    if (s.empty()) continue;

    if (s.front() == '[') {
      if (s.back() != ']') throw ParseError("unterminated section header", line);
      sect.name = trim(s.substr(1, s.size() - 2));
      if (sect.name == "outer") saw_outer = true;
      static const char* kKnown[] = {"outer",        "inner", "speeds",  "observation",
                                     "caps",         "tolerances", "sampling"};
      bool ok = false;
      for (const char* k : kKnown) ok = ok || sect.name == k;
      if (!ok) throw ParseError("unknown section `" + sect.name + "`", line);
      continue;
    }

    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ParseError("expected `key = value`", line);
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty() || value.empty()) throw ParseError("expected `key = value`", line);
    if (sect.name.empty()) throw ParseError("key outside any [section]", line);

    try {
      if (sect.name == "outer") {
        apply_curve_key(sc.outer_spec, key, value, line);
      } else if (sect.name == "inner") {
        if (key == "kind" && value == "none") {
          sect.inner_none = true;
        } else {
          if (sect.inner_none)
            throw ParseError("inner section declared `kind = none`", line);
          if (!sc.inner_spec) sc.inner_spec.emplace();
          apply_curve_key(*sc.inner_spec, key, value, line);
        }
      } else if (sect.name == "speeds") {
        if (key == "c1")
          sc.c1 = eval_expression(value);
        else if (key == "c2")
          sc.c2 = eval_expression(value);
        else if (key == "allow_slow_inclusion")
          sc.allow_slow_inclusion = parse_bool(value, line);
        else
          throw ParseError("unknown speeds key `" + key + "`", line);
      } else if (sect.name == "observation") {
        if (key == "mode") {
          if (value == "full")
            sc.observation.mode = ObservationSpec::Mode::Full;
          else if (value == "point")
            sc.observation.mode = ObservationSpec::Mode::Point;
          else if (value == "arc")
            sc.observation.mode = ObservationSpec::Mode::Arc;
          else
            throw ParseError("unknown observation mode `" + value + "`", line);
        } else if (key == "x0") {
          sc.observation.x0 = parse_point(value, line);
        } else if (key == "lo") {
          sc.observation.lo = eval_expression(value);
        } else if (key == "hi") {
          sc.observation.hi = eval_expression(value);
        } else if (key == "units") {
          if (value == "angle")
            sc.observation.units = ObservationSpec::Units::Angle;
          else if (value == "param")
            sc.observation.units = ObservationSpec::Units::Param;
          else
            throw ParseError("unknown units `" + value + "`", line);
        } else {
          throw ParseError("unknown observation key `" + key + "`", line);
        }
      } else if (sect.name == "caps") {
        if (key == "horizon")
          sc.caps.horizon = eval_expression(value);
        else if (key == "depth")
          sc.caps.depth_cap = static_cast<int>(std::lround(eval_expression(value)));
        else if (key == "max_events")
          sc.caps.max_events = std::lround(eval_expression(value));
        else if (key == "max_iter")
          sc.caps.max_iter = static_cast<int>(std::lround(eval_expression(value)));
        else
          throw ParseError("unknown caps key `" + key + "`", line);
      } else if (sect.name == "tolerances") {
        double* slot = key == "geom"       ? &sc.tol.geom
                       : key == "tangency" ? &sc.tol.tangency
                       : key == "angle"    ? &sc.tol.angle
                       : key == "arc"      ? &sc.tol.arc
                       : key == "witness"  ? &sc.tol.witness
                       : key == "mono"     ? &sc.tol.mono
                       : key == "orbit"    ? &sc.tol.orbit
                                           : nullptr;
        if (!slot) throw ParseError("unknown tolerance `" + key + "`", line);
        *slot = eval_expression(value);
      } else if (sect.name == "sampling") {
        if (key == "grid_s")
          sc.sampling.grid_s = static_cast<int>(std::lround(eval_expression(value)));
        else if (key == "grid_theta")
          sc.sampling.grid_theta =
              static_cast<int>(std::lround(eval_expression(value)));
        else if (key == "seed")
          sc.sampling.seed =
              static_cast<unsigned long>(std::llround(eval_expression(value)));
        else if (key == "glide_spacing")
          sc.sampling.glide_spacing = eval_expression(value);
        else
          throw ParseError("unknown sampling key `" + key + "`", line);
      }
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& ex) {
      throw ParseError(ex.what(), line);
    }
  }

  if (!saw_outer) throw ParseError("missing [outer] section", line);
  sc.finalize();
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ScenarioError("cannot open scenario file `" + path + "`");
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_scenario(buf.str());
}

namespace {

void print_curve(std::ostringstream& out, const char* section, const CurveSpec& c) {
  out << "[" << section << "]\n";
  switch (c.kind) {
    case CurveKind::Circle:
      out << "kind = circle\n";
      out << "center = (" << fmt(c.center.x) << ", " << fmt(c.center.y) << ")\n";
      out << "radius = " << fmt(c.radius) << "\n";
      break;
    case CurveKind::Ellipse:
      out << "kind = ellipse\n";
      out << "center = (" << fmt(c.center.x) << ", " << fmt(c.center.y) << ")\n";
      out << "a = " << fmt(c.a) << "\n";
      out << "b = " << fmt(c.b) << "\n";
      out << "angle = " << fmt(c.axis_angle) << "\n";
      break;
    case CurveKind::Radial:
      out << "kind = radial\n";
      out << "center = (" << fmt(c.center.x) << ", " << fmt(c.center.y) << ")\n";
      out << "r = " << c.radius_expr << "\n";
      out << "samples = " << c.samples << "\n";
      break;
  }
}

}  // namespace

std::string print_scenario(const Scenario& s) {
  std::ostringstream out;
  print_curve(out, "outer", s.outer_spec);
  out << "\n[inner]\n";
  if (!s.inner_spec) {
    out << "kind = none\n";
  } else {
    std::ostringstream tmp;
    print_curve(tmp, "inner", *s.inner_spec);
    const std::string block = tmp.str();
    out << block.substr(block.find('\n') + 1);  // drop the duplicate header
  }
  out << "\n[speeds]\n";
  out << "c1 = " << fmt(s.c1) << "\n";
  out << "c2 = " << fmt(s.c2) << "\n";
  out << "allow_slow_inclusion = " << (s.allow_slow_inclusion ? "true" : "false")
      << "\n";
  out << "\n[observation]\n";
  switch (s.observation.mode) {
    case ObservationSpec::Mode::Full:
      out << "mode = full\n";
      break;
    case ObservationSpec::Mode::Point:
      out << "mode = point\n";
      out << "x0 = (" << fmt(s.observation.x0.x) << ", " << fmt(s.observation.x0.y)
          << ")\n";
      break;
    case ObservationSpec::Mode::Arc:
      out << "mode = arc\n";
      out << "units = "
          << (s.observation.units == ObservationSpec::Units::Angle ? "angle" : "param")
          << "\n";
      out << "lo = " << fmt(s.observation.lo) << "\n";
      out << "hi = " << fmt(s.observation.hi) << "\n";
      break;
  }
  out << "\n[caps]\n";
  out << "horizon = " << fmt(s.caps.horizon) << "\n";
  out << "depth = " << s.caps.depth_cap << "\n";
  out << "max_events = " << s.caps.max_events << "\n";
  out << "max_iter = " << s.caps.max_iter << "\n";
  out << "\n[tolerances]\n";
  out << "geom = " << fmt(s.tol.geom) << "\n";
  out << "tangency = " << fmt(s.tol.tangency) << "\n";
  out << "angle = " << fmt(s.tol.angle) << "\n";
  out << "arc = " << fmt(s.tol.arc) << "\n";
  out << "witness = " << fmt(s.tol.witness) << "\n";
  out << "mono = " << fmt(s.tol.mono) << "\n";
  out << "orbit = " << fmt(s.tol.orbit) << "\n";
  out << "\n[sampling]\n";
  out << "grid_s = " << s.sampling.grid_s << "\n";
  out << "grid_theta = " << s.sampling.grid_theta << "\n";
  out << "seed = " << s.sampling.seed << "\n";
  out << "glide_spacing = " << fmt(s.sampling.glide_spacing) << "\n";
  return out.str();
}

}  // namespace raysplit
