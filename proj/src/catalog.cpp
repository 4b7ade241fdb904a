#include "ratelab/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ratelab/numerics.hpp"

namespace ratelab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Component {
  enum class Kind { laplace, gaussian };
  Kind kind;
  double mean = 0.0;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& text) {
  std::size_t pos = 0;
  double v;
  try {
    v = std::stod(text, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("model id: bad number '" + text + "'");
  }
  if (pos != text.size() || !std::isfinite(v)) {
    throw std::invalid_argument("model id: bad number '" + text + "'");
  }
  return v;
}

Component parse_component(const std::string& raw) {
  const std::string s = trim(raw);
  if (s == "laplace") return Component{Component::Kind::laplace, 0.0};
  if (s == "gaussian") return Component{Component::Kind::gaussian, 0.0};
  if (s.rfind("gaussian(", 0) == 0 && s.back() == ')') {
    const std::string inner = s.substr(9, s.size() - 10);
    return Component{Component::Kind::gaussian, parse_number(inner)};
  }
  throw std::invalid_argument("unknown model component '" + s + "'");
}

std::vector<Component> parse_components(const std::string& model_id) {
  const std::string s = trim(model_id);
  if (s.rfind("robust:", 0) == 0) {
    std::vector<Component> comps;
    std::string rest = s.substr(7);
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = rest.find(',', start);
      const std::string part = rest.substr(start, comma == std::string::npos
                                                      ? std::string::npos
                                                      : comma - start);
      if (trim(part).empty()) throw std::invalid_argument("robust model: empty component");
      comps.push_back(parse_component(part));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (comps.size() < 2) {
      throw std::invalid_argument("robust model needs at least two components");
    }
    return comps;
  }
  return {parse_component(s)};
}

void validate_box(const GridSpace& box, const std::vector<Component>& comps) {
  if (box.dim() != 1) throw std::invalid_argument("model box must be one-dimensional");
  if (box.topology() != GridTopology::box_morphology) {
    throw std::invalid_argument("model box must use box morphology");
  }
  if (box.points(0) < 2) throw std::invalid_argument("model box needs at least two points");
  const double slack = 1e-9;
  for (const Component& c : comps) {
    double need_lo, need_hi;
    if (c.kind == Component::Kind::laplace) {
      need_lo = -3.0;
      need_hi = 3.0;
    } else {
      need_lo = std::min(-4.0, c.mean - 3.0);
      need_hi = std::max(4.0, c.mean + 3.0);
    }
    if (box.lower(0) > need_lo + slack || box.upper(0) < need_hi - slack) {
      throw std::invalid_argument("model box too small for the density tails");
    }
  }
}

// log(Phi(beta) - Phi(alpha)) for alpha < beta, stable in both tails.
double log_normal_interval(double alpha, double beta) {
  if (!(beta > alpha)) return -kInf;
  if (alpha >= 0.0) {
    const double la = log_normal_upper(alpha);
    const double lb = log_normal_upper(beta);
    return la + log1mexp(std::min(lb - la, 0.0));
  }
  if (beta <= 0.0) return log_normal_interval(-beta, -alpha);
  return log_sum_exp(log_normal_interval(alpha, 0.0), log_normal_interval(0.0, beta));
}

// Exact log integrals of exp(n * f) against the component density, where f is
// the piecewise-linear interpolant of the grid values on its finite runs,
// extended by half a cell toward interior gaps and by analytic tails (with the
// edge segment's slope) beyond the box. Runs tile the Voronoi cells of their
// grid points, so set masses are consistent across singleton and union sets.
class ModelEngine {
 public:
  ModelEngine(GridSpace space, std::vector<Component> comps, const std::vector<int>& ladder)
      : space_(std::move(space)), comps_(std::move(comps)), zero_(GridFunction::constant(space_, 0.0)) {
    for (int n : ladder) {
      for (std::size_t ci = 0; ci < comps_.size(); ++ci) {
        const double z = log_integral(ci, zero_, n);
        if (!(std::abs(z) <= 1e-6)) {
          throw std::logic_error("density normalization check failed for n=" + std::to_string(n));
        }
        normalizers_[{ci, n}] = z;
      }
    }
  }

  const GridSpace& space() const { return space_; }
  std::size_t component_count() const { return comps_.size(); }

  double normalizer(std::size_t ci, int n) const {
    const auto it = normalizers_.find({ci, n});
    if (it != normalizers_.end()) return it->second;
    return log_integral(ci, zero_, n);
  }

  // Returns log of the integral; +inf when a tail integral diverges.
  double log_integral(std::size_t ci, const GridFunction& f, int n) const {
    const Component& comp = comps_[ci];
    const std::size_t count = space_.size();
    const double h = space_.step(0);
    std::vector<double> piece_logs;
    piece_logs.reserve(count + 8);
    bool divergent = false;

    auto push = [&](double v) {
      if (v == kInf) divergent = true;
      else if (v > -kInf) piece_logs.push_back(v);
    };
    auto fv = [&](std::size_t k) { return f.value(k).value(); };
    auto x = [&](std::size_t k) { return space_.coord(k, 0); };

    std::size_t i = 0;
    while (i < count && !divergent) {
      if (!f.value(i).is_finite()) {
        ++i;
        continue;
      }
      const std::size_t a = i;
      while (i + 1 < count && f.value(i + 1).is_finite()) ++i;
      const std::size_t b = i;
      ++i;

      if (a > 0) {
        push(piece(comp, n, x(a) - 0.5 * h, x(a), fv(a), 0.0));
      } else {
        const double s = (b > a) ? (fv(a + 1) - fv(a)) / h : 0.0;
        push(tail_left(comp, n, x(a), fv(a), s));
      }
      for (std::size_t k = a; k < b && !divergent; ++k) {
        push(piece(comp, n, x(k), x(k + 1), fv(k), (fv(k + 1) - fv(k)) / h));
      }
      if (!divergent) {
        if (b < count - 1) {
          push(piece(comp, n, x(b), x(b) + 0.5 * h, fv(b), 0.0));
        } else {
          const double s = (b > a) ? (fv(b) - fv(b - 1)) / h : 0.0;
          push(tail_right(comp, n, x(b), fv(b), s));
        }
      }
    }
    if (divergent) return kInf;
    return log_sum_exp(piece_logs);
  }

 private:
  // Integral over [u, v] of exp(n * (f_u + s (x - u))) against the density.
  double piece(const Component& comp, int n, double u, double v, double f_u, double s) const {
    if (!(v > u)) return -kInf;
    if (comp.kind == Component::Kind::gaussian) return gauss_piece(comp.mean, n, u, v, f_u, s);
    if (u < 0.0 && v > 0.0) {
      const double f0 = f_u + s * (0.0 - u);
      return log_sum_exp(laplace_signed(n, u, 0.0, f_u, s, -1),
                         laplace_signed(n, 0.0, v, f0, s, +1));
    }
    return laplace_signed(n, u, v, f_u, s, u >= 0.0 ? +1 : -1);
  }

  static double laplace_signed(int n, double u, double v, double f_u, double s, int sigma) {
    const double delta = v - u;
    if (!(delta > 0.0)) return -kInf;
    return std::log(0.5 * n) + n * (f_u - sigma * u) + std::log(delta) +
           log_expm1_ratio(n * (s - sigma) * delta);
  }

  double gauss_piece(double m, int n, double u, double v, double f_u, double s) const {
    const double mu = m + s;
    const double c = f_u - s * u + s * m + 0.5 * s * s;
    const double root_n = std::sqrt(static_cast<double>(n));
    return n * c + log_normal_interval(root_n * (u - mu), root_n * (v - mu));
  }

  double tail_right(const Component& comp, int n, double u, double f_u, double s) const {
    if (comp.kind == Component::Kind::gaussian) {
      const double mu = comp.mean + s;
      const double c = f_u - s * u + s * comp.mean + 0.5 * s * s;
      return n * c + log_normal_upper(std::sqrt(static_cast<double>(n)) * (u - mu));
    }
    // Slopes within 1e-9 of the critical value 1 are treated as divergent so
    // that nominal slope-1 inputs are not rescued by representation dust.
    if (s >= 1.0 - 1e-9) return kInf;
    return std::log(0.5) + n * (f_u - u) - std::log(1.0 - s);
  }

  double tail_left(const Component& comp, int n, double u, double f_u, double s) const {
    if (comp.kind == Component::Kind::gaussian) {
      const double mu = comp.mean + s;
      const double c = f_u - s * u + s * comp.mean + 0.5 * s * s;
      return n * c + log_normal_upper(std::sqrt(static_cast<double>(n)) * (mu - u));
    }
    if (s <= -1.0 + 1e-9) return kInf;
    return std::log(0.5) + n * (f_u + u) - std::log(1.0 + s);
  }

  GridSpace space_;
  std::vector<Component> comps_;
  GridFunction zero_;
  std::map<std::pair<std::size_t, int>, double> normalizers_;
};

}  // namespace

GridSpace default_box(const std::string& model_id) {
  const std::vector<Component> comps = parse_components(model_id);
  const bool any_gaussian =
      std::any_of(comps.begin(), comps.end(),
                  [](const Component& c) { return c.kind == Component::Kind::gaussian; });
  if (any_gaussian) return GridSpace::line(-4.0, 4.0, 401);
  return GridSpace::line(-3.0, 3.0, 601);
}

bool is_known_model_id(const std::string& model_id) {
  try {
    parse_components(model_id);
    return true;
  } catch (const std::invalid_argument&) {
    return false;
  }
}

EntropyModel make_model(const std::string& model_id, const GridSpace& box,
                        std::vector<int> n_ladder, int tail_window) {
  std::vector<Component> comps = parse_components(model_id);
  validate_box(box, comps);
  auto engine = std::make_shared<const ModelEngine>(box, std::move(comps), n_ladder);

  EntropyModel::PerN per_n = [engine](const GridFunction& f, int n) -> ExtendedValue {
    double best = -kInf;
    for (std::size_t ci = 0; ci < engine->component_count(); ++ci) {
      const double l = engine->log_integral(ci, f, n);
      if (l == kInf) return ExtendedValue::pos_inf();
      best = std::max(best, (l - engine->normalizer(ci, n)) / n);
    }
    if (best == -kInf) return ExtendedValue::neg_inf();
    return ExtendedValue(best);
  };

  EntropyModel::LogCapacity log_capacity = [engine](const PointSet& a, int n) -> double {
    const GridFunction indicator = mask(GridFunction::constant(engine->space(), 0.0), a);
    double best = -kInf;
    for (std::size_t ci = 0; ci < engine->component_count(); ++ci) {
      best = std::max(best,
                      engine->log_integral(ci, indicator, n) - engine->normalizer(ci, n));
    }
    return best;
  };

  return EntropyModel(trim(model_id), box, std::move(per_n), std::move(log_capacity),
                      std::move(n_ladder), tail_window);
}

EntropyModel make_model(const std::string& model_id) {
  return make_model(model_id, default_box(model_id));
}

}  // namespace ratelab
