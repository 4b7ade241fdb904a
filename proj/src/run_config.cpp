#include "ratelab/run_config.hpp"

#include <cmath>
#include <stdexcept>

#include "ratelab/catalog.hpp"

namespace ratelab {

json RunConfig::provenance() const {
  json box = json::object();
  if (box_lower && box_upper && box_points) {
    box = json{{"lower", json_number(*box_lower)},
               {"upper", json_number(*box_upper)},
               {"points", *box_points}};
  } else {
    box = json{{"default_for_model", model_id}};
  }
  return json{{"model", model_id},
              {"family", family_spec},
              {"function", function_spec},
              {"box", box},
              {"n_ladder", n_ladder},
              {"tail_window", tail_window},
              {"tol_asymptotic", tol_asymptotic},
              {"tol_exact", tol_exact},
              {"margin", margin},
              {"radius", radius},
              {"out_dir", out_dir},
              {"seed", seed}};
}

GridSpace make_space(const RunConfig& config) {
  const bool any = config.box_lower || config.box_upper || config.box_points;
  const bool all = config.box_lower && config.box_upper && config.box_points;
  if (any && !all) {
    throw std::invalid_argument(
        "grid override requires all of box lower, box upper and box points");
  }
  if (all) return GridSpace::line(*config.box_lower, *config.box_upper, *config.box_points);
  return default_box(config.model_id);
}

GridFunction parse_function_spec(const std::string& spec, const GridSpace& space) {
  const auto scalar = [&](const std::string& text, const char* what) {
    std::size_t pos = 0;
    double v;
    try {
      v = std::stod(text, &pos);
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string(what) + ": bad number '" + text + "'");
    }
    if (pos != text.size() || !std::isfinite(v)) {
      throw std::invalid_argument(std::string(what) + ": bad number '" + text + "'");
    }
    return v;
  };

  if (spec.rfind("const:", 0) == 0) {
    return GridFunction::constant(space, scalar(spec.substr(6), "const function"));
  }
  if (spec.rfind("linear:", 0) == 0) {
    if (space.dim() != 1) throw std::invalid_argument("linear function needs a 1-d grid");
    const double y = scalar(spec.substr(7), "linear function");
    return GridFunction::from_fn(space,
                                 [y](const std::vector<double>& x) { return y * x[0]; });
  }
  if (spec.rfind("invv:", 0) == 0) {
    if (space.dim() != 1) throw std::invalid_argument("invv function needs a 1-d grid");
    const double a = scalar(spec.substr(5), "invv function");
    return GridFunction::from_fn(space, [a](const std::vector<double>& x) {
      return std::abs(a) - 2.0 * std::abs(x[0] - a);
    });
  }
  throw std::invalid_argument("unknown function spec '" + spec +
                              "' (expected const:<c> | linear:<y> | invv:<a>)");
}

}  // namespace ratelab
