#pragma once

#include <string>
#include <vector>

#include "ratelab/entropy.hpp"
#include "ratelab/grid.hpp"

namespace ratelab {

// Closed-form one-dimensional models. Each model integrates exp(n f) against
// its scale-n density exactly: the grid function is extended piecewise
// linearly (linear tails beyond the box, using the edge-cell slope), and
// every cell integral has a closed form, so no quadrature error enters
// beyond the piecewise-linear representation of f itself. Divergent tails
// (e.g. a Laplace tail against slope >= 1) surface as +inf.
//
// Model id grammar:
//   laplace            density (n/2) exp(-n|x|)
//   gaussian           mean-0 normal with variance 1/n
//   gaussian(m)        mean-m normal with variance 1/n
//   robust:ID,ID,...   exact max over component models (>= 2 components)

// Default working box for a model id: laplace-based models use [-3,3] with
// 601 points; gaussian-based ones use [-4,4] with 401 points.
GridSpace default_box(const std::string& model_id);

// Build the model on the given box (1-d only). The box must contain
// [-3,3] for laplace components and [-4,4] for gaussian components.
// n_ladder defaults to {4,8,16,32,64,128,256} with tail window 3.
// At construction the scale-n mass of the whole line is checked to be
// 1 within 1e-6 for every ladder entry; entropies are normalized by the
// computed mass so constants are preserved exactly.
EntropyModel make_model(const std::string& model_id, const GridSpace& box,
                        std::vector<int> n_ladder = {4, 8, 16, 32, 64, 128, 256},
                        int tail_window = 3);

EntropyModel make_model(const std::string& model_id);

bool is_known_model_id(const std::string& model_id);

}  // namespace ratelab
