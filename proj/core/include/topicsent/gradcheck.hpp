#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "topicsent/autograd.hpp"

namespace topicsent {

/// Largest |g_ad - g_fd| / max(1, |g_ad|, |g_fd|) over the coordinates of x,
/// where g_fd is the central difference with step eps. f builds a scalar on
/// the given tape from the leaf standing for x.
double grad_check(const std::function<ag::Var(ag::Tape&, ag::Var)>& f, const Tensor& x,
                  double eps = 1e-5);

/// Same measure over every coordinate of a set of parameters. loss builds a
/// scalar from the current parameter values. When max_coords_per_param is
/// nonzero, only that many evenly spaced coordinates of each parameter are
/// perturbed.
double grad_check_parameters(const std::function<ag::Var(ag::Tape&)>& loss,
                             const std::vector<ag::Parameter*>& params, double eps = 1e-5,
                             std::size_t max_coords_per_param = 0);

}  // namespace topicsent
