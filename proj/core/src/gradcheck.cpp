#include "topicsent/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace topicsent {
namespace {

void check_eps(double eps) {
  if (!(eps > 0.0 && eps <= 1e-2)) throw std::invalid_argument("grad_check: eps must be in (0, 1e-2]");
}

double finite_or_throw(double v) {
  if (!std::isfinite(v)) throw ag::NumericError("grad_check: f(x) is not finite");
  return v;
}

double relative_error(double ad, double fd) {
  return std::abs(ad - fd) / std::max({1.0, std::abs(ad), std::abs(fd)});
}

}  // namespace

double grad_check(const std::function<ag::Var(ag::Tape&, ag::Var)>& f, const Tensor& x,
                  double eps) {
  ag::Parameter leaf("x", x);
  return grad_check_parameters(
      [&](ag::Tape& tape) { return f(tape, tape.parameter(leaf)); }, {&leaf}, eps);
}

double grad_check_parameters(const std::function<ag::Var(ag::Tape&)>& loss,
                             const std::vector<ag::Parameter*>& params, double eps,
                             std::size_t max_coords_per_param) {
  check_eps(eps);
  for (auto* p : params) p->zero_grad();
  {
    ag::Tape tape;
    ag::Var out = loss(tape);
    if (out.value().size() != 1) throw ShapeError("grad_check: loss must be a scalar");
    finite_or_throw(out.value()[0]);
    tape.backward(out);
  }
  auto evaluate = [&]() {
    ag::Tape tape;
    return finite_or_throw(loss(tape).value()[0]);
  };

  double worst = 0.0;
  for (auto* p : params) {
    const std::size_t n = p->value.size();
    const std::size_t count = max_coords_per_param ? std::min(n, max_coords_per_param) : n;
    for (std::size_t k = 0; k < count; ++k) {
      const std::size_t i = count == n ? k : (k * n) / count;
      const double saved = p->value[i];
      p->value[i] = saved + eps;
      const double up = evaluate();
      p->value[i] = saved - eps;
      const double down = evaluate();
      p->value[i] = saved;
      const double fd = (up - down) / (2.0 * eps);
      worst = std::max(worst, relative_error(p->grad[i], fd));
    }
  }
  return worst;
}

}  // namespace topicsent
